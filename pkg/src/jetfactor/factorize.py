"""Factor the pullback matrix of a strict order-(0, 0) equivalence between
two 2-control systems as A = g * S * G.

S is the fixed shift pattern (build_S): the level-0 pivot row moves to the
second control column one level up, the remaining state rows stay put, and
at each control level the first column shifts down while the second shifts
up.  g and G are block-lower-triangular coframe changes on the two sides
("nonautonomous static" changes: they never mix a level into a higher one),
with all control-level diagonal blocks equal.

The factorization is computed by recorded row operations (collected into g)
and column operations (collected into G) driving a working copy of A onto
the S pattern.  Row mixes and scales at control levels are replicated across
every level so the diagonal-equality invariant holds by construction; the
column side uses only unit shears and swaps, which is what makes G land on
the narrow three-function pattern (check_gnice) whenever the input comes
from an equivalence in the normalized class.

The product identity g * S * G == A is checked before returning; every
division performed along the way is recorded as a nonvanishing assumption.
"""

from .ratfn import RatFn, ZERO, ONE
from .errors import (DimensionMismatch, RankMismatch, PivotVanishes,
                     DiagonalDrift, StructureViolation, PatternViolation,
                     TruncationExceeded)
from .equivalence import BlockMatrix, block_rank


class StackpoleMatrix:
    """The fixed shift pattern for n states at truncation level N."""

    def __init__(self, n, N, mat):
        self.n = n
        self.N = N
        self.mat = mat

    def __eq__(self, o):
        return isinstance(o, StackpoleMatrix) and self.mat == o.mat


def build_S(n, N):
    """Rows -1..N, columns -1..N+1; unit entries at
    (-1,1)->(-1,1), (0,1)->(1,2), (0,i)->(0,i) for i >= 2,
    (k,1)->(k-1,1) and (k,2)->(k+1,2) for 1 <= k <= N."""
    if n < 2 or N < 2:
        raise DimensionMismatch("shift pattern needs n >= 2 and N >= 2")
    rows = [-1] + list(range(0, N + 1))
    cols = [-1] + list(range(0, N + 2))
    rsz = {-1: 1, 0: n, **{k: 2 for k in range(1, N + 1)}}
    csz = {-1: 1, 0: n, **{k: 2 for k in range(1, N + 2)}}
    m = BlockMatrix(rows, cols, rsz, csz, meta={"kind": "shift", "n": n, "N": N})
    m.set((-1, 1), (-1, 1), ONE)
    m.set((0, 1), (1, 2), ONE)
    for i in range(2, n + 1):
        m.set((0, i), (0, i), ONE)
    for k in range(1, N + 1):
        m.set((k, 1), (k - 1, 1), ONE)
        m.set((k, 2), (k + 1, 2), ONE)
    return StackpoleMatrix(n, N, m)


class NonautStatic:
    """A square block-lower coframe change over one frame's labels.

    structure_preserving asserts the extra invariant that all control-level
    diagonal blocks are equal (checked here, DiagonalDrift otherwise).
    """

    def __init__(self, mat, structure_preserving=False):
        if not mat.is_block_lower():
            raise StructureViolation("matrix mixes a level into a higher one")
        if mat.row_levels != mat.col_levels or mat.row_sizes != mat.col_sizes:
            raise DimensionMismatch("coframe change must be square")
        self.mat = mat
        self.structure_preserving = structure_preserving
        if structure_preserving:
            lev = [l for l in mat.row_levels if l >= 1]
            if lev:
                ref = mat.block(1, 1)
                for l in lev[1:]:
                    if mat.block(l, l) != ref:
                        raise DiagonalDrift(
                            "diagonal block at level %d differs from level 1" % l)

    def __eq__(self, o):
        return isinstance(o, NonautStatic) and self.mat == o.mat

    def block(self, rl, cl):
        return self.mat.block(rl, cl)


class Factorization:
    """Result of factor_JK0.

    edge_cols lists the columns at the top of the truncation whose entries
    would need data beyond the truncation to reproduce; product comparison
    skips them (they are empty for the raw elimination path).
    """

    def __init__(self, g, S, G, assumptions, edge_cols=(), ops=()):
        self.g = g
        self.S = S
        self.G = G
        self.assumptions = list(assumptions)
        self.edge_cols = tuple(edge_cols)
        self.ops = list(ops)

    def product(self):
        return self.g.mat.matmul(self.S.mat).matmul(self.G.mat)

    def matches(self, A):
        """Exact product reconstruction on the truncation interior."""
        prod = self.product()
        skip = set(self.edge_cols)
        for key in set(prod.entries) | set(A.entries):
            if key[1] in skip:
                continue
            if prod.entries.get(key, ZERO) != A.entries.get(key, ZERO):
                return False
        return True


class GnicePattern:
    """The three functions determining a normalized right factor."""

    def __init__(self, p0, p1, q):
        self.p0 = p0
        self.p1 = p1
        self.q = q

    def __eq__(self, o):
        return (isinstance(o, GnicePattern) and self.p0 == o.p0
                and self.p1 == o.p1 and self.q == o.q)

    def __repr__(self):
        return "GnicePattern(p0=%s, p1=%s, q=%s)" % (
            self.p0.to_text(), self.p1.to_text(), self.q.to_text())


# ---------------------------------------------------------------------------
# the factorizer

class _Driver:
    """Working copy plus the accumulated left/right elementary products."""

    def __init__(self, A):
        self.W = A.copy()
        self.L = BlockMatrix.identity(A.row_levels, A.row_sizes)
        self.R = BlockMatrix.identity(A.col_levels, A.col_sizes)
        self.assumptions = []
        self.ops = []

    def note(self, d):
        if not d.is_const():
            t = d.to_text()
            if t not in self.assumptions:
                self.assumptions.append(t)

    def row_add(self, dst, src, c):
        self.ops.append("row %s += (%s) * row %s" % (dst, c.to_text(), src))
        self.W.row_add(dst, src, c)
        self.L.row_add(dst, src, c)

    def row_scale(self, r, c):
        self.ops.append("row %s *= %s" % (r, c.to_text()))
        self.W.row_scale(r, c)
        self.L.row_scale(r, c)

    def row_swap(self, a, b):
        self.ops.append("swap rows %s, %s" % (a, b))
        self.W.row_swap(a, b)
        self.L.row_swap(a, b)

    def col_add(self, dst, src, c):
        self.ops.append("col %s += (%s) * col %s" % (dst, c.to_text(), src))
        self.W.col_add(dst, src, c)
        self.R.col_add(dst, src, c)

    def col_swap(self, a, b):
        self.ops.append("swap cols %s, %s" % (a, b))
        self.W.col_swap(a, b)
        self.R.col_swap(a, b)

    def permute_block0_rows(self, perm):
        self.ops.append("permute level-0 rows by %s" %
                        sorted(perm.items()))
        self.W.permute_rows(0, perm)
        self.L.permute_rows(0, perm)


def factor_JK0(A, seed=0):
    """Factor a strict (J = K = 0) pullback matrix as g * S * G.

    Preconditions: two controls on both sides, equal state counts, the
    blocks A^0_1 and A^1_2 both of generic rank 1.  The matrix must hold
    levels 0..N with N >= 2 (columns to N+1), as pullback_matrix produces
    for a strict map.
    """
    J = A.meta.get("J", 0)
    N = A.meta.get("N", max(A.row_levels))
    n = A.row_sizes[0]
    if A.col_sizes[0] != n:
        raise DimensionMismatch("state counts differ; the shift pattern is square in block 0")
    if A.row_sizes.get(1) != 2 or A.col_sizes.get(1) != 2:
        raise DimensionMismatch("factorization is defined for two controls")
    if J != 0:
        raise RankMismatch("matrix comes from an order-%d map, not a strict one" % J)
    if N < 2 or max(A.col_levels) < N + 1:
        raise TruncationExceeded("need levels 0..N with N >= 2 and columns to N+1")
    if block_rank(A, 0, 1, seed=seed) != 1:
        raise RankMismatch("block (0,1) must have generic rank 1")
    if block_rank(A, 1, 2, seed=seed) != 1:
        raise RankMismatch("block (1,2) must have generic rank 1")
    colN = max(A.col_levels)

    d = _Driver(A)
    W = d.W

    # ---- stage A: the level-0 rows -----------------------------------

    # bring the row that meets the control columns to the top (cyclically,
    # keeping the cyclic order of the others)
    p = None
    for i in range(1, n + 1):
        if any(not W.get((0, i), (1, j)).is_zero() for j in (1, 2)):
            p = i
            break
    if p is None:
        raise RankMismatch("no level-0 row meets the control columns")
    if p != 1:
        perm = {i: ((i - p) % n) + 1 for i in range(1, n + 1)}
        d.permute_block0_rows(perm)

    # normalize the pivot row over the level-1 columns to (0, 1): a unit
    # shear into the first column (replicated to every level so the right
    # factor keeps equal diagonal blocks), then a row scale
    alpha = W.get((0, 1), (1, 1))
    beta = W.get((0, 1), (1, 2))
    if beta.is_zero():
        for k in range(1, colN + 1):
            d.col_swap((k, 1), (k, 2))
        alpha, beta = W.get((0, 1), (1, 1)), W.get((0, 1), (1, 2))
    if not alpha.is_zero():
        shear = ZERO - alpha / beta
        d.note(beta)
        for k in range(1, colN + 1):
            d.col_add((k, 1), (k, 2), shear)
    d.note(beta)
    d.row_scale((0, 1), ONE / beta)

    # the other level-0 rows are proportional to the pivot row over the
    # level-1 columns, so after the shear their first-column entries vanish
    for i in range(2, n + 1):
        if not W.get((0, i), (1, 1)).is_zero():
            raise RankMismatch("level-0 rows are not proportional over the control columns")
        gi = W.get((0, i), (1, 2))
        if not gi.is_zero():
            d.row_add((0, i), (0, 1), ZERO - gi)

    # clear the pivot row's state entries with shears out of column (1,2)
    for j in range(1, n + 1):
        w = W.get((0, 1), (0, j))
        if not w.is_zero():
            d.col_add((0, j), (1, 2), ZERO - w)
    if not W.get((0, 1), (-1, 1)).is_zero():
        raise StructureViolation("pivot row keeps a dt component")

    # reduce the remaining level-0 rows to (0 | identity)
    for i in range(2, n + 1):
        found = None
        for c in [i] + list(range(i + 1, n + 1)) + [1]:
            for r in range(i, n + 1):
                if not W.get((0, r), (0, c)).is_zero():
                    found = (r, c)
                    break
            if found:
                break
        if not found:
            raise RankMismatch("level-0 state block is singular")
        r, c = found
        if r != i:
            d.row_swap((0, r), (0, i))
        if c != i:
            d.col_swap((0, c), (0, i))
        pv = W.get((0, i), (0, i))
        d.note(pv)
        d.row_scale((0, i), ONE / pv)
        for r2 in range(2, n + 1):
            if r2 == i:
                continue
            w = W.get((0, r2), (0, i))
            if not w.is_zero():
                d.row_add((0, r2), (0, i), ZERO - w)
    for i in range(2, n + 1):
        w = W.get((0, i), (0, 1))
        if not w.is_zero():
            d.col_add((0, 1), (0, i), ZERO - w)

    # ---- stage B: the control levels ----------------------------------

    # normalize the repeating block to [[0,0],[0,1]] with row mixes
    # replicated across all control levels
    if not (W.get((1, 1), (2, 1)).is_zero() and W.get((1, 2), (2, 1)).is_zero()):
        raise StructureViolation("repeat block escapes the normalized column")
    b_ = W.get((1, 1), (2, 2))
    e_ = W.get((1, 2), (2, 2))
    if e_.is_zero():
        if b_.is_zero():
            raise RankMismatch("repeat block vanished after normalization")
        for k in range(1, N + 1):
            d.row_swap((k, 1), (k, 2))
        b_, e_ = W.get((1, 1), (2, 2)), W.get((1, 2), (2, 2))
    if not b_.is_zero():
        d.note(e_)
        mix = ZERO - b_ / e_
        for k in range(1, N + 1):
            d.row_add((k, 1), (k, 2), mix)
    if e_ != ONE:
        d.note(e_)
        sc = ONE / e_
        for k in range(1, N + 1):
            d.row_scale((k, 2), sc)
    for i in range(1, N):
        if W.block(i, i + 1) != [[ZERO, ZERO], [ZERO, ONE]]:
            raise StructureViolation("repeat blocks disagree at level %d" % i)

    # descend level by level; the first-column pivot must be the same
    # function at every level, so one replicated scale fixes them all
    for i in range(1, N + 1):
        r = (i, 1)
        for k in range(i, 0, -1):
            w = W.get(r, (k, 2))
            if not w.is_zero():
                d.row_add(r, (0, 1) if k == 1 else (k - 1, 2), ZERO - w)
        for k in range(0, i - 1):
            w = W.get(r, (k, 1))
            if not w.is_zero():
                d.row_add(r, (k + 1, 1), ZERO - w)
        for j in range(2, n + 1):
            w = W.get(r, (0, j))
            if not w.is_zero():
                d.row_add(r, (0, j), ZERO - w)
        if i >= 2:
            w = W.get(r, (0, 1))
            if not w.is_zero():
                d.row_add(r, (1, 1), ZERO - w)
        if not W.get(r, (i, 1)).is_zero():
            raise StructureViolation("row (%d,1) keeps an entry at its own level" % i)
        piv = W.get(r, (i - 1, 1))
        if piv.is_zero():
            raise PivotVanishes("shift pivot of row (%d,1) reduces to zero" % i)
        if i == 1:
            d.note(piv)
            sc = ONE / piv
            for k in range(1, N + 1):
                d.row_scale((k, 1), sc)
        elif piv != ONE:
            raise DiagonalDrift("pivot of row (%d,1) is %s, not the level-1 pivot"
                                % (i, piv.to_text()))

        r = (i, 2)
        for k in range(i, 0, -1):
            w = W.get(r, (k, 2))
            if not w.is_zero():
                d.row_add(r, (0, 1) if k == 1 else (k - 1, 2), ZERO - w)
        for k in range(0, i - 1):
            w = W.get(r, (k, 1))
            if not w.is_zero():
                d.row_add(r, (k + 1, 1), ZERO - w)
        for j in range(2, n + 1):
            w = W.get(r, (0, j))
            if not w.is_zero():
                d.row_add(r, (0, j), ZERO - w)
        # the leftover entries toward the shift column leave through the
        # next level's second column, whose only settled entry is this row's
        # unit; row operations here would break the diagonal equality of g
        for cc in ((i - 1, 1), (i, 1)):
            w = W.get(r, cc)
            if not w.is_zero():
                d.col_add(cc, (i + 1, 2), ZERO - w)

    # ---- wrap up -------------------------------------------------------

    S = build_S(n, N)
    if not (W.entries == S.mat.entries):
        extra = sorted(set(W.entries) ^ set(S.mat.entries))
        raise StructureViolation("reduction did not reach the shift pattern; "
                                 "mismatched entries at %s" % (extra[:6],))
    g = NonautStatic(d.L.full_inverse(), structure_preserving=True)
    G = NonautStatic(d.R.full_inverse(), structure_preserving=True)
    product = g.mat.matmul(S.mat).matmul(G.mat)
    if not (product.entries == A.entries):
        raise StructureViolation("product of the factors does not reproduce the input")
    fac = Factorization(g, S, G, d.assumptions, ops=d.ops)
    if n == 3:
        canon = _canonicalize(A, S, d.assumptions, d.ops)
        if canon is not None:
            return canon
    return fac


def _gnice_matrix(levels, sizes, p0, p1, q):
    m = BlockMatrix(list(levels), list(levels), dict(sizes), dict(sizes),
                    meta={"kind": "gnice"})
    m.set((-1, 1), (-1, 1), ONE)
    n = sizes[0]
    for i in range(1, n + 1):
        m.set((0, i), (0, i), ONE)
    if not p0.is_zero():
        m.set((0, 2), (0, 1), p0)
    top = max(levels)
    for k in range(1, top + 1):
        m.set((k, 1), (k, 1), ONE)
        m.set((k, 2), (k, 2), ONE)
        if not p0.is_zero():
            m.set((k, 2), (k, 1), p0)
    if not p1.is_zero():
        m.set((1, 2), (0, 1), p1)
    for k in range(1, top):
        c = p1 + RatFn.const(k) * q
        if not c.is_zero():
            m.set((k + 1, 2), (k, 1), c)
    return m


def _canonicalize(A, S, assumptions, ops=()):
    """Rebuild the factorization with the right factor in the narrow
    three-function shape, when the input admits one.

    The raw elimination already yields a legal factorization, but its
    column operations can scatter entries outside the narrow pattern.
    With the right factor forced into the pattern G(p0, p1, q), the left
    factor g = A * Ginv * S^T has every entry affine in (p0, p1, q):

        g[x, (k,1)] = A[x,(k-1,1)] - A[x,(k-1,2)] p0 - A[x,(k,2)] (p1 + (k-1) q)
        g[x, (0,1)] = A[x,(1,2)],  g[x,(0,i)] = A[x,(0,i)],
        g[x, (k,2)] = A[x,(k+1,2)]

    so block-lowerness and diagonal equality of g become an exact linear
    system for the three functions.  Solve it; an inconsistent system means
    the input has no representative in the narrow shape and the raw
    factorization stands.
    """
    rows = A.row_labels()

    def affine(x, r):
        # (base, coeff of p0, coeff of p1, coeff of q)
        k, j = r
        if k == -1:
            return (A.get(x, (-1, 1)), ZERO, ZERO, ZERO)
        if k == 0:
            base = A.get(x, (1, 2)) if j == 1 else A.get(x, (0, j))
            return (base, ZERO, ZERO, ZERO)
        if j == 1:
            prev2 = A.get(x, (k - 1, 2))
            nxt2 = A.get(x, (k, 2))
            return (A.get(x, (k - 1, 1)), ZERO - prev2, ZERO - nxt2,
                    ZERO - RatFn.const(k - 1) * nxt2)
        return (A.get(x, (k + 1, 2)), ZERO, ZERO, ZERO)

    eqs = []
    for x in rows:
        for r in rows:
            if x[0] < r[0]:
                af = affine(x, r)
                if any(not t.is_zero() for t in af):
                    eqs.append(af)
    maxrow = max(l for l in A.row_levels)
    for k in range(2, maxrow + 1):
        for a in (1, 2):
            for b in (1, 2):
                hi = affine((k, a), (k, b))
                lo = affine((1, a), (1, b))
                af = tuple(h - l for h, l in zip(hi, lo))
                if any(not t.is_zero() for t in af):
                    eqs.append(af)

    # solve c1*p0 + c2*p1 + c3*q = -base exactly by elimination
    sol = [None, None, None]
    work = [list(e) for e in eqs]
    for col in (1, 2, 3):
        pivot = None
        for e in work:
            if not e[col].is_zero():
                pivot = e
                break
        if pivot is None:
            continue
        work.remove(pivot)
        reduced = []
        for e in work:
            if e[col].is_zero():
                reduced.append(e)
                continue
            f = e[col] / pivot[col]
            reduced.append([e[i] - f * pivot[i] for i in range(4)])
        work = reduced
        sol[col - 1] = pivot
    for e in work:
        if all(e[i].is_zero() for i in (1, 2, 3)) and not e[0].is_zero():
            return None
    vals = [ZERO, ZERO, ZERO]
    for col in (3, 2, 1):
        pivot = sol[col - 1]
        if pivot is None:
            continue
        acc = ZERO - pivot[0]
        for c2 in (1, 2, 3):
            if c2 != col:
                acc = acc - pivot[c2] * vals[c2 - 1]
        vals[col - 1] = acc / pivot[col]
    p0, p1, q = vals

    Gmat = _gnice_matrix(A.col_levels, A.col_sizes, p0, p1, q)
    gmat = BlockMatrix(list(A.row_levels), list(A.row_levels),
                       dict(A.row_sizes), dict(A.row_sizes),
                       meta={"kind": "left-factor"})
    for x in rows:
        for r in rows:
            base, c0, c1, c2 = affine(x, r)
            val = base + c0 * p0 + c1 * p1 + c2 * q
            if not val.is_zero():
                gmat.set(x, r, val)
    top = max(A.col_levels)
    edge = ((top - 1, 1), (top, 1))
    try:
        g = NonautStatic(gmat, structure_preserving=True)
        G = NonautStatic(Gmat, structure_preserving=True)
    except (StructureViolation, DiagonalDrift):
        return None
    fac = Factorization(g, S, G, assumptions, edge_cols=edge,
                        ops=list(ops) + ["solve right factor onto the narrow "
                                         "pattern: p0=%s p1=%s q=%s"
                                         % (p0.to_text(), p1.to_text(),
                                            q.to_text())])
    if not fac.matches(A):
        return None
    return fac


# ---------------------------------------------------------------------------
# validation of coframe changes

def validate_nonaut_static(ns, frame):
    """Check that a coframe change keeps the frame's structure equations.

    Each transformed row Obar^i_j = sum ns[(i,j),c] * frame_c must satisfy,
    modulo the span of levels <= i,

        d Obar^i_j  in  span{ dt ^ (level i+1 transformed rows) }.

    Concretely: after dropping every wedge pair with a factor at level <= i,
    the residue may contain only dt ^ (level i+1) pairs, and its coefficient
    vector must lie in the row span of the level-(i+1) diagonal block.
    Returns a report; raises DiagonalDrift first when the diagonal-equality
    invariant fails, StructureViolation when the shape is not block-lower.
    """
    from .coframes import exterior_d
    from .jets import generic_rank

    mat = ns.mat if isinstance(ns, NonautStatic) else ns
    if not mat.is_block_lower():
        raise StructureViolation("coframe change mixes a level into a higher one")
    lev = [l for l in mat.row_levels if l >= 1]
    if lev:
        ref = mat.block(1, 1)
        for l in lev[1:]:
            if mat.block(l, l) != ref:
                raise DiagonalDrift("diagonal block at level %d differs from level 1" % l)
    if mat.get((-1, 1), (-1, 1)) != ONE:
        raise StructureViolation("the time row must stay untouched")

    M = max(mat.row_levels)
    if frame.N < M:
        raise TruncationExceeded("frame level %d below the change's top level %d"
                                 % (frame.N, M))
    failures = []
    for i in range(0, M):
        s = mat.row_sizes[i + 1]
        span_rows = [[mat.get((i + 1, a), (i + 1, b)) for b in range(1, s + 1)]
                     for a in range(1, s + 1)]
        span_rank = generic_rank(span_rows)
        for j in range(1, mat.row_sizes[i] + 1):
            obar = {}
            for c in mat.col_labels():
                coeff = mat.get((i, j), c)
                if coeff.is_zero():
                    continue
                for w, cw in frame.elements[c].items():
                    acc = obar.get(w, ZERO) + coeff * cw
                    if acc.is_zero():
                        obar.pop(w, None)
                    else:
                        obar[w] = acc
            got = frame.to_frame2(exterior_d(obar))
            partner = [ZERO] * s
            bad = []
            for key, val in got.items():
                a, b = key
                if 0 <= a[0] <= i or 0 <= b[0] <= i:
                    continue
                if a == (-1, 1) and b[0] == i + 1:
                    partner[b[1] - 1] = val
                else:
                    bad.append(key)
            if bad:
                failures.append(((i, j), sorted(bad)))
                continue
            if any(not v.is_zero() for v in partner):
                if generic_rank(span_rows + [partner]) != span_rank:
                    failures.append(((i, j), [("partner outside the row span",
                                               [v.to_text() for v in partner])]))
    return NonautReport(ns, failures)


class NonautReport:
    def __init__(self, ns, failures):
        self.ns = ns
        self.failures = failures
        self.passed = not failures

    def summary(self):
        if self.passed:
            return "coframe change preserves the structure equations"
        return "; ".join("row %s leaks %s" % (lab, pairs) for lab, pairs in self.failures)


# ---------------------------------------------------------------------------
# the narrow right-factor pattern

def check_gnice(G):
    """Match a right factor against the three-function pattern:

        G^0_0 = [[1,0,0],[p0,1,0],[0,0,1]]      G^k_k = [[1,0],[p0,1]]
        G^1_0 = [[0,0,0],[p1,0,0]]              G^(k+1)_k = [[0,0],[p1+k*q,0]]

    everything else zero except the untouched dt entry.  Returns the pattern
    (identity gives (0, 0, 0)); raises PatternViolation with the offending
    entry otherwise.  Defined for 3 states and 2 controls.
    """
    mat = G.mat if isinstance(G, NonautStatic) else G
    if mat.row_sizes.get(0) != 3 or mat.row_sizes.get(1) != 2:
        raise DimensionMismatch("pattern is defined for 3 states and 2 controls")
    M = max(mat.row_levels)
    p0 = mat.get((0, 2), (0, 1))
    p1 = mat.get((1, 2), (0, 1))
    q = (mat.get((2, 2), (1, 1)) - p1) if M >= 2 else ZERO

    want = {((-1, 1), (-1, 1)): ONE}
    for i in range(1, 4):
        want[((0, i), (0, i))] = ONE
    if not p0.is_zero():
        want[((0, 2), (0, 1))] = p0
    for k in range(1, M + 1):
        want[((k, 1), (k, 1))] = ONE
        want[((k, 2), (k, 2))] = ONE
        if not p0.is_zero():
            want[((k, 2), (k, 1))] = p0
    if not p1.is_zero():
        want[((1, 2), (0, 1))] = p1
    for k in range(1, M):
        c = p1 + RatFn.const(k) * q
        if not c.is_zero():
            want[((k + 1, 2), (k, 1))] = c
    for key in sorted(set(mat.entries) | set(want)):
        a = mat.entries.get(key, ZERO)
        b = want.get(key, ZERO)
        if a != b:
            raise PatternViolation("entry %s -> %s is %s, pattern wants %s"
                                   % (key[0], key[1], a.to_text(), b.to_text()))
    return GnicePattern(p0, p1, q)
