"""Control systems x' = f(t, x, u) and their jet-level calculus.

The state/control coordinates of *every* system are the kernel variables
X(i), U(j); a map between two systems is written in the source system's
variables (see equivalence.py).  Total time derivatives treat u_j^(k) as
independent coordinates whose derivative is u_j^(k+1), truncated nowhere:
D_t is exact on the infinite jet list, we just never materialize more
derivatives than an expression mentions.
"""

import random
from fractions import Fraction

from .ratfn import RatFn, T, X, U, ZERO, ONE
from .errors import (NotAffine, DimensionMismatch, EmptyPromotionSet,
                     DenominatorZero, DegenerateSystem)


class ControlSystem:
    """n states, s controls, f a tuple of n RatFn in t, x_i, u_j (order 0).

    Construction checks regularity: the generic rank of df/du must equal s
    (probabilistically, at seeded random integer points).  Pass check=False
    to skip when deliberately building something degenerate.
    """

    __slots__ = ("n", "s", "f", "name")

    def __init__(self, n, s, f, name="", check=True):
        f = tuple(f)
        if len(f) != n:
            raise DimensionMismatch("expected %d rhs components, got %d" % (n, len(f)))
        for i, fi in enumerate(f):
            for v in fi.vars():
                if v[0] == 1 and not (1 <= v[2] <= n):
                    raise DimensionMismatch("f%d mentions x%d but n=%d" % (i + 1, v[2], n))
                if v[0] == 2:
                    if v[1] != 0:
                        raise DimensionMismatch(
                            "f%d mentions a control derivative; rhs must be order 0" % (i + 1))
                    if not (1 <= v[2] <= s):
                        raise DimensionMismatch("f%d mentions u%d but s=%d" % (i + 1, v[2], s))
        self.n, self.s, self.f = n, s, f
        self.name = name
        if check and s > 0:
            r = generic_rank([[fi.diff(U(j + 1)) for j in range(s)] for fi in f])
            if r != s:
                raise DegenerateSystem(
                    "rank df/du = %d but the system declares %d controls" % (r, s))

    def __eq__(self, o):
        return (isinstance(o, ControlSystem) and self.n == o.n and self.s == o.s
                and self.f == o.f)

    def __hash__(self):
        return hash((self.n, self.s, self.f))

    def __repr__(self):
        return "ControlSystem(n=%d, s=%d, f=[%s])" % (
            self.n, self.s, ", ".join(fi.to_text() for fi in self.f))

    # -- total time derivative ------------------------------------------

    def D(self, expr):
        """D_t expr = d/dt + sum f_i d/dx_i + sum u_j^(k+1) d/du_j^(k)."""
        out = expr.diff(T)
        for v in sorted(expr.vars()):
            if v[0] == 1:
                out = out + self.f[v[2] - 1] * expr.diff(v)
            elif v[0] == 2:
                out = out + RatFn.var(U(v[2], v[1] + 1)) * expr.diff(v)
        return out

    def dt_iter(self, expr, k):
        """[expr, D_t expr, ..., D_t^k expr]."""
        out = [expr]
        for _ in range(k):
            out.append(self.D(out[-1]))
        return out

    def mentions_t(self):
        return any(T in fi.vars() for fi in self.f)


def total_derivative(sys_, h, k=1):
    """k-fold total time derivative of h along sys_ (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = h
    for _ in range(k):
        out = sys_.D(out)
    return out


# ---------------------------------------------------------------------------
# vector fields and the affine decomposition

class VectorField:
    """Components in the states x_1..x_n (t allowed, controls not)."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)

    @property
    def n(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, o):
        return isinstance(o, VectorField) and self.components == o.components

    def __hash__(self):
        return hash(self.components)

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __repr__(self):
        return "VectorField(%s)" % ", ".join(c.to_text() for c in self.components)


class AffineForm:
    """f = f0 + sum_j u_j * fvecs[j-1] with all pieces free of controls."""

    __slots__ = ("f0", "fvecs")

    def __init__(self, f0, fvecs):
        self.f0 = f0
        self.fvecs = tuple(fvecs)

    @property
    def n(self):
        return self.f0.n

    @property
    def s(self):
        return len(self.fvecs)

    def rebuild(self):
        """The rhs tuple f0 + sum u_j fvecs_j, for round-trip checks."""
        out = []
        for i in range(self.n):
            acc = self.f0[i]
            for j, vf in enumerate(self.fvecs):
                acc = acc + RatFn.var(U(j + 1)) * vf[i]
            out.append(acc)
        return tuple(out)


def to_affine(sys_):
    """Affine decomposition of the rhs; raises NotAffine otherwise."""
    zero_u = {U(j + 1): ZERO for j in range(sys_.s)}
    f0 = tuple(fi.substitute(zero_u) for fi in sys_.f)
    cols = []
    for j in range(1, sys_.s + 1):
        fj = tuple(fi.diff(U(j)) for fi in sys_.f)
        for g in fj:
            for v in g.vars():
                if v[0] == 2:
                    raise NotAffine("rhs is not affine in u%d" % j)
        cols.append(VectorField(fj))
    # rebuild and compare to catch mixed nonlinearities (e.g. u1*u2)
    form = AffineForm(VectorField(f0), cols)
    rebuilt = form.rebuild()
    for i in range(sys_.n):
        if rebuilt[i] != sys_.f[i]:
            raise NotAffine("rhs component %d is not affine in the controls" % (i + 1))
    return form


def lie_bracket(a, b):
    """[a, b]_i = sum_k a_k dB_i/dx_k - b_k dA_i/dx_k."""
    if not isinstance(a, VectorField):
        a = VectorField(a)
    if not isinstance(b, VectorField):
        b = VectorField(b)
    if a.n != b.n:
        raise DimensionMismatch("bracket of a %d-vector with a %d-vector" % (a.n, b.n))
    n = a.n
    out = []
    for i in range(n):
        acc = ZERO
        for k in range(n):
            acc = acc + a[k] * b[i].diff(X(k + 1)) - b[k] * a[i].diff(X(k + 1))
        out.append(acc)
    return VectorField(out)


# ---------------------------------------------------------------------------
# prolongations

def prolong_total(sys_):
    """Promote every control to a state: n+s states, controls become u_j'."""
    n, s = sys_.n, sys_.s
    sub = {U(j + 1): RatFn.var(X(n + j + 1)) for j in range(s)}
    f = [fi.substitute(sub) for fi in sys_.f]
    f += [RatFn.var(U(j + 1)) for j in range(s)]
    return ControlSystem(n + s, s, f, name=sys_.name + "+tot" if sys_.name else "")


def prolong_partial(sys_, promote):
    """Promote the controls in `promote` (1-based set) one derivative each.

    Promoted u_j becomes the state x_{n+r} (r = rank of j within the
    promoted set).  New control labels: the unpromoted controls come first
    in their original order, then the promoted derivatives, so promoting
    {1} of (u1, u2) gives v1 = u2 and v2 = u1'.
    """
    promote = sorted(set(promote))
    if not promote:
        raise EmptyPromotionSet("nothing to promote")
    for j in promote:
        if not (1 <= j <= sys_.s):
            raise DimensionMismatch("cannot promote u%d of an s=%d system" % (j, sys_.s))
    n, s = sys_.n, sys_.s
    kept = [j for j in range(1, s + 1) if j not in promote]
    sub = {}
    for r, j in enumerate(promote):
        sub[U(j)] = RatFn.var(X(n + r + 1))
    for r, j in enumerate(kept):
        sub[U(j)] = RatFn.var(U(r + 1))
    f = [fi.substitute(sub) for fi in sys_.f]
    for r, j in enumerate(promote):
        f.append(RatFn.var(U(len(kept) + r + 1)))
    return ControlSystem(n + len(promote), s, f,
                         name=sys_.name + "+p" if sys_.name else "")


# ---------------------------------------------------------------------------
# generic-point sampling

def sample_point(vars_, rng):
    """Random integer point in [-99, 99] avoiding 0 (poles love 0)."""
    pt = {}
    for v in sorted(vars_):
        c = 0
        while c == 0:
            c = rng.randint(-99, 99)
        pt[v] = Fraction(c)
    return pt


def generic_rank(rows, seed=0, trials=5):
    """Max rank of a RatFn matrix over `trials` random integer points."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    rng = random.Random(seed)
    vars_ = set()
    for r in rows:
        for e in r:
            vars_ |= e.vars()
    best = 0
    got = 0
    attempts = 0
    while got < trials:
        attempts += 1
        if attempts > trials * 20:
            raise DegenerateSystem("could not find %d valid sample points" % trials)
        pt = sample_point(vars_, rng)
        try:
            m = [[e.eval_at(pt) for e in r] for r in rows]
        except DenominatorZero:
            continue
        got += 1
        best = max(best, _frac_rank(m))
        if best == min(len(rows), len(rows[0])):
            break
    return best


def _frac_rank(m):
    m = [row[:] for row in m]
    rank = 0
    rows, cols = len(m), len(m[0]) if m else 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][c]
        for r in range(rows):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / pv
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def check_regular(sys_, seed=0):
    """Recompute the regularity rank; raises DegenerateSystem unless = s."""
    rows = [[fi.diff(U(j + 1)) for j in range(sys_.s)] for fi in sys_.f]
    r = generic_rank(rows, seed=seed) if sys_.s else 0
    if r != sys_.s:
        raise DegenerateSystem("rank df/du = %d, expected %d" % (r, sys_.s))
    return r
