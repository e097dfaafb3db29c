"""Static and dynamic classification of small control-affine systems.

Every affine system with at most three states is locally static equivalent,
near a regular point, to one entry of a short list of normal forms.  This
module computes a bracket/rank signature of the affine decomposition at a
generic point (static_invariants), matches it against a decision table per
state count (classify_static), and for the three-state two-control forms
maps the resulting tag to one of the three dynamic classes (dynamic_class).

The decision tables are keyed on invariants of static equivalence only:
the generic rank of df/du, whether the drift lies in the span D of the
control fields, involutivity of D, the dimension of the strong-accessibility
span C0 (controls plus iterated brackets up to length three), and -- for the
single-control three-state forms, which the base invariants do not separate
-- whether the drift lies in C0 and whether D extended by the drift brackets
is involutive.  Each table row was validated by running the brute-force
bracket computation on the normal form itself.

builtin_fixtures returns the five explicit equivalence pairs used across the
test-suite: three strict order-(0,0) pairs among the x2*u1 / x2 / 1+x2*u1
forms, the decoupling variant, and a two-state/four-state prolongation pair.
"""

import random
from fractions import Fraction

from .ratfn import RatFn, ZERO, ONE, X, U
from .jets import (ControlSystem, VectorField, to_affine, lie_bracket,
                   sample_point, generic_rank, _frac_rank)
from .errors import (UnclassifiedSignature, OutOfTable, DimensionMismatch,
                     DenominatorZero, DivisionByZero, SubstitutionPole)
from .equivalence import EquivMap


class StaticClass:
    """One entry of the normal-form list: (n, s) plus the rhs tag."""

    __slots__ = ("n", "s", "tag")

    def __init__(self, n, s, tag):
        self.n = n
        self.s = s
        self.tag = tag

    def __eq__(self, o):
        return (isinstance(o, StaticClass) and self.n == o.n
                and self.s == o.s and self.tag == o.tag)

    def __hash__(self):
        return hash((self.n, self.s, self.tag))

    def __repr__(self):
        return "StaticClass(n=%d, s=%d, %r)" % (self.n, self.s, self.tag)


class DynClass:
    def __init__(self, name):
        self.name = name

    def __eq__(self, o):
        return isinstance(o, DynClass) and self.name == o.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


CLASS1 = DynClass("Class1")
CLASS2 = DynClass("Class2")
CLASS3 = DynClass("Class3")


class InvariantRecord:
    """Bracket/rank signature of an affine system at a generic point.

    point is a witnessing sample where every rank reaches its generic
    value.  drift_in_C0 and involutive_D2 only matter for the
    single-control three-state forms; they are computed for every input.
    """

    def __init__(self, rank_fu, involutive_D, drift_in_D, dim_C0, point,
                 drift_in_C0, involutive_D2):
        self.rank_fu = rank_fu
        self.involutive_D = involutive_D
        self.drift_in_D = drift_in_D
        self.dim_C0 = dim_C0
        self.point = dict(point)
        self.drift_in_C0 = drift_in_C0
        self.involutive_D2 = involutive_D2

    def __repr__(self):
        return ("InvariantRecord(rank_fu=%d, involutive_D=%s, drift_in_D=%s, "
                "dim_C0=%d, drift_in_C0=%s, involutive_D2=%s)"
                % (self.rank_fu, self.involutive_D, self.drift_in_D,
                   self.dim_C0, self.drift_in_C0, self.involutive_D2))


def _rank_at(rows, pt):
    m = [[e.eval_at(pt) for e in row] for row in rows]
    return _frac_rank(m)


def static_invariants(a, seed=0):
    """Signature of an AffineForm (or affine ControlSystem) at a generic point."""
    if isinstance(a, ControlSystem):
        a = to_affine(a)
    n, s = a.n, a.s
    if n > 3:
        raise DimensionMismatch("classification covers up to three states")

    f0 = a.f0
    gens = list(a.fvecs)
    pool = [f0] + gens

    pair_brackets = [lie_bracket(gens[i], gens[j])
                     for i in range(s) for j in range(i + 1, s)]
    level2 = [lie_bracket(g, h) for g in gens for h in pool]
    level3 = [lie_bracket(g, h) for g in level2 for h in pool]
    c0 = gens + [b for b in level2 + level3 if not b.is_zero()]
    d2 = gens + [b for b in (lie_bracket(f0, g) for g in gens) if not b.is_zero()]
    d2_closure = [lie_bracket(d2[i], d2[j])
                  for i in range(len(d2)) for j in range(i + 1, len(d2))]

    # every query as a list of rows; the generic value of each rank decides
    # the invariants, and one point realizing all of them at once is kept
    # as the regular-point witness
    queries = {
        "D": [list(g) for g in gens],
        "D+f0": [list(g) for g in gens + [f0]],
        "C0": [list(g) for g in c0],
        "C0+f0": [list(g) for g in c0 + [f0]],
        "D2": [list(g) for g in d2],
    }
    for k, b in enumerate(pair_brackets):
        queries["D+[%d]" % k] = [list(g) for g in gens + [b]]
    for k, b in enumerate(d2_closure):
        queries["D2+[%d]" % k] = [list(g) for g in d2 + [b]]

    generic = {key: generic_rank(rows, seed=seed) if rows else 0
               for key, rows in queries.items()}

    vars_ = set()
    for rows in queries.values():
        for row in rows:
            for e in row:
                vars_ |= e.vars()
    rng = random.Random(seed)
    witness = None
    for _ in range(40):
        pt = sample_point(vars_, rng)
        try:
            at = {key: _rank_at(rows, pt) if rows else 0
                  for key, rows in queries.items()}
        except (DenominatorZero, DivisionByZero, SubstitutionPole):
            continue
        if at == generic:
            witness = pt
            break
    if witness is None:
        raise UnclassifiedSignature(
            "no regular sample point found; the invariants do not stabilize")

    rank_fu = generic["D"]
    drift_in_D = generic["D+f0"] == rank_fu
    involutive_D = all(generic["D+[%d]" % k] == rank_fu
                       for k in range(len(pair_brackets)))
    dim_C0 = generic["C0"]
    drift_in_C0 = generic["C0+f0"] == dim_C0
    involutive_D2 = all(generic["D2+[%d]" % k] == generic["D2"]
                        for k in range(len(d2_closure)))
    return InvariantRecord(rank_fu, involutive_D, drift_in_D, dim_C0, witness,
                           drift_in_C0, involutive_D2)


# decision tables; every row validated by running static_invariants on the
# normal form itself (see the classify test-suite)

_TABLE_32 = {
    (True, True, 2): "u1, u2, 0",
    (False, True, 2): "u1, u2, 1",
    (False, True, 3): "u1, u2, x2",
    (True, False, 3): "u1, u2, x2*u1",
    (False, False, 3): "u1, u2, 1+x2*u1",
}

_TABLE_31 = {
    (True, 1, True, True): "u1, 0, 0",
    (False, 1, False, True): "u1, 1, 0",
    (False, 2, True, True): "u1, x1, 0",
    (False, 2, False, True): "u1, x1, 1",
    (False, 3, True, True): "u1, x1, x2",
    (False, 3, True, False): "u1, H(x)*u1, 1+x2*u1",
}

_TABLE_21 = {
    (True, 1): "u1, 0",
    (False, 1): "u1, 1",
    (False, 2): "u1, x1",
}


def classify_static(sys_, seed=0):
    """Match a small affine system against the normal-form list.

    Decision is by the invariant signature at a generic point; a signature
    outside every table raises UnclassifiedSignature carrying the record.
    """
    rec = static_invariants(to_affine(sys_), seed=seed)
    n = sys_.n
    r = rec.rank_fu

    if r == n:
        # full feedback: x_i' = u_i
        return StaticClass(n, r, ", ".join("u%d" % (i + 1) for i in range(n)))
    if r == 0:
        tag = ("1" if not rec.drift_in_D else "0")
        if n >= 2:
            tag = ", ".join([tag] + ["0"] * (n - 1))
        return StaticClass(n, 0, tag)

    if n == 2 and r == 1:
        key = (rec.drift_in_D, rec.dim_C0)
        if key in _TABLE_21:
            return StaticClass(2, 1, _TABLE_21[key])
    elif n == 3 and r == 2:
        key = (rec.drift_in_D, rec.involutive_D, rec.dim_C0)
        if key in _TABLE_32:
            return StaticClass(3, 2, _TABLE_32[key])
    elif n == 3 and r == 1:
        key = (rec.drift_in_D, rec.dim_C0, rec.drift_in_C0, rec.involutive_D2)
        if key in _TABLE_31:
            return StaticClass(3, 1, _TABLE_31[key])

    raise UnclassifiedSignature("no table row matches %r" % rec)


def dynamic_class(c):
    """The three-way split of the three-state two-control forms."""
    if not isinstance(c, StaticClass) or (c.n, c.s) != (3, 2):
        raise OutOfTable("dynamic classes are defined for the (3, 2) forms")
    if c.tag in ("u1, u2, x2", "u1, u2, x2*u1", "u1, u2, 1+x2*u1"):
        return CLASS1
    if c.tag == "u1, u2, 0":
        return CLASS2
    if c.tag == "u1, u2, 1":
        return CLASS3
    raise OutOfTable("no dynamic class for tag %r" % c.tag)


# ---------------------------------------------------------------------------
# built-in systems and equivalence fixtures

def _x(i):
    return RatFn.var(X(i))


def _u(j, k=0):
    return RatFn.var(U(j, k))


def elkin_forms_32():
    """The five three-state two-control normal forms, in table order."""
    x2 = _x(2)
    u1, u2 = _u(1), _u(2)
    one = ONE
    return [
        ControlSystem(3, 2, (u1, u2, ZERO), name="x3'=0"),
        ControlSystem(3, 2, (u1, u2, one), name="x3'=1"),
        ControlSystem(3, 2, (u1, u2, x2), name="x3'=x2"),
        ControlSystem(3, 2, (u1, u2, x2 * u1), name="x3'=x2*u1"),
        ControlSystem(3, 2, (u1, u2, one + x2 * u1), name="x3'=1+x2*u1"),
    ]


def builtin_fixtures():
    """The five explicit equivalence pairs, forward and inverse.

    Order: phi (x2*u1 <-> x2), psi (1+x2*u1 <-> x2), theta
    (x2*u1 <-> 1+x2*u1), the decoupling variant of phi, and the
    two-state/four-state prolongation pair.
    """
    x1, x2, x3 = _x(1), _x(2), _x(3)
    u1, u2 = _u(1), _u(2)
    u1d, u2d = _u(1, 1), _u(2, 1)

    sigma = ControlSystem(3, 2, (u1, u2, x2 * u1), name="x3'=x2*u1")
    lam = ControlSystem(3, 2, (u1, u2, x2), name="x3'=x2")
    zee = ControlSystem(3, 2, (u1, u2, ONE + x2 * u1), name="x3'=1+x2*u1")

    phi = EquivMap(sigma, lam,
                   (x1 * x2 - x3, u2, x2),
                   (x1 * u2, u2d), name="phi")
    phi_inv = EquivMap(lam, sigma,
                       (u1 / x2, x3, x3 * u1 / x2 - x1),
                       ((x2 * u1d - u1 * u2) / (x2 * x2), x2), name="phi_inv")

    psi = EquivMap(zee, lam,
                   (x3 - x1 * x2, u2, x2),
                   (ONE - x1 * u2, u2d), name="psi")
    psi_inv = EquivMap(lam, zee,
                       ((ONE - u1) / x2, x3, x1 + x3 * (ONE - u1) / x2),
                       ((u1 * u2 - u2 - x2 * u1d) / (x2 * x2), x2),
                       name="psi_inv")

    theta = EquivMap(sigma, zee,
                     (ONE / u2 - x1, x2, x2 / u2 - x3),
                     (ZERO - u1 - u2d / (u2 * u2), u2), name="theta")
    theta_inv = EquivMap(zee, sigma,
                         (ONE / u2 - x1, x2, x2 / u2 - x3),
                         (ZERO - u1 - u2d / (u2 * u2), u2), name="theta_inv")

    dec = EquivMap(sigma, lam,
                   (x3 - x1 * x2, u2, x2),
                   (ZERO - x1 * u2, u2d), name="dec")
    dec_inv = EquivMap(lam, sigma,
                       (ZERO - u1 / x2, x3, x1 - x3 * u1 / x2),
                       ((u1 * u2 - x2 * u1d) / (x2 * x2), x2), name="dec_inv")

    two = ControlSystem(2, 2, (u1, u2), name="planar")
    four = ControlSystem(4, 2, (x3, _x(4), u1, u2), name="planar+tot")
    pro = EquivMap(two, four, (x1, x2, u1, u2), (u1d, u2d), name="pro")
    pro_inv = EquivMap(four, two, (x1, x2), (x3, _x(4)), name="pro_inv")

    return [(phi, phi_inv), (psi, psi_inv), (theta, theta_inv),
            (dec, dec_inv), (pro, pro_inv)]


# ---------------------------------------------------------------------------
# random static transforms (test support for the invariance properties)

def _det(m):
    m = [row[:] for row in m]
    k = len(m)
    det = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, k):
            f = m[r][c] / m[c][c]
            for j in range(c, k):
                m[r][j] -= f * m[c][j]
    return det


def _inv(m):
    k = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(k)]
         for i, row in enumerate(m)]
    for c in range(k):
        piv = next(r for r in range(c, k) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        f = a[c][c]
        a[c] = [e / f for e in a[c]]
        for r in range(k):
            if r != c and a[r][c] != 0:
                g = a[r][c]
                a[r] = [e - g * p for e, p in zip(a[r], a[c])]
    return [row[k:] for row in a]


def _rand_invertible(rng, k):
    while True:
        m = [[Fraction(rng.randint(-3, 3)) for _ in range(k)] for _ in range(k)]
        if _det(m) != 0:
            return m


def _lincomb(coeffs, exprs, shift=None):
    acc = shift if shift is not None else ZERO
    for c, e in zip(coeffs, exprs):
        if c != 0:
            acc = acc + RatFn.const(c) * e
    return acc


def random_static_transform(sys_, seed):
    """A seeded linear state change with affine invertible feedback.

    y = P x, v = Q u + R x with small integer P, Q, R and P, Q invertible.
    Returns (forward, inverse, transformed_system); the transformed system
    is the rhs rewritten in the new variables, which stays affine.
    """
    n, s = sys_.n, sys_.s
    rng = random.Random(seed)
    P = _rand_invertible(rng, n)
    Q = _rand_invertible(rng, s)
    R = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(s)]
    Pi = _inv(P)
    Qi = _inv(Q)

    xs = [_x(i + 1) for i in range(n)]
    us = [_u(j + 1) for j in range(s)]

    y = [_lincomb(P[i], xs) for i in range(n)]
    v = [_lincomb(Q[j], us, _lincomb(R[j], xs)) for j in range(s)]

    # in the new chart: x = Pi x', u = Qi (u' - R Pi x')
    xold = [_lincomb(Pi[i], xs) for i in range(n)]
    uold = [_lincomb(Qi[j], us) - _lincomb(Qi[j],
            [_lincomb(R[l], xold) for l in range(s)]) for j in range(s)]
    sub = {X(i + 1): xold[i] for i in range(n)}
    sub.update({U(j + 1): uold[j] for j in range(s)})
    fnew = [_lincomb(P[i], [fi.substitute(sub) for fi in sys_.f])
            for i in range(n)]
    newsys = ControlSystem(n, s, fnew,
                           name=(sys_.name + "~%d" % seed) if sys_.name else "")
    fwd = EquivMap(sys_, newsys, y, v, name="static%d" % seed)
    ixs = [_lincomb(Pi[i], xs) for i in range(n)]
    ius = [_lincomb(Qi[j], us) - _lincomb(Qi[j],
           [_lincomb(R[l], ixs) for l in range(s)]) for j in range(s)]
    inv = EquivMap(newsys, sys_, ixs, ius, name="static%d_inv" % seed)
    return fwd, inv, newsys


def random_nonaut_static_pair(sys_, seed):
    """Like random_static_transform but explicitly time-dependent:
    y = P x + b t, v = Q u + R x + d t.  Returns (forward, inverse,
    transformed_system)."""
    from .ratfn import T
    n, s = sys_.n, sys_.s
    rng = random.Random(seed)
    P = _rand_invertible(rng, n)
    Q = _rand_invertible(rng, s)
    R = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(s)]
    b = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
    dd = [Fraction(rng.randint(-3, 3)) for _ in range(s)]
    Pi = _inv(P)
    Qi = _inv(Q)
    t = RatFn.var(T)

    xs = [_x(i + 1) for i in range(n)]
    us = [_u(j + 1) for j in range(s)]

    y = [_lincomb(P[i], xs, RatFn.const(b[i]) * t) for i in range(n)]
    v = [_lincomb(Q[j], us, _lincomb(R[j], xs, RatFn.const(dd[j]) * t))
         for j in range(s)]

    shifted = [xs[i] - RatFn.const(b[i]) * t for i in range(n)]
    xold = [_lincomb(Pi[i], shifted) for i in range(n)]
    uold_shift = [_lincomb(R[l], xold, RatFn.const(dd[l]) * t) for l in range(s)]
    uold = [_lincomb(Qi[j], us) - _lincomb(Qi[j], uold_shift) for j in range(s)]
    sub = {X(i + 1): xold[i] for i in range(n)}
    sub.update({U(j + 1): uold[j] for j in range(s)})
    # y' = P f + b
    fnew = [_lincomb(P[i], [fi.substitute(sub) for fi in sys_.f],
                     RatFn.const(b[i])) for i in range(n)]
    newsys = ControlSystem(n, s, fnew,
                           name=(sys_.name + "~t%d" % seed) if sys_.name else "")
    fwd = EquivMap(sys_, newsys, y, v, name="nonaut%d" % seed)
    inv = EquivMap(newsys, sys_, xold, uold, name="nonaut%d_inv" % seed)
    return fwd, inv, newsys
