"""Exact multivariate rational functions over jet coordinates.

Variables are plain orderable tuples:

    T        = (0, 0, 0)            time
    X(i)     = (1, 0, i)            state x_i,  i >= 1
    U(j, k)  = (2, k, j)            k-th time derivative of control u_j

Tuple comparison gives the variable order used everywhere:
t < x_1 < x_2 < ... < u_1 < u_2 < ... < u_1' < u_2' < ...  (derivative level
major, control index minor).

A polynomial is a dict {monomial: Fraction}; a monomial is a tuple of
(var, exponent) pairs sorted by var, with the empty tuple for 1.  Monomials
are ordered graded-lex over the variable order.  RatFn holds a canonical
num/den pair: gcd 1, denominator integer-primitive with positive leading
coefficient.  Instances are immutable; all ops return new values.
"""

from fractions import Fraction
from math import gcd as igcd

from .errors import DivisionByZero, SubstitutionPole, DenominatorZero

T = (0, 0, 0)


def X(i):
    return (1, 0, i)


def U(j, k=0):
    return (2, k, j)


def var_name(v):
    kind = v[0]
    if kind == 0:
        return "t"
    if kind == 1:
        return "x%d" % v[2]
    return "u%d%s" % (v[2], "'" * v[1])


# ---------------------------------------------------------------------------
# monomials

def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_key(m):
    # graded lex: total degree first, then exponents of the largest
    # variables first.  Reversing the sorted pair list makes plain tuple
    # comparison do the lex part.
    return (sum(e for _, e in m), tuple(reversed(m)))


def mono_div(m1, m2):
    """m1 / m2 or None if m2 does not divide m1."""
    d = dict(m1)
    for v, e in m2:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r == 0:
            del d[v]
        else:
            d[v] = r
    return tuple(sorted(d.items()))


# ---------------------------------------------------------------------------
# polynomials as {mono: Fraction} dicts (zero coeffs never stored)

def p_zero():
    return {}


def p_const(c):
    c = Fraction(c)
    return {(): c} if c else {}


def p_var(v):
    return {((v, 1),): Fraction(1)}


def p_add(a, b):
    r = dict(a)
    for m, c in b.items():
        s = r.get(m, 0) + c
        if s:
            r[m] = s
        elif m in r:
            del r[m]
    return r


def p_neg(a):
    return {m: -c for m, c in a.items()}


def p_sub(a, b):
    return p_add(a, p_neg(b))


def p_scale(a, c):
    c = Fraction(c)
    if not c:
        return {}
    return {m: k * c for m, k in a.items()}


def p_mul(a, b):
    if not a or not b:
        return {}
    r = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = mono_mul(m1, m2)
            s = r.get(m, 0) + c1 * c2
            if s:
                r[m] = s
            elif m in r:
                del r[m]
    return r


def p_pow(a, n):
    assert n >= 0
    r = p_const(1)
    for _ in range(n):
        r = p_mul(r, a)
    return r


def p_lead(a):
    """(monomial, coeff) of the graded-lex leading term."""
    m = max(a, key=mono_key)
    return m, a[m]


def p_deg(a):
    if not a:
        return -1
    return max(sum(e for _, e in m) for m in a)


def p_vars(a):
    s = set()
    for m in a:
        for v, _ in m:
            s.add(v)
    return s


def p_diff(a, v):
    r = {}
    for m, c in a.items():
        for i, (w, e) in enumerate(m):
            if w == v:
                nm = m[:i] + ((w, e - 1),) + m[i + 1:] if e > 1 else m[:i] + m[i + 1:]
                s = r.get(nm, 0) + c * e
                if s:
                    r[nm] = s
                elif nm in r:
                    del r[nm]
                break
    return r


def p_divexact(a, b):
    """Exact polynomial division; raises ArithmeticError when not exact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = dict(a)
    q = {}
    bm, bc = p_lead(b)
    while a:
        am, ac = p_lead(a)
        qm = mono_div(am, bm)
        if qm is None:
            raise ArithmeticError("inexact polynomial division")
        qc = ac / bc
        q[qm] = q.get(qm, 0) + qc
        a = p_sub(a, p_mul({qm: qc}, b))
    return q


# ---------------------------------------------------------------------------
# gcd (primitive PRS)

def _int_clear(a):
    """Scale a Fraction-dict to a primitive integer dict (content removed)."""
    l = 1
    for c in a.values():
        l = l * c.denominator // igcd(l, c.denominator)
    g = 0
    for c in a.values():
        g = igcd(g, abs(c.numerator * (l // c.denominator)))
    return {m: Fraction(c.numerator * (l // c.denominator), g) for m, c in a.items()}


def _univar(a, v):
    """View a as univariate in v: {deg: coefficient-dict}."""
    out = {}
    for m, c in a.items():
        e = 0
        rest = []
        for w, k in m:
            if w == v:
                e = k
            else:
                rest.append((w, k))
        d = out.setdefault(e, {})
        rm = tuple(rest)
        s = d.get(rm, 0) + c
        if s:
            d[rm] = s
        elif rm in d:
            del d[rm]
    return {e: d for e, d in out.items() if d}


def _from_univar(u, v):
    out = {}
    for e, d in u.items():
        for m, c in d.items():
            nm = mono_mul(m, ((v, e),)) if e else m
            out[nm] = out.get(nm, 0) + c
    return {m: c for m, c in out.items() if c}


def _prem(a, b, v):
    """Pseudo-remainder of a by b with respect to v."""
    ua, ub = _univar(a, v), _univar(b, v)
    db = max(ub)
    lb = ub[db]
    r = a
    while True:
        ur = _univar(r, v)
        if not ur:
            return r
        dr = max(ur)
        if dr < db:
            return r
        lr = ur[dr]
        # r <- lb*r - lr*b*v^(dr-db)
        shift = {((v, dr - db),): Fraction(1)} if dr > db else {(): Fraction(1)}
        r = p_sub(p_mul(lb, r), p_mul(p_mul(lr, b), shift))


def poly_gcd(a, b):
    """Some gcd of a and b (primitive integer normalization); {():1} for coprime."""
    if not a:
        return _int_clear(b) if b else {}
    if not b:
        return _int_clear(a)
    a, b = _int_clear(a), _int_clear(b)
    return _gcd_prim(a, b)


def _gcd_prim(a, b):
    # both nonzero, primitive integer dicts
    va, vb = p_vars(a), p_vars(b)
    if not va or not vb:
        return p_const(1)
    v = max(va | vb)
    if v not in va or v not in vb:
        # gcd divides the v-content of the poly that does contain v
        with_v, other = (a, b) if v in va else (b, a)
        cont = _content_wrt(with_v, v)
        if not cont:
            return p_const(1)
        return poly_gcd(cont, other)
    ca, cb = _content_wrt(a, v), _content_wrt(b, v)
    pa, pb = p_divexact(a, ca), p_divexact(b, cb)
    cg = poly_gcd(ca, cb)
    # primitive PRS
    if max(_univar(pa, v)) < max(_univar(pb, v)):
        pa, pb = pb, pa
    while pb:
        r = _prem(pa, pb, v)
        pa, pb = pb, (_primitive_wrt(r, v) if r else {})
    g = _primitive_wrt(pa, v)
    # the PRS can end at a nonzero constant-in-v remainder, meaning coprime pps
    if not _univar(g, v) or max(_univar(g, v)) == 0:
        g = p_const(1)
    out = _int_clear(p_mul(cg, g))
    # make deterministic sign: positive leading coeff
    if p_lead(out)[1] < 0:
        out = p_neg(out)
    return out


def _content_wrt(a, v):
    g = {}
    for _, d in _univar(a, v).items():
        g = poly_gcd(g, d)
        if g == p_const(1):
            return g
    return g


def _primitive_wrt(a, v):
    if not a:
        return a
    c = _content_wrt(a, v)
    return p_divexact(a, c)


# ---------------------------------------------------------------------------
# printing

def _coeff_text(c, had_vars):
    if c.denominator == 1:
        s = str(abs(c.numerator))
    else:
        s = "(%d/%d)" % (abs(c.numerator), c.denominator)
    return s


def _mono_text(m):
    parts = []
    for v, e in m:
        parts.append(var_name(v) if e == 1 else "%s^%d" % (var_name(v), e))
    return "*".join(parts)


def p_text(a):
    if not a:
        return "0"
    terms = sorted(a.items(), key=lambda kv: mono_key(kv[0]), reverse=True)
    out = []
    for i, (m, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        body = _mono_text(m)
        ac = abs(c)
        if not body:
            piece = _coeff_text(ac, False)
        elif ac == 1:
            piece = body
        else:
            piece = _coeff_text(ac, True) + "*" + body
        if i == 0:
            out.append(("-" if sign == "-" else "") + piece)
        else:
            out.append(" %s %s" % (sign, piece))
    return "".join(out)


# ---------------------------------------------------------------------------
# RatFn

class RatFn:
    """Canonical rational function. Construct via const(), var(), or ops."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = p_const(1)
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canon(num, den)
        self._hash = None

    # -- constructors --------------------------------------------------

    @staticmethod
    def const(c):
        return RatFn(p_const(c), p_const(1), _canonical=True)

    @staticmethod
    def var(v):
        return RatFn(p_var(v), p_const(1), _canonical=True)

    # -- predicates ----------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_const(self):
        return not p_vars(self.num) and not p_vars(self.den)

    def is_poly(self):
        return self.den == p_const(1)

    def const_value(self):
        assert self.is_const()
        if not self.num:
            return Fraction(0)
        return self.num[()] / self.den[()]

    def vars(self):
        return p_vars(self.num) | p_vars(self.den)

    def max_jet_order(self):
        """Highest control-derivative order mentioned, -1 if none."""
        best = -1
        for v in self.vars():
            if v[0] == 2 and v[1] > best:
                best = v[1]
        return best

    # -- arithmetic ----------------------------------------------------

    def __add__(self, o):
        o = _lift(o)
        if o is NotImplemented:
            return o
        return RatFn(p_add(p_mul(self.num, o.den), p_mul(o.num, self.den)),
                     p_mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFn(p_neg(self.num), self.den, _canonical=True)

    def __sub__(self, o):
        o = _lift(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        if o is NotImplemented:
            return o
        return RatFn(p_mul(self.num, o.num), p_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _lift(o)
        if o is NotImplemented:
            return o
        if not o.num:
            raise DivisionByZero("division by zero rational function")
        return RatFn(p_mul(self.num, o.den), p_mul(self.den, o.num))

    def __rtruediv__(self, o):
        return _lift(o) / self

    def __pow__(self, n):
        if n < 0:
            if not self.num:
                raise DivisionByZero("zero to a negative power")
            return RatFn(p_pow(self.den, -n), p_pow(self.num, -n))
        return RatFn(p_pow(self.num, n), p_pow(self.den, n))

    def __eq__(self, o):
        o = _lift(o)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()),
                               frozenset(self.den.items())))
        return self._hash

    # -- calculus ------------------------------------------------------

    def diff(self, v):
        """Partial derivative with respect to variable v."""
        n = p_sub(p_mul(p_diff(self.num, v), self.den),
                  p_mul(self.num, p_diff(self.den, v)))
        return RatFn(n, p_mul(self.den, self.den))

    def substitute(self, binding):
        """Simultaneous substitution var -> RatFn; unmapped vars stay."""
        num = _p_subst(self.num, binding)
        den = _p_subst(self.den, binding)
        if den.is_zero():
            raise SubstitutionPole("substitution sent a denominator to zero")
        return num / den

    def eval_at(self, point):
        """Exact evaluation; point must bind every variable present."""
        nv = _p_eval(self.num, point)
        dv = _p_eval(self.den, point)
        if dv == 0:
            raise DenominatorZero("denominator vanishes at the sample point")
        return nv / dv

    def eval_float(self, point):
        """Float evaluation for numeric work; raises DenominatorZero near poles."""
        nv = _p_eval_f(self.num, point)
        dv = _p_eval_f(self.den, point)
        if dv == 0.0:
            raise DenominatorZero("denominator vanishes at the sample point")
        return nv / dv

    # -- text ------------------------------------------------------------

    def to_text(self):
        if self.is_poly():
            return p_text(self.num)
        nt, dt = p_text(self.num), p_text(self.den)
        if len(self.num) > 1 or self.num.get((), None) is not None and self.num[()] < 0:
            nt = "(%s)" % nt
        elif nt.startswith("-"):
            nt = "(%s)" % nt
        return "%s/(%s)" % (nt, dt)

    def __repr__(self):
        return "RatFn(%s)" % self.to_text()


def _lift(o):
    if isinstance(o, RatFn):
        return o
    if isinstance(o, (int, Fraction)):
        return RatFn.const(o)
    return NotImplemented


def _canon(num, den):
    if not den:
        raise DivisionByZero("zero denominator")
    if not num:
        return {}, p_const(1)
    g = poly_gcd(num, den)
    if g != p_const(1) and g:
        num = p_divexact(num, g)
        den = p_divexact(den, g)
    # normalize: den integer-primitive with positive leading coefficient
    l = 1
    for c in den.values():
        l = l * c.denominator // igcd(l, c.denominator)
    k = 0
    for c in den.values():
        k = igcd(k, abs(c.numerator * (l // c.denominator)))
    scale = Fraction(l, k)
    if p_lead(den)[1] < 0:
        scale = -scale
    if scale != 1:
        num = p_scale(num, scale)
        den = p_scale(den, scale)
    return num, den


def _p_subst(a, binding):
    out = RatFn.const(0)
    for m, c in a.items():
        term = RatFn.const(c)
        for v, e in m:
            base = binding.get(v)
            if base is None:
                base = RatFn.var(v)
            term = term * base ** e
        out = out + term
    return out


def _p_eval(a, point):
    out = Fraction(0)
    for m, c in a.items():
        term = c
        for v, e in m:
            term *= point[v] ** e
        out += term
    return out


def _p_eval_f(a, point):
    out = 0.0
    for m, c in a.items():
        term = float(c)
        for v, e in m:
            term *= point[v] ** e
        out += term
    return out


ZERO = RatFn.const(0)
ONE = RatFn.const(1)
