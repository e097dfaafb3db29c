"""Contact coframes on truncated jet bundles and their structure equations.

A one-form is a dict {var: RatFn} over the differentials dt, dx_i, du_j^(k)
(keyed by the same variable tuples the kernel uses); a two-form is a dict
{(va, vb): RatFn} with va < vb.  A Coframe replaces that coordinate basis by
frame elements labeled (level, index):

    (-1, 1)           dt
    (0, i)            dx_i - f_i dt          (level 0, possibly adapted)
    (k, j), k=1..N    du_j^(k-1) - u_j^(k) dt

Every frame element is its principal differential plus corrections on
strictly earlier differentials, so the change of basis is unit triangular
and inverts by forward substitution.  Forms re-expressed over frame labels
are again dicts keyed by label (or label pairs).
"""

from .ratfn import RatFn, T, X, U, ZERO, ONE
from .errors import NotNormalizedForm, TruncationExceeded, StructureViolation


# ---------------------------------------------------------------------------
# coordinate-basis forms

def oneform(d=None):
    return dict(d) if d else {}


def d_var(v):
    return {v: ONE}


def form_add(a, b):
    r = dict(a)
    for k, c in b.items():
        s = r.get(k, ZERO) + c
        if s.is_zero():
            r.pop(k, None)
        else:
            r[k] = s
    return r


def form_scale(a, c):
    if c.is_zero() if isinstance(c, RatFn) else c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def form_sub(a, b):
    return form_add(a, form_scale(b, RatFn.const(-1)))


def _pair(a, b):
    """Normalize a wedge pair key; returns (key, sign) or (None, 0) if a == b."""
    if a == b:
        return None, 0
    if a < b:
        return (a, b), 1
    return (b, a), -1


def wedge(a, b):
    """Wedge of two one-forms -> two-form."""
    r = {}
    for va, ca in a.items():
        for vb, cb in b.items():
            key, sg = _pair(va, vb)
            if key is None:
                continue
            s = r.get(key, ZERO) + ca * cb * sg
            if s.is_zero():
                r.pop(key, None)
            else:
                r[key] = s
    return r


def exterior_d(a):
    """d of a one-form (coordinate basis) -> two-form."""
    r = {}
    for v, c in a.items():
        for w in c.vars():
            key, sg = _pair(w, v)
            if key is None:
                continue
            s = r.get(key, ZERO) + c.diff(w) * sg
            if s.is_zero():
                r.pop(key, None)
            else:
                r[key] = s
    return r


def exterior_d2(a):
    """d of a two-form -> three-form {(va,vb,vc): RatFn}; used for d(d(.)) == 0."""
    r = {}
    for (vb, vc), c in a.items():
        for w in c.vars():
            trip = sorted([w, vb, vc])
            if len(set(trip)) < 3:
                continue
            # sign of the permutation sending (w, vb, vc) to sorted order
            perm = [w, vb, vc]
            sg = 1
            for i in range(3):
                for j in range(i + 1, 3):
                    if perm[i] > perm[j]:
                        sg = -sg
            key = tuple(trip)
            s = r.get(key, ZERO) + c.diff(w) * sg
            if s.is_zero():
                r.pop(key, None)
            else:
                r[key] = s
    return r


# ---------------------------------------------------------------------------
# coframes

CONTACT = "contact"
ADAPTED = "adapted3x2"


class Coframe:
    """Truncated coframe of a control system at jet level N."""

    def __init__(self, sys_, N, kind=CONTACT):
        if N < 1:
            raise ValueError("frame level must be >= 1")
        self.sys = sys_
        self.N = N
        self.kind = kind
        self.labels = [(-1, 1)]
        self.elements = {(-1, 1): d_var(T)}
        f = sys_.f
        if kind == CONTACT:
            for i in range(1, sys_.n + 1):
                self.labels.append((0, i))
                self.elements[(0, i)] = form_add(d_var(X(i)), form_scale(d_var(T), -f[i - 1]))
        elif kind == ADAPTED:
            if sys_.n != 3 or sys_.s != 2:
                raise NotNormalizedForm("adapted frame needs 3 states, 2 controls")
            if f[0] != RatFn.var(U(1)) or f[1] != RatFn.var(U(2)):
                raise NotNormalizedForm("adapted frame needs f1 = u1 and f2 = u2")
            for i in (1, 2):
                self.labels.append((0, i))
                self.elements[(0, i)] = form_add(d_var(X(i)), form_scale(d_var(T), -f[i - 1]))
            w = form_add(d_var(X(3)), form_scale(d_var(T), -f[2]))
            for j in (1, 2):
                fu = f[2].diff(U(j))
                corr = form_add(d_var(X(j)), form_scale(d_var(T), -RatFn.var(U(j))))
                w = form_sub(w, form_scale(corr, fu))
            self.labels.append((0, 3))
            self.elements[(0, 3)] = w
        else:
            raise ValueError("unknown frame kind %r" % kind)
        for k in range(1, N + 1):
            for j in range(1, sys_.s + 1):
                self.labels.append((k, j))
                self.elements[(k, j)] = form_add(
                    d_var(U(j, k - 1)), form_scale(d_var(T), -RatFn.var(U(j, k))))
        # invert by forward substitution: coordinate differential -> frame vector
        self._back = {}
        for lab in self.labels:
            w = self.elements[lab]
            new_v, new_c = None, None
            acc = {lab: ONE}
            for v, c in w.items():
                if v in self._back:
                    acc = _fv_add(acc, _fv_scale(self._back[v], -c))
                elif new_v is None:
                    new_v, new_c = v, c
                else:
                    raise StructureViolation("frame element %r is not triangular" % (lab,))
            assert new_v is not None and not new_c.is_zero()
            self._back[new_v] = _fv_scale(acc, ONE / new_c)

    # -- basis conversion ------------------------------------------------

    def to_frame(self, a):
        """One-form over differentials -> dict {label: RatFn}."""
        out = {}
        for v, c in a.items():
            fv = self._back.get(v)
            if fv is None:
                raise TruncationExceeded("d(%s) is beyond frame level %d" %
                                         (_vn(v), self.N))
            out = _fv_add(out, _fv_scale(fv, c))
        return out

    def to_frame2(self, a):
        """Two-form over differentials -> dict {(label, label): RatFn}."""
        out = {}
        for (va, vb), c in a.items():
            fa = self._back.get(va)
            fb = self._back.get(vb)
            if fa is None or fb is None:
                v = va if fa is None else vb
                raise TruncationExceeded("d(%s) is beyond frame level %d" %
                                         (_vn(v), self.N))
            for la, ca in fa.items():
                for lb, cb in fb.items():
                    key, sg = _pair(la, lb)
                    if key is None:
                        continue
                    s = out.get(key, ZERO) + c * ca * cb * sg
                    if s.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = s
        return out

    def from_frame(self, fv):
        """dict {label: RatFn} -> one-form over differentials."""
        out = {}
        for lab, c in fv.items():
            out = form_add(out, form_scale(self.elements[lab], c))
        return out

    # -- structure equations ----------------------------------------------

    def structure_report(self):
        """Check the frame's structure equations level by level.

        Level-0 rows must satisfy, mod the level-0 span:
          contact:  d w0_i = -sum_j (df_i/du_j) w1_j ^ w-1
          adapted:  d w0_1 = -w1_1 ^ w-1,  d w0_2 = -w1_2 ^ w-1,  d w0_3 = 0
        Level-k rows (1 <= k <= N-1) satisfy, exactly (no mod needed):
          d wk_j = -w(k+1)_j ^ w-1
        """
        failures = []
        wm1 = (-1, 1)
        for i in range(1, self.sys.n + 1):
            got = self.to_frame2(exterior_d(self.elements[(0, i)]))
            got = _drop_blocks(got, {0})
            want = {}
            if self.kind == CONTACT:
                for j in range(1, self.sys.s + 1):
                    c = self.sys.f[i - 1].diff(U(j))
                    if not c.is_zero():
                        # -c * w1_j ^ w-1 = +c * w-1 ^ w1_j
                        want[(wm1, (1, j))] = c
            else:
                if i in (1, 2):
                    want[(wm1, (1, i))] = ONE
            diff = _fv2_sub(got, want)
            if diff:
                failures.append(((0, i), _fv2_text(diff)))
        for k in range(1, self.N):
            for j in range(1, self.sys.s + 1):
                got = self.to_frame2(exterior_d(self.elements[(k, j)]))
                want = {(wm1, (k + 1, j)): ONE}
                diff = _fv2_sub(got, want)
                if diff:
                    failures.append(((k, j), _fv2_text(diff)))
        return StructureReport(self, failures)

    def check_structure(self):
        rep = self.structure_report()
        if not rep.passed:
            raise StructureViolation("structure equations fail: %s" % rep.summary())
        return rep


class StructureReport:
    def __init__(self, frame, failures):
        self.frame = frame
        self.failures = failures
        self.passed = not failures

    def summary(self):
        if self.passed:
            return "all structure equations hold (levels 0..%d)" % (self.frame.N - 1)
        return "; ".join("row %s leftover %s" % (lab, txt) for lab, txt in self.failures)


# ---------------------------------------------------------------------------
# frame-vector helpers

def _fv_add(a, b):
    r = dict(a)
    for k, c in b.items():
        s = r.get(k, ZERO) + c
        if s.is_zero():
            r.pop(k, None)
        else:
            r[k] = s
    return r


def _fv_scale(a, c):
    if c.is_zero():
        return {}
    return {k: v * c for k, v in a.items()}


def _fv2_sub(a, b):
    r = dict(a)
    for k, c in b.items():
        s = r.get(k, ZERO) - c
        if s.is_zero():
            r.pop(k, None)
        else:
            r[k] = s
    return r


def _drop_blocks(fv2, blocks):
    return {k: c for k, c in fv2.items()
            if k[0][0] not in blocks and k[1][0] not in blocks}


def label_text(lab):
    k, j = lab
    if k == -1:
        return "w[-1]"
    return "w%d_%d" % (k, j)


def _fv2_text(fv2):
    if not fv2:
        return "0"
    bits = []
    for (la, lb), c in sorted(fv2.items()):
        bits.append("(%s)*%s^%s" % (c.to_text(), label_text(la), label_text(lb)))
    return " + ".join(bits)


def _vn(v):
    from .ratfn import var_name
    return var_name(v)


# ---------------------------------------------------------------------------
# entry points

def contact_coframe(sys_, N):
    """dt plus the contact forms of every state and control level <= N."""
    return Coframe(sys_, N, CONTACT)


def adapted_coframe_3x2(sys_, N):
    """The normalized frame for x1' = u1, x2' = u2, x3' = f(x, u)."""
    return Coframe(sys_, N, ADAPTED)


def to_coframe_basis(form, frame):
    """Express a one- or two-form over coordinate differentials in the frame."""
    if not form:
        return {}
    k = next(iter(form))
    if isinstance(k[0], tuple):
        return frame.to_frame2(form)
    return frame.to_frame(form)


def check_structure(frame):
    """Raise StructureViolation unless the frame's structure equations hold."""
    return frame.check_structure()
