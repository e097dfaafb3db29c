"""Independent recomputation of the change-of-basis matrix A for the
bilinear 3-state map, plus the lower-triangular factor g = A * S^T.

The package computes A with its own exact rational kernel.  This script
redoes the whole computation from scratch with sympy: explicit
total-derivative operator, frames assembled as matrices over coordinate
differentials, and a sympy linear solve for the change of basis.  The
printed tables are frozen into tests/test_equivalence.py and
tests/test_factorize.py; if this script and the package ever disagree,
one of them has a bug.

Run:  python3 tests/oracles/oracle_pullback.py
"""

import sympy as sp

MAXORD = 6
N = 4  # target frame depth; source frame goes one level deeper

t = sp.Symbol("t")
x = {i: sp.Symbol("x%d" % i) for i in (1, 2, 3)}
u = {(j, k): sp.Symbol("u%d_%d" % (j, k)) for j in (1, 2) for k in range(MAXORD + 1)}
y = {i: sp.Symbol("y%d" % i) for i in (1, 2, 3)}
v = {(j, k): sp.Symbol("v%d_%d" % (j, k)) for j in (1, 2) for k in range(MAXORD + 1)}


def total_derivative(expr, xs, us, f):
    """One application of d/dt along trajectories of x' = f(x, u)."""
    out = sp.diff(expr, t)
    for i in (1, 2, 3):
        out += f[i] * sp.diff(expr, xs[i])
    for j in (1, 2):
        for k in range(MAXORD):
            out += us[(j, k + 1)] * sp.diff(expr, us[(j, k)])
    return sp.cancel(out)


def adapted_frame(xs, us, f, depth):
    """Frame for x1' = u1, x2' = u2, x3' = F(x, u), as {label: {coord: coeff}}.

    Levels: -1 is dt, 0 carries the state forms (the third one corrected by
    the F_u multiples of the first two so its exterior derivative has no
    du-components), level k >= 1 carries du_j^(k-1) - u_j^(k) dt.
    """
    frame = {(-1, 1): {t: sp.Integer(1)}}
    for i in (1, 2):
        frame[(0, i)] = {xs[i]: sp.Integer(1), t: -us[(i, 0)]}
    w = {xs[3]: sp.Integer(1), t: -f[3]}
    for j in (1, 2):
        fu = sp.diff(f[3], us[(j, 0)])
        w[xs[j]] = w.get(xs[j], sp.Integer(0)) - fu
        w[t] = w[t] + fu * us[(j, 0)]
    frame[(0, 3)] = {c: sp.cancel(val) for c, val in w.items() if sp.cancel(val) != 0}
    for k in range(1, depth + 1):
        for j in (1, 2):
            frame[(k, j)] = {us[(j, k - 1)]: sp.Integer(1), t: -us[(j, k)]}
    return frame


# --- the map and its prolongation -----------------------------------------

f_src = {1: u[(1, 0)], 2: u[(2, 0)], 3: x[2] * u[(1, 0)]}   # x3' = x2 u1
f_tgt = {1: v[(1, 0)], 2: v[(2, 0)], 3: y[2]}               # y3' = y2

Y = {1: x[1] * x[2] - x[3], 2: u[(2, 0)], 3: x[2]}
V = {1: x[1] * u[(2, 0)], 2: u[(2, 1)]}

sub = {t: t}
for i in (1, 2, 3):
    sub[y[i]] = Y[i]
for j in (1, 2):
    expr = V[j]
    for k in range(MAXORD + 1):
        sub[v[(j, k)]] = expr
        expr = total_derivative(expr, x, u, f_src)

# sanity: the map must send solutions to solutions (y_i' = f_tgt(y, v))
for i in (1, 2, 3):
    lhs = total_derivative(Y[i], x, u, f_src)
    rhs = f_tgt[i].subs(sub, simultaneous=True)
    assert sp.cancel(lhs - rhs) == 0, "component %d is not solution-preserving" % i

# --- frames ----------------------------------------------------------------

src_frame = adapted_frame(x, u, f_src, N + 1)
tgt_frame = adapted_frame(y, v, f_tgt, N)

# coordinates spanned by the source frame, in triangular order
span = [t, x[1], x[2], x[3]]
for k in range(N + 1):
    span.append(u[(1, k)])
    span.append(u[(2, k)])

src_labels = sorted(src_frame)
M = sp.Matrix([[src_frame[lab].get(c, sp.Integer(0)) for c in span]
               for lab in src_labels])
MT = M.T

# --- pull back each target frame element and re-express it -----------------

A = {}
for lab in sorted(tgt_frame):
    pulled = {}
    for coord, coeff in tgt_frame[lab].items():
        pc = coeff.subs(sub, simultaneous=True)
        img = sub[coord]
        syms = set(img.free_symbols)
        syms.add(t)
        for z in syms:
            dz = sp.diff(img, z)
            if dz == 0:
                continue
            pulled[z] = sp.cancel(pulled.get(z, sp.Integer(0)) + pc * dz)
    for z in pulled:
        assert z in span, "pullback of %s leaves the frame span: d(%s)" % (lab, z)
    b = sp.Matrix([pulled.get(c, sp.Integer(0)) for c in span])
    a = MT.LUsolve(b)
    row = {}
    for idx, clab in enumerate(src_labels):
        val = sp.cancel(a[idx])
        if val != 0:
            row[clab] = val
    A[lab] = row

print("A rows (adapted frames, target depth %d, source depth %d):" % (N, N + 1))
for lab in sorted(A):
    ent = ", ".join("%s: %s" % (c, A[lab][c]) for c in sorted(A[lab]))
    print("  %s  ->  {%s}" % (lab, ent))

# --- g = A * S^T ------------------------------------------------------------

# S has a single 1 per row; sigma maps a row of S to the column holding it.
sigma = {(-1, 1): (-1, 1), (0, 1): (1, 2), (0, 2): (0, 2), (0, 3): (0, 3)}
for k in range(1, N + 1):
    sigma[(k, 1)] = (k - 1, 1)
    sigma[(k, 2)] = (k + 1, 2)

g = {}
for rlab in sorted(A):
    row = {}
    for clab, target_col in sigma.items():
        val = A[rlab].get(target_col, sp.Integer(0))
        if val != 0:
            row[clab] = val
    g[rlab] = row

print()
print("g = A * S^T rows:")
for lab in sorted(g):
    ent = ", ".join("%s: %s" % (c, g[lab][c]) for c in sorted(g[lab]))
    print("  %s  ->  {%s}" % (lab, ent))

# --- product check: g * S must rebuild A ------------------------------------

inv_sigma = {c: r for r, c in sigma.items()}
ok = True
all_cols = sorted(src_labels)
for rlab in sorted(A):
    for clab in all_cols:
        want = A[rlab].get(clab, sp.Integer(0))
        src = inv_sigma.get(clab)
        got = g[rlab].get(src, sp.Integer(0)) if src is not None else sp.Integer(0)
        if sp.cancel(want - got) != 0:
            ok = False
            print("MISMATCH at %s, %s: A has %s, g*S has %s" % (rlab, clab, want, got))
print()
print("product check g*S == A:", ok)
dead = [c for c in all_cols if c not in inv_sigma]
print("columns outside the S pattern (must be zero in A):", dead,
      "->", all(all(A[r].get(c, sp.Integer(0)) == 0 for r in A) for c in dead))
