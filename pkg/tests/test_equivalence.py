"""Verification of the bundled equivalences and their pullback matrices."""

import pytest

from jetfactor import (BlockMatrix, ControlSystem, EquivMap, RatFn, U, X,
                       ZERO, ONE, block_rank, builtin_fixtures, check_arepeats,
                       check_nonaut_static, check_nonaut_static_pair, compose,
                       detect_order, prolong_map, pullback_matrix,
                       random_nonaut_static_pair, random_static_transform,
                       verify_forward, verify_inverse, verify_pair,
                       verify_scalar_theorem)
from jetfactor.errors import (DimensionMismatch, DtResidue, RepeatViolation,
                              StructureViolation)

FIX = builtin_fixtures()
PHI, PHI_INV = FIX[0]
PSI, PSI_INV = FIX[1]
THETA, THETA_INV = FIX[2]
DEC, DEC_INV = FIX[3]
PRO, PRO_INV = FIX[4]

x1 = RatFn.var(X(1))
u1, u2 = RatFn.var(U(1)), RatFn.var(U(2))


def du(j, k):
    return RatFn.var(U(j, k))


# --- the map type itself ------------------------------------------------


def test_map_shape_validation():
    sig = PHI.src
    with pytest.raises(DimensionMismatch):
        EquivMap(sig, PHI.tgt, PHI.y[:2], PHI.v)  # missing a state component
    with pytest.raises(DimensionMismatch):
        EquivMap(sig, PHI.tgt, PHI.y, PHI.v[:1])
    with pytest.raises(DimensionMismatch):
        EquivMap(sig, PHI.tgt, (RatFn.var(X(4)), PHI.y[1], PHI.y[2]), PHI.v)
    with pytest.raises(DimensionMismatch):
        EquivMap(sig, PHI.tgt, PHI.y, (RatFn.var(U(3)), PHI.v[1]))


def test_order_detection():
    assert detect_order(PHI) == 0       # y touches u2 but no derivatives
    assert PHI.v_order() == 1           # v2 = u2'
    assert detect_order(PRO_INV) == -1  # pure state relabeling
    assert PRO_INV.is_static()
    assert not PHI.is_static()


# --- verification of the five bundled pairs -------------------------------


@pytest.mark.parametrize("m,minv", FIX, ids=[m.name for m, _ in FIX])
def test_forward_is_structurally_zero(m, minv):
    for mm in (m, minv):
        rep = verify_forward(mm)
        assert rep.forward_ok, rep.summary()
        assert rep.inverse_ok is None
        assert all(r.is_zero() for _, r in rep.residuals)
        assert [lab for lab, _ in rep.residuals] == \
            ["forward y%d" % (i + 1) for i in range(mm.tgt.n)]


@pytest.mark.parametrize("m,minv", FIX, ids=[m.name for m, _ in FIX])
def test_pairs_invert_to_order_four(m, minv):
    rep = verify_pair(m, minv, N=4)
    assert rep.ok, rep.summary()
    assert verify_inverse(m, minv, N=4).inverse_ok


def test_strict_pairs_have_order_zero_both_ways():
    for m, minv in (FIX[0], FIX[1], FIX[2]):
        rep = verify_pair(m, minv, N=4)
        assert (rep.detected_J, rep.detected_K) == (0, 0)


def test_verification_is_stable_one_level_deeper():
    rep = verify_pair(PHI, PHI_INV, N=5)
    assert rep.ok
    assert (rep.detected_J, rep.detected_K) == (0, 0)


def test_roundtrip_assumptions_are_recorded():
    rep = verify_pair(PHI, PHI_INV, N=4)
    # the inverse divides by x2, so the identity only holds off x2 = 0
    assert any(a.startswith("x2") for a in rep.assumptions)


def test_corrupted_forward_component():
    # flip the x3 sign in y1; the defect shows up as a -2 x2 u1 residual
    bad = EquivMap(PHI.src, PHI.tgt,
                   (PHI.y[0] + 2 * RatFn.var(X(3)), PHI.y[1], PHI.y[2]),
                   PHI.v, name="bad")
    rep = verify_forward(bad)
    assert not rep.forward_ok
    assert not rep.ok
    assert rep.failed() and rep.failed()[0][0] == "forward y1"
    assert rep.failed()[0][1] == -2 * RatFn.var(X(2)) * u1
    assert "FAIL" in rep.summary()


def test_inverse_must_connect_the_same_systems():
    with pytest.raises(DimensionMismatch):
        verify_inverse(PHI, PSI_INV)
    with pytest.raises(DimensionMismatch):
        compose(PSI, PHI)  # psi starts where phi does not end


# --- composition and prolongation ------------------------------------------


def test_composition_with_inverse_is_identity():
    c = compose(PHI_INV, PHI)
    assert c.src == PHI.src and c.tgt == PHI.src
    assert c.y == (RatFn.var(X(1)), RatFn.var(X(2)), RatFn.var(X(3)))
    assert c.v == (u1, u2)
    assert c.name == "phi_inv.phi"


def test_prolong_map_chains_derivatives():
    flat = prolong_map(PHI, 1)
    assert flat[:3] == PHI.y
    assert flat[3:5] == PHI.v
    assert flat[5] == PHI.src.D(PHI.v[0])
    assert flat[6] == du(2, 2)  # D of v2 = u2'
    with pytest.raises(ValueError):
        prolong_map(PHI, -1)


# --- the pullback matrix ----------------------------------------------------


def expected_A_phi():
    """Every entry of the forward pullback matrix at depth 4.

    The same table comes out of the independent recomputation in
    tests/oracles/oracle_pullback.py (sympy end to end).
    """
    x = {i: RatFn.var(X(i)) for i in (1, 2, 3)}
    rows = {
        (-1, 1): {(-1, 1): ONE},
        (0, 1): {(0, 2): x[1], (0, 3): -ONE},
        (0, 2): {(1, 2): ONE},
        (0, 3): {(0, 2): ONE},
        (1, 1): {(0, 1): u2, (1, 2): x[1]},
        (1, 2): {(2, 2): ONE},
        (2, 1): {(0, 1): du(2, 1), (1, 1): u2, (1, 2): u1, (2, 2): x[1]},
        (2, 2): {(3, 2): ONE},
        (3, 1): {(0, 1): du(2, 2), (1, 1): 2 * du(2, 1), (1, 2): du(1, 1),
                 (2, 1): u2, (2, 2): 2 * u1, (3, 2): x[1]},
        (3, 2): {(4, 2): ONE},
        (4, 1): {(0, 1): du(2, 3), (1, 1): 3 * du(2, 2), (1, 2): du(1, 2),
                 (2, 1): 3 * du(2, 1), (2, 2): 3 * du(1, 1),
                 (3, 1): u2, (3, 2): 3 * u1, (4, 2): x[1]},
        (4, 2): {(5, 2): ONE},
    }
    return {(r, c): v for r, row in rows.items() for c, v in row.items()}


def test_pullback_of_phi_entry_by_entry():
    A = pullback_matrix(PHI, N=4)
    assert A.entries == expected_A_phi()


def test_pullback_of_phi_displayed_rows():
    A = pullback_matrix(PHI, N=4)
    assert A.block(0, 0)[0] == [ZERO, x1, -ONE]
    assert A.block(1, 0) == [[u2, ZERO, ZERO], [ZERO, ZERO, ZERO]]
    assert A.block(1, 1) == [[ZERO, x1], [ZERO, ZERO]]
    assert A.block(2, 0)[0] == [du(2, 1), ZERO, ZERO]
    assert A.block(2, 1)[0] == [u2, u1]
    assert A.block(2, 2)[0] == [ZERO, x1]


def test_pullback_metadata():
    A = pullback_matrix(PHI, N=4)
    assert A.meta["J"] == 0 and A.meta["N"] == 4
    assert A.meta["map"] == "phi"
    assert A.meta["kind_src"] == A.meta["kind_tgt"] == "adapted3x2"
    assert A.meta["assumptions"] == []  # phi itself never divides
    At = pullback_matrix(THETA, N=4)
    assert "u2" in At.meta["assumptions"]


def test_pullback_dt_column_is_clean():
    A = pullback_matrix(PHI, N=4)
    for (r, c) in A.entries:
        if c == (-1, 1):
            assert r == (-1, 1)


def test_pullback_respects_the_band():
    A = pullback_matrix(PHI, N=4)
    J = A.meta["J"]
    for (r, c) in A.entries:
        if r[0] >= 0:
            assert c[0] <= J + r[0] + 1


def test_non_solution_map_trips_the_dt_check():
    sig, lam = PHI.src, PHI.tgt
    imposter = EquivMap(sig, lam, tuple(RatFn.var(X(i)) for i in (1, 2, 3)),
                        (u1, u2), name="imposter")
    with pytest.raises(DtResidue):
        pullback_matrix(imposter, N=2)
    B = pullback_matrix(imposter, N=2, strict=False)
    assert not B.get((0, 3), (-1, 1)).is_zero()


# --- repetition and rank structure -------------------------------------------


@pytest.mark.parametrize("m", [PHI, PSI, THETA], ids=lambda m: m.name)
def test_repeated_blocks_down_the_staircase(m):
    A = pullback_matrix(m, N=4)
    ref = check_arepeats(A)
    assert ref is not None
    assert A.block(1, A.meta["J"] + 2) == ref


def test_repeats_violation_raises():
    A = pullback_matrix(PHI, N=4)
    A.set((3, 1), (4, 1), RatFn.const(5))  # vandalize a staircase block
    with pytest.raises(RepeatViolation):
        check_arepeats(A)


def test_repeats_check_is_vacuous_when_shallow():
    assert check_arepeats(pullback_matrix(PHI, N=1)) is None


@pytest.mark.parametrize("m", [PHI, PSI, THETA], ids=lambda m: m.name)
def test_rank_one_blocks(m):
    A = pullback_matrix(m, N=4)
    assert block_rank(A, 0, 1) == 1
    assert block_rank(A, 1, 2) == 1


def test_static_maps_have_rank_zero_there():
    fwd, _, _ = random_static_transform(PHI.src, 3)
    A = pullback_matrix(fwd, N=3)
    assert block_rank(A, 0, 1) == 0
    assert block_rank(A, 1, 2) == 0


# --- triangularity as a staticness test --------------------------------------


@pytest.mark.parametrize("seed", range(10))
def test_nonaut_static_pairs_are_mutually_triangular(seed):
    fwd, back, _ = random_nonaut_static_pair(PHI.src, seed)
    assert verify_pair(fwd, back, N=3).ok
    A = pullback_matrix(fwd, N=3)
    B = pullback_matrix(back, N=3)
    rep = check_nonaut_static_pair(A, B)
    assert rep.consistent and rep.static
    assert "triangular" in rep.summary()


def test_dynamic_pair_is_mutually_full():
    A = pullback_matrix(PHI, N=3)
    B = pullback_matrix(PHI_INV, N=3)
    assert not check_nonaut_static(A)
    rep = check_nonaut_static_pair(A, B)
    assert rep.consistent and not rep.static
    assert "full" in rep.summary()


# --- block matrix plumbing ----------------------------------------------------


def square(vals):
    m = BlockMatrix([0], [0], {0: 2}, {0: 2})
    for i in (1, 2):
        for j in (1, 2):
            m.set((0, i), (0, j), vals[i - 1][j - 1])
    return m


def test_block_matrix_algebra():
    a = square([[ONE, x1], [ZERO, ONE]])
    b = square([[ONE, -x1], [ZERO, ONE]])
    eye = BlockMatrix.identity([0], {0: 2})
    assert a.matmul(b) == eye
    assert a.full_inverse() == b
    assert a.transpose().get((0, 2), (0, 1)) == x1
    assert a.copy() == a
    assert a != b


def test_block_matrix_singular_inverse():
    with pytest.raises(StructureViolation):
        square([[ONE, ONE], [ONE, ONE]]).full_inverse()


def test_block_matrix_shape_errors():
    a = square([[ONE, ZERO], [ZERO, ONE]])
    tall = BlockMatrix([0], [-1, 0], {0: 2}, {-1: 1, 0: 2})
    with pytest.raises(DimensionMismatch):
        tall.matmul(a)
    with pytest.raises(DimensionMismatch):
        tall.full_inverse()


def test_equality_ignores_meta():
    a = square([[ONE, ZERO], [ZERO, ONE]])
    b = square([[ONE, ZERO], [ZERO, ONE]])
    b.meta["J"] = 7
    assert a == b


def test_equal_on_shared():
    A = pullback_matrix(PHI, N=3)
    B = pullback_matrix(PHI, N=4)
    assert A.equal_on_shared(B)


# --- the single-control consequence -------------------------------------------


def chain2():
    return ControlSystem(2, 1, (u1, x1), name="chain")


def test_scalar_static_pair_passes():
    sys_ = chain2()
    fwd, back, _ = random_static_transform(sys_, 11)
    rep = verify_scalar_theorem(fwd, back, N=3)
    assert rep.ok
    assert (rep.detected_J, rep.detected_K) == (-1, -1)
    assert any("static" in n for n in rep.notes)


def test_scalar_check_rejects_multi_control_systems():
    with pytest.raises(DimensionMismatch):
        verify_scalar_theorem(PHI, PHI_INV)


def test_scalar_check_on_a_non_pair_says_so():
    sys_ = chain2()
    fwd, back, _ = random_static_transform(sys_, 11)
    broken = EquivMap(fwd.src, fwd.tgt, fwd.y, (fwd.v[0] + 1,), name="broken")
    rep = verify_scalar_theorem(broken, back, N=3)
    assert not rep.ok
    assert any("nothing to conclude" in n for n in rep.notes)
