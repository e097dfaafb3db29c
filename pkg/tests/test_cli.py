import pytest

from jetfactor import (RatFn, U, X, builtin_fixtures, elkin_forms_32,
                       parse_document, pullback_matrix, serialize)
from jetfactor.cli import main
from jetfactor.errors import SingularTrajectory

PHI, PHI_INV = builtin_fixtures()[0]


@pytest.fixture
def files(tmp_path):
    def put(name, obj):
        p = tmp_path / name
        p.write_text(serialize(obj) if not isinstance(obj, str) else obj)
        return str(p)

    return {
        "src": put("src.sys", PHI.src),
        "tgt": put("tgt.sys", PHI.tgt),
        "map": put("phi.map", PHI),
        "inv": put("phi_inv.map", PHI_INV),
        "elkin5": put("elkin5.sys", elkin_forms_32()[4]),
        "put": put,
    }


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# -------------------------------------------------------------------
# verify

def test_verify_pair(files, capsys):
    code, out, _ = run(capsys, "verify", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"],
                       "--inv", files["inv"])
    assert code == 0
    assert out.splitlines()[0] == \
        "forward: 0 residuals; inverse: identity to order 4; J=0 K=0"
    assert out.splitlines()[1].startswith("assuming nonzero: x2")


def test_verify_forward_only(files, capsys):
    code, out, _ = run(capsys, "verify", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"])
    assert code == 0
    assert out.splitlines()[0] == "forward: 0 residuals"


def test_verify_machine_format_reparses_and_repeats(files, capsys):
    args = ("verify", "--src", files["src"], "--tgt", files["tgt"],
            "--map", files["map"], "--inv", files["inv"],
            "--format", "machine")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    doc = parse_document(out1)
    assert doc.kind == "report"
    got = dict(doc.body)
    assert got["forward_ok"] == "true"
    assert got["detected_J"] == "0" and got["detected_K"] == "0"
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_verify_catches_a_broken_map(files, capsys):
    bad = serialize(PHI).replace("y1 = x1*x2 - x3", "y1 = x1*x2 + x3")
    path = files["put"]("bad.map", bad)
    code, out, _ = run(capsys, "verify", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", path)
    assert code == 1
    assert out.splitlines()[0] == "forward: 1 residuals"


# -------------------------------------------------------------------
# exit code 2: unusable input

def test_unreadable_file_is_usage_error(files, capsys):
    code, _, err = run(capsys, "verify", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", "/no/such/file.map")
    assert code == 2
    assert "cannot read" in err


def test_parse_error_is_usage_error(files, capsys):
    path = files["put"]("mangled.sys",
                        "system { states = 3 controls = 2 f1 = @ }")
    code, _, err = run(capsys, "classify", "--sys", path)
    assert code == 2
    assert "error:" in err


def test_bad_arguments_exit_2(files, capsys):
    assert run(capsys, "verify", "--src", files["src"])[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    code, _, err = run(capsys, "prolong", "--sys", files["elkin5"],
                       "--promote", "1,zap")
    assert code == 2
    assert "comma-separated" in err


def test_internal_errors_exit_3(files, capsys, monkeypatch):
    import jetfactor.cli as cli_mod
    monkeypatch.setattr(cli_mod, "classify_static",
                        lambda s, seed=0: 1 / 0)
    code, _, err = run(capsys, "classify", "--sys", files["elkin5"])
    assert code == 3
    assert "internal invariant violation" in err


# -------------------------------------------------------------------
# pullback

def test_pullback_text_and_machine(files, capsys):
    code, out, _ = run(capsys, "pullback", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"])
    assert code == 0
    assert "dt-column: zero" in out
    # a strict dynamic map shifts levels, so the matrix is not block-lower
    assert "block-lower: no" in out

    code, out, _ = run(capsys, "pullback", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"],
                       "--format", "machine")
    assert code == 0
    doc = parse_document(out)
    assert doc.kind == "matrix-report"
    assert doc.body == pullback_matrix(PHI, N=4)


def test_pullback_imposter_nonstrict_vs_strict(files, capsys):
    imposter = files["put"]("imposter.map",
                            "map { y1 = x1 y2 = x2 y3 = x3"
                            " v1 = u1 v2 = u2 }")
    code, out, _ = run(capsys, "pullback", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", imposter)
    assert code == 1
    assert "dt-column: NONZERO" in out

    code, _, err = run(capsys, "pullback", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", imposter, "--strict")
    assert code == 1
    assert "DtResidue" in err


# -------------------------------------------------------------------
# factor

def test_factor_phi(files, capsys):
    code, out, _ = run(capsys, "factor", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"])
    assert code == 0
    assert "G: identity" in out
    assert "assumptions (nonzero along trajectories): u2" in out
    assert "product reconstructs the pullback matrix exactly" in out


def test_factor_machine_reparses(files, capsys):
    code, out, _ = run(capsys, "factor", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"],
                       "--format", "machine")
    assert code == 0
    doc = parse_document(out)
    keys = [k for k, _ in doc.body]
    assert {"assumptions", "g", "S", "G"} <= set(keys)


# -------------------------------------------------------------------
# classify

def test_classify_text(files, capsys):
    code, out, _ = run(capsys, "classify", "--sys", files["elkin5"])
    assert code == 0
    assert out.rstrip() == "static: u1, u2, 1+x2*u1 ; dynamic: Class1"


def test_classify_machine(files, capsys):
    code, out, _ = run(capsys, "classify", "--sys", files["elkin5"],
                       "--format", "machine")
    assert code == 0
    got = dict(parse_document(out).body)
    assert got["tag"] == '"u1, u2, 1+x2*u1"'
    assert got["dynamic"] == '"Class1"'


def test_classify_no_dynamic_outside_32(files, capsys):
    path = files["put"]("chain.sys",
                        "system { states = 2 controls = 1"
                        " f1 = u1 f2 = x1 }")
    code, out, _ = run(capsys, "classify", "--sys", path)
    assert code == 0
    assert out.rstrip() == "static: u1, x1"


# -------------------------------------------------------------------
# structure-check

def test_structure_check_both_frames(files, capsys):
    code, out, _ = run(capsys, "structure-check", "--sys", files["elkin5"])
    assert code == 0
    lines = out.splitlines()
    assert "contact: structure equations hold at N=4" in lines
    assert "adapted: structure equations hold at N=4" in lines


def test_structure_check_adapted_needs_the_shape(files, capsys):
    path = files["put"]("chain.sys",
                        "system { states = 2 controls = 1"
                        " f1 = u1 f2 = x1 }")
    code, _, err = run(capsys, "structure-check", "--sys", path,
                       "--frame", "adapted")
    assert code == 2
    assert "normalized shape" in err
    # with both, the adapted frame is skipped rather than fatal
    code, out, _ = run(capsys, "structure-check", "--sys", path,
                       "--frame", "both")
    assert code == 0
    assert "contact:" in out and "adapted:" not in out


# -------------------------------------------------------------------
# prolong

def test_prolong_total(files, capsys):
    code, out, _ = run(capsys, "prolong", "--sys", files["elkin5"])
    assert code == 0
    s = parse_document(out).body
    assert (s.n, s.s) == (5, 2)
    assert s.f[2].to_text() == "x2*x4 + 1"


def test_prolong_partial(files, capsys):
    code, out, _ = run(capsys, "prolong", "--sys", files["elkin5"],
                       "--promote", "1")
    assert code == 0
    s = parse_document(out).body
    assert (s.n, s.s) == (4, 2)


# -------------------------------------------------------------------
# crosscheck

def test_crosscheck_passes_on_phi(files, capsys):
    code, out, _ = run(capsys, "crosscheck", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"])
    assert code == 0
    assert out.rstrip().endswith("pass")
    assert "T=1" in out


def test_crosscheck_machine(files, capsys):
    code, out, _ = run(capsys, "crosscheck", "--src", files["src"],
                       "--tgt", files["tgt"], "--map", files["map"],
                       "--format", "machine", "--steps", "400")
    assert code == 0
    got = dict(parse_document(out).body)
    assert got["passed"] == "true"


def test_crosscheck_singular_controls_raise():
    from jetfactor.cli import numeric_crosscheck
    theta = builtin_fixtures()[2][0]
    with pytest.raises(SingularTrajectory, match="singular set"):
        numeric_crosscheck(theta, controls=[[0.3, 0.1, 0.0, 0.0],
                                            [0.0, 0.0, 0.0, 0.0]])


# -------------------------------------------------------------------
# fixtures battery

def test_fixture_battery(files, capsys):
    code, out, _ = run(capsys, "fixtures")
    assert code == 0
    assert out.splitlines()[-1] == "17/17 checks passed"
    assert "FAIL" not in out
    assert "theta:raw(recorded)" in out


def test_fixture_battery_machine(files, capsys):
    code, out, _ = run(capsys, "fixtures", "--format", "machine")
    assert code == 0
    doc = parse_document(out)
    assert doc.kind == "report"
    assert all(k == "check" for k, _ in doc.body)
    assert len(doc.body) == 17


def test_crosscheck_result_fields():
    from jetfactor.cli import numeric_crosscheck
    res = numeric_crosscheck(PHI, seed=3, steps=600)
    assert res.passed and res.max_residual < 1e-6
    assert res.attempts >= 1
    tight = numeric_crosscheck(PHI, seed=3, steps=600, tol=0.0)
    assert not tight.passed


def test_crosscheck_explicit_good_controls():
    from jetfactor.cli import numeric_crosscheck
    res = numeric_crosscheck(PHI, controls=[[0.5, 0.2, 0.0, 0.1],
                                            [1.0, 0.3, 0.2, 0.0]])
    assert res.passed and res.attempts == 1
