import json

import pytest

from legendrian import bryant, contact
from legendrian.cli import STATUSES, main, run
from legendrian.exactalg import parse_poly

CUBIC_CHART = contact.format_chart(contact.pfaff_graph(parse_poly("t1^3", ("t1",))))
QUADRIC = "F = x0*x3 - x1*x2 + x2^2 - x3^2\np0 = [0, 0, 0, 1]\nH0 = [1, 0, 0, 0]\n"
P1P1 = "dim 2\nH 2\nHp 2\nH*Hp = 1\nclass h = H + 2*Hp\nclass c1 = 2*H + 2*Hp\nclass c2 = 4*H*Hp\n"


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def statuses(out):
    return {c["name"]: c["status"] for c in json.loads(out)["checks"]}


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("chart", CUBIC_CHART), ("surface", QUADRIC), ("algebra", P1P1),
                       ("form", "[0, 0, 0, -1]\n[0, 0, 1, 0]\n[0, -1, 0, 0]\n[1, 0, 0, 0]\n")):
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


# documented examples


def test_k3_check_passes(capsys):
    code, out, _ = invoke(capsys, "chern", "check", "--catalog", "K3blowup12", "--m", "1")
    assert code == 0
    assert "h^2=20" in out and "c1.h=-12" in out
    assert "FAIL" not in out


def test_pullback_passes(capsys):
    code, out, _ = invoke(capsys, "bryant", "pullback", "--n", "3", "--format", "json")
    assert code == 0
    assert set(statuses(out).values()) == {"PASS"}


def test_ruled_obstruction_fails(capsys):
    code, out, _ = invoke(capsys, "chern", "ruled", "--p", "3", "--q", "2")
    assert code == 1
    assert "-4*4*2 = -32" in out


# report structure


def test_json_schema(capsys):
    code, out, _ = invoke(capsys, "roots", "check", "--type", "C", "--rank", "3", "--node", "3", "--format", "json")
    body = json.loads(out)
    assert body["schema"] == 1
    assert body["command"] == "roots check"
    assert len(body["inputs_digest"]) == 64
    assert body["exit_code"] == code == 0
    assert all(c["status"] in STATUSES for c in body["checks"])
    assert "lhs=4, rhs=4" in [c["detail"] for c in body["checks"] if c["name"] == "identity"][0]


def test_output_is_byte_identical(capsys, files):
    argv = ["bryant", "position-report", "--surface", files["surface"], "--format", "json"]
    first = invoke(capsys, *argv)
    second = invoke(capsys, *argv)
    assert first == second


def test_digest_ignores_whitespace(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text(QUADRIC)
    b.write_text(QUADRIC.replace(" ", "").replace("\n", "\n\n   "))
    ra, _ = run(["bryant", "indeterminacy", "--surface", str(a)])
    rb, _ = run(["bryant", "indeterminacy", "--surface", str(b)])
    assert ra.digest == rb.digest
    rc, _ = run(["bryant", "indeterminacy", "--surface", str(a), "--seed", "1"])
    assert rc.digest != ra.digest


def test_exit_code_zero_iff_no_fail(capsys):
    for argv in (["chern", "ruled", "--p", "2", "--q", "0"], ["chern", "ruled", "--p", "2", "--q", "1"],
                 ["chern", "kodaira0", "--chi", "2"], ["chern", "kodaira0", "--chi", "1"]):
        code, out, _ = invoke(capsys, *argv, "--format", "json")
        assert code == (1 if "FAIL" in statuses(out).values() else 0)


# malformed input


@pytest.mark.parametrize("argv", [
    ["chern", "ruled", "--p", "x", "--q", "2"],
    ["bryant", "frobnicate"],
    ["roots", "check", "--rank", "3"],
])
def test_bad_flags_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


def test_malformed_files_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("F = x0 +\np0 = [0,0,1]\nH0 = [1,0,0]\n")
    code, _, err = invoke(capsys, "bryant", "lift", "--surface", str(bad))
    assert code == 2 and err.startswith("legendrian: error:")
    bad.write_text("3 1\nt1\n")
    assert invoke(capsys, "legendrian", "verify", "--chart", str(bad))[0] == 2
    assert invoke(capsys, "legendrian", "verify", "--chart", str(tmp_path / "missing.txt"))[0] == 2
    assert invoke(capsys, "chern", "check", "--catalog", "nowhere")[0] == 2


def test_incidence_failure_exits_two(capsys):
    code, _, err = invoke(capsys, "bryant", "map", "--x", "1,1,1", "--y", "1,1,1")
    assert code == 2 and "incidence" in err


# every subcommand


def test_legendrian_commands(capsys, files):
    code, out, _ = invoke(capsys, "legendrian", "verify", "--chart", files["chart"], "--format", "json")
    assert code == 0 and statuses(out)["Legendrian"] == "PASS"
    code, out, _ = invoke(capsys, "legendrian", "verify", "--chart", files["chart"], "--form", files["form"])
    assert code == 0
    code, out, _ = invoke(capsys, "legendrian", "discover-form", "--chart", files["chart"], "--format", "json")
    assert code == 0 and statuses(out)["nondegenerate member"] == "PASS"


def test_map_and_inverse(capsys):
    code, out, _ = invoke(capsys, "bryant", "map", "--x", "1,2,-3", "--y=-1,-1,-1", "--format", "json")
    assert code == 0 and statuses(out)["round trip"] == "PASS"
    code, out, _ = invoke(capsys, "bryant", "map", "--x", "0,1,0", "--y", "1,0,0", "--format", "json")
    assert code == 0 and "UNKNOWN" in statuses(out).values()
    code, out, _ = invoke(capsys, "bryant", "inverse", "--wz", "1,0,1,1")
    assert code == 0 and "x=[1, 1, -1/2]" in out
    code, out, _ = invoke(capsys, "bryant", "inverse", "--wz", "1,0,1,0", "--format", "json")
    assert code == 0 and "UNKNOWN" in statuses(out).values()


def test_surface_commands(capsys, files):
    for cmd in ("lift", "transform", "indeterminacy", "position-report"):
        code, out, _ = invoke(capsys, "bryant", cmd, "--surface", files["surface"], "--format", "json")
        assert code == 0, (cmd, out)
    _, out, _ = invoke(capsys, "bryant", "indeterminacy", "--surface", files["surface"], "--format", "json")
    assert statuses(out)["degree"] == "PASS"


def test_position_report_flags_bad_h0(capsys, tmp_path):
    p = tmp_path / "kummer.txt"
    p.write_text(bryant.format_hypersurface(bryant.kummer_from_node(H0=(1, -1, 2, 0))))
    code, out, _ = invoke(capsys, "bryant", "position-report", "--surface", str(p), "--format", "json")
    assert code == 1 and statuses(out)["H0 misses listed singular points"] == "FAIL"


def test_psi_command(capsys):
    code, out, _ = invoke(capsys, "bryant", "psi", "--poly", "x1*x2*x3", "--fibers", "--trials", "10",
                          "--format", "json")
    assert code == 0
    assert "SAMPLED" in statuses(out).values()
    code, out, _ = invoke(capsys, "bryant", "psi", "--poly", "x1^2 + x2^2", "--format", "json")
    assert code == 0 and statuses(out)["psi chart"] == "UNKNOWN"
    assert invoke(capsys, "bryant", "psi", "--poly", "x1^3 + x2")[0] == 2


def test_chern_commands(capsys, files):
    code, out, _ = invoke(capsys, "chern", "sigma", "--n", "3", "--m", "1")
    assert code == 0 and "2*ch2" in out.replace(" ", "")
    assert invoke(capsys, "chern", "sigma", "--m", "2")[0] == 0
    code, out, _ = invoke(capsys, "chern", "check", "--algebra", files["algebra"])
    assert code == 0
    code, out, _ = invoke(capsys, "chern", "codegree", "--algebra", files["algebra"], "--format", "json")
    assert code == 0
    code, out, _ = invoke(capsys, "chern", "codegree", "--catalog", "K3blowup12")
    assert "120" in out
    code, out, _ = invoke(capsys, "chern", "resultant", "--l", "1", "--m", "2", "--format", "json")
    assert code == 0 and statuses(out)["homogeneous"] == "PASS"
    code, out, _ = invoke(capsys, "chern", "resultant", "--l", "1", "--m", "2", "--compare")
    assert code == 1 and "non-homogeneous" in out


def test_roots_commands(capsys):
    code, out, _ = invoke(capsys, "roots", "check", "--type", "G", "--rank", "2", "--adjoint")
    assert code == 0 and "gamma=3, n=5" in out
    code, _, _ = invoke(capsys, "roots", "check", "--type", "A", "--rank", "3", "--node", "1", "--lambda", "2")
    assert code == 1
    assert invoke(capsys, "roots", "check", "--type", "Q", "--rank", "3", "--node", "1")[0] == 2


def test_selftest_is_healthy(capsys):
    code, out, _ = invoke(capsys, "selftest", "--format", "json")
    assert code == 0
    assert len(statuses(out)) == 14
