"""Command-line interface tests (in-process, via main)."""

import json
from fractions import Fraction

import pytest

from sympovm.cli import main
from sympovm.feasible import SymPovm
from sympovm.symmetry import CoeffVector, kind


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_vertices_oo_csv(capsys):
    code, out, _ = run(capsys, "vertices", "--family", "oo", "--dim", "3",
                       "--outcomes", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "vertex,c0,c1,c2"
    assert len(lines) == 9
    assert "1,0,2/5" in out  # D1
    assert "0,0,3/5" in out  # B1


def test_vertices_brute_matches_dd(capsys):
    _, dd_out, _ = run(capsys, "vertices", "--family", "bell", "--dim", "2",
                       "--outcomes", "2", "--format", "csv")
    _, brute_out, _ = run(capsys, "vertices", "--family", "bell", "--dim", "2",
                          "--outcomes", "2", "--format", "csv",
                          "--method", "brute")
    assert dd_out == brute_out


def test_extrema_bell_json(capsys):
    code, out, _ = run(capsys, "extrema", "--family", "bell", "--dim", "2",
                       "--outcomes", "4")
    assert code == 0
    blob = json.loads(out)
    assert blob["count"] == 40
    assert len(blob["classes"]) == 4
    for cls in blob["classes"]:
        nonzero = [e for e in cls["elements"] if any(c != "0" for c in e)]
        assert len(nonzero) <= 2


def test_byte_identical_output(capsys):
    _, first, _ = run(capsys, "extrema", "--family", "oo", "--dim", "3",
                      "--outcomes", "3")
    _, second, _ = run(capsys, "extrema", "--family", "oo", "--dim", "3",
                       "--outcomes", "3")
    assert first == second


def test_check_feasible_and_infeasible(tmp_path, capsys):
    k = kind("isotropic", 2)
    good = SymPovm(k, (CoeffVector(k, (1, Fraction(1, 3))),
                       CoeffVector(k, (0, Fraction(2, 3)))))
    path = tmp_path / "good.json"
    path.write_text(json.dumps(good.to_json()))
    code, out, _ = run(capsys, "check", "--povm", str(path))
    assert code == 0 and json.loads(out)["feasible"]

    bad = SymPovm(k, (CoeffVector(k, (1, Fraction(1, 4))),
                      CoeffVector(k, (0, Fraction(3, 4)))))
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad.to_json()))
    code, out, _ = run(capsys, "check", "--povm", str(path))
    assert code == 1
    blob = json.loads(out)
    assert not blob["feasible"]
    assert any(v["label"][0] == "ppt" for v in blob["violations"])


def test_protocol_synth_and_verify_round_trip(tmp_path, capsys):
    k = kind("isotropic", 3)
    target = SymPovm(k, (CoeffVector(k, (1, Fraction(1, 4))),
                         CoeffVector(k, (0, Fraction(3, 4)))))
    tpath = tmp_path / "target.json"
    tpath.write_text(json.dumps(target.to_json()))
    code, out, _ = run(capsys, "protocol-synth", "--family", "isotropic",
                       "--dim", "3", "--target", str(tpath))
    assert code == 0
    ppath = tmp_path / "protocol.json"
    ppath.write_text(out)
    code, out, _ = run(capsys, "protocol-verify", "--protocol", str(ppath),
                       "--target", str(tpath))
    assert code == 0
    assert json.loads(out)["ok"]


def test_protocol_verify_mismatch_exits_1(tmp_path, capsys):
    k = kind("isotropic", 2)
    target = SymPovm(k, (CoeffVector(k, (1, Fraction(1, 3))),
                         CoeffVector(k, (0, Fraction(2, 3)))))
    other = SymPovm(k, (CoeffVector(k, (Fraction(1, 2), Fraction(1, 2))),
                        CoeffVector(k, (Fraction(1, 2), Fraction(1, 2)))))
    tpath = tmp_path / "t.json"
    tpath.write_text(json.dumps(target.to_json()))
    _, out, _ = run(capsys, "protocol-synth", "--family", "isotropic",
                    "--dim", "2", "--target", str(tpath))
    ppath = tmp_path / "p.json"
    ppath.write_text(out)
    opath = tmp_path / "o.json"
    opath.write_text(json.dumps(other.to_json()))
    code, out, _ = run(capsys, "protocol-verify", "--protocol", str(ppath),
                       "--target", str(opath))
    assert code == 1
    assert not json.loads(out)["ok"]


def test_oo_protocol_synth(capsys):
    code, out, _ = run(capsys, "protocol-synth", "--family", "oo", "--dim", "3",
                       "--extremum", "triple")
    assert code == 0
    blob = json.loads(out)
    assert blob["twirl"] == "oo" and len(blob["outcomes"]) == 3


def test_state_set_command(capsys):
    code, out, _ = run(capsys, "state-set", "--dim", "3")
    assert code == 0
    blob = json.loads(out)
    assert len(blob["states"]) == 24
    assert all(s["weight"] == "1/8" for s in blob["states"])


def test_nogo_command(capsys):
    code, out, _ = run(capsys, "nogo", "--dim", "3")
    assert code == 0
    assert "verdict=infeasible" in out
    code, out, _ = run(capsys, "nogo", "--dim", "4", "--json")
    assert code == 0
    assert json.loads(out)["verdict"] == "infeasible"
    code, out, _ = run(capsys, "nogo", "--dim", "2", "--family", "isotropic")
    assert code == 0
    assert "verdict=feasible" in out


def test_decompose_command(tmp_path, capsys):
    k = kind("bell", 2)
    half = Fraction(1, 2)
    mix = SymPovm(k, (CoeffVector(k, (1, half, half, 0)),
                      CoeffVector(k, (0, half, half, 1))))
    path = tmp_path / "mix.json"
    path.write_text(json.dumps(mix.to_json()))
    code, out, _ = run(capsys, "decompose", "--povm", str(path))
    assert code == 0
    blob = json.loads(out)
    assert blob["decomposed"]
    assert sum(Fraction(w["weight"]) for w in blob["weights"]) == 1


def test_discriminate_command(tmp_path, capsys):
    states = {"family": "bell", "dim": 2,
              "states": [["1", "0", "0", "0"], ["0", "1", "0", "0"],
                         ["0", "0", "1", "0"], ["0", "0", "0", "1"]]}
    path = tmp_path / "states.json"
    path.write_text(json.dumps(states))
    code, out, _ = run(capsys, "discriminate", "--states", str(path),
                       "--priors", "1/4,1/4,1/4,1/4", "--cost", "bayes",
                       "--mode", "local")
    assert code == 0
    assert json.loads(out)["value"] == "1/2"
    code, out, _ = run(capsys, "discriminate", "--states", str(path),
                       "--cost", "info", "--mode", "global")
    assert code == 0
    blob = json.loads(out)
    assert abs(blob["value"] - 2.0) < 1e-9
    # the global optimum is attained by the commutant-block measurement
    blocks = SymPovm.from_json(blob["optimal_povm"])
    assert blocks.n_outcomes == 4 and blocks.is_complete()
    code, out, _ = run(capsys, "discriminate", "--states", str(path),
                       "--cost", "info", "--mode", "local")
    assert code == 0
    assert abs(json.loads(out)["value"] - 1.0) < 1e-9


def test_usage_errors_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "check", "--povm", str(tmp_path / "missing.json"))
    assert code == 2
    assert "error:" in err
    with pytest.raises(SystemExit) as exc:
        main(["vertices", "--family", "nope", "--outcomes", "2"])
    assert exc.value.code == 2


def test_basis_json_round_trips_matrices(capsys):
    from sympovm.operators import BipartiteOperator

    code, out, _ = run(capsys, "basis", "--family", "bell", "--dim", "2")
    assert code == 0
    blob = json.loads(out)
    projs = [BipartiteOperator.from_json(p) for p in blob["projectors"]]
    assert len(projs) == 4
    total = projs[0]
    for p in projs[1:]:
        total = total + p
    assert total == BipartiteOperator.identity(2)
