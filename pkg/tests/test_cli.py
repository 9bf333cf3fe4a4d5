import json

import pytest

from chernlab.chern import IdempotentPair, averaging_idempotent, pair_to_json
from chernlab.cli import main
from chernlab.groups import cyclic_group


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_homology_hexagon(capsys):
    code, out = run(capsys, "homology", "--group", "cyclic:6", "--gens", "1,-1", "--d", "1")
    assert code == 0 and out["betti"] == [1, 1]


def test_homology_sym3_labels(capsys):
    code, out = run(capsys, "homology", "--group", "sym:3", "--gens", "(0 1),(1 2)", "--d", "1",
                    "--theory", "invariant", "--max-dim", "3")
    assert code == 0 and out["betti"] == [1, 0, 0]


def test_rips_output(capsys):
    code, out = run(capsys, "rips", "--group", "cyclic:3", "--d", "1")
    assert code == 0 and out["f_vector"] == [3, 3, 1]


def test_verify_cyclic4_passes(capsys):
    code, out = run(capsys, "verify", "--group", "cyclic:4", "--d", "2", "--max-dim", "3")
    assert code == 0 and out["passed"] and out["failed"] == []
    names = {c["name"].split("[")[0] for c in out["checks"]}
    assert {"boundary_squared", "chain_map", "cyclic_vs_invariant_dims", "induces_isomorphism",
            "average_after_quotient_is_identity", "chern_cycle", "locality",
            "conjugation_invariance", "rank_shift_in_degree_0", "truncation_coherence"} <= names


def test_chern_z2_twisted_values(capsys, tmp_path):
    G = cyclic_group(2)
    path = tmp_path / "k.json"
    path.write_text(json.dumps(pair_to_json(IdempotentPair(averaging_idempotent(G)))))
    code, out = run(capsys, "chern", "--group", "cyclic:2", "--kernel", str(path), "--n", "0",
                    "--theory", "twisted_cyclic")
    assert code == 0
    vals = {(t["g"], tuple(t["tuple"])): t["value"] for t in out["twisted"]["ordered_terms"]}
    assert vals == {(0, (0,)): "1/2", (0, (1,)): "1/2", (1, (0,)): "1/2", (1, (1,)): "1/2"}
    assert out["twisted"]["checks"]["locality"]


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["verify", "--group", "cyclic:2", "--d", "1", "--max-dim", "3", "--seed", "3",
                     "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [
    ["homology", "--group", "nope:3", "--d", "1"],
    ["homology", "--group", "cyclic:4", "--d", "-1"],
    ["rips", "--group", "cyclic:4", "--d", "1", "--max-dim", "99"],
    ["chern", "--group", "cyclic:2", "--n", "2", "--d", "1"],
    ["homology", "--group", "cyclic:4", "--gens", "7", "--d", "1"],
])
def test_errors_are_reported(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2 and out["passed"] is False and out["error"]["message"]


def test_matrix_cap_reported(capsys, monkeypatch):
    monkeypatch.setenv("CHERNLAB_MATRIX_CAP", "3")
    code, out = run(capsys, "homology", "--group", "cyclic:6", "--d", "1")
    assert code == 2 and out["error"]["type"] == "MatrixCapExceeded"


def test_failing_check_exits_one(capsys):
    code, out = run(capsys, "verify", "--group", "cyclic:6", "--d", "1", "--max-dim", "4")
    assert code == 1 and not out["passed"] and out["failed"]
