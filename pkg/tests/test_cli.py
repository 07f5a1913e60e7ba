import json

from qpcox.cli import main


def run(tmp_path, *argv, cache=False):
    args = list(argv)
    if not cache:
        args.append("--no-cache")
    else:
        args.extend(["--cache-dir", str(tmp_path / "cache")])
    return main(args)


def test_survey_a3_csv(tmp_path):
    out = tmp_path / "a3.csv"
    code = run(tmp_path, "survey", "--type", "A3", "--theta", "id", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("type,theta,class_size")
    fpf_rows = [l for l in lines if ",3," in l and "True" in l]
    assert fpf_rows  # the fixed-point-free class row, qp = True


def test_survey_a2_witness_row(tmp_path):
    out = tmp_path / "a2.json"
    code = run(
        tmp_path, "survey", "--type", "A2", "--theta", "id",
        "--format", "json", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    s1 = next(r for r in payload["reports"] if r["seed_word"] == [0])
    assert s1["qp"] is False and s1["witness"]["axiom"] == "QP1"


def test_survey_cache_roundtrip(tmp_path):
    out1 = tmp_path / "one.json"
    out2 = tmp_path / "two.json"
    assert run(tmp_path, "survey", "--type", "A2", "--format", "json",
               "--out", str(out1), cache=True) == 0
    cache_files = list((tmp_path / "cache").glob("*.json"))
    assert cache_files
    assert run(tmp_path, "survey", "--type", "A2", "--format", "json",
               "--out", str(out2), cache=True) == 0
    assert out1.read_text() == out2.read_text()


def test_basis_fpf_both_kinds(tmp_path):
    out = tmp_path / "fpf.json"
    code = run(
        tmp_path, "basis", "--type", "A3", "--class", "fpf",
        "--kind", "both", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload["tables"]) == {"M", "N"}
    assert payload["inversion_partner"]["seed"] is not None
    for entry in payload["tables"].values():
        assert all(entry["verification"].values())


def test_basis_coset(tmp_path):
    out = tmp_path / "coset.json"
    code = run(tmp_path, "basis", "--type", "A3", "--coset", "s1", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    for x, y, pairs in payload["tables"]["M"]["entries"]:
        assert all(c >= 0 for _, c in pairs)  # nonnegativity on coset carriers


def test_basis_bar_failure_exit_code(tmp_path):
    out = tmp_path / "bad.json"
    code = run(
        tmp_path, "basis", "--type", "A2", "--seed", "s1", "--theta", "id",
        "--out", str(out),
    )
    assert code == 3
    payload = json.loads(out.read_text())
    assert payload["bar_failure"]["reason"] == "not quasiparabolic"


def test_basis_universal_truncated_label(tmp_path):
    out = tmp_path / "u3.json"
    code = run(
        tmp_path, "basis", "--type", "U3", "--seed", "", "--theta", "rot",
        "--cutoff", "6", "--kind", "m", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["tables"]["M"]["label"] == "verified up to height 6"


def test_basis_mu_csv(tmp_path):
    out = tmp_path / "mu.csv"
    code = run(
        tmp_path, "basis", "--type", "A3", "--class", "fpf", "--kind", "both",
        "--format", "csv", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "kind,x,y,mu"
    assert any(line.startswith("M,") for line in lines[1:])


def test_explicit_theta_images(tmp_path):
    out = tmp_path / "tw.json"
    code = run(
        tmp_path, "basis", "--type", "A2", "--seed", "", "--theta", "2,1",
        "--kind", "n", "--out", str(out),
    )
    # iota(swap) in A2 is not quasiparabolic, so this is bar-failure evidence
    assert code == 3
    payload = json.loads(out.read_text())
    assert payload["bar_failure"]["reason"] == "not quasiparabolic"


def test_wgraph_regular_a2(tmp_path):
    out = tmp_path / "a2.json"
    code = run(
        tmp_path, "wgraph", "--type", "A2", "--regular", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    for entry in payload["graphs"].values():
        assert entry["quasi_admissible"] is True
        assert entry["module_axioms"] is True
        assert len(entry["cells"]) == 4


def test_wgraph_a1_regular(tmp_path):
    out = tmp_path / "a1.json"
    code = run(tmp_path, "wgraph", "--type", "A1", "--regular", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["graphs"]["m"]["vertices"]) == 2
    # one edge each way between e and s, split across the two presentations
    # by the reduction rule (tau-sets are nested here)
    edges = {
        kind: [e[:2] for e in payload["graphs"][kind]["edges"]] for kind in ("m", "n")
    }
    assert edges["m"] == [[1, 0]] and edges["n"] == [[0, 1]]


def test_wgraph_dot_output(tmp_path):
    out = tmp_path / "fpf.dot"
    code = run(
        tmp_path, "wgraph", "--type", "A3", "--class", "fpf",
        "--kind", "n", "--format", "dot", "--out", str(out),
    )
    assert code == 0
    assert out.read_text().startswith("digraph")


def test_verify_suites(tmp_path):
    assert run(tmp_path, "verify", "--type", "A2", "--suite", "hecke") == 0
    assert run(tmp_path, "verify", "--type", "A3", "--suite", "inversion") == 0
    assert run(tmp_path, "verify", "--type", "A2", "--suite", "finite-classification") == 0
    assert run(tmp_path, "verify", "--type", "U3", "--suite", "universal") == 0


def test_verify_writes_log(tmp_path):
    out = tmp_path / "log.json"
    assert run(tmp_path, "verify", "--type", "A2", "--suite", "hecke", "--out", str(out)) == 0
    log = json.loads(out.read_text())
    assert all(entry["ok"] for entry in log["results"])


def test_matrix_file_input(tmp_path):
    mat = tmp_path / "b2.json"
    mat.write_text('{"matrix": [[1, 4], [4, 1]]}')
    out = tmp_path / "survey.csv"
    assert run(tmp_path, "survey", "--type", str(mat), "--out", str(out)) == 0
    assert "rank-2" in out.read_text()
    bad = tmp_path / "affine.json"
    bad.write_text("[[1, 3, 3], [3, 1, 3], [3, 3, 1]]")
    assert run(tmp_path, "survey", "--type", str(bad)) == 1  # not positive definite


def test_usage_errors(tmp_path):
    assert run(tmp_path, "survey", "--type", "Q9") == 1
    assert run(tmp_path, "survey", "--type", "A2", "--format", "xml") == 1
    assert run(tmp_path, "wgraph", "--type", "A2", "--regular", "--format", "csv") == 1
    assert run(tmp_path, "basis", "--type", "A2") == 1  # no carrier selected
    assert run(tmp_path, "basis", "--type", "A2", "--regular", "--coset", "s1") == 1
    assert run(tmp_path, "verify", "--type", "A2", "--suite", "nonsense") == 1
    assert run(tmp_path, "basis", "--type", "A2", "--class", "fpf") == 1  # even rank
