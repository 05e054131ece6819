"""Channel file format and command-line interface tests."""

import json
import subprocess
import sys

import numpy as np
import pytest

from bcc import (
    DeterministicChannel,
    ParseError,
    ValidationError,
    channel_from_dict,
    channel_to_dict,
    dumps_canonical,
    load_channel,
    random_channel,
    save_channel,
    validate_channel,
)
from bcc.cli import main


def dense_doc():
    return {
        "format_version": 1,
        "kind": "dense",
        "num_inputs": 1,
        "num_outputs1": 2,
        "num_outputs2": 1,
        "rows": [[[0.25], [0.75]]],
    }


def write_channel(tmp_path, channel, name="channel.json"):
    path = tmp_path / name
    save_channel(channel, path)
    return path


def perfect_file(tmp_path):
    probs = np.zeros((4, 2, 2))
    for x in range(4):
        probs[x, x >> 1, x & 1] = 1.0
    return write_channel(tmp_path, validate_channel(probs))


def one_input_file(tmp_path):
    return write_channel(tmp_path, validate_channel(np.ones((1, 1, 1))))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_from(out):
    return json.loads(out)


def test_dense_round_trip_is_byte_identical(tmp_path):
    w = random_channel(3, 2, 4, seed=13)
    path = write_channel(tmp_path, w)
    first = path.read_bytes()
    loaded = load_channel(path)
    assert np.allclose(loaded.probs, w.probs)
    save_channel(loaded, path)
    assert path.read_bytes() == first


def test_deterministic_round_trip(tmp_path):
    dc = DeterministicChannel(3, 2, 2, ((0, 0), (1, 1), (0, 1)))
    path = write_channel(tmp_path, dc)
    doc = json.loads(path.read_text())
    assert doc["kind"] == "deterministic"
    assert doc["pairs"] == [[0, 0], [1, 1], [0, 1]]
    assert load_channel(path) == dc
    save_channel(load_channel(path), path)
    assert load_channel(path) == dc


def test_dumps_canonical_is_order_independent():
    doc = dense_doc()
    shuffled = dict(reversed(list(doc.items())))
    assert dumps_canonical(doc) == dumps_canonical(shuffled)
    assert dumps_canonical(doc).endswith("\n")


def test_from_dict_accepts_valid_doc():
    w = channel_from_dict(dense_doc())
    assert w.probs[0, 1, 0] == 0.75


def test_parse_errors():
    with pytest.raises(ParseError, match="top level"):
        channel_from_dict([1, 2])
    for key in ("format_version", "kind", "num_inputs", "rows"):
        doc = dense_doc()
        del doc[key]
        with pytest.raises(ParseError, match=key):
            channel_from_dict(doc)
    doc = dense_doc()
    doc["format_version"] = 2
    with pytest.raises(ParseError, match="format_version"):
        channel_from_dict(doc)
    doc = dense_doc()
    doc["kind"] = "sparse"
    with pytest.raises(ParseError, match="kind"):
        channel_from_dict(doc)
    doc = dense_doc()
    doc["num_inputs"] = True
    with pytest.raises(ParseError, match="bool"):
        channel_from_dict(doc)
    doc = dense_doc()
    doc["rows"] = [[[0.25], [True]]]
    with pytest.raises(ParseError, match="not a number"):
        channel_from_dict(doc)


def test_validation_errors_name_the_row():
    doc = dense_doc()
    doc["rows"] = [[[0.25], [0.70]]]
    with pytest.raises(ValidationError, match="x=0"):
        channel_from_dict(doc)
    doc = dense_doc()
    doc["rows"] = [[[-0.25], [1.25]]]
    with pytest.raises(ValidationError, match="x=0"):
        channel_from_dict(doc)
    doc = dense_doc()
    doc["num_inputs"] = 0
    with pytest.raises(ValidationError, match="positive"):
        channel_from_dict(doc)


def test_deterministic_doc_errors():
    doc = {"format_version": 1, "kind": "deterministic", "num_inputs": 2,
           "num_outputs1": 2, "num_outputs2": 2, "pairs": [[0, 0]]}
    with pytest.raises(ValidationError, match="expected 2 pairs"):
        channel_from_dict(doc)
    doc["pairs"] = [[0, 0], [0, 2]]
    with pytest.raises(ValidationError, match="x=1"):
        channel_from_dict(doc)
    doc["pairs"] = [[0, 0], [0, 0.5]]
    with pytest.raises(ParseError, match="x=1"):
        channel_from_dict(doc)


def test_alphabet_label_errors():
    doc = dense_doc()
    doc["alphabets"] = {"x": ["a"], "y1": ["u", "v"], "y2": ["w"]}
    channel_from_dict(doc)
    doc["alphabets"] = {"z": ["a"]}
    with pytest.raises(ParseError, match="unknown alphabet"):
        channel_from_dict(doc)
    doc["alphabets"] = {"y1": ["u"]}
    with pytest.raises(ValidationError, match="1 labels for 2"):
        channel_from_dict(doc)
    doc["alphabets"] = {"y1": ["u", "u"]}
    with pytest.raises(ValidationError, match="duplicate"):
        channel_from_dict(doc)
    doc["alphabets"] = {"y1": [1, 2]}
    with pytest.raises(ParseError, match="list of strings"):
        channel_from_dict(doc)


def test_to_dict_rejects_unknown_objects():
    with pytest.raises(ValidationError):
        channel_to_dict(np.zeros((2, 2, 2)))


def test_load_channel_prefixes_path(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParseError, match="broken.json"):
        load_channel(path)
    missing = tmp_path / "missing.json"
    with pytest.raises(ParseError, match="missing.json"):
        load_channel(missing)
    path.write_text(json.dumps({"format_version": 1}))
    with pytest.raises(ParseError, match="broken.json"):
        load_channel(path)


def test_cli_solve_perfect_channel(tmp_path, capsys):
    path = perfect_file(tmp_path)
    code, out, err = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2")
    assert code == 0
    report = report_from(out)
    q = report["quantities"]
    for name in ("S", "S_sum", "S_ns", "S_ns_sum", "S_ns_dec"):
        assert q[name] == pytest.approx(1.0)
    assert all(c["passed"] for c in report["checks"])
    assert report["command"] == "solve"


def test_cli_solve_one_input_values(tmp_path, capsys):
    path = one_input_file(tmp_path)
    code, out, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2")
    assert code == 0
    q = report_from(out)["quantities"]
    assert q["S"] == pytest.approx(0.25)
    assert q["S_sum"] == pytest.approx(0.5)
    assert q["S_ns"] == pytest.approx(0.25)
    assert q["S_ns_sum"] == pytest.approx(0.5)
    assert q["S_ns_dec"] == pytest.approx(0.25)
    assert q["S_ns_dec_sum"] == pytest.approx(0.5)
    assert q["dqg_value"] == 1
    assert q["ns_degree_bound"] == pytest.approx(0.25)


def test_cli_exact_mode_reports_rationals(tmp_path, capsys):
    path = one_input_file(tmp_path)
    code, out, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                           "--which", "ns", "--exact")
    assert code == 0
    q = report_from(out)["quantities"]
    assert q["S_ns_exact"] == "1/4"


def test_cli_exit_codes(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    code, _, err = run_cli(capsys, "solve", str(missing), "--k1", "2", "--k2", "2")
    assert code == 2
    assert "error:" in err

    path = perfect_file(tmp_path)
    code, _, err = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                           "--which", "joint", "--enum-cap", "1")
    assert code == 3

    code, out, err = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                             "--which", "joint", "sum", "--verify",
                             "--check-tol=-1")
    assert code == 4
    assert "check failed:" in err
    assert report_from(out)["checks"]

    # Without --verify the failed check is reported but the exit code stays 0.
    code, out, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                           "--which", "joint", "sum", "--check-tol=-1")
    assert code == 0
    assert not all(c["passed"] for c in report_from(out)["checks"])


def test_cli_out_and_workdir(tmp_path, capsys, monkeypatch):
    path = one_input_file(tmp_path)
    out_path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                           "--which", "joint", "--out", str(out_path))
    assert code == 0
    assert out == ""
    assert report_from(out_path.read_text())["quantities"]["S"] == pytest.approx(0.25)

    workdir = tmp_path / "runs"
    workdir.mkdir()
    monkeypatch.setenv("BCC_WORKDIR", str(workdir))
    code, _, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                         "--which", "joint", "--out", "nested.json")
    assert code == 0
    assert (workdir / "nested.json").exists()


def test_cli_reports_are_deterministic(tmp_path, capsys):
    path = perfect_file(tmp_path)
    argv = ("solve", str(path), "--k1", "2", "--k2", "2")
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert first == second


def test_cli_tensor_matches_solve(tmp_path, capsys):
    w = random_channel(2, 2, 2, seed=21)
    path = write_channel(tmp_path, w)
    _, solve_out, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                              "--which", "joint", "sum")
    _, tensor_out, _ = run_cli(capsys, "tensor", str(path), "--n", "1",
                               "--k1", "2", "--k2", "2", "--which", "joint", "sum")
    solve_q = report_from(solve_out)["quantities"]
    tensor_q = report_from(tensor_out)["quantities"]
    assert tensor_q["S"] == pytest.approx(solve_q["S"])
    assert tensor_q["S_sum"] == pytest.approx(solve_q["S_sum"])

    code, _, _ = run_cli(capsys, "tensor", str(path), "--n", "9",
                         "--k1", "2", "--k2", "2", "--entry-cap", "1000")
    assert code == 3


def test_cli_lp_export(tmp_path, capsys):
    path = one_input_file(tmp_path)
    lp_path = tmp_path / "program.lp"
    code, _, _ = run_cli(capsys, "solve", str(path), "--k1", "2", "--k2", "2",
                         "--which", "ns", "--lp-export", str(lp_path))
    assert code == 0
    text = lp_path.read_text()
    assert text.startswith("Maximize")
    assert "r_x0_a0_b0" in text
    assert text.rstrip().endswith("End")


def test_cli_approx_requires_deterministic(tmp_path, capsys):
    noisy = write_channel(tmp_path, random_channel(3, 2, 2, seed=2), "noisy.json")
    code, _, err = run_cli(capsys, "approx", str(noisy), "--k1", "2", "--k2", "2")
    assert code == 2
    assert "deterministic" in err

    path = perfect_file(tmp_path)
    code, out, _ = run_cli(capsys, "approx", str(path), "--k1", "2", "--k2", "2")
    assert code == 0
    report = report_from(out)
    assert report["quantities"]["approx_value"] <= report["quantities"]["upper_bound"]
    assert all(c["passed"] for c in report["checks"])
    assert report["quantities"]["S_approx"] == pytest.approx(
        report["quantities"]["approx_value"] / 4)


def test_cli_hardness_with_log(tmp_path, capsys):
    log_path = tmp_path / "queries.jsonl"
    code, out, _ = run_cli(capsys, "hardness", "--k1", "3", "--strategy",
                           "singleton", "--budget", "5", "--log", str(log_path))
    assert code == 0
    report = report_from(out)
    assert report["quantities"]["planted_welfare"] == pytest.approx(9.0)
    assert report["quantities"]["distinguished_at"] is None
    assert len(report["witnesses"]["blocks"]) == 3
    names = [c["name"] for c in report["checks"]]
    assert "planted_welfare_closed_form" in names
    assert "planted_rows_normalized" in names
    assert "flat_rows_normalized" in names
    lines = log_path.read_text().splitlines()
    assert len(lines) == 5
    for index, line in enumerate(lines):
        entry = json.loads(line)
        assert entry["index"] == index
        assert entry["subset"] == [index % 9]
        assert entry["distinguished"] is False


def test_cli_hardness_strategies(capsys):
    for strategy in ("random", "bisect"):
        code, out, _ = run_cli(capsys, "hardness", "--k1", "2", "--strategy",
                               strategy, "--budget", "4")
        assert code == 0
        report = report_from(out)
        # delta defaults to 1/4, where the oracles provably coincide.
        assert report["quantities"]["distinguished_at"] is None
        assert report["quantities"]["queries_used"] == 4


def test_cli_help_via_subprocess():
    proc = subprocess.run([sys.executable, "-m", "bcc", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "solve" in proc.stdout
    assert "hardness" in proc.stdout
