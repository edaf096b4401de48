"""CLI subcommands, exit codes, and output formats."""

import json
import pathlib

import pytest

from citecheck.cli import main
from tests.conftest import DEMO_CONFIG, GOLDEN_CITATION, SAMPLE_DOC

DATA = pathlib.Path(__file__).parent / "data"


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def demo_args(tmp_path):
    return ["--config", str(DEMO_CONFIG), "--store-dir", str(tmp_path / "store")]


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--doc", "x.txt"])  # missing --citation
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_ingest_prints_doc_id(tmp_path, capsys):
    code, out, _ = run_cli(demo_args(tmp_path) + ["ingest", str(SAMPLE_DOC)], capsys)
    assert code == 0
    body = json.loads(out)
    assert body["doc_id"].startswith("doc-")
    assert body["format"] == "txt"


def test_ingest_missing_file_exits_1(tmp_path, capsys):
    code, _, err = run_cli(demo_args(tmp_path) + ["ingest", "/no/such/file.txt"], capsys)
    assert code == 1
    assert "error:" in err


def test_verify_json_output(tmp_path, capsys, golden_expected):
    code, out, _ = run_cli(
        demo_args(tmp_path)
        + ["verify", "--citation", GOLDEN_CITATION, "--doc", str(SAMPLE_DOC)],
        capsys,
    )
    assert code == 0
    record = json.loads(out)
    assert record["verification_id"] == golden_expected["verification_id"]
    assert record["result"]["label"] == "SUPPORTED"


def test_verify_md_output_matches_export(tmp_path, capsys):
    args = demo_args(tmp_path)
    vid = json.loads(
        run_cli(args + ["verify", "--citation", GOLDEN_CITATION, "--doc", str(SAMPLE_DOC)], capsys)[1]
    )["verification_id"]
    code, out, _ = run_cli(
        args + ["verify", "--citation", GOLDEN_CITATION, "--doc", str(SAMPLE_DOC), "--out", "md"],
        capsys,
    )
    assert code == 0
    assert out.startswith("# Citation Verification Report")
    assert "SUPPORTED (Fully Aligned)" in out

    # Exporting the stored id yields the bytes of the latest verify run.
    out_file = tmp_path / "report.md"
    code, _, _ = run_cli(args + ["export", "--id", vid, "--out", str(out_file)], capsys)
    assert code == 0
    assert out_file.read_text() == out


def test_verify_by_stored_doc_id(tmp_path, capsys):
    args = demo_args(tmp_path)
    doc_id = json.loads(run_cli(args + ["ingest", str(SAMPLE_DOC)], capsys)[1])["doc_id"]
    code, out, _ = run_cli(
        args + ["verify", "--citation", GOLDEN_CITATION, "--doc", doc_id], capsys
    )
    assert code == 0
    assert json.loads(out)["doc_id"] == doc_id


def test_evaluate_prints_committed_table(capsys):
    expected = (DATA / "eval_records_30_table.txt").read_text()
    code, out, _ = run_cli(["evaluate", "--records", str(DATA / "eval_records_30.jsonl")], capsys)
    assert code == 0
    assert out == expected


def test_evaluate_json_output(capsys):
    code, out, _ = run_cli(
        ["evaluate", "--records", str(DATA / "eval_records_30.jsonl"), "--out", "json"], capsys
    )
    assert code == 0
    report = json.loads(out)
    expected = json.loads((DATA / "eval_records_30_expected.json").read_text())
    assert report["standard_accuracy"] == pytest.approx(expected["standard_accuracy"], abs=1e-9)
    assert report["weighted_accuracy"] == pytest.approx(expected["weighted_accuracy"], abs=1e-9)


def test_evaluate_bad_records_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"true_label": "SUPPORTD", "pred_label": "SUPPORTED"}\n')
    code, _, err = run_cli(["evaluate", "--records", str(bad)], capsys)
    assert code == 1
    assert "line 1" in err


def test_export_unknown_id_exits_1(tmp_path, capsys):
    code, _, err = run_cli(
        demo_args(tmp_path) + ["export", "--id", "ver-nope", "--out", str(tmp_path / "x.md")],
        capsys,
    )
    assert code == 1
    assert "ver-nope" in err
