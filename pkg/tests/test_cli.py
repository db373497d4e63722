import json

import pytest
from click.testing import CliRunner

from helpers import write_desk_fixture

from reactbench.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fixture_paths(tmp_path):
    return write_desk_fixture(tmp_path)


def test_transform(runner, tmp_path):
    in_path = tmp_path / "convs.jsonl"
    out_path = tmp_path / "train.jsonl"
    in_path.write_text(json.dumps({
        "id": "c1",
        "conversations": [
            {"from": "user", "value": "hi"},
            {"from": "assistant", "value": "hello"},
        ],
    }) + "\n")
    result = runner.invoke(main, ["transform", "--in", str(in_path),
                                  "--out", str(out_path)])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {
        "total": 1, "emitted": 1, "skipped": 0, "overlong": 0,
    }
    assert out_path.exists()


def test_transform_missing_input_is_io_error(runner, tmp_path):
    result = runner.invoke(main, ["transform", "--in", str(tmp_path / "nope.jsonl"),
                                  "--out", str(tmp_path / "out.jsonl")])
    assert result.exit_code == 2


def test_run_report_radar(runner, fixture_paths, tmp_path):
    out_dir = tmp_path / "run1"
    result = runner.invoke(main, [
        "run",
        "--suite", str(fixture_paths["suite"]),
        "--registry", str(fixture_paths["registry"]),
        "--backend", f"replay:{fixture_paths['replay']}",
        "--judge", "rule",
        "--workers", "4",
        "--seed", "7",
        "--out", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    assert "overall pass rate: 80.00%" in result.output

    result = runner.invoke(main, ["report", "--run", str(out_dir), "--format", "md"])
    assert result.exit_code == 0
    assert "| ToolLLaMA-DFS | 7B | 30.18% | -47.37% |" in result.output

    result = runner.invoke(main, ["report", "--run", str(out_dir), "--format", "json"])
    assert result.exit_code == 0
    assert round(json.loads(result.output)["overall"], 2) == 80.00

    radar_out = tmp_path / "radar.csv"
    result = runner.invoke(main, ["radar", "--runs", str(out_dir),
                                  "--include-baselines", "--out", str(radar_out)])
    assert result.exit_code == 0
    lines = radar_out.read_text().strip().splitlines()
    assert len(lines) == 1 + 6 * 6


def test_run_invalid_suite_is_validation_error(runner, fixture_paths, tmp_path):
    bad_suite = tmp_path / "bad_suite.json"
    doc = json.loads(fixture_paths["suite"].read_text())
    doc["categories"] = doc["categories"][:3]
    bad_suite.write_text(json.dumps(doc))
    result = runner.invoke(main, [
        "run", "--suite", str(bad_suite),
        "--registry", str(fixture_paths["registry"]),
        "--backend", f"replay:{fixture_paths['replay']}",
        "--out", str(tmp_path / "out"),
    ])
    assert result.exit_code == 1


def test_radar_with_nothing_is_validation_error(runner, tmp_path):
    result = runner.invoke(main, ["radar", "--out", str(tmp_path / "r.csv")])
    assert result.exit_code == 1
