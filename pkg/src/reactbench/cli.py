"""Command-line interface: transform, run, report, radar.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .agent import AgentConfig
from .dataset import DEFAULT_DELIMITERS, transform_file
from .evaluate import GenerationParams, model_judge_pass, rule_judge_pass
from .gateway import HttpBackend, ReplayBackend, load_replay_scripts
from .report import RunReport, baseline_radar_entries, emit_radar_data, emit_report
from .runner import DEFAULT_WORKERS, load_suite, run_suite
from .toolbox import load_registry

EXIT_VALIDATION = 1
EXIT_IO = 2


def _exit_codes(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except OSError as exc:
            click.echo(f"I/O error: {exc}", err=True)
            sys.exit(EXIT_IO)
        except (ValueError, KeyError) as exc:
            click.echo(f"validation error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
    return wrapper


@click.group()
def main():
    """Tool-calling agent benchmark harness."""


@main.command()
@click.option("--in", "in_path", required=True, help="Input conversations JSONL.")
@click.option("--out", "out_path", required=True, help="Output training JSONL.")
@click.option("--delimiters", "delimiters_path", default=None,
              help="Optional JSON file mapping roles to delimiter tags.")
@_exit_codes
def transform(in_path, out_path, delimiters_path):
    """Transform multi-turn conversations into SFT training sequences."""
    delimiters = DEFAULT_DELIMITERS
    if delimiters_path:
        with open(delimiters_path, encoding="utf-8") as f:
            delimiters = json.load(f)
    summary = transform_file(in_path, out_path, delimiters)
    click.echo(json.dumps({
        "total": summary.total,
        "emitted": summary.emitted,
        "skipped": summary.skipped,
        "overlong": summary.overlong,
    }))


@main.command()
@click.option("--suite", "suite_path", required=True)
@click.option("--registry", "registry_path", required=True)
@click.option("--backend", "backend_spec", required=True,
              help="Model backend: an HTTP URL or replay:<script file>.")
@click.option("--judge", "judge_spec", default="rule",
              help="Judge: 'rule' or an HTTP judge URL.")
@click.option("--workers", default=DEFAULT_WORKERS, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-iterations", default=10, show_default=True)
@click.option("--out", "out_dir", required=True, help="Run output directory.")
@_exit_codes
def run(suite_path, registry_path, backend_spec, judge_spec, workers, seed,
        max_iterations, out_dir):
    """Run a benchmark suite and persist report, traces, and verdicts."""
    suite = load_suite(suite_path)
    registry = load_registry(registry_path)
    config = AgentConfig(max_iterations=max_iterations)

    if backend_spec.startswith("replay:"):
        scripts = load_replay_scripts(backend_spec.removeprefix("replay:"))
        backend_factory = lambda qid: ReplayBackend(scripts.get(qid, []), name=qid)  # noqa: E731
    else:
        shared = HttpBackend(backend_spec)
        backend_factory = lambda qid: shared  # noqa: E731

    if judge_spec == "rule":
        judge_fn, judge_mode = rule_judge_pass, "rule"
    else:
        judge_backend = HttpBackend(judge_spec)
        judge_fn = lambda path, query: model_judge_pass(  # noqa: E731
            path, query, judge_backend, GenerationParams()
        )
        judge_mode = "model"

    artifacts = run_suite(
        suite, registry, backend_factory,
        config=config, judge_fn=judge_fn, workers=workers, seed=seed,
        out_dir=out_dir, backend_id=backend_spec, judge_mode=judge_mode,
    )
    click.echo(f"overall pass rate: {artifacts.report.overall:.2f}% "
               f"({len(artifacts.paths)} queries) -> {out_dir}")


@main.command()
@click.option("--run", "run_dir", required=True, help="Run output directory.")
@click.option("--format", "fmt", default="md",
              type=click.Choice(["md", "csv", "json"]), show_default=True)
@_exit_codes
def report(run_dir, fmt):
    """Render the report for a completed run."""
    doc = json.loads((Path(run_dir) / "report.json").read_text())
    run_report = RunReport.from_dict(doc)
    fmt_name = {"md": "markdown", "csv": "csv", "json": "json"}[fmt]
    click.echo(emit_report(run_report, fmt_name), nl=False)
    click.echo()


@main.command()
@click.option("--runs", "run_dirs", multiple=True, help="Run output directories.")
@click.option("--out", "out_path", required=True, help="Output CSV path.")
@click.option("--include-baselines", is_flag=True, default=False,
              help="Also emit rows for the bundled baseline models.")
@_exit_codes
def radar(run_dirs, out_path, include_baselines):
    """Emit long-format (model, category, rate) CSV for radar plotting."""
    entries = []
    for run_dir in run_dirs:
        doc = json.loads((Path(run_dir) / "report.json").read_text())
        run_report = RunReport.from_dict(doc)
        entries.append((run_report.label, run_report.category_rates()))
    if include_baselines:
        entries.extend(baseline_radar_entries())
    if not entries:
        raise ValueError("nothing to emit: pass --runs and/or --include-baselines")
    Path(out_path).write_text(emit_radar_data(entries))
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
