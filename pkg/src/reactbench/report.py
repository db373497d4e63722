"""Run reports, baseline fixtures, and table/radar emission.

Baseline category rates ship as a static fixture (they come from external
models and are never recomputed here); overall rates and gap columns are
derived from them through the same aggregation ops used for live runs.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from importlib import resources

from .agent import CATEGORIES, FULL_SUITE_COUNTS
from .evaluate import CategoryStats, aggregate_pass_rate, gap_vs


@dataclass
class BaselineModel:
    name: str
    params: str
    rates: dict[str, float]  # category -> pass rate percent

    def overall(self, counts: dict[str, int] | None = None) -> float:
        """Weighted overall rate at full-suite query counts, 2 decimals."""
        weights = counts or dict(zip(CATEGORIES, FULL_SUITE_COUNTS))
        per_cat = {c: (self.rates[c], weights[c]) for c in CATEGORIES}
        return round(aggregate_pass_rate(per_cat), 2)


@dataclass
class BaselineTable:
    reference: str
    models: dict[str, BaselineModel]

    def gaps(self) -> dict[str, float]:
        """Gap of every non-reference model vs the reference, Table-1 style."""
        ref = self.models[self.reference].overall()
        return {
            name: gap_vs(model.overall(), ref)
            for name, model in self.models.items()
            if name != self.reference
        }


def load_baselines(path: str | None = None) -> BaselineTable:
    if path is None:
        doc = json.loads(
            resources.files("reactbench.data").joinpath("baselines.json").read_text()
        )
    else:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    return BaselineTable(
        reference=doc["reference"],
        models={
            name: BaselineModel(name=name, params=m["params"], rates=dict(m["rates"]))
            for name, m in doc["models"].items()
        },
    )


@dataclass
class RunReport:
    label: str
    per_category: list[CategoryStats]
    overall: float
    gaps: dict[str, float]  # named baseline -> signed pp gap of this run vs it
    seed: int = 0
    backend_id: str = ""
    judge_mode: str = "rule"

    def category_rates(self) -> dict[str, float]:
        return {s.category: s.pass_rate for s in self.per_category}

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "per_category": [asdict(s) for s in self.per_category],
            "overall": self.overall,
            "gaps": self.gaps,
            "seed": self.seed,
            "backend_id": self.backend_id,
            "judge_mode": self.judge_mode,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        return cls(
            label=doc["label"],
            per_category=[CategoryStats(**s) for s in doc["per_category"]],
            overall=doc["overall"],
            gaps=dict(doc["gaps"]),
            seed=doc["seed"],
            backend_id=doc["backend_id"],
            judge_mode=doc["judge_mode"],
        )


def _fmt_gap(gap: float) -> str:
    return f"{gap:+.2f}%"


def emit_report(
    report: RunReport,
    fmt: str = "markdown",
    baselines: BaselineTable | None = None,
) -> str:
    """Render a run report as markdown tables, long-format CSV, or JSON."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)

    baselines = baselines or load_baselines()
    ref_overall = baselines.models[baselines.reference].overall()
    baseline_gaps = baselines.gaps()

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["model", "category", "pass_rate"])
        for stats in report.per_category:
            writer.writerow([report.label, stats.category, f"{stats.pass_rate:.1f}"])
        for name, model in baselines.models.items():
            for cat in CATEGORIES:
                writer.writerow([name, cat, f"{model.rates[cat]:.1f}"])
        return buf.getvalue()

    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")

    run_overall = round(report.overall, 2)
    lines = [
        f"# Benchmark report: {report.label}",
        "",
        "## Overall Performance Comparison",
        "",
        "| Model | Params | Pass Rate | Gap |",
        "|---|---|---|---|",
        f"| {report.label} | - | {run_overall:.2f}% | "
        f"{_fmt_gap(gap_vs(run_overall, ref_overall))} |",
    ]
    ordered = sorted(baselines.models.values(), key=lambda m: -m.overall())
    for model in ordered:
        gap = "--" if model.name == baselines.reference \
            else _fmt_gap(baseline_gaps[model.name])
        lines.append(f"| {model.name} | {model.params} | {model.overall():.2f}% | {gap} |")

    names = [m.name for m in ordered]
    lines += [
        "",
        "## Performance by Test Category",
        "",
        "| Category | " + " | ".join([report.label] + names) + " |",
        "|" + "---|" * (len(names) + 2),
    ]
    run_rates = report.category_rates()
    for cat in CATEGORIES:
        row = [f"{run_rates[cat]:.1f}"] + [
            f"{baselines.models[n].rates[cat]:.1f}" for n in names
        ]
        lines.append(f"| {cat} | " + " | ".join(row) + " |")
    avg_row = [f"{run_overall:.1f}"] + [f"{baselines.models[n].overall():.1f}" for n in names]
    lines.append("| Avg | " + " | ".join(avg_row) + " |")

    lines += [
        "",
        "## Category detail (95% Wilson intervals)",
        "",
        "| Category | n | pass | Pass Rate | CI low | CI high |",
        "|---|---|---|---|---|---|",
    ]
    for stats in report.per_category:
        lines.append(
            f"| {stats.category} | {stats.n_queries} | {stats.n_pass} | "
            f"{stats.pass_rate:.1f} | {stats.ci_low:.1f} | {stats.ci_high:.1f} |"
        )
    lines.append("")
    return "\n".join(lines)


def emit_radar_data(entries: list[tuple[str, dict[str, float]]]) -> str:
    """Long-format (model, category, rate) CSV for external plotting tools."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["model", "category", "pass_rate"])
    for model, rates in entries:
        missing = [c for c in CATEGORIES if c not in rates]
        if missing:
            raise ValueError(f"model {model!r} lacks categories: {missing}")
        for cat in CATEGORIES:
            writer.writerow([model, cat, f"{rates[cat]:.1f}"])
    return buf.getvalue()


def baseline_radar_entries(
    baselines: BaselineTable | None = None,
) -> list[tuple[str, dict[str, float]]]:
    baselines = baselines or load_baselines()
    return [(name, dict(m.rates)) for name, m in baselines.models.items()]
