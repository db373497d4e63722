"""Suite orchestration: fan queries across workers, judge, persist, report.

With a replay backend the whole pipeline is deterministic: results are
collected per query and then folded in suite order, so the emitted report is
byte-identical regardless of worker count.
"""
from __future__ import annotations

import json
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .agent import CATEGORIES, AgentConfig, BenchmarkQuery, run_query
from .evaluate import (
    CategoryStats,
    Verdict,
    VotePolicy,
    aggregate_pass_rate,
    collect_verdict,
    gap_vs,
    rule_judge_pass,
)
from .report import BaselineTable, RunReport, load_baselines
from .toolbox import ToolRegistry
from .trace import PathStatus, SolutionPath

logger = logging.getLogger(__name__)

DEFAULT_WORKERS = 4


class SuiteError(ValueError):
    pass


@dataclass
class BenchmarkSuite:
    label: str
    categories: dict[str, list[BenchmarkQuery]]

    def queries(self) -> list[BenchmarkQuery]:
        return [q for cat in CATEGORIES for q in self.categories.get(cat, [])]

    def validate(self, registry: ToolRegistry | None = None) -> None:
        missing = [c for c in CATEGORIES if c not in self.categories]
        if missing:
            raise SuiteError(f"suite lacks categories: {missing}")
        empty = [c for c, qs in self.categories.items() if not qs]
        if empty:
            raise SuiteError(f"empty categories: {empty}")
        ids = [q.id for q in self.queries()]
        if len(ids) != len(set(ids)):
            raise SuiteError("duplicate query ids in suite")
        if registry is not None:
            for q in self.queries():
                unresolved = [t for t in q.relevant_tools if t not in registry]
                if unresolved:
                    raise SuiteError(
                        f"query {q.id}: unresolved tools {unresolved}"
                    )


def load_suite(source: dict | str) -> BenchmarkSuite:
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            doc = json.load(f)
    else:
        doc = source
    categories: dict[str, list[BenchmarkQuery]] = {}
    for cat in doc.get("categories", []):
        queries = [
            BenchmarkQuery(
                id=str(q["id"]),
                category=cat["category"],
                instruction=q["instruction"],
                relevant_tools=list(q.get("relevant_tools", [])),
                expected_tools=list(q.get("expected_tools", [])),
            )
            for q in cat.get("queries", [])
        ]
        categories[cat["category"]] = queries
    return BenchmarkSuite(label=doc.get("label", "run"), categories=categories)


def derive_query_seed(run_seed: int, query_id: str) -> int:
    """Stable per-query seed for judge presentation-order randomization."""
    return zlib.crc32(f"{run_seed}:{query_id}".encode()) & 0xFFFFFFFF


@dataclass
class RunArtifacts:
    report: RunReport
    paths: dict[str, SolutionPath]
    verdicts: list[Verdict]
    traces: dict[str, list[dict]] = field(default_factory=dict)


def run_suite(
    suite: BenchmarkSuite,
    registry: ToolRegistry,
    backend_factory: Callable[[str], object],
    config: AgentConfig | None = None,
    judge_fn: Callable[[SolutionPath, BenchmarkQuery], bool] = rule_judge_pass,
    policy: VotePolicy | None = None,
    workers: int = DEFAULT_WORKERS,
    seed: int = 0,
    out_dir: str | None = None,
    backend_id: str = "replay",
    judge_mode: str = "rule",
    baselines: BaselineTable | None = None,
) -> RunArtifacts:
    """Execute every query exactly once, judge every path, emit the report.

    Per-query failures (including exhausted or missing replay scripts) become
    fail verdicts; only I/O failures while persisting logs can abort.
    """
    suite.validate(registry)
    config = config or AgentConfig()
    policy = policy or VotePolicy()
    queries = suite.queries()

    def work(query: BenchmarkQuery) -> tuple[SolutionPath, list[dict]]:
        trace: list[dict] = []
        try:
            path = run_query(
                query, registry, backend_factory(query.id), config, trace_log=trace
            )
        except Exception:
            logger.exception("query %s failed; recording an empty path", query.id)
            path = SolutionPath(query_id=query.id, status=PathStatus.BUDGET_EXHAUSTED)
        return path, trace

    if workers <= 1:
        results = {q.id: work(q) for q in queries}
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {q.id: pool.submit(work, q) for q in queries}
            results = {qid: fut.result() for qid, fut in futures.items()}

    # Single-writer fold in suite order, independent of completion order.
    paths = {qid: path for qid, (path, _) in results.items()}
    traces = {qid: trace for qid, (_, trace) in results.items()}
    verdicts = [
        collect_verdict(q.id, lambda q=q: judge_fn(paths[q.id], q), policy)
        for q in queries
    ]
    decision = {v.query_id: v.decision for v in verdicts}

    stats = []
    for cat in CATEGORIES:
        cat_queries = suite.categories[cat]
        n_pass = sum(1 for q in cat_queries if decision[q.id] == "pass")
        stats.append(CategoryStats.from_counts(cat, n_pass, len(cat_queries)))

    overall = aggregate_pass_rate({s.category: (s.pass_rate, s.n_queries) for s in stats})
    baselines = baselines or load_baselines()
    gaps = {
        name: gap_vs(round(overall, 2), model.overall())
        for name, model in baselines.models.items()
    }
    report = RunReport(
        label=suite.label,
        per_category=stats,
        overall=overall,
        gaps=gaps,
        seed=seed,
        backend_id=backend_id,
        judge_mode=judge_mode,
    )
    artifacts = RunArtifacts(report=report, paths=paths, verdicts=verdicts, traces=traces)
    if out_dir is not None:
        persist_run(artifacts, suite, out_dir, workers=workers)
    return artifacts


def persist_run(
    artifacts: RunArtifacts,
    suite: BenchmarkSuite,
    out_dir: str,
    workers: int = DEFAULT_WORKERS,
) -> None:
    """Write report.json plus append-only trace/verdict logs, suite order.

    Volatile run facts (worker count) go to run_meta.json, not the report,
    so report bytes stay comparable across worker counts.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(artifacts.report.to_dict(), indent=2) + "\n"
    )
    with open(out / "traces.jsonl", "w", encoding="utf-8") as f:
        for q in suite.queries():
            for entry in artifacts.traces.get(q.id, []):
                f.write(json.dumps(entry) + "\n")
        f.flush()
    category = {q.id: q.category for q in suite.queries()}
    with open(out / "verdicts.jsonl", "w", encoding="utf-8") as f:
        for v in artifacts.verdicts:
            f.write(json.dumps({
                "query_id": v.query_id,
                "category": category[v.query_id],
                "votes": ["pass" if vote else "fail" for vote in v.votes],
                "decision": v.decision,
                "judge_mode": artifacts.report.judge_mode,
            }) + "\n")
        f.flush()
    (out / "run_meta.json").write_text(json.dumps({
        "workers": workers,
        "seed": artifacts.report.seed,
        "backend_id": artifacts.report.backend_id,
        "judge_mode": artifacts.report.judge_mode,
        "n_queries": len(artifacts.paths),
    }, indent=2) + "\n")
