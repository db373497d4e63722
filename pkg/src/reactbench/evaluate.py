"""Scoring: pass judging, majority voting, category aggregation, win rates.

Two judge modes exist for both pass and pairwise judging: a deterministic
rule judge (the acceptance oracle) and a model judge driven through a
completion backend. The rule judge is the default everywhere.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Callable, Mapping

from .agent import CATEGORIES, BenchmarkQuery
from .gateway import GenerationParams
from .toolbox import BUDGET_EXCEEDED_TEXT, TOOL_ERROR_PREFIX
from .trace import PathStatus, SolutionPath, render_step

logger = logging.getLogger(__name__)

WILSON_Z = 1.959964

RUBRIC_CRITERIA = (
    "information richness",
    "factual accuracy",
    "reasoning quality",
    "milestone achievement",
    "API exploration efficiency",
    "cost-effectiveness",
)


class MissingCategory(ValueError):
    pass


class JudgeUnparseable(ValueError):
    pass


@dataclass
class JudgeRubric:
    criteria: tuple[str, ...] = RUBRIC_CRITERIA

    def __post_init__(self):
        if sorted(self.criteria) != sorted(RUBRIC_CRITERIA):
            raise ValueError("rubric must contain exactly the six named criteria")


@dataclass
class VotePolicy:
    min_rounds: int = 5
    max_rounds: int = 7

    def __post_init__(self):
        if not 1 <= self.min_rounds <= self.max_rounds:
            raise ValueError("need 1 <= min_rounds <= max_rounds")


@dataclass
class Verdict:
    query_id: str
    votes: list[bool]  # True = pass
    decision: str  # "pass" | "fail"
    rounds_used: int


def majority_vote(
    round_results: list[bool],
    policy: VotePolicy = VotePolicy(),
    query_id: str = "",
) -> Verdict:
    """Strict-majority fold over all supplied rounds; an unresolved tie fails."""
    if len(round_results) < policy.min_rounds:
        raise ValueError(
            f"need at least {policy.min_rounds} rounds, got {len(round_results)}"
        )
    passes = sum(round_results)
    fails = len(round_results) - passes
    return Verdict(
        query_id=query_id,
        votes=list(round_results),
        decision="pass" if passes > fails else "fail",
        rounds_used=len(round_results),
    )


def collect_verdict(
    query_id: str,
    judge_round: Callable[[], bool],
    policy: VotePolicy = VotePolicy(),
) -> Verdict:
    """Run judge rounds: min_rounds up front, extra rounds only on a tie."""
    votes = [judge_round() for _ in range(policy.min_rounds)]
    while sum(votes) * 2 == len(votes) and len(votes) < policy.max_rounds:
        votes.append(judge_round())
    return majority_vote(votes, policy, query_id=query_id)


def _successful_actions(path: SolutionPath) -> set[str]:
    ok = set()
    for step in path.steps:
        if step.is_finish or step.observation is None:
            continue
        if step.observation.startswith(TOOL_ERROR_PREFIX):
            continue
        if step.observation == BUDGET_EXCEEDED_TEXT:
            continue
        ok.add(step.action)
    return ok


def rule_judge_pass(path: SolutionPath, query: BenchmarkQuery) -> bool:
    """Deterministic pass criterion: finished with a non-empty answer and
    every expected tool successfully dispatched along the way."""
    if path.status != PathStatus.FINISHED_WITH_ANSWER:
        return False
    if not (path.final_answer or "").strip():
        return False
    dispatched = _successful_actions(path)
    return all(tool in dispatched for tool in query.expected_tools)


def render_path(path: SolutionPath) -> str:
    text = "\n".join(render_step(s) for s in path.steps)
    return f"{text}\nStatus: {path.status}\nFinal answer: {path.final_answer or ''}"


_PASS_JUDGE_PROMPT = """You are grading a tool-using agent.

Instruction:
{instruction}

Solution path:
{path}

Did the solution path adequately address the instruction? Reply with a single
token: PASS or FAIL."""


def model_judge_pass(
    path: SolutionPath,
    query: BenchmarkQuery,
    judge_backend,
    params: GenerationParams | None = None,
) -> bool:
    """One judging round through a completion backend.

    An unparseable judgement counts as a fail vote (logged), so voting
    never stalls on a flaky judge.
    """
    prompt = _PASS_JUDGE_PROMPT.format(
        instruction=query.instruction, path=render_path(path)
    )
    completion = judge_backend.generate(prompt, params or GenerationParams())
    tokens = completion.text.upper().split()
    if "PASS" in tokens and "FAIL" not in tokens:
        return True
    if "FAIL" in tokens and "PASS" not in tokens:
        return False
    logger.warning("query %s: judge emitted neither PASS nor FAIL; counting as fail",
                   query.id)
    return False


def wilson_interval(n_pass: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval for a pass percentage, in [0, 100]."""
    if not 0 <= n_pass <= n or n < 1:
        raise ValueError("need 0 <= n_pass <= n and n >= 1")
    p = n_pass / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    halfwidth = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    low = 0.0 if n_pass == 0 else max(0.0, (center - halfwidth) * 100)
    high = 100.0 if n_pass == n else min(100.0, (center + halfwidth) * 100)
    return low, high


@dataclass
class CategoryStats:
    category: str
    n_queries: int
    n_pass: int
    pass_rate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, category: str, n_pass: int, n_queries: int) -> "CategoryStats":
        low, high = wilson_interval(n_pass, n_queries)
        return cls(
            category=category,
            n_queries=n_queries,
            n_pass=n_pass,
            pass_rate=100.0 * n_pass / n_queries,
            ci_low=low,
            ci_high=high,
        )


def aggregate_pass_rate(per_category: Mapping[str, tuple[float, int]]) -> float:
    """Query-count-weighted mean pass rate over the six categories.

    per_category maps category -> (pass_rate_percent, n_queries).
    """
    missing = [c for c in CATEGORIES if c not in per_category]
    if missing:
        raise MissingCategory(f"missing categories: {missing}")
    total = sum(n for _, n in per_category.values())
    if total == 0:
        raise ValueError("no queries in any category")
    return sum(rate * n for rate, n in per_category.values()) / total


def gap_vs(model_rate: float, reference_rate: float) -> float:
    """Signed percentage-point gap, rendered at two decimals."""
    if not (0 <= model_rate <= 100 and 0 <= reference_rate <= 100):
        raise ValueError("rates must be percentages in [0, 100]")
    return round(model_rate - reference_rate, 2)


@dataclass
class WinRateComparison:
    model_a: str
    model_b: str
    wins_a: int = 0
    wins_b: int = 0
    ties: int = 0

    @property
    def total(self) -> int:
        return self.wins_a + self.wins_b + self.ties

    @property
    def win_rate_a(self) -> float:
        """Ties count as half wins."""
        if self.total == 0:
            raise ValueError("no comparisons recorded")
        return 100.0 * (self.wins_a + 0.5 * self.ties) / self.total

    def record(self, winner: str) -> None:
        if winner == "a":
            self.wins_a += 1
        elif winner == "b":
            self.wins_b += 1
        elif winner == "tie":
            self.ties += 1
        else:
            raise ValueError(f"unknown winner {winner!r}")


def rule_compare(
    path_a: SolutionPath,
    path_b: SolutionPath,
    query: BenchmarkQuery,
) -> str:
    """Deterministic pairwise judge: pass beats fail, then fewer API calls."""
    pass_a = rule_judge_pass(path_a, query)
    pass_b = rule_judge_pass(path_b, query)
    if pass_a != pass_b:
        return "a" if pass_a else "b"
    if path_a.api_calls_used != path_b.api_calls_used:
        return "a" if path_a.api_calls_used < path_b.api_calls_used else "b"
    return "tie"


_COMPARE_PROMPT = """You are comparing two tool-using agents on the same instruction.
Judge them on: {criteria}.

Instruction:
{instruction}

Solution path A:
{path_a}

Solution path B:
{path_b}

Which solution is better overall? Reply with a single token: A, B, or TIE."""


def model_compare(
    path_a: SolutionPath,
    path_b: SolutionPath,
    query: BenchmarkQuery,
    judge_backend,
    rubric: JudgeRubric | None = None,
    seed: int = 0,
    params: GenerationParams | None = None,
) -> str:
    """Pairwise model judge; presentation order is shuffled by seed to
    neutralize position bias, and the seed is the caller's to log."""
    rubric = rubric or JudgeRubric()
    swapped = random.Random(seed).random() < 0.5
    first, second = (path_b, path_a) if swapped else (path_a, path_b)
    prompt = _COMPARE_PROMPT.format(
        criteria=", ".join(rubric.criteria),
        instruction=query.instruction,
        path_a=render_path(first),
        path_b=render_path(second),
    )
    completion = judge_backend.generate(prompt, params or GenerationParams())
    tokens = completion.text.upper().split()
    picks = [t for t in ("A", "B", "TIE") if t in tokens]
    if len(picks) != 1:
        logger.warning("query %s: pairwise judge unparseable; counting as tie", query.id)
        return "tie"
    if picks[0] == "TIE":
        return "tie"
    chose_first = picks[0] == "A"
    return ("b" if chose_first else "a") if swapped else ("a" if chose_first else "b")
