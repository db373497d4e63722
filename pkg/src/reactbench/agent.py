"""ReAct control loop: prompt, generate, parse, dispatch, repeat.

Every failure mode ends up encoded in the returned SolutionPath status;
run_query never raises for model- or tool-side problems.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .gateway import DEFAULT_SYSTEM_PROMPT, GatewayError, GenerationParams, build_prompt
from .toolbox import ToolRegistry, dispatch
from .trace import PathStatus, ReActStep, SolutionPath, StepParseError, parse_step

logger = logging.getLogger(__name__)

CATEGORIES = (
    "G1_instruction",
    "G1_category",
    "G1_tool",
    "G2_instruction",
    "G2_category",
    "G3_instruction",
)

# Query counts per category for the full-scale suite, in CATEGORIES order.
FULL_SUITE_COUNTS = (200, 200, 200, 200, 200, 100)


@dataclass
class AgentConfig:
    max_iterations: int = 10
    params: GenerationParams = field(default_factory=GenerationParams)
    parse_retry_limit: int = 1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class BenchmarkQuery:
    id: str
    category: str
    instruction: str
    relevant_tools: list[str] = field(default_factory=list)
    # Answer key for the deterministic rule judge (desk-scale fixtures).
    expected_tools: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


def run_query(
    query: BenchmarkQuery,
    registry: ToolRegistry,
    backend,
    config: AgentConfig | None = None,
    system_prompt: str = DEFAULT_SYSTEM_PROMPT,
    trace_log: list[dict] | None = None,
) -> SolutionPath:
    """Run the agent loop for one query and return its solution path.

    One iteration = one (retryable) generate call; every parsed non-Finish
    step consumes one API-call unit regardless of dispatch outcome, so the
    iteration cap doubles as the call budget.
    """
    config = config or AgentConfig()
    steps: list[ReActStep] = []
    status = PathStatus.BUDGET_EXHAUSTED
    final_answer: str | None = None

    def log(iteration: int, raw: str, parsed: ReActStep | None) -> None:
        if trace_log is None:
            return
        obs = parsed.observation if parsed is not None else None
        trace_log.append({
            "query_id": query.id,
            "iteration": iteration,
            "prompt_chars": len(prompt),
            "raw_completion": raw,
            "parsed": parsed is not None,
            "action": parsed.action if parsed is not None else None,
            "observation_excerpt": obs[:120] if obs is not None else None,
        })

    for iteration in range(1, config.max_iterations + 1):
        prompt = build_prompt(system_prompt, query.instruction, steps, registry)

        step: ReActStep | None = None
        backend_failed = False
        for _attempt in range(config.parse_retry_limit + 1):
            try:
                completion = backend.generate(prompt, config.params)
            except GatewayError as exc:
                logger.warning("query %s: backend failure: %s", query.id, exc)
                backend_failed = True
                break
            if completion.finish_reason == "backend_error":
                logger.warning("query %s: backend_error completion", query.id)
                backend_failed = True
                break
            try:
                step = parse_step(completion.text)
                break
            except StepParseError as exc:
                logger.debug("query %s it %d: unparseable: %s", query.id, iteration, exc)
                log(iteration, completion.text, None)

        if backend_failed:
            status = PathStatus.BUDGET_EXHAUSTED
            break
        if step is None:
            # Nothing parseable even after retrying within this iteration.
            status = PathStatus.PARSE_FAILURE if not steps else PathStatus.BUDGET_EXHAUSTED
            break

        steps.append(step)
        if step.is_finish:
            payload = step.finish_payload()
            log(iteration, completion.text, step)
            if payload["return_type"] == "give_answer":
                status = PathStatus.FINISHED_WITH_ANSWER
                final_answer = str(payload.get("final_answer", ""))
            else:
                status = PathStatus.GAVE_UP
            break

        calls_before = sum(1 for s in steps[:-1] if not s.is_finish)
        result = dispatch(registry, step, config.max_iterations - calls_before)
        step.observation = result.text
        log(iteration, completion.text, step)

    path = SolutionPath(
        query_id=query.id,
        steps=steps,
        status=status,
        final_answer=final_answer,
        api_calls_used=sum(1 for s in steps if not s.is_finish),
    )
    path.validate(config.max_iterations)
    return path
