"""Thought/Action/Action Input trace format: parsing and rendering.

The canonical text form of a step is:

    Thought: {thought}
    Action: {action}
    Action Input: {action_input}
    Observation: {observation}        (only when an observation is attached)

Labels are matched at line starts, case-sensitive. This exact format is
used in replay files and audit logs and must stay bit-stable.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

FINISH_ACTION = "Finish"
RETURN_TYPES = ("give_answer", "give_up_and_restart")

_LABEL_RE = re.compile(r"^(Action Input|Thought|Action|Observation):", re.MULTILINE)


class StepParseError(ValueError):
    """A completion could not be parsed into a step."""


class MissingAction(StepParseError):
    pass


class MissingActionInput(StepParseError):
    pass


class InvalidFinishPayload(StepParseError):
    """Finish action whose input is not the expected terminal JSON."""


class TraceParseError(ValueError):
    def __init__(self, index: int, cause: StepParseError):
        super().__init__(f"step {index}: {cause}")
        self.index = index
        self.cause = cause


@dataclass
class ReActStep:
    thought: str
    action: str
    action_input: str
    observation: str | None = None

    def __post_init__(self):
        if not self.action:
            raise MissingAction("action is empty")
        if "\n" in self.action:
            raise MissingAction("action contains a newline")
        if self.action == FINISH_ACTION:
            # The terminal step must carry a well-formed payload; anything
            # else is treated as a failed parse by the agent loop.
            try:
                payload = json.loads(self.action_input)
            except (json.JSONDecodeError, TypeError) as exc:
                raise InvalidFinishPayload(f"Finish input is not JSON: {exc}") from exc
            if not isinstance(payload, dict) or "return_type" not in payload:
                raise InvalidFinishPayload("Finish input lacks a return_type field")
            if payload["return_type"] not in RETURN_TYPES:
                raise InvalidFinishPayload(
                    f"unknown return_type {payload['return_type']!r}"
                )

    @property
    def is_finish(self) -> bool:
        return self.action == FINISH_ACTION

    def finish_payload(self) -> dict:
        """Parsed terminal payload. Only valid on Finish steps."""
        if not self.is_finish:
            raise ValueError("not a Finish step")
        return json.loads(self.action_input)


def parse_step(text: str) -> ReActStep:
    """Parse the first Thought/Action/Action Input block out of raw text.

    The thought section is optional. Action Input runs to the next
    "Observation:" or "Thought:" label (or end of text); a trailing
    Observation section, when present, is captured onto the step.

    Raises MissingAction / MissingActionInput / InvalidFinishPayload.
    """
    labels = [(m.group(1), m.start(), m.end()) for m in _LABEL_RE.finditer(text)]

    action = next((l for l in labels if l[0] == "Action"), None)
    if action is None:
        raise MissingAction("no 'Action:' label found")

    thought = ""
    first_thought = next((l for l in labels if l[0] == "Thought"), None)
    if first_thought is not None and first_thought[1] < action[1]:
        thought = text[first_thought[2]:action[1]].strip()

    line_end = text.find("\n", action[2])
    if line_end == -1:
        line_end = len(text)
    action_name = text[action[2]:line_end].strip()
    if not action_name:
        raise MissingAction("'Action:' label has no tool name")

    inp = next((l for l in labels if l[0] == "Action Input" and l[1] >= action[1]), None)
    if inp is None:
        raise MissingActionInput("no 'Action Input:' label after the action")

    after = [l for l in labels if l[1] > inp[1] and l[0] in ("Thought", "Observation")]
    input_end = after[0][1] if after else len(text)
    action_input = text[inp[2]:input_end].strip()

    observation = None
    if after and after[0][0] == "Observation":
        obs_label = after[0]
        nxt = next((l for l in labels if l[1] > obs_label[1] and l[0] == "Thought"), None)
        obs_end = nxt[1] if nxt else len(text)
        observation = text[obs_label[2]:obs_end].strip()

    return ReActStep(
        thought=thought,
        action=action_name,
        action_input=action_input,
        observation=observation,
    )


def render_step(step: ReActStep) -> str:
    """Canonical text form; inverse of parse_step for valid steps."""
    text = (
        f"Thought: {step.thought}\n"
        f"Action: {step.action}\n"
        f"Action Input: {step.action_input}"
    )
    if step.observation is not None:
        text += f"\nObservation: {step.observation}"
    return text


def parse_trace(text: str) -> list[ReActStep]:
    """Parse a concatenation of rendered steps back into a step list.

    Segments are delimited by line-start "Thought:" labels. The first
    parse failure is reported with its step index.
    """
    if not text.strip():
        return []
    starts = [m.start() for m in re.finditer(r"^Thought:", text, re.MULTILINE)]
    if not starts or text[: starts[0]].strip():
        # Leading content with no Thought label is a malformed segment 0.
        try:
            head_end = starts[0] if starts else len(text)
            parse_step(text[:head_end])
        except StepParseError as exc:
            raise TraceParseError(0, exc) from exc
        raise TraceParseError(0, StepParseError("content before first 'Thought:' label"))

    steps = []
    bounds = starts + [len(text)]
    for i, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
        try:
            steps.append(parse_step(text[lo:hi]))
        except StepParseError as exc:
            raise TraceParseError(i, exc) from exc
    return steps


class PathStatus:
    FINISHED_WITH_ANSWER = "FinishedWithAnswer"
    GAVE_UP = "GaveUp"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    PARSE_FAILURE = "ParseFailure"

    ALL = (FINISHED_WITH_ANSWER, GAVE_UP, BUDGET_EXHAUSTED, PARSE_FAILURE)


@dataclass
class SolutionPath:
    """Full trajectory of one query: steps, terminal status, answer."""

    query_id: str
    steps: list[ReActStep] = field(default_factory=list)
    status: str = PathStatus.BUDGET_EXHAUSTED
    final_answer: str | None = None
    api_calls_used: int = 0

    def validate(self, max_iterations: int | None = None) -> None:
        if self.status not in PathStatus.ALL:
            raise ValueError(f"unknown status {self.status!r}")
        if max_iterations is not None and len(self.steps) > max_iterations:
            raise ValueError("step count exceeds the iteration cap")
        non_finish = sum(1 for s in self.steps if not s.is_finish)
        if self.api_calls_used != non_finish:
            raise ValueError("api_calls_used does not match non-Finish step count")
        if self.status == PathStatus.FINISHED_WITH_ANSWER:
            if self.final_answer is None:
                raise ValueError("FinishedWithAnswer without a final answer")
            if not self.steps or not self.steps[-1].is_finish:
                raise ValueError("FinishedWithAnswer without a terminal Finish step")
