"""Shared fixture builders: desk-scale suite, registry, and replay scripts."""
from __future__ import annotations

import json
from pathlib import Path

from reactbench.agent import CATEGORIES

DESK_COUNTS = {cat: (5 if cat == "G3_instruction" else 10) for cat in CATEGORIES}
DESK_PASS_COUNTS = {cat: (4 if cat == "G3_instruction" else 8) for cat in CATEGORIES}

TOOL_STEP = 'Thought: look it up\nAction: lookup_info\nAction Input: {"topic": "x"}'
FINISH_ANSWER = (
    "Thought: done\nAction: Finish\n"
    'Action Input: {"return_type": "give_answer", "final_answer": "the answer"}'
)
FINISH_GIVE_UP = (
    "Thought: stuck\nAction: Finish\n"
    'Action Input: {"return_type": "give_up_and_restart"}'
)

PASS_SCRIPT = [TOOL_STEP, FINISH_ANSWER]
FAIL_SCRIPT = [FINISH_GIVE_UP]


GARBAGE = "no labels here at all"
BAD_FINISH = "Thought: done?\nAction: Finish\nAction Input: oops not json"
UNKNOWN_TOOL_STEP = 'Thought: t\nAction: frobnicate\nAction Input: {}'
BAD_ARGS_STEP = 'Thought: t\nAction: lookup_info\nAction Input: {"topic": 7}'


def random_script(rng) -> list[str]:
    """Mixed bag of valid, terminal, and malformed completions."""
    choices = [
        (0.35, TOOL_STEP),
        (0.10, FINISH_ANSWER),
        (0.05, FINISH_GIVE_UP),
        (0.15, GARBAGE),
        (0.10, BAD_FINISH),
        (0.15, UNKNOWN_TOOL_STEP),
        (0.10, BAD_ARGS_STEP),
    ]
    script = []
    for _ in range(rng.randint(0, 14)):
        roll = rng.random()
        acc = 0.0
        for weight, item in choices:
            acc += weight
            if roll < acc:
                script.append(item)
                break
    return script


def assert_path_invariants(path, max_iterations: int = 10) -> None:
    from reactbench.trace import PathStatus

    path.validate(max_iterations)
    assert path.status in PathStatus.ALL
    non_finish = [s for s in path.steps if not s.is_finish]
    assert all(s.observation is not None for s in non_finish)
    assert path.api_calls_used == len(non_finish) <= max_iterations
    finished = (
        bool(path.steps)
        and path.steps[-1].is_finish
        and path.steps[-1].finish_payload()["return_type"] == "give_answer"
    )
    assert (path.status == PathStatus.FINISHED_WITH_ANSWER) == finished


def registry_doc() -> dict:
    return {
        "strict": False,
        "tools": [
            {
                "name": "lookup_info",
                "category": "search",
                "description": "Look up information about a topic",
                "parameters": [
                    {
                        "name": "topic",
                        "kind": "string",
                        "required": True,
                        "description": "what to look up",
                    }
                ],
                "backend": {
                    "type": "simulated",
                    "rule": {"fields": {"status": "found"}, "echo": ["topic"]},
                },
            },
            {
                "name": "get_weather",
                "category": "weather",
                "description": "Current weather for a city",
                "parameters": [
                    {
                        "name": "city",
                        "kind": "string",
                        "required": True,
                        "description": "city name",
                    }
                ],
                "backend": {
                    "type": "simulated",
                    "rule": {"fields": {"temp_c": 21}, "echo": ["city"]},
                },
            },
        ],
    }


def desk_suite_doc(label: str = "desk") -> dict:
    categories = []
    for cat in CATEGORIES:
        queries = [
            {
                "id": f"{cat}-{i:02d}",
                "instruction": f"Find information about item {i} ({cat}).",
                "relevant_tools": ["lookup_info"],
                "expected_tools": ["lookup_info"],
            }
            for i in range(DESK_COUNTS[cat])
        ]
        categories.append({"category": cat, "queries": queries})
    return {"label": label, "categories": categories}


def desk_replay_doc() -> dict:
    scripts = {}
    for cat in CATEGORIES:
        for i in range(DESK_COUNTS[cat]):
            passing = i < DESK_PASS_COUNTS[cat]
            scripts[f"{cat}-{i:02d}"] = list(PASS_SCRIPT if passing else FAIL_SCRIPT)
    return scripts


def write_desk_fixture(dir_path: Path) -> dict[str, Path]:
    paths = {
        "suite": dir_path / "suite.json",
        "registry": dir_path / "registry.json",
        "replay": dir_path / "replay.json",
    }
    paths["suite"].write_text(json.dumps(desk_suite_doc(), indent=2))
    paths["registry"].write_text(json.dumps(registry_doc(), indent=2))
    paths["replay"].write_text(json.dumps(desk_replay_doc(), indent=2))
    return paths
