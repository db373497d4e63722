"""Completion backends (replay and HTTP) and prompt construction.

Replay backends return scripted completions keyed by call order, which makes
full benchmark runs bit-reproducible. The HTTP backend speaks a minimal wire
format: POST ``{"prompt", "temperature", "max_new_tokens", "stop"}`` and
expects ``{"text": ...}`` back.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass

import requests

from .toolbox import ToolRegistry
from .trace import ReActStep, render_step

# Proxy used for prompt-length accounting when no tokenizer is attached.
CHARS_PER_TOKEN = 4

DEFAULT_SYSTEM_PROMPT = (
    "You are a tool-using assistant. Answer the query by reasoning step by "
    "step. At each step emit exactly one block of the form:\n"
    "Thought: <your reasoning>\n"
    "Action: <tool name>\n"
    "Action Input: <JSON object of arguments>\n"
    "When you can answer, use the Finish action with "
    '{"return_type": "give_answer", "final_answer": "..."}; to abandon the '
    'task use {"return_type": "give_up_and_restart"}.'
)


class GatewayError(RuntimeError):
    pass


class PromptTooLong(GatewayError):
    pass


class ScriptExhausted(GatewayError):
    pass


@dataclass
class GenerationParams:
    temperature: float = 0.1
    max_new_tokens: int = 512
    max_seq_len: int = 8192
    stop_sequences: tuple[str, ...] = ()

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 1 <= self.max_new_tokens <= self.max_seq_len:
            raise ValueError("need max_seq_len >= max_new_tokens >= 1")


@dataclass
class Completion:
    text: str
    finish_reason: str  # "stop" | "length" | "backend_error"

    def __post_init__(self):
        if self.finish_reason == "backend_error" and self.text:
            raise ValueError("backend_error completions carry no text")


def _check_prompt_length(prompt: str, params: GenerationParams) -> None:
    if len(prompt) // CHARS_PER_TOKEN > params.max_seq_len:
        raise PromptTooLong(
            f"prompt ~{len(prompt) // CHARS_PER_TOKEN} tokens exceeds "
            f"max_seq_len {params.max_seq_len}"
        )


class ReplayBackend:
    """Returns scripted completions in call order. Scoped to one query."""

    def __init__(self, script: list[str], name: str = "replay"):
        self.name = name
        self._script = list(script)
        self._index = 0
        self._lock = threading.Lock()

    def generate(self, prompt: str, params: GenerationParams) -> Completion:
        _check_prompt_length(prompt, params)
        with self._lock:
            if self._index >= len(self._script):
                raise ScriptExhausted(
                    f"{self.name}: script has only {len(self._script)} completions"
                )
            text = self._script[self._index]
            self._index += 1
        return Completion(text=text, finish_reason="stop")


def load_replay_scripts(path: str) -> dict[str, list[str]]:
    """Replay script file: JSON object mapping query_id -> completions."""
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ValueError("replay script file must be a JSON object")
    return {str(k): [str(c) for c in v] for k, v in doc.items()}


class HttpBackend:
    """Forwards generation over HTTP; transport failures are retried twice
    with fixed backoff, then surfaced as finish_reason=backend_error."""

    def __init__(self, url: str, retries: int = 2, backoff_s: float = 0.25,
                 timeout_s: float = 60.0):
        self.url = url
        self.name = url
        self.retries = retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s

    def generate(self, prompt: str, params: GenerationParams) -> Completion:
        _check_prompt_length(prompt, params)
        body = {
            "prompt": prompt,
            "temperature": params.temperature,
            "max_new_tokens": params.max_new_tokens,
            "stop": list(params.stop_sequences),
        }
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=body, timeout=self.timeout_s)
            except requests.RequestException:
                if attempt < self.retries:
                    time.sleep(self.backoff_s)
                    continue
                return Completion(text="", finish_reason="backend_error")
            # A well-formed error response is never retried.
            if not 200 <= resp.status_code < 300:
                return Completion(text="", finish_reason="backend_error")
            try:
                return Completion(
                    text=str(resp.json()["text"]), finish_reason="stop"
                )
            except (ValueError, KeyError):
                return Completion(text="", finish_reason="backend_error")
        return Completion(text="", finish_reason="backend_error")


def build_prompt(
    system: str,
    query: str,
    history: list[ReActStep],
    registry: ToolRegistry,
) -> str:
    """Deterministic agent prompt, ending with the literal cue "Thought:"."""
    lines = [system, "", "Available tools:"]
    for spec in registry:
        sig = spec.signature()
        lines.append(f"- {spec.name}: {spec.description}" + (f" [{sig}]" if sig else ""))
    lines += ["", f"Query: {query}", ""]
    prompt = "\n".join(lines)
    for step in history:
        prompt += render_step(step) + "\n"
    return prompt + "Thought:"
