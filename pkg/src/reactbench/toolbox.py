"""Tool registry, argument validation, and dispatch.

Tools are backed either by a deterministic simulated rule (pure function of
the validated argument map) or by an HTTP endpoint. Dispatch is total: every
failure mode comes back as an ObservationResult, never an exception.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any

import requests

from .trace import FINISH_ACTION, ReActStep

logger = logging.getLogger(__name__)

KINDS = ("string", "number", "boolean", "object", "array")

_PYTHON_KINDS = {
    "string": (str,),
    "number": (int, float),
    "boolean": (bool,),
    "object": (dict,),
    "array": (list,),
}

# Observation texts for failures carry these prefixes so downstream judging
# can tell a successful dispatch from a failed one by text alone.
TOOL_ERROR_PREFIX = "ToolError:"
BUDGET_EXCEEDED_TEXT = "BudgetExceeded: API call budget exhausted"


class RegistryError(ValueError):
    pass


class DuplicateTool(RegistryError):
    pass


class ArgumentError(ValueError):
    pass


class NotJson(ArgumentError):
    pass


class MissingRequired(ArgumentError):
    pass


class WrongKind(ArgumentError):
    pass


class UnknownKey(ArgumentError):
    pass


@dataclass
class ToolParameter:
    name: str
    kind: str
    required: bool = True
    description: str = ""

    def __post_init__(self):
        if not self.name:
            raise RegistryError("parameter name must be non-empty")
        if self.kind not in KINDS:
            raise RegistryError(f"unknown parameter kind {self.kind!r}")


@dataclass
class SimulatedBackend:
    """Deterministic response rule: fixed fixture fields plus echoed args."""

    fields: dict[str, Any] = field(default_factory=dict)
    echo: list[str] = field(default_factory=list)

    def respond(self, args: dict[str, Any]) -> str:
        payload = dict(self.fields)
        for name in self.echo:
            if name in args:
                payload[name] = args[name]
        return json.dumps(payload, sort_keys=True)


@dataclass
class HttpToolBackend:
    url: str
    method: str = "POST"
    timeout_s: float = 10.0


@dataclass
class ToolSpec:
    name: str
    category: str = ""
    description: str = ""
    parameters: list[ToolParameter] = field(default_factory=list)
    backend: SimulatedBackend | HttpToolBackend = field(default_factory=SimulatedBackend)

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise RegistryError(f"tool name {self.name!r} must be a whitespace-free token")
        if self.name == FINISH_ACTION:
            raise RegistryError(f"{FINISH_ACTION!r} is a reserved action name")
        seen = set()
        for p in self.parameters:
            if p.name in seen:
                raise RegistryError(f"duplicate parameter {p.name!r} in {self.name}")
            seen.add(p.name)

    def signature(self) -> str:
        parts = []
        for p in self.parameters:
            req = "required" if p.required else "optional"
            parts.append(f"{p.name}: {p.kind} ({req})")
        return ", ".join(parts)


@dataclass
class ObservationResult:
    status: str  # "ok" | "error" | "budget_exceeded"
    text: str
    latency_s: float = 0.0

    @property
    def is_ok(self) -> bool:
        return self.status == "ok"


class ToolRegistry:
    """Immutable-after-construction name -> ToolSpec map."""

    def __init__(self, strict: bool = False):
        self.strict = strict
        self._tools: dict[str, ToolSpec] = {}

    def register(self, spec: ToolSpec) -> None:
        if spec.name in self._tools:
            raise DuplicateTool(f"tool {spec.name!r} already registered")
        self._tools[spec.name] = spec

    def get(self, name: str) -> ToolSpec | None:
        return self._tools.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def __iter__(self):
        return iter(self._tools.values())

    def __len__(self) -> int:
        return len(self._tools)


def validate_args(spec: ToolSpec, action_input: str, strict: bool = False) -> dict:
    """Parse and check an action input against the tool's parameter schema."""
    try:
        args = json.loads(action_input)
    except (json.JSONDecodeError, TypeError) as exc:
        raise NotJson(f"action input is not JSON: {exc}") from exc
    if not isinstance(args, dict):
        raise NotJson("action input must be a JSON object")

    declared = {p.name: p for p in spec.parameters}
    for p in spec.parameters:
        if p.required and p.name not in args:
            raise MissingRequired(f"missing required parameter {p.name!r}")
    for name, value in args.items():
        if name not in declared:
            if strict:
                raise UnknownKey(f"unknown parameter {name!r}")
            logger.warning("tool %s: ignoring unknown parameter %r", spec.name, name)
            continue
        expected = _PYTHON_KINDS[declared[name].kind]
        # bool is an int subclass; keep number/boolean disjoint.
        if isinstance(value, bool) and declared[name].kind != "boolean":
            raise WrongKind(f"parameter {name!r} should be {declared[name].kind}")
        if not isinstance(value, expected):
            raise WrongKind(f"parameter {name!r} should be {declared[name].kind}")
    return {k: v for k, v in args.items() if k in declared}


def dispatch(registry: ToolRegistry, step: ReActStep, budget: int) -> ObservationResult:
    """Route one non-Finish step to its tool backend. Never raises."""
    start = time.perf_counter()

    def done(status: str, text: str) -> ObservationResult:
        return ObservationResult(status, text, latency_s=time.perf_counter() - start)

    if step.is_finish:
        return done("error", f"{TOOL_ERROR_PREFIX} Finish is not dispatchable")
    if budget <= 0:
        return done("budget_exceeded", BUDGET_EXCEEDED_TEXT)
    spec = registry.get(step.action)
    if spec is None:
        return done("error", f"{TOOL_ERROR_PREFIX} no such tool: {step.action}")
    try:
        args = validate_args(spec, step.action_input, strict=registry.strict)
    except ArgumentError as exc:
        return done("error", f"{TOOL_ERROR_PREFIX} {exc}")

    if isinstance(spec.backend, SimulatedBackend):
        return done("ok", spec.backend.respond(args))

    try:
        resp = requests.request(
            spec.backend.method,
            spec.backend.url,
            json=args,
            timeout=spec.backend.timeout_s,
        )
    except requests.RequestException as exc:
        return done("error", f"{TOOL_ERROR_PREFIX} transport failure: {exc}")
    if not 200 <= resp.status_code < 300:
        return done(
            "error",
            f"{TOOL_ERROR_PREFIX} HTTP {resp.status_code}: {resp.text[:200]}",
        )
    return done("ok", resp.text)


def load_registry(source: dict | str) -> ToolRegistry:
    """Build a registry from its JSON document (dict or file path)."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            doc = json.load(f)
    else:
        doc = source

    registry = ToolRegistry(strict=bool(doc.get("strict", False)))
    for tool in doc.get("tools", []):
        backend_doc = tool.get("backend", {"type": "simulated"})
        if backend_doc.get("type") == "http":
            backend: SimulatedBackend | HttpToolBackend = HttpToolBackend(
                url=backend_doc["url"],
                method=backend_doc.get("method", "POST"),
            )
        elif backend_doc.get("type") == "simulated":
            rule = backend_doc.get("rule", {})
            backend = SimulatedBackend(
                fields=rule.get("fields", {}),
                echo=list(rule.get("echo", [])),
            )
        else:
            raise RegistryError(f"unknown backend type {backend_doc.get('type')!r}")
        registry.register(
            ToolSpec(
                name=tool["name"],
                category=tool.get("category", ""),
                description=tool.get("description", ""),
                parameters=[
                    ToolParameter(
                        name=p["name"],
                        kind=p["kind"],
                        required=bool(p.get("required", True)),
                        description=p.get("description", ""),
                    )
                    for p in tool.get("parameters", [])
                ],
                backend=backend,
            )
        )
    return registry
