"""Scenario files: JSON descriptions of workflows built from fixed steps.

A scenario carries an input value, an optional trust level and a workflow
tree. Leaves use a small vocabulary of built-in value functions, so a
scenario cannot smuggle arbitrary code; it stays inside the pure algebra.

Top level::

    {"input": <json value>, "trust": "agent", "policy": "policy.json",
     "workflow": <node>}

``trust`` defaults to agent. ``policy`` is an optional reference to a
policy file, resolved relative to the scenario's own location by whoever
loads it; an explicitly supplied policy always wins over the reference.

Nodes (single-key objects)::

    {"step":    {"name": "...", "fn": <valuefn>}}
    {"emit":    {"name": "...", "kind": "email.send", "phase": "execute",
                 "params": {"to": <valuefn>, ...}}}
    {"seq":     [<node>, ...]}
    {"branch":  {"when": <valuefn>, "then": <node>, "else": <node>}}
    {"iterate": {"over": <valuefn>, "body": <node>}}

Value functions, evaluated against the node's current value::

    {"op": "const", "value": <json>}          that constant
    {"op": "input"}                            the current value
    {"op": "select-field", "field": "k"}       current["k"]
    {"op": "encode-url", "base": "http://h/p", "param": "q"}
                                               base?q=<urlencoded current>
    {"op": "concat", "parts": [<valuefn>...]}  string concatenation
    {"op": "eq", "left": <valuefn>, "right": <valuefn>}   equality test
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable
from urllib.parse import quote

from .directives import Phase, TrustLevel, phase_from_wire, trust_from_wire, validate_kind
from .workflow import (
    Branch,
    Emit,
    Iterate,
    PureStep,
    Seq,
    Workflow,
    WorkflowError,
)

Value = Any
ValueFn = Callable[[Value], Value]


class ScenarioError(ValueError):
    """A scenario document failed validation; messages carry a path."""


@dataclass(frozen=True)
class Scenario:
    workflow: Workflow
    input: Value
    trust: TrustLevel
    policy_ref: str | None = None


def _as_text(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    raise WorkflowError(f"cannot render {type(value).__name__} as text")


def _require_keys(obj: dict, required: set[str], optional: set[str], where: str) -> None:
    keys = set(obj)
    unexpected = sorted(keys - required - optional)
    if unexpected:
        raise ScenarioError(f"{where}: unknown field {unexpected[0]!r}")
    missing = sorted(required - keys)
    if missing:
        raise ScenarioError(f"{where}: missing field {missing[0]!r}")


def _require_str(obj: dict, field: str, where: str) -> str:
    value = obj.get(field)
    if not isinstance(value, str):
        raise ScenarioError(f"{where}: {field!r} must be a string")
    return value


def _compile_valuefn(form, where: str) -> ValueFn:
    if not isinstance(form, dict) or not isinstance(form.get("op"), str):
        raise ScenarioError(f"{where}: expected an object with an 'op' field")
    op = form["op"]

    if op == "const":
        _require_keys(form, {"op", "value"}, set(), where)
        constant = form["value"]
        return lambda value: constant

    if op == "input":
        _require_keys(form, {"op"}, set(), where)
        return lambda value: value

    if op == "select-field":
        _require_keys(form, {"op", "field"}, set(), where)
        field = _require_str(form, "field", where)

        def select(value):
            if not isinstance(value, dict) or field not in value:
                raise WorkflowError(f"select-field: no field {field!r} in current value")
            return value[field]

        return select

    if op == "encode-url":
        _require_keys(form, {"op", "base", "param"}, set(), where)
        base = _require_str(form, "base", where)
        param = _require_str(form, "param", where)
        return lambda value: f"{base}?{param}={quote(_as_text(value), safe='')}"

    if op == "concat":
        _require_keys(form, {"op", "parts"}, set(), where)
        parts = form["parts"]
        if not isinstance(parts, list):
            raise ScenarioError(f"{where}: 'parts' must be a list")
        fns = [
            _compile_valuefn(part, f"{where}.parts[{index}]")
            for index, part in enumerate(parts)
        ]
        return lambda value: "".join(_as_text(fn(value)) for fn in fns)

    if op == "eq":
        _require_keys(form, {"op", "left", "right"}, set(), where)
        left = _compile_valuefn(form["left"], f"{where}.left")
        right = _compile_valuefn(form["right"], f"{where}.right")
        return lambda value: left(value) == right(value)

    raise ScenarioError(f"{where}: unknown op {op!r}")


def _compile_node(node, where: str) -> Workflow:
    if not isinstance(node, dict) or len(node) != 1:
        raise ScenarioError(f"{where}: a node must be a single-key object")
    node_type, body = next(iter(node.items()))

    if node_type == "step":
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}.step: must be an object")
        _require_keys(body, {"name", "fn"}, set(), f"{where}.step")
        name = _require_str(body, "name", f"{where}.step")
        fn = _compile_valuefn(body["fn"], f"{where}.step.fn")
        return PureStep(name=name, fn=fn)

    if node_type == "emit":
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}.emit: must be an object")
        _require_keys(body, {"name", "kind", "params"}, {"phase"}, f"{where}.emit")
        name = _require_str(body, "name", f"{where}.emit")
        kind = _require_str(body, "kind", f"{where}.emit")
        try:
            validate_kind(kind)
        except ValueError as exc:
            raise ScenarioError(f"{where}.emit: {exc}") from None
        if "phase" in body:
            try:
                phase = phase_from_wire(body["phase"])
            except ValueError:
                raise ScenarioError(
                    f"{where}.emit: unknown phase {body['phase']!r}"
                ) from None
        else:
            phase = Phase.EXECUTE
        params_form = body["params"]
        if not isinstance(params_form, dict):
            raise ScenarioError(f"{where}.emit: 'params' must be an object")
        param_fns = {
            key: _compile_valuefn(fn_form, f"{where}.emit.params.{key}")
            for key, fn_form in params_form.items()
        }

        def params_fn(value):
            return {key: fn(value) for key, fn in param_fns.items()}

        return Emit(name=name, kind=kind, phase=phase, params_fn=params_fn)

    if node_type == "seq":
        if not isinstance(body, list) or not body:
            raise ScenarioError(f"{where}.seq: must be a non-empty list")
        composed = _compile_node(body[0], f"{where}.seq[0]")
        for index, part in enumerate(body[1:], start=1):
            composed = Seq(left=composed, right=_compile_node(part, f"{where}.seq[{index}]"))
        return composed

    if node_type == "branch":
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}.branch: must be an object")
        _require_keys(body, {"when", "then", "else"}, set(), f"{where}.branch")
        predicate = _compile_valuefn(body["when"], f"{where}.branch.when")
        return Branch(
            predicate=predicate,
            then_arm=_compile_node(body["then"], f"{where}.branch.then"),
            else_arm=_compile_node(body["else"], f"{where}.branch.else"),
        )

    if node_type == "iterate":
        if not isinstance(body, dict):
            raise ScenarioError(f"{where}.iterate: must be an object")
        _require_keys(body, {"over", "body"}, set(), f"{where}.iterate")
        items_fn = _compile_valuefn(body["over"], f"{where}.iterate.over")
        return Iterate(
            body=_compile_node(body["body"], f"{where}.iterate.body"), items_fn=items_fn
        )

    raise ScenarioError(f"{where}: unknown node type {node_type!r}")


def load_scenario(document: bytes | str) -> Scenario:
    try:
        obj = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"scenario document is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ScenarioError("scenario document must be a JSON object")
    _require_keys(obj, {"input", "workflow"}, {"trust", "policy"}, "scenario")
    if "trust" in obj:
        try:
            trust = trust_from_wire(obj["trust"])
        except ValueError:
            raise ScenarioError(f"scenario: unknown trust level {obj['trust']!r}") from None
    else:
        trust = TrustLevel.AGENT
    policy_ref = obj.get("policy")
    if policy_ref is not None and not isinstance(policy_ref, str):
        raise ScenarioError("scenario: 'policy' must be a string path")
    workflow = _compile_node(obj["workflow"], "workflow")
    return Scenario(workflow=workflow, input=obj["input"], trust=trust, policy_ref=policy_ref)
