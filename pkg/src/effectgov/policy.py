"""Allow-list rulebook consulted by the governance boundary.

A capability the policy does not mention is denied by default. There is no
deny-list, no wildcard matching and at most one rule per capability, so a
decision never depends on rule ordering.

Policy file format (JSON, unknown fields rejected)::

    {"rules": [{"capability": "email.send",
                "min_trust": "agent",
                "allowed_phases": ["execute"]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .directives import Phase, TrustLevel, phase_from_wire, trust_from_wire, validate_kind

CapabilitySet = frozenset[str]

_PHASE_ORDER = (Phase.PLAN, Phase.EXECUTE, Phase.FINALIZE)


class PolicyError(ValueError):
    """A policy document or rule failed validation."""


@dataclass(frozen=True)
class PolicyRule:
    """Grant of one capability above a trust floor, within given phases."""

    capability: str
    min_trust: TrustLevel
    allowed_phases: frozenset[Phase]

    def __post_init__(self):
        validate_kind(self.capability)
        if not isinstance(self.min_trust, TrustLevel):
            raise PolicyError(f"min_trust must be a TrustLevel, got {self.min_trust!r}")
        phases = frozenset(self.allowed_phases)
        if not phases:
            raise PolicyError(f"rule for {self.capability!r} allows no phases")
        for phase in phases:
            if not isinstance(phase, Phase):
                raise PolicyError(f"allowed_phases entry is not a Phase: {phase!r}")
        object.__setattr__(self, "allowed_phases", phases)


@dataclass(frozen=True)
class Policy:
    """Immutable map capability -> rule."""

    rules: Mapping[str, PolicyRule]

    def __post_init__(self):
        normalized = {}
        for capability, rule in self.rules.items():
            if not isinstance(rule, PolicyRule):
                raise PolicyError(f"rule for {capability!r} is not a PolicyRule")
            if rule.capability != capability:
                raise PolicyError(
                    f"rule keyed {capability!r} grants {rule.capability!r}"
                )
            normalized[capability] = rule
        object.__setattr__(
            self, "rules", MappingProxyType(dict(sorted(normalized.items())))
        )

    @classmethod
    def from_rules(cls, rules: Iterable[PolicyRule]) -> "Policy":
        by_capability: dict[str, PolicyRule] = {}
        for rule in rules:
            if rule.capability in by_capability:
                raise PolicyError(f"duplicate capability {rule.capability!r}")
            by_capability[rule.capability] = rule
        return cls(rules=by_capability)


EMPTY_POLICY = Policy.from_rules([])


def lookup(policy: Policy, capability: str) -> Optional[PolicyRule]:
    """Rule covering the capability, or None when the policy is silent."""
    return policy.rules.get(capability)


def policy_capabilities(policy: Policy) -> CapabilitySet:
    """The governance boundary: every capability the policy covers."""
    return frozenset(policy.rules)


def narrow(outer: Iterable[str], inner: Iterable[str]) -> CapabilitySet:
    """Attenuate authority across a composition: set intersection.

    The result never widens either side: narrow(a, b) <= a and <= b.
    """
    return frozenset(outer) & frozenset(inner)


_RULE_FIELDS = frozenset({"capability", "min_trust", "allowed_phases"})


def load_policy(document: bytes | str) -> Policy:
    """Parse and validate a policy document; errors carry rule positions."""
    try:
        obj = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise PolicyError(f"policy document is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise PolicyError("policy document must be a JSON object")
    unexpected = sorted(set(obj) - {"rules"})
    if unexpected:
        raise PolicyError(f"unknown policy field {unexpected[0]!r}")
    if "rules" not in obj:
        raise PolicyError("policy document is missing 'rules'")
    entries = obj["rules"]
    if not isinstance(entries, list):
        raise PolicyError("'rules' must be a list")

    rules: dict[str, PolicyRule] = {}
    for index, entry in enumerate(entries):
        where = f"rules[{index}]"
        if not isinstance(entry, dict):
            raise PolicyError(f"{where}: rule must be a JSON object")
        unexpected = sorted(set(entry) - _RULE_FIELDS)
        if unexpected:
            raise PolicyError(f"{where}: unknown field {unexpected[0]!r}")
        missing = sorted(_RULE_FIELDS - set(entry))
        if missing:
            raise PolicyError(f"{where}: missing field {missing[0]!r}")

        capability = entry["capability"]
        try:
            validate_kind(capability)
        except ValueError as exc:
            raise PolicyError(f"{where}: {exc}") from None
        if capability in rules:
            raise PolicyError(f"{where}: duplicate capability {capability!r}")

        try:
            min_trust = trust_from_wire(entry["min_trust"])
        except ValueError:
            raise PolicyError(
                f"{where}: unknown trust level {entry['min_trust']!r}"
            ) from None

        names = entry["allowed_phases"]
        if not isinstance(names, list) or not names:
            raise PolicyError(f"{where}: allowed_phases must be a non-empty list")
        phases = []
        for name in names:
            try:
                phases.append(phase_from_wire(name))
            except ValueError:
                raise PolicyError(f"{where}: unknown phase {name!r}") from None
        if len(set(phases)) != len(phases):
            raise PolicyError(f"{where}: repeated phase in allowed_phases")

        rules[capability] = PolicyRule(
            capability=capability, min_trust=min_trust, allowed_phases=frozenset(phases)
        )
    return Policy(rules=rules)


def serialize_policy(policy: Policy) -> bytes:
    """Stable JSON form; load_policy(serialize_policy(p)) == p."""
    entries = [
        {
            "capability": rule.capability,
            "min_trust": rule.min_trust.wire_name,
            "allowed_phases": [
                phase.value for phase in _PHASE_ORDER if phase in rule.allowed_phases
            ],
        }
        for _, rule in sorted(policy.rules.items())
    ]
    return (json.dumps({"rules": entries}, indent=2) + "\n").encode("utf-8")
