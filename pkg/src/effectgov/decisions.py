"""Allow/deny vocabulary produced by the boundary's checks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Verdict(Enum):
    ALLOW = "allow"
    DENY = "deny"


class DecisionReason(Enum):
    GRANTED = "granted"
    NO_CAPABILITY = "no_capability"
    INSUFFICIENT_TRUST = "insufficient_trust"
    PHASE_VIOLATION = "phase_violation"


@dataclass(frozen=True)
class Decision:
    """Verdict plus the reason for it; Allow pairs only with Granted."""

    verdict: Verdict
    reason: DecisionReason

    def __post_init__(self):
        allowed = self.verdict is Verdict.ALLOW
        granted = self.reason is DecisionReason.GRANTED
        if allowed != granted:
            raise ValueError(f"inconsistent decision: {self.verdict} with {self.reason}")


ALLOW_GRANTED = Decision(Verdict.ALLOW, DecisionReason.GRANTED)
DENY_NO_CAPABILITY = Decision(Verdict.DENY, DecisionReason.NO_CAPABILITY)
DENY_INSUFFICIENT_TRUST = Decision(Verdict.DENY, DecisionReason.INSUFFICIENT_TRUST)
DENY_PHASE_VIOLATION = Decision(Verdict.DENY, DecisionReason.PHASE_VIOLATION)

# Wire form uses fixed key order (verdict, reason); precomputed because the
# provenance hot path embeds it in every record.
_WIRE_JSON = {
    decision: '{"verdict":"%s","reason":"%s"}' % (decision.verdict.value, decision.reason.value)
    for decision in (
        ALLOW_GRANTED,
        DENY_NO_CAPABILITY,
        DENY_INSUFFICIENT_TRUST,
        DENY_PHASE_VIOLATION,
    )
}


def decision_wire_json(decision: Decision) -> str:
    return _WIRE_JSON[decision]


_VERDICT_BY_WIRE = {verdict.value: verdict for verdict in Verdict}
_REASON_BY_WIRE = {reason.value: reason for reason in DecisionReason}


def decision_from_obj(obj) -> Decision:
    """Rebuild a decision from a parsed JSON object; strict about shape."""
    if not isinstance(obj, dict) or set(obj) != {"verdict", "reason"}:
        raise ValueError(f"decision must be an object with verdict and reason, got {obj!r}")
    try:
        verdict = _VERDICT_BY_WIRE[obj["verdict"]]
        reason = _REASON_BY_WIRE[obj["reason"]]
    except (KeyError, TypeError):
        raise ValueError(f"unknown verdict or reason in {obj!r}") from None
    return Decision(verdict, reason)
