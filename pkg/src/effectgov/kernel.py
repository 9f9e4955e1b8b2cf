"""The single governance boundary.

Submission is the only path from a directive to a world mutation. It runs
the syntactic decision pipeline (capability, then trust, then phase; the
first failing check names the deny reason), executes allowed effects
through a registered handler, and appends one provenance record per
submission, denials included. There is no bypass: nothing else in this
package can reach a handler.

decide() is a pure function of (policy, directive). Submissions serialize
the decide/execute/append triple under one lock, so chain order is a total
order consistent with execution order.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional

from .decisions import (
    ALLOW_GRANTED,
    DENY_INSUFFICIENT_TRUST,
    DENY_NO_CAPABILITY,
    DENY_PHASE_VIOLATION,
    Decision,
    DecisionReason,
    Verdict,
)
from .directives import (
    Directive,
    Phase,
    Scalar,
    TrustLevel,
    canonical_value_bytes,
    make_directive,
    validate_kind,
)
from .policy import Policy, lookup
from .provenance import Chain, ExecStatus, ProvenanceRecord, ZERO_DIGEST


class HandlerError(Exception):
    """Raised by a handler to report that the effect could not be performed.

    A failed handler does not abort the run; the failure is recorded.
    """


Handler = Callable[[Any, Directive], Scalar]


class HandlerRegistry:
    """Effect handlers owned by the boundary.

    The key set is the expressiveness boundary: an effect kind without a
    handler cannot happen in this system, whatever any policy says.
    """

    def __init__(self, handlers: Optional[Mapping[str, Handler]] = None):
        self._handlers: dict[str, Handler] = {}
        for capability, handler in (handlers or {}).items():
            self.register(capability, handler)

    def register(self, capability: str, handler: Handler) -> None:
        validate_kind(capability)
        if capability in self._handlers:
            raise ValueError(f"capability {capability!r} already has a handler")
        if not callable(handler):
            raise TypeError(f"handler for {capability!r} is not callable")
        self._handlers[capability] = handler

    def get(self, capability: str) -> Optional[Handler]:
        return self._handlers.get(capability)

    def capabilities(self) -> frozenset[str]:
        return frozenset(self._handlers)


def handler_capabilities(registry: HandlerRegistry) -> frozenset[str]:
    return registry.capabilities()


def decide(policy: Policy, directive: Directive) -> Decision:
    """Pure, total decision: capability lookup, then trust, then phase."""
    rule = lookup(policy, directive.required_capability)
    if rule is None:
        return DENY_NO_CAPABILITY
    if directive.trust < rule.min_trust:
        return DENY_INSUFFICIENT_TRUST
    if directive.phase not in rule.allowed_phases:
        return DENY_PHASE_VIOLATION
    return ALLOW_GRANTED


@dataclass(frozen=True)
class ExecutionOutcome:
    """What one submission produced: the decision, and the result if any."""

    decision: Decision
    exec_status: ExecStatus
    result: Optional[Scalar]
    record: ProvenanceRecord
    error: Optional[str] = None

    @property
    def performed(self) -> bool:
        return self.exec_status is ExecStatus.EXECUTED

    @property
    def denial_reason(self) -> Optional[DecisionReason]:
        """Why nothing happened; allowed-but-unprovided counts as NoCapability."""
        if self.decision.verdict is Verdict.DENY:
            return self.decision.reason
        if self.exec_status is ExecStatus.HANDLER_MISSING:
            return DecisionReason.NO_CAPABILITY
        return None


class GovernanceKernel:
    """Boundary state: policy, handler registry, world, open chain.

    An Allow verdict whose capability has no handler is a theater
    configuration: it is recorded (exec_status handler_missing), reported
    to the caller as a denial-equivalent outcome, and flagged on the
    kernel rather than raised, so region analysis can consume it as data.
    """

    def __init__(
        self,
        policy: Policy,
        registry: HandlerRegistry,
        world: Any,
        chain: Optional[Chain] = None,
    ):
        self._policy = policy
        self._registry = registry
        self._world = world
        self._chain = chain if chain is not None else Chain()
        self._lock = threading.Lock()
        self._last_id = 0
        self._theater_ids: list[int] = []

    @property
    def policy(self) -> Policy:
        return self._policy

    @property
    def registry(self) -> HandlerRegistry:
        return self._registry

    @property
    def world(self) -> Any:
        return self._world

    @property
    def chain(self) -> Chain:
        return self._chain

    @property
    def theater_directive_ids(self) -> tuple[int, ...]:
        """Ids of directives that were allowed but had no handler."""
        return tuple(self._theater_ids)

    def issue(
        self,
        kind: str,
        params: Mapping[str, Scalar],
        issuer: str,
        trust: TrustLevel,
        phase: Phase,
    ) -> ExecutionOutcome:
        """Build a directive with the next sequence id and submit it."""
        with self._lock:
            self._last_id += 1
            directive = make_directive(kind, params, issuer, trust, phase, self._last_id)
            return self._submit_locked(directive)

    def submit(self, directive: Directive) -> ExecutionOutcome:
        """Decide, execute if allowed, and record; atomic per directive."""
        with self._lock:
            return self._submit_locked(directive)

    def _submit_locked(self, directive: Directive) -> ExecutionOutcome:
        decision = decide(self._policy, directive)
        result: Optional[Scalar] = None
        error: Optional[str] = None
        digest = ZERO_DIGEST
        if decision.verdict is Verdict.ALLOW:
            handler = self._registry.get(directive.required_capability)
            if handler is None:
                status = ExecStatus.HANDLER_MISSING
                self._theater_ids.append(directive.id)
            else:
                try:
                    result = handler(self._world, directive)
                    if not isinstance(result, (str, int, bool)):
                        raise HandlerError(
                            f"handler returned non-scalar {type(result).__name__}"
                        )
                except HandlerError as exc:
                    status = ExecStatus.FAILED
                    result = None
                    error = str(exc)
                else:
                    status = ExecStatus.EXECUTED
                    digest = hashlib.sha256(canonical_value_bytes(result)).digest()
        else:
            status = ExecStatus.SKIPPED
        record = self._chain.append(directive, decision, status, digest)
        return ExecutionOutcome(
            decision=decision, exec_status=status, result=result, record=record, error=error
        )
