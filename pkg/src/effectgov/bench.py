"""Latency benchmarks: governed submission against direct handler calls.

Methodology: a fixed workload of one email.send directive per iteration,
timed per iteration on the monotonic clock after a warmup, percentiles by
nearest rank. The governed loop goes through the full kernel pipeline
(decide, execute, provenance append). The direct loop invokes the handler
through _invoke_direct, a bypass that exists only in this module for
measurement and is not part of the package's public surface.

Absolute numbers are machine-specific. For orientation, the reference
implementation this harness mirrors (BEAM/OTP on Apple Silicon) reported
0.23 ms median governed, 0.24 ms median direct, and 0.38 ms median for a
round trip carrying a 4 KB governance context; see REFERENCE_MEDIANS_MS.
"""

from __future__ import annotations

import gc
import hashlib
import math
import platform
import time
from dataclasses import dataclass

from .directives import (
    Directive,
    Phase,
    TrustLevel,
    canonical_value_bytes,
    make_directive,
    parse_directive,
)
from .kernel import GovernanceKernel, HandlerRegistry
from .policy import Policy, PolicyRule
from .simworld import EMAIL_SEND, SimWorld, seeded_world, standard_registry

# Reference platform medians (BEAM/OTP 27 on Apple Silicon, n=50 with
# 5-iteration warmup). Context for reports, not acceptance targets.
REFERENCE_MEDIANS_MS = {
    "governed": 0.23,
    "direct": 0.24,
    "context_message_4096": 0.38,
}

_WORKLOAD_PARAMS = {"to": "ops@example.test", "body": "benchmark ping"}


@dataclass(frozen=True)
class BenchReport:
    scenario: str
    iterations: int
    warmup: int
    median_us: float
    mean_us: float
    p99_us: float
    machine: str

    def to_json_obj(self) -> dict:
        return {
            "scenario": self.scenario,
            "iterations": self.iterations,
            "warmup": self.warmup,
            "median_us": self.median_us,
            "mean_us": self.mean_us,
            "p99_us": self.p99_us,
            "machine": self.machine,
        }


def machine_descriptor() -> str:
    return f"{platform.platform()} / CPython {platform.python_version()}"


def _nearest_rank(sorted_ns: list[int], percentile: float) -> int:
    rank = max(1, math.ceil(percentile / 100.0 * len(sorted_ns)))
    return sorted_ns[rank - 1]


def _time_loop(fn, iterations: int, warmup: int) -> list[int]:
    if not isinstance(iterations, int) or isinstance(iterations, bool) or iterations < 1:
        raise ValueError(f"iterations must be a positive integer, got {iterations!r}")
    if not isinstance(warmup, int) or isinstance(warmup, bool) or warmup < 0:
        raise ValueError(f"warmup must be a non-negative integer, got {warmup!r}")
    for _ in range(warmup):
        fn()
    samples = []
    was_enabled = gc.isenabled()
    gc.disable()  # collector pauses otherwise land in arbitrary samples
    try:
        for _ in range(iterations):
            start = time.perf_counter_ns()
            fn()
            samples.append(time.perf_counter_ns() - start)
    finally:
        if was_enabled:
            gc.enable()
    return samples


def _make_report(scenario: str, iterations: int, warmup: int, samples_ns: list[int]) -> BenchReport:
    ordered = sorted(samples_ns)
    return BenchReport(
        scenario=scenario,
        iterations=iterations,
        warmup=warmup,
        median_us=_nearest_rank(ordered, 50.0) / 1000.0,
        mean_us=sum(ordered) / len(ordered) / 1000.0,
        p99_us=_nearest_rank(ordered, 99.0) / 1000.0,
        machine=machine_descriptor(),
    )


def _email_policy() -> Policy:
    return Policy.from_rules(
        [
            PolicyRule(
                capability=EMAIL_SEND,
                min_trust=TrustLevel.AGENT,
                allowed_phases=frozenset({Phase.EXECUTE}),
            )
        ]
    )


def _invoke_direct(registry: HandlerRegistry, world: SimWorld, directive: Directive):
    # Measurement-only bypass: no decision, no provenance. Keep private.
    handler = registry.get(directive.required_capability)
    return handler(world, directive)


def bench_governed_vs_direct(iters: int = 50, warmup: int = 5) -> tuple[BenchReport, BenchReport]:
    """Identical workloads, one through submit, one through the bypass."""
    registry = standard_registry()
    kernel = GovernanceKernel(_email_policy(), registry, seeded_world())

    def governed_once():
        kernel.issue(EMAIL_SEND, _WORKLOAD_PARAMS, "bench", TrustLevel.AGENT, Phase.EXECUTE)

    governed_samples = _time_loop(governed_once, iters, warmup)

    direct_world = seeded_world()
    counter = iter(range(1, iters + warmup + 1))

    def direct_once():
        directive = make_directive(
            EMAIL_SEND, _WORKLOAD_PARAMS, "bench", TrustLevel.AGENT, Phase.EXECUTE, next(counter)
        )
        _invoke_direct(registry, direct_world, directive)

    direct_samples = _time_loop(direct_once, iters, warmup)

    return (
        _make_report("governed", iters, warmup, governed_samples),
        _make_report("direct", iters, warmup, direct_samples),
    )


class _ContextEndpoint:
    """Receiving execution context: unpacks a framed message, submits, replies."""

    def __init__(self):
        self._kernel = GovernanceKernel(_email_policy(), standard_registry(), seeded_world())

    def handle(self, payload: bytes) -> bytes:
        directive_bytes, context = _unframe(payload)
        outcome = self._kernel.submit(parse_directive(directive_bytes))
        result = outcome.result if outcome.performed else "denied"
        return _frame(canonical_value_bytes(result), context)


def _frame(head: bytes, context: bytes) -> bytes:
    # Frames carry an integrity digest over the attached governance
    # context; both ends of the handoff check it before acting.
    return (
        len(head).to_bytes(4, "big") + head + hashlib.sha256(context).digest() + context
    )


def _unframe(payload: bytes) -> tuple[bytes, bytes]:
    head_len = int.from_bytes(payload[:4], "big")
    head = payload[4 : 4 + head_len]
    digest = payload[4 + head_len : 4 + head_len + 32]
    context = payload[4 + head_len + 32 :]
    if hashlib.sha256(context).digest() != digest:
        raise ValueError("governance context failed its integrity check")
    return head, context


def bench_context_message(
    context_size: int = 4096, iters: int = 50, warmup: int = 5
) -> BenchReport:
    """Round trip between two execution contexts with a serialized handoff."""
    if not isinstance(context_size, int) or isinstance(context_size, bool) or context_size < 0:
        raise ValueError(f"context_size must be a non-negative integer, got {context_size!r}")
    endpoint = _ContextEndpoint()
    context = b"x" * context_size
    counter = iter(range(1, iters + warmup + 1))

    def round_trip():
        directive = make_directive(
            EMAIL_SEND, _WORKLOAD_PARAMS, "bench", TrustLevel.AGENT, Phase.EXECUTE, next(counter)
        )
        response = endpoint.handle(_frame(directive.canonical, context))
        _unframe(response)

    samples = _time_loop(round_trip, iters, warmup)
    return _make_report(f"context_message_{context_size}", iters, warmup, samples)
