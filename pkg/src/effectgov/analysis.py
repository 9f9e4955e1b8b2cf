"""Two-boundary analysis: region partition, monitoring gap, layer costs.

The region partition compares what a system can do (its handler
capabilities) with what a policy covers. Capabilities in both sets are the
only ones that function as intended; capabilities without coverage are the
risk region, and coverage without a capability is theater. The analysis
works on capability identifiers, never on program semantics, which is what
keeps it decidable.

Monte Carlo runs use numpy's PCG64 generator, which is seedable and
platform-stable, so reported frequencies reproduce exactly for a given
seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .directives import Directive, Phase, Scalar, TrustLevel, make_directive
from .policy import CapabilitySet, Policy, policy_capabilities

# Cap on doubles drawn per chunk; keeps peak memory under ~100 MB.
_CHUNK_BUDGET = 10_000_000


@dataclass(frozen=True)
class RegionReport:
    """Partition of capabilities and policy entries into the three regions."""

    governed: CapabilitySet
    ungoverned: CapabilitySet
    theater: CapabilitySet

    @property
    def coterminous(self) -> bool:
        """True when the two boundaries coincide: no risk, no theater."""
        return not self.ungoverned and not self.theater

    def to_json_obj(self) -> dict:
        return {
            "governed": sorted(self.governed),
            "ungoverned": sorted(self.ungoverned),
            "theater": sorted(self.theater),
            "coterminous": self.coterminous,
        }


def regions(expressiveness: Iterable[str], policy: Policy) -> RegionReport:
    """Partition capability space by the expressiveness/policy overlap."""
    expressible = frozenset(expressiveness)
    covered = policy_capabilities(policy)
    return RegionReport(
        governed=expressible & covered,
        ungoverned=expressible - covered,
        theater=covered - expressible,
    )


def enumerate_directive_space(
    kinds: Iterable[str],
    trusts: Iterable[TrustLevel] = tuple(TrustLevel),
    phases: Iterable[Phase] = tuple(Phase),
    issuer: str = "probe",
    params: Mapping[str, Scalar] | None = None,
) -> Iterator[Directive]:
    """Every well-formed directive over small finite field choices.

    Decisions are syntactic, so a policy's behavior over a bounded
    directive space can be checked exhaustively instead of sampled; ids
    run sequentially through the enumeration.
    """
    counter = itertools.count(1)
    for kind, trust, phase in itertools.product(kinds, trusts, phases):
        yield make_directive(kind, params or {}, issuer, trust, phase, next(counter))


def _validate_coverage(coverage: float) -> float:
    coverage = float(coverage)
    if math.isnan(coverage) or not 0.0 <= coverage <= 1.0:
        raise ValueError(f"coverage must be within [0, 1], got {coverage!r}")
    return coverage


def _validate_count(value: int, name: str, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def gap_probability(coverage: float, actions: int) -> float:
    """Probability that at least one of n independent actions is unmonitored.

    Exactly 1 - coverage**actions, computed as -expm1(n*log(coverage)) so
    it stays accurate (absolute error well under 1e-12) when coverage is
    close to 1 and n is large.
    """
    coverage = _validate_coverage(coverage)
    actions = _validate_count(actions, "actions", 0)
    if actions == 0:
        return 0.0
    if coverage == 0.0:
        return 1.0
    if coverage == 1.0:
        return 0.0
    return -math.expm1(actions * math.log(coverage))


def simulate_monitor(coverage: float, actions: int, trials: int, seed: int) -> float:
    """Empirical gap frequency; the Monte Carlo check on gap_probability.

    Each trial draws `actions` independent Bernoulli(coverage) coverage
    events and counts as breached when any event misses. Deterministic for
    a given seed (PCG64, draws consumed in trial-major order).
    """
    coverage = _validate_coverage(coverage)
    actions = _validate_count(actions, "actions", 0)
    trials = _validate_count(trials, "trials", 1)
    if actions == 0:
        return 0.0
    rng = np.random.Generator(np.random.PCG64(seed))
    chunk = max(1, min(trials, _CHUNK_BUDGET // actions))
    breached = 0
    remaining = trials
    while remaining > 0:
        count = min(chunk, remaining)
        draws = rng.random((count, actions))
        breached += int((draws >= coverage).any(axis=1).sum())
        remaining -= count
    return breached / trials


def layered_cost(
    base_latency_per_action_ms: float,
    layer_latencies_ms: Iterable[float],
    actions: int,
) -> float:
    """Latency added by stacked per-action governance layers, in ms.

    Returns actions * sum(layer latencies); the base per-action latency is
    part of the workload either way and does not contribute to the added
    cost. An empty layer list is the structural case: nothing is added.
    """
    if float(base_latency_per_action_ms) < 0.0:
        raise ValueError("base latency must be non-negative")
    layers = [float(latency) for latency in layer_latencies_ms]
    if any(latency < 0.0 for latency in layers):
        raise ValueError("layer latencies must be non-negative")
    actions = _validate_count(actions, "actions", 0)
    return actions * math.fsum(layers)
