"""Directive vocabulary: structured descriptions of intended effects.

A directive is inert data. Constructing one never touches any world state;
it only describes what an effect handler would be asked to do. Whether the
description becomes an effect is decided elsewhere, at the governance
boundary.

Canonical encoding, fixed here because provenance hashing and interchange
both depend on it: UTF-8 JSON, object keys sorted lexicographically, no
insignificant whitespace, integers base-10, booleans ``true``/``false``.
Directives with equal fields always produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from types import MappingProxyType
from typing import Mapping, Union

Scalar = Union[str, int, bool]

MAX_DIRECTIVE_ID = 2**64 - 1

_KIND_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789_")

# Reference grammar for effect kinds; validate_kind implements it with
# per-character error reporting.
EFFECT_KIND_GRAMMAR = r"[a-z0-9_]+(\.[a-z0-9_]+)*"


class DirectiveError(ValueError):
    """A directive field failed validation."""


class TrustLevel(IntEnum):
    """Issuer rank. Policies demand a minimum; comparison is ordinal."""

    UNTRUSTED = 0
    AGENT = 1
    OPERATOR = 2
    SYSTEM = 3

    @property
    def wire_name(self) -> str:
        return self.name.lower()


_TRUST_BY_WIRE = {level.wire_name: level for level in TrustLevel}


def trust_from_wire(name: str) -> TrustLevel:
    try:
        return _TRUST_BY_WIRE[name]
    except (KeyError, TypeError):
        raise DirectiveError(f"unknown trust level {name!r}") from None


class Phase(Enum):
    """Lifecycle stage a directive declares; policies constrain it."""

    PLAN = "plan"
    EXECUTE = "execute"
    FINALIZE = "finalize"


_PHASE_BY_WIRE = {phase.value: phase for phase in Phase}


def phase_from_wire(name: str) -> Phase:
    try:
        return _PHASE_BY_WIRE[name]
    except (KeyError, TypeError):
        raise DirectiveError(f"unknown phase {name!r}") from None


def validate_kind(kind: str) -> str:
    """Check an effect-kind string against the dot-separated grammar.

    Returns the kind unchanged, or raises DirectiveError naming the first
    offending character and its index.
    """
    if not isinstance(kind, str):
        raise DirectiveError(f"effect kind must be a string, got {type(kind).__name__}")
    if kind == "":
        raise DirectiveError("effect kind must not be empty")
    prev = "."
    for index, char in enumerate(kind):
        if char == ".":
            if prev == ".":
                raise DirectiveError(f"effect kind {kind!r}: misplaced '.' at index {index}")
        elif char not in _KIND_CHARS:
            raise DirectiveError(
                f"effect kind {kind!r}: invalid character {char!r} at index {index}"
            )
        prev = char
    if prev == ".":
        raise DirectiveError(f"effect kind {kind!r}: misplaced '.' at index {len(kind) - 1}")
    return kind


def _encode_canonical(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def canonical_value_bytes(value: Scalar) -> bytes:
    """Canonical encoding of a single scalar (handler results use this)."""
    if not isinstance(value, (str, int, bool)):
        raise DirectiveError(f"not a scalar: {type(value).__name__}")
    try:
        return _encode_canonical(value)
    except UnicodeEncodeError as exc:
        raise DirectiveError(f"value is not UTF-8 encodable: {exc}") from None


def _normalized_params(params) -> Mapping[str, Scalar]:
    if not isinstance(params, Mapping):
        raise DirectiveError(f"params must be a mapping, got {type(params).__name__}")
    for key, value in params.items():
        if not isinstance(key, str):
            raise DirectiveError(f"param key must be a string, got {key!r}")
        if not isinstance(value, (str, int, bool)):
            raise DirectiveError(
                f"param {key!r} must be a string, integer or boolean, got {type(value).__name__}"
            )
    return MappingProxyType(dict(sorted(params.items())))


@dataclass(frozen=True)
class Directive:
    """One intended effect, described as inert data.

    ``params`` is stored key-sorted behind a read-only view, and the
    canonical encoding is computed once at construction; a directive's
    identity is its content.
    """

    id: int
    kind: str
    params: Mapping[str, Scalar]
    issuer: str
    trust: TrustLevel
    required_capability: str
    phase: Phase
    canonical: bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.id, int) or isinstance(self.id, bool):
            raise DirectiveError(f"directive id must be an integer, got {self.id!r}")
        if not 0 <= self.id <= MAX_DIRECTIVE_ID:
            raise DirectiveError(f"directive id {self.id} outside unsigned 64-bit range")
        validate_kind(self.kind)
        validate_kind(self.required_capability)
        if self.required_capability != self.kind:
            raise DirectiveError(
                f"required_capability {self.required_capability!r} must equal kind {self.kind!r}"
            )
        if not isinstance(self.issuer, str) or self.issuer == "":
            raise DirectiveError("issuer must be a non-empty string")
        if not isinstance(self.trust, TrustLevel):
            raise DirectiveError(f"trust must be a TrustLevel, got {self.trust!r}")
        if not isinstance(self.phase, Phase):
            raise DirectiveError(f"phase must be a Phase, got {self.phase!r}")
        object.__setattr__(self, "params", _normalized_params(self.params))
        try:
            encoded = _encode_canonical(
                {
                    "id": self.id,
                    "issuer": self.issuer,
                    "kind": self.kind,
                    "params": dict(self.params),
                    "phase": self.phase.value,
                    "required_capability": self.required_capability,
                    "trust": self.trust.wire_name,
                }
            )
        except UnicodeEncodeError as exc:
            raise DirectiveError(f"directive is not UTF-8 encodable: {exc}") from None
        object.__setattr__(self, "canonical", encoded)


def make_directive(
    kind: str,
    params: Mapping[str, Scalar],
    issuer: str,
    trust: TrustLevel,
    phase: Phase,
    id: int,
) -> Directive:
    """Build a validated directive. No world interaction of any sort."""
    return Directive(
        id=id,
        kind=kind,
        params=params,
        issuer=issuer,
        trust=trust,
        required_capability=kind,
        phase=phase,
    )


def canonical_bytes(directive: Directive) -> bytes:
    """Canonical encoding of a directive (computed at construction)."""
    return directive.canonical


_DIRECTIVE_KEYS = frozenset(
    {"id", "issuer", "kind", "params", "phase", "required_capability", "trust"}
)


def directive_from_obj(obj) -> Directive:
    """Rebuild a directive from a parsed JSON object; strict about shape."""
    if not isinstance(obj, dict):
        raise DirectiveError(f"directive must be a JSON object, got {type(obj).__name__}")
    keys = set(obj)
    if keys != _DIRECTIVE_KEYS:
        missing = sorted(_DIRECTIVE_KEYS - keys)
        unexpected = sorted(keys - _DIRECTIVE_KEYS)
        parts = []
        if missing:
            parts.append(f"missing fields {missing}")
        if unexpected:
            parts.append(f"unexpected fields {unexpected}")
        raise DirectiveError("directive object: " + ", ".join(parts))
    params = obj["params"]
    if not isinstance(params, dict):
        raise DirectiveError("directive params must be a JSON object")
    return Directive(
        id=obj["id"],
        kind=obj["kind"],
        params=params,
        issuer=obj["issuer"],
        trust=trust_from_wire(obj["trust"]),
        required_capability=obj["required_capability"],
        phase=phase_from_wire(obj["phase"]),
    )


def parse_directive(data: bytes | str) -> Directive:
    """Inverse of canonical_bytes: parse_directive(canonical_bytes(d)) == d."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DirectiveError(f"not valid JSON: {exc}") from None
    return directive_from_obj(obj)
