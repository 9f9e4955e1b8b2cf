"""Chain linking, verification, tamper evidence and the JSONL format."""

import hashlib
import json
import random
import re

import pytest

from effectgov import (
    ALLOW_GRANTED,
    Chain,
    ChainFormatError,
    ChainIntegrityError,
    DENY_NO_CAPABILITY,
    ExecStatus,
    Phase,
    ProvenanceRecord,
    TrustLevel,
    ZERO_DIGEST,
    import_chain,
    make_directive,
)

from support import fresh_kernel, random_policy, valid_params_for


def directive(i, kind="email.send", params=None):
    return make_directive(kind, params if params is not None else {"to": "a@b.c", "body": str(i)},
                          "step", TrustLevel.AGENT, Phase.EXECUTE, i)


def build_chain(n, seed=0):
    """Kernel-produced chain with a random mix of allows and denies."""
    rng = random.Random(seed)
    kernel = fresh_kernel(random_policy(rng))
    for index in range(n):
        kind = rng.choice(["email.send", "db.query", "web.browse"])
        kernel.issue(kind, valid_params_for(kind, rng), f"s{index}",
                     rng.choice(list(TrustLevel)), rng.choice(list(Phase)))
    return kernel.chain


def recompute_hash_independently(record):
    """Second call path for the digest: rebuilds the preimage from scratch."""
    directive_obj = json.loads(record.directive.canonical)
    body = json.dumps(
        {
            "seq": record.seq,
            "directive": directive_obj,
            "decision": {
                "verdict": record.decision.verdict.value,
                "reason": record.decision.reason.value,
            },
            "exec_status": record.exec_status.value,
            "result_digest": record.result_digest.hex(),
            "prev_hash": record.prev_hash.hex(),
        },
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    digest = hashlib.new("sha256")
    digest.update(record.prev_hash)
    digest.update(body)
    return digest.digest()


def test_genesis_record():
    chain = Chain()
    record = chain.append(directive(1), ALLOW_GRANTED, ExecStatus.EXECUTED, b"\x11" * 32)
    assert record.seq == 0
    assert record.prev_hash == ZERO_DIGEST


def test_second_record_links_to_first():
    chain = Chain()
    first = chain.append(directive(1), ALLOW_GRANTED, ExecStatus.EXECUTED, b"\x11" * 32)
    second = chain.append(directive(2), DENY_NO_CAPABILITY, ExecStatus.SKIPPED, ZERO_DIGEST)
    assert second.prev_hash == first.this_hash
    assert second.seq == 1


def test_thousand_appends_verify_against_independent_recompute():
    chain = build_chain(1000, seed=5)
    assert len(chain) == 1000
    assert chain.verify().valid
    prev = ZERO_DIGEST
    for record in chain.records:
        assert record.prev_hash == prev
        assert recompute_hash_independently(record) == record.this_hash
        prev = record.this_hash


def test_empty_chain_is_valid():
    assert Chain().verify().valid
    assert import_chain(b"") == Chain()


def test_kernel_chains_verify():
    for seed in range(5):
        assert build_chain(20, seed=seed).verify().valid


def test_from_records_refuses_tampered_records():
    chain = build_chain(10, seed=1)
    records = list(chain.records)
    bad = records[5]
    records[5] = ProvenanceRecord(
        seq=bad.seq,
        directive=directive(999, params={"to": "evil@example.test", "body": "swap"}),
        decision=bad.decision,
        exec_status=bad.exec_status,
        result_digest=bad.result_digest,
        prev_hash=bad.prev_hash,
        this_hash=bad.this_hash,
    )
    with pytest.raises(ChainIntegrityError) as excinfo:
        Chain.from_records(records)
    assert excinfo.value.index == 5


def flip_bit(data: bytearray, bit_index: int) -> None:
    data[bit_index // 8] ^= 1 << (bit_index % 8)


def test_single_bit_flip_always_detected():
    rng = random.Random(99)
    chains = [build_chain(10, seed=seed) for seed in range(5)]
    for _ in range(500):
        chain = rng.choice(chains)
        lines = chain.export().split(b"\n")[:-1]
        target = rng.randrange(len(lines))
        mutated = bytearray(lines[target])
        flip_bit(mutated, rng.randrange(len(mutated) * 8))
        lines[target] = bytes(mutated)
        blob = b"".join(line + b"\n" for line in lines)
        try:
            import_chain(blob)
        except ChainFormatError as exc:
            assert exc.line_number - 1 <= target
        except ChainIntegrityError as exc:
            assert exc.index <= target
        else:
            raise AssertionError(f"flip in record {target} went undetected")


def test_export_import_roundtrip():
    for seed in range(5):
        chain = build_chain(15, seed=seed)
        blob = chain.export()
        again = import_chain(blob)
        assert again == chain
        assert again.export() == blob


def test_import_reports_index_of_edited_record():
    chain = build_chain(6, seed=3)
    lines = chain.export().split(b"\n")[:-1]
    lines[3] = lines[3].replace(b'"seq":3', b'"seq":4')
    with pytest.raises(ChainIntegrityError) as excinfo:
        import_chain(b"".join(line + b"\n" for line in lines))
    assert excinfo.value.index == 3


def test_import_truncated_line_reports_line_number():
    chain = build_chain(4, seed=2)
    blob = chain.export()[:-40]  # cut mid-record
    with pytest.raises(ChainFormatError) as excinfo:
        import_chain(blob)
    assert excinfo.value.line_number == 4


def test_line_format_fixed_order_and_lowercase_hex():
    chain = build_chain(3, seed=8)
    pattern = re.compile(
        br'\{"seq":\d+,"directive":\{.*\},"decision":\{"verdict":"[a-z_]+","reason":"[a-z_]+"\},'
        br'"exec_status":"[a-z_]+","result_digest":"[0-9a-f]{64}",'
        br'"prev_hash":"[0-9a-f]{64}","this_hash":"[0-9a-f]{64}"\}'
    )
    for line in chain.export().split(b"\n")[:-1]:
        assert pattern.fullmatch(line), line


def test_chain_surface_is_append_only():
    mutators = {"remove", "pop", "insert", "sort", "reverse", "clear", "__setitem__",
                "__delitem__", "truncate"}
    assert not mutators & set(dir(Chain))
    chain = build_chain(2, seed=0)
    assert isinstance(chain.records, tuple)


def test_append_requires_digest_size():
    with pytest.raises(ValueError, match="32"):
        Chain().append(directive(1), ALLOW_GRANTED, ExecStatus.EXECUTED, b"\x00" * 8)


def test_non_canonical_line_rejected():
    chain = build_chain(2, seed=4)
    lines = chain.export().split(b"\n")[:-1]
    # Same JSON content, different spelling: extra whitespace.
    obj = json.loads(lines[1])
    lines[1] = json.dumps(obj, separators=(", ", ": ")).encode()
    with pytest.raises(ChainIntegrityError) as excinfo:
        import_chain(b"".join(line + b"\n" for line in lines))
    assert excinfo.value.index == 1
