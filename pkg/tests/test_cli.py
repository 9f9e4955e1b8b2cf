"""CLI subcommands and the exit-code contract."""

import json

from effectgov import bundled_path
from effectgov.cli import main


SCENARIO = str(bundled_path("exfiltration_scenario.json"))
POLICY_EMAIL_DB = str(bundled_path("policy_email_db.json"))
POLICY_ALL = str(bundled_path("policy_all_tools.json"))
POLICY_FILTER = str(bundled_path("policy_email_filter.json"))
MANIFEST = str(bundled_path("capability_manifest.json"))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_exfiltration_scenario(tmp_path, capsys):
    out = tmp_path / "chain.jsonl"
    code, stdout, _ = run_cli(
        capsys, "run", "--scenario", SCENARIO, "--policy", POLICY_EMAIL_DB, "--out", str(out)
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["records"] == 2
    assert summary["allows"] == 1
    assert summary["denies"] == 1
    assert summary["world"] == {"emails_sent": 0, "db_reads": 1, "urls_fetched": 0}
    assert out.exists()


def test_run_all_tools_policy_exfiltrates_faithfully(tmp_path, capsys):
    out = tmp_path / "chain.jsonl"
    code, stdout, _ = run_cli(
        capsys, "run", "--scenario", SCENARIO, "--policy", POLICY_ALL, "--out", str(out)
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["denies"] == 0
    assert summary["world"]["urls_fetched"] == 1


def test_run_uses_scenario_policy_reference(tmp_path, capsys):
    # The bundled scenario names its own policy; --policy is optional.
    out = tmp_path / "chain.jsonl"
    code, stdout, _ = run_cli(capsys, "run", "--scenario", SCENARIO, "--out", str(out))
    assert code == 0
    summary = json.loads(stdout)
    assert summary["denies"] == 1


def test_run_without_any_policy_is_usage_error(tmp_path, capsys):
    scenario = tmp_path / "bare.json"
    scenario.write_text(json.dumps({
        "input": 1,
        "workflow": {"step": {"name": "s", "fn": {"op": "input"}}},
    }))
    code, _, stderr = run_cli(
        capsys, "run", "--scenario", str(scenario), "--out", str(tmp_path / "c.jsonl")
    )
    assert code == 2
    assert "no policy" in stderr


def test_run_missing_policy_file(tmp_path, capsys):
    code, _, stderr = run_cli(
        capsys, "run", "--scenario", SCENARIO, "--policy", str(tmp_path / "nope.json"),
        "--out", str(tmp_path / "chain.jsonl"),
    )
    assert code == 2
    assert "policy" in stderr


def test_verify_chain_from_run(tmp_path, capsys):
    out = tmp_path / "chain.jsonl"
    run_cli(capsys, "run", "--scenario", SCENARIO, "--policy", POLICY_EMAIL_DB, "--out", str(out))
    code, stdout, _ = run_cli(capsys, "verify", str(out))
    assert code == 0
    assert json.loads(stdout)["valid"] is True


def test_verify_hand_edited_record(tmp_path, capsys):
    out = tmp_path / "chain.jsonl"
    run_cli(capsys, "run", "--scenario", SCENARIO, "--policy", POLICY_EMAIL_DB, "--out", str(out))
    lines = out.read_bytes().split(b"\n")
    lines[1] = lines[1].replace(b'"web.browse"', b'"web.search"', 1)
    out.write_bytes(b"\n".join(lines))
    code, stdout, _ = run_cli(capsys, "verify", str(out))
    assert code == 1
    assert json.loads(stdout) == {"valid": False, "first_bad_index": 1}


def test_verify_empty_file_is_valid(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_bytes(b"")
    code, stdout, _ = run_cli(capsys, "verify", str(empty))
    assert code == 0
    assert json.loads(stdout) == {"valid": True, "records": 0}


def test_verify_garbage_is_usage_error(tmp_path, capsys):
    garbage = tmp_path / "garbage.jsonl"
    garbage.write_bytes(b"not a chain\n")
    code, _, stderr = run_cli(capsys, "verify", str(garbage))
    assert code == 2
    assert "line 1" in stderr


def test_regions_flagship_configuration(capsys):
    code, stdout, _ = run_cli(
        capsys, "regions", "--capabilities", MANIFEST, "--policy", POLICY_FILTER
    )
    assert code == 1
    report = json.loads(stdout)
    assert report == {
        "governed": ["email.send"],
        "ungoverned": ["db.query", "web.browse"],
        "theater": ["credit_card.scan"],
        "coterminous": False,
    }


def test_regions_matched_manifests(tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "regions", "--capabilities", MANIFEST, "--policy", POLICY_ALL
    )
    assert code == 0
    assert json.loads(stdout)["coterminous"] is True


def test_regions_both_empty(tmp_path, capsys):
    manifest = tmp_path / "caps.json"
    manifest.write_text('{"capabilities": []}')
    policy = tmp_path / "policy.json"
    policy.write_text('{"rules": []}')
    code, stdout, _ = run_cli(capsys, "regions", "--capabilities", str(manifest),
                              "--policy", str(policy))
    assert code == 0
    assert json.loads(stdout)["coterminous"] is True


def test_simulate_monitor_reports_both_numbers(capsys):
    code, stdout, _ = run_cli(
        capsys, "simulate-monitor", "--coverage", "0.99", "--actions", "100",
        "--trials", "20000", "--seed", "7",
    )
    assert code == 0
    report = json.loads(stdout)
    assert abs(report["analytic"] - 0.63397) < 0.0005
    assert abs(report["empirical"] - report["analytic"]) < 0.02


def test_simulate_monitor_full_coverage(capsys):
    code, stdout, _ = run_cli(
        capsys, "simulate-monitor", "--coverage", "1.0", "--actions", "500",
        "--trials", "1000", "--seed", "1",
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["analytic"] == 0.0
    assert report["empirical"] == 0.0


def test_simulate_monitor_zero_trials_is_usage_error(capsys):
    code, _, stderr = run_cli(
        capsys, "simulate-monitor", "--coverage", "0.5", "--actions", "10", "--trials", "0"
    )
    assert code == 2
    assert "trials" in stderr


def test_bench_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, stdout, _ = run_cli(
        capsys, "bench", "--iters", "10", "--warmup", "2", "--context-size", "256",
        "--out", str(out),
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["governed"]["iterations"] == 10
    assert report["reference_medians_ms"]["governed"] == 0.23
    assert json.loads(out.read_text()) == report


def test_human_flags(capsys, tmp_path):
    out = tmp_path / "chain.jsonl"
    code, stdout, _ = run_cli(
        capsys, "run", "--scenario", SCENARIO, "--policy", POLICY_EMAIL_DB,
        "--out", str(out), "--human",
    )
    assert code == 0
    assert "records 2" in stdout
    code, stdout, _ = run_cli(
        capsys, "regions", "--capabilities", MANIFEST, "--policy", POLICY_FILTER, "--human"
    )
    assert code == 1
    assert "NOT coterminous" in stdout


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2


def test_missing_required_flag_is_usage_error(capsys):
    assert main(["run", "--scenario", SCENARIO]) == 2
