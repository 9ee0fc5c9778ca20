"""CLI behavior: output contracts, exit codes, format stability."""

from __future__ import annotations

import io
import json
from pathlib import Path

from pqposture import cli
from pqposture.scenario import load_fixture, serialize_scenario

GOLDEN_DIR = Path(__file__).parent / "golden"


def run_cli(*argv: str) -> tuple[int, str]:
    buffer = io.StringIO()
    code = cli.main(list(argv), out=buffer)
    return code, buffer.getvalue()


class TestAnalyze:
    def test_cs1_exit_zero_and_summary(self):
        code, output = run_cli("analyze", "cs1-imessage-wpa3")
        assert code == 0
        assert (
            "posture: conf = Q-Safe, auth = Q-Unsafe, meta = Q-Unsafe, d* = 2"
            in output
        )
        assert "max(Q-Unsafe, Q-Unsafe, Q-Safe) = Q-Safe" in output
        assert "min(Q-Unsafe, Q-Unsafe, Q-Unsafe) = Q-Unsafe" in output
        assert "outermost(L2) = Q-Unsafe" in output

    def test_cs4_unsafe_exit_code(self):
        code, output = run_cli("analyze", "cs4")
        assert code == 2
        assert "posture: conf = Q-Unsafe, auth = Q-Unsafe, meta = Q-Unsafe, d* = 3" in output

    def test_cs2_dagger_in_table_mode(self):
        code, output = run_cli("analyze", "cs2")
        assert code == 2
        assert "Q-Unsafe†" in output
        assert "meta = outermost(L2) = Q-Unsafe†" in output

    def test_missing_file_exit_one(self, capsys):
        code, _ = run_cli("analyze", "missing.json")
        assert code == 1
        assert "missing.json" in capsys.readouterr().err

    def test_alias_and_full_name_agree(self):
        assert run_cli("analyze", "cs1") == run_cli("analyze", "cs1-imessage-wpa3")

    def test_scenario_file_path(self, tmp_path):
        doc = serialize_scenario(load_fixture("cs2"))
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        code, output = run_cli("analyze", str(path))
        assert code == 2
        assert "cs2-https-wpa2psk" in output

    def test_machine_mode_no_dagger_mechanism_field(self):
        code, output = run_cli("analyze", "cs2", "--format", "machine")
        assert code == 2
        assert "†" not in output
        records = [json.loads(line) for line in output.splitlines()]
        chain = next(r for r in records if r["record"] == "chain")
        assert chain["meta_level"] == "Q-Unsafe"
        assert chain["meta_mechanism"] == "grover"
        assert chain["conf_mechanism"] == "shor"
        layer2 = next(r for r in records if r["record"] == "layer" and r["id"] == "L2")
        assert layer2["conf_level"] == "Q-Unsafe"
        assert layer2["conf_mechanism"] == "grover"

    def test_format_flag_position_independent(self):
        before = run_cli("--format", "machine", "analyze", "cs1")
        after = run_cli("analyze", "cs1", "--format", "machine")
        assert before == after

    def test_empty_chain_scenario(self):
        code, output = run_cli("analyze", "localhost")
        assert code == 2
        assert "plaintext at wire" in output


class TestPeel:
    def test_cs2_rows_end_with_application_data(self):
        code, output = run_cli("peel", "cs2-https-wpa2psk")
        assert code == 0
        lines = output.splitlines()
        assert any(line.startswith("0") and "802.11" in line for line in lines)
        assert any(line.startswith("1") and "TLS SNI" in line for line in lines)
        assert lines[-1].startswith("2")
        assert lines[-1].endswith("All application data")

    def test_cs1_blocked_at_depth_three(self):
        _, output = run_cli("peel", "cs1")
        blocked = [line for line in output.splitlines() if line.startswith("3")]
        assert blocked and "BLOCKED" in blocked[0]

    def test_machine_records(self):
        _, output = run_cli("peel", "cs4-psk", "--format", "machine")
        records = [json.loads(line) for line in output.splitlines()]
        peels = [r for r in records if r["record"] == "peel"]
        assert [p["depth"] for p in peels] == [0, 1, 2, 3]
        assert [p["harvestable"] for p in peels] == [True, True, False, False]


class TestSegmentsEndpoints:
    def test_segments_table(self):
        code, output = run_cli("segments", "cs4")
        assert code == 0
        assert "AP -> VPN Server" in output
        assert "L3+L5-6" in output

    def test_segments_machine(self):
        _, output = run_cli("segments", "cs1", "--format", "machine")
        records = [json.loads(line) for line in output.splitlines()]
        segments = [r for r in records if r["record"] == "segment"]
        assert len(segments) == 4
        assert all(s["conf_level"] == "Q-Safe" for s in segments)

    def test_endpoints_table(self):
        code, output = run_cli("endpoints", "cs4")
        assert code == 0
        assert "VPN Server" in output
        assert "None" in output  # no quantum-resistant backstop
        assert "content reachable" in output

    def test_endpoints_trust_boundary_lines(self):
        _, output = run_cli("endpoints", "cs1")
        assert "trust boundary at Apple Relay: HNDL coincides" in output

    def test_endpoints_off_path_node(self):
        _, output = run_cli("endpoints", "cs3")
        assert "RADIUS" in output
        assert "not on the data path" in output


class TestPlanCompare:
    def test_plan_meta_weights_starts_outermost(self):
        code, output = run_cli("plan", "cs4", "--weights", "0,0,1")
        assert code == 0
        lines = [l for l in output.splitlines() if l.startswith("1 ")]
        assert lines and "L2" in lines[0]

    def test_plan_bad_weights_exit_one(self, capsys):
        code, _ = run_cli("plan", "cs4", "--weights", "1,1,1")
        assert code == 1
        assert "sum to 1" in capsys.readouterr().err

    def test_plan_machine_records(self):
        _, output = run_cli("plan", "cs2", "--weights", "0.5,0.5,0", "--format", "machine")
        records = [json.loads(line) for line in output.splitlines()]
        steps = [r for r in records if r["record"] == "plan_step"]
        assert len(steps) == 2
        final = next(r for r in records if r["record"] == "plan")
        assert final["cumulative_risk"] >= 0

    def test_compare_flags_inversion_with_mechanisms(self):
        code, output = run_cli("compare", "cs2", "cs3")
        assert code == 0
        assert "INVERSION" in output
        assert "grover -> shor" in output
        assert "Q-Weakened" in output

    def test_compare_machine_layer_scope(self):
        _, output = run_cli("compare", "cs2", "cs3", "--format", "machine")
        records = [json.loads(line) for line in output.splitlines()]
        layer_auth = next(
            r
            for r in records
            if r["record"] == "comparison" and r["scope"] == "layer"
            and r["osi"] == 2 and r["facet"] == "auth"
        )
        assert layer_auth["a_level"] == "Q-Weakened"
        assert layer_auth["b_level"] == "Q-Unsafe"
        assert layer_auth["a_mechanism"] == "grover"
        assert layer_auth["b_mechanism"] == "shor"
        assert layer_auth["inverted"] is True
        verdict = next(r for r in records if r["record"] == "inversion")
        assert verdict["detected"] is True

    def test_compare_without_rank_exit_one(self, capsys):
        code, _ = run_cli("compare", "cs2", "cs4")
        assert code == 1
        assert "classical_rank" in capsys.readouterr().err


class TestRegistryFixtures:
    def test_registry_list(self):
        code, output = run_cli("registry", "list")
        assert code == 0
        assert "ML-KEM-768" in output
        assert "Q-Unsafe†" in output

    def test_registry_list_machine(self):
        _, output = run_cli("registry", "list", "--format", "machine")
        records = [json.loads(line) for line in output.splitlines()]
        assert all(r["record"] == "registry_entry" for r in records)
        assert any(r["name"] == "AES-128-CCMP" and r["mechanism"] == "grover" for r in records)

    def test_registry_validate_good(self, tmp_path):
        good = tmp_path / "good.json"
        good.write_text("[]")
        code, output = run_cli("registry", "validate", str(good))
        assert code == 0
        assert output.startswith("OK")

    def test_registry_validate_bad(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps([{"name": "x", "role": "KEX"}]))
        code, _ = run_cli("registry", "validate", str(bad))
        assert code == 1
        assert "level" in capsys.readouterr().err

    def test_registry_flag_overrides_analysis(self, tmp_path):
        # A what-if override: post-quantum keys for the TLS layer flip CS2.
        override = tmp_path / "override.json"
        override.write_text(
            json.dumps(
                [
                    {
                        "name": "X25519",
                        "role": "KEX",
                        "level": "Q-Safe",
                        "mechanism": "none",
                        "classical_bits": 128,
                        "post_quantum_bits": 128,
                        "note": "what-if: swapped for a PQ KEM",
                    }
                ]
            )
        )
        code, _ = run_cli("analyze", "cs2", "--registry", str(override))
        assert code == 0

    def test_fixtures_list(self):
        code, output = run_cli("fixtures", "list")
        assert code == 0
        for name in (
            "cs1-imessage-wpa3",
            "cs2-https-wpa2psk",
            "cs3-https-wpa2ent",
            "cs4-https-wpa3-wireguard",
            "cs4-psk",
            "localhost-plaintext",
        ):
            assert name in output
        assert "extrapolation" in output

    def test_no_command_exit_one(self, capsys):
        code, _ = run_cli()
        assert code == 1
        capsys.readouterr()

    def test_unknown_command_exit_one(self, capsys):
        code, _ = run_cli("frobnicate")
        assert code == 1
        capsys.readouterr()


class TestMachineStability:
    def test_repeated_runs_byte_identical(self):
        for name in ("cs1", "cs2", "cs3", "cs4", "cs4-psk"):
            first = run_cli("analyze", name, "--format", "machine")
            second = run_cli("analyze", name, "--format", "machine")
            assert first == second

    def test_golden_machine_output(self):
        # Frozen line-oriented output for the four case studies; any
        # change here is a contract break, not a refactor.
        for alias, filename in (
            ("cs1", "cs1.analyze.jsonl"),
            ("cs2", "cs2.analyze.jsonl"),
            ("cs3", "cs3.analyze.jsonl"),
            ("cs4", "cs4.analyze.jsonl"),
        ):
            _, output = run_cli("analyze", alias, "--format", "machine")
            expected = (GOLDEN_DIR / filename).read_text()
            assert output == expected, alias
