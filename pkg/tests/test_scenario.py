"""Scenario parsing, strict validation, serialization round-trips, fixtures."""

from __future__ import annotations

import copy
import json

import pytest

from pqposture.chain import HybridSource, KexSource, MacAuth, PreSharedSource
from pqposture.compose import compose
from pqposture.errors import ScenarioError
from pqposture.scenario import (
    EXTRAPOLATION_NAMES,
    FIXTURE_NAMES,
    builtin_fixtures,
    load_fixture,
    localhost_extrapolation,
    parse_scenario,
    resolve_fixture_name,
    serialize_scenario,
)
from pqposture.status import Q_SAFE, Q_WEAKENED, Mechanism, PqcLevel


def minimal_doc() -> dict:
    return {
        "version": 1,
        "name": "minimal",
        "layers": [
            {
                "id": "L5-6",
                "osi": 5,
                "label": "L5-6",
                "protocol": "TLS 1.3",
                "key": {"root": {"kex": "X25519"}},
                "enc": "AES-256-GCM",
                "auth": {"signature": "ECDSA-P256"},
            }
        ],
        "chain": ["L5-6"],
        "path": {
            "nodes": [
                {"name": "a", "role": "sender"},
                {"name": "b", "role": "recipient"},
            ],
            "segments": [{"from": "a", "to": "b", "layers": ["L5-6"]}],
            "terminations": {"b": ["L5-6"]},
        },
    }


class TestParsing:
    def test_minimal_document(self):
        doc = parse_scenario(minimal_doc())
        assert doc.name == "minimal"
        assert len(doc.chain) == 1
        assert doc.classical_rank is None

    def test_parse_from_text(self):
        doc = parse_scenario(json.dumps(minimal_doc()))
        assert doc.name == "minimal"

    def test_invalid_json_reports_position(self):
        with pytest.raises(ScenarioError) as err:
            parse_scenario("{oops")
        assert "line" in str(err.value)

    def test_version_required_and_checked(self):
        data = minimal_doc()
        data["version"] = 2
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "version" in str(err.value)
        del data["version"]
        with pytest.raises(ScenarioError):
            parse_scenario(data)

    def test_unknown_top_level_field_rejected(self):
        data = minimal_doc()
        data["sidecar"] = True
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "sidecar" in str(err.value)

    def test_unknown_layer_field_rejected(self):
        data = minimal_doc()
        data["layers"][0]["cipher"] = "oops"
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "cipher" in str(err.value)

    def test_unknown_algorithm_names_field(self):
        data = minimal_doc()
        data["layers"][0]["enc"] = "AES-512"
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        message = str(err.value)
        assert "AES-512" in message
        assert "layers[0].enc" in message

    def test_ordering_violation(self):
        data = minimal_doc()
        data["layers"].append(
            {
                "id": "L2",
                "osi": 2,
                "protocol": "WPA2-PSK",
                "key": {
                    "root": {"pre_shared": {"status": "Q-Weakened", "label": "PMK"}}
                },
                "enc": "AES-128-CCMP",
            }
        )
        data["chain"] = ["L5-6", "L2"]
        data["path"]["segments"][0]["layers"] = ["L2", "L5-6"]
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "chain" in str(err.value)

    def test_dangling_layer_reference(self):
        data = minimal_doc()
        data["chain"] = ["L9"]
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "L9" in str(err.value)

    def test_dangling_node_reference(self):
        data = minimal_doc()
        data["path"]["segments"][0]["to"] = "ghost"
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "ghost" in str(err.value)

    def test_unused_layer_rejected(self):
        data = minimal_doc()
        data["layers"].append(
            {
                "id": "spare",
                "osi": 7,
                "protocol": "x",
                "key": {"root": {"kex": "X25519"}},
                "enc": "AES-256-GCM",
            }
        )
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "spare" in str(err.value)

    def test_first_segment_must_carry_chain(self):
        data = minimal_doc()
        data["path"]["segments"][0]["layers"] = []
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "first segment" in str(err.value)

    def test_pre_shared_uses_canonical_render_strings(self):
        data = minimal_doc()
        data["layers"][0]["key"] = {
            "root": {"pre_shared": {"status": "Q-Unsafe†", "label": "weak PSK"}}
        }
        doc = parse_scenario(data)
        root = doc.chain.layers[0].key_chain.root
        assert isinstance(root, PreSharedSource)
        assert root.status.level is PqcLevel.Q_UNSAFE
        assert root.status.mechanism is Mechanism.GROVER

    def test_key_source_exactly_one_variant(self):
        data = minimal_doc()
        data["layers"][0]["key"]["root"] = {
            "kex": "X25519",
            "pre_shared": {"status": "Q-Safe", "label": "x"},
        }
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert "exactly one" in str(err.value)

    def test_mac_key_defaults_to_layer_chain(self):
        data = minimal_doc()
        data["layers"][0]["auth"] = {"mac": {"algorithm": "HMAC-SHA1"}}
        doc = parse_scenario(data)
        auth = doc.chain.layers[0].auth_op
        assert isinstance(auth, MacAuth)
        assert auth.key == doc.chain.layers[0].key_chain

    def test_registry_override_applies_to_layers(self):
        data = minimal_doc()
        data["registry_overrides"] = [
            {
                "name": "CECPQ-experimental",
                "role": "KEX",
                "level": "Q-Safe",
                "mechanism": "none",
                "classical_bits": 192,
                "post_quantum_bits": 192,
            }
        ]
        data["layers"][0]["key"] = {"root": {"kex": "CECPQ-experimental"}}
        doc = parse_scenario(data)
        assert compose(doc.chain).chain_conf == Q_SAFE

    def test_scenario_error_carries_field_path(self):
        data = minimal_doc()
        data["layers"][0]["osi"] = "five"
        with pytest.raises(ScenarioError) as err:
            parse_scenario(data)
        assert err.value.path == "layers[0].osi"


class TestFixtures:
    def test_exactly_five_case_study_fixtures(self):
        docs = builtin_fixtures()
        assert [d.name for d in docs] == list(FIXTURE_NAMES)
        assert len(docs) == 5

    def test_fixtures_load_without_errors(self):
        for doc in builtin_fixtures():
            compose(doc.chain)  # self-validating: no exception

    def test_cs1_shape(self):
        doc = load_fixture("cs1")
        assert len(doc.chain) == 3
        root = doc.chain.layers[2].key_chain.root
        assert isinstance(root, HybridSource)
        names = {
            c.entry.name for c in root.components if isinstance(c, KexSource)
        }
        assert names == {"ML-KEM-1024", "ECDH-P256"}

    def test_cs2_l2_key_root(self):
        doc = load_fixture("cs2")
        root = doc.chain.layers[0].key_chain.root
        assert isinstance(root, PreSharedSource)
        assert root.status == Q_WEAKENED
        assert root.label == "PBKDF2 PMK"

    def test_cs3_l2_algorithms(self):
        doc = load_fixture("cs3")
        layer = doc.chain.layers[0]
        assert isinstance(layer.key_chain.root, KexSource)
        assert layer.key_chain.root.entry.name == "ECDHE-P256"
        assert layer.auth_op.entry.name == "RSA-2048+"

    def test_cs4_psk_hybrid_root(self):
        doc = load_fixture("cs4-psk")
        layer = doc.chain.by_id("L3")
        root = layer.key_chain.root
        assert isinstance(root, HybridSource)
        kinds = {type(c) for c in root.components}
        assert kinds == {KexSource, PreSharedSource}
        psk = next(c for c in root.components if isinstance(c, PreSharedSource))
        assert psk.status == Q_SAFE

    def test_classical_ranks(self):
        assert load_fixture("cs2").classical_rank == 1
        assert load_fixture("cs3").classical_rank == 2
        assert load_fixture("cs1").classical_rank is None
        assert load_fixture("cs4").classical_rank is None

    def test_aliases_resolve(self):
        assert resolve_fixture_name("cs1") == "cs1-imessage-wpa3"
        assert resolve_fixture_name("cs4-psk") == "cs4-psk"
        assert resolve_fixture_name("localhost") == "localhost-plaintext"
        assert resolve_fixture_name("nope") is None

    def test_localhost_extrapolation_is_separate(self):
        doc = localhost_extrapolation()
        assert doc.name in EXTRAPOLATION_NAMES
        assert doc.name not in FIXTURE_NAMES
        assert len(doc.chain) == 0

    def test_unknown_fixture_raises(self):
        with pytest.raises(ScenarioError):
            load_fixture("cs9")

    # Per-layer effective statuses for every fixture, (conf, auth) renders
    # outermost to innermost, matching the case-study profile tables.
    FIXTURE_PROFILES = {
        "cs1-imessage-wpa3": [
            ("L2", "Q-Unsafe", "Q-Unsafe"),
            ("L5-6", "Q-Unsafe", "Q-Unsafe"),
            ("L7", "Q-Safe", "Q-Unsafe"),
        ],
        "cs2-https-wpa2psk": [
            ("L2", "Q-Unsafe†", "Q-Weakened"),
            ("L5-6", "Q-Unsafe", "Q-Unsafe"),
        ],
        "cs3-https-wpa2ent": [
            ("L2", "Q-Unsafe", "Q-Unsafe"),
            ("L5-6", "Q-Unsafe", "Q-Unsafe"),
        ],
        "cs4-https-wpa3-wireguard": [
            ("L2", "Q-Unsafe", "Q-Unsafe"),
            ("L3", "Q-Unsafe", "Q-Unsafe"),
            ("L5-6", "Q-Unsafe", "Q-Unsafe"),
        ],
        "cs4-psk": [
            ("L2", "Q-Unsafe", "Q-Unsafe"),
            ("L3", "Q-Safe", "Q-Unsafe"),
            ("L5-6", "Q-Unsafe", "Q-Unsafe"),
        ],
    }

    def test_per_layer_profiles_match_fixture_tables(self):
        for name, expected in self.FIXTURE_PROFILES.items():
            report = compose(load_fixture(name).chain)
            got = [
                (p.layer.layer_id, p.conf.render, p.auth.render)
                for p in report.per_layer
            ]
            assert got == expected, name


class TestRoundTrip:
    def test_serialize_parse_identity_on_fixtures(self):
        for name in FIXTURE_NAMES + EXTRAPOLATION_NAMES:
            doc = load_fixture(name)
            first = serialize_scenario(doc)
            reparsed = parse_scenario(json.dumps(first))
            second = serialize_scenario(reparsed)
            assert first == second, name

    def test_round_trip_preserves_semantics(self):
        for name in FIXTURE_NAMES:
            doc = load_fixture(name)
            reparsed = parse_scenario(json.dumps(serialize_scenario(doc)))
            assert reparsed.name == doc.name
            assert reparsed.classical_rank == doc.classical_rank
            assert reparsed.chain == doc.chain
            assert reparsed.layers == doc.layers
            assert reparsed.path == doc.path
            assert compose(reparsed.chain) == compose(doc.chain)

    def test_serialization_is_deterministic(self):
        doc = load_fixture("cs1")
        assert json.dumps(serialize_scenario(doc), sort_keys=True) == json.dumps(
            serialize_scenario(load_fixture("cs1")), sort_keys=True
        )

    def test_minimal_doc_round_trip(self):
        doc = parse_scenario(minimal_doc())
        first = serialize_scenario(doc)
        assert serialize_scenario(parse_scenario(copy.deepcopy(first))) == first


class TestReadmeExamples:
    def test_documented_json_blocks_are_valid(self):
        # The scenario and registry examples in the README must parse.
        import re
        from pathlib import Path

        from pqposture.registry import load_registry

        text = (Path(__file__).parent.parent / "README.md").read_text()
        scenario_blocks = re.findall(r"```json\n(\{.*?\n)```", text, re.S)
        assert scenario_blocks
        for block in scenario_blocks:
            compose(parse_scenario(block).chain)
        registry_blocks = re.findall(r"```json\n(\[.*?\n)```", text, re.S)
        assert registry_blocks
        for block in registry_blocks:
            load_registry(block)
