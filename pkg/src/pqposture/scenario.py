"""Scenario documents: strict JSON parsing, serialization, bundled fixtures.

A scenario describes one communication setup end to end: the layer stack
(with key chains and operations named against the algorithm registry), the
physical path with per-node exposure and layer terminations, the wire-level
observation tags, and an optional classical-strength ordinal for
comparisons. Documents are versioned JSON; unknown fields are rejected so
a typo in security-relevant input cannot pass silently.

Five scenarios ship as built-in fixtures covering the documented case
studies, plus a separate loopback extrapolation with an empty chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from .chain import (
    AuthOp,
    Chain,
    HybridSource,
    KexSource,
    KeyChain,
    KeySource,
    LayerSpec,
    MacAuth,
    PreSharedSource,
    SignatureAuth,
)
from .errors import (
    ChainError,
    PathError,
    RegistryError,
    ScenarioError,
    StatusError,
)
from .paths import NodeRole, Path, PathNode, Segment
from .registry import AlgorithmEntry, Registry, Role, parse_entry, serialize_entry
from .status import PqcStatus

SCHEMA_VERSION = 1

FIXTURE_NAMES = (
    "cs1-imessage-wpa3",
    "cs2-https-wpa2psk",
    "cs3-https-wpa2ent",
    "cs4-https-wpa3-wireguard",
    "cs4-psk",
)

#: Documented extrapolations, excluded from the golden fixture set.
EXTRAPOLATION_NAMES = ("localhost-plaintext",)

FIXTURE_ALIASES = {
    "cs1": "cs1-imessage-wpa3",
    "cs2": "cs2-https-wpa2psk",
    "cs3": "cs3-https-wpa2ent",
    "cs4": "cs4-https-wpa3-wireguard",
    "localhost": "localhost-plaintext",
}


@dataclass(frozen=True)
class ScenarioDoc:
    """A fully validated scenario, ready for analysis."""

    name: str
    description: str
    chain: Chain
    path: Path
    layers: tuple[LayerSpec, ...]
    classical_rank: int | None
    registry: Registry
    registry_overrides: tuple[AlgorithmEntry, ...]


class _Fields:
    """Strict view over one JSON object; tracks consumed keys."""

    def __init__(self, data: Any, path: str) -> None:
        if not isinstance(data, Mapping):
            raise ScenarioError(path, f"expected an object, got {_kind(data)}")
        self.data = data
        self.path = path
        self._taken: set[str] = set()

    def take(self, key: str, required: bool = False, default: Any = None) -> Any:
        self._taken.add(key)
        if key in self.data:
            return self.data[key]
        if required:
            raise ScenarioError(self.path, f"missing required field {key!r}")
        return default

    def has(self, key: str) -> bool:
        return key in self.data

    def at(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def close(self) -> None:
        unknown = sorted(set(self.data) - self._taken)
        if unknown:
            raise ScenarioError(self.path, f"unknown field(s) {unknown}")


def _kind(value: Any) -> str:
    return type(value).__name__


def _str(value: Any, path: str, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise ScenarioError(path, f"expected a string, got {_kind(value)}")
    if not value and not allow_empty:
        raise ScenarioError(path, "must be nonempty")
    return value


def _int(value: Any, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScenarioError(path, f"expected an integer, got {_kind(value)}")
    return value


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(path, f"expected a boolean, got {_kind(value)}")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, f"expected an array, got {_kind(value)}")
    return value


def _tags(value: Any, path: str) -> tuple[str, ...]:
    items = _list(value, path)
    tags = []
    for i, item in enumerate(items):
        tag = _str(item, f"{path}[{i}]")
        if "\t" in tag or "\n" in tag:
            raise ScenarioError(f"{path}[{i}]", "tags may not contain tabs or newlines")
        tags.append(tag)
    return tuple(tags)


def _lookup(registry: Registry, name: Any, role: Role, path: str) -> AlgorithmEntry:
    text = _str(name, path)
    try:
        return registry.lookup(text, role)
    except RegistryError as exc:
        raise ScenarioError(path, str(exc)) from None


def _parse_status(value: Any, path: str) -> PqcStatus:
    try:
        return PqcStatus.from_render(_str(value, path))
    except StatusError as exc:
        raise ScenarioError(path, str(exc)) from None


def _parse_key_source(data: Any, path: str, registry: Registry) -> KeySource:
    fields = _Fields(data, path)
    variants = [k for k in ("kex", "pre_shared", "hybrid") if fields.has(k)]
    if len(variants) != 1:
        raise ScenarioError(
            path, "key source must have exactly one of kex / pre_shared / hybrid"
        )
    kind = variants[0]
    value = fields.take(kind)
    fields.close()
    if kind == "kex":
        return KexSource(_lookup(registry, value, Role.KEX, fields.at("kex")))
    if kind == "pre_shared":
        sub = _Fields(value, fields.at("pre_shared"))
        status = _parse_status(sub.take("status", required=True), sub.at("status"))
        label = _str(sub.take("label", required=True), sub.at("label"))
        sub.close()
        return PreSharedSource(status=status, label=label)
    items = _list(value, fields.at("hybrid"))
    components = tuple(
        _parse_key_source(item, f"{fields.at('hybrid')}[{i}]", registry)
        for i, item in enumerate(items)
    )
    try:
        return HybridSource(components=components)
    except ChainError as exc:
        raise ScenarioError(fields.at("hybrid"), str(exc)) from None


def _parse_key_chain(data: Any, path: str, registry: Registry) -> KeyChain:
    fields = _Fields(data, path)
    root = _parse_key_source(fields.take("root", required=True), fields.at("root"), registry)
    steps = tuple(
        _lookup(registry, item, Role.KDF, f"{fields.at('kdf')}[{i}]")
        for i, item in enumerate(_list(fields.take("kdf", default=[]), fields.at("kdf")))
    )
    fields.close()
    return KeyChain(root=root, kdf_steps=steps)


def _parse_auth(
    data: Any, path: str, registry: Registry, layer_key: KeyChain
) -> AuthOp | None:
    if data is None:
        return None
    fields = _Fields(data, path)
    variants = [k for k in ("signature", "mac") if fields.has(k)]
    if len(variants) != 1:
        raise ScenarioError(path, "auth must have exactly one of signature / mac")
    if variants[0] == "signature":
        entry = _lookup(
            registry, fields.take("signature"), Role.AUTH, fields.at("signature")
        )
        fields.close()
        return SignatureAuth(entry)
    sub = _Fields(fields.take("mac"), fields.at("mac"))
    fields.close()
    entry = _lookup(registry, sub.take("algorithm", required=True), Role.INT, sub.at("algorithm"))
    if sub.has("key"):
        key = _parse_key_chain(sub.take("key"), sub.at("key"), registry)
    else:
        sub.take("key")
        key = layer_key  # MAC keys default to the layer's own key chain
    sub.close()
    return MacAuth(entry=entry, key=key)


_LAYER_FIELDS = (
    "id", "template", "osi", "label", "protocol",
    "key", "enc", "auth", "integrity", "reveals",
)


def _parse_layer(
    data: Any,
    path: str,
    registry: Registry,
    raw_by_id: dict[str, Mapping],
) -> LayerSpec:
    fields = _Fields(data, path)
    unknown = sorted(set(fields.data) - set(_LAYER_FIELDS))
    if unknown:
        raise ScenarioError(path, f"unknown field(s) {unknown}")
    layer_id = _str(fields.take("id", required=True), fields.at("id"))
    if layer_id in raw_by_id:
        raise ScenarioError(fields.at("id"), f"duplicate layer id {layer_id!r}")
    if fields.has("template"):
        template_id = _str(fields.take("template"), fields.at("template"))
        template = raw_by_id.get(template_id)
        if template is None:
            raise ScenarioError(
                fields.at("template"),
                f"template {template_id!r} must name an earlier layer",
            )
        merged = dict(template)
        for key in _LAYER_FIELDS:
            if key in fields.data and key != "template":
                merged[key] = fields.data[key]
        merged["id"] = layer_id
        fields = _Fields(merged, path)
        fields.take("id")
    osi = _int(fields.take("osi", required=True), fields.at("osi"))
    label = _str(fields.take("label", default=f"L{osi}"), fields.at("label"))
    protocol = _str(fields.take("protocol", required=True), fields.at("protocol"))
    key_chain = _parse_key_chain(fields.take("key", required=True), fields.at("key"), registry)
    enc_name = fields.take("enc")
    enc = None if enc_name is None else _lookup(registry, enc_name, Role.ENC, fields.at("enc"))
    auth = _parse_auth(fields.take("auth"), fields.at("auth"), registry, key_chain)
    int_name = fields.take("integrity")
    int_op = (
        None if int_name is None else _lookup(registry, int_name, Role.INT, fields.at("integrity"))
    )
    reveals = _tags(fields.take("reveals", default=[]), fields.at("reveals"))
    fields.close()
    raw_by_id[layer_id] = dict(fields.data)
    try:
        return LayerSpec(
            layer_id=layer_id,
            osi_index=osi,
            protocol=protocol,
            key_chain=key_chain,
            enc_op=enc,
            auth_op=auth,
            int_op=int_op,
            label=label,
            reveals=reveals,
        )
    except ChainError as exc:
        raise ScenarioError(path, str(exc)) from None


def _parse_node(data: Any, path: str) -> PathNode:
    fields = _Fields(data, path)
    name = _str(fields.take("name", required=True), fields.at("name"))
    try:
        role = NodeRole.from_render(
            _str(fields.take("role", required=True), fields.at("role"))
        )
    except PathError as exc:
        raise ScenarioError(fields.at("role"), str(exc)) from None
    exposure = _tags(
        fields.take("classical_exposure", default=[]), fields.at("classical_exposure")
    )
    on_path = _bool(fields.take("on_data_path", default=True), fields.at("on_data_path"))
    fields.close()
    return PathNode(
        name=name, role=role, classical_exposure=exposure, on_data_path=on_path
    )


def _resolve_layers(
    ids: Any, path: str, pool: Mapping[str, LayerSpec]
) -> tuple[LayerSpec, ...]:
    resolved = []
    for i, item in enumerate(_list(ids, path)):
        layer_id = _str(item, f"{path}[{i}]")
        layer = pool.get(layer_id)
        if layer is None:
            raise ScenarioError(f"{path}[{i}]", f"unknown layer id {layer_id!r}")
        resolved.append(layer)
    return tuple(resolved)


def _parse_path(
    data: Any, path: str, pool: Mapping[str, LayerSpec]
) -> Path:
    fields = _Fields(data, path)
    nodes = tuple(
        _parse_node(item, f"{fields.at('nodes')}[{i}]")
        for i, item in enumerate(_list(fields.take("nodes", required=True), fields.at("nodes")))
    )
    segments = []
    for i, item in enumerate(
        _list(fields.take("segments", required=True), fields.at("segments"))
    ):
        seg_path = f"{fields.at('segments')}[{i}]"
        seg = _Fields(item, seg_path)
        src = _str(seg.take("from", required=True), seg.at("from"))
        dst = _str(seg.take("to", required=True), seg.at("to"))
        layers = _resolve_layers(seg.take("layers", required=True), seg.at("layers"), pool)
        seg.close()
        try:
            segments.append(Segment(src=src, dst=dst, active_layers=layers))
        except PathError as exc:
            raise ScenarioError(seg_path, str(exc)) from None
    term_data = fields.take("terminations", default={})
    if not isinstance(term_data, Mapping):
        raise ScenarioError(fields.at("terminations"), "expected an object")
    terminations = {}
    for node_name, ids in term_data.items():
        where = f"{fields.at('terminations')}.{node_name}"
        resolved = _resolve_layers(ids, where, pool)
        terminations[node_name] = tuple(l.layer_id for l in resolved)
    fields.close()
    try:
        return Path(nodes=nodes, segments=tuple(segments), terminations=terminations)
    except PathError as exc:
        raise ScenarioError(path, str(exc)) from None


def parse_scenario(
    document: str | bytes | Mapping[str, Any], registry: Registry | None = None
) -> ScenarioDoc:
    """Parse and fully validate a scenario document.

    ``registry`` is the base catalog (built-in when omitted); the document's
    own overrides apply on top of it. All cross-references and structural
    invariants are checked here, so a returned ScenarioDoc is analyzable
    without further errors.
    """
    if isinstance(document, (str, bytes)):
        text = document.decode() if isinstance(document, bytes) else document
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(
                "", f"not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
            ) from None
    else:
        data = document
    fields = _Fields(data, "")
    version = _int(fields.take("version", required=True), "version")
    if version != SCHEMA_VERSION:
        raise ScenarioError("version", f"unsupported version {version}, expected {SCHEMA_VERSION}")
    name = _str(fields.take("name", required=True), "name")
    description = _str(fields.take("description", default=""), "description", allow_empty=True)
    rank = fields.take("classical_rank")
    classical_rank = None if rank is None else _int(rank, "classical_rank")

    base = registry if registry is not None else Registry.builtin()
    overrides = []
    for i, item in enumerate(
        _list(fields.take("registry_overrides", default=[]), "registry_overrides")
    ):
        try:
            overrides.append(parse_entry(item, where=f"registry_overrides[{i}]"))
        except RegistryError as exc:
            raise ScenarioError("", str(exc)) from None
    try:
        effective = base.with_entries(overrides)
    except RegistryError as exc:
        raise ScenarioError("registry_overrides", str(exc)) from None

    raw_by_id: dict[str, Mapping] = {}
    pool: dict[str, LayerSpec] = {}
    layers = []
    for i, item in enumerate(_list(fields.take("layers", required=True), "layers")):
        layer = _parse_layer(item, f"layers[{i}]", effective, raw_by_id)
        pool[layer.layer_id] = layer
        layers.append(layer)

    wire = _tags(fields.take("wire_exposure", default=[]), "wire_exposure")
    chain_layers = _resolve_layers(fields.take("chain", required=True), "chain", pool)
    try:
        chain = Chain(layers=chain_layers, wire_reveals=wire)
    except ChainError as exc:
        raise ScenarioError("chain", str(exc)) from None

    path = _parse_path(fields.take("path", required=True), "path", pool)
    fields.close()

    chain_ids = {l.layer_id for l in chain.layers}
    first_ids = {l.layer_id for l in path.segments[0].active_layers}
    if chain_ids != first_ids:
        raise ScenarioError(
            "path.segments[0]",
            "the first segment must carry exactly the chain's layers "
            f"(chain {sorted(chain_ids)}, segment {sorted(first_ids)})",
        )
    used = set(chain_ids)
    for segment in path.segments:
        used |= {l.layer_id for l in segment.active_layers}
    unused = sorted(set(pool) - used)
    if unused:
        raise ScenarioError("layers", f"layer(s) {unused} appear in no chain or segment")

    return ScenarioDoc(
        name=name,
        description=description,
        chain=chain,
        path=path,
        layers=tuple(layers),
        classical_rank=classical_rank,
        registry=effective,
        registry_overrides=tuple(overrides),
    )


def _serialize_key_source(source: KeySource) -> dict[str, Any]:
    if isinstance(source, KexSource):
        return {"kex": source.entry.name}
    if isinstance(source, PreSharedSource):
        return {"pre_shared": {"status": source.status.render, "label": source.label}}
    return {"hybrid": [_serialize_key_source(c) for c in source.components]}


def _serialize_key_chain(chain: KeyChain) -> dict[str, Any]:
    out: dict[str, Any] = {"root": _serialize_key_source(chain.root)}
    if chain.kdf_steps:
        out["kdf"] = [step.name for step in chain.kdf_steps]
    return out


def _serialize_layer(layer: LayerSpec) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": layer.layer_id,
        "osi": layer.osi_index,
        "label": layer.label,
        "protocol": layer.protocol,
        "key": _serialize_key_chain(layer.key_chain),
    }
    if layer.enc_op is not None:
        out["enc"] = layer.enc_op.name
    if isinstance(layer.auth_op, SignatureAuth):
        out["auth"] = {"signature": layer.auth_op.entry.name}
    elif isinstance(layer.auth_op, MacAuth):
        mac: dict[str, Any] = {"algorithm": layer.auth_op.entry.name}
        if layer.auth_op.key != layer.key_chain:
            mac["key"] = _serialize_key_chain(layer.auth_op.key)
        out["auth"] = {"mac": mac}
    if layer.int_op is not None:
        out["integrity"] = layer.int_op.name
    if layer.reveals:
        out["reveals"] = list(layer.reveals)
    return out


def serialize_scenario(doc: ScenarioDoc) -> dict[str, Any]:
    """Canonical JSON-ready form; parses back to the same scenario."""
    out: dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "name": doc.name,
    }
    if doc.description:
        out["description"] = doc.description
    if doc.classical_rank is not None:
        out["classical_rank"] = doc.classical_rank
    if doc.registry_overrides:
        out["registry_overrides"] = [
            serialize_entry(e) for e in doc.registry_overrides
        ]
    out["layers"] = [_serialize_layer(layer) for layer in doc.layers]
    out["chain"] = [layer.layer_id for layer in doc.chain.layers]
    if doc.chain.wire_reveals:
        out["wire_exposure"] = list(doc.chain.wire_reveals)
    out["path"] = {
        "nodes": [
            {
                "name": node.name,
                "role": node.role.value,
                **(
                    {"classical_exposure": list(node.classical_exposure)}
                    if node.classical_exposure
                    else {}
                ),
                **({} if node.on_data_path else {"on_data_path": False}),
            }
            for node in doc.path.nodes
        ],
        "segments": [
            {
                "from": seg.src,
                "to": seg.dst,
                "layers": [l.layer_id for l in seg.active_layers],
            }
            for seg in doc.path.segments
        ],
        "terminations": {
            name: list(ids) for name, ids in doc.path.terminations.items() if ids
        },
    }
    return out


def _fixture_text(name: str) -> str:
    try:
        return (
            resources.files("pqposture.fixtures").joinpath(f"{name}.json").read_text()
        )
    except FileNotFoundError:
        raise ScenarioError("", f"no bundled fixture named {name!r}") from None


def resolve_fixture_name(name: str) -> str | None:
    """Canonical fixture name for ``name`` (alias or exact), else None."""
    canonical = FIXTURE_ALIASES.get(name, name)
    if canonical in FIXTURE_NAMES or canonical in EXTRAPOLATION_NAMES:
        return canonical
    return None


def load_fixture(name: str, registry: Registry | None = None) -> ScenarioDoc:
    """Load one bundled fixture by canonical name or alias."""
    canonical = resolve_fixture_name(name)
    if canonical is None:
        raise ScenarioError("", f"no bundled fixture named {name!r}")
    return parse_scenario(_fixture_text(canonical), registry)


def builtin_fixtures(registry: Registry | None = None) -> list[ScenarioDoc]:
    """The five bundled case-study scenarios, in canonical order."""
    return [load_fixture(name, registry) for name in FIXTURE_NAMES]


def localhost_extrapolation(registry: Registry | None = None) -> ScenarioDoc:
    """The empty-chain loopback scenario.

    An extrapolation kept out of builtin_fixtures(): no documented profile
    backs it, so it never participates in golden comparisons.
    """
    return load_fixture("localhost-plaintext", registry)
