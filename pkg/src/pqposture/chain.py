"""Message transformation chains: layers, key chains, effective statuses.

A chain is the ordered sequence of active cryptographic layers wrapped
around a message, outermost first. Each layer owns a key-derivation chain
(where its session keys come from), an optional encryption operation, an
optional authentication operation (signature or keyed MAC), and an
optional integrity operation.

The quantity that matters downstream is a layer's *effective* status:
a Q-Safe cipher keyed from a Shor-breakable exchange protects nothing,
so effective confidentiality is the meet of key-material status and
cipher status. Effective authentication depends only on the signature
scheme, or for a keyed MAC on the MAC and its key source.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ChainError
from .registry import AlgorithmEntry, Role
from .status import PqcStatus, join_all, meet


@dataclass(frozen=True, slots=True)
class KexSource:
    """Key material established by a key-exchange algorithm."""

    entry: AlgorithmEntry

    def __post_init__(self) -> None:
        if self.entry.role is not Role.KEX:
            raise ChainError(
                f"key source {self.entry.name!r} must have role KEX, "
                f"has {self.entry.role.value}"
            )


@dataclass(frozen=True, slots=True)
class PreSharedSource:
    """Key material distributed out of band, carrying a declared status."""

    status: PqcStatus
    label: str


@dataclass(frozen=True, slots=True)
class HybridSource:
    """Several key sources combined so the result is as strong as the strongest."""

    components: tuple[KeySource, ...]

    def __post_init__(self) -> None:
        if len(self.components) < 2:
            raise ChainError("hybrid key source needs at least 2 components")


KeySource = KexSource | PreSharedSource | HybridSource


@dataclass(frozen=True, slots=True)
class KeyChain:
    """A root key source followed by zero or more derivation steps."""

    root: KeySource
    kdf_steps: tuple[AlgorithmEntry, ...] = ()

    def __post_init__(self) -> None:
        for step in self.kdf_steps:
            if step.role is not Role.KDF:
                raise ChainError(
                    f"derivation step {step.name!r} must have role KDF, "
                    f"has {step.role.value}"
                )


@dataclass(frozen=True, slots=True)
class SignatureAuth:
    """Public-key authentication via a signature or certificate scheme."""

    entry: AlgorithmEntry

    def __post_init__(self) -> None:
        if self.entry.role is not Role.AUTH:
            raise ChainError(
                f"signature scheme {self.entry.name!r} must have role AUTH, "
                f"has {self.entry.role.value}"
            )


@dataclass(frozen=True, slots=True)
class MacAuth:
    """Symmetric authentication via a MAC keyed from some key chain."""

    entry: AlgorithmEntry
    key: KeyChain

    def __post_init__(self) -> None:
        if self.entry.role is not Role.INT:
            raise ChainError(
                f"MAC {self.entry.name!r} must have role INT, "
                f"has {self.entry.role.value}"
            )


AuthOp = SignatureAuth | MacAuth


@dataclass(frozen=True, slots=True)
class LayerSpec:
    """One active layer of a transformation chain.

    ``osi_index`` orders layers; composite spans (a session plus
    presentation layer acting as one) carry their lower bound with a
    display label such as "L5-6". ``reveals`` lists what stripping this
    layer newly exposes, as scenario-authored tags.
    """

    layer_id: str
    osi_index: int
    protocol: str
    key_chain: KeyChain
    enc_op: AlgorithmEntry | None = None
    auth_op: AuthOp | None = None
    int_op: AlgorithmEntry | None = None
    label: str = ""
    reveals: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.layer_id:
            raise ChainError("layer id must be nonempty")
        if not 2 <= self.osi_index <= 7:
            raise ChainError(
                f"layer {self.layer_id!r}: osi index must be in 2..7, "
                f"got {self.osi_index}"
            )
        if self.enc_op is None and self.auth_op is None and self.int_op is None:
            raise ChainError(
                f"layer {self.layer_id!r} performs no cryptographic operation; "
                "identity layers are omitted from chains"
            )
        if self.enc_op is not None and self.enc_op.role is not Role.ENC:
            raise ChainError(
                f"layer {self.layer_id!r}: encryption entry "
                f"{self.enc_op.name!r} must have role ENC"
            )
        if self.int_op is not None and self.int_op.role is not Role.INT:
            raise ChainError(
                f"layer {self.layer_id!r}: integrity entry "
                f"{self.int_op.name!r} must have role INT"
            )
        if not self.label:
            object.__setattr__(self, "label", f"L{self.osi_index}")


@dataclass(frozen=True, slots=True)
class Chain:
    """Active layers of one session, outermost to innermost.

    May be empty: a loopback session with no cryptographic protection has
    no active layers at all. ``wire_reveals`` are the tags visible to a
    passive observer before any layer is broken.
    """

    layers: tuple[LayerSpec, ...] = ()
    wire_reveals: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen_ids: set[str] = set()
        previous = 0
        for layer in self.layers:
            if layer.layer_id in seen_ids:
                raise ChainError(f"duplicate layer id {layer.layer_id!r} in chain")
            seen_ids.add(layer.layer_id)
            if layer.osi_index <= previous:
                raise ChainError(
                    "chain layers must have strictly increasing osi indices "
                    f"from outermost to innermost; {layer.layer_id!r} at "
                    f"{layer.osi_index} follows {previous}"
                )
            previous = layer.osi_index

    def __len__(self) -> int:
        return len(self.layers)

    def by_id(self, layer_id: str) -> LayerSpec:
        for layer in self.layers:
            if layer.layer_id == layer_id:
                return layer
        raise ChainError(f"no layer {layer_id!r} in chain")


def key_material_status(chain: KeyChain) -> PqcStatus:
    """Status of the keys a chain produces.

    The root resolves first: a key exchange contributes its entry's status,
    a pre-shared key its declared status, and a hybrid the join of its
    components (as strong as the strongest). Derivation steps then fold in
    with meet: a derivation function can preserve or degrade key material
    but never upgrade it.
    """
    status = _root_status(chain.root)
    for step in chain.kdf_steps:
        status = meet(status, step.status)
    return status


def _root_status(root: KeySource) -> PqcStatus:
    if isinstance(root, KexSource):
        return root.entry.status
    if isinstance(root, PreSharedSource):
        return root.status
    return join_all(_root_status(component) for component in root.components)


def effective_conf(layer: LayerSpec) -> PqcStatus:
    """Confidentiality the layer actually provides: min of key and cipher.

    Undefined (an error, not Q-Safe) for layers that do not encrypt.
    """
    if layer.enc_op is None:
        raise ChainError(
            f"layer {layer.layer_id!r} has no encryption operation; "
            "confidentiality status is undefined"
        )
    return meet(key_material_status(layer.key_chain), layer.enc_op.status)


def effective_auth(layer: LayerSpec) -> PqcStatus:
    """Authentication the layer actually provides.

    A signature scheme stands on its own status; a keyed MAC is bounded by
    its key source as well.
    """
    if layer.auth_op is None:
        raise ChainError(
            f"layer {layer.layer_id!r} has no authentication operation; "
            "authentication status is undefined"
        )
    if isinstance(layer.auth_op, SignatureAuth):
        return layer.auth_op.entry.status
    return meet(layer.auth_op.entry.status, key_material_status(layer.auth_op.key))


@dataclass(frozen=True, slots=True)
class LayerPosture:
    """Per-layer effective statuses; None where the layer lacks the operation."""

    layer: LayerSpec
    conf: PqcStatus | None
    auth: PqcStatus | None


def _layer_posture(layer: LayerSpec) -> LayerPosture:
    conf = effective_conf(layer) if layer.enc_op is not None else None
    auth = effective_auth(layer) if layer.auth_op is not None else None
    return LayerPosture(layer, conf, auth)


def sending_chain_statuses(chain: Chain) -> tuple[LayerPosture, ...]:
    """Per-layer statuses in sending order, reported outermost first.

    Sending applies the innermost layer first and wraps outward, so the
    walk runs innermost to outermost and the result is flipped back.
    """
    inward = [_layer_posture(layer) for layer in reversed(chain.layers)]
    return tuple(reversed(inward))


def receive_chain_statuses(chain: Chain) -> tuple[LayerPosture, ...]:
    """Per-layer statuses in receiving order (outermost stripped first).

    Both directions use the same negotiated algorithms, so this always
    equals the sending-direction result; it exists so the symmetry is
    executable rather than asserted.
    """
    return tuple(_layer_posture(layer) for layer in chain.layers)
