"""Shared builders for synthetic chains with prescribed effective statuses."""

from __future__ import annotations

import pytest

from pqposture.chain import (
    Chain,
    KeyChain,
    LayerSpec,
    PreSharedSource,
    SignatureAuth,
)
from pqposture.registry import AlgorithmEntry, Registry, Role
from pqposture.status import PqcLevel, PqcStatus, Q_SAFE

# Bit pairs that satisfy the entry invariants for each constructible status.
BITS_FOR_STATUS = {
    PqcStatus.from_render("Q-Safe"): (256, 128),
    PqcStatus.from_render("Q-Weakened"): (160, 80),
    PqcStatus.from_render("Q-Unsafe"): (128, 0),
    PqcStatus.from_render("Q-Unsafe†"): (128, 64),
    PqcStatus.from_render("C-Unsafe"): (56, 0),
}


def make_entry(role: Role, status: PqcStatus, name: str | None = None) -> AlgorithmEntry:
    classical, post_quantum = BITS_FOR_STATUS[status]
    return AlgorithmEntry(
        name=name or f"test-{role.value.lower()}-{status.render}",
        role=role,
        status=status,
        classical_bits=classical,
        post_quantum_bits=post_quantum,
    )


_SAFE_ENC = make_entry(Role.ENC, Q_SAFE, "test-safe-cipher")


def make_layer(
    layer_id: str,
    osi: int,
    conf: PqcStatus | None,
    auth: PqcStatus | None,
    reveals: tuple[str, ...] = (),
) -> LayerSpec:
    """Layer whose effective conf/auth equal the given statuses exactly.

    Confidentiality is realized as a pre-shared key of the target status
    under a Q-Safe cipher (the meet preserves the target); authentication
    as a signature entry carrying the target directly. None omits the
    operation.
    """
    if conf is not None:
        key = KeyChain(root=PreSharedSource(conf, f"{layer_id} key material"))
        enc = _SAFE_ENC
    else:
        key = KeyChain(root=PreSharedSource(Q_SAFE, f"{layer_id} unused key"))
        enc = None
    auth_op = SignatureAuth(make_entry(Role.AUTH, auth)) if auth is not None else None
    return LayerSpec(
        layer_id=layer_id,
        osi_index=osi,
        protocol=f"proto-{layer_id}",
        key_chain=key,
        enc_op=enc,
        auth_op=auth_op,
        reveals=reveals,
    )


def make_chain(
    statuses: list[tuple[PqcStatus | None, PqcStatus | None]],
    wire_reveals: tuple[str, ...] = (),
) -> Chain:
    """Chain of synthetic layers with the given (conf, auth) statuses."""
    layers = tuple(
        make_layer(f"S{i}", osi=2 + i, conf=conf, auth=auth)
        for i, (conf, auth) in enumerate(statuses)
    )
    return Chain(layers=layers, wire_reveals=wire_reveals)


def level_chain(levels: list[tuple[PqcLevel, PqcLevel]]) -> Chain:
    """Chain from (conf level, auth level) pairs using default mechanisms."""
    return make_chain(
        [(PqcStatus.of(conf), PqcStatus.of(auth)) for conf, auth in levels]
    )


@pytest.fixture(scope="session")
def builtin_registry() -> Registry:
    return Registry.builtin()
