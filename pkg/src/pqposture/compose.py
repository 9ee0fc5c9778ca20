"""Chain-level verdicts: composition rules, exposure depth, peel traces.

Per-layer effective statuses compose differently per security property:

* confidentiality joins (max): nested encryption means an adversary must
  break every layer, so one Q-Safe layer protects the payload;
* authentication meets (min): each layer authenticates a different party,
  so forging any one of them is enough;
* metadata takes the outermost layer's confidentiality: an on-wire
  observer only ever faces the outer wrapper.

Exposure depth counts how many consecutive layers, from the outside in, a
harvest-now-decrypt-later (HNDL) adversary can peel before a Q-Safe layer
blocks.
``oracle_posture`` recomputes the verdicts by simulating that adversary
step by step, independently of the closed-form folds, so the two can be
checked against each other exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain import Chain, LayerPosture, LayerSpec, sending_chain_statuses
from .status import BOTTOM, PqcLevel, PqcStatus, join, meet

EMPTY_CHAIN_NOTE = "no active cryptographic layers: plaintext at wire"


@dataclass(frozen=True, slots=True)
class PeelStep:
    """One row of a peel trace. Depth 0 is the wire observation (layer None)."""

    depth: int
    layer: LayerSpec | None
    status: PqcStatus | None
    revealed: tuple[str, ...]
    harvestable: bool


@dataclass(frozen=True, slots=True)
class PostureReport:
    """Full chain analysis: per-layer statuses, verdicts, depth, peel trace."""

    per_layer: tuple[LayerPosture, ...]
    chain_conf: PqcStatus
    chain_auth: PqcStatus
    chain_meta: PqcStatus
    exposure_depth: int
    peel_trace: tuple[PeelStep, ...]
    notes: tuple[str, ...] = ()


def fold_conf(postures: list[PqcStatus | None]) -> PqcStatus:
    """Join over the layers that encrypt; bottom when none does.

    A stack in which nothing encrypts offers no confidentiality at all,
    which is the same verdict as an empty chain.
    """
    result: PqcStatus | None = None
    for status in postures:
        if status is None:
            continue
        result = status if result is None else join(result, status)
    return BOTTOM if result is None else result


def fold_auth(postures: list[PqcStatus | None]) -> PqcStatus:
    """Meet over the layers that authenticate; bottom when none does.

    Absence of authentication is not quantum-resistant authentication, so
    layers without an authentication operation are skipped rather than
    counted as Q-Safe, and a chain where nothing authenticates is bottom.
    """
    result: PqcStatus | None = None
    for status in postures:
        if status is None:
            continue
        result = status if result is None else meet(result, status)
    return BOTTOM if result is None else result


def _depth_of(per_layer: tuple[LayerPosture, ...]) -> int:
    depth = 0
    for posture in per_layer:
        if posture.conf is not None and posture.conf.level is PqcLevel.Q_SAFE:
            break
        depth += 1
    return depth


def exposure_depth(chain: Chain) -> int:
    """Consecutive outer layers peelable before a Q-Safe layer blocks.

    A layer blocks only if its effective confidentiality level is Q-Safe;
    a layer that does not encrypt peels for free. Empty chains have depth
    0, with the plaintext-on-wire caveat recorded by compose().
    """
    return _depth_of(sending_chain_statuses(chain))


def compose(chain: Chain) -> PostureReport:
    """Compose per-layer statuses into the chain-level posture report."""
    per_layer = sending_chain_statuses(chain)
    chain_conf = fold_conf([p.conf for p in per_layer])
    chain_auth = fold_auth([p.auth for p in per_layer])
    if per_layer and per_layer[0].conf is not None:
        chain_meta = per_layer[0].conf
    else:
        chain_meta = BOTTOM
    depth = _depth_of(per_layer)
    notes = () if chain.layers else (EMPTY_CHAIN_NOTE,)
    return PostureReport(
        per_layer=per_layer,
        chain_conf=chain_conf,
        chain_auth=chain_auth,
        chain_meta=chain_meta,
        exposure_depth=depth,
        peel_trace=_peel_trace(chain, per_layer, depth),
        notes=notes,
    )


def _peel_trace(
    chain: Chain, per_layer: tuple[LayerPosture, ...], depth: int
) -> tuple[PeelStep, ...]:
    steps = [
        PeelStep(
            depth=0,
            layer=None,
            status=None,
            revealed=chain.wire_reveals,
            harvestable=True,
        )
    ]
    for k, posture in enumerate(per_layer, start=1):
        reachable = k <= depth
        steps.append(
            PeelStep(
                depth=k,
                layer=posture.layer,
                status=posture.conf,
                revealed=posture.layer.reveals if reachable else (),
                harvestable=reachable,
            )
        )
    return tuple(steps)


@dataclass(frozen=True, slots=True)
class OraclePosture:
    """Verdicts from the simulated peel adversary, at level granularity."""

    conf_level: PqcLevel
    auth_level: PqcLevel
    depth: int


def oracle_posture(chain: Chain) -> OraclePosture:
    """Simulate the peel adversary directly; no composition operators.

    Walk outermost to innermost, stopping at the first layer whose
    confidentiality level is Q-Safe. If some layer blocks, the payload is
    safe; otherwise the best level among the encrypting layers is all the
    protection there is. Authentication is forgeable at the weakest
    authenticating layer regardless of position. Deliberately reimplements
    the verdicts with plain comparisons so it can validate compose().
    """
    blocked = False
    depth = 0
    best_conf_rank: int | None = None
    worst_auth_rank: int | None = None
    for posture in sending_chain_statuses(chain):
        auth = posture.auth
        if auth is not None:
            rank = auth.level.rank
            if worst_auth_rank is None or rank < worst_auth_rank:
                worst_auth_rank = rank
        conf = posture.conf
        if not blocked:
            if conf is not None and conf.level is PqcLevel.Q_SAFE:
                blocked = True
            else:
                depth += 1
                if conf is not None:
                    rank = conf.level.rank
                    if best_conf_rank is None or rank > best_conf_rank:
                        best_conf_rank = rank
    if blocked:
        conf_level = PqcLevel.Q_SAFE
    elif best_conf_rank is None:
        conf_level = PqcLevel.C_UNSAFE
    else:
        conf_level = PqcLevel(best_conf_rank)
    auth_level = (
        PqcLevel.C_UNSAFE if worst_auth_rank is None else PqcLevel(worst_auth_rank)
    )
    return OraclePosture(conf_level=conf_level, auth_level=auth_level, depth=depth)
