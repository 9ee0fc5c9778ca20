"""Migration planning: minimal upgrade sets, orderings, inversion detection.

Answers the operational questions a stack owner actually has. Which layers
must move to post-quantum algorithms before the chain verdicts turn
Q-Safe, in what order to migrate one layer at a time, and whether a
classically stronger variant is quantum-weaker than the thing it replaced.

The ordering search uses a declared risk model: levels map linearly to
risk 3..0 and a state's risk is the weighted sum over the three chain
facets. The model is one admissible choice, not a law; every plan carries
a note saying so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chain import (
    Chain,
    KeyChain,
    LayerSpec,
    PreSharedSource,
    SignatureAuth,
)
from .compose import PostureReport, compose
from .errors import PlanError
from .registry import AlgorithmEntry, Role
from .status import PqcLevel, PqcStatus, Q_SAFE

MAX_EXHAUSTIVE_ACTIONS = 8

#: Linear risk scale by level: bottom of the order is the most exposed.
RISK_BY_LEVEL = {
    PqcLevel.C_UNSAFE: 3,
    PqcLevel.Q_UNSAFE: 2,
    PqcLevel.Q_WEAKENED: 1,
    PqcLevel.Q_SAFE: 0,
}

RISK_MODEL_NOTE = (
    "risk model: linear level scale 3..0, weighted over conf/auth/meta; "
    "orderings are valid only under this model"
)

CONF = "conf"
AUTH = "auth"

_MIGRATED_KEY = KeyChain(root=PreSharedSource(Q_SAFE, "pq-migrated key material"))
_MIGRATED_ENC = AlgorithmEntry(
    "PQ-migrated-enc", Role.ENC, Q_SAFE, 256, 128, "placeholder post-quantum cipher"
)
_MIGRATED_SIG = AlgorithmEntry(
    "PQ-migrated-sig", Role.AUTH, Q_SAFE, 192, 192, "placeholder post-quantum signature"
)


@dataclass(frozen=True, slots=True)
class MigrationAction:
    """Upgrade one layer's listed facets to Q-Safe."""

    layer_id: str
    facets: frozenset[str]

    def __post_init__(self) -> None:
        if not self.facets:
            raise PlanError("migration action needs at least one facet")
        unknown = self.facets - {CONF, AUTH}
        if unknown:
            raise PlanError(f"unknown facet(s) {sorted(unknown)}")


@dataclass(frozen=True, slots=True)
class RiskWeights:
    """Relative priority of the three chain facets; must sum to 1."""

    conf: float
    auth: float
    meta: float

    def __post_init__(self) -> None:
        for name, value in ((CONF, self.conf), (AUTH, self.auth), ("meta", self.meta)):
            if value < 0:
                raise PlanError(f"weight {name} must be non-negative, got {value}")
        total = self.conf + self.auth + self.meta
        if abs(total - 1.0) > 1e-9:
            raise PlanError(f"weights must sum to 1, got {total}")


@dataclass(frozen=True, slots=True)
class PlanReport:
    """An ordering, the posture after every step, and its cumulative risk."""

    ordering: tuple[MigrationAction, ...]
    snapshots: tuple[PostureReport, ...]
    cumulative_risk: float
    notes: tuple[str, ...] = ()


def upgrade_layer(layer: LayerSpec, facets: frozenset[str]) -> LayerSpec:
    """Layer after migrating the given facets to Q-Safe equivalents.

    Upgrading confidentiality replaces the whole key chain and the cipher
    (a migration re-roots key material; stale derivation steps do not
    survive it). Upgrading authentication swaps in a post-quantum
    signature. Everything else is preserved.
    """
    key_chain = layer.key_chain
    enc_op = layer.enc_op
    auth_op = layer.auth_op
    if CONF in facets:
        key_chain = _MIGRATED_KEY
        enc_op = _MIGRATED_ENC
    if AUTH in facets:
        auth_op = SignatureAuth(_MIGRATED_SIG)
    return LayerSpec(
        layer_id=layer.layer_id,
        osi_index=layer.osi_index,
        protocol=layer.protocol,
        key_chain=key_chain,
        enc_op=enc_op,
        auth_op=auth_op,
        int_op=layer.int_op,
        label=layer.label,
        reveals=layer.reveals,
    )


def apply_actions(chain: Chain, actions: dict[str, frozenset[str]]) -> Chain:
    """Chain with the given layer-id -> facets upgrades applied."""
    unknown = set(actions) - {layer.layer_id for layer in chain.layers}
    if unknown:
        raise PlanError(f"no such layer(s) in chain: {sorted(unknown)}")
    layers = tuple(
        upgrade_layer(layer, actions[layer.layer_id])
        if layer.layer_id in actions
        else layer
        for layer in chain.layers
    )
    return Chain(layers=layers, wire_reveals=chain.wire_reveals)


def _minimal_sets(chain: Chain, facet: str) -> tuple[frozenset[str], ...]:
    if not chain.layers:
        raise PlanError("cannot plan migrations for an empty chain")
    n = len(chain.layers)
    if n > MAX_EXHAUSTIVE_ACTIONS:
        raise PlanError(
            f"exhaustive subset search is bounded at {MAX_EXHAUSTIVE_ACTIONS} "
            f"layers, got {n}"
        )
    ids = [layer.layer_id for layer in chain.layers]
    facets = frozenset({facet})
    verdict = {CONF: lambda r: r.chain_conf, AUTH: lambda r: r.chain_auth}[facet]
    minimal: list[frozenset[str]] = []
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            candidate = frozenset(ids[i] for i in combo)
            if any(found <= candidate for found in minimal):
                continue
            upgraded = apply_actions(chain, {lid: facets for lid in candidate})
            if verdict(compose(upgraded)).level is PqcLevel.Q_SAFE:
                minimal.append(candidate)
    return tuple(minimal)


def minimal_conf_migrations(chain: Chain) -> tuple[frozenset[str], ...]:
    """All inclusion-minimal layer sets whose conf upgrade makes the chain Q-Safe.

    Found by exhaustive subset search over compose(), not assumed from the
    join rule. An already-safe chain yields the empty set as its unique
    minimal answer.
    """
    return _minimal_sets(chain, CONF)


def minimal_auth_migrations(chain: Chain) -> tuple[frozenset[str], ...]:
    """All inclusion-minimal layer sets whose auth upgrade makes the chain Q-Safe.

    The meet rule forces every below-Q-Safe authenticator into the answer,
    but the result is computed by search, same as the conf side.
    """
    return _minimal_sets(chain, AUTH)


def state_risk(report: PostureReport, weights: RiskWeights) -> float:
    return (
        weights.conf * RISK_BY_LEVEL[report.chain_conf.level]
        + weights.auth * RISK_BY_LEVEL[report.chain_auth.level]
        + weights.meta * RISK_BY_LEVEL[report.chain_meta.level]
    )


def plan_ordering(
    chain: Chain, weights: RiskWeights, *, split_facets: bool = False
) -> PlanReport:
    """Minimum-cumulative-risk ordering of one-layer-at-a-time migrations.

    Each action upgrades one layer (both facets together by default; with
    ``split_facets`` confidentiality and authentication migrate as separate
    actions). Every permutation is evaluated; cumulative risk is the sum of
    the state risks after each step, one time unit per step. Ties break
    deterministically toward migrating outer layers first.
    """
    if not chain.layers:
        raise PlanError("cannot plan migrations for an empty chain")
    positions = range(len(chain.layers))
    if split_facets:
        actions = [(i, facet) for i in positions for facet in (CONF, AUTH)]
    else:
        actions = [(i, None) for i in positions]
    if len(actions) > MAX_EXHAUSTIVE_ACTIONS:
        raise PlanError(
            f"exhaustive ordering search is bounded at {MAX_EXHAUSTIVE_ACTIONS} "
            f"actions, got {len(actions)}"
        )
    ids = [layer.layer_id for layer in chain.layers]
    best_key: tuple[float, tuple] | None = None
    best_perm: tuple | None = None
    for perm in itertools.permutations(actions):
        cumulative = 0.0
        done: dict[str, set[str]] = {}
        for position, facet in perm:
            facets = {CONF, AUTH} if facet is None else {facet}
            done.setdefault(ids[position], set()).update(facets)
            state = apply_actions(
                chain, {lid: frozenset(f) for lid, f in done.items()}
            )
            cumulative += state_risk(compose(state), weights)
        sort_key = tuple(
            (pos, 0 if facet in (None, CONF) else 1) for pos, facet in perm
        )
        key = (cumulative, sort_key)
        if best_key is None or key < best_key:
            best_key = key
            best_perm = perm
    assert best_perm is not None
    ordering = tuple(
        MigrationAction(
            layer_id=ids[pos],
            facets=frozenset({CONF, AUTH}) if facet is None else frozenset({facet}),
        )
        for pos, facet in best_perm
    )
    snapshots = [compose(chain)]
    done = {}
    for action in ordering:
        done.setdefault(action.layer_id, set()).update(action.facets)
        snapshots.append(
            compose(
                apply_actions(chain, {lid: frozenset(f) for lid, f in done.items()})
            )
        )
    cumulative = sum(state_risk(s, weights) for s in snapshots[1:])
    return PlanReport(
        ordering=ordering,
        snapshots=tuple(snapshots),
        cumulative_risk=cumulative,
        notes=(RISK_MODEL_NOTE,),
    )


@dataclass(frozen=True, slots=True)
class Variant:
    """A named chain with its scenario-supplied classical strength ordinal."""

    name: str
    chain: Chain
    classical_rank: int | None = None


@dataclass(frozen=True, slots=True)
class FacetComparison:
    """One facet of two variants side by side, judged at quantum granularity.

    ``quantum_delta`` is negative when b is quantum-weaker than a, positive
    when stronger, 0 when indistinguishable. Equal levels with a more
    severe mechanism on one side count as weaker: a Grover-reduced cipher
    is a configuration fix while a Shor break is structural.
    """

    facet: str
    a_status: PqcStatus
    b_status: PqcStatus
    quantum_delta: int


@dataclass(frozen=True, slots=True)
class InversionReport:
    """Outcome of comparing two variants' classical vs quantum strength."""

    a: Variant
    b: Variant
    classically_stronger: str | None
    facets: tuple[FacetComparison, ...]
    inverted_facets: tuple[str, ...]
    inversion: bool


def _quantum_delta(a: PqcStatus, b: PqcStatus) -> int:
    """Sign of b's quantum strength minus a's (level first, then mechanism)."""
    if b.level != a.level:
        return 1 if b.level > a.level else -1
    if b.mechanism.severity != a.mechanism.severity:
        return 1 if b.mechanism.severity < a.mechanism.severity else -1
    return 0


def detect_inversion(a: Variant, b: Variant) -> InversionReport:
    """Check whether classical and quantum strength order the variants oppositely.

    Classical superiority is an input (the declared ordinal); quantum
    strength is compared per chain facet at level-plus-mechanism
    granularity. An inversion is flagged when the classically stronger
    variant is quantum-weaker on any facet.
    """
    for variant in (a, b):
        if variant.classical_rank is None:
            raise PlanError(f"variant {variant.name!r} has no classical_rank")
    report_a = compose(a.chain)
    report_b = compose(b.chain)
    facets = tuple(
        FacetComparison(
            facet=facet,
            a_status=status_a,
            b_status=status_b,
            quantum_delta=_quantum_delta(status_a, status_b),
        )
        for facet, status_a, status_b in (
            (CONF, report_a.chain_conf, report_b.chain_conf),
            (AUTH, report_a.chain_auth, report_b.chain_auth),
            ("meta", report_a.chain_meta, report_b.chain_meta),
        )
    )
    if a.classical_rank == b.classical_rank:
        stronger = None
    else:
        stronger = a.name if a.classical_rank > b.classical_rank else b.name
    if stronger is None:
        inverted: tuple[str, ...] = ()
    elif stronger == b.name:
        inverted = tuple(f.facet for f in facets if f.quantum_delta < 0)
    else:
        inverted = tuple(f.facet for f in facets if f.quantum_delta > 0)
    return InversionReport(
        a=a,
        b=b,
        classically_stronger=stronger,
        facets=facets,
        inverted_facets=inverted,
        inversion=bool(inverted),
    )
