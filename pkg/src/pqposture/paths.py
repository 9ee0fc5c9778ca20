"""Physical path analysis: segments, endpoints, trust boundaries.

The chain view says what protects a message end to end; the path view says
what protects it on each physical link and what each node along the way
can see. Layers terminate at specific nodes (the access point strips the
wireless layer, a VPN server strips the tunnel), so different segments
carry different subsets of the chain, and far-side hops may introduce
fresh re-keyed sessions of their own.

Endpoint analysis separates three concerns per node: what it sees today by
design (classical exposure), what a traffic recorder at that spot could
additionally decrypt once quantum attacks land (HNDL exposure), and which
remaining layers block that recovery (the quantum-resistant backstop).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .chain import Chain, LayerSpec, effective_auth, effective_conf
from .compose import fold_auth, fold_conf
from .errors import PathError
from .status import PqcLevel, PqcStatus


class NodeRole(Enum):
    SENDER = "sender"
    INTERMEDIARY = "intermediary"
    RECIPIENT = "recipient"

    @classmethod
    def from_render(cls, text: str) -> NodeRole:
        try:
            return cls(text)
        except ValueError:
            raise PathError(f"unknown node role {text!r}") from None


@dataclass(frozen=True, slots=True)
class PathNode:
    """A participant on (or beside) the data path.

    Off-data-path participants (an authentication server, for example)
    appear in reports but are excluded from peel math.
    """

    name: str
    role: NodeRole
    classical_exposure: tuple[str, ...] = ()
    on_data_path: bool = True


@dataclass(frozen=True, slots=True)
class Segment:
    """One physical link, with the layers whose protection covers it."""

    src: str
    dst: str
    active_layers: tuple[LayerSpec, ...]

    def __post_init__(self) -> None:
        previous = 0
        for layer in self.active_layers:
            if layer.osi_index <= previous:
                raise PathError(
                    f"segment {self.src!r} -> {self.dst!r}: active layers must "
                    "be ordered outermost to innermost by osi index"
                )
            previous = layer.osi_index


@dataclass(frozen=True, slots=True)
class Path:
    """Nodes and segments from sender to recipient, plus a termination map.

    ``terminations`` maps node name to the ids of layers stripped there.
    Validation enforces the walk structure and that a layer never outlives
    its termination point.
    """

    nodes: tuple[PathNode, ...]
    segments: tuple[Segment, ...]
    terminations: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._validate()

    def _validate(self) -> None:
        names = [node.name for node in self.nodes]
        if len(set(names)) != len(names):
            raise PathError("node names must be unique")
        by_name = {node.name: node for node in self.nodes}
        senders = [n for n in self.nodes if n.role is NodeRole.SENDER]
        recipients = [n for n in self.nodes if n.role is NodeRole.RECIPIENT]
        if len(senders) != 1 or len(recipients) != 1:
            raise PathError("path needs exactly one sender and one recipient")
        sender, recipient = senders[0], recipients[0]
        if not sender.on_data_path or not recipient.on_data_path:
            raise PathError("sender and recipient must be on the data path")
        if not self.segments:
            raise PathError("path needs at least one segment")
        for segment in self.segments:
            for end in (segment.src, segment.dst):
                node = by_name.get(end)
                if node is None:
                    raise PathError(f"segment references unknown node {end!r}")
                if not node.on_data_path:
                    raise PathError(
                        f"off-data-path node {end!r} cannot carry a segment"
                    )
        if self.segments[0].src != sender.name:
            raise PathError("first segment must start at the sender")
        if self.segments[-1].dst != recipient.name:
            raise PathError("last segment must end at the recipient")
        for left, right in zip(self.segments, self.segments[1:]):
            if left.dst != right.src:
                raise PathError(
                    f"segments do not form a walk: {left.dst!r} then {right.src!r}"
                )
        for name in self.terminations:
            if name not in by_name:
                raise PathError(f"termination map references unknown node {name!r}")
        if self.terminations.get(sender.name):
            raise PathError("the sender terminates no layers")
        self._validate_stripping()

    def _validate_stripping(self) -> None:
        seen: set[str] = set(l.layer_id for l in self.segments[0].active_layers)
        for left, right in zip(self.segments, self.segments[1:]):
            node = left.dst
            stripped = set(self.terminations.get(node, ()))
            carried_ids = {l.layer_id for l in left.active_layers}
            missing = stripped - carried_ids
            if missing:
                raise PathError(
                    f"node {node!r} terminates {sorted(missing)} which are not "
                    "active on its incoming segment"
                )
            expected = carried_ids - stripped
            next_ids = {l.layer_id for l in right.active_layers}
            dropped = expected - next_ids
            if dropped:
                raise PathError(
                    f"layers {sorted(dropped)} vanish after {node!r} without "
                    "being terminated there"
                )
            reappeared = (next_ids - expected) & seen
            if reappeared:
                raise PathError(
                    f"layers {sorted(reappeared)} reappear after termination"
                )
            seen |= next_ids
        last = self.segments[-1]
        recipient_strips = set(self.terminations.get(last.dst, ()))
        leftover = {l.layer_id for l in last.active_layers} - recipient_strips
        if leftover:
            raise PathError(
                f"layers {sorted(leftover)} are still active at the recipient "
                "but not terminated there"
            )

    def node(self, name: str) -> PathNode:
        for node in self.nodes:
            if node.name == name:
                return node
        raise PathError(f"node {name!r} is not on this path")

    def terminated_at(self, name: str) -> tuple[str, ...]:
        return tuple(self.terminations.get(name, ()))

    def entering_segment(self, name: str) -> Segment | None:
        for segment in self.segments:
            if segment.dst == name:
                return segment
        return None

    def intermediaries(self) -> tuple[PathNode, ...]:
        return tuple(
            n
            for n in self.nodes
            if n.role is NodeRole.INTERMEDIARY and n.on_data_path
        )


def segment_posture(segment: Segment) -> tuple[PqcStatus, PqcStatus]:
    """(conf, auth) an adversary on this link faces.

    Confidentiality joins and authentication meets over the layers active
    on the link. A segment with no active layers is plaintext: bottom for
    both.
    """
    confs = [
        effective_conf(l) if l.enc_op is not None else None
        for l in segment.active_layers
    ]
    auths = [
        effective_auth(l) if l.auth_op is not None else None
        for l in segment.active_layers
    ]
    return fold_conf(confs), fold_auth(auths)


@dataclass(frozen=True, slots=True)
class EndpointReport:
    """Exposure posture at one node.

    ``hndl_applicable`` is False where the question does not arise: at the
    sender (nothing transmitted yet), at the recipient (it is the
    destination), and off the data path. ``content_reachable`` means no
    Q-Safe layer blocks a future decryption of everything recorded here.
    """

    node: PathNode
    layers_remaining: tuple[LayerSpec, ...]
    classical_exposure: tuple[str, ...]
    hndl_applicable: bool
    hndl_exposure: tuple[str, ...]
    blocked_by: str | None
    content_reachable: bool
    quantum_resistant: tuple[LayerSpec, ...]


def _peel_remaining(
    remaining: tuple[LayerSpec, ...]
) -> tuple[tuple[str, ...], str | None, bool]:
    """Tags an HNDL adversary recovers from the remaining stack, outermost in."""
    revealed: list[str] = []
    for layer in remaining:
        conf = effective_conf(layer) if layer.enc_op is not None else None
        if conf is not None and conf.level is PqcLevel.Q_SAFE:
            return tuple(revealed), layer.layer_id, False
        revealed.extend(layer.reveals)
    return tuple(revealed), None, True


def endpoint_posture(node_name: str, chain: Chain, path: Path) -> EndpointReport:
    """Vulnerability posture at one node of the path.

    The layers remaining at a node are those still wrapping the data after
    the node strips what terminates there; for the sender that is the full
    outbound stack. Classical exposure is echoed from the scenario; HNDL
    exposure peels the remaining stack.
    """
    node = path.node(node_name)
    if not node.on_data_path:
        return EndpointReport(
            node=node,
            layers_remaining=(),
            classical_exposure=node.classical_exposure,
            hndl_applicable=False,
            hndl_exposure=(),
            blocked_by=None,
            content_reachable=False,
            quantum_resistant=(),
        )
    if node.role is NodeRole.SENDER:
        remaining = chain.layers
    else:
        entering = path.entering_segment(node.name)
        if entering is None:
            raise PathError(f"node {node.name!r} has no incoming segment")
        stripped = set(path.terminated_at(node.name))
        remaining = tuple(
            l for l in entering.active_layers if l.layer_id not in stripped
        )
    applicable = node.role is NodeRole.INTERMEDIARY
    hndl, blocked_by, content = (
        _peel_remaining(remaining) if applicable else ((), None, False)
    )
    resistant = tuple(
        l
        for l in remaining
        if l.enc_op is not None and effective_conf(l).level is PqcLevel.Q_SAFE
    )
    return EndpointReport(
        node=node,
        layers_remaining=remaining,
        classical_exposure=node.classical_exposure,
        hndl_applicable=applicable,
        hndl_exposure=hndl,
        blocked_by=blocked_by,
        content_reachable=content,
        quantum_resistant=resistant,
    )


@dataclass(frozen=True, slots=True)
class BoundaryRow:
    """Classical-vs-HNDL exposure partition at one intermediary."""

    node: PathNode
    classical_tags: tuple[str, ...]
    hndl_only_tags: tuple[str, ...]
    coincides: bool


def trust_boundary_report(path: Path, chain: Chain) -> tuple[BoundaryRow, ...]:
    """Per-intermediary partition of tags into classical and HNDL-only.

    Where the HNDL-only set is empty, quantum capability buys an adversary
    nothing beyond what the node already sees by design; where it is not,
    recording traffic at that spot strictly extends the exposure.
    """
    rows = []
    for node in path.intermediaries():
        report = endpoint_posture(node.name, chain, path)
        classical = set(report.classical_exposure)
        hndl_only = tuple(
            tag for tag in report.hndl_exposure if tag not in classical
        )
        rows.append(
            BoundaryRow(
                node=node,
                classical_tags=report.classical_exposure,
                hndl_only_tags=hndl_only,
                coincides=not hndl_only,
            )
        )
    return tuple(rows)
