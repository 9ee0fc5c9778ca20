"""Quantum-vulnerability status levels and their composition algebra.

A status has two parts: a *level* on the totally ordered four-step scale

    C-Unsafe < Q-Unsafe < Q-Weakened < Q-Safe

and a *mechanism* recording why the protection falls short of Q-Safe
(broken classically, broken by Shor, reduced by Grover, or nothing).
The lattice structure lives on the levels: ``join`` is max, ``meet`` is
min, bottom is C-Unsafe and top is Q-Safe. The mechanism is an annotation
riding along with a deterministic tie-break, not a fifth lattice element;
ordering and comparison never look at it.

A Grover-reduced status at the Q-Unsafe level renders with a trailing
dagger ("Q-Unsafe†") to distinguish a vulnerability fixable by a key-size
bump from a structural Shor break.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import StatusError


class PqcLevel(Enum):
    """The four-step protection scale, least secure first."""

    C_UNSAFE = 0
    Q_UNSAFE = 1
    Q_WEAKENED = 2
    Q_SAFE = 3

    def __init__(self, rank: int) -> None:
        # Plain attribute: .value goes through a slow descriptor and the
        # composition operators compare ranks in tight loops.
        self.rank = rank

    @property
    def render(self) -> str:
        return _LEVEL_RENDER[self]

    @classmethod
    def from_render(cls, text: str) -> PqcLevel:
        try:
            return _LEVEL_BY_RENDER[text]
        except KeyError:
            raise StatusError(f"unknown status level {text!r}") from None

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, PqcLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: object) -> bool:
        if not isinstance(other, PqcLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: object) -> bool:
        if not isinstance(other, PqcLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: object) -> bool:
        if not isinstance(other, PqcLevel):
            return NotImplemented
        return self.rank >= other.rank


_LEVEL_RENDER = {
    PqcLevel.C_UNSAFE: "C-Unsafe",
    PqcLevel.Q_UNSAFE: "Q-Unsafe",
    PqcLevel.Q_WEAKENED: "Q-Weakened",
    PqcLevel.Q_SAFE: "Q-Safe",
}
_LEVEL_BY_RENDER = {render: level for level, render in _LEVEL_RENDER.items()}


class Mechanism(Enum):
    """Why a status is below Q-Safe. Values double as severity ranks.

    Severity orders mechanisms for tie-breaking at equal level:
    classical > shor > grover > none.
    """

    NONE = 0
    GROVER = 1
    SHOR = 2
    CLASSICAL = 3

    def __init__(self, severity: int) -> None:
        self.severity = severity

    @property
    def render(self) -> str:
        return self.name.lower()

    @classmethod
    def from_render(cls, text: str) -> Mechanism:
        try:
            return cls[text.upper()]
        except KeyError:
            raise StatusError(f"unknown mechanism {text!r}") from None


# Mechanisms each level admits; the first listed is the default when a
# document names only the level.
_ALLOWED_MECHANISMS = {
    PqcLevel.C_UNSAFE: (Mechanism.CLASSICAL,),
    PqcLevel.Q_UNSAFE: (Mechanism.SHOR, Mechanism.GROVER),
    PqcLevel.Q_WEAKENED: (Mechanism.GROVER,),
    PqcLevel.Q_SAFE: (Mechanism.NONE,),
}

_DAGGER = "†"


@dataclass(frozen=True, slots=True)
class PqcStatus:
    """A level plus the mechanism that put it there."""

    level: PqcLevel
    mechanism: Mechanism

    def __post_init__(self) -> None:
        if self.mechanism not in _ALLOWED_MECHANISMS[self.level]:
            raise StatusError(
                f"level {self.level.render} does not admit mechanism "
                f"{self.mechanism.render}"
            )

    @property
    def render(self) -> str:
        """Canonical display string; Grover at Q-Unsafe carries the dagger."""
        if self.level is PqcLevel.Q_UNSAFE and self.mechanism is Mechanism.GROVER:
            return self.level.render + _DAGGER
        return self.level.render

    @classmethod
    def of(cls, level: PqcLevel) -> PqcStatus:
        """Status with the level's default mechanism (shor for Q-Unsafe)."""
        return cls(level, _ALLOWED_MECHANISMS[level][0])

    @classmethod
    def from_render(cls, text: str) -> PqcStatus:
        if text.endswith(_DAGGER):
            level = PqcLevel.from_render(text[: -len(_DAGGER)])
            return cls(level, Mechanism.GROVER)
        return cls.of(PqcLevel.from_render(text))

    @classmethod
    def from_fields(cls, level: str, mechanism: str | None) -> PqcStatus:
        """Build from separate level/mechanism strings as used in data files."""
        lvl = PqcLevel.from_render(level)
        if mechanism is None:
            return cls.of(lvl)
        return cls(lvl, Mechanism.from_render(mechanism))

    def __str__(self) -> str:
        return self.render


C_UNSAFE = PqcStatus(PqcLevel.C_UNSAFE, Mechanism.CLASSICAL)
Q_UNSAFE = PqcStatus(PqcLevel.Q_UNSAFE, Mechanism.SHOR)
Q_UNSAFE_GROVER = PqcStatus(PqcLevel.Q_UNSAFE, Mechanism.GROVER)
Q_WEAKENED = PqcStatus(PqcLevel.Q_WEAKENED, Mechanism.GROVER)
Q_SAFE = PqcStatus(PqcLevel.Q_SAFE, Mechanism.NONE)

#: Every constructible status, weakest level first.
VALID_STATUSES = (C_UNSAFE, Q_UNSAFE_GROVER, Q_UNSAFE, Q_WEAKENED, Q_SAFE)

#: Lattice bounds.
BOTTOM = C_UNSAFE
TOP = Q_SAFE


def join(a: PqcStatus, b: PqcStatus) -> PqcStatus:
    """Least upper bound: max level; most severe mechanism at that level.

    Used for nested-encryption composition, where the strongest wrapper
    determines the outcome.
    """
    ar, br = a.level.rank, b.level.rank
    if ar > br:
        return a
    if br > ar:
        return b
    return a if a.mechanism.severity >= b.mechanism.severity else b


def meet(a: PqcStatus, b: PqcStatus) -> PqcStatus:
    """Greatest lower bound: min level; most severe mechanism at that level.

    Used wherever a single weak link decides the outcome (key inheritance,
    authentication across independent layers).
    """
    ar, br = a.level.rank, b.level.rank
    if ar < br:
        return a
    if br < ar:
        return b
    return a if a.mechanism.severity >= b.mechanism.severity else b


def join_all(statuses: Iterable[PqcStatus]) -> PqcStatus:
    result: PqcStatus | None = None
    for status in statuses:
        result = status if result is None else join(result, status)
    if result is None:
        raise StatusError("join_all of an empty sequence")
    return result


def meet_all(statuses: Iterable[PqcStatus]) -> PqcStatus:
    result: PqcStatus | None = None
    for status in statuses:
        result = status if result is None else meet(result, status)
    if result is None:
        raise StatusError("meet_all of an empty sequence")
    return result


def compare(a: PqcStatus, b: PqcStatus) -> int:
    """-1, 0, or 1 by level alone; mechanisms never affect ordering."""
    ar, br = a.level.rank, b.level.rank
    if ar < br:
        return -1
    if ar > br:
        return 1
    return 0
