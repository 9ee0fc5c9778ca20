"""Catalog of cryptographic algorithm instances and their quantum statuses.

An entry classifies one algorithm *in one role* (the same name may appear
under several roles with different entries). The built-in catalog covers
the algorithms used by the bundled scenarios: NIST post-quantum selections,
the common AEAD ciphers and hash constructions, the deployed elliptic-curve
and RSA/DH public-key schemes, and a few classically broken legacy
algorithms. Registry files can extend it or override individual entries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import RegistryError, StatusError, UnknownAlgorithmError
from .status import Mechanism, PqcLevel, PqcStatus

# Residual bits at or below this are within classical brute-force reach;
# a Grover-halved cipher landing here is treated as broken.
FEASIBLE_BRUTE_FORCE_BITS = 64

# Grover-halved residuals at or above this keep a comfortable margin and
# stay Q-Safe (AES-192 -> 96, AES-256 -> 128).
GROVER_SAFE_RESIDUAL_BITS = 96


class Role(Enum):
    """The five operation roles a cryptographic algorithm can fill."""

    KEX = "KEX"
    AUTH = "AUTH"
    ENC = "ENC"
    INT = "INT"
    KDF = "KDF"

    @classmethod
    def from_render(cls, text: str) -> Role:
        try:
            return cls[text.upper()]
        except KeyError:
            raise RegistryError(f"unknown role {text!r}") from None


@dataclass(frozen=True, slots=True)
class AlgorithmEntry:
    """One algorithm instance bound to a role, with its classification.

    ``classical_bits`` is the nominal design strength; ``post_quantum_bits``
    is the effective strength after the best known quantum attack (0 for a
    Shor break).
    """

    name: str
    role: Role
    status: PqcStatus
    classical_bits: int
    post_quantum_bits: int
    note: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise RegistryError("algorithm name must be nonempty")
        if self.classical_bits < 0 or self.post_quantum_bits < 0:
            raise RegistryError(f"{self.name}: security bits must be >= 0")
        level, mech = self.status.level, self.status.mechanism
        pq = self.post_quantum_bits
        if level is PqcLevel.Q_SAFE and pq <= FEASIBLE_BRUTE_FORCE_BITS:
            raise RegistryError(
                f"{self.name}: Q-Safe requires post-quantum bits > "
                f"{FEASIBLE_BRUTE_FORCE_BITS}, got {pq}"
            )
        if level is PqcLevel.Q_WEAKENED and not (
            FEASIBLE_BRUTE_FORCE_BITS < pq < self.classical_bits
        ):
            raise RegistryError(
                f"{self.name}: Q-Weakened requires "
                f"{FEASIBLE_BRUTE_FORCE_BITS} < post-quantum bits < classical "
                f"bits, got {pq} vs {self.classical_bits}"
            )
        if level is PqcLevel.Q_UNSAFE:
            if mech is Mechanism.GROVER and pq > FEASIBLE_BRUTE_FORCE_BITS:
                raise RegistryError(
                    f"{self.name}: Grover-reduced Q-Unsafe requires "
                    f"post-quantum bits <= {FEASIBLE_BRUTE_FORCE_BITS}, got {pq}"
                )
            if mech is Mechanism.SHOR and pq != 0:
                raise RegistryError(
                    f"{self.name}: Shor-broken entries have 0 post-quantum "
                    f"bits, got {pq}"
                )


def classify_symmetric(classical_bits: int, attack: Mechanism) -> PqcLevel:
    """Level of a symmetric primitive after the stated quantum attack.

    Grover halves the effective bits. Residuals above the brute-force
    threshold stay Q-Safe when they are either unreduced or still at or
    above GROVER_SAFE_RESIDUAL_BITS; smaller reduced residuals are
    Q-Weakened; anything at or below the threshold is Q-Unsafe.
    """
    if attack not in (Mechanism.GROVER, Mechanism.NONE):
        raise RegistryError(
            f"classify_symmetric handles grover or none, not {attack.render}"
        )
    if classical_bits <= 0:
        raise RegistryError(f"classical bits must be positive, got {classical_bits}")
    effective = classical_bits // 2 if attack is Mechanism.GROVER else classical_bits
    if effective <= FEASIBLE_BRUTE_FORCE_BITS:
        return PqcLevel.Q_UNSAFE
    if effective == classical_bits or effective >= GROVER_SAFE_RESIDUAL_BITS:
        return PqcLevel.Q_SAFE
    return PqcLevel.Q_WEAKENED


def _entry(
    name: str,
    role: Role,
    status: PqcStatus,
    classical_bits: int,
    post_quantum_bits: int,
    note: str = "",
) -> AlgorithmEntry:
    return AlgorithmEntry(name, role, status, classical_bits, post_quantum_bits, note)


def _seed_entries() -> tuple[AlgorithmEntry, ...]:
    from .status import C_UNSAFE, Q_SAFE, Q_UNSAFE, Q_UNSAFE_GROVER, Q_WEAKENED

    return (
        # Post-quantum selections: full lattice-based strength.
        _entry("ML-KEM-768", Role.KEX, Q_SAFE, 192, 192, "lattice KEM (Kyber-768)"),
        _entry("ML-KEM-1024", Role.KEX, Q_SAFE, 256, 256, "lattice KEM (Kyber-1024)"),
        _entry("ML-DSA-65", Role.AUTH, Q_SAFE, 192, 192, "lattice signature"),
        # Symmetric/AEAD with >= 96-bit Grover residual.
        _entry("AES-256-GCM", Role.ENC, Q_SAFE, 256, 128, "128-bit effective"),
        _entry("ChaCha20-Poly1305", Role.ENC, Q_SAFE, 256, 128, "128-bit effective"),
        _entry("SHA-384", Role.KDF, Q_SAFE, 384, 192, "192-bit effective"),
        _entry("SHA-384", Role.INT, Q_SAFE, 384, 192, "192-bit effective"),
        _entry("SHA-512", Role.KDF, Q_SAFE, 512, 256, "256-bit effective"),
        _entry("SHA-512", Role.INT, Q_SAFE, 512, 256, "256-bit effective"),
        _entry("HMAC-SHA-256", Role.INT, Q_SAFE, 256, 128, "128-bit effective"),
        # Grover-reduced with residual still above the brute-force threshold.
        _entry("SHA-256", Role.KDF, Q_WEAKENED, 256, 128, "preimage halved by Grover"),
        _entry("HMAC-SHA1", Role.INT, Q_WEAKENED, 160, 80, "160-bit key, 80-bit effective"),
        _entry(
            "PBKDF2-SHA1", Role.KDF, Q_WEAKENED, 256, 128,
            "256-bit PMK; Grover searches the passphrase space, PMK entropy "
            "assumed adequate",
        ),
        # Grover-reduced to the brute-force threshold.
        _entry(
            "AES-128-CCMP", Role.ENC, Q_UNSAFE_GROVER, 128, 64,
            "64-bit effective, at the edge of classical feasibility",
        ),
        # Shor-broken public-key schemes.
        _entry("X25519", Role.KEX, Q_UNSAFE, 128, 0, "Curve25519 DH, broken by Shor"),
        _entry("ECDH-P256", Role.KEX, Q_UNSAFE, 128, 0, "broken by Shor"),
        _entry("ECDSA-P256", Role.AUTH, Q_UNSAFE, 128, 0, "broken by Shor"),
        _entry("Ed25519", Role.AUTH, Q_UNSAFE, 128, 0, "broken by Shor"),
        _entry("RSA-2048+", Role.KEX, Q_UNSAFE, 112, 0, "broken by Shor"),
        _entry("RSA-2048+", Role.AUTH, Q_UNSAFE, 112, 0, "broken by Shor"),
        _entry("DH-2048", Role.KEX, Q_UNSAFE, 112, 0, "broken by Shor"),
        # Classically broken legacy algorithms.
        _entry("DES", Role.ENC, C_UNSAFE, 56, 0, "classically brute-forceable"),
        _entry("RC4", Role.ENC, C_UNSAFE, 128, 0, "keystream biases"),
        _entry("MD5", Role.KDF, C_UNSAFE, 128, 0, "collisions found"),
        _entry("MD5", Role.INT, C_UNSAFE, 128, 0, "collisions found"),
    )


class Registry:
    """Immutable mapping from (name, role) to an AlgorithmEntry."""

    def __init__(self, entries: Iterable[AlgorithmEntry]) -> None:
        table: dict[tuple[str, Role], AlgorithmEntry] = {}
        for entry in entries:
            key = (entry.name, entry.role)
            if key in table:
                raise RegistryError(
                    f"duplicate entry for ({entry.name}, {entry.role.value})"
                )
            table[key] = entry
        self._table = table

    @classmethod
    def builtin(cls) -> Registry:
        return cls(_seed_entries())

    def lookup(self, name: str, role: Role) -> AlgorithmEntry:
        try:
            return self._table[(name, role)]
        except KeyError:
            raise UnknownAlgorithmError(name, role.value) from None

    def __contains__(self, key: tuple[str, Role]) -> bool:
        return key in self._table

    def __len__(self) -> int:
        return len(self._table)

    def __iter__(self) -> Iterator[AlgorithmEntry]:
        return iter(self._table.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return self._table == other._table

    def entries(self) -> tuple[AlgorithmEntry, ...]:
        """All entries sorted by (name, role) for stable listings."""
        return tuple(
            sorted(self._table.values(), key=lambda e: (e.name, e.role.value))
        )

    def with_entries(self, extra: Iterable[AlgorithmEntry]) -> Registry:
        """New registry with ``extra`` added; same (name, role) overrides.

        Duplicates *within* ``extra`` are an error; overriding an existing
        entry is the supported extension mechanism.
        """
        table = dict(self._table)
        seen: set[tuple[str, Role]] = set()
        for entry in extra:
            key = (entry.name, entry.role)
            if key in seen:
                raise RegistryError(
                    f"duplicate entry for ({entry.name}, {entry.role.value})"
                )
            seen.add(key)
            table[key] = entry
        registry = Registry.__new__(Registry)
        registry._table = table
        return registry


def parse_entry(obj: Mapping[str, object], where: str = "entry") -> AlgorithmEntry:
    """Parse one registry-file entry with field-level error messages."""
    if not isinstance(obj, Mapping):
        raise RegistryError(f"{where}: expected an object, got {type(obj).__name__}")
    allowed = {
        "name", "role", "level", "mechanism",
        "classical_bits", "post_quantum_bits", "note",
    }
    unknown = set(obj) - allowed
    if unknown:
        raise RegistryError(f"{where}: unknown field(s) {sorted(unknown)}")
    for field in ("name", "role", "level"):
        if field not in obj:
            raise RegistryError(f"{where}: missing required field {field!r}")
    name = obj["name"]
    if not isinstance(name, str) or not name:
        raise RegistryError(f"{where}.name: expected a nonempty string")
    role = obj["role"]
    if not isinstance(role, str):
        raise RegistryError(f"{where}.role: expected a string")
    level = obj["level"]
    if not isinstance(level, str):
        raise RegistryError(f"{where}.level: expected a string")
    mechanism = obj.get("mechanism")
    if mechanism is not None and not isinstance(mechanism, str):
        raise RegistryError(f"{where}.mechanism: expected a string")
    bits: dict[str, int] = {}
    for field in ("classical_bits", "post_quantum_bits"):
        value = obj.get(field, 0)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise RegistryError(f"{where}.{field}: expected an integer >= 0")
        bits[field] = value
    note = obj.get("note", "")
    if not isinstance(note, str):
        raise RegistryError(f"{where}.note: expected a string")
    try:
        status = PqcStatus.from_fields(level, mechanism)
    except StatusError as exc:
        raise RegistryError(f"{where}: {exc}") from None
    return AlgorithmEntry(
        name=name,
        role=Role.from_render(role),
        status=status,
        classical_bits=bits["classical_bits"],
        post_quantum_bits=bits["post_quantum_bits"],
        note=note,
    )


def serialize_entry(entry: AlgorithmEntry) -> dict[str, object]:
    return {
        "name": entry.name,
        "role": entry.role.value,
        "level": entry.status.level.render,
        "mechanism": entry.status.mechanism.render,
        "classical_bits": entry.classical_bits,
        "post_quantum_bits": entry.post_quantum_bits,
        "note": entry.note,
    }


def load_registry(document: str | bytes | list | None = None) -> Registry:
    """Build a registry from a registry-file document over the built-ins.

    The document is a JSON array of entries (or the already-parsed list).
    An empty document yields exactly the built-in catalog. User entries are
    validated, may override built-ins by (name, role), and must not repeat
    among themselves.
    """
    if document is None:
        return Registry.builtin()
    if isinstance(document, (str, bytes)):
        text = document.decode() if isinstance(document, bytes) else document
        if not text.strip():
            return Registry.builtin()
        try:
            parsed = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RegistryError(f"registry document is not valid JSON: {exc}") from None
    else:
        parsed = document
    if not isinstance(parsed, list):
        raise RegistryError("registry document must be a JSON array of entries")
    entries = [parse_entry(obj, where=f"entry[{i}]") for i, obj in enumerate(parsed)]
    return Registry.builtin().with_entries(entries)
