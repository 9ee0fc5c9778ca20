"""Exception hierarchy for posture analysis.

Every error raised by this package derives from PostureError so callers can
catch one type at an API boundary. Parsing errors carry the document field
path that triggered them.
"""

from __future__ import annotations


class PostureError(Exception):
    """Base class for all errors raised by this package."""


class StatusError(PostureError):
    """Invalid status level/mechanism combination or unparseable status string."""


class RegistryError(PostureError):
    """Malformed registry entry, invariant violation, or duplicate (name, role)."""


class UnknownAlgorithmError(RegistryError):
    """Lookup of an algorithm (name, role) pair absent from the registry."""

    def __init__(self, name: str, role: str) -> None:
        super().__init__(f"unknown algorithm {name!r} for role {role}")
        self.name = name
        self.role = role


class ChainError(PostureError):
    """Invalid layer or chain structure, or a status request the layer cannot answer."""


class PathError(PostureError):
    """Invalid path topology or a node/layer reference that does not resolve."""


class ScenarioError(PostureError):
    """Scenario document rejected. ``path`` locates the offending field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class PlanError(PostureError):
    """Migration planning rejected its input (size bound, weights, missing rank)."""
