"""Post-quantum security posture of layered network communications.

Classifies per-layer cryptographic operations on the four-step
C-Unsafe < Q-Unsafe < Q-Weakened < Q-Safe scale, composes per-layer
statuses into chain-level confidentiality / authentication / metadata
verdicts, traces harvest-now-decrypt-later exposure depth along physical
paths, and plans post-quantum migrations.
"""

from .chain import (
    AuthOp,
    Chain,
    HybridSource,
    KexSource,
    KeyChain,
    KeySource,
    LayerPosture,
    LayerSpec,
    MacAuth,
    PreSharedSource,
    SignatureAuth,
    effective_auth,
    effective_conf,
    key_material_status,
    receive_chain_statuses,
    sending_chain_statuses,
)
from .compose import (
    OraclePosture,
    PeelStep,
    PostureReport,
    compose,
    exposure_depth,
    oracle_posture,
)
from .errors import (
    ChainError,
    PathError,
    PlanError,
    PostureError,
    RegistryError,
    ScenarioError,
    StatusError,
    UnknownAlgorithmError,
)
from .paths import (
    BoundaryRow,
    EndpointReport,
    NodeRole,
    Path,
    PathNode,
    Segment,
    endpoint_posture,
    segment_posture,
    trust_boundary_report,
)
from .planner import (
    FacetComparison,
    InversionReport,
    MigrationAction,
    PlanReport,
    RiskWeights,
    Variant,
    detect_inversion,
    minimal_auth_migrations,
    minimal_conf_migrations,
    plan_ordering,
)
from .registry import (
    AlgorithmEntry,
    Registry,
    Role,
    classify_symmetric,
    load_registry,
)
from .scenario import (
    FIXTURE_NAMES,
    ScenarioDoc,
    builtin_fixtures,
    load_fixture,
    localhost_extrapolation,
    parse_scenario,
    serialize_scenario,
)
from .status import (
    BOTTOM,
    TOP,
    VALID_STATUSES,
    Mechanism,
    PqcLevel,
    PqcStatus,
    compare,
    join,
    join_all,
    meet,
    meet_all,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmEntry",
    "AuthOp",
    "BOTTOM",
    "BoundaryRow",
    "Chain",
    "ChainError",
    "EndpointReport",
    "FIXTURE_NAMES",
    "FacetComparison",
    "HybridSource",
    "InversionReport",
    "KexSource",
    "KeyChain",
    "KeySource",
    "LayerPosture",
    "LayerSpec",
    "MacAuth",
    "Mechanism",
    "MigrationAction",
    "NodeRole",
    "OraclePosture",
    "Path",
    "PathError",
    "PathNode",
    "PeelStep",
    "PlanError",
    "PlanReport",
    "PostureError",
    "PostureReport",
    "PqcLevel",
    "PqcStatus",
    "PreSharedSource",
    "Registry",
    "RegistryError",
    "RiskWeights",
    "Role",
    "ScenarioDoc",
    "ScenarioError",
    "Segment",
    "SignatureAuth",
    "StatusError",
    "TOP",
    "UnknownAlgorithmError",
    "VALID_STATUSES",
    "Variant",
    "builtin_fixtures",
    "classify_symmetric",
    "compare",
    "compose",
    "detect_inversion",
    "effective_auth",
    "effective_conf",
    "endpoint_posture",
    "exposure_depth",
    "join",
    "join_all",
    "key_material_status",
    "load_fixture",
    "load_registry",
    "localhost_extrapolation",
    "meet",
    "meet_all",
    "minimal_auth_migrations",
    "minimal_conf_migrations",
    "oracle_posture",
    "parse_scenario",
    "plan_ordering",
    "receive_chain_statuses",
    "segment_posture",
    "sending_chain_statuses",
    "serialize_scenario",
    "trust_boundary_report",
]
