"""Bounded covers of forests from near-invariant mass assignments."""

from ._accel import BACKEND
from .covering import (
    CoverWitness,
    DeletionSet,
    PipelineResult,
    annulus_bound,
    asdim_cover,
    check_deletion,
    choose_edges,
    classes_met,
    complete_orientation,
    functional_cover,
    geodesic_via_f,
    nested_union_check,
    run_pipeline,
    verify_cover,
)
from .errors import (
    AnchorConflict,
    ConditionFailure,
    DegreeBound,
    DichotomyViolation,
    EmptyFolnerSet,
    IncompletePartition,
    InsufficientInvariance,
    InvalidEdge,
    InvalidMass,
    InvalidVertex,
    NotAcyclic,
    NotAnEdge,
    NotASubrelation,
    NotFunctionalGraph,
    NotNested,
    TreeCoverError,
)
from .graph import (
    EquivPartition,
    Graph,
    Metric,
    as_rational,
    build_graph,
    components_and_leaves,
    distance_and_ball,
    split_at_edge,
)
from .mass import (
    FiniteAction,
    InvarianceProfile,
    MassAssignment,
    component_uniform_lambda,
    folner_lambda,
    invariance_defect,
    invariance_profile,
    point_mass_lambda,
    power_words,
    schreier_graph,
    transfer_lambda,
    uniform_ball_lambda,
)
from .orientation import (
    HIGH,
    LOW,
    MAX_DEFECT,
    OrientedPartition,
    ThetaTable,
    check_conditions,
    euler_forest,
    partition_and_orient,
    theta_dfs,
    theta_iterative_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorConflict",
    "BACKEND",
    "ConditionFailure",
    "CoverWitness",
    "DegreeBound",
    "DeletionSet",
    "DichotomyViolation",
    "EmptyFolnerSet",
    "EquivPartition",
    "FiniteAction",
    "Graph",
    "HIGH",
    "IncompletePartition",
    "InsufficientInvariance",
    "InvalidEdge",
    "InvalidMass",
    "InvalidVertex",
    "InvarianceProfile",
    "LOW",
    "MAX_DEFECT",
    "MassAssignment",
    "Metric",
    "NotASubrelation",
    "NotAcyclic",
    "NotAnEdge",
    "NotFunctionalGraph",
    "NotNested",
    "OrientedPartition",
    "PipelineResult",
    "ThetaTable",
    "TreeCoverError",
    "annulus_bound",
    "as_rational",
    "asdim_cover",
    "build_graph",
    "check_conditions",
    "check_deletion",
    "choose_edges",
    "classes_met",
    "complete_orientation",
    "component_uniform_lambda",
    "components_and_leaves",
    "distance_and_ball",
    "euler_forest",
    "folner_lambda",
    "functional_cover",
    "geodesic_via_f",
    "invariance_defect",
    "invariance_profile",
    "nested_union_check",
    "partition_and_orient",
    "point_mass_lambda",
    "power_words",
    "run_pipeline",
    "schreier_graph",
    "split_at_edge",
    "theta_dfs",
    "theta_iterative_oracle",
    "transfer_lambda",
    "uniform_ball_lambda",
    "verify_cover",
]
