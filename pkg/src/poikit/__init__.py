"""Intrinsic point-of-interest discovery from trajectory data.

The pipeline: parse trajectories, aggregate them into stay-point
exemplars, build a robust single linkage hierarchy over the exemplars,
condense it into a cluster tree with density levels, and extract the flat
set of POIs maximizing relative excess of mass. Baselines, agreement
metrics, a parameter-sweep harness, and a synthetic scene generator
support the evaluation protocol.
"""

from .baselines import DbscanParams, cut_dendrogram, dbscan, single_linkage
from .clustertree import (
    DEFAULT_ALPHA,
    CondensedCluster,
    CondensedTree,
    Dendrogram,
    Merge,
    RslParams,
    build_rsl_tree,
    components_at_radius,
    condense_tree,
    default_k,
    level_set_oracle,
    rsl_merge_radius,
)
from .evaluation import (
    ContingencyTable,
    adjusted_rand_index,
    non_noise_fraction,
    rand_index,
)
from .spatial import (
    CoreDistances,
    PointSet,
    core_distances,
    distance_matrix,
    distance_quantiles,
    pairwise_distance,
)
from .stability import (
    FlatClustering,
    StabilityReport,
    excess_of_mass,
    extract_at_lambda,
    extract_optimal,
    read_labels_csv,
    relative_excess_of_mass,
    write_labels_csv,
)
from .sweep import (
    SweepPlan,
    SweepResult,
    build_grid_density,
    build_grid_hierarchical,
    build_grid_rsl,
    run_sweep,
    seq,
    summarize,
    write_results_csv,
)
from .synth import BuildingSpec, JunctionSpec, SceneSpec, generate_scene
from .trajectory import (
    Exemplar,
    StayPointConfig,
    Trajectory,
    TrajectoryFormat,
    TrajectoryParseError,
    TrajectoryPoint,
    extract_mean_speed_exemplars,
    extract_stay_points,
    parse_trajectories,
    project_equirectangular,
    read_exemplars_csv,
    write_exemplars_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ALPHA",
    "BuildingSpec",
    "CondensedCluster",
    "CondensedTree",
    "ContingencyTable",
    "CoreDistances",
    "DbscanParams",
    "Dendrogram",
    "Exemplar",
    "FlatClustering",
    "JunctionSpec",
    "Merge",
    "PointSet",
    "RslParams",
    "SceneSpec",
    "StabilityReport",
    "StayPointConfig",
    "SweepPlan",
    "SweepResult",
    "Trajectory",
    "TrajectoryFormat",
    "TrajectoryParseError",
    "TrajectoryPoint",
    "adjusted_rand_index",
    "build_grid_density",
    "build_grid_hierarchical",
    "build_grid_rsl",
    "build_rsl_tree",
    "components_at_radius",
    "condense_tree",
    "core_distances",
    "cut_dendrogram",
    "dbscan",
    "default_k",
    "distance_matrix",
    "distance_quantiles",
    "excess_of_mass",
    "extract_at_lambda",
    "extract_mean_speed_exemplars",
    "extract_optimal",
    "extract_stay_points",
    "generate_scene",
    "level_set_oracle",
    "non_noise_fraction",
    "pairwise_distance",
    "parse_trajectories",
    "project_equirectangular",
    "rand_index",
    "read_exemplars_csv",
    "read_labels_csv",
    "relative_excess_of_mass",
    "rsl_merge_radius",
    "run_sweep",
    "seq",
    "single_linkage",
    "summarize",
    "write_exemplars_csv",
    "write_labels_csv",
    "write_results_csv",
]
