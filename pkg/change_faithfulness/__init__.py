"""Change faithfulness metrics for drawings of dynamic graphs."""

from .clustering import (
    ClusteringIndex,
    adjusted_rand_index,
    cq,
    fowlkes_mallows_index,
    kmeans,
)
from .deformation import deform_cluster_step, deform_distance_step
from .exceptions import FaithfulnessError
from .experiments import (
    ExperimentConfig,
    ExperimentCoordinator,
    ExperimentTrace,
    MetricReport,
    run_ccq_validation,
    run_dcq_validation,
    run_layout_comparison,
)
from .generators import (
    ClusterGenSpec,
    DistanceGenSpec,
    Merge,
    Split,
    gen_cluster_pair,
    gen_distance_pair,
)
from .graph import Clustering, Drawing, DynamicPair, TimeSlice
from .layouts import cluster_faithful_layout, layout_fr, layout_stress_majorization
from .metrics import (
    ChangeMeasure,
    ClusterChangeInput,
    DistanceChangeInput,
    ccq,
    clustering_agreement,
    clustering_change,
    clustering_delta,
    dcq1,
    dcq2,
    stress,
)

__all__ = [
    "ChangeMeasure",
    "ClusterChangeInput",
    "ClusterGenSpec",
    "Clustering",
    "ClusteringIndex",
    "DistanceChangeInput",
    "DistanceGenSpec",
    "Drawing",
    "DynamicPair",
    "ExperimentConfig",
    "ExperimentCoordinator",
    "ExperimentTrace",
    "FaithfulnessError",
    "Merge",
    "MetricReport",
    "Split",
    "TimeSlice",
    "adjusted_rand_index",
    "ccq",
    "clustering_agreement",
    "clustering_change",
    "clustering_delta",
    "cluster_faithful_layout",
    "cq",
    "dcq1",
    "dcq2",
    "deform_cluster_step",
    "deform_distance_step",
    "fowlkes_mallows_index",
    "gen_cluster_pair",
    "gen_distance_pair",
    "kmeans",
    "layout_fr",
    "layout_stress_majorization",
    "run_ccq_validation",
    "run_dcq_validation",
    "run_layout_comparison",
    "stress",
]
