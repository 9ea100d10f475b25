"""Constants for the change faithfulness toolkit."""

from typing import Final

# Clustering comparison indices
INDEX_ARI: Final = "ari"
INDEX_FMI: Final = "fmi"
CHANGE_SIMILARITY: Final = "similarity"
CHANGE_DISSIMILARITY: Final = "dissimilarity"
DEFAULT_CHANGE_MEASURE: Final = CHANGE_SIMILARITY

# k-means
DEFAULT_KMEANS_RESTARTS: Final = 10
DEFAULT_KMEANS_MAX_ITER: Final = 100
DEFAULT_KMEANS_TOL: Final = 1e-6

# Stress majorization
DEFAULT_SMACOF_MAX_ITER: Final = 300
DEFAULT_SMACOF_TOL: Final = 1e-6

# Fruchterman-Reingold
DEFAULT_FR_ITERATIONS: Final = 300
DEFAULT_FR_IDEAL_LENGTH: Final = 1.0
FR_MIN_DISTANCE: Final = 0.01

# Cluster faithful layout
CLUSTER_RADIUS: Final = 1.0
CLUSTER_SPACING: Final = 50.0  # minimum centroid distance, in cluster radii
MAX_LAYOUT_ATTEMPTS: Final = 10
MAX_GENERATION_ATTEMPTS: Final = 10

# Deformation
MIN_DEFORM_FRACTION: Final = 0.05
MAX_DEFORM_FRACTION: Final = 0.1
DEFAULT_STRETCH_FACTOR: Final = 1.15
DEFAULT_EDGE_SUBSET_FRACTION: Final = 1.0
DEFAULT_STEPS: Final = 10

# Cluster pair generator
MAX_BASE_VERTEX_COUNT: Final = 30
DEFAULT_BASE_VERTEX_COUNT: Final = 20
DEFAULT_CLUSTER_SIZE_RANGE: Final = (10, 40)
DEFAULT_INTRA_DENSITY: Final = 0.3
DEFAULT_INTER_EDGE_COUNT: Final = 3
DEFAULT_BASE_EDGE_PROBABILITY: Final = 0.1
DEFAULT_MERGE_DENSITY: Final = 0.3
DEFAULT_SPLIT_DENSITY: Final = 0.02
DENSITY_TOLERANCE: Final = 0.1

# Distance pair generator
MIN_DISTANCE_VERTICES: Final = 20
MAX_DISTANCE_VERTICES: Final = 300
BACKBONE_TREE: Final = "tree"
BACKBONE_PATH: Final = "path"
DEFAULT_SHORTCUT_COUNT: Final = 3
DEFAULT_DIAMETER_RATIO: Final = 0.5
DEFAULT_MIN_DIAMETER: Final = 8
TREE_ATTACH_WINDOW: Final = 3
PATH_BACKBONE_SHARE: Final = 0.8

# Experiments
DEFAULT_DATASET_COUNT: Final = 10
DEFAULT_WORKERS: Final = 1
MAX_WORKERS: Final = 64
MAX_STEPS: Final = 100
DEFAULT_SEED: Final = 0
CONF_STEPS: Final = "steps"
CONF_WORKERS: Final = "workers"
CONF_SEED: Final = "seed"
CONF_FACTOR: Final = "factor"
CONF_SUBSET_FRACTION: Final = "subset_fraction"
CONF_CHANGE_MEASURE: Final = "change_measure"
EXPERIMENT_CCQ_VALIDATION: Final = "ccq-val"
EXPERIMENT_DCQ_VALIDATION: Final = "dcq-val"
EXPERIMENT_CCQ_COMPARISON: Final = "ccq-cmp"
EXPERIMENT_DCQ_COMPARISON: Final = "dcq-cmp"
KIND_CLUSTER: Final = "cluster"
KIND_DISTANCE: Final = "distance"

# Built-in layouts
LAYOUT_STRESS_MAJORIZATION: Final = "stressmaj"
LAYOUT_FR: Final = "fr"
LAYOUT_CLUSTER_FAITHFUL: Final = "clusterfaithful"

# Metric names
METRIC_CQ_ARI_1: Final = "cq_ari_1"
METRIC_CQ_ARI_2: Final = "cq_ari_2"
METRIC_CQ_FMI_1: Final = "cq_fmi_1"
METRIC_CQ_FMI_2: Final = "cq_fmi_2"
METRIC_CCQ_ARI: Final = "ccq_ari"
METRIC_CCQ_FMI: Final = "ccq_fmi"
METRIC_DCQ1: Final = "dcq1"
METRIC_DCQ2: Final = "dcq2"
METRIC_STRESS_1: Final = "stress_1"
METRIC_STRESS_2: Final = "stress_2"

METRIC_NAMES: Final = (
    METRIC_CQ_ARI_1,
    METRIC_CQ_ARI_2,
    METRIC_CQ_FMI_1,
    METRIC_CQ_FMI_2,
    METRIC_CCQ_ARI,
    METRIC_CCQ_FMI,
    METRIC_DCQ1,
    METRIC_DCQ2,
    METRIC_STRESS_1,
    METRIC_STRESS_2,
)

# Files
CSV_HEADER: Final = ("dataset", "step", "metric", "value")
SUMMARY_HEADER: Final = ("group", "step", "metric", "mean", "std")
LAYOUT_SEPARATOR: Final = "@"
RESULTS_FILE: Final = "results.csv"
SUMMARY_FILE: Final = "summary.csv"
TREND_FILE: Final = "trend.svg"
DATASET_FILE_PATTERN: Final = "dataset_{index:02d}.json"

# Exit codes
EXIT_OK: Final = 0
EXIT_VALIDATION_ERROR: Final = 1
EXIT_IO_ERROR: Final = 2
