"""DDC simulator - local clustering on leaf nodes and tree aggregation of contours."""

from ddc_tools.engine.config import MergePolicy, NodeParams, RunConfig, TopologyConfig
from ddc_tools.engine.ddc import GlobalModel, LocalModel, assign_points, merge_group, run_ddc
from ddc_tools.engine.experiment import ExperimentRunner, RunOutcome

__all__ = [
    "ExperimentRunner",
    "GlobalModel",
    "LocalModel",
    "MergePolicy",
    "NodeParams",
    "RunConfig",
    "RunOutcome",
    "TopologyConfig",
    "assign_points",
    "merge_group",
    "run_ddc",
]
