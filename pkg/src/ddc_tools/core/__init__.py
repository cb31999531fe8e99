"""Core functionality shared by the simulator and the CLI."""

from ddc_tools.core.data import Dataset, DatasetSpec, ShapeSpec, generate, partition
from ddc_tools.core.evaluation import EvalReport, adjusted_rand_index
from ddc_tools.core.geometry import Contour, Polygon, characteristic_shape, point_in_polygon
from ddc_tools.core.local_cluster import DbscanParams, KMeansParams, Labeling, dbscan, kmeans

__all__ = [
    "Contour",
    "Dataset",
    "DatasetSpec",
    "DbscanParams",
    "EvalReport",
    "KMeansParams",
    "Labeling",
    "Polygon",
    "ShapeSpec",
    "adjusted_rand_index",
    "characteristic_shape",
    "dbscan",
    "generate",
    "kmeans",
    "partition",
    "point_in_polygon",
]
