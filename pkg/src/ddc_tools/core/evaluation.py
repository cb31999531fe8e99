"""Clustering quality and communication metrics.

ARI is computed from a sparse contingency table. Reduction is measured
as contour vertices shipped per data point.
"""

import json
import logging
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np
from scipy import sparse

from .exceptions import LengthMismatchError
from .local_cluster import NOISE, DbscanParams, KMeansParams, Labeling, dbscan, kmeans

if TYPE_CHECKING:
    from .data import Dataset

logger = logging.getLogger(__name__)


def _as_labels(labels) -> np.ndarray:
    if isinstance(labels, Labeling):
        return labels.labels
    return np.asarray(labels, dtype=np.int64).reshape(-1)


def contingency_matrix(labels_true, labels_pred) -> sparse.csr_matrix:
    """Sparse table whose (i, j) entry counts points in true class i and predicted class j."""
    true = _as_labels(labels_true)
    pred = _as_labels(labels_pred)
    classes, class_idx = np.unique(true, return_inverse=True)
    clusters, cluster_idx = np.unique(pred, return_inverse=True)
    return sparse.coo_matrix(
        (np.ones(len(class_idx), dtype=np.int64), (class_idx, cluster_idx)),
        shape=(len(classes), len(clusters)),
    ).tocsr()


def pair_confusion_matrix(labels_true, labels_pred) -> np.ndarray:
    """2 x 2 counts of ordered point pairs split by same/different cluster in each labeling.

    Entry [1, 1] counts pairs together in both, [0, 0] pairs apart in both.
    """
    true = _as_labels(labels_true)
    pred = _as_labels(labels_pred)
    if len(true) != len(pred):
        raise LengthMismatchError(len(true), len(pred))

    n = len(true)
    c = np.zeros((2, 2), dtype=object)
    if n == 0:
        return c
    table = contingency_matrix(true, pred)
    n_c = np.ravel(table.sum(axis=1)).astype(object)
    n_k = np.ravel(table.sum(axis=0)).astype(object)
    sum_squares = int((table.data.astype(object) ** 2).sum())
    c[1, 1] = sum_squares - n
    c[0, 1] = int((n_k**2).sum()) - sum_squares
    c[1, 0] = int((n_c**2).sum()) - sum_squares
    c[0, 0] = n * n - c[0, 1] - c[1, 0] - sum_squares
    return c


def adjusted_rand_index(a, b, exclude_noise: bool = False) -> float:
    """Adjusted Rand Index between two labelings.

    Args:
        a: Reference labeling
        b: Labeling to compare
        exclude_noise: Drop points that are NOISE in the reference

    Raises:
        LengthMismatchError: If the labelings have different lengths
    """
    true = _as_labels(a)
    pred = _as_labels(b)
    if len(true) != len(pred):
        raise LengthMismatchError(len(true), len(pred))
    if exclude_noise:
        keep = true != NOISE
        true, pred = true[keep], pred[keep]

    (tn, fp), (fn, tp) = pair_confusion_matrix(true, pred).tolist()
    if fn == 0 and fp == 0:
        return 1.0
    return float(2 * (tp * tn - fn * fp) / ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn)))


def reduction_ratio(models: Iterable, dataset_size: int) -> float:
    """Distinct contour vertices of the given models per dataset point, capped at 1.

    Args:
        models: Objects with a `contours` list (local or global models)
        dataset_size: Number of points in the clustered dataset
    """
    if dataset_size <= 0:
        raise ValueError(f"dataset_size must be > 0, got {dataset_size}")
    rings = [c.polygon.ring for m in models for c in m.contours]
    if not rings:
        return 0.0
    distinct = len(np.unique(np.concatenate(rings), axis=0))
    return min(1.0, distinct / dataset_size)


def oracle_single_machine(dataset: "Dataset", params: DbscanParams | KMeansParams) -> Labeling:
    """Cluster the whole, unpartitioned dataset with one backend."""
    if isinstance(params, KMeansParams):
        return kmeans(dataset.points, params)
    return dbscan(dataset.points, params)


def dataset_bytes(dataset: "Dataset") -> int:
    """Size of the dataset as 'x,y' CSV rows with 9 significant digits."""
    return sum(len(f"{x:.9g},{y:.9g}\n") for x, y in dataset.points.tolist())


@dataclass
class EvalReport:
    """Outcome of one run, ready to serialise.

    Timings are in seconds; ari is None when no ground truth was available.
    """

    dataset: str
    size: int
    n_clusters_found: int
    n_clusters_expected: int | None = None
    ari: float | None = None
    reduction_ratio: float = 0.0
    leaf_makespan: float = 0.0
    merge_time: float = 0.0
    makespan: float = 0.0
    makespan_without_matrix: float = 0.0
    bytes_exchanged: int = 0
    dataset_bytes: int = 0
    contour_vertices: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def build_report(dataset: "Dataset", model, assignment: Labeling) -> EvalReport:
    """Summarise a finished run (a GlobalModel) and its point assignment."""
    ari = None
    expected = None
    if dataset.truth is not None:
        ari = adjusted_rand_index(dataset.truth, assignment, exclude_noise=True)
        expected = dataset.truth.n_clusters
    report = EvalReport(
        dataset=dataset.name,
        size=len(dataset),
        n_clusters_found=model.n_clusters,
        n_clusters_expected=expected,
        ari=ari,
        reduction_ratio=reduction_ratio(model.local_models, len(dataset)) if len(dataset) else 0.0,
        leaf_makespan=model.leaf_makespan,
        merge_time=model.merge_time,
        makespan=model.makespan,
        makespan_without_matrix=model.makespan_without_matrix,
        bytes_exchanged=model.total_bytes,
        dataset_bytes=dataset_bytes(dataset),
        contour_vertices=sum(c.n_vertices for m in model.local_models for c in m.contours),
    )
    logger.debug("report for %s: %s", dataset.name, report)
    return report


def evaluate_labelings(truth: Labeling, predicted: Labeling, name: str = "evaluation") -> EvalReport:
    """Report for two labelings of the same points (no run metrics)."""
    if len(truth) != len(predicted):
        raise LengthMismatchError(len(truth), len(predicted))
    return EvalReport(
        dataset=name,
        size=len(truth),
        n_clusters_found=predicted.n_clusters,
        n_clusters_expected=truth.n_clusters,
        ari=adjusted_rand_index(truth, predicted, exclude_noise=True),
    )
