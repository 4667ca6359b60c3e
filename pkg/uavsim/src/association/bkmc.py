"""
Balanced k-means clustering of GUs onto UAVs.

Each cluster owns a fixed number of slots; the assignment step is a Hungarian
solve of GUs onto slots, so cluster sizes never drift apart by more than one.
Centroids start from the UAVs' horizontal positions, which makes cluster k the
cluster served by UAV k.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..core.errors import AssignmentError
from ..core.model import Association
from .hungarian import hungarian

logger = logging.getLogger(__name__)

CENTROID_TOL = 1e-9


@dataclass
class SlotLayout:
    """slot_owner[s] is the cluster that owns slot s."""
    slot_owner: np.ndarray

    @property
    def n_slots(self) -> int:
        return len(self.slot_owner)

    def sizes(self, n_clusters: int) -> np.ndarray:
        return np.bincount(self.slot_owner, minlength=n_clusters)


@dataclass
class BkmcResult:
    association: Association
    centroids: np.ndarray
    converged: bool
    iterations: int
    cost_trace: List[float] = field(default_factory=list)


def make_slot_layout(n_gus: int, n_uavs: int) -> SlotLayout:
    """Pre-size clusters: the first (M mod K) clusters get ceil(M/K) slots."""
    if n_uavs < 1:
        raise AssignmentError("Need at least one cluster")
    if n_gus < n_uavs:
        raise AssignmentError(f"Cannot balance {n_gus} GUs over {n_uavs} clusters")
    base, extra = divmod(n_gus, n_uavs)
    sizes = [base + 1 if k < extra else base for k in range(n_uavs)]
    return SlotLayout(slot_owner=np.repeat(np.arange(n_uavs), sizes))


def slot_cost_matrix(gu_pos: np.ndarray, centroids: np.ndarray, layout: SlotLayout) -> np.ndarray:
    """M x M squared distance from GU m to the centroid owning slot s."""
    gu_pos = np.asarray(gu_pos, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    diff = gu_pos[:, None, :] - centroids[layout.slot_owner][None, :, :]
    return np.sum(diff ** 2, axis=-1)


def centroid_update(gu_pos: np.ndarray, assign: np.ndarray, n_clusters: int) -> np.ndarray:
    """Arithmetic mean of each cluster's members."""
    gu_pos = np.asarray(gu_pos, dtype=float)
    assign = np.asarray(assign, dtype=int)
    counts = np.bincount(assign, minlength=n_clusters)
    if np.any(counts == 0):
        raise AssignmentError(f"Empty cluster(s): {np.flatnonzero(counts == 0).tolist()}")
    sums = np.zeros((n_clusters, gu_pos.shape[1]))
    np.add.at(sums, assign, gu_pos)
    return sums / counts[:, None]


def bkmc(gu_pos: np.ndarray, initial_centroids: np.ndarray, max_iters: int = 100,
         tol: float = CENTROID_TOL) -> BkmcResult:
    gu_pos = np.asarray(gu_pos, dtype=float).reshape(-1, 2)
    centroids = np.asarray(initial_centroids, dtype=float).reshape(-1, 2)
    n_clusters = centroids.shape[0]
    layout = make_slot_layout(gu_pos.shape[0], n_clusters)

    cost_trace: List[float] = []
    assign = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        cost = slot_cost_matrix(gu_pos, centroids, layout)
        perm = hungarian(cost)
        assign = layout.slot_owner[perm]
        cost_trace.append(float(cost[np.arange(len(perm)), perm].sum()))

        updated = centroid_update(gu_pos, assign, n_clusters)
        delta = float(np.max(np.abs(updated - centroids)))
        centroids = updated
        logger.debug(f"bkmc iter {iterations}: cost={cost_trace[-1]:.6g} delta={delta:.3g}")
        if delta < tol:
            converged = True
            break

    if not converged:
        logger.warning(f"bkmc did not converge in {max_iters} iterations")

    return BkmcResult(
        association=Association(assign=assign, n_uavs=n_clusters),
        centroids=centroids,
        converged=converged,
        iterations=iterations,
        cost_trace=cost_trace,
    )
