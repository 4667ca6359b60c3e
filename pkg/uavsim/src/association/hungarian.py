"""
Minimum-cost square assignment (Hungarian method with row/column potentials).

O(n^3). Rows are inserted one at a time and each augmenting path is grown from
a dummy column. Ties between optimal assignments resolve to the
lexicographically smallest perm, so degenerate matrices have one answer.
"""

from collections import deque
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import AssignmentError

# reduced costs below this (relative to the largest |cost|) count as zero
TIGHT_TOL = 1e-9


def _check_cost(cost) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise AssignmentError(f"Cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise AssignmentError("Cost matrix contains non-finite entries")
    return cost


def hungarian(cost) -> np.ndarray:
    """Return perm with perm[row] = column minimizing sum(cost[row, perm[row]]).

    Of several minimizers the lexicographically smallest perm is returned.
    """
    cost = _check_cost(cost)
    n = cost.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)

    # row_of[col] = row matched to col, the dummy column n roots each search
    row_of = np.full(n + 1, -1, dtype=int)
    u = np.zeros(n)                 # row potentials
    v = np.zeros(n + 1)             # column potentials

    for row in range(n):
        col_cur = n
        row_of[col_cur] = row
        min_to = np.full(n + 1, np.inf)
        prev = np.full(n + 1, -1, dtype=int)
        in_tree = np.zeros(n + 1, dtype=bool)

        while row_of[col_cur] != -1:
            in_tree[col_cur] = True
            r = row_of[col_cur]
            free = ~in_tree[:n]
            reduced = cost[r] - u[r] - v[:n]
            better = free & (reduced < min_to[:n])
            min_to[:n][better] = reduced[better]
            prev[:n][better] = col_cur

            candidates = np.where(free, min_to[:n], np.inf)
            col_next = int(np.argmin(candidates))
            delta = candidates[col_next]

            tree_cols = np.flatnonzero(in_tree)
            u[row_of[tree_cols]] += delta
            v[tree_cols] -= delta
            min_to[~in_tree] -= delta
            col_cur = col_next

        # flip the augmenting path
        while col_cur != n:
            row_of[col_cur] = row_of[prev[col_cur]]
            col_cur = prev[col_cur]

    perm = np.empty(n, dtype=int)
    perm[row_of[:n]] = np.arange(n)
    return _lexicographic_min(cost, perm, u, v[:n])


def _lexicographic_min(cost: np.ndarray, perm: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Among the optimal assignments, pick the one whose perm is lexicographically smallest.

    With optimal potentials every optimal assignment uses only tight edges
    (zero reduced cost), so rows are fixed in order to their smallest column
    that still leaves a perfect matching on the tight edges.
    """
    n = len(perm)
    tight = cost - u[:, None] - v[None, :] <= TIGHT_TOL * (1.0 + np.max(np.abs(cost)))
    owner = np.empty(n, dtype=int)
    owner[perm] = np.arange(n)
    fixed = np.zeros(n, dtype=bool)     # columns of rows already settled

    for row in range(n):
        for col in np.flatnonzero(tight[row, :perm[row]] & ~fixed[:perm[row]]):
            path = _alternating_path(tight, owner, fixed, start=owner[col], target=perm[row], skip=col)
            if path is None:
                continue
            # path: row owner[col] -> c1 -> owner[c1] -> c2 ... -> perm[row]
            for r, c in path:
                perm[r] = c
                owner[c] = r
            perm[row], owner[col] = col, row
            break
        fixed[perm[row]] = True
    return perm


def _alternating_path(tight: np.ndarray, owner: np.ndarray, fixed: np.ndarray, start: int,
                      target: int, skip: int) -> Optional[List[Tuple[int, int]]]:
    """BFS from `start` over tight edges to column `target`; returns the (row, new col) moves."""
    came_from: Dict[int, Tuple[int, int]] = {}      # col -> (row that reaches it, previous col)
    queue = deque([(start, -1)])
    seen = np.zeros(len(owner), dtype=bool)
    seen[skip] = True
    while queue:
        r, via = queue.popleft()
        for c in np.flatnonzero(tight[r] & ~fixed & ~seen):
            seen[c] = True
            came_from[c] = (r, via)
            if c == target:
                moves = []
                while c != -1:
                    r, prev = came_from[c]
                    moves.append((r, c))
                    c = prev
                return moves
            queue.append((owner[c], c))
    return None


def assignment_cost(cost, perm) -> float:
    cost = np.asarray(cost, dtype=float)
    perm = np.asarray(perm, dtype=int)
    return float(cost[np.arange(len(perm)), perm].sum())
