"""
Balanced k-d tree for fixed-radius neighbor queries.

The tree is built once in numpy (median split, axis = depth mod 3, leaf
buckets) and stored as flat node arrays, so the query kernels can run under
numba. Neighborhoods are closed balls: a point at distance exactly ``r`` is a
neighbor. When a cloud point is queried by its index it is excluded from its
own neighborhood; a query by coordinates returns every cloud point in the
ball, including one that coincides with the query.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from edgepose.utils.accel import njit, prange

logger = logging.getLogger(__name__)

_STACK_SIZE = 128


@dataclass
class NeighborSet:
    """Indices of the neighbors of one query, ascending."""
    indices: np.ndarray

    @property
    def k(self) -> int:
        return int(self.indices.shape[0])

    def __len__(self) -> int:
        return self.k

    def as_set(self) -> set:
        return set(int(i) for i in self.indices)


@njit
def _axis_gap(q, lo, hi):
    if q < lo:
        return lo - q
    if q > hi:
        return q - hi
    return 0.0


@njit
def _box_distance2(node, lower, upper, qx, qy, qz):
    dx = _axis_gap(qx, lower[node, 0], upper[node, 0])
    dy = _axis_gap(qy, lower[node, 1], upper[node, 1])
    dz = _axis_gap(qz, lower[node, 2], upper[node, 2])
    return dx * dx + dy * dy + dz * dz


@njit
def _ball_visit(points, perm, starts, ends, lefts, rights, lower, upper,
                qx, qy, qz, r2, exclude, out):
    """Walk the tree for one ball; writes hits into ``out`` if it has room, returns the hit count."""
    stack = np.empty(_STACK_SIZE, np.int64)
    stack[0] = 0
    top = 1
    count = 0
    capacity = out.shape[0]
    while top > 0:
        top -= 1
        node = stack[top]
        if _box_distance2(node, lower, upper, qx, qy, qz) > r2:
            continue
        if lefts[node] < 0:
            for p in range(starts[node], ends[node]):
                j = perm[p]
                if j == exclude:
                    continue
                dx = points[j, 0] - qx
                dy = points[j, 1] - qy
                dz = points[j, 2] - qz
                if dx * dx + dy * dy + dz * dz <= r2:
                    if count < capacity:
                        out[count] = j
                    count += 1
        else:
            stack[top] = lefts[node]
            stack[top + 1] = rights[node]
            top += 2
    return count


@njit(parallel=True)
def _batch_count(points, perm, starts, ends, lefts, rights, lower, upper,
                 queries, excludes, r2, counts):
    empty = np.empty(0, np.int64)
    for i in prange(queries.shape[0]):
        counts[i] = _ball_visit(points, perm, starts, ends, lefts, rights, lower, upper,
                                queries[i, 0], queries[i, 1], queries[i, 2],
                                r2, excludes[i], empty)


@njit(parallel=True)
def _batch_fill(points, perm, starts, ends, lefts, rights, lower, upper,
                queries, excludes, r2, offsets, out):
    for i in prange(queries.shape[0]):
        a = offsets[i]
        b = offsets[i + 1]
        _ball_visit(points, perm, starts, ends, lefts, rights, lower, upper,
                    queries[i, 0], queries[i, 1], queries[i, 2],
                    r2, excludes[i], out[a:b])
        out[a:b] = np.sort(out[a:b])


@njit(parallel=True)
def _batch_knn(points, perm, starts, ends, lefts, rights, lower, upper,
               queries, k, out_idx, out_d2):
    for i in prange(queries.shape[0]):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        best_d = np.empty(k, np.float64)
        best_i = np.empty(k, np.int64)
        for m in range(k):
            best_d[m] = np.inf
            best_i[m] = -1
        stack = np.empty(_STACK_SIZE, np.int64)
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            if _box_distance2(node, lower, upper, qx, qy, qz) > best_d[k - 1]:
                continue
            if lefts[node] < 0:
                for p in range(starts[node], ends[node]):
                    j = perm[p]
                    dx = points[j, 0] - qx
                    dy = points[j, 1] - qy
                    dz = points[j, 2] - qz
                    dd = dx * dx + dy * dy + dz * dz
                    if dd < best_d[k - 1] or (dd == best_d[k - 1] and j < best_i[k - 1]):
                        pos = k - 1
                        while pos > 0 and (best_d[pos - 1] > dd or
                                           (best_d[pos - 1] == dd and best_i[pos - 1] > j)):
                            best_d[pos] = best_d[pos - 1]
                            best_i[pos] = best_i[pos - 1]
                            pos -= 1
                        best_d[pos] = dd
                        best_i[pos] = j
            else:
                stack[top] = lefts[node]
                stack[top + 1] = rights[node]
                top += 2
        for m in range(k):
            out_idx[i, m] = best_i[m]
            out_d2[i, m] = best_d[m]


class SpatialIndex:
    """Immutable k-d tree over the rows of an (n, 3) array."""

    def __init__(self, points: np.ndarray, leaf_size: int = 16):
        points = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 3))
        if points.shape[0] == 0:
            raise ValueError("cannot build a spatial index over an empty cloud")
        if leaf_size < 1:
            raise ValueError("leaf_size must be >= 1")
        self.points = points
        self.leaf_size = leaf_size
        self._build()

    @classmethod
    def build(cls, cloud, leaf_size: int = 16) -> 'SpatialIndex':
        """Index a PointCloud (or raw (n, 3) array)."""
        points = cloud.points if hasattr(cloud, "points") else cloud
        return cls(points, leaf_size=leaf_size)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.size

    def _build(self):
        perm = np.arange(self.size, dtype=np.int64)
        starts, ends, lefts, rights, lowers, uppers = [], [], [], [], [], []

        def split(start: int, end: int, depth: int) -> int:
            node = len(starts)
            starts.append(start)
            ends.append(end)
            lefts.append(-1)
            rights.append(-1)
            block = self.points[perm[start:end]]
            lowers.append(block.min(axis=0))
            uppers.append(block.max(axis=0))
            if end - start > self.leaf_size:
                order = np.argsort(block[:, depth % 3], kind="stable")
                perm[start:end] = perm[start:end][order]
                mid = start + (end - start) // 2
                lefts[node] = split(start, mid, depth + 1)
                rights[node] = split(mid, end, depth + 1)
            return node

        split(0, self.size, 0)
        self.perm = perm
        self.starts = np.array(starts, dtype=np.int64)
        self.ends = np.array(ends, dtype=np.int64)
        self.lefts = np.array(lefts, dtype=np.int64)
        self.rights = np.array(rights, dtype=np.int64)
        self.lower = np.ascontiguousarray(np.array(lowers, dtype=np.float64))
        self.upper = np.ascontiguousarray(np.array(uppers, dtype=np.float64))
        logger.debug(f"Built k-d tree: {self.size} points, {len(starts)} nodes")

    def _tree(self):
        return (self.points, self.perm, self.starts, self.ends, self.lefts, self.rights,
                self.lower, self.upper)

    def _queries(self, queries: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        if queries is None:
            return self.points, np.arange(self.size, dtype=np.int64)
        queries = np.ascontiguousarray(np.asarray(queries, dtype=np.float64).reshape(-1, 3))
        return queries, np.full(queries.shape[0], -1, dtype=np.int64)

    @staticmethod
    def _check_radius(r: float) -> float:
        r = float(r)
        if not r > 0:
            raise ValueError(f"query radius must be positive, got {r}")
        return r

    def radius_neighbors(self, query: Union[int, np.integer, np.ndarray, tuple], r: float) -> NeighborSet:
        """Neighbors within distance r of a cloud index (self excluded) or of a free point."""
        r = self._check_radius(r)
        if isinstance(query, (int, np.integer)):
            index = int(query)
            if not 0 <= index < self.size:
                raise IndexError(f"point index {index} out of range for {self.size} points")
            q = self.points[index]
            exclude = index
        else:
            q = np.asarray(query, dtype=np.float64).reshape(3)
            exclude = -1
        out = np.empty(self.size, dtype=np.int64)
        count = _ball_visit(*self._tree(), q[0], q[1], q[2], r * r, exclude, out)
        return NeighborSet(indices=np.sort(out[:count]))

    def count_neighbors(self, r: float, queries: Optional[np.ndarray] = None) -> np.ndarray:
        """Neighbor count per query; ``queries=None`` means every cloud point by index."""
        r = self._check_radius(r)
        q, excludes = self._queries(queries)
        counts = np.zeros(q.shape[0], dtype=np.int64)
        _batch_count(*self._tree(), q, excludes, r * r, counts)
        return counts

    def radius_neighbors_batch(self, r: float,
                               queries: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        """CSR neighbor lists: neighbors of query i are ``indices[offsets[i]:offsets[i + 1]]``."""
        r = self._check_radius(r)
        q, excludes = self._queries(queries)
        counts = np.zeros(q.shape[0], dtype=np.int64)
        _batch_count(*self._tree(), q, excludes, r * r, counts)
        offsets = np.zeros(q.shape[0] + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        indices = np.empty(int(offsets[-1]), dtype=np.int64)
        _batch_fill(*self._tree(), q, excludes, r * r, offsets, indices)
        return offsets, indices

    def knn(self, k: int, queries: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        """The k nearest cloud points of each query (a cloud point's own index included).

        Returns (indices, distances), both shaped (m, k) and sorted by distance,
        ties by index.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if k > self.size:
            raise ValueError(f"k = {k} exceeds the {self.size} indexed points")
        q, _ = self._queries(queries)
        out_idx = np.empty((q.shape[0], k), dtype=np.int64)
        out_d2 = np.empty((q.shape[0], k), dtype=np.float64)
        _batch_knn(*self._tree(), q, int(k), out_idx, out_d2)
        return out_idx, np.sqrt(out_d2)


def brute_force_neighbors(points: np.ndarray, query, r: float) -> set:
    """O(n) reference scan with the same contract as ``radius_neighbors``."""
    points = np.asarray(points, dtype=np.float64)
    if isinstance(query, (int, np.integer)):
        q = points[int(query)]
        hits = np.flatnonzero(np.sum((points - q) ** 2, axis=1) <= r * r)
        return set(int(i) for i in hits if i != int(query))
    q = np.asarray(query, dtype=np.float64)
    return set(int(i) for i in np.flatnonzero(np.sum((points - q) ** 2, axis=1) <= r * r))
