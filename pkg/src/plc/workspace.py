"""Exhaustive workspace enumeration, spatial indexing, and cloud metrics.

The discrete configuration space (tooth_count ** segment_count joint states)
is swept once; end-effector positions are quantized to integer keys, equal
keys are merged into one reachable point with every contributing
configuration recorded, and a k-d tree is built over the distinct points.
The finished index is immutable and safe for concurrent queries.
"""
from __future__ import annotations

import math
import struct
from typing import Iterator

import numpy as np
from scipy.spatial import cKDTree

from .model import (
    DEFAULT_ENUMERATION_BUDGET,
    Configuration,
    InvariantError,
    PlcError,
    RobotDescription,
    description_digest,
    index_angle,
)

#: Quantization cell edge for position keys, mm.  Far below the 0.2 mm
#: mechanical clearance, far above float noise of <=16 composed transforms.
KEY_CELL = 1e-6

INDEX_FORMAT_VERSION = 1
_MAGIC = b"PLCW"
_HEADER = struct.Struct("<4sI32sIIQQ")


def position_key(position) -> np.ndarray:
    """Quantized integer key(s) of position(s): round(coord / cell)."""
    scaled = np.rint(np.asarray(position, dtype=float) / KEY_CELL)
    return scaled.astype(np.int64)


def _segment_tables(desc: RobotDescription) -> tuple[np.ndarray, np.ndarray]:
    """Per-tooth-index rotation (N,3,3) and translation (N,3) tables."""
    beta = desc.bend_angle
    radius = desc.curve_length / beta
    sag = radius * (1.0 - math.cos(beta))
    q = index_angle(np.arange(desc.tooth_count), desc.tooth_count)
    cq, sq = np.cos(q), np.sin(q)
    cb, sb = math.cos(beta), math.sin(beta)
    n = desc.tooth_count
    rot = np.zeros((n, 3, 3))
    rot[:, 0, 0] = cq * cb
    rot[:, 0, 1] = -sq
    rot[:, 0, 2] = cq * sb
    rot[:, 1, 0] = sq * cb
    rot[:, 1, 1] = cq
    rot[:, 1, 2] = sq * sb
    rot[:, 2, 0] = -sb
    rot[:, 2, 2] = cb
    tra = np.stack([sag * cq, sag * sq, np.full(n, radius * sb)], axis=1)
    return rot, tra


def enumeration_table(desc: RobotDescription) -> np.ndarray:
    """All joint-index tuples in canonical order, shape (N**n, n).

    Canonical order: joint 1 varies slowest, tooth index ascending, so row m
    holds the base-tooth_count digits of m.
    """
    n, teeth = desc.segment_count, desc.tooth_count
    grids = np.indices((teeth,) * n, dtype=np.int64)
    return grids.reshape(n, -1).T


def configuration_from_rank(rank, desc: RobotDescription) -> np.ndarray:
    """Joint indices of enumeration rank(s): digits of rank base tooth_count."""
    rank = np.asarray(rank, dtype=np.int64)
    n, teeth = desc.segment_count, desc.tooth_count
    powers = teeth ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (rank[..., None] // powers) % teeth


def _batch_positions(desc: RobotDescription, joint_indices: np.ndarray) -> np.ndarray:
    """End-effector positions for a batch of configurations, shape (M, 3)."""
    rot_tab, tra_tab = _segment_tables(desc)
    rotation = rot_tab[joint_indices[:, 0]]
    position = tra_tab[joint_indices[:, 0]].copy()
    for joint in range(1, joint_indices.shape[1]):
        local_rot = rot_tab[joint_indices[:, joint]]
        local_tra = tra_tab[joint_indices[:, joint]]
        position += np.einsum("mij,mj->mi", rotation, local_tra)
        rotation = rotation @ local_rot
    return position


class WorkspaceIndex:
    """Reachable-point set with a k-d tree and a point -> configurations map.

    points:          (G, 3) distinct reachable positions, one per key, ordered
                     by ascending key; each is the position of the first
                     configuration (in canonical order) that produced the key.
    bucket_offsets:  (G + 1,) slice bounds into bucket_members.
    bucket_members:  (M,) enumeration ranks grouped per point, each group in
                     canonical (ascending) order.
    """

    def __init__(
        self,
        desc: RobotDescription,
        points: np.ndarray,
        bucket_offsets: np.ndarray,
        bucket_members: np.ndarray,
    ):
        points = np.ascontiguousarray(points, dtype=float)
        bucket_offsets = np.ascontiguousarray(bucket_offsets, dtype=np.int64)
        bucket_members = np.ascontiguousarray(bucket_members, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise InvariantError("points must have shape (G, 3)")
        if bucket_offsets.shape != (points.shape[0] + 1,):
            raise InvariantError("bucket_offsets must have G + 1 entries")
        if bucket_offsets[0] != 0 or bucket_offsets[-1] != bucket_members.shape[0]:
            raise InvariantError("bucket_offsets must span bucket_members exactly")
        if np.any(np.diff(bucket_offsets) < 1):
            raise InvariantError("every reachable point needs >= 1 configuration")
        for arr in (points, bucket_offsets, bucket_members):
            arr.setflags(write=False)
        self.desc = desc
        self.points = points
        self.bucket_offsets = bucket_offsets
        self.bucket_members = bucket_members
        self.keys = position_key(points)
        self.keys.setflags(write=False)
        self.tree = cKDTree(points)

    # -- size ----------------------------------------------------------------

    @property
    def point_count(self) -> int:
        return self.points.shape[0]

    @property
    def configuration_count(self) -> int:
        return self.bucket_members.shape[0]

    # -- buckets ---------------------------------------------------------------

    def bucket_size(self, point_index: int) -> int:
        return int(self.bucket_offsets[point_index + 1] - self.bucket_offsets[point_index])

    def bucket_ranks(self, point_index: int) -> np.ndarray:
        """Enumeration ranks of the configurations reaching a point."""
        lo, hi = self.bucket_offsets[point_index], self.bucket_offsets[point_index + 1]
        return self.bucket_members[lo:hi]

    def configurations_at(self, point_index: int) -> list[Configuration]:
        digits = configuration_from_rank(self.bucket_ranks(point_index), self.desc)
        teeth = self.desc.tooth_count
        return [Configuration(tuple(int(k) for k in row), teeth) for row in digits]

    def iter_buckets(self) -> Iterator[tuple[tuple[int, int, int], np.ndarray]]:
        for g in range(self.point_count):
            yield tuple(int(v) for v in self.keys[g]), self.bucket_ranks(g)

    def config_map(self) -> dict[tuple[int, int, int], list[Configuration]]:
        """Materialized key -> configurations multimap (small robots only)."""
        return {
            tuple(int(v) for v in self.keys[g]): self.configurations_at(g)
            for g in range(self.point_count)
        }

    # -- queries ---------------------------------------------------------------

    def nearest_point_index(self, target) -> int:
        """Index of the stored point nearest to ``target``.

        Exact squared distances break near-ties from the tree query; remaining
        exact ties go to the lexicographically smallest quantized key.
        """
        if self.point_count == 0:
            raise PlcError("empty workspace index")
        target = np.asarray(target, dtype=float)
        if target.shape != (3,):
            raise PlcError(f"target must be a 3-vector, got shape {target.shape}")
        dist, _ = self.tree.query(target)
        candidates = self.tree.query_ball_point(target, dist + 1e-9)
        diffs = self.points[candidates] - target
        sq = np.einsum("ij,ij->i", diffs, diffs)
        best = sq.min()
        tied = [candidates[i] for i in np.flatnonzero(sq == best)]
        return min(tied, key=lambda g: tuple(self.keys[g]))

    # -- persistence -------------------------------------------------------------

    def save(self, path) -> None:
        digest = description_digest(self.desc)
        header = _HEADER.pack(
            _MAGIC,
            INDEX_FORMAT_VERSION,
            digest,
            self.desc.segment_count,
            self.desc.tooth_count,
            self.point_count,
            self.configuration_count,
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.points.astype("<f8").tobytes())
            fh.write(self.bucket_offsets.astype("<i8").tobytes())
            fh.write(self.bucket_members.astype("<i8").tobytes())

    @classmethod
    def load(cls, path, desc: RobotDescription) -> "WorkspaceIndex":
        with open(path, "rb") as fh:
            raw = fh.read()
        if len(raw) < _HEADER.size:
            raise PlcError(f"index file {path} is truncated")
        magic, version, digest, n, teeth, points_n, configs_n = _HEADER.unpack_from(raw)
        if magic != _MAGIC:
            raise PlcError(f"{path} is not a workspace index file")
        if version != INDEX_FORMAT_VERSION:
            raise PlcError(
                f"index format version {version} unsupported "
                f"(expected {INDEX_FORMAT_VERSION})"
            )
        if digest != description_digest(desc):
            raise PlcError("index was built for a different robot description")
        if (n, teeth) != (desc.segment_count, desc.tooth_count):
            raise PlcError("index header disagrees with robot description")
        expected = _HEADER.size + points_n * 24 + (points_n + 1) * 8 + configs_n * 8
        if len(raw) != expected:
            raise PlcError(f"index file {path} is truncated or padded")
        off = _HEADER.size
        points = np.frombuffer(raw, dtype="<f8", count=points_n * 3, offset=off)
        off += points_n * 24
        offsets = np.frombuffer(raw, dtype="<i8", count=points_n + 1, offset=off)
        off += (points_n + 1) * 8
        members = np.frombuffer(raw, dtype="<i8", count=configs_n, offset=off)
        return cls(desc, points.reshape(points_n, 3).copy(), offsets.copy(), members.copy())


def enumerate_workspace(
    desc: RobotDescription, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> WorkspaceIndex:
    """Sweep every discrete configuration and build the workspace index.

    Order is canonical (joint 1 slowest, tooth index ascending), so repeated
    runs produce bit-identical indexes and bucket lists keep a reproducible
    order.
    """
    desc.check_budget(budget)
    joint_indices = enumeration_table(desc)
    positions = _batch_positions(desc, joint_indices)
    keys = position_key(positions)
    # stable sort -> groups in key order, canonical rank order inside a group
    order = np.lexsort((keys[:, 2], keys[:, 1], keys[:, 0]))
    sorted_keys = keys[order]
    new_group = np.empty(order.shape[0], dtype=bool)
    new_group[0] = True
    new_group[1:] = np.any(sorted_keys[1:] != sorted_keys[:-1], axis=1)
    starts = np.flatnonzero(new_group)
    offsets = np.append(starts, order.shape[0]).astype(np.int64)
    first_rank = order[starts]
    points = positions[first_rank]
    return WorkspaceIndex(desc, points, offsets, order.astype(np.int64))


def knn_query(index: WorkspaceIndex, target) -> tuple[np.ndarray, list[Configuration]]:
    """Nearest reachable point and every configuration that reaches it."""
    g = index.nearest_point_index(target)
    return index.points[g].copy(), index.configurations_at(g)


def reach_accuracy(index: WorkspaceIndex, queries) -> float:
    """Worst-case distance from any query to its nearest reachable point."""
    if index.point_count == 0:
        raise PlcError("empty workspace index")
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if queries.size == 0:
        raise PlcError("no query points given")
    if queries.shape[1] != 3:
        raise PlcError("queries must be 3-vectors")
    dists, _ = index.tree.query(queries)
    return float(np.max(dists))


def omnivariance(points) -> float:
    """Cube root of the covariance eigenvalue product of a 3-D point cloud.

    Eigenvalues within 1e-12 of zero (relative to the largest) are clamped to
    exactly zero, so planar or degenerate clouds report 0 rather than cube
    roots of rounding noise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise PlcError("omnivariance needs an (N, 3) point cloud")
    if pts.shape[0] < 2:
        raise PlcError("omnivariance needs at least two points")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / pts.shape[0]
    eigenvalues = np.linalg.eigvalsh(cov)
    top = eigenvalues[-1]
    if top <= 0.0:
        return 0.0
    eigenvalues = np.where(np.abs(eigenvalues) <= 1e-12 * top, 0.0, eigenvalues)
    if np.any(eigenvalues < 0.0):
        raise PlcError("covariance produced a significantly negative eigenvalue")
    return float(np.cbrt(eigenvalues[0] * eigenvalues[1] * eigenvalues[2]))


def local_omnivariance(points, neighbors: int) -> np.ndarray:
    """Per-point omnivariance over each point's k-nearest neighborhood.

    The neighborhood includes the point itself; ``neighbors`` >= 4 keeps the
    local covariance non-degenerate in general position.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise PlcError("local omnivariance needs an (N, 3) point cloud")
    if not 2 <= neighbors <= pts.shape[0]:
        raise PlcError(
            f"neighborhood size {neighbors} outside [2, {pts.shape[0]}]"
        )
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=neighbors)
    hoods = pts[idx]
    centered = hoods - hoods.mean(axis=1, keepdims=True)
    covs = np.einsum("nki,nkj->nij", centered, centered) / neighbors
    eigenvalues = np.linalg.eigvalsh(covs)
    top = eigenvalues[:, -1:]
    eigenvalues = np.where(np.abs(eigenvalues) <= 1e-12 * np.maximum(top, 0.0), 0.0, eigenvalues)
    return np.cbrt(eigenvalues[:, 0] * eigenvalues[:, 1] * eigenvalues[:, 2])
