"""Inverse kinematics by nearest-neighbor lookup in the workspace index.

The discrete workspace makes IK a two-stage selection: find the reachable
point nearest the target, then pick one configuration out of that point's
bucket.  Redundant candidates are disambiguated against a reference
configuration; by default the distance between configurations is the sum of
wrapped per-joint rotations, which reflects what the hardware would actually
turn (a joint may rotate freely through a full revolution, so 324 deg and
0 deg are one tooth apart, not nine).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import chain_pose
from .model import Configuration, InvariantError, PlcError, RobotDescription
from .workspace import WorkspaceIndex, configuration_from_rank

METRICS = ("wrapped", "euclidean")


@dataclass(frozen=True)
class IkSolution:
    config: Configuration
    achieved_position: np.ndarray
    position_error: float
    candidate_count: int


def configuration_distance(a, b, tooth_count: int, metric: str = "wrapped"):
    """Distance between joint-index vectors, in tooth-pitch units.

    wrapped:   sum_j min(|dk|, N - |dk|)        (circular per joint)
    euclidean: sum_j dk^2                        (raw index differences)

    Both are computed on integers, so comparisons between candidates are
    exact.  Works on a single vector or on a stack of candidates.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    delta = np.abs(a - b)
    if metric == "wrapped":
        return np.minimum(delta, tooth_count - delta).sum(axis=-1)
    if metric == "euclidean":
        return (delta**2).sum(axis=-1)
    raise PlcError(f"unknown configuration metric '{metric}'")


def solve_ik(
    index: WorkspaceIndex,
    desc: RobotDescription,
    target,
    reference: Configuration,
    metric: str = "wrapped",
    seed: int | None = None,
) -> IkSolution:
    """Reach ``target`` as closely as possible, staying near ``reference``.

    Among the configurations of the nearest reachable point, returns the one
    minimizing the configuration distance to ``reference`` (ties go to the
    lexicographically smallest joint-index tuple).  ``seed`` replaces the
    reference-based choice with a seeded uniform pick over the candidates.
    """
    if index.point_count == 0:
        raise PlcError("empty workspace index")
    if desc != index.desc:
        raise InvariantError("index was built from a different robot description")
    desc.check_configuration(reference)
    if metric not in METRICS:
        raise PlcError(f"unknown configuration metric '{metric}'")

    g = index.nearest_point_index(target)
    ranks = index.bucket_ranks(g)
    digits = configuration_from_rank(ranks, desc)
    if seed is not None:
        best = int(np.random.default_rng(seed).integers(len(ranks)))
    else:
        scores = configuration_distance(digits, np.array(reference.indices), desc.tooth_count, metric)
        # buckets are in canonical order, so argmin's first hit is the
        # lexicographically smallest tied candidate
        best = int(np.argmin(scores))

    config = Configuration(tuple(int(k) for k in digits[best]), desc.tooth_count)
    end_pose, _ = chain_pose(desc, config)
    achieved = end_pose.translation.copy()
    error = float(np.linalg.norm(achieved - np.asarray(target, dtype=float)))
    return IkSolution(
        config=config,
        achieved_position=achieved,
        position_error=error,
        candidate_count=len(ranks),
    )
