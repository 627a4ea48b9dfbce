"""Closed-form forward kinematics for chains of identical inclined units.

Each unit is a constant-curvature arc of length L bent by a fixed angle beta;
joint q_i spins the arc's bending plane about the local z-axis.  The distal
end of one unit sits at

    x = (L/beta) (1 - cos beta) cos q
    y = (L/beta) (1 - cos beta) sin q
    z = (L/beta) sin beta

with frame rotation RotZ(q) * RotY(beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Configuration, InvariantError, RigidTransform, RobotDescription, index_angle


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class SegmentPose:
    """Kinematic state of one segment within a chain.

    transform: the segment's own frame-to-frame transform.
    pose:      cumulative base-frame pose after this segment.
    axis:      world-frame axial unit vector at the segment's base (the z-axis
               of the frame the segment transform is expressed in).
    """

    transform: RigidTransform
    pose: RigidTransform
    axis: np.ndarray

    def __post_init__(self):
        axis = np.array(self.axis, dtype=float)
        if axis.shape != (3,) or abs(float(np.linalg.norm(axis)) - 1.0) > 1e-12:
            raise InvariantError("segment axis must be a unit 3-vector")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)


def segment_transform(desc: RobotDescription, q: float) -> RigidTransform:
    """Transform across one unit at joint angle ``q`` (radians)."""
    beta = desc.bend_angle
    if beta == 0.0:
        # guards the arc-chord ratio below; a straight-unit limit form could
        # live behind this same entry point later
        raise InvariantError("degenerate straight unit: bend_angle must be nonzero")
    radius = desc.curve_length / beta
    sag = radius * (1.0 - math.cos(beta))
    translation = np.array(
        [sag * math.cos(q), sag * math.sin(q), radius * math.sin(beta)]
    )
    return RigidTransform(rot_z(q) @ rot_y(beta), translation)


def chain_pose(
    desc: RobotDescription, config: Configuration
) -> tuple[RigidTransform, list[SegmentPose]]:
    """End pose and per-segment poses for a full chain.

    The end pose is the left-to-right product of the per-joint transforms;
    each returned :class:`SegmentPose` carries the segment's own transform,
    the cumulative pose, and the world-frame axis used by the stiffness model.
    """
    desc.check_configuration(config)
    rotation = np.eye(3)
    translation = np.zeros(3)
    segments = []
    for k in config.indices:
        local = segment_transform(desc, float(index_angle(k, desc.tooth_count)))
        axis = rotation[:, 2].copy()
        translation = rotation @ local.translation + translation
        rotation = rotation @ local.rotation
        segments.append(
            SegmentPose(
                transform=local,
                pose=RigidTransform(rotation.copy(), translation.copy()),
                axis=axis,
            )
        )
    return RigidTransform(rotation, translation), segments


def segment_axes(desc: RobotDescription, config: Configuration) -> np.ndarray:
    """World-frame axial unit vectors of every segment, shape (n, 3)."""
    _, segments = chain_pose(desc, config)
    return np.array([seg.axis for seg in segments])


def tool_tip(end_pose: RigidTransform, tool_offset) -> np.ndarray:
    """Base-frame tool-tip position for a tool mounted at ``tool_offset``."""
    return end_pose.transform_point(tool_offset)
