import math

import numpy as np
import pytest

from plc import Configuration, RobotDescription, chain_pose, tool_tip
from plc.kinematics import rot_y, rot_z, segment_axes, segment_transform
from plc.model import RigidTransform, index_angle

from _oracles import fk_matrix, fk_position
from conftest import desc_with

# direct evaluation of the arc formula with L=30mm, beta=30deg
SAG_AT_30DEG = 7.676178925121034
RISE_AT_30DEG = 28.64788975654116


def test_segment_translation_at_zero():
    desc = RobotDescription()
    pose = segment_transform(desc, 0.0)
    radius = desc.curve_length / desc.bend_angle
    expected = np.array(
        [radius * (1.0 - math.cos(desc.bend_angle)), 0.0, radius * math.sin(desc.bend_angle)]
    )
    assert np.allclose(pose.translation, expected, rtol=1e-15, atol=0.0)
    assert pose.translation == pytest.approx([SAG_AT_30DEG, 0.0, RISE_AT_30DEG], abs=1e-9)


def test_segment_rotation_at_zero_is_pure_pitch():
    desc = RobotDescription()
    pose = segment_transform(desc, 0.0)
    assert np.array_equal(pose.rotation, rot_y(desc.bend_angle))


def test_segment_translation_at_half_turn():
    desc = RobotDescription()
    pose = segment_transform(desc, float(index_angle(5, 10)))
    assert pose.translation[0] == pytest.approx(-SAG_AT_30DEG, abs=1e-9)
    assert pose.translation[1] == pytest.approx(0.0, abs=1e-12)
    assert pose.translation[2] == pytest.approx(RISE_AT_30DEG, abs=1e-9)


def test_single_segment_chain_equals_segment_transform():
    desc = desc_with(segment_count=1)
    end, segments = chain_pose(desc, Configuration((3,), 10))
    direct = segment_transform(desc, float(index_angle(3, 10)))
    assert np.array_equal(end.rotation, direct.rotation)
    assert np.array_equal(end.translation, direct.translation)
    assert len(segments) == 1


def test_all_zero_chain_stays_in_xz_plane():
    desc = RobotDescription()
    end, segments = chain_pose(desc, Configuration((0,) * 5, 10))
    assert end.translation[1] == 0.0
    for seg in segments:
        assert seg.pose.translation[1] == 0.0


def test_intermediate_transforms_compose_to_end_pose():
    desc = RobotDescription()
    config = Configuration((2, 9, 0, 5, 7), 10)
    end, segments = chain_pose(desc, config)
    combined = RigidTransform.identity()
    for seg in segments:
        combined = combined.compose(seg.transform)
    assert np.allclose(combined.translation, end.translation, atol=1e-10)
    assert np.allclose(combined.rotation, end.rotation, atol=1e-10)


def test_chain_matches_homogeneous_oracle():
    desc = desc_with(segment_count=4)
    rng = np.random.default_rng(7)
    for _ in range(25):
        indices = tuple(int(v) for v in rng.integers(0, 10, 4))
        end, _ = chain_pose(desc, Configuration(indices, 10))
        expected = fk_matrix(desc, indices)
        assert np.allclose(end.translation, expected[:3, 3], atol=1e-12)
        assert np.allclose(end.rotation, expected[:3, :3], atol=1e-12)


def test_segment_axes_match_cumulative_frames():
    desc = desc_with(segment_count=4)
    indices = (1, 4, 8, 2)
    axes = segment_axes(desc, Configuration(indices, 10))
    assert np.array_equal(axes[0], [0.0, 0.0, 1.0])
    for i in range(1, 4):
        prefix = fk_matrix(desc, indices[:i])
        assert np.allclose(axes[i], prefix[:3, 2], atol=1e-12)
        assert np.linalg.norm(axes[i]) == pytest.approx(1.0, abs=1e-12)


def test_tool_tip():
    desc = RobotDescription()
    end, _ = chain_pose(desc, Configuration((1, 2, 3, 4, 5), 10))
    assert np.array_equal(tool_tip(end, (0.0, 0.0, 0.0)), end.translation)
    identity = RigidTransform.identity()
    assert np.allclose(tool_tip(identity, (1.0, 2.0, 3.0)), [1.0, 2.0, 3.0])
    turned = RigidTransform(rot_z(math.pi / 2.0), np.array([10.0, 0.0, 0.0]))
    assert np.allclose(tool_tip(turned, (1.0, 0.0, 0.0)), [10.0, 1.0, 0.0], atol=1e-12)


def test_end_position_within_arc_length_bound():
    rng = np.random.default_rng(11)
    for n in range(1, 9):
        desc = desc_with(segment_count=n)
        for _ in range(25):
            indices = tuple(int(v) for v in rng.integers(0, 10, n))
            end, _ = chain_pose(desc, Configuration(indices, 10))
            assert np.linalg.norm(end.translation) <= n * desc.curve_length + 1e-9


def test_base_joint_shift_rotates_end_position():
    desc = RobotDescription()
    rng = np.random.default_rng(3)
    for _ in range(20):
        indices = [int(v) for v in rng.integers(0, 10, 5)]
        shift = int(rng.integers(1, 10))
        end, _ = chain_pose(desc, Configuration(tuple(indices), 10))
        shifted = list(indices)
        shifted[0] = (shifted[0] + shift) % 10
        end_shifted, _ = chain_pose(desc, Configuration(tuple(shifted), 10))
        wrapped = (indices[0] + shift) % 10 - indices[0]
        rotation = rot_z(float(index_angle(wrapped, 10)))
        assert np.allclose(end_shifted.translation, rotation @ end.translation, atol=1e-9)


def test_rotation_stays_orthonormal_after_100_segments():
    desc = desc_with(segment_count=100)
    rng = np.random.default_rng(42)
    indices = tuple(int(v) for v in rng.integers(0, 10, 100))
    end, _ = chain_pose(desc, Configuration(indices, 10))
    drift = np.abs(end.rotation.T @ end.rotation - np.eye(3)).max()
    assert drift < 1e-10
