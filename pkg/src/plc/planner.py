"""Lock-rotate-lock actuation planning and its verifying state machine.

The drive shaft applies torque at the top of the chain; everything above the
single loosened joint turns rigidly with it, so a shaft rotation changes only
the relative angle at that joint.  A plan therefore visits each joint whose
angle differs, base to tip: unlock it, rotate by the shortest wrapped delta,
lock it again.  At most one joint is ever unlocked.

Joints are numbered 1..n (base to tip), matching how the hardware units are
counted and how the CLI prints steps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import Configuration, InvariantError, PlcError, RobotDescription


@dataclass(frozen=True)
class Unlock:
    joint: int


@dataclass(frozen=True)
class Lock:
    joint: int


@dataclass(frozen=True)
class RotateShaft:
    """Shaft rotation by an exact number of tooth pitches (signed)."""

    pitch_steps: int

    def __post_init__(self):
        if isinstance(self.pitch_steps, bool) or not isinstance(self.pitch_steps, int):
            raise InvariantError(
                f"shaft rotation must be an integer pitch count, got {self.pitch_steps!r}"
            )

    def angle(self, desc: RobotDescription) -> float:
        return self.pitch_steps * desc.tooth_pitch


ActuationStep = Union[Unlock, Lock, RotateShaft]


@dataclass(frozen=True)
class JointState:
    """Lock flags plus the current configuration of every joint."""

    lock_flags: tuple[bool, ...]
    config: Configuration

    def __post_init__(self):
        object.__setattr__(self, "lock_flags", tuple(bool(f) for f in self.lock_flags))
        if len(self.lock_flags) != len(self.config.indices):
            raise InvariantError(
                f"{len(self.lock_flags)} lock flags for "
                f"{len(self.config.indices)} joints"
            )

    @property
    def unlocked_joints(self) -> tuple[int, ...]:
        """1-based numbers of the currently loosened joints."""
        return tuple(j + 1 for j, locked in enumerate(self.lock_flags) if not locked)


def all_locked(config: Configuration) -> JointState:
    return JointState((True,) * len(config.indices), config)


def _check_joint(state: JointState, joint: int) -> int:
    if isinstance(joint, bool) or not isinstance(joint, int):
        raise InvariantError(f"joint must be an integer, got {joint!r}")
    if not 1 <= joint <= len(state.lock_flags):
        raise InvariantError(
            f"joint {joint} outside 1..{len(state.lock_flags)}"
        )
    return joint - 1


def simulate_step(state: JointState, step: ActuationStep) -> JointState:
    """Apply one actuation step; raises on physically illegal steps."""
    if isinstance(step, Unlock):
        j = _check_joint(state, step.joint)
        flags = list(state.lock_flags)
        flags[j] = False
        return JointState(tuple(flags), state.config)
    if isinstance(step, Lock):
        j = _check_joint(state, step.joint)
        flags = list(state.lock_flags)
        flags[j] = True
        return JointState(tuple(flags), state.config)
    if isinstance(step, RotateShaft):
        unlocked = state.unlocked_joints
        if len(unlocked) != 1:
            raise PlcError("rotation requires exactly one loosened joint")
        j = unlocked[0] - 1
        teeth = state.config.tooth_count
        new_index = (state.config.indices[j] + step.pitch_steps) % teeth
        return JointState(state.lock_flags, state.config.with_index(j, new_index))
    raise PlcError(f"unknown actuation step {step!r}")


def simulate(state: JointState, steps) -> JointState:
    for step in steps:
        state = simulate_step(state, step)
    return state


def plan_to(
    desc: RobotDescription, start: Configuration, goal: Configuration
) -> list[ActuationStep]:
    """Schedule turning ``start`` into ``goal``, one loosened joint at a time.

    Joints are visited base to tip; each differing joint gets the triple
    unlock / rotate by the shortest wrapped delta / lock.  Executing the
    schedule from ``start`` with every joint locked ends exactly at ``goal``.
    """
    desc.check_configuration(start)
    desc.check_configuration(goal)
    teeth = desc.tooth_count
    steps: list[ActuationStep] = []
    for j, (s, g) in enumerate(zip(start.indices, goal.indices), start=1):
        if s == g:
            continue
        delta = (g - s) % teeth
        if delta > teeth // 2:
            delta -= teeth
        steps.extend([Unlock(j), RotateShaft(delta), Lock(j)])
    return steps
