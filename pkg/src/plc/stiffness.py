"""Stiffness models: firmed-state compliance, loosening threshold and
post-detachment force-deflection law, and torsion of spine and bellows skin.

Firmed state: with every locking ring engaged the chain behaves as one
elastic body.  Each segment stores bending + axial strain energy under the
tip force (the force transmits unchanged along the unloaded chain), and the
energy method (Castigliano) turns the total energy into a linear
force -> displacement map

    delta = C F,   C = sum_i [ L/(EA) (v_i v_i^T) + L^3/(3EI) (I - v_i v_i^T) ]

with v_i the world-frame axial unit vector of segment i.  C maps N -> mm, so
it is a compliance; directional stiffness is reported as |F| / |delta|.

Loosening state: an external force large enough to out-lever the tendon
tension opens the locking ring; past that threshold further deflection is
dominated by tendon stretch, giving a shallower second slope.

All lengths mm, forces N, moduli MPa, torques N*mm, angles rad.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .kinematics import segment_axes
from .model import Configuration, InvariantError, PlcError, RobotDescription


def _bending_inertia(desc: RobotDescription, literal_polar: bool) -> float:
    # literal_polar doubles the bending inertia (uses the torsion polar moment
    # in the bending terms); kept for sensitivity checks only
    return desc.spine_polar_inertia if literal_polar else desc.spine_bending_inertia


def _check_unit(vector, what: str) -> np.ndarray:
    v = np.asarray(vector, dtype=float)
    if v.shape != (3,) or abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
        raise InvariantError(f"{what} must be a unit 3-vector")
    return v


def segment_strain_energy(
    desc: RobotDescription, axis, force, literal_polar: bool = False
) -> float:
    """Bending + axial strain energy of one segment under a tip force, N*mm.

    Bending moment grows linearly from the tip, axial load is constant, so
    the length integrals collapse to

        U_b = (|F|^2 - (v.F)^2) L^3 / (6 E I)
        U_n = (v.F)^2 L / (2 E A)
    """
    v = _check_unit(axis, "segment axis")
    f = np.asarray(force, dtype=float)
    length = desc.curve_length
    e = desc.youngs_modulus
    inertia = _bending_inertia(desc, literal_polar)
    area = desc.spine_cross_section_area
    axial = float(v @ f)
    bending_sq = float(f @ f) - axial**2
    return bending_sq * length**3 / (6.0 * e * inertia) + axial**2 * length / (
        2.0 * e * area
    )


def total_strain_energy(
    desc: RobotDescription, config: Configuration, force, literal_polar: bool = False
) -> float:
    """Chain strain energy: the same tip force loads every segment."""
    return sum(
        segment_strain_energy(desc, axis, force, literal_polar)
        for axis in segment_axes(desc, config)
    )


@dataclass(frozen=True)
class ComplianceMatrix:
    """Symmetric positive-definite tip force -> tip displacement map, mm/N."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise InvariantError("compliance matrix must be 3x3")
        if np.abs(m - m.T).max() > 1e-12:
            raise InvariantError("compliance matrix must be symmetric")
        if float(np.linalg.eigvalsh(m)[0]) <= 0.0:
            raise InvariantError("compliance matrix must be positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def displacement(self, force) -> np.ndarray:
        """Tip displacement (mm) under a tip force (N)."""
        return self.matrix @ np.asarray(force, dtype=float)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def compliance_from_axes(
    desc: RobotDescription, axes, literal_polar: bool = False
) -> ComplianceMatrix:
    """Compliance of a chain whose segments have the given axial unit vectors."""
    length = desc.curve_length
    e = desc.youngs_modulus
    axial_term = length / (e * desc.spine_cross_section_area)
    bending_term = length**3 / (3.0 * e * _bending_inertia(desc, literal_polar))
    total = np.zeros((3, 3))
    for axis in np.atleast_2d(np.asarray(axes, dtype=float)):
        outer = np.outer(axis, axis)
        total += axial_term * outer + bending_term * (np.eye(3) - outer)
    return ComplianceMatrix(total)


def firmed_compliance(
    desc: RobotDescription, config: Configuration, literal_polar: bool = False
) -> ComplianceMatrix:
    """Maximum-stiffness-state compliance of the chain at ``config``."""
    return compliance_from_axes(desc, segment_axes(desc, config), literal_polar)


def directional_stiffness(
    desc: RobotDescription, config: Configuration, direction, literal_polar: bool = False
) -> float:
    """|F| / |delta| for a unit force along ``direction``, N/mm."""
    u = _check_unit(direction, "direction")
    compliance = firmed_compliance(desc, config, literal_polar)
    return 1.0 / float(np.linalg.norm(compliance.displacement(u)))


@dataclass(frozen=True)
class StiffnessSample:
    """One sampled direction of a stiffness map.

    stiffness is |F|/|delta| (N/mm); compliance is the reciprocal |delta|/|F|
    (mm/N) that stiffness plots usually color by.  displacement is the full
    tip displacement vector under the sampling force.
    """

    direction: np.ndarray
    displacement: np.ndarray
    stiffness: float
    compliance: float


def fibonacci_sphere(samples: int) -> np.ndarray:
    """Near-uniform unit directions, shape (samples, 3)."""
    i = np.arange(samples, dtype=float)
    z = 1.0 - 2.0 * (i + 0.5) / samples
    r = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def stiffness_map(
    desc: RobotDescription,
    config: Configuration,
    sphere_samples: int,
    force_magnitude: float = 50.0,
    literal_polar: bool = False,
) -> list[StiffnessSample]:
    """Directional stiffness sampled over the sphere for plotting/export."""
    if sphere_samples < 6:
        raise PlcError(f"need at least 6 sphere samples, got {sphere_samples}")
    compliance = firmed_compliance(desc, config, literal_polar)
    samples = []
    for direction in fibonacci_sphere(sphere_samples):
        displacement = compliance.displacement(force_magnitude * direction)
        per_newton = float(np.linalg.norm(displacement)) / force_magnitude
        samples.append(
            StiffnessSample(
                direction=direction,
                displacement=displacement,
                stiffness=1.0 / per_newton,
                compliance=per_newton,
            )
        )
    return samples


def loosening_threshold(desc: RobotDescription, tension: float) -> float:
    """External force (N) at which the locking ring starts to open.

    Lever balance about the ring-edge fulcrum: the two tendon anchors sit
    symmetrically on a circle of radius r, so their resisting torque is
    2 r T, while the external force acts lever_arm above the fulcrum:

        F_th = 2 r T / lever_arm
    """
    if tension < 0.0 or not math.isfinite(tension):
        raise PlcError(f"tension must be >= 0, got {tension}")
    return 2.0 * desc.tendon_anchor_radius * tension / desc.lever_arm


@dataclass(frozen=True)
class ForceDeflectionCurve:
    """Piecewise-linear force -> deflection law across the detachment point.

    Below threshold_force the chain deflects at the firmed slope; past it,
    tendon stretch takes over at the (shallower) loose slope.  The curve is
    continuous at the breakpoint by construction.
    """

    threshold_force: float
    firm_slope: float
    loose_slope: float
    breakpoint_deflection: float

    def __post_init__(self):
        if self.threshold_force < 0.0:
            raise InvariantError("threshold force must be >= 0")
        if not self.firm_slope > self.loose_slope > 0.0:
            raise InvariantError(
                "slopes must satisfy firm > loose > 0, got "
                f"firm={self.firm_slope}, loose={self.loose_slope}"
            )
        expected = self.threshold_force / self.firm_slope
        if self.breakpoint_deflection != expected:
            raise InvariantError("breakpoint must equal threshold / firm slope")

    def deflection(self, force):
        """Deflection (mm) at external force(s) (N)."""
        force = np.asarray(force, dtype=float)
        firm = force / self.firm_slope
        loose = self.breakpoint_deflection + (force - self.threshold_force) / self.loose_slope
        result = np.where(force <= self.threshold_force, firm, loose)
        return float(result) if result.ndim == 0 else result


def force_deflection(
    desc: RobotDescription,
    config: Configuration,
    tension: float,
    direction,
    literal_polar: bool = False,
) -> ForceDeflectionCurve:
    """Force-deflection curve along ``direction`` at a given tendon tension.

    Zero tension gives a zero threshold: the curve is tendon-dominated from
    the origin.
    """
    firm = directional_stiffness(desc, config, direction, literal_polar)
    loose = desc.tendon_stiffness
    if not firm > loose:
        raise PlcError(
            f"tendon stiffness {loose} N/mm is not below the firmed slope "
            f"{firm} N/mm along this direction"
        )
    threshold = loosening_threshold(desc, tension)
    return ForceDeflectionCurve(
        threshold_force=threshold,
        firm_slope=firm,
        loose_slope=loose,
        breakpoint_deflection=threshold / firm,
    )


def spine_twist(desc: RobotDescription, torque: float) -> float:
    """Twist angle (rad) of one rigid spine segment under an axial torque.

    Hollow-shaft torsion with uniform section: twist = T l / (J G).
    """
    if not math.isfinite(torque):
        raise PlcError(f"torque must be finite, got {torque}")
    return torque * desc.curve_length / (desc.spine_polar_inertia * desc.shear_modulus)


def bellows_twist(
    torque: float,
    segment_length: float,
    inner_diameter: float,
    outer_diameter: float,
    thickness: float,
    convolutions: int,
    shear_modulus: float,
) -> float:
    """Twist angle (rad) of a zig-zag bellows shell under an axial torque.

    The diameter ramps linearly from root to crest over half a convolution;
    integrating T / (J(l) G) over that half and doubling per convolution gives
    the segment twist.  The result depends only on segment length, diameters,
    and wall thickness, not on the convolution count.
    """
    if convolutions < 1:
        raise PlcError(f"convolutions must be >= 1, got {convolutions}")
    if min(segment_length, inner_diameter, outer_diameter, thickness) <= 0.0:
        raise PlcError("bellows geometry must be positive")
    if inner_diameter > outer_diameter:
        raise PlcError("bellows inner diameter must be <= outer diameter")
    if thickness > inner_diameter / 2.0:
        raise PlcError("bellows wall thickness must not exceed the inner radius")
    if not math.isfinite(torque):
        raise PlcError(f"torque must be finite, got {torque}")

    half = segment_length / (2.0 * convolutions)
    slope = (outer_diameter - inner_diameter) / half

    def reciprocal_polar(l: float) -> float:
        radius = (inner_diameter + slope * l) / 2.0
        polar = 0.5 * math.pi * (radius**4 - (radius - thickness) ** 4)
        return torque / (polar * shear_modulus)

    value, abserr = integrate.quad(reciprocal_polar, 0.0, half, epsabs=1e-14, epsrel=1e-12)
    total = 2.0 * convolutions * value
    achieved = 2.0 * convolutions * abserr
    if achieved > 1e-10 * max(1.0, abs(total)):
        raise PlcError(
            f"bellows twist integration did not converge (achieved {achieved:.3e} rad)"
        )
    return total


def skin_twist(
    desc: RobotDescription, torque: float, convolutions: int | None = None
) -> float:
    """Twist angle (rad) of one unit's bellows skin under an axial torque."""
    return bellows_twist(
        torque,
        desc.curve_length,
        desc.skin_inner_diameter,
        desc.skin_outer_diameter,
        desc.skin_thickness,
        desc.skin_convolutions if convolutions is None else convolutions,
        desc.shear_modulus,
    )
