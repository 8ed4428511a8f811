"""Squeezing-modified recoil heating.

The central object is the overlap xi between the squeezed beam profile and
the angular pattern of a mechanical mode. Everything downstream (diagonal
rates, cross rates, sweeps) is closed-form trigonometry in (r, phi, xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import (
    AngularDistribution,
    DEFAULT_RULE,
    QuadratureRule,
    make_gaussian_beam,
    make_libration_distribution,
    make_motion_distribution,
    overlap,
)
from .errors import ConfigError

OVERLAP_BOUND_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SqueezeParams:
    """Degree and phase of the squeezed input, flat over the mechanical band."""

    r_s: float
    phi_s: float = 0.0

    def __post_init__(self):
        if self.r_s < 0:
            raise ConfigError("squeezing degree r_s must be non-negative")
        object.__setattr__(self, "phi_s", float(self.phi_s) % (2.0 * np.pi))

    @property
    def s0(self):
        return math.sinh(self.r_s)

    @property
    def c0(self):
        return math.cosh(self.r_s)


@dataclass(frozen=True)
class OverlapResult:
    """Complex overlap between beam and mode pattern."""

    xi: complex

    def __post_init__(self):
        if abs(self.xi) > 1.0 + OVERLAP_BOUND_TOLERANCE:
            raise ConfigError(f"overlap modulus {abs(self.xi):.6g} exceeds 1")

    @property
    def modulus(self):
        return abs(self.xi)

    @property
    def phase(self):
        return float(np.angle(self.xi))


def db_to_r(db: float) -> float:
    """Convert a squeezing level in dB to the dimensionless degree r."""
    if db < 0:
        raise ConfigError("squeezing level in dB must be non-negative")
    return db * math.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    return 20.0 * r / math.log(10.0)


def mode_overlap(beam: AngularDistribution, mode: AngularDistribution) -> OverlapResult:
    """Overlap of the (normalized) beam with a mode pattern, no conjugation."""
    xi = overlap(beam, mode)
    # quadrature noise can push |xi| epsilon past 1; clamp within tolerance
    m = abs(xi)
    if 1.0 < m <= 1.0 + OVERLAP_BOUND_TOLERANCE:
        xi = xi / m
    return OverlapResult(xi=complex(xi))


def relative_phase(xi: OverlapResult, sq: SqueezeParams, absolute_phase=True) -> float:
    """The physically meaningful phase Phi = phi_s - 2 arg(xi).

    With absolute_phase=False, sq.phi_s is already the offset Phi.
    """
    if absolute_phase:
        return (sq.phi_s - 2.0 * xi.phase) % (2.0 * np.pi)
    return sq.phi_s % (2.0 * np.pi)


def recoil_ratio(xi: OverlapResult, sq: SqueezeParams, absolute_phase=True) -> float:
    """Heating-rate ratio Gamma/Gamma0 of one mechanical mode.

    1 - |xi|^2 [1 - e^{2r} sin^2(Phi/2) - e^{-2r} cos^2(Phi/2)]
    """
    phi = relative_phase(xi, sq, absolute_phase)
    m2 = xi.modulus**2
    sin2 = math.sin(phi / 2.0) ** 2
    cos2 = math.cos(phi / 2.0) ** 2
    return 1.0 - m2 * (1.0 - math.exp(2.0 * sq.r_s) * sin2 - math.exp(-2.0 * sq.r_s) * cos2)


def cross_rate(
    xi_a: OverlapResult,
    xi_b: OverlapResult,
    g0_a: float,
    g0_b: float,
    sq: SqueezeParams,
    diagonal: bool = False,
) -> float:
    """Squeezing-mediated rate coupling two mechanical modes, rad/s.

    Gamma_ab = Gamma0 delta_ab
             + 2 sqrt(Gamma0_a Gamma0_b) |xi_a xi_b|
               [s0^2 - s0 c0 cos(phi_s - psi_a - psi_b)]
    """
    if g0_a < 0 or g0_b < 0:
        raise ConfigError("bare recoil rates must be non-negative")
    s0, c0 = sq.s0, sq.c0
    phase = sq.phi_s - xi_a.phase - xi_b.phase
    value = (
        2.0
        * math.sqrt(g0_a * g0_b)
        * xi_a.modulus
        * xi_b.modulus
        * (s0**2 - s0 * c0 * math.cos(phase))
    )
    if diagonal:
        value += g0_a
    return value


def _beam_for(params: dict, rule: QuadratureRule) -> AngularDistribution:
    return make_gaussian_beam(
        na=params["na"],
        propagation_axis=np.asarray(params.get("axis", [0.0, 0.0, -1.0]), dtype=float),
        polarization_angle=params.get("polarization_angle", 0.0),
        rule=rule,
    )


def recoil_sweep(
    beams: dict[str, dict] | None,
    axis: str,
    r_values,
    phi: float = 0.0,
    kind: str = "motion",
    include_perfect: bool = True,
    rule: QuadratureRule = DEFAULT_RULE,
    absolute_phase: bool = False,
):
    """Recoil ratio versus squeezing degree for one or more beams.

    beams maps column label -> beam parameter dict (na, axis,
    polarization_angle). phi is the phase offset Phi = phi_s - 2 psi by
    default (absolute_phase=False). Returns (header, rows, overlaps).
    """
    if kind == "motion":
        mode = make_motion_distribution(axis, rule=rule)
    elif kind == "libration":
        mode = make_libration_distribution(axis, rule=rule)
    else:
        raise ConfigError(f"mode kind must be motion or libration, got {kind!r}")

    columns = []
    overlaps = {}
    if include_perfect:
        columns.append(("ratio_perfect", OverlapResult(xi=1.0 + 0.0j)))
        overlaps["ratio_perfect"] = 1.0 + 0.0j
    for label, params in (beams or {}).items():
        res = mode_overlap(_beam_for(params, rule), mode)
        columns.append((f"ratio_{label}", res))
        overlaps[f"ratio_{label}"] = res.xi

    header = ["r_s"] + [name for name, _ in columns]
    rows = []
    for r in np.atleast_1d(np.asarray(r_values, dtype=float)):
        sq = SqueezeParams(r_s=float(r), phi_s=phi)
        row = [float(r)]
        for _, res in columns:
            row.append(recoil_ratio(res, sq, absolute_phase=absolute_phase))
        rows.append(row)
    return header, rows, overlaps


def phase_sweep(
    xi: OverlapResult,
    r_s: float,
    phi_values,
    absolute_phase: bool = False,
):
    """Recoil ratio versus squeezing phase at fixed degree."""
    rows = []
    for phi in np.atleast_1d(np.asarray(phi_values, dtype=float)):
        sq = SqueezeParams(r_s=r_s, phi_s=float(phi))
        rows.append([float(phi), recoil_ratio(xi, sq, absolute_phase=absolute_phase)])
    return ["phi", "ratio"], rows


def libration_recoil_sweep(beams, axis, r_values, phi=0.0, **kwargs):
    """recoil_sweep for the libration modes (axis y or z)."""
    if axis not in ("y", "z"):
        raise ConfigError("libration axis must be y or z")
    return recoil_sweep(beams, axis, r_values, phi=phi, kind="libration", **kwargs)


def reheating_trajectory(bare_recoil: float, ratio: float, n0: float, times):
    """Linear phonon-growth estimate <n>(t) = n0 + ratio*Gamma0*t.

    Valid in the zero-damping, zero-thermal-bath limit where recoil
    diffusion is the only heating channel.
    """
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise ConfigError("trajectory times must be non-negative")
    return n0 + ratio * bare_recoil * t
