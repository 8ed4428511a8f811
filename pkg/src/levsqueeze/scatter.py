"""Scattering amplitudes, differential cross sections and information
radiation patterns (IRPs) for a mechanical mode illuminated by squeezed
light.

Amplitudes are first-order in the mechanical zero-point motion. By default
the cross section is reported as a dimensionless shape factor, in units of
(2 pi)^3 |alpha0|^2 Gamma0 / c; pass si=True for absolute values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .angular import AngularDistribution, DEFAULT_RULE, QuadratureRule, integrate_sphere
from .constants import C
from .errors import ConfigError, NumericalFailure
from .squeeze import OverlapResult, SqueezeParams, mode_overlap, recoil_ratio

TWO_PI_CUBED = (2.0 * np.pi) ** 3


@dataclass
class ScatterConfig:
    """Mode pattern + squeezed beam + squeezing parameters.

    phi convention: sq.phi_s is the absolute squeezing phase when
    absolute_phase is True, otherwise the offset phi_s - 2 arg(xi).
    """

    mode: AngularDistribution
    beam: AngularDistribution
    sq: SqueezeParams
    alpha0: complex = 1.0 + 0.0j
    bare_recoil: float = 1.0
    absolute_phase: bool = True
    rule: QuadratureRule = DEFAULT_RULE
    xi: OverlapResult = field(init=False)

    def __post_init__(self):
        if self.bare_recoil < 0:
            raise ConfigError("bare recoil rate must be non-negative")
        if not self.beam.is_normalized:
            raise ConfigError("beam distribution must be square-normalized")
        self.xi = mode_overlap(self.beam, self.mode)

    @property
    def relative_phase(self):
        if self.absolute_phase:
            return (self.sq.phi_s - 2.0 * self.xi.phase) % (2.0 * np.pi)
        return self.sq.phi_s

    @property
    def g(self):
        """Squeezing coefficient xi * s0 * (s0 - c0 e^{i Phi})."""
        s0, c0 = self.sq.s0, self.sq.c0
        return self.xi.xi * s0 * (s0 - c0 * cmath.exp(1j * self.relative_phase))

    @property
    def ratio(self):
        """Gamma/Gamma0 for this configuration."""
        return recoil_ratio(self.xi, self.sq, absolute_phase=self.absolute_phase)

    def si_prefactor(self):
        """(2 pi)^3 |alpha0|^2 Gamma0 / c, the cross-section unit."""
        return TWO_PI_CUBED * abs(self.alpha0) ** 2 * self.bare_recoil / C


def scattering_amplitudes(cfg: ScatterConfig, theta, phi, si=False):
    """Per-polarization amplitudes (f_plus, f_minus), each of shape (2, n).

    f_plus annihilates a photon into direction (theta, phi) while creating
    a phonon; f_minus annihilates both (it exists only with squeezing and
    only on the beam support).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    a_mode = cfg.mode.amplitude(theta, phi)
    a_beam = cfg.beam.amplitude(theta, phi)
    g = cfg.g
    phase = cmath.exp(1j * cmath.phase(cfg.alpha0))
    scale = math.sqrt(cfg.si_prefactor()) if si else 1.0
    f_plus = -np.conj(phase) * scale * (a_mode + np.conj(a_beam) * g)
    f_minus = -phase * scale * np.conj(a_beam) * np.conj(g)
    return f_plus, f_minus


def differential_cross_section(cfg: ScatterConfig, theta, phi, si=False):
    """Polarization-summed d sigma / d Omega at the given directions.

    Pointwise values may be negative for strong squeezing; only the
    integral is guaranteed positive. Values are reported unclipped.
    """
    f_plus, f_minus = scattering_amplitudes(cfg, theta, phi, si=si)
    return np.sum(np.abs(f_plus) ** 2 - np.abs(f_minus) ** 2, axis=0).real


def integrated_cross_section(cfg: ScatterConfig, si=False):
    """Quadrature integral of d sigma / d Omega over the full sphere."""

    def integrand(theta, phi):
        f_plus, f_minus = scattering_amplitudes(cfg, theta, phi, si=si)
        return np.abs(f_plus) ** 2 - np.abs(f_minus) ** 2

    axis = cfg.beam.support_axis
    return float(integrate_sphere(integrand, cfg.rule, axis=axis).real)


@dataclass
class IRPGrid:
    """Equiangular grid of cross-section and IRP values."""

    theta: np.ndarray  # (n_theta,)
    phi: np.ndarray  # (n_phi,)
    dsigma: np.ndarray  # (n_theta, n_phi)
    irp: np.ndarray  # (n_theta, n_phi), integrates to 1
    f_plus_sq: np.ndarray
    f_minus_sq: np.ndarray
    normalization: float  # integral of dsigma over the sphere
    metadata: dict


def irp_grid(cfg: ScatterConfig, n_theta=181, n_phi=360, si=False) -> IRPGrid:
    """Tabulate d sigma / d Omega and the normalized IRP.

    The normalization integral is evaluated with the configured quadrature
    rule (not the export grid), so the IRP normalization is accurate at any
    export resolution.
    """
    if n_theta < 2 or n_phi < 2:
        raise ConfigError("IRP grid must be at least 2x2")
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    f_plus, f_minus = scattering_amplitudes(cfg, tt.ravel(), pp.ravel(), si=si)
    fp2 = np.sum(np.abs(f_plus) ** 2, axis=0).reshape(n_theta, n_phi)
    fm2 = np.sum(np.abs(f_minus) ** 2, axis=0).reshape(n_theta, n_phi)
    dsigma = fp2 - fm2

    total = integrated_cross_section(cfg, si=si)
    if total <= 0:
        raise NumericalFailure(
            f"total scattered power is non-positive ({total:.6g}); "
            "unphysical parameter combination"
        )
    metadata = {
        "xi_modulus": cfg.xi.modulus,
        "xi_phase": cfg.xi.phase,
        "r_s": cfg.sq.r_s,
        "phi_s": cfg.sq.phi_s,
        "relative_phase": cfg.relative_phase,
        "ratio": cfg.ratio,
        "si_units": bool(si),
        "min_dsigma": float(dsigma.min()),
        "max_dsigma": float(dsigma.max()),
        "has_negative_values": bool(dsigma.min() < 0),
    }
    return IRPGrid(
        theta=theta,
        phi=phi,
        dsigma=dsigma,
        irp=dsigma / total,
        f_plus_sq=fp2,
        f_minus_sq=fm2,
        normalization=total,
        metadata=metadata,
    )
