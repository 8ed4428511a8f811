"""Detection noise: input/back-action/correlation spectra, minimum
detectable displacement signal relative to the standard quantum limit, and
Gaussian Wigner-function data for the input light.

Convention: every spectral density in this module is stored pre-multiplied
by 2 pi, so the vacuum level is exactly 1 and dimensionless formulas carry
no stray 2 pi factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalFailure
from .squeeze import OverlapResult, SqueezeParams, recoil_ratio

UNCERTAINTY_SLACK = 1e-10

# "omega << Omega" idealization: |Re chi/chi| differs from 1 by < 1e-6 here
LOW_FREQ_OMEGA_RATIO = 1e-3
LOW_FREQ_DAMPING_RATIO = 1e-6


@dataclass(frozen=True)
class InputSpectra:
    """Quadrature spectra of the interacting input mode (times 2 pi)."""

    sxx: float
    syy: float
    scross: float

    def __post_init__(self):
        det = self.sxx * self.syy - self.scross**2
        if det < 1.0 - UNCERTAINTY_SLACK:
            raise NumericalFailure(
                f"input spectra violate the uncertainty bound (det = {det:.12g})"
            )

    @property
    def uncertainty_determinant(self):
        return self.sxx * self.syy - self.scross**2


@dataclass(frozen=True)
class Susceptibility:
    """Mechanical response at one frequency.

    chi_tilde = Omega^2 / (Omega^2 - omega^2 - i gamma omega); the
    dimensionful 2 m Omega chi equals 2 chi_tilde / Omega.
    """

    omega: float  # rad/s, may be negative (two-sided spectra)
    mode_frequency: float  # rad/s
    damping: float  # rad/s

    def __post_init__(self):
        if self.mode_frequency <= 0:
            raise ConfigError("mode frequency must be positive")
        if self.damping < 0:
            raise ConfigError("damping must be non-negative")

    @property
    def chi_tilde(self) -> complex:
        om2 = self.mode_frequency**2
        denom = om2 - self.omega**2 - 1j * self.damping * self.omega
        if denom == 0:
            raise NumericalFailure(
                "mechanical susceptibility pole: omega = mode frequency with zero damping"
            )
        return om2 / denom

    @property
    def cos_response(self):
        """Re(chi_tilde)/|chi_tilde|, the correlation-term weight."""
        c = self.chi_tilde
        return c.real / abs(c)


def low_frequency_susceptibility(mode_frequency: float) -> Susceptibility:
    """The omega << Omega idealization used for sensitivity floors."""
    return Susceptibility(
        omega=LOW_FREQ_OMEGA_RATIO * mode_frequency,
        mode_frequency=mode_frequency,
        damping=LOW_FREQ_DAMPING_RATIO * mode_frequency,
    )


def input_spectra(xi: OverlapResult, sq: SqueezeParams, absolute_phase=True) -> InputSpectra:
    """Quadrature spectra of the interacting input mode.

    sxx equals the recoil heating ratio Gamma/Gamma0 identically.
    """
    phi = (sq.phi_s - 2.0 * xi.phase) if absolute_phase else sq.phi_s
    m2 = xi.modulus**2
    s0, c0 = sq.s0, sq.c0
    return InputSpectra(
        sxx=1.0 + 2.0 * m2 * s0 * (s0 - c0 * math.cos(phi)),
        syy=1.0 + 2.0 * m2 * s0 * (s0 + c0 * math.cos(phi)),
        scross=-2.0 * m2 * s0 * c0 * math.sin(phi),
    )


def s_min(spectra: InputSpectra, chi: Susceptibility, u: float) -> float:
    """Minimum detectable signal over the SQL at measurement strength u.

    u = 4 Gamma0 / Omega balances imprecision (syy term) against
    back-action (sxx term); the cross term rewards amplitude-phase
    correlations of the input light.
    """
    if u <= 0:
        raise ConfigError("measurement strength u must be positive")
    mod = abs(chi.chi_tilde)
    return 0.5 * (
        u * mod * spectra.sxx
        + spectra.syy / (u * mod)
        - 2.0 * chi.cos_response * spectra.scross
    )


def s_min_opt_u(spectra: InputSpectra, chi: Susceptibility):
    """Closed-form optimum of s_min over u: returns (u_opt, value)."""
    if spectra.sxx <= 0:
        raise NumericalFailure("sxx must be positive to optimize the trade-off")
    mod = abs(chi.chi_tilde)
    u_opt = math.sqrt(spectra.syy / spectra.sxx) / mod
    value = math.sqrt(spectra.sxx * spectra.syy) - chi.cos_response * spectra.scross
    return u_opt, value


def s_min_opt_u_phase(xi_modulus: float, r_s: float, chi: Susceptibility):
    """Optimum of s_min over both u and the squeezing phase.

    Returns (phi_opt, value) where phi_opt is the offset phi_s - 2 arg(xi):
    3 pi/2 when Re chi_tilde > 0 (below resonance), pi/2 above.
    """
    if not 0.0 <= xi_modulus <= 1.0 + 1e-10:
        raise ConfigError("overlap modulus must lie in [0, 1]")
    cosr = chi.cos_response
    phi_opt = 1.5 * np.pi if cosr >= 0 else 0.5 * np.pi
    m2 = xi_modulus**2
    value = 1.0 - m2
    for eta in (+1.0, -1.0):
        value += m2 * 0.5 * math.exp(2.0 * eta * r_s) * (1.0 - eta * abs(cosr))
    return phi_opt, value


def backaction_psd(zero_point: float, bare_recoil: float, spectra: InputSpectra, chi: Susceptibility) -> float:
    """Back-action displacement spectrum (times 2 pi), m^2 s/rad.

    r0^2 Gamma0 sxx |2 chi_tilde / Omega|^2: motional disturbance driven by
    the amplitude quadrature of the input.
    """
    if chi.damping == 0:
        raise NumericalFailure("back-action spectrum requires damping > 0")
    response = 2.0 * chi.chi_tilde / chi.mode_frequency
    return zero_point**2 * bare_recoil * spectra.sxx * abs(response) ** 2


def correlation_psd(zero_point: float, bare_recoil: float, spectra: InputSpectra, chi: Susceptibility) -> float:
    """Amplitude-phase correlation spectrum (times 2 pi).

    Proportional to Re(chi) and to the cross input spectrum; vanishes at
    resonance and for phase offsets 0 or pi.
    """
    if chi.damping == 0:
        raise NumericalFailure("correlation spectrum requires damping > 0")
    response = 2.0 * chi.chi_tilde / chi.mode_frequency
    return zero_point * math.sqrt(bare_recoil) * response.real * spectra.scross


def sensitivity_curve(spectra: InputSpectra, chi: Susceptibility, u_values):
    """s_min over a grid of measurement strengths; rows (u, value)."""
    return [[float(u), s_min(spectra, chi, float(u))] for u in np.atleast_1d(u_values)]


def sensitivity_heatmap(e2r_values, xi2_values, chi: Susceptibility):
    """Optimal-phase sensitivity over (e^{2r}, |xi|^2); rows tabulated flat."""
    rows = []
    for e2r in np.atleast_1d(e2r_values):
        if e2r < 1.0:
            raise ConfigError("e^(2r) must be >= 1")
        r_s = 0.5 * math.log(float(e2r))
        for x2 in np.atleast_1d(xi2_values):
            _, value = s_min_opt_u_phase(math.sqrt(float(x2)), r_s, chi)
            rows.append([float(e2r), float(x2), value])
    return ["e2r", "xi_squared", "s_min_over_sql"], rows


def bare_mode_covariance(r: float, phi: float) -> np.ndarray:
    """Covariance of the bare squeezed mode (vacuum = identity, det = 1)."""
    ch, sh = math.cosh(2.0 * r), math.sinh(2.0 * r)
    qq = ch + sh * math.cos(phi)
    pp = ch - sh * math.cos(phi)
    qp = -sh * math.sin(phi)
    return np.array([[qq, qp], [qp, pp]])


def interacting_input_covariance(spectra: InputSpectra) -> np.ndarray:
    """Covariance of the interacting input mode from its spectra."""
    return np.array(
        [[spectra.sxx, -spectra.scross], [-spectra.scross, spectra.syy]]
    )


def wigner_covariance(source: str, *, spectra: InputSpectra = None, r: float = None, phi: float = None) -> np.ndarray:
    """Covariance matrix for the requested Gaussian state.

    source "interacting-input" uses the spectra; "bare-squeezed-mode" uses
    (r, phi). Raises on a non-positive-definite result, which would signal
    a convention bug rather than a physical regime.
    """
    if source == "interacting-input":
        if spectra is None:
            raise ConfigError("interacting-input covariance requires spectra")
        cov = interacting_input_covariance(spectra)
    elif source == "bare-squeezed-mode":
        if r is None or phi is None:
            raise ConfigError("bare-mode covariance requires r and phi")
        cov = bare_mode_covariance(r, phi)
    else:
        raise ConfigError(f"unknown Wigner source {source!r}")
    if np.linalg.det(cov) <= 0 or cov[0, 0] <= 0:
        raise NumericalFailure("covariance matrix is not positive definite")
    return cov


def wigner_grid(cov: np.ndarray, n: int = 201, half_width_sigmas: float = 8.0):
    """Gaussian Wigner function on a square grid around the origin.

    Returns (x, y, w) with w of shape (n, n); integrates to 1 for a window
    wide enough to contain the state.
    """
    if n < 2:
        raise ConfigError("Wigner grid needs at least 2 points per axis")
    sigma = math.sqrt(max(cov[0, 0], cov[1, 1]))
    half = half_width_sigmas * sigma
    x = np.linspace(-half, half, n)
    y = np.linspace(-half, half, n)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    inv = np.linalg.inv(cov)
    quad = inv[0, 0] * xx**2 + 2.0 * inv[0, 1] * xx * yy + inv[1, 1] * yy**2
    w = np.exp(-0.5 * quad) / (2.0 * np.pi * math.sqrt(np.linalg.det(cov)))
    return x, y, w
