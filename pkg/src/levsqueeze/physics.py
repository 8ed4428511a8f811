"""Derived trap quantities: displaced-mode amplitude, mechanical and
libration frequencies, zero-point amplitudes, and bare recoil rates.

All quantities in SI units; angular frequencies in rad/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C, EPS0, HBAR
from .errors import ConfigError

DEFAULT_DAMPING_RATIO = 1e-6  # gamma_mu / Omega_mu unless specified

# Geometry factors of the motional recoil rates, (1, 2, 7)/5 per axis.
GEOMETRY_FACTORS = {"x": 1.0 / 5.0, "y": 2.0 / 5.0, "z": 7.0 / 5.0}

# Convenience material preset (not a literature value).
SILICA = {"density": 2200.0, "permittivity": 2.1}


@dataclass(frozen=True)
class Particle:
    """Homogeneous dielectric sphere."""

    radius: float  # m
    density: float  # kg/m^3
    permittivity: float  # relative

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("particle radius must be positive")
        if self.density <= 0:
            raise ConfigError("particle density must be positive")
        if self.permittivity <= 1:
            raise ConfigError("relative permittivity must exceed 1")

    @property
    def volume(self):
        return 4.0 * np.pi * self.radius**3 / 3.0

    @property
    def mass(self):
        return self.density * self.volume

    @property
    def polarizability(self):
        """Clausius-Mossotti point-dipole polarizability, F m^2."""
        eps = self.permittivity
        return 3.0 * EPS0 * self.volume * (eps - 1.0) / (eps + 2.0)


@dataclass(frozen=True)
class Rotor:
    """Anisotropic sub-wavelength rotor (cylindrically symmetric)."""

    alpha_parallel: float  # F m^2, long-axis polarizability
    alpha_perp: float  # F m^2, transverse polarizability
    moment_of_inertia: float  # kg m^2
    permittivity: float
    volume: float  # m^3

    def __post_init__(self):
        if not (self.alpha_parallel > self.alpha_perp > 0):
            raise ConfigError("rotor requires alpha_parallel > alpha_perp > 0")
        if self.moment_of_inertia <= 0:
            raise ConfigError("moment of inertia must be positive")
        if self.volume <= 0:
            raise ConfigError("rotor volume must be positive")

    @property
    def delta_alpha(self):
        return self.alpha_parallel - self.alpha_perp


@dataclass(frozen=True)
class Laser:
    """Trapping laser: power, focal waist, vacuum wavelength."""

    power: float  # W
    waist: float  # m
    wavelength: float  # m

    def __post_init__(self):
        if min(self.power, self.waist, self.wavelength) <= 0:
            raise ConfigError("laser power, waist and wavelength must be positive")
        if self.waist < self.wavelength / 2.0:
            warnings.warn(
                "waist below wavelength/2: paraxial trap-frequency formulas "
                "are unreliable here",
                stacklevel=2,
            )

    @property
    def omega0(self):
        return 2.0 * np.pi * C / self.wavelength

    @property
    def k0(self):
        return self.omega0 / C


@dataclass(frozen=True)
class MechanicalMode:
    """One mechanical degree of freedom and its derived rates."""

    axis: str
    kind: str  # "motion" or "libration"
    frequency: float  # rad/s
    zero_point: float  # m (motion) or rad (libration)
    damping: float  # rad/s
    bare_recoil: float  # rad/s
    geometry_factor: float | None = None  # motion only

    def __post_init__(self):
        if self.frequency <= 0:
            raise ConfigError("mode frequency must be positive")
        if self.damping < 0:
            raise ConfigError("mode damping must be non-negative")


def alpha0_squared(laser: Laser) -> float:
    """Squared displaced-mode amplitude of the trapping laser,
    16 pi^2 P / (hbar c^2 k0 W^2)."""
    return 16.0 * np.pi**2 * laser.power / (HBAR * C**2 * laser.k0 * laser.waist**2)


def derive_alpha0(laser: Laser, arg=0.0) -> complex:
    """Displaced-mode amplitude alpha0 with the configured phase."""
    return np.sqrt(alpha0_squared(laser)) * np.exp(1j * arg)


def motion_frequencies(particle: Particle, laser: Laser):
    """Mechanical frequencies (rad/s) of the three motional modes."""
    eps = particle.permittivity
    omega_xy = np.sqrt(
        (eps - 1.0)
        / (eps + 2.0)
        * 12.0
        * laser.power
        / (np.pi * C * particle.density * laser.waist**4)
    )
    omega_z = omega_xy * laser.wavelength / (np.sqrt(2.0) * np.pi * laser.waist)
    return {"x": omega_xy, "y": omega_xy, "z": omega_z}


def motion_recoil_bare(particle: Particle, laser: Laser, axis: str, zero_point: float):
    """Bare recoil heating rate of one motional mode (rad/s)."""
    if axis not in GEOMETRY_FACTORS:
        raise ConfigError(f"motion axis must be x, y or z, got {axis!r}")
    a2 = alpha0_squared(laser)
    alpha = particle.polarizability
    return (
        (2.0 * np.pi / C)
        * a2
        * (alpha / (2.0 * EPS0 * (2.0 * np.pi) ** 3)) ** 2
        * laser.omega0**2
        * zero_point**2
        * (8.0 * np.pi * laser.k0**4 / 3.0)
        * GEOMETRY_FACTORS[axis]
    )


def derive_motion_modes(particle: Particle, laser: Laser, damping_ratio=DEFAULT_DAMPING_RATIO):
    """The three motional MechanicalModes for a trapped sphere."""
    freqs = motion_frequencies(particle, laser)
    modes = {}
    for axis, omega in freqs.items():
        r0 = np.sqrt(HBAR / (2.0 * particle.mass * omega))
        modes[axis] = MechanicalMode(
            axis=axis,
            kind="motion",
            frequency=omega,
            zero_point=r0,
            damping=damping_ratio * omega,
            bare_recoil=motion_recoil_bare(particle, laser, axis, r0),
            geometry_factor=GEOMETRY_FACTORS[axis],
        )
    return modes


def libration_frequency(rotor: Rotor, laser: Laser):
    """Libration frequency (rad/s), equal for the y and z modes."""
    if rotor.delta_alpha <= 0:
        raise ConfigError("libration requires alpha_parallel > alpha_perp")
    a2 = alpha0_squared(laser)
    return np.sqrt(
        rotor.delta_alpha
        / rotor.moment_of_inertia
        * HBAR
        * laser.omega0
        * a2
        / (EPS0 * (2.0 * np.pi) ** 3)
    )


def libration_recoil_bare(rotor: Rotor, laser: Laser, zero_point: float):
    """Bare recoil heating rate of a libration mode (rad/s)."""
    a2 = alpha0_squared(laser)
    return (
        rotor.volume
        / (4.0 * np.pi**2 * C)
        * a2
        * (rotor.delta_alpha / (2.0 * EPS0 * (2.0 * np.pi) ** 3)) ** 2
        * (8.0 * np.pi * laser.k0**2 / 3.0)
        * zero_point**2
        * laser.omega0**2
    )


def derive_libration_modes(rotor: Rotor, laser: Laser, damping_ratio=DEFAULT_DAMPING_RATIO):
    """The y and z libration MechanicalModes (identical by symmetry)."""
    omega = libration_frequency(rotor, laser)
    r0 = np.sqrt(HBAR / (2.0 * rotor.moment_of_inertia * omega))
    gamma0 = libration_recoil_bare(rotor, laser, r0)
    return {
        axis: MechanicalMode(
            axis=axis,
            kind="libration",
            frequency=omega,
            zero_point=r0,
            damping=damping_ratio * omega,
            bare_recoil=gamma0,
        )
        for axis in ("y", "z")
    }


def derived_report(laser: Laser, particle: Particle = None, rotor: Rotor = None):
    """JSON-ready dictionary echoing every derived intermediate quantity."""
    report = {
        "laser": {
            "power_W": laser.power,
            "waist_m": laser.waist,
            "wavelength_m": laser.wavelength,
            "omega0_rad_s": laser.omega0,
            "k0_1_m": laser.k0,
        },
        "alpha0_squared": alpha0_squared(laser),
    }
    if particle is not None:
        modes = derive_motion_modes(particle, laser)
        report["particle"] = {
            "radius_m": particle.radius,
            "density_kg_m3": particle.density,
            "permittivity": particle.permittivity,
            "volume_m3": particle.volume,
            "mass_kg": particle.mass,
            "polarizability_F_m2": particle.polarizability,
        }
        report["motion_modes"] = {
            axis: {
                "frequency_rad_s": m.frequency,
                "zero_point_m": m.zero_point,
                "damping_rad_s": m.damping,
                "bare_recoil_rad_s": m.bare_recoil,
                "geometry_factor": m.geometry_factor,
            }
            for axis, m in modes.items()
        }
    if rotor is not None:
        modes = derive_libration_modes(rotor, laser)
        report["rotor"] = {
            "alpha_parallel_F_m2": rotor.alpha_parallel,
            "alpha_perp_F_m2": rotor.alpha_perp,
            "delta_alpha_F_m2": rotor.delta_alpha,
            "moment_of_inertia_kg_m2": rotor.moment_of_inertia,
            "volume_m3": rotor.volume,
        }
        report["libration_modes"] = {
            axis: {
                "frequency_rad_s": m.frequency,
                "zero_point_rad": m.zero_point,
                "damping_rad_s": m.damping,
                "bare_recoil_rad_s": m.bare_recoil,
            }
            for axis, m in modes.items()
        }
    return report
