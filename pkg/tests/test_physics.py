import numpy as np
import pytest

from levsqueeze import angular, physics
from levsqueeze.constants import C, HBAR
from levsqueeze.errors import ConfigError


def test_particle_validation():
    with pytest.raises(ConfigError):
        physics.Particle(radius=-1e-9, density=2200.0, permittivity=2.1)
    with pytest.raises(ConfigError):
        physics.Particle(radius=70e-9, density=2200.0, permittivity=0.9)


def test_alpha0_linearity(laser):
    doubled = physics.Laser(
        power=2 * laser.power, waist=laser.waist, wavelength=laser.wavelength
    )
    assert physics.alpha0_squared(doubled) == pytest.approx(
        2.0 * physics.alpha0_squared(laser), rel=1e-14
    )


def test_alpha0_phase(laser):
    a = physics.derive_alpha0(laser, arg=0.7)
    assert abs(a) ** 2 == pytest.approx(physics.alpha0_squared(laser), rel=1e-12)
    assert np.angle(a) == pytest.approx(0.7, abs=1e-14)


def test_paraxial_warning():
    with pytest.warns(UserWarning):
        physics.Laser(power=0.5, waist=0.4e-6, wavelength=1.064e-6)


def test_frequency_ratio(particle, laser):
    freqs = physics.motion_frequencies(particle, laser)
    assert freqs["x"] == freqs["y"]
    expected = np.sqrt(2.0) * np.pi * laser.waist / laser.wavelength
    assert freqs["x"] / freqs["z"] == pytest.approx(expected, rel=1e-14)


def test_frequency_order_of_magnitude(particle, laser):
    # focused optical traps sit in the 10^2 - 10^3 kHz band
    freqs = physics.motion_frequencies(particle, laser)
    assert 1e5 < freqs["x"] / (2 * np.pi) < 1e7


def test_recoil_rate_ratios(particle, laser):
    modes = physics.derive_motion_modes(particle, laser)
    gx, gy, gz = (modes[a].bare_recoil for a in "xyz")
    # x and y share a frequency, so their rates differ only by geometry
    assert gy / gx == pytest.approx(2.0, rel=1e-12)
    rz, rx = modes["z"].zero_point, modes["x"].zero_point
    assert gz / gx == pytest.approx(7.0 * rz**2 / rx**2, rel=1e-12)
    assert all(g > 0 for g in (gx, gy, gz))


def test_zero_point_invariant(particle, laser):
    modes = physics.derive_motion_modes(particle, laser)
    for mode in modes.values():
        product = mode.zero_point**2 * 2.0 * particle.mass * mode.frequency
        assert product == pytest.approx(HBAR, rel=1e-12)


def test_damping_default(particle, laser):
    modes = physics.derive_motion_modes(particle, laser)
    for mode in modes.values():
        assert mode.damping == pytest.approx(1e-6 * mode.frequency, rel=1e-14)


def test_libration_modes_identical(rotor, laser):
    modes = physics.derive_libration_modes(rotor, laser)
    assert modes["y"].frequency == modes["z"].frequency
    assert modes["y"].bare_recoil == modes["z"].bare_recoil
    assert modes["y"].bare_recoil > 0
    product = modes["y"].zero_point**2 * 2.0 * rotor.moment_of_inertia * modes["y"].frequency
    assert product == pytest.approx(HBAR, rel=1e-12)


def test_libration_scaling(rotor, laser):
    brighter = physics.Laser(
        power=2 * laser.power, waist=laser.waist, wavelength=laser.wavelength
    )
    w1 = physics.libration_frequency(rotor, laser)
    w2 = physics.libration_frequency(rotor, brighter)
    assert w2 / w1 == pytest.approx(np.sqrt(2.0), rel=1e-12)


def test_isotropic_rotor_rejected(laser):
    with pytest.raises(ConfigError):
        physics.Rotor(
            alpha_parallel=4.0e-33,
            alpha_perp=4.0e-33,
            moment_of_inertia=1e-31,
            permittivity=2.1,
            volume=2e-21,
        )


def test_rate_scaling_with_power(particle, laser):
    # Omega ~ sqrt(P), r0^2 ~ 1/Omega, Gamma0 ~ |alpha0|^2 r0^2 ~ P/sqrt(P)
    brighter = physics.Laser(
        power=4 * laser.power, waist=laser.waist, wavelength=laser.wavelength
    )
    g1 = physics.derive_motion_modes(particle, laser)["z"].bare_recoil
    g2 = physics.derive_motion_modes(particle, brighter)["z"].bare_recoil
    assert g2 / g1 == pytest.approx(2.0, rel=1e-10)


def test_coupling_normalization_consistency(particle, laser):
    # the bare rate prefactor and the unit-normalized pattern are mutually
    # consistent: scaling the pattern by the physical coupling amplitude
    # reproduces that amplitude's squared norm under quadrature
    mode = physics.derive_motion_modes(particle, laser)["z"]
    scale = C**3 * mode.bare_recoil / (2.0 * np.pi * laser.omega0**2)
    dist = angular.make_motion_distribution("z")
    norm = angular.integrate_sphere(
        lambda t, p: scale * np.abs(dist.amplitude(t, p)) ** 2
    )
    assert norm.real == pytest.approx(scale, rel=1e-8)


def test_derived_report_round_trip(particle, rotor, laser):
    import json

    report = physics.derived_report(laser, particle=particle, rotor=rotor)
    blob = json.dumps(report)
    back = json.loads(blob)
    assert back["motion_modes"]["z"]["geometry_factor"] == pytest.approx(1.4)
    assert back["libration_modes"]["y"]["frequency_rad_s"] > 0
    assert back["alpha0_squared"] == pytest.approx(physics.alpha0_squared(laser))
