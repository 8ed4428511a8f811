import numpy as np
import pytest

from levsqueeze import angular
from levsqueeze.errors import ConfigError, NumericalFailure


def test_quadrature_weights_sum_to_sphere():
    for axis in (None, [0, 0, -1], [1, 1, 1]):
        _, _, w = angular.DEFAULT_RULE.nodes(axis=axis)
        assert w.sum() == pytest.approx(4.0 * np.pi, rel=1e-13)
        assert (w > 0).all()


def test_quadrature_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        angular.QuadratureRule(n_theta=31)
    with pytest.raises(ConfigError):
        angular.QuadratureRule(n_phi=1)


def test_integrate_constant():
    value = angular.integrate_sphere(
        lambda t, p: np.stack([np.ones_like(t), np.zeros_like(t)])
    )
    assert value == pytest.approx(4.0 * np.pi, rel=1e-13)


def test_integrate_rejects_nonfinite():
    def bad(theta, phi):
        out = np.stack([np.ones_like(theta), np.zeros_like(theta)])
        out[0, 3] = np.nan
        return out

    with pytest.raises(NumericalFailure):
        angular.integrate_sphere(bad)


def test_direction_validation():
    with pytest.raises(ConfigError):
        angular.Direction(theta=-0.1, phi=0.0)
    d = angular.Direction(theta=np.pi / 2, phi=0.0)
    assert np.allclose(d.unit_vector, [1.0, 0.0, 0.0])


def test_spherical_basis_orthonormal():
    theta = np.array([0.3, 1.2, 2.8])
    phi = np.array([0.1, 2.0, 5.5])
    e_k, e_t, e_p = angular.spherical_basis(theta, phi)
    for a in (e_k, e_t, e_p):
        assert np.allclose(np.sum(a * a, axis=0), 1.0)
    assert np.allclose(np.sum(e_k * e_t, axis=0), 0.0, atol=1e-15)
    assert np.allclose(np.cross(e_k.T, e_t.T), e_p.T)


def test_motion_patterns_normalized():
    for axis in ("x", "y", "z"):
        dist = angular.make_motion_distribution(axis)
        assert dist.is_normalized
        # the closed-form geometry factor already normalizes the pattern
        assert dist.prenormalization_norm == pytest.approx(1.0, abs=1e-12)


def test_libration_patterns_normalized():
    for axis in ("y", "z"):
        dist = angular.make_libration_distribution(axis)
        assert dist.is_normalized
        assert dist.prenormalization_norm == pytest.approx(1.0, abs=1e-12)


def test_motion_orthogonality():
    dists = [angular.make_motion_distribution(a) for a in ("x", "y", "z")]
    for i, a in enumerate(dists):
        for j, b in enumerate(dists):
            expected = 1.0 if i == j else 0.0
            got = angular.overlap_hermitian(a, b)
            assert got == pytest.approx(expected, abs=1e-10)


def test_beam_requires_valid_na():
    with pytest.raises(ConfigError):
        angular.make_gaussian_beam(na=0.0, propagation_axis=[0, 0, -1])
    with pytest.raises(ConfigError):
        angular.make_gaussian_beam(na=1.5, propagation_axis=[0, 0, -1])


def test_beam_support_hemisphere():
    beam = angular.make_gaussian_beam(na=0.7, propagation_axis=[0, 0, -1])
    forward = beam.amplitude(np.array([0.3]), np.array([0.0]))
    backward = beam.amplitude(np.array([np.pi - 0.3]), np.array([0.0]))
    assert np.all(forward == 0.0)
    assert np.any(np.abs(backward) > 0.0)


def test_beam_overlap_rotation_invariant():
    # rotating beam and mode together must leave the overlap unchanged
    beam = angular.make_gaussian_beam(na=0.8, propagation_axis=[0, 0, -1])
    mode = angular.make_motion_distribution("z")
    base = angular.overlap(beam, mode)
    rot = angular.rotation_to_axis(np.array([1.0, 1.0, 0.5]))
    got = angular.overlap(angular.rotated(beam, rot), angular.rotated(mode, rot))
    assert got == pytest.approx(base, abs=5e-9)


def test_rotated_preserves_norm():
    beam = angular.make_gaussian_beam(na=0.5, propagation_axis=[0, 0, -1])
    rot = angular.rotation_to_axis(np.array([0.3, -0.7, 0.2]))
    moved = angular.rotated(beam, rot)
    assert moved.norm_squared == pytest.approx(1.0, abs=1e-10)


def test_overlap_variants_differ_by_conjugation():
    beam = angular.make_gaussian_beam(na=0.6, propagation_axis=[0, 0, -1])
    mode = angular.make_motion_distribution("z")
    plain = angular.overlap(beam, mode)
    herm = angular.overlap_hermitian(beam, mode)
    # the motion pattern is i * (real function): conjugation flips the sign
    assert plain == pytest.approx(-herm, abs=1e-12)


def test_superpose_counterpropagating_keeps_axis():
    a = angular.make_gaussian_beam(na=0.5, propagation_axis=[0, 0, 1])
    b = angular.make_gaussian_beam(na=0.5, propagation_axis=[0, 0, -1])
    mix = angular.superpose([a, b], [np.sqrt(0.5), np.sqrt(0.5)])
    assert mix.support_axis is not None
    assert mix.is_normalized


def test_unnormalized_overlap_warns():
    beam = angular.make_gaussian_beam(na=0.5, propagation_axis=[0, 0, -1])
    shrunk = angular.AngularDistribution(
        "half",
        lambda t, p: 0.5 * beam.amplitude(t, p),
        support_axis=beam.support_axis,
        normalize=False,
    )
    mode = angular.make_motion_distribution("z")
    with pytest.warns(UserWarning):
        angular.overlap(shrunk, mode)


def test_tabulated_round_trip(tmp_path):
    rule = angular.QuadratureRule(n_theta=16, n_phi=24)
    source = angular.make_libration_distribution("y", rule=rule)
    theta, phi, _ = rule.nodes()
    amp = 2.0 * source.amplitude(theta, phi)  # unnormalized on purpose
    path = tmp_path / "dist.csv"
    rows = np.column_stack(
        [theta, phi, amp[0].real, amp[0].imag, amp[1].real, amp[1].imag]
    )
    header = "theta,phi,re_a_theta,im_a_theta,re_a_phi,im_a_phi"
    np.savetxt(path, rows, delimiter=",", header=header, comments="")
    loaded = angular.load_tabulated(path, rule=rule)
    assert loaded.prenormalization_norm == pytest.approx(2.0, rel=1e-10)
    got = angular.overlap_hermitian(loaded, loaded, rule=rule)
    assert got == pytest.approx(1.0, abs=1e-10)


def test_tabulated_rejects_wrong_grid(tmp_path):
    rule = angular.QuadratureRule(n_theta=16, n_phi=24)
    path = tmp_path / "bad.csv"
    theta, phi, _ = rule.nodes()
    rows = np.column_stack([theta + 0.01, phi, theta * 0, theta * 0, theta * 0, theta * 0])
    np.savetxt(
        path, rows, delimiter=",",
        header="theta,phi,re_a_theta,im_a_theta,re_a_phi,im_a_phi", comments="",
    )
    with pytest.raises(ConfigError):
        angular.load_tabulated(path, rule=rule)
