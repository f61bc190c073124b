import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhrecur.dynamics import (
    asymptotic_neg_ln_tr,
    asymptotic_omega,
    basis_state,
    build_spectral_coeffs,
    dominant_modes,
    evolve_many,
    evolve_omega,
    expansion_amplitudes,
    maximally_mixed,
    spectral_evolve,
    time_grid,
)
from nhrecur.exceptions import DefectiveMatrixError, NumericalRangeError
from nhrecur.hamiltonian import build_apt, build_pt, random_real_spectrum_nh, shift_spectrum
from nhrecur.linalg import gen_eig
from nhrecur.measures import closed_form_pt_unbroken

from conftest import random_density, random_matrix, two_level

S3 = math.sqrt(3.0)
FIG2A = two_level(2 * S3, math.pi / 6)


def test_time_grid_examples():
    np.testing.assert_allclose(time_grid(1.0, 2), [0, 1])
    np.testing.assert_allclose(time_grid(2.0, 3), [0, 1, 2])
    np.testing.assert_allclose(np.diff(time_grid(math.pi, 5)), math.pi / 4)
    for bad in ((0.0, 5), (-1.0, 5), (1.0, 1), (math.inf, 3)):
        with pytest.raises(ValueError):
            time_grid(*bad)


def test_evolve_at_zero_and_hermitian_trace(rng):
    h = random_matrix(rng, 3)
    omega0 = random_density(rng, 3)
    np.testing.assert_allclose(evolve_omega(h, omega0, 0.0).omega, omega0, atol=1e-15)
    herm = h + h.conj().T
    for t in (0.3, 2.0, 7.5):
        assert evolve_omega(herm, omega0, t).trace == pytest.approx(1.0, abs=1e-12)


def test_evolve_matches_closed_form_fig2a():
    times = time_grid(10.0, 201)
    for s in evolve_many(build_pt(FIG2A), maximally_mixed(2), times):
        assert -math.log(s.trace) == pytest.approx(closed_form_pt_unbroken(FIG2A, s.time), abs=1e-9)
        assert np.trace(s.rho).real == pytest.approx(1.0, abs=1e-12)


def test_evolve_rejects_bad_initial_state():
    h = np.eye(2)
    with pytest.raises(ValueError):
        evolve_omega(h, np.diag([1.0, -0.5]), 1.0)
    with pytest.raises(ValueError):
        evolve_omega(h, np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        evolve_omega(h, np.eye(3) / 3, 1.0)


def test_range_errors_in_broken_phase():
    h = build_pt(two_level(4 * math.sqrt(2), math.pi / 6))
    with pytest.raises(NumericalRangeError):
        evolve_omega(h, maximally_mixed(2), 200.0)
    with pytest.raises(NumericalRangeError):
        evolve_omega(-1j * np.eye(2) * 400, maximally_mixed(2), 1.0)


def test_spectral_coefficients_examples(rng):
    a = random_matrix(rng, 3)
    coeffs = build_spectral_coeffs(a + a.conj().T, maximally_mixed(3))
    np.testing.assert_allclose(coeffs.omega_ij, np.eye(3) / 3, atol=1e-12)
    h = random_real_spectrum_nh(3, seed=2)
    phi = gen_eig(h).right_vectors[:, 0]
    coeffs = build_spectral_coeffs(h, np.outer(phi, phi.conj()))
    expected = np.zeros((3, 3))
    expected[0, 0] = 1
    np.testing.assert_allclose(coeffs.omega_ij, expected, atol=1e-12)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_reconstruction_and_route_equivalence(rng, dim):
    for _ in range(10):
        h = random_matrix(rng, dim, 0.5)
        omega0 = random_density(rng, dim)
        coeffs = build_spectral_coeffs(h, omega0)
        assert np.max(np.abs(coeffs.reconstruct() - omega0)) <= 1e-9
        for t in (0.0, 0.7, 2.3):
            exact = evolve_omega(h, omega0, t).omega
            scale = max(1.0, np.linalg.norm(exact))
            assert np.linalg.norm(spectral_evolve(coeffs, t) - exact) <= 1e-8 * scale


def test_spectral_route_on_fig1a():
    h = build_apt(two_level(5 / S3, 11 * math.pi / 24))
    coeffs = build_spectral_coeffs(h, maximally_mixed(2))
    for t in time_grid(5.0, 51):
        np.testing.assert_allclose(spectral_evolve(coeffs, t), evolve_omega(h, maximally_mixed(2), t).omega,
                                   atol=1e-8)


def test_spectral_route_refuses_exceptional_point():
    with pytest.raises(DefectiveMatrixError):
        build_spectral_coeffs(build_pt(two_level(4.0, math.pi / 6)), maximally_mixed(2))


def test_dominant_mode_order():
    spec = gen_eig(np.diag([1.0 + 0.5j, 3.0 + 0.5j, 2.0 - 1j]))
    modes = dominant_modes(spec, 3)
    np.testing.assert_allclose(spec.eigenvalues[modes], [3 + 0.5j, 1 + 0.5j, 2 - 1j])


def _pure_setup(h, rng):
    spec = gen_eig(h)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    omega0 = np.outer(psi, psi.conj())
    return build_spectral_coeffs(h, omega0), expansion_amplitudes(spec, psi), omega0


def test_asymptotic_two_level_is_exact(rng):
    h = random_matrix(rng, 2, 0.5)
    coeffs, c, _ = _pure_setup(h, rng)
    for t in (0.0, 1.0, 3.0):
        np.testing.assert_allclose(asymptotic_omega(coeffs, c, t), spectral_evolve(coeffs, t), atol=1e-10)
        exact = -math.log(np.trace(spectral_evolve(coeffs, t)).real)
        assert asymptotic_neg_ln_tr(coeffs, c, t) == pytest.approx(exact, abs=1e-10)


def test_asymptotic_error_decays_in_three_levels(rng):
    s = np.eye(3) + 0.3 * random_matrix(rng, 3)
    h = s @ np.diag([1.0 + 0.4j, -0.5 + 0.1j, 0.3 - 0.6j]) @ np.linalg.inv(s)
    coeffs, c, omega0 = _pure_setup(h, rng)
    errors = []
    for t in (2.0, 5.0, 10.0, 15.0):
        exact = evolve_omega(h, omega0, t).trace
        approx = math.exp(-asymptotic_neg_ln_tr(coeffs, c, t))
        errors.append(abs(approx - exact) / exact)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-3


def test_asymptotic_neg_ln_tr_special_cases():
    spec_h = np.diag([2.0, 0.5])
    coeffs = build_spectral_coeffs(spec_h, maximally_mixed(2))
    c = np.array([1, 1]) / math.sqrt(2)
    period = 2 * math.pi / 1.5
    for t in (0.1, 0.9, 2.2):
        assert asymptotic_neg_ln_tr(coeffs, c, t) == pytest.approx(asymptotic_neg_ln_tr(coeffs, c, t + period),
                                                                   abs=1e-12)
    gamma = 0.3
    shifted = build_spectral_coeffs(spec_h + 1j * gamma * np.eye(2), maximally_mixed(2))
    for t in (0.5, 1.7):
        assert asymptotic_neg_ln_tr(shifted, c, t) == pytest.approx(
            asymptotic_neg_ln_tr(coeffs, c, t) - 2 * gamma * t, abs=1e-12)
    single = np.array([0.6, 0.0])
    g1 = gen_eig(spec_h + 1j * gamma * np.eye(2)).eigenvalues[dominant_modes(shifted.spectrum)[0]].imag
    assert asymptotic_neg_ln_tr(shifted, single, 1.3) == pytest.approx(-2 * g1 * 1.3 - math.log(0.36), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.floats(-2, 2), st.integers(0, 10_000))
def test_gauge_shift_law(dim, c, seed):
    rng = np.random.default_rng(seed)
    h = random_matrix(rng, dim, 0.5)
    omega0 = random_density(rng, dim)
    shifted = shift_spectrum(h, c)
    for t in (0.4, 1.9):
        a, b = evolve_omega(h, omega0, t), evolve_omega(shifted, omega0, t)
        np.testing.assert_allclose(b.omega, math.exp(2 * c * t) * a.omega,
                                   atol=1e-9 * max(1.0, np.abs(b.omega).max()))
        np.testing.assert_allclose(b.rho, a.rho, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.floats(0, 2), st.floats(0, 2), st.integers(0, 10_000))
def test_composition_and_positivity(dim, t1, t2, seed):
    rng = np.random.default_rng(seed)
    h = random_matrix(rng, dim, 0.5)
    omega0 = random_density(rng, dim)
    mid = evolve_omega(h, omega0, t1).omega
    a = evolve_omega(h, mid, t2).omega
    b = evolve_omega(h, omega0, t1 + t2).omega
    np.testing.assert_allclose(a, b, atol=1e-9 * max(1.0, np.abs(b).max()))
    assert np.linalg.eigvalsh(b)[0] >= -1e-10 * np.trace(b).real


def test_evolve_many_is_pointwise_identical(rng):
    h = random_matrix(rng, 3)
    omega0 = random_density(rng, 3)
    times = time_grid(2.0, 9)
    batch = evolve_many(h, omega0, times)
    for s, t in zip(batch, times):
        np.testing.assert_array_equal(s.omega, evolve_omega(h, omega0, t).omega)


def test_basis_state():
    np.testing.assert_array_equal(basis_state(1, 3), np.diag([0, 1, 0]))
