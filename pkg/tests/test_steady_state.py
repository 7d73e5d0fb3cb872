import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mirrorcool.errors import InstabilityError, PhysicalityError, StepSizeError
from mirrorcool.model import reference_params, random_params
from mirrorcool.spectrum import analytic_cooling, perturbative_occupancy
from mirrorcool.steady_state import (ORDERING, build_diffusion, build_drift,
                                     integrate_moments, lyapunov_residual, mirror_occupancy,
                                     physicality_margin, solve_lyapunov, stability_check,
                                     steady_state, structural_deviation)


def test_ordering():
    assert ORDERING == ("q", "p", "X", "Y", "x1", "y1", "x2", "y2")


def test_decoupled_drift_eigenvalues():
    p = reference_params(G=0.0, delta1=-0.5, delta2=0.25)
    ev = np.sort_complex(np.linalg.eigvals(build_drift(p)))
    expected = np.sort_complex(np.array([
        -p.gamma_m / 2 + 1j * math.sqrt(1 - p.gamma_m**2 / 4),
        -p.gamma_m / 2 - 1j * math.sqrt(1 - p.gamma_m**2 / 4),
        -p.kappa, -p.kappa,
        -p.gamma1 + 0.5j, -p.gamma1 - 0.5j,
        -p.gamma2 + 0.25j, -p.gamma2 - 0.25j,
    ]))
    np.testing.assert_allclose(ev, expected, atol=1e-12)


def test_radiation_pressure_entries():
    A = build_drift(reference_params(G=0.3))
    assert A[1, 2] == pytest.approx(math.sqrt(2) * 0.3)
    assert A[3, 0] == pytest.approx(math.sqrt(2) * 0.3)
    assert A[0, 1] == 1.0 and A[1, 0] == -1.0


def test_diffusion_entries():
    D = build_diffusion(reference_params())
    np.testing.assert_allclose(np.diag(D), [0, 201e-5, 100, 100, 0.01, 0.01, 1, 1])
    assert np.count_nonzero(D - np.diag(np.diag(D))) == 0


def test_lyapunov_trivial_case():
    V = solve_lyapunov(-np.eye(3), 2 * np.eye(3))
    np.testing.assert_allclose(V, np.eye(3), atol=1e-15)


def test_lyapunov_rejects_unstable():
    with pytest.raises(InstabilityError):
        solve_lyapunov(np.eye(2), np.eye(2))


def test_uncoupled_mirror_thermalizes():
    r = steady_state(reference_params(G=0.0))
    assert r.V[0, 0] == pytest.approx(100.5, rel=1e-9)
    assert r.V[1, 1] == pytest.approx(100.5, rel=1e-9)
    assert r.n_mirror == pytest.approx(100.0, rel=1e-8)
    # every other mode sits in vacuum
    np.testing.assert_allclose(np.diag(r.V)[2:], 0.5, rtol=1e-10)


def test_integrate_moments_closed_form():
    A, D = -np.eye(4), 2 * np.eye(4)
    for t in (0.1, 1.0, 7.5):
        V = integrate_moments(A, D, np.zeros((4, 4)), t)
        np.testing.assert_allclose(V, (1 - math.exp(-2 * t)) * np.eye(4), rtol=1e-13)


def test_integrate_moments_without_diffusion_is_pure_decay():
    A = np.array([[-0.1, 1.0], [-1.0, -0.1]])
    V0 = np.array([[2.0, 0.3], [0.3, 1.0]])
    V = integrate_moments(A, np.zeros((2, 2)), V0, 3.0)
    Phi = math.exp(-0.3) * np.array([[math.cos(3), math.sin(3)], [-math.sin(3), math.cos(3)]])
    np.testing.assert_allclose(V, Phi @ V0 @ Phi.T, rtol=1e-13, atol=1e-15)


def test_integrate_moments_zero_horizon_and_arguments():
    V0 = np.eye(2)
    assert np.array_equal(integrate_moments(-np.eye(2), np.eye(2), V0, 0.0), V0)
    with pytest.raises(ValueError):
        integrate_moments(-np.eye(2), np.eye(2), V0, -1.0)
    with pytest.raises(ValueError):
        integrate_moments(-np.eye(2), np.eye(2), V0, 1.0, dt_control=2.0)
    with pytest.raises(StepSizeError):
        integrate_moments(-np.eye(2), np.eye(2), V0, 1e300, max_doublings=50)


def test_integration_converges_to_lyapunov_solution():
    p = reference_params(G1=3.0)
    A, D = build_drift(p), build_diffusion(p)
    _, abscissa = stability_check(A)
    V = integrate_moments(A, D, np.zeros_like(A), 40 / abs(abscissa))
    np.testing.assert_allclose(V, solve_lyapunov(A, D), rtol=1e-10, atol=1e-12)


def test_gain_beyond_threshold_is_unstable():
    r = steady_state(reference_params(G=0.01, G2=math.sqrt(110)))  # C2 = 1.1
    assert not r.stable and r.V is None and math.isnan(r.n_mirror)
    assert r.spectral_abscissa > 0


def test_mirror_occupancy():
    assert mirror_occupancy(np.diag([0.5, 0.5, 1, 1])) == 0.0
    assert mirror_occupancy(np.diag([100.5, 100.5])) == 100.0
    with pytest.raises(PhysicalityError):
        mirror_occupancy(np.diag([0.2, 0.2]))


def test_vacuum_is_physical_and_squeezing_below_bound_is_not():
    assert physicality_margin(0.5 * np.eye(4)) == pytest.approx(0.0, abs=1e-15)
    assert physicality_margin(np.diag([0.1, 0.5])) < 0


def test_structural_agreement_with_complex_equations():
    rng = np.random.default_rng(7)
    for _ in range(20):
        assert structural_deviation(random_params(rng), rng) <= 1e-12


def test_ground_atoms_cool_toward_analytic_value():
    p = reference_params(G1=10.0)
    n = steady_state(p).n_mirror
    # thermal remnant from the damping computed off the force spectrum
    remnant = p.gamma_m * p.n_th / perturbative_occupancy(p).gamma_m_bar
    expected = remnant + analytic_cooling(p)[1]
    assert n < 1.0
    assert n == pytest.approx(expected, rel=0.25)


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_random_stable_points_are_physical(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    A, D = build_drift(p), build_diffusion(p)
    if not stability_check(A)[0]:
        return
    V = solve_lyapunov(A, D)
    assert lyapunov_residual(A, V, D) <= 1e-10
    assert np.allclose(V, V.T)
    assert physicality_margin(V) >= -1e-9
