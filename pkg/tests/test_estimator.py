import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import direct_coefficients
from sincdecon.densities import get_density
from sincdecon.estimator import (
    NoiseUnderflowError,
    ProjectionEstimate,
    coefficient_indices,
    coefficients,
    contrast_path,
    empirical_cf,
    evaluate,
    select,
)
from sincdecon.noise import NoiseModel
from sincdecon.penalty import PenaltySpec, cutoff_grid, penalty
from sincdecon.spectral import riemann_nodes

NOISES = [NoiseModel("laplace", 0.5), NoiseModel("gauss", 0.5), NoiseModel("none")]


def test_empirical_cf():
    z = np.array([-1.0, 0.3, 2.0])
    assert empirical_cf(z, 0.0) == 1.0
    assert empirical_cf([0.0], 3.7) == 1.0
    assert empirical_cf([1.0], math.pi) == pytest.approx(complex(math.cos(math.pi), math.sin(math.pi)), abs=1e-15)
    x = np.array([0.5, 1.0])
    np.testing.assert_allclose(empirical_cf(z, x), [np.mean(np.exp(1j * t * z)) for t in x], atol=1e-15)
    with pytest.raises(ValueError):
        empirical_cf([], 1.0)


@pytest.mark.parametrize("ell", [0.5, 3.2, 10.0])
def test_point_mass_at_origin(ell):
    est = coefficients([0.0], ell, NoiseModel("none"), M=8)
    j = est.indices
    assert abs(est.coeffs[j == 0][0] - math.sqrt(ell / math.pi)) < 1e-10
    assert np.max(np.abs(est.coeffs[j != 0])) < 1e-10


@pytest.mark.parametrize("noise", NOISES)
def test_vs_direct_sum(rng, noise):
    z = rng.standard_normal(40)
    est = coefficients(z, 3.2, noise, M=8)
    ref = direct_coefficients(z, 3.2, noise.cf_scaled, 8)
    assert np.max(np.abs(est.coeffs - ref)) < 1e-12


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 60), ell=st.floats(0.1, 15.0),
       k=st.sampled_from(range(len(NOISES))))
def test_coefficients_real(seed, n, ell, k):
    z = np.random.default_rng(seed).standard_normal(n) * 2
    a = coefficients(z, ell, NOISES[k], M=8).coeffs
    assert np.max(np.abs(a.imag)) < 1e-10 * max(1.0, np.max(np.abs(a)))


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 30), ell=st.floats(0.1, 15.0))
def test_conjugate_symmetry_for_symmetric_samples(seed, n, ell):
    # a sample symmetric about 0 has a real, even psi_Z, hence a_{-j} = conj(a_j)
    half = np.random.default_rng(seed).standard_normal(n)
    z = np.concatenate([half, -half])
    est = coefficients(z, ell, NoiseModel("laplace", 0.5), M=8)
    a, j = est.coeffs, est.indices
    inner = (j > -2 ** 7)
    a_pos = a[inner]
    a_neg = a[np.isin(j, -j[inner])][::-1]
    assert np.max(np.abs(a_neg - np.conj(a_pos))) < 1e-10


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 80), ell=st.floats(0.1, 12.0),
       k=st.sampled_from(range(len(NOISES))))
def test_contrast_path_matches_coefficients(seed, n, ell, k):
    z = np.random.default_rng(seed).standard_normal(n)
    noise = NOISES[k]
    est = coefficients(z, ell, noise, M=8)
    path = contrast_path(z, noise, [ell], M=8)[0]
    assert path == pytest.approx(est.contrast, rel=1e-10, abs=1e-12)


def test_contrast_identity_independent(rng):
    # ||t||^2 - (2/n) sum u_t^*(Z_i) with the linear term from the direct sum
    for _ in range(10):
        z = rng.standard_normal(int(rng.integers(2, 50)))
        ell = float(rng.uniform(0.2, 10))
        noise = NOISES[int(rng.integers(3))]
        est = coefficients(z, ell, noise, M=8)
        direct = direct_coefficients(z, ell, noise.cf_scaled, 8)
        gamma = np.sum(np.abs(est.coeffs) ** 2) - 2 * np.real(np.vdot(est.coeffs, direct))
        assert abs(gamma - est.contrast) < 1e-8


def test_fast_path_matches_reference(rng):
    z = rng.standard_normal(200)
    ells = cutoff_grid(0.1, 12.0)
    for noise in NOISES:
        fast = contrast_path(z, noise, ells, M=8, delta=0.1)
        slow = contrast_path(z, noise, ells, M=8)
        np.testing.assert_allclose(fast, slow, rtol=1e-10, atol=1e-14)


def test_contrast_nan_on_underflow(rng):
    out = contrast_path(rng.standard_normal(10), NoiseModel("gauss", 1.0), [1.0, 40.0], M=8)
    assert np.isfinite(out[0]) and np.isnan(out[1])


def test_underflow_raises():
    with pytest.raises(NoiseUnderflowError):
        coefficients([0.0, 1.0], 40.0, NoiseModel("gauss", 1.0))


def test_coefficients_validation():
    with pytest.raises(ValueError):
        coefficients([], 1.0, NoiseModel("none"))
    with pytest.raises(ValueError):
        coefficients([1.0], 0.0, NoiseModel("none"))
    with pytest.raises(ValueError):
        coefficients([1.0], 1.0, NoiseModel("none"), M=2)


def test_select_small_cutoff(rng):
    d = get_density("gauss")
    noise = NoiseModel.from_s2n("laplace", 10)
    z = d.sample(500, rng) + noise.sigma * rng.laplace(0, 1 / math.sqrt(2), 500)
    est = select(z, noise, PenaltySpec("new-laplace", 500, 10.0, noise.sigma))
    assert 0.5 <= est.ell <= 6.0
    assert est.pen is not None and est.criterion == est.contrast + est.pen


def test_select_single_model(rng):
    z = rng.standard_normal(50)
    spec = PenaltySpec("new-laplace", 50, 4.0, 0.5)
    est = select(z, NoiseModel("laplace", 0.5), spec, grid=[2.5])
    assert est.ell == 2.5 and est.grid_size == 1


def test_select_tie_goes_to_smaller(monkeypatch):
    from sincdecon import estimator as E

    monkeypatch.setattr(E, "contrast_path", lambda z, noise, ells, M, delta: -np.asarray(ells))
    monkeypatch.setattr(E, "penalty", lambda spec, ells: np.asarray(ells, dtype=float))
    spec = PenaltySpec("new-laplace", 2, 4.0, 0.0)
    est = select([0.0, 1.0], NoiseModel("none"), spec, grid=[0.75, 1.5, 3.0])
    assert est.ell == 0.75


def test_select_matches_manual_argmin(rng):
    z = rng.standard_normal(120)
    noise = NoiseModel("gauss", 0.3)
    spec = PenaltySpec("new-gauss", 120, 1 / 0.09, 0.3)
    est = select(z, noise, spec)
    ells = cutoff_grid(0.1, 10 * math.pi)
    crit = [coefficients(z, e, noise).contrast + float(penalty(spec, e))
            for e in ells[: est.grid_size]]
    assert ells[int(np.argmin(crit))] == est.ell


def make_est(coeffs, ell=2.0, M=4):
    return ProjectionEstimate(ell, np.asarray(coeffs, dtype=complex), 1, M, NoiseModel("none"), 0.0)


def test_evaluate_examples():
    ell = 2.0
    a = np.zeros(16, dtype=complex)
    a[coefficient_indices(4) == 0] = math.sqrt(ell / math.pi)
    est = make_est(a, ell)
    assert evaluate(est, 0.0) == pytest.approx(ell / math.pi, abs=1e-15)
    xs = math.pi * np.array([1, -2, 5]) / ell
    np.testing.assert_allclose(evaluate(est, xs), 0.0, atol=1e-15)


def test_evaluate_vs_scalar_sum(rng):
    a = rng.standard_normal(16)
    est = make_est(a, 1.7)
    xs = rng.uniform(-10, 10, 25)
    j = coefficient_indices(4)
    for x in xs:
        ref = 0.0
        for aj, jj in zip(a, j):
            u = 1.7 * x / math.pi - jj
            ref += aj * math.sqrt(1.7 / math.pi) * (1.0 if u == 0 else math.sin(math.pi * u) / (math.pi * u))
        assert evaluate(est, x) == pytest.approx(ref, abs=1e-12)


def test_evaluate_shape():
    est = make_est(np.ones(16))
    assert evaluate(est, np.zeros((3, 2))).shape == (3, 2)
    assert est(np.zeros(5000)).shape == (5000,)


def test_shift_covariance_converges_with_M(rng):
    # the discrete estimator is only approximately shift covariant; the
    # defect is a Riemann-sum error of order 1/N
    z = rng.standard_normal(50)
    xs = np.linspace(-3, 3, 61)
    errs = []
    for M in (8, 11):
        base = coefficients(z, 6.0, NoiseModel("none"), M)
        moved = coefficients(z + 0.7, 6.0, NoiseModel("none"), M)
        errs.append(np.max(np.abs(evaluate(moved, xs + 0.7) - evaluate(base, xs))))
    assert errs[1] < errs[0] / 4
    assert errs[1] < 1e-3


def test_shift_phase_exact(rng):
    # the shift acts on the empirical cf as the exact phase e^{itc}
    z = rng.standard_normal(30)
    t = 4.0 * riemann_nodes(256)
    np.testing.assert_allclose(empirical_cf(z + 0.4, t), np.exp(0.4j * t) * empirical_cf(z, t), atol=1e-13)
