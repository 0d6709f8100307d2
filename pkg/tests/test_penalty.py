import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import adaptive_simpson
from sincdecon.penalty import (
    ConfigurationError,
    PenaltyFamily,
    PenaltySpec,
    cutoff_grid,
    gauss_integral,
    model_grid,
    pen_old,
    penalty,
    zeta,
)

# frozen from a 30-digit evaluation of the closed forms
ZETA3 = 3.3605849528253068
PEN_N100_L1 = 0.30540615917671903
OLD_LAP_N6_S1_PI = 28.778002452953806
ERFI_INTEGRAL = 1.4626517459071816


def spec(family="new-laplace", n=100, s2n=4.0, sigma=0.5, **kw):
    return PenaltySpec(family, n, s2n, sigma, **kw)


def test_zeta_values():
    assert zeta(1.0) == math.pi
    assert zeta(5.0) == 5.0
    assert zeta(2.0) == math.pi
    assert zeta(3.0) == pytest.approx(ZETA3, abs=1e-14)


def test_zeta_continuity_at_two():
    assert zeta(np.nextafter(2.0, 0.0)) == math.pi
    assert zeta(2.0) == math.pi


def test_zeta_vectorized():
    out = zeta(np.array([1.0, 3.0, 5.0]))
    np.testing.assert_allclose(out, [math.pi, ZETA3, 5.0], rtol=0, atol=1e-14)


def test_sigma_zero_value():
    s = spec(n=100, sigma=0.0, s2n=math.inf)
    assert penalty(s, 1.0) == pytest.approx(PEN_N100_L1, rel=1e-12)
    assert penalty(s, 1.0) == pytest.approx(2.5 / 100 * (1 + 8 * math.log(zeta(1.0)) ** 2.5), rel=1e-14)


def test_laplace_equals_gauss_at_sigma_zero():
    ells = cutoff_grid(0.1, 10 * math.pi)
    for n in (10, 100, 2500):
        a = penalty(spec("new-laplace", n=n, sigma=0.0), ells)
        b = penalty(spec("new-gauss", n=n, sigma=0.0), ells)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_gauss_integral_vs_simpson():
    ref = adaptive_simpson(lambda x: math.exp(x * x), 0.0, 1.0, tol=1e-12)
    assert ref == pytest.approx(ERFI_INTEGRAL, abs=1e-11)
    assert gauss_integral(1.0) == pytest.approx(ref, abs=1e-12)
    assert gauss_integral(0.0) == 1.0
    for a in (0.3, 2.0, 4.0):
        ref = adaptive_simpson(lambda x: math.exp((a * x) ** 2), 0.0, 1.0, tol=1e-10)
        assert gauss_integral(a) == pytest.approx(ref, rel=1e-9)


def test_gauss_overflow_guard():
    assert gauss_integral(30.0) == math.inf
    s = spec("new-gauss", sigma=1.0, s2n=1.0 + 1e-9 + 1.0)
    assert penalty(s, 30.0) == math.inf


def test_old_penalties():
    assert pen_old(spec("old-laplace", n=6, sigma=0.0), math.pi) == pytest.approx(math.pi, abs=1e-14)
    val = pen_old(spec("old-laplace", n=6, sigma=1.0), math.pi)
    assert val == pytest.approx(OLD_LAP_N6_S1_PI, rel=1e-12)
    ell = 2 * math.pi
    expected = 6 / 100 * (ell + math.pi * math.log(ell / math.pi) ** 2.5)
    assert pen_old(spec("old-gauss", n=100, sigma=0.0), ell) == pytest.approx(expected, rel=1e-13)


def test_pen_old_rejects_new_family():
    with pytest.raises(ConfigurationError):
        pen_old(spec("new-laplace"), 1.0)


@pytest.mark.parametrize("family", list(PenaltyFamily))
@pytest.mark.parametrize("sigma", [0.0, 0.1, 0.5, 1 / math.sqrt(2)])
def test_strictly_increasing_and_nonnegative(family, sigma):
    s2n = math.inf if sigma == 0 else 1 / sigma ** 2
    s = spec(family, n=250, sigma=sigma, s2n=s2n)
    pens = penalty(s, cutoff_grid(0.1, 10 * math.pi))
    finite = pens[np.isfinite(pens)]
    assert np.all(finite >= 0)
    if family in (PenaltyFamily.NEW_LAPLACE, PenaltyFamily.NEW_GAUSSIAN):
        assert np.all(np.diff(finite) > 0)
    else:
        assert np.all(np.diff(finite) >= 0)


@pytest.mark.parametrize("family", list(PenaltyFamily))
@given(ell=st.floats(0.1, 20.0), n=st.integers(1, 10 ** 6))
def test_one_over_n_scaling(family, ell, n):
    s1 = spec(family, n=1, sigma=0.3, s2n=1 / 0.09)
    sn = s1.with_(n=n)
    assert penalty(sn, ell) == pytest.approx(penalty(s1, ell) / n, rel=1e-12)


def test_deterministic():
    s = spec("new-gauss", sigma=0.4, s2n=6.25)
    ells = cutoff_grid(0.1, 10 * math.pi)
    assert np.array_equal(penalty(s, ells), penalty(spec("new-gauss", sigma=0.4, s2n=6.25), ells))


def test_s2n_must_exceed_one():
    with pytest.raises(ConfigurationError):
        penalty(spec(sigma=1.0, s2n=1.0), 1.0)


def test_s2n_factor_dropped_at_sigma_zero():
    a = penalty(spec(sigma=0.0, s2n=2.0), 1.5)
    b = penalty(spec(sigma=0.0, s2n=math.inf), 1.5)
    assert a == b
    c = penalty(spec(sigma=0.0, s2n=2.0, s2n_factor_at_zero_sigma=True), 1.5)
    assert c == pytest.approx(a * 0.25)


def test_rough_zeta_variant_differs():
    s = spec(sigma=0.0)
    assert penalty(s, 3.0) != penalty(s.with_(smooth_zeta=False), 3.0)
    assert penalty(s, 5.0) == penalty(s.with_(smooth_zeta=False), 5.0)


def test_cutoff_grid():
    g = cutoff_grid(0.1, 10 * math.pi)
    assert g.size == 314
    assert g[0] == 0.1 and g[2] == 0.3 and g[-1] == 31.4
    np.testing.assert_allclose(cutoff_grid(math.pi, 10 * math.pi), math.pi * np.arange(1, 11))


def test_model_grid_full_when_cap_inactive():
    g = model_grid(spec(n=10 ** 9, sigma=0.0))
    assert g.size == 314


def test_model_grid_truncated_by_gauss_factor():
    s = spec("new-gauss", n=100, sigma=1.0, s2n=2.0)
    g = model_grid(s)
    assert 0 < g.size < 314
    assert penalty(s, g[-1]) <= 5.0
    assert penalty(s, round(g[-1] + 0.1, 12)) > 5.0


def test_model_grid_empty_is_error():
    with pytest.raises(ConfigurationError):
        model_grid(spec(n=1, sigma=0.0, pen_max=1e-6))


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        spec(n=0)
    with pytest.raises(ConfigurationError):
        spec(sigma=-1.0)
    with pytest.raises(ConfigurationError):
        spec(delta_grid=0.0)
    with pytest.raises(ConfigurationError):
        spec("fancy")


def test_family_for_noise():
    assert PenaltyFamily.for_noise("gauss") is PenaltyFamily.NEW_GAUSSIAN
    assert PenaltyFamily.for_noise("none") is PenaltyFamily.NEW_LAPLACE
    assert PenaltyFamily.for_noise("laplace", old=True) is PenaltyFamily.OLD_LAPLACE
