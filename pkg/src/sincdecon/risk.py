"""Integrated squared error of an estimate and Monte-Carlo aggregation.

Two ways of scoring one estimate:

* ``E1``: trapezoid rule for ``int_I (g_hat - g)^2`` on the interval of the
  test density (needs a pdf).
* ``E2``: whole-line decomposition ``||g - g_m||^2 + sum_j |a_j - a_hat_j|^2``,
  with the bias taken from the tail energy of ``g^*`` and the true
  coefficients ``a_j`` computed by the same Riemann/IFFT recipe as the
  estimate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .densities import TestDensity, UnsupportedOperation, get_density
from .estimator import ProjectionEstimate, coefficients_from_cf, evaluate
from .spectral import riemann_nodes

__all__ = [
    "RiskMethod",
    "RiskResult",
    "MiseSummary",
    "ise_interval",
    "ise_exact",
    "true_coefficients",
    "aggregate",
    "score",
]


class RiskMethod(str, enum.Enum):
    E1 = "e1"
    E2 = "e2"

    @classmethod
    def parse(cls, value) -> "RiskMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown ISE method {value!r}; use 'e1' or 'e2'") from None


@dataclass(frozen=True)
class RiskResult:
    ise: float
    method: RiskMethod
    ell_used: float
    bias_part: Optional[float] = None
    variance_part: Optional[float] = None


@dataclass(frozen=True)
class MiseSummary:
    mean: float
    median: float
    sd: float
    count: int


def ise_interval(estimate: ProjectionEstimate, d, grid_points: int = 512) -> RiskResult:
    """Trapezoid approximation of ``int_I (g_hat - g)^2`` over ``d.interval``."""
    d = get_density(d)
    if not d.has_pdf:
        raise UnsupportedOperation(f"{d.name} has no closed-form pdf; use the E2 method")
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")
    lo, hi = d.interval
    xs = np.linspace(lo, hi, grid_points)
    diff = evaluate(estimate, xs) - d.pdf(xs)
    return RiskResult(float(np.trapezoid(diff * diff, xs)), RiskMethod.E1, estimate.ell)


def true_coefficients(d, ell: float, M: int) -> np.ndarray:
    """Coefficients of ``g`` in the cutoff-``ell`` sinc space by the estimator's recipe."""
    d = get_density(d)
    t = ell * riemann_nodes(2 ** M)
    return coefficients_from_cf(d.cf(t), ell)


def ise_exact(
    estimate: ProjectionEstimate,
    d,
    add_truncation_bound: bool = False,
    truncation_constant: float = 0.0,
) -> RiskResult:
    """Whole-line ISE ``tail(ell)/(2 pi) + sum_j |a_j - a_hat_j|^2``.

    The contribution of coefficients with ``|j| >= N/2`` is neglected.  With
    ``add_truncation_bound`` the bound ``(M2 + 1) ell^2 / (pi^2 N)`` is added
    to the variance part, ``M2 = truncation_constant``.
    """
    d = get_density(d)
    ell = estimate.ell
    bias = float(d.tail_energy(ell)) / (2.0 * math.pi)
    a = true_coefficients(d, ell, estimate.M)
    var = float(np.sum(np.abs(a - np.asarray(estimate.coeffs)) ** 2))
    if add_truncation_bound:
        var += (truncation_constant + 1.0) * ell * ell / (math.pi ** 2 * 2 ** estimate.M)
    return RiskResult(bias + var, RiskMethod.E2, ell, bias, var)


def score(estimate: ProjectionEstimate, d, method=None, grid_points: int = 512) -> RiskResult:
    """ISE by ``method``; ``None`` picks E1 when a pdf exists and E2 otherwise."""
    d = get_density(d)
    if method is None:
        method = RiskMethod.E1 if d.has_pdf else RiskMethod.E2
    method = RiskMethod.parse(method)
    if method is RiskMethod.E1:
        return ise_interval(estimate, d, grid_points)
    return ise_exact(estimate, d)


def aggregate(values) -> MiseSummary:
    """Mean (MISE), median, sample sd (``ddof=1``, 0 for one value) and count."""
    v = np.asarray([r.ise if isinstance(r, RiskResult) else r for r in values], dtype=float)
    if v.size == 0:
        raise ValueError("aggregate of an empty list")
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return MiseSummary(float(np.mean(v)), float(np.median(v)), sd, int(v.size))
