"""Theoretical rates of the adaptive estimator and abacus curves.

Each test density is summarized by ``(s, r, b)`` with
``int_{|x|>=ell} |g^*|^2 <= A (ell^2+1)^{-s} exp(-2 b ell^r)``; each noise by
``(gamma, mu, delta)``.  The rate expressions are those of the two-way table
(Sobolev / analytic ``g`` against ordinary / super smooth errors), with the
explicit forms used for Gaussian errors on Gaussian-type and stable targets.
All rates are known up to a multiplicative constant, which becomes an
additive offset on the log scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .densities import get_density
from .noise import NoiseKind, NoiseModel
from .penalty import ConfigurationError

__all__ = ["RateSpec", "rate_spec", "theoretical_rate", "log_rate", "abacus", "DEFAULT_S2N", "SMOOTHNESS"]

DEFAULT_S2N = 4.0

# density key -> (s, r, b); None marks compactly supported g^* (no bias)
SMOOTHNESS = {
    "uniform": (0.5, 0.0, 0.0),
    "exponential": (0.5, 0.0, 0.0),
    "chi2": (1.0, 0.0, 0.0),
    "laplace": (1.5, 0.0, 0.0),
    "gamma": (1.5, 0.0, 0.0),
    "mixgamma": (4.5, 0.0, 0.0),
    "stable14": (-3.0 / 8.0, 0.25, 1.0),
    "stable12": (-0.25, 0.5, 1.0),
    "stable34": (-1.0 / 8.0, 0.75, 1.0),
    "cauchy": (0.0, 1.0, 1.0),
    "gauss": (0.25, 2.0, 0.5),
    "mixgauss": (0.25, 2.0, 0.5),
    "fejer1": None,
    "fejer5": None,
    "fejer10": None,
    "fejer13": None,
}


@dataclass(frozen=True)
class RateSpec:
    density: str
    noise: NoiseKind
    sigma: float
    s: Optional[float]
    r: Optional[float]
    b: Optional[float]
    gamma: float
    mu: float
    delta: float

    @property
    def parametric(self) -> bool:
        return self.s is None


def rate_spec(density, noise, sigma: Optional[float] = None, s2n: Optional[float] = None) -> RateSpec:
    """Rate parameters for a (density, noise) pair.

    ``sigma`` defaults to ``1/sqrt(s2n)`` and ``s2n`` to 4.  No-noise uses
    ``gamma = mu = delta = 0``.
    """
    try:
        d = get_density(density)
        kind = NoiseKind.parse(noise)
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(str(exc).strip("'\"")) from None
    if d.key not in SMOOTHNESS:
        raise ConfigurationError(f"no rate known for density {d.key!r}")
    if sigma is None:
        sigma = 1.0 / math.sqrt(DEFAULT_S2N if s2n is None else s2n)
    model = NoiseModel(kind, sigma)
    if model.is_null:
        gamma = mu = delta = 0.0
    else:
        gamma, mu, delta = model.gamma, model.mu, model.delta
    srb = SMOOTHNESS[d.key]
    s, r, b = (None, None, None) if srb is None else srb
    return RateSpec(d.key, kind, model.sigma, s, r, b, gamma, mu, delta)


def _log_rate_scalar(spec: RateSpec, n: float) -> float:
    if n < 3:
        raise ValueError("rates need n >= 3")
    ln_n = math.log(n)
    lln = math.log(ln_n)
    if spec.parametric:
        return -ln_n
    s, r, b = spec.s, spec.r, spec.b
    g, mu, dl = spec.gamma, spec.mu, spec.delta
    if dl == 0:
        if r == 0:
            return -2 * s / (2 * s + 2 * g + 1) * ln_n
        return (2 * g + 1) / r * lln - ln_n
    # super smooth errors
    if r == 0:
        return -2 * s / dl * lln
    ms = mu * spec.sigma ** dl
    if r == dl and spec.density in ("gauss", "mixgauss") and dl == 2 and mu == 0.5:
        s2 = spec.sigma ** 2
        return -0.5 * (s2 - 1) / (s2 + 1) * lln - ln_n / (1 + s2)
    if r / dl <= 0.5:
        return -2 * s / dl * lln - 2 * b * (ln_n / (2 * ms)) ** (r / dl)
    raise ConfigurationError(f"no explicit rate for {spec.density} with {spec.noise.value} errors")


def log_rate(spec: RateSpec, n):
    n_arr = np.asarray(n, dtype=float)
    out = np.vectorize(lambda v: _log_rate_scalar(spec, v), otypes=[float])(n_arr)
    return out if out.ndim else float(out)


def theoretical_rate(spec: RateSpec, n):
    """Rate value (up to a constant) at sample size ``n``."""
    return np.exp(log_rate(spec, n)) if np.ndim(n) else math.exp(log_rate(spec, n))


def abacus(spec: RateSpec, n_values: Iterable[float], offsets: Iterable[float] = (0.0,)) -> List[Tuple[float, float, float]]:
    """Rows ``(offset, ln n, ln rate + offset)`` for every offset and ``n``."""
    ns = np.asarray(list(n_values), dtype=float)
    if ns.size == 0:
        raise ValueError("n_values must be nonempty")
    lr = np.atleast_1d(log_rate(spec, ns))
    rows = []
    for c in offsets:
        for n, v in zip(ns, lr):
            rows.append((float(c), math.log(n), float(v + c)))
    return rows
