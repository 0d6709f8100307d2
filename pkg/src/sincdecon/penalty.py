"""Penalties for the cutoff selection and the grid of candidate cutoffs.

The new penalties are calibrated for a thin grid ``ell_m = m * delta``
(``delta = 0.1`` by default); the old ones were designed for
``ell_m = m * pi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "PenaltyFamily",
    "PenaltySpec",
    "ConfigurationError",
    "zeta",
    "gauss_integral",
    "pen_laplace",
    "pen_gaussian",
    "pen_old",
    "penalty",
    "model_grid",
    "cutoff_grid",
    "S2N_FLOOR",
]

S2N_FLOOR = 1.0 / 0.6
_GL_X, _GL_W = leggauss(128)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W
# exp((sigma*ell)^2) overflows past ~709
_EXP_GUARD = 700.0


class ConfigurationError(ValueError):
    """Invalid estimator or experiment configuration."""


class PenaltyFamily(str, enum.Enum):
    NEW_LAPLACE = "new-laplace"
    NEW_GAUSSIAN = "new-gauss"
    OLD_LAPLACE = "old-laplace"
    OLD_GAUSSIAN = "old-gauss"

    @classmethod
    def parse(cls, value) -> "PenaltyFamily":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        key = key.replace("gaussian", "gauss")
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown penalty family {value!r}") from None

    @classmethod
    def for_noise(cls, kind, old: bool = False) -> "PenaltyFamily":
        """Penalty matching a noise kind; no-noise uses the Laplace form (equal at sigma=0)."""
        from .noise import NoiseKind

        gaussian = NoiseKind.parse(kind) is NoiseKind.GAUSSIAN
        if old:
            return cls.OLD_GAUSSIAN if gaussian else cls.OLD_LAPLACE
        return cls.NEW_GAUSSIAN if gaussian else cls.NEW_LAPLACE


@dataclass(frozen=True)
class PenaltySpec:
    """Everything the penalty and the model grid depend on.

    ``s2n`` enters the new penalties through ``(1 - 1/s2n)^2`` and
    ``(1 + 1/s2n)^2``.  When ``sigma == 0`` and ``s2n_factor_at_zero_sigma``
    is False (default) the prefactor is dropped, as in the published
    ``sigma = 0`` form ``(2.5/n)(ell + 8 ln^2.5 zeta(ell))``.
    ``smooth_zeta=False`` replaces ``zeta`` by ``max(ell, pi)``.
    """

    family: PenaltyFamily
    n: int
    s2n: float
    sigma: float
    delta_grid: float = 0.1
    ell_max: float = 10 * math.pi
    pen_max: float = 5.0
    smooth_zeta: bool = True
    s2n_factor_at_zero_sigma: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", PenaltyFamily.parse(self.family))
        if self.n < 1:
            raise ConfigurationError("n must be >= 1")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be >= 0")
        if not self.delta_grid > 0:
            raise ConfigurationError("delta_grid must be > 0")
        if self.ell_max < self.delta_grid:
            raise ConfigurationError("ell_max must be >= delta_grid")
        if not self.pen_max > 0:
            raise ConfigurationError("pen_max must be > 0")

    def with_(self, **kw) -> "PenaltySpec":
        return replace(self, **kw)


def zeta(ell):
    """Smoothed version of ``max(ell, pi)``.

    ``pi 1{ell<4} + (ell-2)^2/(4(pi-2)) 1{2<=ell<4} + ell 1{ell>=4}``, taken
    as printed (including the small jump at 4).
    """
    ell = np.asarray(ell, dtype=float)
    out = np.where(ell < 4.0, np.pi, ell)
    mid = (ell >= 2.0) & (ell < 4.0)
    out = out + np.where(mid, (ell - 2.0) ** 2 / (4.0 * (np.pi - 2.0)), 0.0)
    return out if out.ndim else float(out)


def _zeta_rough(ell):
    out = np.maximum(np.asarray(ell, dtype=float), np.pi)
    return out if out.ndim else float(out)


def gauss_integral(a):
    """``int_0^1 exp((a x)^2) dx`` by 128-node Gauss-Legendre; inf once ``a^2 > 700``."""
    a = np.asarray(a, dtype=float)
    a2 = a * a
    safe = np.where(a2 > _EXP_GUARD, 0.0, a2)
    val = np.exp(np.multiply.outer(safe, _GL_X * _GL_X)) @ _GL_W
    val = np.where(a2 > _EXP_GUARD, np.inf, val)
    return val if val.ndim else float(val)


def _s2n_factor(spec: PenaltySpec, power_sign: int) -> float:
    if spec.sigma == 0.0 and not spec.s2n_factor_at_zero_sigma:
        return 1.0
    if not spec.s2n > 1.0:
        raise ConfigurationError(f"s2n must exceed 1 for the new penalties, got {spec.s2n}")
    return (1.0 + power_sign / spec.s2n) ** 2


def _log_term(spec: PenaltySpec, ell):
    z = zeta(ell) if spec.smooth_zeta else _zeta_rough(ell)
    return 8.0 * np.log(z) ** 2.5


def pen_laplace(spec: PenaltySpec, ell):
    """New penalty for Laplace errors."""
    ell = np.asarray(ell, dtype=float)
    s2 = spec.sigma ** 2
    lead = 2.5 / spec.n * _s2n_factor(spec, -1)
    bracket = ell + _log_term(spec, ell) + 2.0 * s2 * ell ** 3 / 3.0
    if s2 > 0:
        bracket = bracket + 3.0 * _s2n_factor(spec, +1) * s2 * s2 * ell ** 5 / 10.0
    return lead * bracket


def pen_gaussian(spec: PenaltySpec, ell):
    """New penalty for Gaussian errors (``+inf`` where the integral overflows)."""
    ell = np.asarray(ell, dtype=float)
    s2 = spec.sigma ** 2
    lead = 2.5 / spec.n * _s2n_factor(spec, -1)
    bracket = ell + _log_term(spec, ell) + s2 * ell ** 3 / 3.0
    return lead * bracket * gauss_integral(spec.sigma * ell)


def pen_old(spec: PenaltySpec, ell):
    """Penalties of the integer-``L_m`` procedure; ``ln(ell/pi)`` clamped at 0."""
    ell = np.asarray(ell, dtype=float)
    s2 = spec.sigma ** 2
    logt = np.pi * np.log(np.maximum(ell / np.pi, 1.0)) ** 2.5
    if spec.family is PenaltyFamily.OLD_LAPLACE:
        return 6.0 / spec.n * (ell + logt + s2 * ell ** 3 / 3.0 + s2 * s2 * ell ** 5 / 20.0)
    if spec.family is PenaltyFamily.OLD_GAUSSIAN:
        return 6.0 / spec.n * (ell + logt + s2 * ell ** 3 / 3.0) * gauss_integral(spec.sigma * ell)
    raise ConfigurationError(f"pen_old called with family {spec.family.value}")


def penalty(spec: PenaltySpec, ell):
    """Dispatch on ``spec.family``."""
    fam = spec.family
    if fam is PenaltyFamily.NEW_LAPLACE:
        out = pen_laplace(spec, ell)
    elif fam is PenaltyFamily.NEW_GAUSSIAN:
        out = pen_gaussian(spec, ell)
    else:
        out = pen_old(spec, ell)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def cutoff_grid(delta: float, ell_max: float) -> np.ndarray:
    """``m * delta`` for ``m = 1..floor(ell_max/delta)``, rounded to 12 decimals."""
    m_max = int(math.floor(ell_max / delta + 1e-9))
    return np.round(delta * np.arange(1, m_max + 1), 12)


def model_grid(spec: PenaltySpec) -> np.ndarray:
    """Cutoffs ``m * delta``, ``m = 1, 2, ...`` up to ``ell_max`` and while ``pen <= pen_max``."""
    ells = cutoff_grid(spec.delta_grid, spec.ell_max)
    pens = np.asarray(penalty(spec, ells))
    bad = np.flatnonzero(~(pens <= spec.pen_max))
    stop = bad[0] if bad.size else ells.size
    if stop == 0:
        raise ConfigurationError(
            f"empty model grid: pen({spec.delta_grid}) = {pens[0]:.4g} exceeds pen_max = {spec.pen_max}"
        )
    return ells[:stop]
