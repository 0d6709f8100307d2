"""Known error laws for the convolution model ``Z = X + sigma * eps``."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = ["NoiseKind", "NoiseModel", "cf", "sample_noise"]


class NoiseKind(str, enum.Enum):
    LAPLACE = "laplace"
    GAUSSIAN = "gauss"
    NONE = "none"

    @classmethod
    def parse(cls, value) -> "NoiseKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"gaussian": "gauss", "normal": "gauss", "nonoise": "none", "no": "none"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown noise kind {value!r}") from None


# (gamma, kappa0, mu, delta) in |f*(x)| >= kappa0 (x^2+1)^(-gamma/2) exp(-mu |x|^delta)
_SMOOTHNESS = {
    NoiseKind.LAPLACE: (2.0, 0.5, 0.0, 0.0),
    NoiseKind.GAUSSIAN: (0.0, 1.0, 0.5, 2.0),
    NoiseKind.NONE: (0.0, 1.0, 0.0, 0.0),
}


@dataclass(frozen=True)
class NoiseModel:
    """Error law of ``eps`` together with the noise scale ``sigma``.

    ``eps`` has unit variance (Laplace density ``e^{-sqrt2|x|}/sqrt2`` or the
    standard normal).  ``NONE`` means the X's are observed directly and
    ``sigma`` is forced to 0.
    """

    kind: NoiseKind
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind.parse(self.kind))
        sigma = float(self.sigma)
        if sigma < 0 or not np.isfinite(sigma):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.kind is NoiseKind.NONE:
            sigma = 0.0
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def from_s2n(cls, kind, s2n: float) -> "NoiseModel":
        """Noise with ``sigma = 1/sqrt(s2n)`` (unit-variance signal convention)."""
        if s2n <= 0:
            raise ValueError("s2n must be positive")
        return cls(kind, 1.0 / np.sqrt(s2n))

    @property
    def gamma(self) -> float:
        return _SMOOTHNESS[self.kind][0]

    @property
    def kappa0(self) -> float:
        return _SMOOTHNESS[self.kind][1]

    @property
    def mu(self) -> float:
        return _SMOOTHNESS[self.kind][2]

    @property
    def delta(self) -> float:
        return _SMOOTHNESS[self.kind][3]

    @property
    def is_null(self) -> bool:
        return self.kind is NoiseKind.NONE or self.sigma == 0.0

    def cf_scaled(self, x):
        """``f_eps^*(sigma * x)``, the characteristic function of ``sigma * eps``."""
        return cf(self, self.sigma * np.asarray(x, dtype=float))


def cf(model: NoiseModel, x):
    """Characteristic function ``f_eps^*(x)`` of the unit-scale law (real, even)."""
    x = np.asarray(x, dtype=float)
    if model.kind is NoiseKind.LAPLACE:
        return 1.0 / (1.0 + 0.5 * x * x)
    if model.kind is NoiseKind.GAUSSIAN:
        return np.exp(-0.5 * x * x)
    return np.ones_like(x)


def sample_noise(model: NoiseModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. unscaled errors ``eps`` (multiply by ``sigma`` yourself)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if model.kind is NoiseKind.LAPLACE:
        # sign * Exp(rate sqrt 2): density e^{-sqrt2 |x|}/sqrt2, variance 1
        e = rng.exponential(1.0 / np.sqrt(2.0), size=n)
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return sign * e
    if model.kind is NoiseKind.GAUSSIAN:
        return rng.standard_normal(n)
    return np.zeros(n)
