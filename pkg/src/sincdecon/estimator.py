"""Projection estimators on sinc spaces and penalized selection of the cutoff.

For a cutoff ``ell`` the model is spanned by ``sqrt(ell/pi) sinc(ell x/pi - j)``.
The coefficient of index ``j`` is

    a_j = sqrt(ell)/(2 sqrt(pi)) * int_{-1}^{1} e^{-i pi j x} h(ell x) dx,
    h(t) = psi_Z(t) / f_eps^*(sigma t),

with ``psi_Z`` the empirical characteristic function.  The integral is
replaced by the ``N = 2**M`` point midpoint rule and evaluated with one
inverse FFT (see :mod:`sincdecon.spectral`).  The contrast of the estimate
is ``-sum_j |a_j|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .noise import NoiseModel
from .penalty import PenaltySpec, model_grid, penalty
from .spectral import riemann_fourier, riemann_nodes

__all__ = [
    "ProjectionEstimate",
    "NoiseUnderflowError",
    "empirical_cf",
    "coefficients",
    "coefficients_from_cf",
    "contrast_path",
    "select",
    "evaluate",
    "coefficient_indices",
]

CF_FLOOR = 1e-300


class NoiseUnderflowError(ArithmeticError):
    """The noise characteristic function vanishes numerically at a needed frequency."""


@dataclass(frozen=True)
class ProjectionEstimate:
    """Estimate in the sinc space of cutoff ``ell``.

    ``coeffs[i]`` is the coefficient of index ``j = i - N/2``.
    """

    ell: float
    coeffs: np.ndarray
    n: int
    M: int
    noise_used: NoiseModel
    contrast: float
    pen: Optional[float] = None
    grid_size: Optional[int] = field(default=None, compare=False)

    @property
    def indices(self) -> np.ndarray:
        return coefficient_indices(self.M)

    @property
    def criterion(self) -> Optional[float]:
        return None if self.pen is None else self.contrast + self.pen

    def __call__(self, xs):
        return evaluate(self, xs)


def coefficient_indices(M: int) -> np.ndarray:
    n = 2 ** M
    return np.arange(-n // 2, n // 2)


def empirical_cf(sample, x):
    """``psi_Z(x) = mean_k exp(i x Z_k)``; ``x`` may be scalar or an array."""
    z = np.asarray(sample, dtype=float).ravel()
    if z.size == 0:
        raise ValueError("empirical_cf of an empty sample")
    x = np.asarray(x, dtype=float)
    out = np.exp(1j * np.multiply.outer(x, z)).mean(axis=-1)
    return out if out.ndim else complex(out)


def _deconvolved(psi, t, noise: NoiseModel):
    fe = noise.cf_scaled(t)
    if np.any(np.abs(fe) < CF_FLOOR):
        raise NoiseUnderflowError(f"|f_eps^*| < {CF_FLOOR} at some frequency (sigma={noise.sigma})")
    return psi / fe


def coefficients_from_cf(h_nodes, ell: float) -> np.ndarray:
    """Coefficients ``j = -N/2..N/2-1`` from ``h(ell x_k)`` sampled on the Riemann nodes."""
    h_nodes = np.asarray(h_nodes)
    n = h_nodes.shape[-1]
    j = np.arange(-n // 2, n // 2)
    # kernel e^{-i pi j x} is the riemann_fourier sum at index -j
    return np.sqrt(ell / np.pi) * riemann_fourier(h_nodes, -j)


def coefficients(sample, ell: float, noise: NoiseModel, M: int = 8) -> ProjectionEstimate:
    """Projection estimate of cutoff ``ell`` (the direct, uncached path)."""
    z = np.asarray(sample, dtype=float).ravel()
    if z.size == 0:
        raise ValueError("empty sample")
    if not ell > 0:
        raise ValueError("ell must be positive")
    if M < 3:
        raise ValueError("M must be >= 3")
    t = ell * riemann_nodes(2 ** M)
    h = _deconvolved(empirical_cf(z, t), t, noise)
    a = coefficients_from_cf(h, ell)
    contrast = -float(np.sum(np.abs(a) ** 2))
    return ProjectionEstimate(float(ell), a, z.size, M, noise, contrast)


def _cf_multiples(z: np.ndarray, base: np.ndarray, m_max: int, chunk: int = 16) -> np.ndarray:
    """``psi_Z(m * base[k])`` for ``m = 1..m_max``; shape ``(m_max, len(base))``.

    Uses ``e^{i m b z} = e^{i m1 b z} e^{i B m2 b z}`` with ``m = m1 + B m2`` so the
    sum over the sample becomes a batch of small matrix products.
    """
    nb = int(np.ceil(np.sqrt(m_max + 1)))
    nc = int(np.ceil((m_max + 1) / nb))
    m1 = np.arange(nb)
    m2 = nb * np.arange(nc)
    out = np.empty((m_max, base.size), dtype=np.complex128)
    for s in range(0, base.size, chunk):
        theta = np.multiply.outer(base[s:s + chunk], z)  # (k, n)
        lo = np.exp(1j * theta[:, None, :] * m1[None, :, None])  # (k, nb, n)
        hi = np.exp(1j * theta[:, :, None] * m2[None, None, :])  # (k, n, nc)
        prod = np.matmul(lo, hi) / z.size  # (k, nb, nc): m = m1 + nb*m2
        flat = prod.transpose(0, 2, 1).reshape(prod.shape[0], -1)
        out[:, s:s + chunk] = flat[:, 1:m_max + 1].T
    return out


def contrast_path(sample, noise: NoiseModel, ells, M: int = 8, delta: Optional[float] = None):
    """Contrast ``-sum_j |a_j|^2`` for every cutoff in ``ells``.

    By Parseval the contrast equals ``-(ell/pi) mean_k |h(ell x_k)|^2`` so no
    transform is needed.  When all ``ells`` are integer multiples of ``delta``
    the empirical characteristic function is tabulated once for all of them.
    Cutoffs where the noise cf underflows get ``nan``.
    """
    z = np.asarray(sample, dtype=float).ravel()
    ells = np.asarray(ells, dtype=float)
    nodes = riemann_nodes(2 ** M)
    pos = np.sort(nodes[nodes > 0])
    out = np.full(ells.size, np.nan)
    mult = None
    if delta is not None and ells.size:
        mult = np.rint(ells / delta).astype(np.int64)
        if mult.min() < 1 or not np.allclose(mult * delta, ells, rtol=0, atol=1e-9):
            mult = None
    if mult is not None:
        psi = _cf_multiples(z, delta * pos, int(mult.max()))[mult - 1]
    else:
        psi = np.stack([empirical_cf(z, ell * pos) for ell in ells]) if ells.size else None
    for i, ell in enumerate(ells):
        t = ell * pos
        fe = noise.cf_scaled(t)
        if np.any(np.abs(fe) < CF_FLOOR):
            continue
        # nodes come in +/- pairs with |h(-t)| = |h(t)|
        out[i] = -(ell / np.pi) * np.mean(np.abs(psi[i] / fe) ** 2)
    return out


def select(sample, noise: NoiseModel, pen_spec: PenaltySpec, M: int = 8, grid=None) -> ProjectionEstimate:
    """Penalized choice of the cutoff; ties go to the smallest ``ell``.

    ``grid`` defaults to :func:`model_grid` of ``pen_spec``.
    """
    z = np.asarray(sample, dtype=float).ravel()
    if grid is None:
        ells = model_grid(pen_spec)
        delta = pen_spec.delta_grid
    else:
        ells = np.asarray(grid, dtype=float)
        delta = None
    pens = np.atleast_1d(np.asarray(penalty(pen_spec, ells), dtype=float))
    crit = contrast_path(z, noise, ells, M, delta) + pens
    crit = np.where(np.isnan(crit), np.inf, crit)
    if not np.isfinite(crit).any():
        raise NoiseUnderflowError("no admissible cutoff in the grid")
    best = int(np.argmin(crit))
    est = coefficients(z, ells[best], noise, M)
    return ProjectionEstimate(est.ell, est.coeffs, est.n, M, noise, est.contrast, float(pens[best]), ells.size)


def evaluate(estimate: ProjectionEstimate, xs) -> np.ndarray:
    """``sum_j a_j sqrt(ell/pi) sinc(ell x/pi - j)`` (real part) at the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    scale = estimate.ell / np.pi
    j = coefficient_indices(estimate.M)
    a = np.asarray(estimate.coeffs)
    flat = xs.ravel()
    out = np.empty(flat.size)
    step = 2048
    for s in range(0, flat.size, step):
        basis = np.sinc(np.subtract.outer(scale * flat[s:s + step], j))
        if __debug__ and np.iscomplexobj(a):
            residue = np.max(np.abs(basis @ a.imag), initial=0.0) * np.sqrt(scale)
            assert residue < 1e-8 * max(1.0, float(np.max(np.abs(a)))), f"imaginary residue {residue:.3g}"
        out[s:s + step] = np.sqrt(scale) * (basis @ a.real)
    return out.reshape(xs.shape)
