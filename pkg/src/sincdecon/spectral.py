"""Discrete Fourier machinery.

The inverse transform follows the Matlab ``ifft`` convention,

    Y[j] = (1/N) * sum_k X[k] * exp(2i*pi*j*k/N),

including the ``1/N`` factor, and is computed with an iterative radix-2
(Cooley-Tukey, decimation in time) algorithm.  Only power-of-two lengths
are supported.
"""
from __future__ import annotations

import numpy as np

__all__ = ["ifft", "fft", "riemann_nodes", "riemann_fourier", "check_pow2"]


def check_pow2(n: int) -> int:
    """Return ``M`` such that ``n == 2**M``; raise ``ValueError`` otherwise."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def _bit_reverse_permutation(n: int) -> np.ndarray:
    bits = check_pow2(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _radix2(x: np.ndarray, sign: int) -> np.ndarray:
    # unscaled transform sum_k x[k] exp(sign*2i*pi*j*k/N) along the last axis
    n = x.shape[-1]
    out = np.array(x, dtype=np.complex128, copy=True)[..., _bit_reverse_permutation(n)]
    half = 1
    while half < n:
        span = 2 * half
        tw = np.exp(sign * 1j * np.pi * np.arange(half) / half)
        blocks = out.reshape(out.shape[:-1] + (n // span, span))
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * tw
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        half = span
    return out


def ifft(x) -> np.ndarray:
    """Inverse DFT with the ``1/N`` factor, ``Y[j] = mean_k X[k] e^{2i pi jk/N}``.

    Works along the last axis; the input is never modified.
    """
    x = np.asarray(x)
    n = x.shape[-1]
    check_pow2(n)
    return _radix2(x, +1) / n


def fft(x) -> np.ndarray:
    """Forward DFT ``sum_k X[k] e^{-2i pi jk/N}``; ``fft(ifft(x)) == x``."""
    x = np.asarray(x)
    check_pow2(x.shape[-1])
    return _radix2(x, -1)


def riemann_nodes(n: int) -> np.ndarray:
    """Riemann nodes ``(-1 + 2k)/N``, ``k = 0..N-1``, reduced into ``(-1, 1)``.

    Nodes beyond 1 are shifted by -2; the kernels ``e^{i pi j x}`` are
    2-periodic for integer ``j``, so the sums below are unchanged while the
    integrand is only ever sampled on ``[-1, 1]``.  The resulting set is the
    symmetric midpoint rule with spacing ``2/N``.
    """
    check_pow2(n)
    x = (2.0 * np.arange(n) - 1.0) / n
    x[x > 1.0] -= 2.0
    return x


def riemann_fourier(u, j=None) -> np.ndarray:
    """Riemann sums of ``(1/2) * int_{-1}^{1} e^{i pi j x} u(x) dx``.

    ``u`` holds the integrand sampled on :func:`riemann_nodes`.  Entry ``j``
    is

        (1/N) * sum_k exp(i*j*(-pi + 2*k*pi)/N) * u[k],

    obtained from one :func:`ifft` and the phase ``exp(-i*j*pi/N)``.  By
    default ``j = 0..N-1``; any integer (signed) indices may be requested.
    """
    u = np.asarray(u)
    n = u.shape[-1]
    j = np.arange(n) if j is None else np.asarray(j, dtype=np.int64)
    return np.exp(-1j * np.pi * j / n) * ifft(u)[..., j % n]
