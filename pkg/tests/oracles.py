"""Independent reference computations shared by the tests."""
import math

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-12, depth=60):
    """Recursive adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def direct_coefficients(sample, ell, noise_cf_scaled, M):
    """Coefficients by the O(N^2) double loop over nodes, indices and sample."""
    n_nodes = 2 ** M
    x = -1.0 + (2.0 * np.arange(n_nodes) + 1.0) / n_nodes  # midpoints of [-1, 1]
    z = np.asarray(sample, dtype=float)
    psi = np.array([np.mean(np.exp(1j * ell * xk * z)) for xk in x])
    h = psi / noise_cf_scaled(ell * x)
    j = np.arange(-n_nodes // 2, n_nodes // 2)
    out = np.empty(j.size, dtype=complex)
    for i, jj in enumerate(j):
        out[i] = np.sum(np.exp(-1j * math.pi * jj * x) * h) / n_nodes
    return math.sqrt(ell / math.pi) * out
