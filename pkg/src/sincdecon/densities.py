"""Catalog of the sixteen test densities (a)-(p).

Each entry bundles a sampler, the characteristic function ``g^*(x) = E e^{ixX}``,
the pdf when it has a closed form, the tail energy
``int_{|x|>=ell} |g^*(x)|^2 dx`` and the interval used for the
interval-discretized ISE.  Scale normalizations are applied consistently to
all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special, stats

__all__ = ["TestDensity", "CATALOG", "get_density", "density_ids", "UnsupportedOperation"]

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
SQ6 = math.sqrt(6.0)
GAMMA_SCALE = math.sqrt(8.0 / 9.0)
MIXGAMMA_SCALE = math.sqrt(5.48)


class UnsupportedOperation(NotImplementedError):
    pass


@dataclass(frozen=True)
class TestDensity:
    """One test law; use :func:`get_density` rather than building these directly."""

    id: str
    key: str
    name: str
    interval: tuple
    has_pdf: bool
    has_finite_variance: bool
    normalized_unit_variance: bool
    _sampler: Callable
    _cf: Callable
    _pdf: Optional[Callable]
    _tail: Callable
    p_param: Optional[float] = None
    stable_index: Optional[float] = None

    __test__ = False  # not a pytest class

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return np.asarray(self._sampler(n, rng), dtype=float)

    def cf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self._cf(x), dtype=complex)
        return out if out.ndim else complex(out)

    def pdf(self, x):
        if self._pdf is None:
            raise UnsupportedOperation(f"no closed-form pdf for {self.name}")
        x = np.asarray(x, dtype=float)
        out = np.asarray(self._pdf(x), dtype=float)
        return out if out.ndim else float(out)

    def tail_energy(self, ell):
        """``int_{|x| >= ell} |g^*(x)|^2 dx``; ``2*pi*||g||^2`` at ``ell = 0``."""
        ell = np.asarray(ell, dtype=float)
        if np.any(ell < 0):
            raise ValueError("ell must be >= 0")
        out = np.vectorize(self._tail, otypes=[float])(ell)
        return out if out.ndim else float(out)

    def energy(self) -> float:
        """``||g||^2``."""
        return self.tail_energy(0.0) / (2 * math.pi)


# ----------------------------------------------------------------- samplers

def _fejer_sample(p: float):
    def draw(n, rng):
        # g_1(y) = (1 - cos y)/(pi y^2) <= min(1/(2 pi), 2/(pi y^2)); both envelope parts weigh 1/2
        out = np.empty(0)
        while out.size < n:
            m = int(1.35 * (n - out.size)) + 16
            tail = rng.random(m) < 0.5
            u = rng.random(m)
            mag = np.where(tail, 2.0 / np.maximum(u, 1e-300), 2.0 * u)
            y = np.where(rng.random(m) < 0.5, -mag, mag)
            env = np.where(np.abs(y) <= 2.0, 1.0 / (2 * math.pi), 2.0 / (math.pi * y * y))
            acc = rng.random(m) * env <= _fejer1_pdf(y)
            out = np.concatenate([out, y[acc]])
        return out[:n] / p
    return draw


def _stable_sample(r: float):
    def draw(n, rng):
        # Chambers-Mallows-Stuck, symmetric, cf exp(-|x|^r)
        v = rng.uniform(-math.pi / 2, math.pi / 2, n)
        w = rng.exponential(1.0, n)
        if r == 1.0:
            return np.tan(v)
        return (np.sin(r * v) / np.cos(v) ** (1.0 / r)) * (np.cos((1.0 - r) * v) / w) ** ((1.0 - r) / r)
    return draw


def _mixgamma_sample(n, rng):
    first = rng.random(n) < 0.4
    w = np.where(first, rng.gamma(5.0, 1.0, n), rng.gamma(13.0, 1.0, n))
    return w / MIXGAMMA_SCALE


def _mixgauss_sample(n, rng):
    first = rng.random(n) < 0.5
    v = np.where(first, -3.0, 2.0) + rng.standard_normal(n)
    return SQ2 * v


# ------------------------------------------------------------------- pdfs

def _fejer1_pdf(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-4
    ys = np.where(small, 1.0, y)
    val = 2.0 * np.sin(ys / 2) ** 2 / (math.pi * ys * ys)
    return np.where(small, (1.0 - y * y / 12.0) / (2 * math.pi), val)


def _fejer_pdf(p):
    return lambda x: p * _fejer1_pdf(p * x)


# ------------------------------------------------------------- tail energies

def _tail_sinc(a):
    # |sin(a x)/(a x)|^2 ; int_A^inf sin^2 u/u^2 du = sin^2 A/A + pi/2 - Si(2A)
    def tail(ell):
        big_a = a * ell
        if big_a == 0:
            return math.pi / a
        si, _ = special.sici(2 * big_a)
        return 2.0 / a * (math.sin(big_a) ** 2 / big_a + math.pi / 2 - si)
    return tail


def _tail_rational2(c):
    # |cf|^2 = (1 + (x/c)^2)^-2 ; int_{v0}^inf (1+v^2)^-2 dv = (atan(1/v0) - v0/(1+v0^2))/2
    def tail(ell):
        v0 = ell / c
        return c * (math.atan2(1.0, v0) - v0 / (1.0 + v0 * v0))
    return tail


def _tail_stable(r):
    a = 1.0 / r
    return lambda ell: 2.0 * a * 2.0 ** (-a) * special.gamma(a) * special.gammaincc(a, 2.0 * ell ** r)


def _tail_mixgauss(ell):
    # |cf(x)|^2 = (1 + cos(w x)) e^{-2x^2} / 2 with w = 5 sqrt 2; the cosine part
    # is Re of a shifted Gaussian integral, written with the Faddeeva function
    # so that both terms carry the common factor e^{-2 ell^2}
    w = 5.0 * SQ2
    z = SQ2 * ell - 1j * w / (2.0 * SQ2)
    cos_part = (np.exp(complex(-2.0 * ell * ell, w * ell)) * special.wofz(1j * z)).real
    return max(0.0, math.sqrt(math.pi / 8.0) * (special.erfc(SQ2 * ell) + cos_part))


def _tail_mixgamma(ell):
    def sq(x):
        return abs(0.4 * (1 - 1j * x / MIXGAMMA_SCALE) ** -5 + 0.6 * (1 - 1j * x / MIXGAMMA_SCALE) ** -13) ** 2
    val, _ = integrate.quad(sq, ell, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400)
    return 2.0 * val


def _tail_fejer(p):
    return lambda ell: 0.0 if ell >= p else (2.0 * p / 3.0) * (1.0 - ell / p) ** 3


# ---------------------------------------------------------------- catalog

def _build():
    cat = {}

    def add(d):
        cat[d.id] = d

    add(TestDensity(
        "a", "uniform", "Uniform", (-5.0, 5.0), True, True, True,
        lambda n, rng: rng.uniform(-SQ3, SQ3, n),
        lambda x: np.sinc(SQ3 * x / math.pi),
        lambda x: np.where(np.abs(x) <= SQ3, 1.0 / (2 * SQ3), 0.0),
        _tail_sinc(SQ3),
    ))
    add(TestDensity(
        "b", "exponential", "Exponential", (-5.0, 10.0), True, True, True,
        lambda n, rng: rng.exponential(1.0, n),
        lambda x: 1.0 / (1.0 - 1j * x),
        lambda x: np.where(x >= 0, np.exp(-np.abs(x)), 0.0),
        lambda ell: 2.0 * math.atan2(1.0, ell),
    ))
    add(TestDensity(
        "c", "chi2", "Chi2(3)", (-1.0, 16.0), True, True, True,
        lambda n, rng: rng.chisquare(3.0, n) / SQ6,
        lambda x: (1.0 - 2j * x / SQ6) ** -1.5,
        lambda x: SQ6 * stats.chi2.pdf(SQ6 * x, 3),
        lambda ell: SQ6 * (1.0 - (2 * ell / SQ6) / math.sqrt(1.0 + (2 * ell / SQ6) ** 2)),
    ))
    add(TestDensity(
        "d", "laplace", "Laplace", (-5.0, 5.0), True, True, True,
        lambda n, rng: rng.laplace(0.0, 1.0 / SQ2, n),
        lambda x: 1.0 / (1.0 + 0.5 * x * x),
        lambda x: np.exp(-SQ2 * np.abs(x)) / SQ2,
        _tail_rational2(SQ2),
    ))
    add(TestDensity(
        "e", "gamma", "Gamma(2,3/2)", (-5.0, 25.0), True, True, True,
        lambda n, rng: rng.gamma(2.0, 2.0 / 3.0, n) / GAMMA_SCALE,
        lambda x: -9.0 / (4 * (x / GAMMA_SCALE) ** 2 + 12j * (x / GAMMA_SCALE) - 9.0),
        lambda x: GAMMA_SCALE * stats.gamma.pdf(GAMMA_SCALE * x, 2.0, scale=2.0 / 3.0),
        _tail_rational2(1.5 * GAMMA_SCALE),
    ))
    add(TestDensity(
        "f", "mixgamma", "Mixed Gamma", (-1.5, 26.0), True, True, False,
        _mixgamma_sample,
        lambda x: 0.4 * (1 - 1j * x / MIXGAMMA_SCALE) ** -5 + 0.6 * (1 - 1j * x / MIXGAMMA_SCALE) ** -13,
        lambda x: MIXGAMMA_SCALE * (0.4 * stats.gamma.pdf(MIXGAMMA_SCALE * x, 5.0)
                                    + 0.6 * stats.gamma.pdf(MIXGAMMA_SCALE * x, 13.0)),
        _tail_mixgamma,
    ))
    for did, r, label in (("g", 0.25, "stable14"), ("h", 0.5, "stable12"), ("i", 0.75, "stable34")):
        add(TestDensity(
            did, label, f"Stable {r:g}", (-10.0, 10.0), False, False, False,
            _stable_sample(r),
            (lambda rr: lambda x: np.exp(-np.abs(x) ** rr))(r),
            None,
            _tail_stable(r),
            stable_index=r,
        ))
    add(TestDensity(
        "j", "cauchy", "Cauchy", (-10.0, 10.0), True, False, False,
        lambda n, rng: rng.standard_cauchy(n),
        lambda x: np.exp(-np.abs(x)),
        lambda x: 1.0 / (math.pi * (1.0 + x * x)),
        lambda ell: math.exp(-2.0 * ell),
    ))
    add(TestDensity(
        "k", "gauss", "Gaussian", (-4.0, 4.0), True, True, True,
        lambda n, rng: rng.standard_normal(n),
        lambda x: np.exp(-0.5 * x * x),
        lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
        lambda ell: math.sqrt(math.pi) * special.erfc(ell),
    ))
    add(TestDensity(
        "l", "mixgauss", "Mixed Gaussian", (-8.0, 7.0), True, True, False,
        _mixgauss_sample,
        lambda x: 0.5 * (np.exp(-3j * SQ2 * x) + np.exp(2j * SQ2 * x)) * np.exp(-x * x),
        lambda x: (stats.norm.pdf(x / SQ2, -3.0) + stats.norm.pdf(x / SQ2, 2.0)) / (2 * SQ2),
        _tail_mixgauss,
    ))
    for did, p in (("m", 1.0), ("n", 5.0), ("o", 10.0), ("p", 13.0)):
        add(TestDensity(
            did, f"fejer{p:g}", f"Fejer {p:g}", (-10.0, 10.0), True, False, False,
            _fejer_sample(p),
            (lambda pp: lambda x: np.maximum(1.0 - np.abs(x) / pp, 0.0))(p),
            _fejer_pdf(p),
            _tail_fejer(p),
            p_param=p,
        ))
    return cat


CATALOG = _build()
_BY_KEY = {d.key: d for d in CATALOG.values()}


def density_ids():
    return list(CATALOG)


def get_density(name) -> TestDensity:
    """Look up by letter id (``"k"``) or key (``"gauss"``, ``"fejer5"``, ``"stable12"``)."""
    if isinstance(name, TestDensity):
        return name
    key = str(name).strip().lower()
    if key in CATALOG:
        return CATALOG[key]
    if key in _BY_KEY:
        return _BY_KEY[key]
    raise KeyError(f"unknown density {name!r}; known: {', '.join(sorted(_BY_KEY))}")
