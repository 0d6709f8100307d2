"""Monte-Carlo harness for the simulation program.

Every replication draws its signal and its noise from two independent
streams derived from ``(master_seed, cell, rep)``, so a table does not
depend on the number of worker processes, and ratio studies compare the
numerator and denominator procedures on the very same data.
"""
from __future__ import annotations

import csv
import enum
import io
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter

from .densities import get_density
from .estimator import select
from .noise import NoiseKind, NoiseModel, sample_noise
from .penalty import S2N_FLOOR, ConfigurationError, PenaltyFamily, PenaltySpec
from .risk import MiseSummary, RiskMethod, aggregate, ise_exact, ise_interval, score

__all__ = [
    "Mode",
    "DependenceKind",
    "ExperimentConfig",
    "MiseTable",
    "RatioTable",
    "RatioCell",
    "gen_dependent",
    "estimate_s2n",
    "replication_rngs",
    "run",
    "run_basic",
    "run_s2n_estimated",
    "run_dependent",
    "run_misspecified",
    "run_ignore_noise",
    "run_e1_vs_e2",
]

BURN_IN = 1000
IGNORED_NOISE_S2N = 10000.0
RATIO_FLOOR = 1e-12


class Mode(str, enum.Enum):
    BASIC = "basic"
    S2N_ESTIMATED = "s2n_estimated"
    DEPENDENT = "dependent"
    MISSPECIFIED = "misspecified"
    IGNORE_NOISE = "ignore_noise"
    E1_VS_E2 = "e1_vs_e2"


class DependenceKind(str, enum.Enum):
    GAUSS_AR = "gauss_ar"
    MIXED_GAUSS_AR = "mixed_gauss_ar"
    NONMIXING_UNIFORM = "nonmixing_uniform"


# the dependent generator whose stationary law is the catalog entry
_DEPENDENT_FOR = {
    "gauss": DependenceKind.GAUSS_AR,
    "mixgauss": DependenceKind.MIXED_GAUSS_AR,
    "uniform": DependenceKind.NONMIXING_UNIFORM,
}
_E1E2_DENSITIES = {"exponential", "chi2", "laplace", "cauchy"}


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation program; cells are the product of the four lists."""

    density_ids: Tuple[str, ...] = ("gauss",)
    noise_kinds: Tuple[str, ...] = ("laplace", "gauss")
    n_values: Tuple[int, ...] = (100, 250, 500, 1000, 2500)
    s2n_values: Tuple[float, ...] = (2, 4, 10, 100, 1000)
    reps: int = 1000
    M: int = 8
    delta_grid: float = 0.1
    master_seed: int = 0
    mode: Mode = Mode.BASIC
    dependence_a: Optional[float] = None
    ise_method: Optional[RiskMethod] = None
    old_penalty: bool = False
    estimator_noise: Optional[str] = None
    threads: int = 1

    def __post_init__(self):
        def norm(name, conv):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, name, tuple(conv(v) for v in value))

        norm("density_ids", lambda v: get_density(v).key)
        norm("noise_kinds", lambda v: NoiseKind.parse(v).value)
        norm("n_values", int)
        norm("s2n_values", float)
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.ise_method is not None:
            object.__setattr__(self, "ise_method", RiskMethod.parse(self.ise_method))
        if self.estimator_noise is not None:
            object.__setattr__(self, "estimator_noise", NoiseKind.parse(self.estimator_noise).value)
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1")
        if self.M < 3:
            raise ConfigurationError("M must be >= 3")
        if min(self.n_values, default=2) < 2:
            raise ConfigurationError("sample sizes must be >= 2")
        if min(self.s2n_values, default=1) <= 0:
            raise ConfigurationError("s2n values must be positive")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        if not (self.density_ids and self.noise_kinds and self.n_values and self.s2n_values):
            raise ConfigurationError("every cell list must be nonempty")
        if self.mode is Mode.DEPENDENT:
            a = self.dependence_a
            if a is None or not 0 < a < 1:
                raise ConfigurationError("dependent mode needs dependence_a in (0, 1)")
            for d in self.density_ids:
                if d not in _DEPENDENT_FOR:
                    raise ConfigurationError(f"no dependent generator for density {d!r}")
        if self.mode is Mode.E1_VS_E2:
            for d in self.density_ids:
                if d not in _E1E2_DENSITIES:
                    raise ConfigurationError(f"E1/E2 comparison not available for {d!r}")

    def cells(self):
        for d in self.density_ids:
            for k in self.noise_kinds:
                for n in self.n_values:
                    for s in self.s2n_values:
                        yield (d, k, n, s)

    def metadata(self) -> Dict[str, str]:
        out = {}
        for key, value in asdict(self).items():
            if key == "threads":
                continue
            if isinstance(value, enum.Enum):
                value = value.value
            elif isinstance(value, tuple):
                value = " ".join(_fmt(v) for v in value)
            out[key] = "" if value is None else _fmt(value)
        return out


def _fmt(v) -> str:
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, float):
        return repr(v)
    return str(v)


# -------------------------------------------------------------------- tables

@dataclass
class MiseTable:
    cells: Dict[tuple, MiseSummary] = field(default_factory=dict)
    metadata: Dict[str, str] = field(default_factory=dict)

    HEADER = ("density", "noise", "n", "s2n", "mean", "median", "sd", "reps")

    def rows(self):
        for (d, k, n, s), v in self.cells.items():
            yield (d, k, n, _fmt(float(s)), repr(v.mean), repr(v.median), repr(v.sd), v.count)

    def to_csv(self, path=None) -> str:
        return _write_csv(self.HEADER, self.rows(), path)


@dataclass(frozen=True)
class RatioCell:
    ratio: float
    num: MiseSummary
    den: MiseSummary


@dataclass
class RatioTable:
    cells: Dict[tuple, RatioCell] = field(default_factory=dict)
    metadata: Dict[str, str] = field(default_factory=dict)

    HEADER = ("density", "noise", "n", "s2n", "ratio", "num_mean", "den_mean",
              "num_median", "den_median", "reps")

    def rows(self):
        for (d, k, n, s), c in self.cells.items():
            yield (d, k, n, _fmt(float(s)), repr(c.ratio), repr(c.num.mean), repr(c.den.mean),
                   repr(c.num.median), repr(c.den.median), c.num.count)

    def to_csv(self, path=None) -> str:
        return _write_csv(self.HEADER, self.rows(), path)


def _write_csv(header, rows, path) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# ------------------------------------------------------------------ sampling

def replication_rngs(master_seed: int, cell_id: str, rep: int):
    """Independent generators for the signal and the noise of one replication."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(zlib.crc32(cell_id.encode()), rep))
    x_ss, e_ss = ss.spawn(2)
    return np.random.default_rng(x_ss), np.random.default_rng(e_ss)


def gen_dependent(kind, a: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stationary dependent sequences whose marginal is a catalog law.

    ``gauss_ar``: ``Y_{k+1} = a Y_k + eta``, ``Var eta = 1 - a^2`` (marginal N(0,1)).
    ``mixed_gauss_ar``: two such chains centred at -3 and 2, one fair coin per
    index choosing between them, scaled by ``sqrt 2`` as the mixed Gaussian entry.
    ``nonmixing_uniform``: ``U_{i+1} = U_i/2 + eta``, ``eta`` Bernoulli(1/2),
    returned as ``sqrt3 (U - 1)`` (marginal uniform on ``[-sqrt3, sqrt3]``).
    """
    kind = DependenceKind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    total = n + BURN_IN
    if kind is DependenceKind.NONMIXING_UNIFORM:
        # uniform on [0, 2] is the stationary law of U/2 + Bernoulli(1/2)
        eta = (rng.random(total) < 0.5).astype(float)
        u0 = rng.uniform(0.0, 2.0)
        u, _ = lfilter([1.0], [1.0, -0.5], eta, zi=[0.5 * u0])
        return math.sqrt(3.0) * (u[BURN_IN:] - 1.0)
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    sd = math.sqrt(1.0 - a * a)

    def chain(b):
        # started from the stationary law N(b/(1-a), 1)
        y0 = b / (1.0 - a) + rng.standard_normal()
        y, _ = lfilter([1.0], [1.0, -a], b + sd * rng.standard_normal(total), zi=[a * y0])
        return y[BURN_IN:]

    if kind is DependenceKind.GAUSS_AR:
        return chain(0.0)
    y1 = chain(-3.0 * (1.0 - a))
    y2 = chain(2.0 * (1.0 - a))
    coin = rng.random(n) < 0.5
    return math.sqrt(2.0) * np.where(coin, y1, y2)


def estimate_s2n(z, sigma: float) -> float:
    """``max(Var(Z)/sigma^2 - 1, 1/0.6)``; infinite when ``sigma == 0``."""
    if sigma == 0:
        return math.inf
    return max(float(np.var(z, ddof=1)) / sigma ** 2 - 1.0, S2N_FLOOR)


# --------------------------------------------------------------- replication

def _other_kind(kind: NoiseKind) -> NoiseKind:
    return NoiseKind.GAUSSIAN if kind is NoiseKind.LAPLACE else NoiseKind.LAPLACE


def _pen_spec(kind: NoiseKind, n: int, s2n: float, sigma: float, cfg: ExperimentConfig) -> PenaltySpec:
    return PenaltySpec(PenaltyFamily.for_noise(kind, cfg.old_penalty), n, s2n, sigma, delta_grid=cfg.delta_grid)


def _score(est, d, cfg: ExperimentConfig) -> float:
    return score(est, d, cfg.ise_method).ise


def _cell_id(cell) -> str:
    d, k, n, s = cell
    return f"{d}|{k}|{n}|{float(s)!r}"


def _replicate(args) -> Tuple[float, ...]:
    cfg, cell, rep = args
    d_key, kind, n, s2n = cell
    d = get_density(d_key)
    noise = NoiseModel.from_s2n(kind, s2n)
    spec = _pen_spec(noise.kind, n, s2n, noise.sigma, cfg)
    cid = _cell_id(cell)

    def observe(x=None):
        x_rng, e_rng = replication_rngs(cfg.master_seed, cid, rep)
        if x is None:
            x = d.sample(n, x_rng)
        return x + noise.sigma * sample_noise(noise, n, e_rng)

    def fit(z, model=noise, pspec=spec):
        return select(z, model, pspec, cfg.M)

    mode = cfg.mode
    if mode is Mode.BASIC:
        return (_score(fit(observe()), d, cfg),)
    if mode is Mode.E1_VS_E2:
        est = fit(observe())
        return (ise_exact(est, d).ise, ise_interval(est, d).ise)
    if mode is Mode.S2N_ESTIMATED:
        z = observe()
        s_hat = estimate_s2n(z, noise.sigma)
        num = fit(z, pspec=spec.with_(s2n=s_hat))
        return (_score(num, d, cfg), _score(fit(z), d, cfg))
    if mode is Mode.DEPENDENT:
        x_rng, _ = replication_rngs(cfg.master_seed, cid, rep)
        x = gen_dependent(_DEPENDENT_FOR[d.key], cfg.dependence_a, n, x_rng)
        return (_score(fit(observe(x)), d, cfg), _score(fit(observe()), d, cfg))
    if mode is Mode.MISSPECIFIED:
        z = observe()
        wrong_kind = NoiseKind.parse(cfg.estimator_noise) if cfg.estimator_noise else _other_kind(noise.kind)
        wrong = NoiseModel(wrong_kind, noise.sigma)
        num = fit(z, wrong, _pen_spec(wrong.kind, n, s2n, noise.sigma, cfg))
        return (_score(num, d, cfg), _score(fit(z), d, cfg))
    if mode is Mode.IGNORE_NOISE:
        z = observe()
        blind = NoiseModel(noise.kind, 0.0)
        num = fit(z, blind, _pen_spec(noise.kind, n, IGNORED_NOISE_S2N, 0.0, cfg))
        return (_score(num, d, cfg), _score(fit(z), d, cfg))
    raise ConfigurationError(f"unknown mode {mode}")


def _run_cells(cfg: ExperimentConfig) -> Dict[tuple, np.ndarray]:
    cells = list(cfg.cells())
    tasks = [(cfg, cell, rep) for cell in cells for rep in range(cfg.reps)]
    if cfg.threads == 1 or len(tasks) == 1:
        results = [_replicate(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * cfg.threads))
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_replicate, tasks, chunksize=chunk))
    # map() keeps task order, so each block is ordered by rep index
    out = {}
    for i, cell in enumerate(cells):
        out[cell] = np.asarray(results[i * cfg.reps:(i + 1) * cfg.reps], dtype=float)
    return out


def _mise_table(cfg, raw) -> MiseTable:
    table = MiseTable(metadata=cfg.metadata())
    for cell, vals in raw.items():
        table.cells[cell] = aggregate(vals[:, 0])
    return table


def _ratio_table(cfg, raw) -> RatioTable:
    table = RatioTable(metadata=cfg.metadata())
    for cell, vals in raw.items():
        num, den = aggregate(vals[:, 0]), aggregate(vals[:, 1])
        if num.mean < RATIO_FLOOR and den.mean < RATIO_FLOOR:
            ratio = math.nan
        else:
            ratio = num.mean / den.mean
        table.cells[cell] = RatioCell(ratio, num, den)
    return table


def _require(cfg: ExperimentConfig, mode: Mode) -> None:
    if cfg.mode is not mode:
        raise ConfigurationError(f"configuration has mode {cfg.mode.value}, expected {mode.value}")


def run_basic(cfg: ExperimentConfig) -> MiseTable:
    """MISE per cell (E1 where a pdf exists, E2 otherwise, unless overridden)."""
    _require(cfg, Mode.BASIC)
    return _mise_table(cfg, _run_cells(cfg))


def run_s2n_estimated(cfg: ExperimentConfig) -> RatioTable:
    """MISE with the penalty using the empirical s2n over MISE with the true one."""
    _require(cfg, Mode.S2N_ESTIMATED)
    return _ratio_table(cfg, _run_cells(cfg))


def run_dependent(cfg: ExperimentConfig) -> RatioTable:
    """MISE on dependent samples over MISE on i.i.d. samples."""
    _require(cfg, Mode.DEPENDENT)
    return _ratio_table(cfg, _run_cells(cfg))


def run_misspecified(cfg: ExperimentConfig) -> RatioTable:
    """Estimator built for the wrong error law over the correct one (same sigma)."""
    _require(cfg, Mode.MISSPECIFIED)
    return _ratio_table(cfg, _run_cells(cfg))


def run_ignore_noise(cfg: ExperimentConfig) -> RatioTable:
    """Estimator that ignores the noise (and uses s2n = 10000 in the penalty) over the correct one."""
    _require(cfg, Mode.IGNORE_NOISE)
    return _ratio_table(cfg, _run_cells(cfg))


def run_e1_vs_e2(cfg: ExperimentConfig) -> RatioTable:
    """Whole-line ISE over interval ISE of the same estimates."""
    _require(cfg, Mode.E1_VS_E2)
    return _ratio_table(cfg, _run_cells(cfg))


_RUNNERS = {
    Mode.BASIC: run_basic,
    Mode.S2N_ESTIMATED: run_s2n_estimated,
    Mode.DEPENDENT: run_dependent,
    Mode.MISSPECIFIED: run_misspecified,
    Mode.IGNORE_NOISE: run_ignore_noise,
    Mode.E1_VS_E2: run_e1_vs_e2,
}


def run(cfg: ExperimentConfig):
    """Dispatch on ``cfg.mode``."""
    return _RUNNERS[cfg.mode](cfg)
