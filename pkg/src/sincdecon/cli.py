"""Command-line front end: ``sincdecon {estimate,simulate,rates,penalty}``."""
from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .densities import get_density
from .estimator import select
from .experiments import ExperimentConfig, Mode, estimate_s2n, run
from .noise import NoiseKind, NoiseModel
from .penalty import ConfigurationError, PenaltyFamily, PenaltySpec, cutoff_grid, penalty
from .rates import abacus, rate_spec

__all__ = ["main", "build_parser", "read_sample", "load_simulation_config"]

MANIFEST = "manifest.json"

# config key -> (ExperimentConfig field, converter)
_LIST = lambda conv: (lambda text: tuple(conv(t) for t in text.replace(",", " ").split()))  # noqa: E731
_BOOL = lambda text: configparser.ConfigParser.BOOLEAN_STATES[text.strip().lower()]  # noqa: E731
_CONFIG_KEYS = {
    "densities": ("density_ids", _LIST(str)),
    "noises": ("noise_kinds", _LIST(str)),
    "n": ("n_values", _LIST(int)),
    "s2n": ("s2n_values", _LIST(float)),
    "reps": ("reps", int),
    "m": ("M", int),
    "delta": ("delta_grid", float),
    "seed": ("master_seed", int),
    "mode": ("mode", str),
    "a": ("dependence_a", float),
    "ise": ("ise_method", str),
    "old_penalty": ("old_penalty", _BOOL),
    "estimator_noise": ("estimator_noise", str),
}


class CLIError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def read_sample(path) -> np.ndarray:
    """One decimal per line; blank lines are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from None
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise CLIError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not math.isfinite(v):
            raise CLIError(f"{path}:{lineno}: not a finite number: {text!r}")
        values.append(v)
    if len(values) < 2:
        raise CLIError("need at least 2 observations")
    return np.asarray(values)


def load_simulation_config(path) -> List[tuple]:
    """``[(name, ExperimentConfig), ...]`` from an INI file, one per section.

    Keys of a ``[defaults]`` section apply to every other section.  Unknown
    keys are errors.
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="defaults")
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from None
    except configparser.Error as exc:
        raise CLIError(f"{path}: {exc}") from None
    out = []
    for key in parser.defaults():
        if key not in _CONFIG_KEYS:
            raise CLIError(f"{path}: unknown key {key!r} in [defaults]")
    if not parser.sections():
        raise CLIError(f"{path}: no experiment sections")
    for name in parser.sections():
        kw = {}
        for key, text in parser.items(name):
            if key not in _CONFIG_KEYS:
                raise CLIError(f"{path}: unknown key {key!r} in [{name}]")
            field, conv = _CONFIG_KEYS[key]
            try:
                kw[field] = conv(text)
            except (ValueError, KeyError):
                raise CLIError(f"{path}: bad value for {key!r} in [{name}]: {text!r}") from None
        out.append((name, kw))
    return out


def _write_manifest(out_dir: Path, command: str, argv, outputs, seed=None, config=None, extra=None) -> None:
    manifest = {
        "command": command,
        "argv": list(argv),
        "config": None if config is None else str(config),
        "seed": seed,
        "output_dir": str(out_dir),
        "outputs": sorted(outputs),
        "version": __version__,
        "numpy": np.__version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        manifest.update(extra)
    with open(out_dir / MANIFEST, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out_dir: Optional[Path], name: str, outputs: list) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        with open(out_dir / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        outputs.append(name)


def _out_dir(arg) -> Optional[Path]:
    if arg is None:
        return None
    p = Path(arg)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _sigma_s2n(args, kind: NoiseKind):
    """Resolve ``(sigma, s2n)``; s2n is ``None`` when it must be estimated."""
    if kind is NoiseKind.NONE:
        return 0.0, math.inf
    if args.sigma is not None and args.s2n is not None:
        raise CLIError("give either --sigma or --s2n, not both")
    if args.s2n is not None:
        if args.s2n <= 0:
            raise CLIError("--s2n must be positive")
        return 1.0 / math.sqrt(args.s2n), args.s2n
    if args.sigma is not None:
        if args.sigma < 0:
            raise CLIError("--sigma must be >= 0")
        return args.sigma, None
    raise CLIError("--sigma or --s2n is required unless --noise none")


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise CLIError(f"expected a list of numbers, got {text!r}") from None


# ----------------------------------------------------------------- commands

def cmd_estimate(args) -> int:
    z = read_sample(args.sample)
    kind = NoiseKind.parse(args.noise)
    sigma, s2n = _sigma_s2n(args, kind)
    if s2n is None:
        s2n = estimate_s2n(z, sigma)
    noise = NoiseModel(kind, sigma)
    spec = PenaltySpec(PenaltyFamily.for_noise(kind), z.size, s2n, noise.sigma, delta_grid=args.delta)
    est = select(z, noise, spec, args.M)
    if args.grid:
        lo, hi, count = _floats(args.grid)
        xs = np.linspace(lo, hi, int(count))
    else:
        pad = 0.1 * (z.max() - z.min())
        xs = np.linspace(z.min() - pad, z.max() + pad, args.points)
    g_hat = est(xs)
    out_dir = _out_dir(args.out)
    outputs: list = []
    text = _csv_text(("x", "g_hat"), ((repr(float(x)), repr(float(g))) for x, g in zip(xs, g_hat)))
    _emit(text, out_dir, "estimate.csv", outputs)
    summary = (f"ell={est.ell!r} contrast={est.contrast!r} pen={est.pen!r} n={est.n} "
               f"noise={kind.value} sigma={noise.sigma!r} s2n={s2n!r}")
    print(summary, file=sys.stderr if out_dir is None else sys.stdout)
    if out_dir is not None:
        with open(out_dir / "summary.txt", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(summary + "\n")
        outputs.append("summary.txt")
        _write_manifest(out_dir, "estimate", args.argv, outputs, config=args.sample)
    return 0


def cmd_simulate(args) -> int:
    sections = load_simulation_config(args.config)
    out_dir = _out_dir(args.out) or Path(".")
    threads = args.threads or os.cpu_count() or 1
    outputs = []
    for name, kw in sections:
        if args.seed is not None:
            kw["master_seed"] = args.seed
        if args.reps is not None:
            kw["reps"] = args.reps
        if args.ise is not None:
            kw["ise_method"] = args.ise
        if args.M is not None:
            kw["M"] = args.M
        if args.delta is not None:
            kw["delta_grid"] = args.delta
        kw["threads"] = threads
        try:
            cfg = ExperimentConfig(**kw)
        except (ValueError, KeyError) as exc:
            raise CLIError(f"[{name}]: {exc}") from None
        table = run(cfg)
        fname = f"{name}.csv"
        table.to_csv(out_dir / fname)
        outputs.append(fname)
        print(f"{name}: {len(table.cells)} cells -> {out_dir / fname}")
    _write_manifest(out_dir, "simulate", args.argv, outputs, seed=args.seed, config=args.config,
                    extra={"threads": threads})
    return 0


def cmd_rates(args) -> int:
    kind = NoiseKind.parse(args.noise)
    sigma = None
    if kind is not NoiseKind.NONE:
        if args.sigma is not None and args.s2n is not None:
            raise CLIError("give either --sigma or --s2n, not both")
        sigma = args.sigma
    spec = rate_spec(args.density, kind, sigma=sigma, s2n=args.s2n)
    rows = abacus(spec, _floats(args.n), _floats(args.offsets))
    out_dir = _out_dir(args.out)
    outputs: list = []
    text = _csv_text(("density", "noise", "sigma", "offset", "ln_n", "ln_rate"),
                     ((spec.density, kind.value, repr(spec.sigma), repr(c), repr(x), repr(y)) for c, x, y in rows))
    _emit(text, out_dir, f"rates_{spec.density}_{kind.value}.csv", outputs)
    if out_dir is not None:
        _write_manifest(out_dir, "rates", args.argv, outputs)
    return 0


def cmd_penalty(args) -> int:
    family = PenaltyFamily.parse(args.family)
    if args.sigma is not None and args.s2n is not None:
        raise CLIError("give either --sigma or --s2n, not both")
    if args.s2n is not None:
        sigma, s2n = 1.0 / math.sqrt(args.s2n), args.s2n
    else:
        sigma = args.sigma if args.sigma is not None else 0.0
        s2n = math.inf if sigma == 0 else 1.0 / sigma ** 2
    spec = PenaltySpec(family, args.n, s2n, sigma, delta_grid=args.delta, ell_max=args.ell_max,
                       smooth_zeta=not args.rough_zeta)
    ells = cutoff_grid(spec.delta_grid, spec.ell_max)
    pens = np.atleast_1d(penalty(spec, ells))
    out_dir = _out_dir(args.out)
    outputs: list = []
    tag = family.value + ("-rough" if args.rough_zeta else "")
    text = _csv_text(("ell", "pen"), ((repr(float(e)), repr(float(p))) for e, p in zip(ells, pens)))
    _emit(text, out_dir, f"penalty_{tag}.csv", outputs)
    if out_dir is not None:
        _write_manifest(out_dir, "penalty", args.argv, outputs)
    return 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sincdecon", description="Adaptive density deconvolution on sinc spaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def noise_args(sp, default="laplace"):
        sp.add_argument("--noise", choices=["laplace", "gauss", "none"], default=default)
        sp.add_argument("--sigma", type=float)
        sp.add_argument("--s2n", type=float)

    e = sub.add_parser("estimate", help="estimate a density from a sample file")
    e.add_argument("sample", help="text file, one observation per line")
    noise_args(e)
    e.add_argument("--M", type=int, default=8, help="log2 of the number of coefficients")
    e.add_argument("--delta", type=float, default=0.1, help="cutoff grid step")
    e.add_argument("--grid", help="output grid 'lo,hi,count' (default: data range, padded)")
    e.add_argument("--points", type=int, default=512)
    e.add_argument("--out", help="output directory (default: CSV to stdout)")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("simulate", help="run Monte-Carlo experiments from a config file")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--ise", choices=["e1", "e2"])
    s.add_argument("--M", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rates", help="theoretical log-rate abacus curves")
    r.add_argument("--density", required=True)
    noise_args(r)
    r.add_argument("--n", default="100,250,500,1000,2500")
    r.add_argument("--offsets", default="0")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rates)

    q = sub.add_parser("penalty", help="penalty curve over the cutoff grid")
    q.add_argument("--family", default="new-laplace",
                   choices=[f.value for f in PenaltyFamily])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--sigma", type=float)
    q.add_argument("--s2n", type=float)
    q.add_argument("--delta", type=float, default=0.1)
    q.add_argument("--ell-max", type=float, default=10 * math.pi)
    q.add_argument("--rough-zeta", action="store_true", help="use max(ell, pi) instead of the smoothed zeta")
    q.add_argument("--out")
    q.set_defaults(func=cmd_penalty)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except (CLIError, ConfigurationError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"sincdecon {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
