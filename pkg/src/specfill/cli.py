"""Config-driven experiment runner (the ``specfill`` command).

Modes
-----
spectrum        sample an ensemble, write per-trial and averaged spectral
                summaries
verify          run the process and filling assumption checkers, write the
                report
fourth-moment   Monte Carlo table of (1/N) tr A^4 against the semicircle
                value 2
reproduce-fig1  averaged eigenvalue histograms for the diagonal and row-wise
                fillings of the same two-state chain, plus the semicircle
                reference curve

All outputs are byte-deterministic given (config, seed): trials draw their
randomness from per-trial seeds, results are aggregated in trial order, and
every trial computation runs under a single BLAS thread, so the worker count
(capped by the ``SPECFILL_WORKERS`` environment variable) never changes the
bytes written.
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FilePath

import numpy as np
from threadpoolctl import threadpool_limits

from . import spectra, verify
from .filling import FillingMap, make_filling
from .process import (
    BinaryChain,
    FiniteMarkovChain,
    process_from_json,
    process_to_json,
    sample_path,
)
from .seeding import seed_for_trial

DEFAULT_SEED = 123456789  # fixed so bare runs are reproducible
DEFAULT_N = 2000
DEFAULT_TRIALS = 5
MODES = ("spectrum", "verify", "fourth-moment", "reproduce-fig1")

__all__ = ["ExperimentConfig", "run", "main", "seed_for_trial", "DEFAULT_SEED"]


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    process: object
    filling: str = "diagonal"
    n: int = DEFAULT_N
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    k_max: int = 8
    out: str = "specfill-out"
    n_list: tuple = ()  # fourth-moment mode only; defaults to (n,)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k_max < 2:
            raise ValueError("k_max must be >= 2")

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "process": process_to_json(self.process),
            "filling": self.filling,
            "n": self.n,
            "trials": self.trials,
            "seed": int(self.seed),
            "k_max": self.k_max,
            "out": str(self.out),
            "n_list": [int(x) for x in self.n_list],
        }


def _worker_count(trials: int) -> int:
    cap = os.environ.get("SPECFILL_WORKERS")
    workers = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(workers, trials))


@functools.lru_cache(maxsize=8)
def _filling_cached(desc: str, n: int) -> FillingMap:
    return make_filling(desc, n)


def _spectrum_trial(args) -> spectra.SpectralSummary:
    process_json, filling_desc, n, seed, k_max = args
    with threadpool_limits(limits=1):
        spec = process_from_json(json.loads(process_json))
        fm = _filling_cached(filling_desc, n)
        path = sample_path(spec, fm.size, seed)
        return spectra.summarize(spectra.build_matrix(path, fm), k_max=k_max)


def _m4_trial(args) -> float:
    process_json, filling_desc, n, seed = args
    with threadpool_limits(limits=1):
        spec = process_from_json(json.loads(process_json))
        fm = _filling_cached(filling_desc, n)
        return verify._fourth_moment_single(spec, fm, seed)


def _map_trials(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- deterministic writers ---------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: FilePath, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _write_csv(path: FilePath, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_histogram_csv(path: FilePath, edges, counts, n: int) -> None:
    _write_csv(path, "bin_left,bin_right,count,density", spectra.histogram_rows(edges, counts, n))


def _write_semicircle_csv(path: FilePath) -> None:
    x, dens = spectra.semicircle_curve()
    _write_csv(path, "x,density", zip(x, dens))


def _write_manifest(outdir: FilePath, config: ExperimentConfig, trial_seeds: dict, outputs) -> None:
    _write_json(
        outdir / "manifest.json",
        {
            "config": config.to_json_dict(),
            "trial_seeds": trial_seeds,
            "outputs": sorted(outputs),
        },
    )


# --- modes -------------------------------------------------------------------

def _warn_if_asymmetric(spec) -> None:
    if isinstance(spec, FiniteMarkovChain) and not spec.is_flip_symmetric():
        warnings.warn(
            "process is not spin-flip symmetric: odd mixed moments need not vanish, "
            "so semicircle convergence is not covered by the unit-variance + decay "
            "assumptions",
            stacklevel=3,
        )


def _run_spectrum(config: ExperimentConfig, outdir: FilePath) -> int:
    _warn_if_asymmetric(config.process)
    process_json = json.dumps(process_to_json(config.process), sort_keys=True)
    seeds = [seed_for_trial(config.seed, t) for t in range(config.trials)]
    args = [(process_json, config.filling, config.n, s, config.k_max) for s in seeds]
    summaries = _map_trials(_spectrum_trial, args, _worker_count(config.trials))

    filling_name = config.filling.split(":", 1)[0]
    trials_dir = outdir / "trials"
    trials_dir.mkdir(exist_ok=True)
    outputs = []
    for t, summ in enumerate(summaries):
        name = f"trials/trial_{t:04d}_histogram.csv"
        _write_histogram_csv(outdir / name, summ.bin_edges, summ.counts, summ.n)
        outputs.append(name)

    edges, counts = spectra.average_histograms(summaries)
    hist_name = f"histogram_{filling_name}.csv"
    _write_histogram_csv(outdir / hist_name, edges, counts, config.n)
    _write_semicircle_csv(outdir / "semicircle.csv")

    per_trial = [spectra.summary_to_json_dict(s) for s in summaries]
    averaged = {
        "moments": {
            f"m{k}": float(np.mean([s.moments[k] for s in summaries]))
            for k in range(config.k_max + 1)
        },
        "ks_distance": float(np.mean([s.ks_distance for s in summaries])),
        "eigenvalue_quantiles": [
            float(q)
            for q in np.mean([d["eigenvalue_quantiles"] for d in per_trial], axis=0)
        ],
    }
    _write_json(outdir / "summary.json", {"averaged": averaged, "trials": per_trial})
    outputs += [hist_name, "semicircle.csv", "summary.json", "manifest.json"]
    _write_manifest(outdir, config, {str(t): s for t, s in enumerate(seeds)}, outputs)
    return 0


def _run_verify(config: ExperimentConfig, outdir: FilePath) -> int:
    n_check = min(config.n, 400)
    fm = _filling_cached(config.filling, n_check)
    k_even = min(config.k_max, 6) // 2 * 2
    proc_report = verify.check_process_assumption(config.process, k_max=max(2, k_even))
    fill_report = verify.check_filling_assumption(fm)
    report = verify.VerificationReport(
        subject={
            "process": process_to_json(config.process),
            "filling": config.filling,
            "n": n_check,
        },
        checks=proc_report.checks + fill_report.checks,
    )
    print(report.format_table())
    _write_json(outdir / "report.json", report.to_json_dict())
    _write_manifest(outdir, config, {}, ["report.json", "manifest.json"])
    return 0


def _run_fourth_moment(config: ExperimentConfig, outdir: FilePath) -> int:
    n_list = list(config.n_list) or [config.n]
    process_json = json.dumps(process_to_json(config.process), sort_keys=True)
    verify.require_square_moment_family(config.process)
    rows = []
    trial_seeds = {}
    for n in n_list:
        seeds = [seed_for_trial(config.seed, (int(n) << 20) | t) for t in range(config.trials)]
        trial_seeds[str(n)] = seeds
        args = [(process_json, config.filling, int(n), s) for s in seeds]
        stats = np.array(_map_trials(_m4_trial, args, _worker_count(config.trials)))
        mean = float(stats.mean())
        stderr = float(stats.std(ddof=1) / math.sqrt(len(stats))) if len(stats) > 1 else math.inf
        rows.append((n, len(stats), mean, stderr, mean - 2.0, (mean - 2.0) / stderr))
    _write_csv(outdir / "fourth_moment.csv", "n,trials,mean_m4,stderr,margin,zscore", rows)
    _write_json(
        outdir / "summary.json",
        {
            "semicircle_m4": 2.0,
            "rows": [
                {
                    "n": int(r[0]),
                    "trials": int(r[1]),
                    "mean_m4": r[2],
                    "stderr": r[3],
                    "margin": r[4],
                    "zscore": r[5],
                }
                for r in rows
            ],
        },
    )
    _write_manifest(
        outdir, config, trial_seeds, ["fourth_moment.csv", "summary.json", "manifest.json"]
    )
    return 0


def _run_reproduce_fig1(config: ExperimentConfig, outdir: FilePath) -> int:
    """Two averaged histograms (diagonal and row-wise) of one chain, one curve."""
    process_json = json.dumps(process_to_json(config.process), sort_keys=True)
    trial_seeds = {}
    for block, filling in enumerate(("diagonal", "rowwise")):
        seeds = [
            seed_for_trial(config.seed, block * config.trials + t) for t in range(config.trials)
        ]
        trial_seeds[filling] = seeds
        args = [(process_json, filling, config.n, s, config.k_max) for s in seeds]
        summaries = _map_trials(_spectrum_trial, args, _worker_count(config.trials))
        edges, counts = spectra.average_histograms(summaries)
        _write_histogram_csv(outdir / f"histogram_{filling}.csv", edges, counts, config.n)
    _write_semicircle_csv(outdir / "semicircle.csv")
    _write_manifest(
        outdir,
        config,
        trial_seeds,
        ["histogram_diagonal.csv", "histogram_rowwise.csv", "semicircle.csv", "manifest.json"],
    )
    return 0


_MODE_RUNNERS = {
    "spectrum": _run_spectrum,
    "verify": _run_verify,
    "fourth-moment": _run_fourth_moment,
    "reproduce-fig1": _run_reproduce_fig1,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; artifacts land in config.out."""
    outdir = FilePath(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    return _MODE_RUNNERS[config.mode](config, outdir)


# --- argument handling ---------------------------------------------------------

def _config_from_sources(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        raw = json.loads(FilePath(args.config).read_text())
    process = process_from_json(raw["process"]) if "process" in raw else BinaryChain(0.7)
    if args.p is not None:
        process = BinaryChain(args.p)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return raw.get(key, default)

    mode = args.mode or raw.get("mode")
    if mode is None:
        raise ValueError("mode is required (positional argument or 'mode' config key)")
    return ExperimentConfig(
        mode=mode,
        process=process,
        filling=pick(args.filling, "filling", "diagonal"),
        n=int(pick(args.n, "n", DEFAULT_N)),
        trials=int(pick(args.trials, "trials", DEFAULT_TRIALS)),
        seed=int(pick(args.seed, "seed", DEFAULT_SEED)),
        k_max=int(pick(args.kmax, "k_max", 8)),
        out=str(pick(args.out, "out", "specfill-out")),
        n_list=tuple(int(x) for x in raw.get("n_list", ())),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specfill",
        description="Spectra of symmetric random matrices filled with stochastic processes",
    )
    parser.add_argument("mode", nargs="?", choices=MODES, help="experiment mode")
    parser.add_argument("--config", help="JSON config file; command-line flags win")
    parser.add_argument("--n", type=int, help="matrix dimension")
    parser.add_argument("--trials", type=int, help="number of sampled matrices")
    parser.add_argument("--seed", type=int, help=f"base seed (default {DEFAULT_SEED})")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--p", type=float, help="use a two-state chain with this stay probability")
    parser.add_argument(
        "--filling",
        help="diagonal | rowwise | custom:PATH (text lines 'm i j')",
    )
    parser.add_argument("--kmax", type=int, help="highest empirical moment to record")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_sources(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"specfill: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except spectra.EigensolverError as exc:
        print(f"specfill: eigensolver failure (partial results kept): {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError) as exc:
        print(f"specfill: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
