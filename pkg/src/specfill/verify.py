"""Independent oracles and assumption checkers for process/filling pairs.

The brute-force trace moment enumerates every closed index path and sums
exact mixed moments, giving E[(1/N) tr A^k] without sampling or eigenvalues;
everything else in the package can be checked against it.  The two
``check_*`` functions turn the standing assumptions on processes (unit
second moment, vanishing odd moments, geometric moment decay) and on
fillings (bounded fiber multiplicity, sub-quadratic adjacent-step count)
into pass/fail report entries with numeric margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .filling import FillingMap, make_filling
from .process import (
    BinaryChain,
    FiniteMarkovChain,
    GibbsPotential,
    exact_mixed_moment,
    fit_decay_constants,
    process_to_json,
    sample_paths,
)
from .seeding import seed_for_trial

ENUMERATION_BUDGET = 10**8

__all__ = [
    "CheckResult",
    "VerificationReport",
    "MarginEstimate",
    "expected_trace_moment_bruteforce",
    "monte_carlo_trace_moment",
    "check_process_assumption",
    "check_filling_assumption",
    "fourth_moment_margin",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    details: str


@dataclass(frozen=True)
class VerificationReport:
    """Named checks with margins for one (process, filling, N) subject."""

    subject: dict
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "margin": float(c.margin),
                    "details": c.details,
                }
                for c in self.checks
            ],
        }

    def format_table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=4)
        lines = [f"{'check'.ljust(width)}  status  margin        details"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{c.name.ljust(width)}  {status}    {c.margin:<12.4g}  {c.details}")
        return "\n".join(lines)


ChainLike = Union[FiniteMarkovChain, BinaryChain, GibbsPotential]


def _as_chain(spec: ChainLike) -> FiniteMarkovChain:
    if isinstance(spec, FiniteMarkovChain):
        return spec
    if isinstance(spec, BinaryChain):
        return spec.to_markov()
    if isinstance(spec, GibbsPotential):
        return spec.to_chain()
    raise TypeError(f"no exact moment oracle for {type(spec).__name__}")


def _bruteforce_slice(args) -> list[float]:
    """Compensated partial sums for a contiguous block of first coordinates."""
    import itertools

    mc, filling, k, n, p1_block = args
    inv = filling._inv
    cache: dict[tuple[int, ...], float] = {}
    partials = []
    for p1 in p1_block:
        total = 0.0
        comp = 0.0
        for rest in itertools.product(range(1, n + 1), repeat=k - 1):
            path = (p1, *rest)
            key = tuple(sorted(inv[path[t], path[(t + 1) % k]] for t in range(k)))
            gaps = tuple(b - a for a, b in zip(key, key[1:]))
            val = cache.get(gaps)
            if val is None:
                val = exact_mixed_moment(mc, key)
                cache[gaps] = val
            y = val - comp
            t = total + y
            comp = (t - total) - y
            total = t
        partials.append(total)
    return partials


def expected_trace_moment_bruteforce(
    chain: ChainLike,
    filling: FillingMap,
    n: int | None = None,
    k: int = 2,
    workers: int = 1,
) -> float:
    """Exact E[(1/N) tr A^k] by full path enumeration.

    Every closed path (p_1, ..., p_k) over {1..n} contributes the exact
    mixed moment of its cells' process positions; the sum is scaled by
    n^(-k/2-1).  The first path coordinate partitions the enumeration:
    per-coordinate partial sums are compensated (Kahan) and reduced in
    fixed coordinate order, so the result is bit-identical for any
    ``workers`` count.
    """
    mc = _as_chain(chain)
    if n is None:
        n = filling.n
    if n != filling.n:
        raise ValueError(f"n={n} does not match filling dimension {filling.n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if n**k > ENUMERATION_BUDGET:
        raise ValueError(f"enumeration budget exceeded: {n}^{k} > {ENUMERATION_BUDGET}")

    p1_values = list(range(1, n + 1))
    workers = max(1, min(int(workers), n))
    if workers == 1:
        partials = _bruteforce_slice((mc, filling, k, n, p1_values))
    else:
        from concurrent.futures import ProcessPoolExecutor

        blocks = [p1_values[w::workers] for w in range(workers)]
        tasks = [(mc, filling, k, n, block) for block in blocks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_block = list(pool.map(_bruteforce_slice, tasks))
        by_p1 = {}
        for block, vals in zip(blocks, per_block):
            by_p1.update(zip(block, vals))
        partials = [by_p1[p1] for p1 in p1_values]

    total = 0.0
    comp = 0.0
    for val in partials:
        y = val - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total / n ** (k / 2 + 1)


def monte_carlo_trace_moment(
    spec, filling: FillingMap, k: int, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of (1/N) tr A^k over fresh samples."""
    if k not in (2, 4):
        raise ValueError("monte_carlo_trace_moment supports k in {2, 4}")
    n = filling.n
    vals = sample_paths(spec, filling.size, trials, seed)
    a = vals[:, filling._inv[1:, 1:] - 1] / math.sqrt(n)
    if k == 2:
        stats = np.einsum("tij,tij->t", a, a) / n
    else:
        sq = a @ a
        stats = np.einsum("tij,tij->t", sq, sq) / n
    mean = float(stats.mean())
    stderr = float(stats.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    return mean, stderr


def check_process_assumption(
    chain: ChainLike, k_max: int = 6, budget: int = 400
) -> VerificationReport:
    """Report on the standing process assumptions, via the exact oracle.

    Checks, in order: E[Z_i^2] = 1; vanishing odd mixed moments on an
    enumerated family; the three geometric-decay inequalities through
    :func:`fit_decay_constants` (fitted beta < 1 passes, with the certified
    constant recorded in the details).
    """
    mc = _as_chain(chain)
    checks: list[CheckResult] = []

    dev = max(abs(exact_mixed_moment(mc, (i, i)) - 1.0) for i in (1, 7, 23))
    checks.append(
        CheckResult(
            "unit_second_moment",
            dev <= 1e-10,
            1e-10 - dev,
            f"max |E[Z_i^2] - 1| = {dev:.3e}",
        )
    )

    worst_odd = 0.0
    for k in (1, 3, 5):
        for gaps in _odd_gap_family(k):
            idx = [1]
            for g in gaps:
                idx.append(idx[-1] + g)
            worst_odd = max(worst_odd, abs(exact_mixed_moment(mc, tuple(idx))))
    checks.append(
        CheckResult(
            "odd_moments_vanish",
            worst_odd <= 1e-12,
            1e-12 - worst_odd,
            f"max |E[Z_i1 ... Z_ik]| over odd k = {worst_odd:.3e}",
        )
    )

    try:
        fit = fit_decay_constants(mc, k_max=k_max, index_budget=budget)
    except ValueError as exc:
        for name in ("moment_decay", "correlation_factorization", "square_moments"):
            checks.append(CheckResult(name, False, -1.0, str(exc)))
        return VerificationReport(_process_subject(chain, k_max, budget), tuple(checks))

    for name in ("moment_decay", "correlation_factorization", "square_moments"):
        c_req = fit.per_inequality.get(name, 0.0)
        detail = (
            f"certified with beta={fit.beta:.3f}, C={c_req:.6g} "
            f"(global C={fit.C:.6g}, cap {fit.c_cap:.6g})"
            if fit.fitted
            else "; ".join(fit.violations)
        )
        checks.append(CheckResult(name, fit.fitted, 1.0 - fit.beta, detail))
    return VerificationReport(_process_subject(chain, k_max, budget), tuple(checks))


def _odd_gap_family(k: int):
    if k == 1:
        yield ()
        return
    import itertools

    for gaps in itertools.product((0, 1, 2, 3), repeat=k - 1):
        yield gaps


def _process_subject(chain, k_max: int, budget: int) -> dict:
    try:
        spec = process_to_json(chain)
    except TypeError:
        spec = {"kind": "unknown"}
    return {"process": spec, "k_max": k_max, "index_budget": budget}


#: heuristic gate: adjacent-step fraction J/N^2 at this level or beyond is the
#: regime where the fourth moment provably escapes the semicircle value
ADJACENT_FRACTION_GATE = 0.1
FIBER_BOUND = 4


def check_filling_assumption(filling: FillingMap) -> VerificationReport:
    """Exhaustive per-N profile of a filling's concentration properties.

    Reports the largest fiber multiplicity over all cells and gaps n >= 1
    (pass when at most 4, the level the diagonal filling achieves for every
    N) and the adjacent-step count J with its fraction of N^2 (pass while
    the fraction stays below 0.1; a fraction bounded away from zero is the
    non-convergence regime).  No asymptotic claim is made: the numbers are
    exact for this N only.
    """
    n = filling.n
    if n > 400:
        raise ValueError("exhaustive filling check supports n <= 400")
    checks = []

    max_fiber = filling.max_fiber_count()
    checks.append(
        CheckResult(
            "fiber_multiplicity_bounded",
            max_fiber <= FIBER_BOUND,
            float(FIBER_BOUND - max_fiber),
            f"max over (i,j,n>=1) of #{{x: gap((i,x),(x,j)) = n}} is {max_fiber}",
        )
    )

    j_count = filling.neighbor_count()
    frac = j_count / n**2
    checks.append(
        CheckResult(
            "adjacent_step_fraction",
            frac < ADJACENT_FRACTION_GATE,
            ADJACENT_FRACTION_GATE - frac,
            f"J = {j_count}, J/N^2 = {frac:.6g}",
        )
    )
    return VerificationReport({"filling": filling.kind, "n": n}, tuple(checks))


@dataclass(frozen=True)
class MarginEstimate:
    """Monte Carlo fourth-moment estimate at one dimension."""

    n: int
    trials: int
    mean: float
    stderr: float

    @property
    def margin(self) -> float:
        # distance of E[(1/N) tr A^4] from the semicircle value kappa_2 = 2
        return self.mean - 2.0

    @property
    def zscore(self) -> float:
        return self.margin / self.stderr if self.stderr > 0 else math.inf


def require_square_moment_family(chain: ChainLike) -> None:
    """Raise unless the exact identity E[Z_i^2 Z_j^2] = 1 holds (oracle-checked)."""
    mc = _as_chain(chain)
    for gap in range(0, 7):
        idx = (1, 1, 1 + gap, 1 + gap)
        dev = abs(exact_mixed_moment(mc, idx) - 1.0)
        if dev > 1e-12:
            raise ValueError(
                f"process violates E[Z_i^2 Z_j^2] = 1 at gap {gap} (dev {dev:.3e}); "
                "fourth-moment margin is only meaningful in that family"
            )


FillingLike = Union[str, Callable[[int], FillingMap]]


def fourth_moment_margin(
    chain: ChainLike,
    filling: FillingLike,
    n_list: Sequence[int],
    trials: int,
    seed: int,
) -> list[MarginEstimate]:
    """Monte Carlo E[(1/N) tr A^4] minus 2, per dimension.

    Requires the exact square-moment identity E[Z_i^2 Z_j^2] = 1, verified
    through the oracle before any sampling (the regime in which a positive
    limit margin is guaranteed for adjacent-step-heavy fillings).  Trials use
    per-(n, trial) seeds derived from ``seed``, so results do not depend on
    scheduling.
    """
    require_square_moment_family(chain)
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")

    maker = (lambda n: make_filling(filling, n)) if isinstance(filling, str) else filling
    out = []
    for n in n_list:
        fm = maker(int(n))
        stats = np.empty(trials)
        for t in range(trials):
            stats[t] = _fourth_moment_single(chain, fm, seed_for_trial(seed, (int(n) << 20) | t))
        out.append(
            MarginEstimate(
                n=int(n),
                trials=trials,
                mean=float(stats.mean()),
                stderr=float(stats.std(ddof=1) / math.sqrt(trials)),
            )
        )
    return out


def _fourth_moment_single(spec, fm: FillingMap, seed: int) -> float:
    vals = sample_paths(spec, fm.size, 1, seed)[0]
    a = vals[fm._inv[1:, 1:] - 1] / math.sqrt(fm.n)
    sq = a @ a
    return float(np.einsum("ij,ij->", sq, sq) / fm.n)
