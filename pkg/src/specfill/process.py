"""Stationary processes that feed matrix entries, with exact moment oracles.

Four process families are supported: finite-state Markov chains started in
their stationary measure, the symmetric two-state chain, stationary Gaussian
AR(1) processes, and finite-range Gibbs potentials on a finite alphabet
(reduced exactly to a Markov chain through their transfer matrix).  Each
family can sample paths; the finite-state families additionally expose exact
mixed moments E[Z_{i1} ... Z_{ik}] computed by transfer-operator products.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.signal import lfilter

ROW_SUM_TOL = 1e-12
STATIONARITY_TOL = 1e-10
VARIANCE_TOL = 1e-10
ERGODICITY_TOL = 1e-10

__all__ = [
    "FiniteMarkovChain",
    "BinaryChain",
    "GaussianMarkov",
    "GibbsPotential",
    "Path",
    "DecayFit",
    "sample_path",
    "sample_paths",
    "exact_mixed_moment",
    "binary_closed_form_moment",
    "gaussian_isserlis_moment",
    "gibbs_to_chain",
    "ising_potential",
    "fit_decay_constants",
    "process_to_json",
    "process_from_json",
]


def _check_sorted(indices: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if any(b < a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices must be sorted ascending, got {idx}")
    return idx


@dataclass(frozen=True)
class FiniteMarkovChain:
    """Stationary ergodic-or-not finite chain on real state values.

    ``states`` holds the real value attached to each abstract state (values
    may repeat, e.g. for block chains), ``transition`` the row-stochastic
    kernel, and ``initial`` the start distribution, which is required to be
    stationary.  The value function must be normalized to unit second moment
    under ``initial``.
    """

    states: np.ndarray
    transition: np.ndarray
    initial: np.ndarray
    _moment_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _power_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.states, dtype=float).reshape(-1)
        trans = np.array(self.transition, dtype=float)
        init = np.array(self.initial, dtype=float).reshape(-1)
        m = values.size
        if m == 0:
            raise ValueError("chain needs at least one state")
        if trans.shape != (m, m):
            raise ValueError(f"transition must be {m}x{m}, got {trans.shape}")
        if init.shape != (m,):
            raise ValueError(f"initial must have length {m}")
        if (trans < 0).any() or (init < 0).any():
            raise ValueError("transition and initial entries must be nonnegative")
        row_err = np.abs(trans.sum(axis=1) - 1.0).max()
        if row_err > ROW_SUM_TOL:
            raise ValueError(f"transition rows must sum to 1 (max error {row_err:.3e})")
        init_err = abs(init.sum() - 1.0)
        if init_err > ROW_SUM_TOL:
            raise ValueError(f"initial must sum to 1 (error {init_err:.3e})")
        stat_err = np.abs(init @ trans - init).max()
        if stat_err > STATIONARITY_TOL:
            raise ValueError(
                f"initial distribution is not stationary (max |rho P - rho| = {stat_err:.3e}); "
                "use FiniteMarkovChain.from_transition to derive the stationary measure"
            )
        var_err = abs(float(init @ values**2) - 1.0)
        if var_err > VARIANCE_TOL:
            raise ValueError(
                f"state values must satisfy E[Z^2] = 1 (error {var_err:.3e}); "
                "rescale the values or pass rescale=True to from_transition"
            )
        for arr in (values, trans, init):
            arr.flags.writeable = False
        object.__setattr__(self, "states", values)
        object.__setattr__(self, "transition", trans)
        object.__setattr__(self, "initial", init)

    @classmethod
    def from_transition(cls, states, transition, rescale: bool = False) -> "FiniteMarkovChain":
        """Build a chain from values and a kernel, deriving the stationary law.

        The stationary distribution is the left Perron eigenvector of the
        kernel.  With ``rescale`` the state values are scaled to unit second
        moment under that distribution.
        """
        trans = np.asarray(transition, dtype=float)
        values = np.asarray(states, dtype=float).reshape(-1)
        rho = _stationary_distribution(trans)
        if rescale:
            m2 = float(rho @ values**2)
            if m2 <= 0:
                raise ValueError("cannot rescale: E[Z^2] is zero under the stationary law")
            values = values / math.sqrt(m2)
        return cls(values, trans, rho)

    @property
    def n_states(self) -> int:
        return self.states.size

    def second_eigenvalue_modulus(self) -> float:
        """Modulus of the subdominant transition eigenvalue (mixing rate proxy)."""
        mods = np.sort(np.abs(np.linalg.eigvals(self.transition)))
        return float(mods[-2]) if mods.size > 1 else 0.0

    def is_ergodic(self, tol: float = ERGODICITY_TOL) -> bool:
        if self.n_states == 1:
            return True
        return self.second_eigenvalue_modulus() < 1.0 - tol

    def flip_involution(self, tol: float = 1e-12) -> np.ndarray | None:
        """Index permutation realizing the spin flip, or None if none exists.

        Searches for an involution ``sigma`` with value(sigma s) = -value(s),
        P(sigma s, sigma s') = P(s, s') and rho(sigma s) = rho(s).  States
        with tied values are matched by bounded backtracking, so the check is
        sufficient rather than exhaustive on large degenerate chains.
        """
        values = self.states
        m = values.size
        order = np.argsort(values, kind="stable")
        groups: list[tuple[list[int], list[int]]] = []
        used = np.zeros(m, dtype=bool)
        for a in order:
            if used[a]:
                continue
            val = values[a]
            pos = [int(i) for i in np.flatnonzero(np.abs(values - val) <= tol) if not used[i]]
            neg = [int(i) for i in np.flatnonzero(np.abs(values + val) <= tol) if not used[i]]
            if abs(val) <= tol:
                for i in pos:
                    used[i] = True
                groups.append((pos, pos))
                continue
            if len(pos) != len(neg):
                return None
            for i in itertools.chain(pos, neg):
                used[i] = True
            groups.append((pos, neg))

        def assemble(choices: list[list[tuple[int, int]]]) -> np.ndarray:
            sigma = np.empty(m, dtype=np.int64)
            for pairing in choices:
                for a, b in pairing:
                    sigma[a] = b
                    sigma[b] = a
            return sigma

        def candidates(group):
            # bounded backtracking over tie groups; non-involutions are
            # rejected by the sigma(sigma) = id check below
            pos, neg = group
            for perm in itertools.islice(itertools.permutations(neg), 720):
                yield list(zip(pos, perm))

        def search(level: int, chosen: list) -> np.ndarray | None:
            if level == len(groups):
                sigma = assemble(chosen)
                if np.any(sigma[sigma] != np.arange(m)):
                    return None
                if np.abs(self.initial[sigma] - self.initial).max() > 1e-10:
                    return None
                if np.abs(self.transition[np.ix_(sigma, sigma)] - self.transition).max() > 1e-10:
                    return None
                return sigma
            for pairing in candidates(groups[level]):
                sigma = search(level + 1, chosen + [pairing])
                if sigma is not None:
                    return sigma
            return None

        return search(0, [])

    def is_flip_symmetric(self) -> bool:
        """True when the chain law is invariant under negating all values."""
        return self.flip_involution() is not None

    def _power(self, n: int) -> np.ndarray:
        pw = self._power_cache.get(n)
        if pw is None:
            pw = np.linalg.matrix_power(self.transition, n)
            self._power_cache[n] = pw
        return pw


def _stationary_distribution(transition: np.ndarray) -> np.ndarray:
    trans = np.asarray(transition, dtype=float)
    vals, vecs = np.linalg.eig(trans.T)
    k = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[k] - 1.0) > 1e-8:
        raise ValueError("kernel has no eigenvalue 1; not a stochastic matrix?")
    rho = np.real(vecs[:, k])
    rho = np.abs(rho)
    total = rho.sum()
    if total <= 0:
        raise ValueError("failed to extract a stationary distribution")
    rho /= total
    # polish with one fixed-point sweep to push |rho P - rho| to rounding level
    for _ in range(50):
        nxt = rho @ trans
        if np.abs(nxt - rho).max() < 1e-16:
            break
        rho = nxt / nxt.sum()
    return rho


@dataclass(frozen=True)
class BinaryChain:
    """Two-state chain on {-1,+1} with stay probability ``p`` and beta = 2p-1."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"stay probability must lie in (0,1), got {self.p}")

    @property
    def beta(self) -> float:
        return 2.0 * self.p - 1.0

    def to_markov(self) -> FiniteMarkovChain:
        p = self.p
        return FiniteMarkovChain(
            states=np.array([-1.0, 1.0]),
            transition=np.array([[p, 1.0 - p], [1.0 - p, p]]),
            initial=np.array([0.5, 0.5]),
        )


@dataclass(frozen=True)
class GaussianMarkov:
    """Stationary zero-mean unit-variance Gaussian AR(1); Cov(Z_i,Z_j) = beta^|i-j|."""

    beta: float

    def __post_init__(self):
        if not -1.0 < self.beta < 1.0:
            raise ValueError(f"one-step correlation must lie in (-1,1), got {self.beta}")


@dataclass(frozen=True)
class GibbsPotential:
    """Shift-invariant finite-range potential on a finite real alphabet.

    ``terms`` maps each anchored offset shape (a sorted tuple containing 0
    with maximum at most ``interaction_range``) to an energy table indexed by
    alphabet positions, one axis per offset.  Boltzmann weights are
    exp(-energy).  Construction enforces two gates:

    * the Dobrushin uniqueness sum, taken over every translate of every
      shape that covers the origin, must be < 2;
    * the potential must be invariant under globally negating the alphabet
      (our sufficient condition for vanishing odd moments).
    """

    state_values: np.ndarray
    interaction_range: int
    terms: Mapping[tuple[int, ...], np.ndarray]
    _chain_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.state_values, dtype=float).reshape(-1)
        if values.size < 2:
            raise ValueError("alphabet needs at least two values")
        if np.unique(values).size != values.size:
            raise ValueError("alphabet values must be distinct")
        r = int(self.interaction_range)
        if r < 1:
            raise ValueError("interaction range must be >= 1")
        flip = _negation_permutation(values)
        if flip is None:
            raise ValueError("alphabet must be closed under negation")
        terms: dict[tuple[int, ...], np.ndarray] = {}
        for shape, table in dict(self.terms).items():
            shape = tuple(int(a) for a in shape)
            if shape != tuple(sorted(set(shape))):
                raise ValueError(f"shape {shape} must be strictly increasing")
            if not shape or shape[0] != 0:
                raise ValueError(f"shape {shape} must be anchored at 0")
            if shape[-1] > r:
                raise ValueError(f"shape {shape} exceeds interaction range {r}")
            tab = np.array(table, dtype=float)
            if tab.shape != (values.size,) * len(shape):
                raise ValueError(f"table for shape {shape} has shape {tab.shape}")
            flipped = tab[np.ix_(*([flip] * len(shape)))]
            if np.abs(flipped - tab).max() > 1e-12:
                raise ValueError(f"potential term {shape} is not spin-flip symmetric")
            tab.flags.writeable = False
            terms[shape] = tab
        dsum = self.dobrushin_sum_of(terms)
        if dsum >= 2.0:
            raise ValueError(
                f"Dobrushin uniqueness condition violated: sum = {dsum:.6g} >= 2"
            )
        values.flags.writeable = False
        object.__setattr__(self, "state_values", values)
        object.__setattr__(self, "interaction_range", r)
        object.__setattr__(self, "terms", terms)

    @staticmethod
    def dobrushin_sum_of(terms: Mapping[tuple[int, ...], np.ndarray]) -> float:
        # every translate of an anchored shape that still covers the origin
        # contributes once, hence the factor |A|
        total = 0.0
        for shape, tab in terms.items():
            size = len(shape)
            osc = float(tab.max() - tab.min())
            total += size * (size - 1) * osc
        return total

    @property
    def dobrushin_sum(self) -> float:
        return self.dobrushin_sum_of(self.terms)

    def to_chain(self) -> FiniteMarkovChain:
        if not self._chain_cache:
            self._chain_cache.append(gibbs_to_chain(self))
        return self._chain_cache[0]


def _negation_permutation(values: np.ndarray, tol: float = 1e-12) -> np.ndarray | None:
    m = values.size
    flip = np.full(m, -1, dtype=np.int64)
    for a in range(m):
        hits = np.flatnonzero(np.abs(values + values[a]) <= tol)
        if hits.size != 1:
            return None
        flip[a] = hits[0]
    if np.any(flip[flip] != np.arange(m)):
        return None
    return flip


def ising_potential(coupling: float, values: Sequence[float] = (-1.0, 1.0)) -> GibbsPotential:
    """Nearest-neighbor pair potential -J * z0 * z1 on the given alphabet."""
    vals = np.asarray(values, dtype=float)
    table = -coupling * np.multiply.outer(vals, vals)
    return GibbsPotential(vals, 1, {(0, 1): table})


@dataclass(frozen=True)
class Path:
    """One realized trajectory of a process, together with its provenance."""

    values: np.ndarray
    seed: int
    spec: object

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


ProcessSpec = Union[FiniteMarkovChain, BinaryChain, GaussianMarkov, GibbsPotential]


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def sample_path(spec: ProcessSpec, length: int, seed: int) -> Path:
    """Sample one stationary trajectory of ``length`` values.

    Deterministic given (spec, length, seed).  The first value is drawn from
    the stationary law (standard normal for the Gaussian family), subsequent
    values from the one-step kernel.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    values = _sample_block(spec, length, 1, _rng(seed))[0]
    return Path(values=values, seed=int(seed), spec=spec)


def sample_paths(spec: ProcessSpec, length: int, n_paths: int, seed: int) -> np.ndarray:
    """Sample ``n_paths`` independent trajectories as an (n_paths, length) array.

    Bulk Monte Carlo helper; uses a single generator, so it is deterministic
    given (spec, length, n_paths, seed) but does not reproduce per-path
    ``sample_path`` streams.
    """
    if length < 1 or n_paths < 1:
        raise ValueError("length and n_paths must be >= 1")
    return _sample_block(spec, length, n_paths, _rng(seed))


def _sample_block(spec: ProcessSpec, length: int, n_paths: int, rng) -> np.ndarray:
    if isinstance(spec, BinaryChain):
        # sign flips are i.i.d.; the running product is the chain
        start = np.where(rng.random(n_paths) < 0.5, -1.0, 1.0)
        if length == 1:
            return start[:, None]
        signs = np.where(rng.random((n_paths, length - 1)) < spec.p, 1.0, -1.0)
        out = np.empty((n_paths, length))
        out[:, 0] = start
        np.cumprod(signs, axis=1, out=signs)
        out[:, 1:] = start[:, None] * signs
        return out
    if isinstance(spec, GaussianMarkov):
        beta = spec.beta
        noise = rng.standard_normal((n_paths, length))
        if length > 1:
            noise[:, 1:] *= math.sqrt(1.0 - beta * beta)
        return lfilter([1.0], [1.0, -beta], noise, axis=1)
    if isinstance(spec, GibbsPotential):
        return _sample_block(spec.to_chain(), length, n_paths, rng)
    if isinstance(spec, FiniteMarkovChain):
        cum_rows = np.cumsum(spec.transition, axis=1)
        cum_init = np.cumsum(spec.initial)
        u = rng.random((n_paths, length))
        idx = np.empty((n_paths, length), dtype=np.int64)
        idx[:, 0] = np.searchsorted(cum_init, u[:, 0], side="right").clip(max=spec.n_states - 1)
        for t in range(1, length):
            rows = cum_rows[idx[:, t - 1]]
            idx[:, t] = (u[:, t, None] > rows).sum(axis=1).clip(max=spec.n_states - 1)
        return spec.states[idx]
    raise TypeError(f"unsupported process spec: {type(spec).__name__}")


def exact_mixed_moment(chain: FiniteMarkovChain, indices: Sequence[int]) -> float:
    """Exact E[Z_{i1} ... Z_{ik}] under the stationary chain, indices sorted.

    Evaluated as rho^T D P^{n1} D P^{n2} ... D 1 with D = diag(values) and
    n_j the successive index gaps; the empty product is 1.
    """
    idx = _check_sorted(indices)
    if not idx:
        return 1.0
    gaps = tuple(b - a for a, b in zip(idx, idx[1:]))
    cached = chain._moment_cache.get(gaps)
    if cached is None:
        u = chain.initial * chain.states
        for n in gaps:
            if n:
                u = u @ chain._power(n)
            u = u * chain.states
        cached = float(u.sum())
        chain._moment_cache[gaps] = cached
    return cached


def binary_closed_form_moment(p: float, indices: Sequence[int]) -> float:
    """Closed-form mixed moment of the two-state chain.

    beta^(n1 + n3 + ...) with beta = 2p-1 and n_j the sorted index gaps; zero
    for an odd number of factors.
    """
    idx = _check_sorted(indices)
    k = len(idx)
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0
    beta = 2.0 * p - 1.0
    expo = sum(idx[j + 1] - idx[j] for j in range(0, k - 1, 2))
    return float(beta**expo)


def gaussian_isserlis_moment(beta: float, indices: Sequence[int]) -> float:
    """Gaussian mixed moment as the pairing sum of beta^|i-j| covariances."""
    idx = _check_sorted(indices)
    k = len(idx)
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0

    def pairing_sum(rem: tuple[int, ...]) -> float:
        if not rem:
            return 1.0
        first, rest = rem[0], rem[1:]
        total = 0.0
        for a in range(len(rest)):
            cov = beta ** abs(rest[a] - first)
            total += cov * pairing_sum(rest[:a] + rest[a + 1 :])
        return total

    return pairing_sum(idx)


def _is_primitive(mask: np.ndarray) -> bool:
    # Wielandt bound: primitive iff reach^((m-1)^2 + 1) is all-positive
    m = mask.shape[0]
    if m == 1:
        return bool(mask[0, 0])
    reach = mask.copy()
    for _ in range((m - 1) ** 2 + 1):
        if reach.all():
            return True
        reach = (reach.astype(np.int64) @ mask.astype(np.int64)) > 0
    return bool(reach.all())


def gibbs_to_chain(potential: GibbsPotential) -> FiniteMarkovChain:
    """Exact reduction of a finite-range Gibbs potential to a Markov chain.

    Blocks of ``interaction_range`` consecutive sites form the chain's state
    space.  The transfer matrix weights each block transition by the
    Boltzmann factor of the potential terms completed by the newly revealed
    site; its Perron data yields the stationary kernel.  The read-out value
    of a block is the leftmost site, centered and scaled to unit second
    moment.
    """
    values = potential.state_values
    m = values.size
    r = potential.interaction_range
    blocks = list(itertools.product(range(m), repeat=r))
    nb = len(blocks)
    block_index = {b: i for i, b in enumerate(blocks)}

    T = np.zeros((nb, nb))
    for b, old in enumerate(blocks):
        for new_sym in range(m):
            window = old + (new_sym,)
            nxt = block_index[window[1:]]
            energy = 0.0
            for shape, table in potential.terms.items():
                # translate anchored so its last offset lands on the new site
                start = r - shape[-1]
                energy += float(table[tuple(window[start + a] for a in shape)])
            T[b, nxt] = math.exp(-energy)

    if not _is_primitive(T > 0):
        raise ValueError("transfer matrix is not primitive; Gibbs chain is not ergodic")

    lam, right = _perron(T)
    _, left = _perron(T.T)
    kernel = T * right[None, :] / (lam * right[:, None])
    kernel /= kernel.sum(axis=1, keepdims=True)
    rho = left * right
    rho /= rho.sum()

    raw = values[np.array([b[0] for b in blocks])]
    mean = float(rho @ raw)
    var = float(rho @ (raw - mean) ** 2)
    if var <= 0:
        raise ValueError("degenerate Gibbs chain: read-out value is constant")
    return FiniteMarkovChain((raw - mean) / math.sqrt(var), kernel, rho)


def _perron(T: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eig(T)
    k = int(np.argmax(vals.real))
    lam = float(vals[k].real)
    vec = np.real(vecs[:, k])
    if vec.sum() < 0:
        vec = -vec
    if (vec <= 0).any():
        raise ValueError("Perron vector is not strictly positive")
    return lam, vec


@dataclass(frozen=True)
class DecayFit:
    """Certified decay constants for the three mixed-moment inequalities.

    ``beta`` is the smallest grid value for which a constant at most
    ``c_cap`` bounds every enumerated check; ``C`` is that constant.  When no
    beta < 1 fits, ``beta`` is 1.0, ``C`` is inf and ``violations`` explains
    the worst offenders.
    """

    beta: float
    C: float
    per_k: dict
    per_inequality: dict
    n_checks: int
    c_cap: float
    violations: tuple

    @property
    def fitted(self) -> bool:
        return self.beta < 1.0 and not self.violations


def _gap_family(k: int, budget: int) -> Iterable[tuple[int, ...]]:
    # gap vectors ordered by total, so tight clusters come first
    width = k - 1
    if width == 1:
        # pair moments pin beta, so probe long gaps here
        yield from ((t,) for t in range(min(budget, 49)))
        return
    total = 0
    produced = 0
    while produced < budget and total <= 8 * width:
        for gaps in itertools.product(range(0, min(total, 32) + 1), repeat=width):
            if sum(gaps) != total:
                continue
            yield gaps
            produced += 1
            if produced >= budget:
                return
        total += 1


def _tuple_from_gaps(gaps: Sequence[int], start: int = 1) -> tuple[int, ...]:
    out = [start]
    for g in gaps:
        out.append(out[-1] + g)
    return tuple(out)


_LHS_FLOOR = 1e-10  # moments below this sit at the float cancellation level


def fit_decay_constants(
    chain: FiniteMarkovChain,
    k_max: int = 6,
    index_budget: int = 400,
    c_cap: float | None = None,
    grid_step: float = 0.001,
) -> DecayFit:
    """Grid-search the smallest beta certifying the moment-decay inequalities.

    For each even k <= k_max an index family (at most ``index_budget`` tuples
    per k) is enumerated and three quantities are bounded: the mixed moment
    against beta^(n1+n3+...), the factorization defect of two index blocks
    against beta^d with d the block gap, and |E[prod Z^2] - 1| against
    beta^d' with d' the smallest spacing.  For each grid beta the minimal
    admissible C is closed-form (a max of ratios); the smallest beta whose C
    stays within ``c_cap`` wins.  By default the cap sits a hair above the
    largest observed left-hand side, the constant no certificate can avoid.

    Moments smaller than 1e-10 are treated as zero: transfer products only
    resolve magnitudes down to the cancellation level, and the artifact's
    exactness contract stops at 1e-12 anyway.
    """
    if k_max < 2 or k_max % 2:
        raise ValueError("k_max must be even and >= 2")
    if not chain.is_ergodic():
        raise ValueError(
            "no beta < 1 exists: chain is not ergodic "
            f"(second eigenvalue modulus {chain.second_eigenvalue_modulus():.6g})"
        )

    # evidence entries: (|lhs|, exponent, moment order, inequality tag)
    evidence: list[tuple[float, int, int, str]] = []
    for k in range(2, k_max + 1, 2):
        base_tuples = []
        for gaps in _gap_family(k, index_budget):
            idx = _tuple_from_gaps(gaps)
            base_tuples.append(idx)
            expo = sum(gaps[j] for j in range(0, k - 1, 2))
            evidence.append((abs(exact_mixed_moment(chain, idx)), expo, k, "moment_decay"))

        for idx in base_tuples[: max(4, index_budget // 16)]:
            for offset in (0, 1, 2, 4, 8, 12):
                shifted = tuple(i + idx[-1] - idx[0] + offset for i in idx)
                joint = tuple(sorted(idx + shifted))
                lhs = abs(
                    exact_mixed_moment(chain, joint)
                    - exact_mixed_moment(chain, idx) * exact_mixed_moment(chain, shifted)
                )
                d = min(abs(a - b) for a in idx for b in shifted)
                evidence.append((lhs, d, 2 * k, "correlation_factorization"))

        if k >= 4:
            for gaps in _gap_family(k // 2, max(8, index_budget // 8)):
                pts = _tuple_from_gaps([g + 1 for g in gaps])  # strictly increasing sites
                doubled = tuple(sorted(pts + pts))
                lhs = abs(exact_mixed_moment(chain, doubled) - 1.0)
                dprime = min(b - a for a, b in zip(pts, pts[1:]))
                evidence.append((lhs, dprime, k, "square_moments"))

    evidence = [e for e in evidence if e[0] > _LHS_FLOOR or e[1] == 0]
    if c_cap is None:
        c_cap = (1.0 + 1e-4) * max(e[0] for e in evidence)

    def required_c(beta: float) -> float:
        worst = 0.0
        for lhs, expo, _, _ in evidence:
            if expo == 0:
                worst = max(worst, lhs)
            elif lhs <= _LHS_FLOOR:
                continue
            elif beta == 0.0:
                return math.inf
            else:
                worst = max(worst, lhs / beta**expo)
        return worst

    n_grid = int(round(1.0 / grid_step))
    for step in range(0, n_grid):
        beta = step * grid_step
        c = required_c(beta)
        if c <= c_cap:
            per_k: dict[int, float] = {}
            per_ineq: dict[str, float] = {}
            for lhs, expo, k, tag in evidence:
                ratio = lhs if expo == 0 else (lhs / beta**expo if beta else 0.0)
                per_k[k] = max(per_k.get(k, 0.0), ratio)
                per_ineq[tag] = max(per_ineq.get(tag, 0.0), ratio)
            return DecayFit(beta, c, per_k, per_ineq, len(evidence), c_cap, ())

    worst = sorted(evidence, key=lambda e: e[0], reverse=True)[:5]
    violations = tuple(
        f"{tag}: |lhs|={lhs:.3e} at exponent {expo} (k={k})" for lhs, expo, k, tag in worst
    )
    return DecayFit(1.0, math.inf, {}, {}, len(evidence), c_cap, violations)


# --- JSON serialization of process specs ------------------------------------

def process_to_json(spec: ProcessSpec) -> dict:
    """Tagged-JSON form of a process spec; inverse of ``process_from_json``."""
    if isinstance(spec, BinaryChain):
        return {"kind": "binary", "p": spec.p}
    if isinstance(spec, GaussianMarkov):
        return {"kind": "gaussian", "beta": spec.beta}
    if isinstance(spec, FiniteMarkovChain):
        return {
            "kind": "markov",
            "states": [float(v) for v in spec.states],
            "transition": [[float(x) for x in row] for row in spec.transition],
            "initial": [float(x) for x in spec.initial],
        }
    if isinstance(spec, GibbsPotential):
        return {
            "kind": "gibbs",
            "state_values": [float(v) for v in spec.state_values],
            "interaction_range": spec.interaction_range,
            "terms": [
                {"shape": list(shape), "table": table.tolist()}
                for shape, table in sorted(spec.terms.items())
            ],
        }
    raise TypeError(f"unsupported process spec: {type(spec).__name__}")


def process_from_json(obj: Mapping) -> ProcessSpec:
    kind = obj.get("kind")
    if kind == "binary":
        return BinaryChain(float(obj["p"]))
    if kind == "gaussian":
        return GaussianMarkov(float(obj["beta"]))
    if kind == "markov":
        return FiniteMarkovChain(
            np.asarray(obj["states"], dtype=float),
            np.asarray(obj["transition"], dtype=float),
            np.asarray(obj["initial"], dtype=float),
        )
    if kind == "gibbs":
        terms = {
            tuple(int(a) for a in term["shape"]): np.asarray(term["table"], dtype=float)
            for term in obj["terms"]
        }
        return GibbsPotential(
            np.asarray(obj["state_values"], dtype=float),
            int(obj["interaction_range"]),
            terms,
        )
    raise ValueError(f"unknown process kind: {kind!r}")
