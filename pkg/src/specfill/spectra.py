"""Matrix assembly, eigenvalues, empirical spectral summaries, semicircle law."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .filling import FillingMap
from .process import Path, process_to_json

DEFAULT_BINS = 101
DEFAULT_SUPPORT = (-2.5, 2.5)
DEFAULT_KMAX = 8

__all__ = [
    "EnsembleSample",
    "SpectralSummary",
    "EigensolverError",
    "build_matrix",
    "eigenvalues",
    "summarize",
    "empirical_moment",
    "semicircle_density",
    "semicircle_cdf",
    "semicircle_curve",
    "catalan",
    "ks_statistic",
    "ks_distance",
    "average_histograms",
    "histogram_rows",
    "summary_to_json_dict",
]


class EigensolverError(RuntimeError):
    """Symmetric eigensolver failed to converge; carries diagnostics."""


@dataclass(frozen=True)
class EnsembleSample:
    """One realized scaled matrix A = X / sqrt(N) with its provenance."""

    n: int
    matrix: np.ndarray
    seed: int
    process_spec: object
    filling_kind: str

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (self.n, self.n):
            raise ValueError(f"matrix must be {self.n}x{self.n}")
        object.__setattr__(self, "matrix", a)


@dataclass(frozen=True)
class SpectralSummary:
    """Sorted spectrum, histogram, moments and semicircle distance."""

    eigenvalues: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    moments: np.ndarray
    ks_distance: float
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def build_matrix(path: Path, filling: FillingMap) -> EnsembleSample:
    """Assemble the symmetric matrix fed by ``path`` through ``filling``.

    Cell (i, j) of the unscaled matrix carries the path value at position
    phi_inv(i, j); the result is scaled by 1/sqrt(N).
    """
    if len(path) != filling.size:
        raise ValueError(
            f"path length {len(path)} does not match filling size {filling.size} "
            f"(n={filling.n})"
        )
    x = path.values[filling._inv[1:, 1:] - 1]
    a = x / math.sqrt(filling.n)
    return EnsembleSample(
        n=filling.n,
        matrix=a,
        seed=path.seed,
        process_spec=path.spec,
        filling_kind=filling.kind,
    )


def eigenvalues(sample: EnsembleSample) -> np.ndarray:
    """All eigenvalues of the sample matrix, ascending.

    Backward-stable symmetric solve (Householder reduction to tridiagonal
    form followed by implicitly shifted QL/QR iteration, LAPACK driver
    ``syev``).  Non-convergence is converted into :class:`EigensolverError`
    with the matrix size and norm attached.
    """
    a = sample.matrix
    try:
        return scipy.linalg.eigh(a, eigvals_only=True, driver="ev")
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise EigensolverError(
            f"eigensolver did not converge for n={sample.n}, "
            f"fro_norm={np.linalg.norm(a):.6g}: {exc}"
        ) from exc


def empirical_moment(summary: SpectralSummary, k: int) -> float:
    """k-th moment (1/N) sum lambda^k of the empirical spectral measure."""
    if k < 0:
        raise ValueError("moment order must be >= 0")
    return float(np.mean(summary.eigenvalues**k))


def semicircle_density(x):
    """Density sqrt(4 - x^2) / (2 pi) on [-2, 2], zero outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 2.0
    out = np.where(inside, np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi), 0.0)
    return float(out) if out.ndim == 0 else out


def semicircle_cdf(x):
    """Distribution function of the semicircle law, clamped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    val = 0.5 + xc * np.sqrt(np.clip(4.0 - xc * xc, 0.0, None)) / (4.0 * np.pi) + np.arcsin(
        xc / 2.0
    ) / np.pi
    out = np.clip(val, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def semicircle_curve(
    points: int = 1001, support: tuple[float, float] = DEFAULT_SUPPORT
) -> tuple[np.ndarray, np.ndarray]:
    """Sampled reference density for overlay curves and CSV export."""
    x = np.linspace(support[0], support[1], points)
    return x, semicircle_density(x)


def catalan(k: int) -> int:
    """k-th Catalan number C(2k, k) / (k+1); these are the even semicircle moments."""
    if k < 0:
        raise ValueError("catalan index must be >= 0")
    if k > 30:
        raise OverflowError("catalan(k) for k > 30 exceeds the supported 64-bit range")
    return math.comb(2 * k, k) // (k + 1)


def ks_statistic(sorted_eigenvalues: np.ndarray) -> float:
    """Two-sided sup distance between the empirical CDF and the semicircle CDF."""
    w = np.asarray(sorted_eigenvalues, dtype=float)
    n = w.size
    if n == 0:
        raise ValueError("need at least one eigenvalue")
    ref = semicircle_cdf(w)
    steps = np.arange(1, n + 1) / n
    return float(max(np.abs(steps - ref).max(), np.abs(steps - 1.0 / n - ref).max()))


def ks_distance(summary: SpectralSummary) -> float:
    return summary.ks_distance


def summarize(
    sample: EnsembleSample,
    bins: int = DEFAULT_BINS,
    support: tuple[float, float] = DEFAULT_SUPPORT,
    k_max: int = DEFAULT_KMAX,
) -> SpectralSummary:
    """Eigen-decompose one sample and collect its spectral statistics.

    The histogram uses ``bins`` equal-width bins on ``support``; eigenvalues
    beyond the support are kept in the spectrum (and in the KS statistic) but
    counted in the boundary bins so the histogram mass stays N.
    """
    w = eigenvalues(sample)
    edges = np.linspace(support[0], support[1], bins + 1)
    clipped = np.clip(w, edges[0], np.nextafter(edges[-1], -np.inf))
    counts, _ = np.histogram(clipped, bins=edges)
    moments = np.array([np.mean(w**k) for k in range(k_max + 1)])
    prov = {
        "n": sample.n,
        "seed": int(sample.seed),
        "filling": sample.filling_kind,
        "process": _prov_process(sample.process_spec),
    }
    return SpectralSummary(
        eigenvalues=w,
        bin_edges=edges,
        counts=counts.astype(float),
        moments=moments,
        ks_distance=ks_statistic(w),
        provenance=prov,
    )


def _prov_process(spec) -> dict:
    try:
        return process_to_json(spec)
    except TypeError:
        return {"kind": "unknown", "repr": repr(spec)}


def average_histograms(summaries: Sequence[SpectralSummary]) -> tuple[np.ndarray, np.ndarray]:
    """Mean bin counts across trials (shared edges required)."""
    if not summaries:
        raise ValueError("need at least one summary")
    edges = summaries[0].bin_edges
    for s in summaries[1:]:
        if not np.array_equal(s.bin_edges, edges):
            raise ValueError("summaries use different bin edges")
    counts = np.mean([s.counts for s in summaries], axis=0)
    return edges, counts


def histogram_rows(edges: np.ndarray, counts: np.ndarray, n: int):
    """Rows (bin_left, bin_right, count, density) for CSV export.

    ``density`` normalizes the counts to unit mass: count / (N * width).
    """
    widths = np.diff(edges)
    for left, right, c, width in zip(edges[:-1], edges[1:], counts, widths):
        yield float(left), float(right), float(c), float(c / (n * width))


def summary_to_json_dict(summary: SpectralSummary) -> dict:
    """JSON-ready view: quantiles, moments m0..m_kmax, KS distance, provenance."""
    w = summary.eigenvalues
    quant_levels = np.linspace(0.0, 1.0, 101)
    return {
        "n": summary.n,
        "eigenvalue_quantiles": [float(q) for q in np.quantile(w, quant_levels)],
        "moments": {f"m{k}": float(m) for k, m in enumerate(summary.moments)},
        "ks_distance": float(summary.ks_distance),
        "provenance": summary.provenance,
    }
