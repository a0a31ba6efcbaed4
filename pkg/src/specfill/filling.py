"""Bijections between process positions and upper-triangle matrix cells.

A filling map sends positions 1..N(N+1)/2 of a process to cells (i, j) with
1 <= i <= j <= N.  It induces a metric on cells (the gap between their
preimages), a count of consecutive steps landing on adjacent cells, and
fiber profiles counting how often a given gap occurs along the diagonal
family (i, x), (x, j).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

DIAGONAL = "diagonal"
ROWWISE = "rowwise"
CUSTOM = "custom"

__all__ = ["FillingMap", "DIAGONAL", "ROWWISE", "CUSTOM"]


class FillingMap:
    """Bijection position -> upper-triangle cell, with inverse and metric.

    Instances are immutable and cheap to query: both directions are table
    lookups.  Construct through :meth:`diagonal`, :meth:`rowwise`,
    :meth:`from_permutation` or :meth:`from_file`.
    """

    def __init__(self, n: int, kind: str, fwd_i: np.ndarray, fwd_j: np.ndarray):
        self.n = int(n)
        self.kind = kind
        self.size = self.n * (self.n + 1) // 2
        self._fwd_i = fwd_i
        self._fwd_j = fwd_j
        self._validate()
        inv = np.zeros((self.n + 1, self.n + 1), dtype=np.int64)
        m = np.arange(1, self.size + 1)
        inv[fwd_i[1:], fwd_j[1:]] = m
        inv[fwd_j[1:], fwd_i[1:]] = m
        self._inv = inv
        for arr in (self._fwd_i, self._fwd_j, self._inv):
            arr.flags.writeable = False

    def _validate(self):
        i, j = self._fwd_i[1:], self._fwd_j[1:]
        if len(i) != self.size or (i < 1).any() or (j > self.n).any() or (i > j).any():
            raise ValueError("forward table does not map into the upper triangle")
        cells = i.astype(np.int64) * (self.n + 1) + j
        if np.unique(cells).size != self.size:
            raise ValueError("forward table is not a bijection: repeated cells")

    # --- constructors ---------------------------------------------------

    @classmethod
    def diagonal(cls, n: int) -> "FillingMap":
        """Main diagonal first, then each superdiagonal, always top to bottom.

        The closed-form inverse
        ``m = N(N+1)/2 - (N-d)(N-d+1)/2 + min(i,j)`` with ``d = |i-j|``
        is the authoritative definition; the walk order is its cross-check.
        """
        n = _check_n(n)
        ii, jj = np.triu_indices(n)
        ii, jj = ii + 1, jj + 1
        d = jj - ii
        size = n * (n + 1) // 2
        m = size - (n - d) * (n - d + 1) // 2 + ii
        fwd_i = np.zeros(size + 1, dtype=np.int64)
        fwd_j = np.zeros(size + 1, dtype=np.int64)
        fwd_i[m] = ii
        fwd_j[m] = jj
        return cls(n, DIAGONAL, fwd_i, fwd_j)

    @classmethod
    def rowwise(cls, n: int) -> "FillingMap":
        """Row by row from the diagonal entry to the right edge."""
        n = _check_n(n)
        ii, jj = np.triu_indices(n)
        ii, jj = ii + 1, jj + 1
        m = (ii - 1) * (n + 1) - (ii - 1) * ii // 2 + (jj - ii + 1)
        size = n * (n + 1) // 2
        fwd_i = np.zeros(size + 1, dtype=np.int64)
        fwd_j = np.zeros(size + 1, dtype=np.int64)
        fwd_i[m] = ii
        fwd_j[m] = jj
        return cls(n, ROWWISE, fwd_i, fwd_j)

    @classmethod
    def from_permutation(cls, n: int, cells: Sequence[tuple[int, int]]) -> "FillingMap":
        """Explicit table: cells[m-1] is the cell receiving position m."""
        n = _check_n(n)
        size = n * (n + 1) // 2
        if len(cells) != size:
            raise ValueError(f"need {size} cells for n={n}, got {len(cells)}")
        fwd_i = np.zeros(size + 1, dtype=np.int64)
        fwd_j = np.zeros(size + 1, dtype=np.int64)
        for m, (i, j) in enumerate(cells, start=1):
            i, j = (int(i), int(j)) if i <= j else (int(j), int(i))
            fwd_i[m] = i
            fwd_j[m] = j
        return cls(n, CUSTOM, fwd_i, fwd_j)

    @classmethod
    def from_file(cls, path) -> "FillingMap":
        """Load a custom filling from text lines ``m i j``.

        The dimension is inferred from the line count; bijectivity is
        validated on load.  Blank lines and ``#`` comments are skipped.
        """
        entries: dict[int, tuple[int, int]] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'm i j', got {line!r}")
            m, i, j = (int(p) for p in parts)
            if m in entries:
                raise ValueError(f"{path}:{lineno}: duplicate position {m}")
            entries[m] = (i, j)
        size = len(entries)
        n = int((np.sqrt(8 * size + 1) - 1) / 2 + 0.5)
        if n * (n + 1) // 2 != size:
            raise ValueError(f"{path}: {size} lines is not a triangular number")
        if sorted(entries) != list(range(1, size + 1)):
            raise ValueError(f"{path}: positions must be exactly 1..{size}")
        return cls.from_permutation(n, [entries[m] for m in range(1, size + 1)])

    # --- queries ----------------------------------------------------------

    def phi(self, m: int) -> tuple[int, int]:
        """Cell (i, j), i <= j, receiving process position ``m``."""
        if not 1 <= m <= self.size:
            raise ValueError(f"position {m} out of range 1..{self.size}")
        return int(self._fwd_i[m]), int(self._fwd_j[m])

    def phi_inv(self, i: int, j: int) -> int:
        """Process position feeding cell (i, j); coordinates may be swapped."""
        self._check_cell(i, j)
        return int(self._inv[i, j])

    def distance(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        """Gap |phi_inv(a) - phi_inv(b)| after canonicalizing both cells."""
        return abs(self.phi_inv(*a) - self.phi_inv(*b))

    def neighbor_count(self) -> int:
        """Number of consecutive positions landing on adjacent cells.

        Cells are adjacent when they share a row and their columns differ by
        one, or vice versa (within the upper triangle, after
        canonicalization).
        """
        i1, j1 = self._fwd_i[1:-1], self._fwd_j[1:-1]
        i2, j2 = self._fwd_i[2:], self._fwd_j[2:]
        horizontal = (i1 == i2) & (np.abs(j1 - j2) == 1)
        vertical = (j1 == j2) & (np.abs(i1 - i2) == 1)
        return int((horizontal | vertical).sum())

    def fiber_profile(self, i: int, j: int) -> dict[int, int]:
        """Histogram over x of the gap between cells (i, x) and (x, j)."""
        self._check_cell(i, j)
        x = np.arange(1, self.n + 1)
        d = np.abs(self._inv[i, x] - self._inv[x, j])
        counts = np.bincount(d)
        return {int(n): int(c) for n, c in enumerate(counts) if c}

    def max_fiber_count(self, exclude_zero: bool = True) -> int:
        """Largest fiber multiplicity over all (i, j) and all gaps n >= 1.

        Exhaustive but vectorized: for each i the gaps |inv[i,x] - inv[j,x]|
        are sorted rowwise and the longest run of equal nonzero values is
        extracted with a cumulative-sum reset trick.
        """
        a = self._inv[1:, 1:]
        best = 0
        for i in range(self.n):
            d = np.abs(a[i][None, :] - a)  # row j: gaps for all x
            d.sort(axis=1)
            valid = d > 0 if exclude_zero else np.ones_like(d, dtype=bool)
            eq = (d[:, 1:] == d[:, :-1]) & valid[:, 1:]
            if not eq.any():
                best = max(best, int(valid.any()))
                continue
            c = np.cumsum(eq, axis=1)
            floor = np.maximum.accumulate(np.where(eq, 0, c), axis=1)
            best = max(best, int((c - floor).max()) + 1)
        return best

    def _check_cell(self, i: int, j: int):
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"cell ({i},{j}) out of range for n={self.n}")

    def __repr__(self) -> str:
        return f"FillingMap(n={self.n}, kind={self.kind!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FillingMap)
            and self.n == other.n
            and np.array_equal(self._fwd_i, other._fwd_i)
            and np.array_equal(self._fwd_j, other._fwd_j)
        )


def _check_n(n) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("matrix dimension must be >= 1")
    return n


def make_filling(kind: str, n: int) -> FillingMap:
    """Resolve 'diagonal', 'rowwise' or 'custom:PATH' into a map of size n."""
    if kind == DIAGONAL:
        return FillingMap.diagonal(n)
    if kind == ROWWISE:
        return FillingMap.rowwise(n)
    if kind.startswith("custom:"):
        fm = FillingMap.from_file(kind.split(":", 1)[1])
        if fm.n != n:
            raise ValueError(f"custom filling has n={fm.n}, expected {n}")
        return fm
    raise ValueError(f"unknown filling kind {kind!r}")
