"""Empirical spectra against the semicircle law
===============================================

Fill a symmetric matrix with a correlated two-state chain along the
diagonals, scale by 1/sqrt(N), and the eigenvalue distribution approaches
the semicircle density sqrt(4 - x^2) / (2 pi) with Catalan-number moments.
"""

import numpy as np

from specfill import (
    BinaryChain,
    FillingMap,
    build_matrix,
    catalan,
    sample_path,
    semicircle_density,
    summarize,
)

spec = BinaryChain(0.7)

print("      N        m2        m4        m6        KS")
for n in (100, 400, 1600):
    fm = FillingMap.diagonal(n)
    summ = summarize(build_matrix(sample_path(spec, fm.size, seed=11), fm))
    m = summ.moments
    print(f"  {n:5d}   {m[2]:7.4f}   {m[4]:7.4f}   {m[6]:7.4f}   {summ.ks_distance:.4f}")

print(f"\nsemicircle moments: m2 = {catalan(1)}, m4 = {catalan(2)}, m6 = {catalan(3)}")

# Coarse terminal histogram of the largest run vs the reference density.
fm = FillingMap.diagonal(1600)
summ = summarize(build_matrix(sample_path(spec, fm.size, seed=11), fm), bins=25)
widths = np.diff(summ.bin_edges)
density = summ.counts / (summ.n * widths)
centers = (summ.bin_edges[:-1] + summ.bin_edges[1:]) / 2
scale = 60 / max(density.max(), 1e-9)
print("\n  center   empirical density  | bars = sample, * = semicircle")
for c, d in zip(centers, density):
    bar = "#" * int(round(d * scale))
    star = int(round(semicircle_density(c) * scale))
    marker = list(bar.ljust(70))
    if 0 <= star < len(marker):
        marker[star] = "*"
    print(f"  {c:+.2f}    {d:.4f}             {''.join(marker).rstrip()}")
