"""Filling maps: where each process value lands in the matrix
=============================================================

A filling map is a bijection from process positions 1..N(N+1)/2 to
upper-triangle cells.  The two built-in maps differ in one decisive
statistic: how often consecutive positions land on adjacent cells.
"""

import numpy as np

from specfill import FillingMap

n = 6
diag = FillingMap.diagonal(n)
row = FillingMap.rowwise(n)

# Print the position matrix of each filling (symmetric by construction).
for fm in (diag, row):
    table = np.array([[fm.phi_inv(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)])
    print(f"{fm.kind} filling, position of each cell:")
    print(table, end="\n\n")

# The induced metric measures how far apart two cells sit along the process.
a, b = (1, 3), (3, 5)
print(f"gap between {a} and {b}: diagonal {diag.distance(a, b)}, rowwise {row.distance(a, b)}")

# Adjacent-step counts: the row-wise walk moves to a neighboring cell at
# almost every step (J = N(N-1)/2 + 1), the diagonal walk almost never.
for size in (10, 100, 400):
    d, r = FillingMap.diagonal(size), FillingMap.rowwise(size)
    print(f"N={size:4d}:  J(diagonal) = {d.neighbor_count():6d}   "
          f"J(rowwise) = {r.neighbor_count():6d}   "
          f"rowwise J/N^2 = {r.neighbor_count()/size**2:.3f}")

# Fiber profiles count solutions x of gap((i,x),(x,j)) = n.  The diagonal
# filling keeps every fiber at 4 or fewer; the row-wise filling does not.
print("\nmax fiber multiplicity over all (i,j) and gaps n>=1:")
for size in (50, 200):
    print(f"N={size:4d}:  diagonal {FillingMap.diagonal(size).max_fiber_count()}   "
          f"rowwise {FillingMap.rowwise(size).max_fiber_count()}")
