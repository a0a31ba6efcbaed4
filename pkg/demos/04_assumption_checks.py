"""Verifying the standing assumptions with exact oracles
========================================================

The convergence result needs (a) a process with unit variance, vanishing
odd moments and geometrically decaying correlations, and (b) a filling
whose fibers stay small.  Both sides are checkable per instance, and the
brute-force path sum gives E[(1/N) tr A^k] exactly for cross-validation.
"""

import math

from specfill import (
    BinaryChain,
    FillingMap,
    FiniteMarkovChain,
    check_filling_assumption,
    check_process_assumption,
    expected_trace_moment_bruteforce,
    gibbs_to_chain,
    ising_potential,
    monte_carlo_trace_moment,
)

print("== two-state chain, p = 0.7 ==")
print(check_process_assumption(BinaryChain(0.7)).format_table(), end="\n\n")

print("== non-reversible chain with a drifted stationary law ==")
asym = FiniteMarkovChain.from_transition([-1.0, 1.0], [[0.8, 0.2], [0.4, 0.6]])
print(check_process_assumption(asym, k_max=4, budget=120).format_table(), end="\n\n")

print("== nearest-neighbor Gibbs potential reduced to a chain ==")
j = 0.5 * math.log(7 / 3)  # stay probability works out to exactly 0.7
print(check_process_assumption(gibbs_to_chain(ising_potential(j))).format_table(), end="\n\n")

for kind in ("diagonal", "rowwise"):
    fm = FillingMap.diagonal(200) if kind == "diagonal" else FillingMap.rowwise(200)
    print(f"== {kind} filling, N = 200 ==")
    print(check_filling_assumption(fm).format_table(), end="\n\n")

# The exact path-sum oracle vs sampling, at an enumerable size.
spec, fm = BinaryChain(0.7), FillingMap.rowwise(6)
exact = expected_trace_moment_bruteforce(spec, fm, k=4)
mean, se = monte_carlo_trace_moment(spec, fm, k=4, trials=50_000, seed=3)
print(f"E[(1/6) tr A^4], row-wise n=6: path sum {exact:.6f}, "
      f"Monte Carlo {mean:.6f} +- {se:.6f}")
