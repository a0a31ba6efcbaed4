"""Spectra of symmetric random matrices filled with stationary processes.

A process path of length N(N+1)/2 is written into the upper triangle of a
symmetric N x N matrix through a bijective filling map; the package samples
such ensembles, summarizes their empirical spectra against the semicircle
law, and verifies the moment-decay and filling-concentration assumptions
behind the convergence/non-convergence dichotomy with exact oracles.
"""

from .filling import CUSTOM, DIAGONAL, ROWWISE, FillingMap, make_filling
from .process import (
    BinaryChain,
    DecayFit,
    FiniteMarkovChain,
    GaussianMarkov,
    GibbsPotential,
    Path,
    binary_closed_form_moment,
    exact_mixed_moment,
    fit_decay_constants,
    gaussian_isserlis_moment,
    gibbs_to_chain,
    ising_potential,
    process_from_json,
    process_to_json,
    sample_path,
    sample_paths,
)
from .seeding import seed_for_trial
from .spectra import (
    EigensolverError,
    EnsembleSample,
    SpectralSummary,
    build_matrix,
    catalan,
    eigenvalues,
    empirical_moment,
    ks_statistic,
    semicircle_cdf,
    semicircle_curve,
    semicircle_density,
    summarize,
)
from .verify import (
    CheckResult,
    MarginEstimate,
    VerificationReport,
    check_filling_assumption,
    check_process_assumption,
    expected_trace_moment_bruteforce,
    fourth_moment_margin,
    monte_carlo_trace_moment,
    require_square_moment_family,
)

__version__ = "0.1.0"
