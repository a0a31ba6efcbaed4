import itertools
import json
import math

import numpy as np
import pytest

from specfill.filling import FillingMap
from specfill.process import BinaryChain, FiniteMarkovChain, GaussianMarkov, ising_potential
from specfill.verify import (
    MarginEstimate,
    check_filling_assumption,
    check_process_assumption,
    expected_trace_moment_bruteforce,
    fourth_moment_margin,
    monte_carlo_trace_moment,
    require_square_moment_family,
)

# Fourth-moment path sums, frozen from two independent oracles (the mixed-
# moment path sum below and an exhaustive enumeration over all 2^L weighted
# +-1 configurations); they agree to ~1e-13.  Note the (p=0.6, n=4) reversal:
# the row-wise excess is an asymptotic effect and flips sign at small n for
# weak correlation.
M4_TABLE = {
    (0.6, 4): (1.786802432000, 1.800984320000),
    (0.6, 5): (1.838524027278, 1.837290174317),
    (0.6, 6): (1.873142542233, 1.860036886553),
    (0.7, 4): (1.922723584000, 1.904537920000),
    (0.7, 5): (1.982594495232, 1.918770301927),
    (0.7, 6): (2.021324921692, 1.920606186947),
    (0.8, 4): (2.223878656000, 2.143275520000),
    (0.8, 5): (2.322458318997, 2.133378215215),
    (0.8, 6): (2.381167161813, 2.096018155482),
}


class TestBruteForceTraceMoment:
    def test_single_entry(self):
        assert expected_trace_moment_bruteforce(
            BinaryChain(0.7), FillingMap.diagonal(1), k=2
        ) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("n", [2, 4, 6])
    @pytest.mark.parametrize("maker", [FillingMap.diagonal, FillingMap.rowwise])
    def test_second_moment_is_unit_variance_identity(self, n, maker):
        for spec in (BinaryChain(0.55), ising_potential(0.2)):
            val = expected_trace_moment_bruteforce(spec, maker(n), k=2)
            assert val == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("p,n", sorted(M4_TABLE))
    def test_fourth_moment_frozen_values(self, p, n):
        row, diag = M4_TABLE[(p, n)]
        got_row = expected_trace_moment_bruteforce(BinaryChain(p), FillingMap.rowwise(n), k=4)
        got_diag = expected_trace_moment_bruteforce(BinaryChain(p), FillingMap.diagonal(n), k=4)
        assert got_row == pytest.approx(row, abs=1e-9)
        assert got_diag == pytest.approx(diag, abs=1e-9)

    def test_rowwise_excess_where_it_holds(self):
        for (p, n), (row, diag) in M4_TABLE.items():
            if (p, n) == (0.6, 4):
                assert row < diag  # documented small-n reversal
            else:
                assert row > diag

    def test_exhaustive_configuration_oracle(self):
        # fully independent check at n=3: weight every +-1 configuration
        p, n = 0.7, 3
        fm = FillingMap.rowwise(n)
        inv = np.array([[fm.phi_inv(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)])
        total = 0.0
        for config in itertools.product((-1.0, 1.0), repeat=fm.size):
            z = np.asarray(config)
            weight = 0.5
            for a, b in zip(config, config[1:]):
                weight *= p if a == b else 1 - p
            a_mat = z[inv - 1] / math.sqrt(n)
            sq = a_mat @ a_mat
            total += weight * float((sq * sq).sum()) / n
        assert expected_trace_moment_bruteforce(
            BinaryChain(p), fm, k=4
        ) == pytest.approx(total, abs=1e-12)

    def test_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            expected_trace_moment_bruteforce(BinaryChain(0.7), FillingMap.diagonal(120), k=4)

    def test_worker_partition_is_bit_identical(self):
        fm = FillingMap.rowwise(5)
        serial = expected_trace_moment_bruteforce(BinaryChain(0.7), fm, k=4, workers=1)
        parallel = expected_trace_moment_bruteforce(BinaryChain(0.7), fm, k=4, workers=3)
        assert serial == parallel  # fixed-order reduction of per-slice partials

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="does not match"):
            expected_trace_moment_bruteforce(BinaryChain(0.7), FillingMap.diagonal(4), n=5, k=2)


class TestMonteCarloAgreement:
    @pytest.mark.parametrize("k", [2, 4])
    @pytest.mark.parametrize("kind", ["diagonal", "rowwise"])
    def test_oracle_inside_four_sigma(self, k, kind):
        fm = FillingMap.diagonal(6) if kind == "diagonal" else FillingMap.rowwise(6)
        spec = BinaryChain(0.7)
        exact = expected_trace_moment_bruteforce(spec, fm, k=k)
        mean, se = monte_carlo_trace_moment(spec, fm, k, trials=20_000, seed=314)
        assert abs(mean - exact) <= 4 * se + 1e-12

    def test_unsupported_order(self):
        with pytest.raises(ValueError, match="k in"):
            monte_carlo_trace_moment(BinaryChain(0.7), FillingMap.diagonal(4), 6, 10, 0)

    def test_three_state_chain_agrees_too(self):
        a = math.sqrt(1.5)
        chain = FiniteMarkovChain.from_transition(
            [-a, 0.0, a], [[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]]
        )
        fm = FillingMap.diagonal(5)
        exact = expected_trace_moment_bruteforce(chain, fm, k=4)
        mean, se = monte_carlo_trace_moment(chain, fm, 4, trials=30_000, seed=77)
        assert abs(mean - exact) <= 4 * se


class TestProcessAssumptionChecks:
    def test_binary_passes_with_exact_rate(self):
        report = check_process_assumption(BinaryChain(0.7))
        assert report.passed
        decay = {c.name: c for c in report.checks}["moment_decay"]
        assert "beta=0.400" in decay.details

    def test_iid_passes_with_beta_zero(self):
        chain = FiniteMarkovChain([-1.0, 1.0], [[0.5, 0.5], [0.5, 0.5]], [0.5, 0.5])
        report = check_process_assumption(chain, k_max=4, budget=120)
        assert report.passed
        assert "beta=0.000" in {c.name: c for c in report.checks}["moment_decay"].details

    def test_asymmetric_chain_fails_odd_moments_only(self):
        chain = FiniteMarkovChain.from_transition([-1.0, 1.0], [[0.8, 0.2], [0.4, 0.6]])
        report = check_process_assumption(chain, k_max=4, budget=120)
        by_name = {c.name: c for c in report.checks}
        assert by_name["unit_second_moment"].passed  # +-1 values
        assert not by_name["odd_moments_vanish"].passed
        assert not report.passed

    def test_periodic_chain_reports_failures_not_exceptions(self):
        chain = FiniteMarkovChain([-1.0, 1.0], [[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
        report = check_process_assumption(chain, k_max=4, budget=60)
        by_name = {c.name: c for c in report.checks}
        assert not by_name["moment_decay"].passed
        assert "no beta < 1" in by_name["moment_decay"].details

    def test_report_serialization_and_table(self):
        report = check_process_assumption(BinaryChain(0.9), k_max=4, budget=100)
        d = report.to_json_dict()
        json.dumps(d)  # must be serializable as-is
        assert d["passed"] is True
        table = report.format_table()
        assert "moment_decay" in table and "PASS" in table


class TestFillingAssumptionChecks:
    def test_diagonal_200(self):
        report = check_filling_assumption(FillingMap.diagonal(200))
        assert report.passed
        by_name = {c.name: c for c in report.checks}
        assert by_name["fiber_multiplicity_bounded"].margin >= 0
        assert "J = 1," in by_name["adjacent_step_fraction"].details

    def test_rowwise_200_fails_both(self):
        report = check_filling_assumption(FillingMap.rowwise(200))
        assert not report.passed
        by_name = {c.name: c for c in report.checks}
        n = 200
        frac = (n * (n - 1) // 2 + 1) / n**2
        assert frac >= 0.49 * (1 - 1 / n)
        assert f"J = {n*(n-1)//2 + 1}," in by_name["adjacent_step_fraction"].details
        assert not by_name["adjacent_step_fraction"].passed

    def test_size_guard(self):
        with pytest.raises(ValueError, match="n <= 400"):
            check_filling_assumption(FillingMap.diagonal(401))


class TestFourthMomentMargin:
    def test_square_moment_gate(self):
        require_square_moment_family(BinaryChain(0.7))  # +-1 chain: exact
        with pytest.raises(ValueError, match="Z_i\\^2 Z_j\\^2"):
            require_square_moment_family(
                FiniteMarkovChain.from_transition(
                    [-math.sqrt(1.5), 0.0, math.sqrt(1.5)],
                    [[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]],
                )
            )

    def test_gaussian_has_no_chain_oracle(self):
        with pytest.raises(TypeError, match="no exact moment oracle"):
            fourth_moment_margin(GaussianMarkov(0.5), "rowwise", [16], 4, 0)

    def test_rowwise_margin_positive_smoke(self):
        ests = fourth_moment_margin(BinaryChain(0.7), "rowwise", [64, 128], trials=12, seed=5)
        assert [e.n for e in ests] == [64, 128]
        for est in ests:
            assert est.zscore > 5

    def test_diagonal_margin_near_zero_smoke(self):
        (est,) = fourth_moment_margin(BinaryChain(0.7), "diagonal", [128], trials=12, seed=5)
        assert abs(est.margin) < 0.08

    def test_independent_entries_restore_rowwise_convergence(self):
        # p = 1/2 decouples the chain, so even the row-wise filling keeps m4 near 2
        (est,) = fourth_moment_margin(BinaryChain(0.5), "rowwise", [128], trials=12, seed=5)
        assert abs(est.margin) < 0.08

    def test_margin_estimate_fields(self):
        est = MarginEstimate(n=10, trials=4, mean=2.5, stderr=0.1)
        assert est.margin == pytest.approx(0.5)
        assert est.zscore == pytest.approx(5.0)

    def test_needs_two_trials(self):
        with pytest.raises(ValueError, match="2 trials"):
            fourth_moment_margin(BinaryChain(0.7), "rowwise", [16], trials=1, seed=0)

    def test_deterministic_in_seed(self):
        a = fourth_moment_margin(BinaryChain(0.7), "rowwise", [32], trials=5, seed=9)
        b = fourth_moment_margin(BinaryChain(0.7), "rowwise", [32], trials=5, seed=9)
        assert a[0].mean == b[0].mean
