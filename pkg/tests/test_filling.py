import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specfill.filling import DIAGONAL, ROWWISE, FillingMap, make_filling


def diagonal_walk(n):
    """Enumeration-order oracle: main diagonal, then each superdiagonal."""
    cells = []
    for d in range(n):
        for t in range(1, n - d + 1):
            cells.append((t, t + d))
    return cells


def rowwise_walk(n):
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


class TestBijectivity:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 17, 64, 200, 500])
    @pytest.mark.parametrize("maker", [FillingMap.diagonal, FillingMap.rowwise])
    def test_forward_inverse_identities(self, n, maker):
        fm = maker(n)
        m = np.arange(1, fm.size + 1)
        i, j = fm._fwd_i[1:], fm._fwd_j[1:]
        assert np.array_equal(fm._inv[i, j], m)
        assert np.array_equal(fm._inv[j, i], m)
        # every upper-triangle cell is hit exactly once
        ii, jj = np.triu_indices(n)
        assert np.array_equal(np.sort(fm._inv[ii + 1, jj + 1]), m)

    def test_rejects_duplicate_cells(self):
        with pytest.raises(ValueError, match="bijection"):
            FillingMap.from_permutation(2, [(1, 1), (1, 2), (1, 2)])

    def test_rejects_wrong_count(self):
        with pytest.raises(ValueError, match="need 3 cells"):
            FillingMap.from_permutation(2, [(1, 1)])


class TestDiagonalOrder:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 33, 120, 500])
    def test_closed_form_matches_walk(self, n):
        fm = FillingMap.diagonal(n)
        for m, cell in enumerate(diagonal_walk(n), start=1):
            assert fm.phi(m) == cell

    def test_closed_form_matches_walk_every_n_up_to_500(self):
        # the closed-form inverse is authoritative; the walk enumeration
        # (main diagonal, then each superdiagonal) is the exhaustive check
        for n in range(1, 501):
            fm = FillingMap.diagonal(n)
            i_walk = np.concatenate([np.arange(1, n - d + 1) for d in range(n)])
            j_walk = np.concatenate([np.arange(1 + d, n + 1) for d in range(n)])
            assert np.array_equal(fm._fwd_i[1:], i_walk), n
            assert np.array_equal(fm._fwd_j[1:], j_walk), n

    def test_first_positions(self):
        fm = FillingMap.diagonal(9)
        assert fm.phi(1) == (1, 1)
        assert fm.phi(9 + 1) == (1, 2)

    def test_last_position_is_corner(self):
        for n in (2, 5, 31):
            fm = FillingMap.diagonal(n)
            assert fm.phi_inv(1, n) == n * (n + 1) // 2

    def test_superdiagonal_start(self):
        for n in (4, 10, 57):
            # closed form: size - (n-1)n/2 + 1
            assert FillingMap.diagonal(n).phi_inv(1, 2) == n + 1


class TestRowwiseOrder:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 33, 120])
    def test_matches_walk(self, n):
        fm = FillingMap.rowwise(n)
        for m, cell in enumerate(rowwise_walk(n), start=1):
            assert fm.phi(m) == cell

    def test_position_n_is_row_end(self):
        for n in (2, 6, 45):
            assert FillingMap.rowwise(n).phi(n) == (1, n)


class TestMetric:
    def test_range_checks(self):
        fm = FillingMap.diagonal(4)
        with pytest.raises(ValueError, match="out of range"):
            fm.phi(0)
        with pytest.raises(ValueError, match="out of range"):
            fm.phi(11)
        with pytest.raises(ValueError, match="out of range"):
            fm.phi_inv(0, 3)
        with pytest.raises(ValueError, match="out of range"):
            fm.phi_inv(1, 5)

    def test_canonicalization(self):
        fm = FillingMap.rowwise(6)
        assert fm.phi_inv(2, 1) == fm.phi_inv(1, 2)

    def test_identity_distance(self):
        fm = FillingMap.diagonal(5)
        assert fm.distance((2, 4), (2, 4)) == 0
        assert fm.distance((4, 2), (2, 4)) == 0

    def test_derived_small_distances(self):
        # diagonal N=3: positions of (1,1) and (2,2) are 1 and 2
        assert FillingMap.diagonal(3).distance((1, 1), (2, 2)) == 1
        # rowwise N=3: positions of (1,3) and (2,2) are 3 and 4
        assert FillingMap.rowwise(3).distance((1, 3), (2, 2)) == 1

    @settings(max_examples=100, deadline=None)
    @given(
        n=st.integers(2, 40),
        data=st.data(),
    )
    def test_symmetry_properties(self, n, data):
        fm = FillingMap.diagonal(n)
        coord = st.integers(1, n)
        a = (data.draw(coord), data.draw(coord))
        b = (data.draw(coord), data.draw(coord))
        assert fm.distance(a, b) == fm.distance(b, a)
        assert fm.distance(a, b) == fm.distance((a[1], a[0]), b)


class TestNeighborCount:
    @pytest.mark.parametrize("n", range(2, 501, 49))
    def test_rowwise_formula_spot(self, n):
        assert FillingMap.rowwise(n).neighbor_count() == n * (n - 1) // 2 + 1

    def test_rowwise_n4_by_enumeration(self):
        fm = FillingMap.rowwise(4)
        count = 0
        for m in range(1, fm.size):
            (i1, j1), (i2, j2) = fm.phi(m), fm.phi(m + 1)
            if (i1 == i2 and abs(j1 - j2) == 1) or (j1 == j2 and abs(i1 - i2) == 1):
                count += 1
        assert count == 7 == fm.neighbor_count()

    def test_single_cell_has_no_steps(self):
        assert FillingMap.rowwise(1).neighbor_count() == 0
        assert FillingMap.diagonal(1).neighbor_count() == 0

    def test_diagonal_grows_subquadratically(self):
        # observed: exactly one adjacent step (the last superdiagonal hop)
        counts = {n: FillingMap.diagonal(n).neighbor_count() for n in range(2, 51)}
        assert all(c == 1 for c in counts.values())
        assert max(c / n**2 for n, c in counts.items()) <= 0.25


class TestFiberProfile:
    def test_counts_sum_to_n(self):
        fm = FillingMap.rowwise(12)
        prof = fm.fiber_profile(3, 9)
        assert sum(prof.values()) == 12

    def test_equal_endpoints_all_collapse_to_zero(self):
        for fm in (FillingMap.diagonal(15), FillingMap.rowwise(15)):
            assert fm.fiber_profile(6, 6) == {0: 15}

    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_diagonal_bound_exhaustive(self, n):
        assert FillingMap.diagonal(n).max_fiber_count() <= 4

    def test_rowwise_profile_scales_with_n(self):
        # the row filling concentrates gaps: fibers grow like N, recorded here
        assert FillingMap.rowwise(100).max_fiber_count() == 100

    def test_max_fiber_matches_bruteforce(self):
        for maker in (FillingMap.diagonal, FillingMap.rowwise):
            fm = maker(13)
            best = 0
            for i in range(1, 14):
                for j in range(1, 14):
                    for gap, count in fm.fiber_profile(i, j).items():
                        if gap >= 1:
                            best = max(best, count)
            assert fm.max_fiber_count() == best


class TestCustomFilling:
    def test_file_round_trip(self, tmp_path):
        fm = FillingMap.diagonal(6)
        lines = ["# position cell_i cell_j"]
        lines += [f"{m} {fm.phi(m)[0]} {fm.phi(m)[1]}" for m in range(1, fm.size + 1)]
        f = tmp_path / "diag6.txt"
        f.write_text("\n".join(lines) + "\n")
        loaded = FillingMap.from_file(f)
        assert loaded.n == 6
        assert loaded == fm  # same bijection, so identical behavior

    def test_identity_order_equals_diagonal_reports(self, tmp_path):
        from specfill.verify import check_filling_assumption

        fm = FillingMap.diagonal(20)
        f = tmp_path / "c.txt"
        f.write_text(
            "\n".join(f"{m} {fm.phi(m)[0]} {fm.phi(m)[1]}" for m in range(1, fm.size + 1))
        )
        custom = FillingMap.from_file(f)
        a = check_filling_assumption(custom).to_json_dict()
        b = check_filling_assumption(fm).to_json_dict()
        assert a["checks"] == b["checks"]

    def test_rejects_non_triangular_count(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("1 1 1\n2 1 2\n")
        with pytest.raises(ValueError, match="triangular"):
            FillingMap.from_file(f)

    def test_rejects_duplicate_position(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("1 1 1\n1 1 2\n2 2 2\n")
        with pytest.raises(ValueError, match="duplicate"):
            FillingMap.from_file(f)

    def test_rejects_missing_cell(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("1 1 1\n2 1 2\n3 1 2\n")  # (2,2) never covered
        with pytest.raises(ValueError, match="bijection"):
            FillingMap.from_file(f)

    def test_make_filling_dispatch(self, tmp_path):
        assert make_filling("diagonal", 8).kind == DIAGONAL
        assert make_filling("rowwise", 8).kind == ROWWISE
        with pytest.raises(ValueError, match="unknown filling"):
            make_filling("spiral", 8)
