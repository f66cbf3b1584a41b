"""
Tests for core.bench module.
"""

import numpy as np
import pytest

from core.bench import BENCH_COLUMNS, random_geometric_graph, run_bench, strip_timings


@pytest.fixture
def rows():
    return run_bench(sizes=[32], thetas=[1.0, 0.5], orders=[5, 40], J=3, seed=7)


class TestRunBench:
    """Tests for the timing and accuracy sweep."""

    def test_one_row_per_cell(self, rows):
        assert len(rows) == 4
        assert [(row["theta"], row["M"]) for row in rows] == [(1.0, 5), (1.0, 40), (0.5, 5), (0.5, 40)]
        for row in rows:
            assert set(row) <= set(BENCH_COLUMNS)
            assert "error" not in row
            assert row["n"] == 32

    def test_matvec_count(self, rows):
        for row in rows:
            assert row["matvecs"] == 2 * row["M"]

    def test_error_within_bound(self, rows):
        for row in rows:
            assert row["max_error"] <= row["bound"] + 1e-10

    def test_error_shrinks_with_order(self, rows):
        for theta in (1.0, 0.5):
            low, high = [row for row in rows if row["theta"] == theta]
            assert high["max_error"] <= low["max_error"]

    def test_band_errors_against_order(self, rows):
        """M=40 cuts the fine-band error tenfold from M=5; no band gets worse."""
        for theta in (1.0, 0.5):
            low, high = [row for row in rows if row["theta"] == theta]
            assert len(low["band_errors"]) == 4
            assert max(low["band_errors"]) == low["max_error"]
            low_errors, high_errors = np.array(low["band_errors"]), np.array(high["band_errors"])
            assert np.all(high_errors <= low_errors + 1e-12)
            assert np.all(high_errors[2:] <= 0.1 * low_errors[2:] + 1e-12)

    def test_single_expansion_matches_composition(self, rows):
        for row in rows:
            assert row["composition_gap"] < 1e-9

    def test_deterministic_without_timings(self):
        first = run_bench(sizes=[16], thetas=[0.7], orders=[8], J=2, seed=1)
        second = run_bench(sizes=[16], thetas=[0.7], orders=[8], J=2, seed=1)
        assert strip_timings(first) == strip_timings(second)
        assert "fast_s" not in strip_timings(first)[0]

    def test_failed_cell_recorded(self):
        rows = run_bench(sizes=[16], thetas=[1.0], orders=[0, 6], J=2)
        assert rows[0]["M"] == 0
        assert "M=0" in rows[0]["error"]
        assert "error" not in rows[1]


def test_random_geometric_graph_seeded():
    a = random_geometric_graph(20, seed=2)
    b = random_geometric_graph(20, seed=2)
    assert a.n_vertices == 20
    assert a.edges == b.edges
    assert np.all(np.array([w for _, _, w in a.edges]) > 0)
