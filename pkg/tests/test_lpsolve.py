"""Tests for the dense two-phase simplex solver."""

import numpy as np
import pytest

from invcert import lpsolve
from invcert.lpsolve import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, solve

from oracles import lp_vertex_oracle


def random_bounded_lp(rng, n_vars, n_rows):
    """Random LP with a known feasible point and a bounding box."""
    G = rng.normal(size=(n_rows, n_vars))
    box = rng.uniform(1.0, 5.0, size=n_vars)
    x0 = rng.random(n_vars) * box
    h = G @ x0 + rng.uniform(0.1, 2.0, size=n_rows)
    c = rng.normal(size=n_vars)
    bounds = tuple((0.0, float(b)) for b in box)
    return c, G, h, bounds


class TestExamples:
    def test_single_variable(self):
        sol = solve(LinearProgram([1.0], [[1.0]], [1.0]))
        assert sol.status == OPTIMAL
        np.testing.assert_allclose(sol.x, [1.0])
        assert sol.objective_value == pytest.approx(1.0)

    def test_two_variable_vertex(self):
        # max x+y s.t. x+2y <= 4, 3x+y <= 6; best vertex from pairwise
        # constraint intersections is (1.6, 1.2) with value 2.8.
        lp = LinearProgram([1.0, 1.0], [[1.0, 2.0], [3.0, 1.0]], [4.0, 6.0])
        sol = solve(lp)
        assert sol.status == OPTIMAL
        np.testing.assert_allclose(sol.x, [1.6, 1.2], atol=1e-9)
        assert sol.objective_value == pytest.approx(2.8, abs=1e-9)
        oracle = lp_vertex_oracle([1, 1], lp.constraint_matrix, lp.constraint_bounds,
                                  [(0.0, 10.0), (0.0, 10.0)])
        assert sol.objective_value == pytest.approx(oracle, abs=1e-9)

    def test_infeasible(self):
        sol = solve(LinearProgram([1.0], [[1.0]], [-1.0]))
        assert sol.status == INFEASIBLE
        assert sol.x is None

    def test_unbounded(self):
        sol = solve(LinearProgram([1.0], np.zeros((0, 1)), []))
        assert sol.status == UNBOUNDED

    def test_free_variable_split(self):
        sol = solve(LinearProgram([-1.0], [[-1.0]], [3.0], bounds=((None, None),)))
        assert sol.status == OPTIMAL
        np.testing.assert_allclose(sol.x, [-3.0], atol=1e-9)

    def test_upper_bound_only_variable(self):
        sol = solve(LinearProgram([1.0], np.zeros((0, 1)), [], bounds=((None, 2.0),)))
        assert sol.status == OPTIMAL
        np.testing.assert_allclose(sol.x, [2.0])

    def test_crossed_bounds_infeasible(self):
        sol = solve(LinearProgram([1.0], np.zeros((0, 1)), [], bounds=((1.0, 0.0),)))
        assert sol.status == INFEASIBLE

    def test_phase1_negative_rhs(self):
        lp = LinearProgram([1.0, 1.0], [[-1.0, -1.0], [1.0, 1.0]], [-2.0, 5.0])
        sol = solve(lp)
        assert sol.status == OPTIMAL
        assert sol.objective_value == pytest.approx(5.0, abs=1e-9)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="coefficients"):
            LinearProgram([1.0, 2.0], [[1.0]], [1.0])
        with pytest.raises(ValueError, match="bounds"):
            LinearProgram([1.0], [[1.0], [2.0]], [1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            LinearProgram([np.inf], [[1.0]], [1.0])


class TestRandomSuite:
    def test_matches_vertex_enumeration(self):
        rng = np.random.default_rng(101)
        for _ in range(100):
            n_vars = int(rng.integers(2, 4))
            n_rows = int(rng.integers(1, 9))
            c, G, h, bounds = random_bounded_lp(rng, n_vars, n_rows)
            sol = solve(LinearProgram(c, G, h, bounds))
            assert sol.status == OPTIMAL
            oracle = lp_vertex_oracle(c, G, h, bounds)
            assert sol.objective_value == pytest.approx(oracle, abs=1e-8)

    def test_reported_optimum_is_feasible(self):
        rng = np.random.default_rng(103)
        for _ in range(60):
            n_vars = int(rng.integers(2, 6))
            n_rows = int(rng.integers(1, 13))
            c, G, h, bounds = random_bounded_lp(rng, n_vars, n_rows)
            sol = solve(LinearProgram(c, G, h, bounds))
            assert sol.status == OPTIMAL
            assert np.all(G @ sol.x <= h + 1e-9)
            for xj, (lo, hi) in zip(sol.x, bounds):
                assert lo - 1e-9 <= xj <= hi + 1e-9

    def test_weak_duality_on_sampled_points(self):
        rng = np.random.default_rng(107)
        checked = 0
        for _ in range(40):
            n_vars = int(rng.integers(2, 5))
            c, G, h, bounds = random_bounded_lp(rng, n_vars, int(rng.integers(1, 9)))
            sol = solve(LinearProgram(c, G, h, bounds))
            assert sol.status == OPTIMAL
            box = np.array([hi for _, hi in bounds])
            samples = rng.random((200, n_vars)) * box
            feasible = samples[np.all(G @ samples.T <= h[:, None], axis=0)]
            if feasible.size:
                checked += 1
                assert (feasible @ c).max() <= sol.objective_value + 1e-8
        assert checked > 10

    def test_deterministic_bit_identical(self):
        rng = np.random.default_rng(109)
        for _ in range(20):
            c, G, h, bounds = random_bounded_lp(rng, 3, 6)
            lp = LinearProgram(c, G, h, bounds)
            first, second = solve(lp), solve(lp)
            assert first.status == second.status
            assert first.x.tobytes() == second.x.tobytes()
            assert first.objective_value == second.objective_value
            assert first.duals.tobytes() == second.duals.tobytes()


class TestDuals:
    def test_strong_duality_simple(self):
        # max x+y s.t. x <= 1, y <= 2: duals (1, 1) and value 3.
        sol = solve(LinearProgram([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], [1.0, 2.0]))
        np.testing.assert_allclose(sol.duals, [1.0, 1.0], atol=1e-12)

    def test_duals_price_the_constraints(self):
        rng = np.random.default_rng(113)
        for _ in range(30):
            n_vars = int(rng.integers(2, 5))
            n_rows = int(rng.integers(2, 9))
            G = rng.normal(size=(n_rows, n_vars))
            x0 = rng.random(n_vars)
            h = G @ x0 + rng.uniform(0.1, 1.0, size=n_rows)
            c = rng.normal(size=n_vars)
            bounds = tuple((0.0, 3.0) for _ in range(n_vars))
            sol = solve(LinearProgram(c, G, h, bounds))
            assert sol.status == OPTIMAL
            assert np.all(sol.duals >= -1e-9)
            # Complementary slackness: positive duals sit on tight rows.
            slack = h - G @ sol.x
            assert np.all(slack[sol.duals > 1e-7] <= 1e-7)
