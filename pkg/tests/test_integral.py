import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twoinner import (
    InconsistencyError,
    InvalidDimension,
    InvalidInput,
    InvalidInstance,
    PositivePair,
    ScalarPair,
    SeededGenerator,
    additive_reverse,
    axiom_suite,
    discrete_evaluator,
    moments,
    premise_check,
    prop_bounds,
    synchronous,
    two_inner_phi,
    two_norm_phi,
)
from twoinner.integral import (
    PROP_IDS,
    QuadratureGrid,
    WeightedTriple,
    monotone_instance,
    quad_integral,
    random_grid,
)


def power_integral(k, a=1, b=2):
    return F(b ** (k + 1) - a ** (k + 1), k + 1)


# exact moments of f = x^2, g = x, h = 1 on [1, 2]
FF, GG, HH = power_integral(4), power_integral(2), power_integral(0)
FG, FH, GH = power_integral(3), power_integral(2), power_integral(1)
GAP_FF = FF * HH - FH**2           # 34/45
GAP_GG = GG * HH - GH**2           # 1/12
GAP_FG = FG * HH - FH * GH         # 1/4
M_LO, M_HI = 2.0, 4.0


@pytest.fixture(scope="module")
def worked():
    grid = QuadratureGrid.simpson(1.0, 2.0, 2001)
    triple = WeightedTriple.from_functions(grid, lambda x: x**2, lambda x: x, lambda x: 1.0)
    return grid, triple, PositivePair(M_LO, M_HI)


def brute_double(f, g, h, mass):
    total = 0.0
    n = len(f)
    for i in range(n):
        for j in range(n):
            total += mass[i] * mass[j] * (f[i] * h[j] - f[j] * h[i]) * (g[i] * h[j] - g[j] * h[i])
    return total / 2


class TestGrids:
    def test_trapezoid_measure(self):
        grid = QuadratureGrid.trapezoid(0.0, 1.0, 101)
        assert quad_integral(np.ones(101), grid) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("k, tol", [(2, 1e-9), (4, 1e-8)])
    def test_simpson_powers(self, k, tol):
        grid = QuadratureGrid.simpson(1.0, 2.0, 2001)
        assert abs(quad_integral(grid.nodes**k, grid) - float(power_integral(k))) <= tol

    @pytest.mark.parametrize("n", [2, 4])
    def test_simpson_needs_odd(self, n):
        with pytest.raises(InvalidInput):
            QuadratureGrid.simpson(0, 1, n)

    def test_weights_positive(self):
        with pytest.raises(InvalidInput):
            QuadratureGrid([0.0, 1.0], [1.0, 0.0])

    def test_length_mismatch(self):
        grid = QuadratureGrid.trapezoid(0, 1, 5)
        with pytest.raises(InvalidInput):
            quad_integral(np.ones(4), grid)
        with pytest.raises((InvalidInput, InvalidDimension)):
            moments(WeightedTriple(np.ones(4), np.ones(4), np.ones(4), np.ones(4)), grid)

    def test_negative_phi(self):
        with pytest.raises(InvalidInput):
            WeightedTriple(np.ones(3), np.ones(3), np.ones(3), [1, -1, 1])


class TestTwoInnerPhi:
    def test_unit_interval(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 1001)
        t = WeightedTriple.from_functions(grid, lambda x: x, lambda x: x**2, lambda x: 1.0)
        rep = two_inner_phi(t, grid)
        assert rep.two_inner_det == pytest.approx(1 / 12, abs=1e-9)
        assert rep.two_inner_double == pytest.approx(1 / 12, abs=1e-9)
        assert rep.residual_ok

    def test_worked(self, worked):
        grid, t, _ = worked
        rep = two_inner_phi(t, grid)
        assert rep.two_inner_det == pytest.approx(float(GAP_FG), abs=1e-9)
        assert rep.cross_residual <= 1e-9 * rep.scale
        for key, exact in zip(("ff", "gg", "hh", "fg", "fh", "gh"), (FF, GG, HH, FG, FH, GH)):
            assert rep.moments[key] == pytest.approx(float(exact), abs=1e-8)

    def test_f_equals_g(self):
        grid = QuadratureGrid.simpson(0.0, 2.0, 51)
        f = np.sin(grid.nodes * 3)
        rep = two_inner_phi(WeightedTriple(f, f, np.ones(51), np.ones(51)), grid)
        assert rep.two_inner_det >= 0
        assert rep.two_inner_det == pytest.approx(two_norm_phi(f, np.ones(51), np.ones(51), grid) ** 2)

    @given(st.integers(2, 24), st.integers(0, 2**32))
    def test_double_sum_matches_brute_force(self, n, seed):
        g = SeededGenerator(seed)
        grid = random_grid(g, n)
        f, gg, h = (g.uniform(n) for _ in range(3))
        phi = g.uniform(n, 0.0, 2.0)
        rep = two_inner_phi(WeightedTriple(f, gg, h, phi), grid)
        oracle = brute_double(f, gg, h, grid.weights * phi)
        assert rep.two_inner_double == pytest.approx(oracle, rel=1e-12, abs=1e-15)
        assert rep.residual_ok

    def test_blocked_sum_large_grid(self):
        g = SeededGenerator(99)
        n = 700  # more than one block
        grid = random_grid(g, n)
        t = WeightedTriple(g.uniform(n), g.uniform(n), g.uniform(n), np.ones(n))
        rep = two_inner_phi(t, grid)
        assert rep.cross_residual <= 1e-9 * rep.scale


class TestTwoNormPhi:
    def test_unit_interval(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 1001)
        x = grid.nodes
        assert two_norm_phi(x, np.ones_like(x), np.ones_like(x), grid) == pytest.approx(
            math.sqrt(1 / 12), abs=1e-9)

    def test_dependent(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 11)
        h = grid.nodes + 1
        assert two_norm_phi(h, h, np.ones(11), grid) == pytest.approx(0.0, abs=1e-7)

    def test_worked(self, worked):
        grid, t, _ = worked
        assert two_norm_phi(t.f, t.h, t.phi, grid) ** 2 == pytest.approx(float(GAP_FF), abs=1e-6)


class TestDiscreteSoundness:
    def test_axioms_on_grid_measure(self):
        g = SeededGenerator(17)
        grid = random_grid(g, 12)
        phi = g.uniform(12, 0.0, 2.0)
        phi[[2, 7]] = 0.0
        ev, mask = discrete_evaluator(grid, phi)
        assert mask.sum() == 10
        assert axiom_suite(ev, SeededGenerator(1), 500).passed

    def test_evaluator_matches_moments(self):
        g = SeededGenerator(23)
        grid = random_grid(g, 9)
        t = WeightedTriple(g.uniform(9), g.uniform(9), g.uniform(9), g.uniform(9, 0.1, 1.0))
        ev, mask = discrete_evaluator(grid, t.phi)
        rep = two_inner_phi(t, grid)
        assert ev.two_inner(t.f[mask], t.g[mask], t.h[mask]) == pytest.approx(rep.two_inner_det, rel=1e-12)

    def test_needs_two_support_nodes(self):
        grid = QuadratureGrid.trapezoid(0, 1, 3)
        with pytest.raises(InvalidInstance):
            discrete_evaluator(grid, [1.0, 0.0, 0.0])


class TestSynchronous:
    grid = QuadratureGrid.simpson(0.0, 1.0, 101)

    def test_same_sense(self):
        x = self.grid.nodes
        assert synchronous(x, x**2, self.grid).synchronous

    def test_opposite_sense(self):
        x = self.grid.nodes
        res = synchronous(x, -x, self.grid)
        assert not res.synchronous
        i, j = res.worst_pair
        assert (x[i] - x[j]) * (-x[i] + x[j]) < 0

    def test_constant(self):
        x = self.grid.nodes
        assert synchronous(np.full_like(x, 3.0), np.cos(7 * x), self.grid).synchronous

    def test_zero_phi_nodes_ignored(self):
        x = self.grid.nodes
        p = x.copy()
        p[50] = -10.0
        phi = np.ones_like(x)
        assert not synchronous(x, p, self.grid, phi).synchronous
        phi[50] = 0.0
        assert synchronous(x, p, self.grid, phi).synchronous

    def test_scan_limit(self):
        grid = QuadratureGrid.trapezoid(0, 1, 50)
        x = grid.nodes
        with pytest.raises(InvalidInput):
            synchronous(x, x, grid, max_nodes=10)
        assert synchronous(x, x, grid, max_nodes=10, allow_large=True).synchronous


class TestPremise:
    def test_worked_holds(self, worked):
        grid, t, pair = worked
        rep = premise_check(t, pair, grid)
        assert rep.ok and rep.sign_ok and rep.sign_value >= 0

    def test_fails_on_unit_interval(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 101)
        t = WeightedTriple.from_functions(grid, lambda x: x**2, lambda x: x, lambda x: 1.0)
        rep = premise_check(t, PositivePair(0.5, 4.0), grid)
        assert not rep.ok
        i, j = rep.synchronous.worst_pair
        assert grid.nodes[i] + grid.nodes[j] < 0.5

    def test_degenerate(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 21)
        g = np.cos(grid.nodes)
        t = WeightedTriple(1.5 * g, g, np.ones(21), np.ones(21))
        rep = premise_check(t, PositivePair(1.5, 1.5), grid)
        assert rep.ok
        assert rep.sign_value == pytest.approx(0.0, abs=1e-15)

    def test_h_vanishing(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 5)
        h = np.array([1.0, 0.0, 1.0, 1.0, 1.0])
        t = WeightedTriple(np.ones(5), np.ones(5), h, np.ones(5))
        with pytest.raises(InvalidInstance):
            premise_check(t, PositivePair(1, 2), grid)
        # allowed where phi vanishes
        t0 = WeightedTriple(np.ones(5), np.ones(5), h, [1, 0, 1, 1, 1])
        premise_check(t0, PositivePair(1, 2), grid)


class TestPropBounds:
    def test_worked_values(self, worked):
        grid, t, pair = worked
        lo, hi = M_LO, M_HI
        gap = GAP_FF * GAP_GG - GAP_FG**2
        assert gap == F(1, 2160)
        norms = math.sqrt(GAP_FF * GAP_GG)
        fg = float(GAP_FG)
        expected = {
            "3.6": (float(gap), 0.25 * (hi - lo) ** 2 * float(GAP_GG) ** 2),
            "3.7": (norms, 0.5 * (hi + lo) / math.sqrt(lo * hi) * fg),
            "3.8": (norms - fg, 0.5 * (math.sqrt(hi) - math.sqrt(lo)) ** 2 / math.sqrt(lo * hi) * fg),
            "3.9": (float(gap), 0.25 * (hi - lo) ** 2 / (lo * hi) * fg**2),
            "3.10": (math.sqrt(GAP_FF) + math.sqrt(GAP_GG)
                     - math.sqrt(GAP_FF + GAP_GG + 2 * GAP_FG),
                     (math.sqrt(hi) - math.sqrt(lo)) / (lo * hi) ** 0.25 * math.sqrt(fg)),
        }
        for which, (lhs, rhs) in expected.items():
            rep = prop_bounds(t, pair, grid, which)
            assert rep.hypothesis_ok and rep.ok and rep.slack > 0
            assert rep.lhs == pytest.approx(lhs, abs=1e-7)
            assert rep.rhs == pytest.approx(rhs, rel=1e-7)

    def test_rhs_of_3_6(self, worked):
        grid, t, pair = worked
        rep = prop_bounds(t, pair, grid, "3.6")
        assert rep.rhs == pytest.approx(1 / 144, rel=1e-7)

    def test_alternative_constants(self, worked):
        grid, t, pair = worked
        r7 = prop_bounds(t, pair, grid, "3.7")
        assert r7.extras["alt_rhs"] == pytest.approx(0.5 * 2 / math.sqrt(8) * 0.25, rel=1e-7)
        assert r7.extras["alt_holds"] is False
        assert r7.lhs == pytest.approx(0.250925, abs=1e-6)
        r9 = prop_bounds(t, pair, grid, "3.9")
        assert r9.extras["alt_holds"] is True

    def test_f_equals_g(self):
        grid = QuadratureGrid.simpson(1.0, 2.0, 101)
        t = WeightedTriple.from_functions(grid, lambda x: x, lambda x: x, lambda x: 1.0)
        rep = prop_bounds(t, PositivePair(0.5, 2.0), grid, "3.6")
        assert rep.lhs == pytest.approx(0.0, abs=1e-15)

    def test_unknown_id(self, worked):
        with pytest.raises(InvalidInput):
            prop_bounds(worked[1], worked[2], worked[0], "3.11")

    def test_premise_failure_flagged(self):
        grid = QuadratureGrid.simpson(0.0, 1.0, 101)
        t = WeightedTriple.from_functions(grid, lambda x: x**2, lambda x: x, lambda x: 1.0)
        rep = prop_bounds(t, PositivePair(0.5, 4.0), grid, "3.6")
        assert rep.hypothesis_ok is False and rep.ok

    def test_negative_two_inner_under_premise(self, worked):
        grid, t, pair = worked
        sync = premise_check(t, pair, grid)
        flipped = WeightedTriple(-t.f, t.g, t.h, t.phi)
        with pytest.raises(InconsistencyError):
            prop_bounds(flipped, pair, grid, "3.7", premise=sync)

    def test_matches_additive_reverse(self):
        g = SeededGenerator(31)
        grid = random_grid(g, 40)
        pair = PositivePair(0.7, 2.5)
        t = monotone_instance(g, grid, pair)
        ev, mask = discrete_evaluator(grid, t.phi)
        rep = prop_bounds(t, pair, grid, "3.6")
        add = additive_reverse(ev, t.f[mask], t.g[mask], t.h[mask], ScalarPair(pair.m, pair.M))
        assert rep.lhs == pytest.approx(add.lhs, rel=1e-9, abs=1e-15)
        assert rep.rhs == pytest.approx(add.rhs, rel=1e-9)
        assert add.hypothesis_ok

    def test_random_monotone_instances(self):
        g = SeededGenerator(41)
        for k in range(1000):
            n = 8 + k % 40
            grid = random_grid(g, n)
            m = float(g.uniform(1, 0.1, 2.0)[0])
            pair = PositivePair(m, m * float(g.uniform(1, 1.05, 5.0)[0]))
            t = monotone_instance(g, grid, pair)
            premise = premise_check(t, pair, grid)
            assert premise.ok and premise.sign_ok
            for which in PROP_IDS:
                rep = prop_bounds(t, pair, grid, which, premise=premise)
                assert rep.hypothesis_ok and rep.ok, (k, which, rep)

    def test_monotone_needs_gap(self):
        with pytest.raises(InvalidInstance):
            monotone_instance(SeededGenerator(0), QuadratureGrid.trapezoid(0, 1, 5), PositivePair(1, 1))
