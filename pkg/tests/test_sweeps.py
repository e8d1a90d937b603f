import numpy as np

from twoinner import TwoInnerEvaluator
from twoinner.sweeps import BoundTally, axiom_sweep, bound_sweep, identity_sweep


class Skewed(TwoInnerEvaluator):
    """Scales the form by a vector-dependent factor, which breaks the bounds."""

    def two_inner(self, x, y, z):
        val = super().two_inner(x, y, z)
        return val * (1.0 + 0.5 * np.abs(np.asarray(x)[..., 0]))


def test_cells_are_order_independent():
    a = axiom_sweep(5, 100, [2, 3], ["real", "complex"])
    b = axiom_sweep(5, 100, [3, 2], ["complex", "real"])
    for name in a.checks:
        assert a.checks[name].max_residual == b.checks[name].max_residual


def test_identity_counts():
    res = identity_sweep(1, 101, [2, 4, 6], ["real"])
    assert all(c.count == 101 for c in res.values())


def test_clean_bounds():
    tallies = bound_sweep(2, 300, [3, 4], ["real", "complex"])
    assert all(t.passed and t.accepted > 0 for t in tallies.values())


def test_defect_detected_with_instance():
    tallies = bound_sweep(3, 400, [3], ["real"], evaluator=Skewed)
    bad = [t for t in tallies.values() if t.violations]
    assert bad
    assert {"x", "y", "z", "field", "dim"} <= set(bad[0].first_violation)


def test_tally_merge():
    a = BoundTally("2.3", 4, 2, 0, 0.5)
    b = BoundTally("2.3", 6, 3, 1, -2.0, {"x": 1})
    m = a.merge(b)
    assert (m.evaluated, m.accepted, m.violations, m.min_ratio) == (10, 5, 1, -2.0)
    assert m.first_violation == {"x": 1} and not m.passed
