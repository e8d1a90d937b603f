"""Seeded property sweeps over random instances.

Every sweep takes a base seed and derives one independent stream per
(field, dimension) cell, so results do not depend on the order in which
cells run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .numeric import DEFAULT_TOL, Field, SeededGenerator, Tolerance, sample_vectors
from .reverse import (
    INEQUALITY_IDS,
    PositivePair,
    ScalarPair,
    additive_reverse,
    ball_instance,
    condition_check,
    i_identity,
    positive_reverse,
    product_step,
    quotient_reverse,
    triangle_identity,
    triangle_reverse,
)
from .space import CheckResult, InnerSpace, SuiteReport, TwoInnerEvaluator, axiom_suite

IDENTITY_CHECKS = ("condition_equivalence", "i_identity", "triangle_identity", "product_step")


def _cell_gen(seed: int, stream: str, field: Field, dim: int) -> SeededGenerator:
    tag = sum(ord(c) * 131**i for i, c in enumerate(f"{stream}/{field.value}/{dim}")) & ((1 << 63) - 1)
    return SeededGenerator(seed).spawn(tag)


def _fields(fields) -> list[Field]:
    return [Field.parse(f) for f in fields]


def axiom_sweep(seed: int, trials: int, dims, fields, tol: Tolerance = DEFAULT_TOL,
                evaluator=TwoInnerEvaluator) -> SuiteReport:
    """``axiom_suite`` with ``trials`` tuples for every (field, dim) cell, merged."""
    report = None
    for f in _fields(fields):
        for d in dims:
            ev = evaluator(InnerSpace.unit(d, f), tol)
            r = axiom_suite(ev, _cell_gen(seed, "axiom", f, d), trials, tol)
            report = r if report is None else report.merge(r)
    return report


def _split(total: int, dims) -> list[int]:
    dims = list(dims)
    base, extra = divmod(int(total), len(dims))
    return [base + (1 if i < extra else 0) for i in range(len(dims))]


def identity_sweep(seed: int, draws: int, dims, fields, tol: Tolerance = DEFAULT_TOL,
                   evaluator=TwoInnerEvaluator) -> dict[str, CheckResult]:
    """Unconditional identities on ``draws`` random instances per field (spread over ``dims``)."""
    acc = {name: CheckResult(name, 0.0, 0.0, 0) for name in IDENTITY_CHECKS}

    def add(name, residual, scale):
        residual = np.atleast_1d(residual)
        ratio = residual / tol.bound(np.atleast_1d(scale))
        acc[name] = acc[name].merge(CheckResult(name, float(residual.max()), float(ratio.max()),
                                                int(residual.size)))

    for f in _fields(fields):
        for d, n in zip(dims, _split(draws, dims)):
            if n == 0:
                continue
            ev = evaluator(InnerSpace.unit(d, f), tol)
            gen = _cell_gen(seed, "identity", f, d)
            x, y, z = (sample_vectors(gen, n, d, f) for _ in range(3))
            pair = _random_pair(gen, n, f)
            c = condition_check(ev, x, y, z, pair, tol)
            add("condition_equivalence", c.equivalence_residual, c.scale)
            ii = i_identity(ev, x, y, z, pair)
            add("i_identity", ii.residual, ii.scale)
            add("triangle_identity", *triangle_identity(ev, x, y, z))
            st = product_step(ev, x, y, z, pair)
            add("product_step", np.maximum(np.asarray(st.product) - st.bound, 0.0), st.scale)
    return acc


def _random_pair(gen, n: int, field: Field) -> ScalarPair:
    a, A = (sample_vectors(gen, n, 2, field)[:, 0] * 3.0 for _ in range(2))
    return ScalarPair(a, A)


def _random_positive(gen, n: int) -> PositivePair:
    m = gen.uniform(n, 0.1, 2.0)
    u = gen.uniform(n, 0.0, 1.0)
    # about 5% degenerate intervals with M = m
    M = np.where(u < 0.05, m, m * (1.0 + 4.0 * u))
    return PositivePair(m, M)


@dataclass
class BoundTally:
    inequality_id: str
    evaluated: int = 0
    accepted: int = 0
    violations: int = 0
    min_ratio: float = math.inf
    first_violation: dict | None = dc_field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, rep, tol: Tolerance, instance=None):
        """Fold a (batched) report in; ``instance`` maps names to per-row arrays."""
        hyp = np.atleast_1d(rep.hypothesis_ok)
        ok = np.atleast_1d(rep.ok)
        self.evaluated += hyp.size
        self.accepted += int(np.count_nonzero(hyp))
        if np.any(hyp):
            ratio = np.atleast_1d(rep.slack)[hyp] / tol.bound(np.atleast_1d(rep.scale)[hyp])
            self.min_ratio = min(self.min_ratio, float(ratio.min()))
        bad = np.flatnonzero(~ok)
        self.violations += bad.size
        if bad.size and self.first_violation is None and instance is not None:
            i = bad[0]
            self.first_violation = {k: (v[i] if isinstance(v, np.ndarray) and v.ndim else v)
                                    for k, v in instance.items()}

    def merge(self, other: "BoundTally") -> "BoundTally":
        return BoundTally(self.inequality_id, self.evaluated + other.evaluated,
                          self.accepted + other.accepted, self.violations + other.violations,
                          min(self.min_ratio, other.min_ratio),
                          self.first_violation or other.first_violation)


def bound_sweep(seed: int, draws: int, dims, fields, tol: Tolerance = DEFAULT_TOL,
                targeted: bool = True, evaluator=TwoInnerEvaluator) -> dict[str, BoundTally]:
    """Conditional bounds on random and (optionally) in-ball instances.

    Each draw produces one instance with a general scalar pair (ids 2.3,
    2.9, 2.16) and one with a positive pair (all ids).  Untargeted draws
    sample ``x`` freely, so many fail the hypothesis; targeted draws place
    ``x`` inside the hypothesis ball, about 10% of them on its boundary.
    """
    tallies = {i: BoundTally(i) for i in INEQUALITY_IDS}
    modes = ("random", "targeted") if targeted else ("random",)
    for f in _fields(fields):
        for d, n in zip(dims, _split(draws, dims)):
            if n == 0:
                continue
            ev = evaluator(InnerSpace.unit(d, f), tol)
            for mode in modes:
                gen = _cell_gen(seed, f"bounds-{mode}", f, d)
                y, z = sample_vectors(gen, n, d, f), sample_vectors(gen, n, d, f)
                pair = _random_pair(gen, n, f)
                ppair = _random_positive(gen, n)
                sp = ppair.as_scalar_pair()
                if mode == "random":
                    x1, x2 = sample_vectors(gen, n, d, f), sample_vectors(gen, n, d, f)
                else:
                    fills = np.minimum(gen.uniform((2, n), 0.0, 1.1), 1.0)
                    x1 = ball_instance(ev, gen, y, z, pair, fills[0])
                    x2 = ball_instance(ev, gen, y, z, sp, fills[1])
                base = {"field": f.value, "dim": d, "mode": mode, "y": y, "z": z}
                inst = {**base, "x": x1, "a": pair.a, "A": pair.A}
                tallies["2.3"].record(additive_reverse(ev, x1, y, z, pair, tol), tol, inst)
                for rep in quotient_reverse(ev, x1, y, z, pair, tol):
                    tallies[rep.inequality_id].record(rep, tol, inst)
                pinst = {**base, "x": x2, "m": ppair.m, "M": ppair.M}
                tallies["2.3"].record(additive_reverse(ev, x2, y, z, sp, tol), tol, pinst)
                for rep in quotient_reverse(ev, x2, y, z, sp, tol):
                    tallies[rep.inequality_id].record(rep, tol, pinst)
                for rep in positive_reverse(ev, x2, y, z, ppair, tol):
                    tallies[rep.inequality_id].record(rep, tol, pinst)
                tallies["2.19"].record(triangle_reverse(ev, x2, y, z, ppair, tol), tol, pinst)
    return tallies
