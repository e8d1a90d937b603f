"""2-inner products of sampled real functions on a weighted quadrature grid.

A grid with nodes ``x_i`` and positive weights ``w_i`` together with
samples ``phi_i >= 0`` of a weight function is a discrete measure, so

    (f, g | h)_phi = 1/2 sum_ij w_i w_j phi_i phi_j det[f_i f_j; h_i h_j] det[g_i g_j; h_i h_j]

is an honest 2-inner product and equals the determinant of moments

    | int phi f g   int phi f h |
    | int phi g h   int phi h^2 |

exactly, not just up to quadrature error.  Sums use numpy's pairwise
summation; the double sum runs over fixed row blocks in order, so results
are deterministic for a given input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numeric import (
    DEFAULT_TOL,
    Field,
    InconsistencyError,
    InvalidDimension,
    InvalidInput,
    InvalidInstance,
    SeededGenerator,
    Tolerance,
)
from .reverse import BoundReport, PositivePair, _report
from .space import InnerSpace, TwoInnerEvaluator

PROP_IDS = ("3.6", "3.7", "3.8", "3.9", "3.10")
PAIR_SCAN_LIMIT = 4096
_BLOCK = 256


def _samples(values, n: int | None = None, name: str = "samples") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidDimension(f"{name} must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise InvalidDimension(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.isfinite(arr).all():
        raise InvalidInput(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = _samples(self.nodes, name="nodes")
        weights = _samples(self.weights, nodes.shape[0], "weights")
        if nodes.shape[0] < 2:
            raise InvalidDimension("a grid needs at least 2 nodes")
        if np.any(weights <= 0):
            raise InvalidInput("quadrature weights must be strictly positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.shape[0]

    @classmethod
    def simpson(cls, a: float, b: float, n: int) -> "QuadratureGrid":
        """Composite Simpson rule on ``n`` (odd, >= 3) equispaced nodes."""
        if n < 3 or n % 2 == 0:
            raise InvalidInput(f"Simpson's rule needs an odd node count >= 3, got {n}")
        nodes = np.linspace(a, b, n)
        h = (b - a) / (n - 1)
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return cls(nodes, w * h / 3.0)

    @classmethod
    def trapezoid(cls, a: float, b: float, n: int) -> "QuadratureGrid":
        if n < 2:
            raise InvalidInput("trapezoid rule needs at least 2 nodes")
        nodes = np.linspace(a, b, n)
        w = np.full(n, (b - a) / (n - 1))
        w[0] = w[-1] = 0.5 * (b - a) / (n - 1)
        return cls(nodes, w)


@dataclass(frozen=True, eq=False)
class WeightedTriple:
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        f = _samples(self.f, name="f")
        n = f.shape[0]
        for name in ("g", "h", "phi"):
            object.__setattr__(self, name, _samples(getattr(self, name), n, name))
        object.__setattr__(self, "f", f)
        if np.any(self.phi < 0):
            raise InvalidInput("phi must be nonnegative")

    def check_grid(self, grid: QuadratureGrid):
        if self.f.shape[0] != len(grid):
            raise InvalidDimension(f"samples have length {self.f.shape[0]}, grid has {len(grid)} nodes")

    @classmethod
    def from_functions(cls, grid: QuadratureGrid, f, g, h, phi=None) -> "WeightedTriple":
        x = grid.nodes
        ev = lambda fn: np.broadcast_to(np.asarray(fn(x), dtype=np.float64), x.shape).copy()
        return cls(ev(f), ev(g), ev(h), np.ones_like(x) if phi is None else ev(phi))


def quad_integral(values, grid: QuadratureGrid, phi=None) -> float:
    """``sum_i w_i phi_i values_i``."""
    v = _samples(values, len(grid), "values")
    mass = grid.weights if phi is None else grid.weights * _samples(phi, len(grid), "phi")
    return float(np.sum(mass * v))


@dataclass
class DeterminantReport:
    """Moments of a triple and the 2-inner product computed two ways."""

    moments: dict
    two_inner_double: float
    two_inner_det: float
    cross_residual: float
    scale: float
    residual_ok: bool


def moments(triple: WeightedTriple, grid: QuadratureGrid) -> dict:
    triple.check_grid(grid)
    f, g, h = triple.f, triple.g, triple.h
    q = lambda v: quad_integral(v, grid, triple.phi)
    return {"ff": q(f * f), "gg": q(g * g), "hh": q(h * h),
            "fg": q(f * g), "fh": q(f * h), "gh": q(g * h)}


def _double_sum(f, g, h, mass) -> float:
    total = 0.0
    for start in range(0, f.shape[0], _BLOCK):
        sl = slice(start, start + _BLOCK)
        dfh = np.outer(f[sl], h) - np.outer(h[sl], f)
        dgh = np.outer(g[sl], h) - np.outer(h[sl], g)
        total += float(np.sum(np.outer(mass[sl], mass) * dfh * dgh))
    return 0.5 * total


def two_inner_phi(triple: WeightedTriple, grid: QuadratureGrid,
                  tol: Tolerance = DEFAULT_TOL) -> DeterminantReport:
    """``(f, g | h)_phi`` as the pairwise double sum and as a moment determinant."""
    mo = moments(triple, grid)
    mass = grid.weights * triple.phi
    double = _double_sum(triple.f, triple.g, triple.h, mass)
    det = mo["fg"] * mo["hh"] - mo["fh"] * mo["gh"]
    scale = math.sqrt(mo["ff"] * mo["gg"]) * mo["hh"]
    residual = abs(double - det)
    return DeterminantReport(mo, double, det, residual, scale, bool(residual <= tol.bound(scale)))


def _gram(ff, hh, fh, tol, scale):
    rad = ff * hh - fh * fh
    if rad < -tol.bound(scale):
        raise InconsistencyError(f"negative 2-norm radicand {rad!r}")
    return max(rad, 0.0)


def two_norm_phi(f, h, phi, grid: QuadratureGrid, tol: Tolerance = DEFAULT_TOL) -> float:
    """``sqrt(int phi f^2 * int phi h^2 - (int phi f h)^2)``."""
    n = len(grid)
    f, h, phi = _samples(f, n, "f"), _samples(h, n, "h"), _samples(phi, n, "phi")
    ff, hh, fh = (quad_integral(v, grid, phi) for v in (f * f, h * h, f * h))
    return math.sqrt(_gram(ff, hh, fh, tol, ff * hh))


def discrete_evaluator(grid: QuadratureGrid, phi, tol: Tolerance = DEFAULT_TOL):
    """The grid as an inner-product space on the nodes where ``w * phi > 0``.

    Returns ``(evaluator, mask)``; restrict sample arrays with ``mask``
    before passing them to the evaluator.
    """
    mass = grid.weights * _samples(phi, len(grid), "phi")
    mask = mass > 0
    if np.count_nonzero(mask) < 2:
        raise InvalidInstance("phi must be positive on at least 2 nodes")
    space = InnerSpace(int(np.count_nonzero(mask)), Field.REAL, mass[mask])
    return TwoInnerEvaluator(space, tol), mask


@dataclass
class SyncResult:
    synchronous: bool
    worst_pair: tuple[int, int] | None
    worst_value: float
    band: float

    def __bool__(self):
        return self.synchronous


def synchronous(q, p, grid: QuadratureGrid, phi=None, tol: Tolerance = DEFAULT_TOL, *,
                max_nodes: int = PAIR_SCAN_LIMIT, allow_large: bool = False) -> SyncResult:
    """Check ``(q_i - q_j)(p_i - p_j) >= -band`` over all pairs of weighted nodes.

    Nodes with ``w_i phi_i = 0`` are ignored.  ``band`` is the tolerance
    relative to ``ptp(q) * ptp(p)``.  The worst pair is reported in grid
    indices.  Scans above ``max_nodes`` support nodes need
    ``allow_large=True``.
    """
    n = len(grid)
    q, p = _samples(q, n, "q"), _samples(p, n, "p")
    mass = grid.weights if phi is None else grid.weights * _samples(phi, n, "phi")
    idx = np.flatnonzero(mass > 0)
    if idx.size > max_nodes and not allow_large:
        raise InvalidInput(f"{idx.size} support nodes exceed the pairwise scan limit {max_nodes}")
    qs, ps = q[idx], p[idx]
    band = float(tol.bound(np.ptp(qs) * np.ptp(ps))) if idx.size else tol.abs
    worst, pair = math.inf, None
    for start in range(0, idx.size, _BLOCK):
        sl = slice(start, start + _BLOCK)
        prod = np.subtract.outer(qs[sl], qs) * np.subtract.outer(ps[sl], ps)
        k = int(np.argmin(prod))
        val = float(prod.flat[k])
        if val < worst:
            i, j = divmod(k, idx.size)
            worst, pair = val, (int(idx[start + i]), int(idx[j]))
    if worst == math.inf:
        worst = 0.0
    ok = worst >= -band
    return SyncResult(ok, None if ok else pair, worst, band)


@dataclass
class PremiseReport:
    synchronous: SyncResult
    sign_value: float
    sign_ok: bool

    @property
    def ok(self) -> bool:
        return self.synchronous.synchronous


def _support_h(triple: WeightedTriple, grid: QuadratureGrid) -> np.ndarray:
    mass = grid.weights * triple.phi
    if np.any((mass > 0) & (triple.h == 0)):
        raise InvalidInstance("h vanishes on a node with positive weight")
    return mass > 0


def premise_check(triple: WeightedTriple, pair: PositivePair, grid: QuadratureGrid,
                  tol: Tolerance = DEFAULT_TOL) -> PremiseReport:
    """Synchronicity of ``M g/h - f/h`` and ``f/h - m g/h`` on the weighted support.

    Also reports ``(M g - f, f - m g | h)_phi``, which synchronicity forces
    to be nonnegative.
    """
    triple.check_grid(grid)
    support = _support_h(triple, grid)
    h = np.where(support, triple.h, 1.0)
    u, v = triple.g / h, triple.f / h
    sync = synchronous(pair.M * u - v, v - pair.m * u, grid, triple.phi, tol)
    shifted = WeightedTriple(pair.M * triple.g - triple.f, triple.f - pair.m * triple.g,
                             triple.h, triple.phi)
    mo = moments(shifted, grid)
    sign = mo["fg"] * mo["hh"] - mo["fh"] * mo["gh"]
    scale = math.sqrt(mo["ff"] * mo["gg"]) * mo["hh"]
    return PremiseReport(sync, sign, bool(sign >= -tol.bound(scale)))


def prop_bounds(triple: WeightedTriple, pair: PositivePair, grid: QuadratureGrid, which: str,
                tol: Tolerance = DEFAULT_TOL, premise: PremiseReport | None = None) -> BoundReport:
    """Determinantal reverse inequality ``which`` (one of ``PROP_IDS``).

    Ids 3.7 and 3.9 use the constants ``(M+m)/sqrt(mM)`` and
    ``(M-m)^2/(mM)``; the alternative forms ``(M-m)/sqrt(mM)`` and
    ``(M-m)^2/sqrt(mM)`` are evaluated alongside and stored in
    ``extras`` as ``alt_rhs`` / ``alt_holds``.
    """
    if which not in PROP_IDS:
        raise InvalidInput(f"unknown inequality {which!r}; expected one of {PROP_IDS}")
    if premise is None:
        premise = premise_check(triple, pair, grid, tol)
    mo = moments(triple, grid)
    ff, gg, hh, fg, fh, gh = (mo[k] for k in ("ff", "gg", "hh", "fg", "fh", "gh"))
    m, M = float(pair.m), float(pair.M)
    nf, ng = math.sqrt(ff * hh), math.sqrt(gg * hh)
    sfg = nf * ng
    gff = _gram(ff, hh, fh, tol, nf**2)
    ggg = _gram(gg, hh, gh, tol, ng**2)
    gfg = fg * hh - fh * gh
    ok = premise.ok
    if ok and gfg < -tol.bound(sfg):
        raise InconsistencyError(f"(f,g|h) = {gfg!r} < 0 although the premise holds")
    gm = math.sqrt(m * M)
    extras = {}

    if which == "3.6":
        lhs = gff * ggg - gfg**2
        rhs = 0.25 * (M - m) ** 2 * ggg**2
        const, scale, chain = 0.25, max(sfg**2, rhs), (0.0, lhs, rhs)
    elif which == "3.7":
        lhs = math.sqrt(gff * ggg)
        rhs = 0.5 * (M + m) / gm * gfg
        alt = 0.5 * (M - m) / gm * gfg
        extras = {"alt_rhs": alt, "alt_holds": bool(alt - lhs >= -tol.bound(max(sfg, abs(alt))))}
        const, scale, chain = 0.5, max(sfg, abs(rhs)), (0.0, lhs, rhs)
    elif which == "3.8":
        norm_prod = math.sqrt(gff * ggg)
        lhs = norm_prod - gfg
        rhs = 0.5 * (math.sqrt(M) - math.sqrt(m)) ** 2 / gm * gfg
        const, scale, chain = 0.5, max(sfg, abs(rhs)), (0.0, lhs, rhs)
    elif which == "3.9":
        lhs = gff * ggg - gfg**2
        rhs = 0.25 * (M - m) ** 2 / (m * M) * gfg**2
        alt = 0.25 * (M - m) ** 2 / gm * gfg**2
        extras = {"alt_rhs": alt, "alt_holds": bool(alt - lhs >= -tol.bound(max(sfg**2, abs(alt))))}
        const, scale, chain = 0.25, max(sfg**2, rhs), (0.0, lhs, rhs)
    else:
        sum_ff = ff + 2.0 * fg + gg
        sum_fh = fh + gh
        gsum = _gram(sum_ff, hh, sum_fh, tol, sum_ff * hh)
        lhs = math.sqrt(gff) + math.sqrt(ggg) - math.sqrt(gsum)
        rhs = (math.sqrt(M) - math.sqrt(m)) / (m * M) ** 0.25 * math.sqrt(max(gfg, 0.0))
        const, scale, chain = 1.0, max(nf + ng, rhs), (0.0, lhs, rhs)
    extras["premise_sign"] = premise.sign_value
    return _report(which, lhs, rhs, ok, const, scale, tol, chain=chain, extras=extras)


def monotone_instance(gen: SeededGenerator, grid: QuadratureGrid, pair: PositivePair,
                      knots: int = 6, zero_phi: float = 0.1) -> WeightedTriple:
    """Random triple that satisfies the premise for ``pair`` by construction.

    Draws increasing piecewise-linear ``q`` and ``p`` (decreasing with
    probability 1/2, jointly) and solves ``q = M u - v``, ``p = v - m u``
    for ``u = g/h`` and ``v = f/h``.  ``h`` is bounded away from zero with
    a random sign pattern and ``phi`` vanishes on about ``zero_phi`` of the
    nodes.  Needs ``M > m``.
    """
    m, M = float(pair.m), float(pair.M)
    if not M > m:
        raise InvalidInstance("monotone_instance needs M > m")
    x = grid.nodes
    lo, hi = float(x.min()), float(x.max())
    kx = np.concatenate([[lo], np.sort(gen.uniform(knots - 2, lo, hi)), [hi]])

    def increasing():
        return np.interp(x, kx, np.cumsum(gen.uniform(knots, 0.0, 1.0)))

    q, p = increasing(), increasing()
    if gen.uniform(1, 0.0, 1.0)[0] < 0.5:
        q, p = -q, -p
    u = (q + p) / (M - m)
    v = p + m * u
    h = gen.uniform(len(grid), 0.5, 2.0) * np.where(gen.uniform(len(grid)) < 0, -1.0, 1.0)
    phi = gen.uniform(len(grid), 0.0, 2.0)
    phi[gen.uniform(len(grid), 0.0, 1.0) < zero_phi] = 0.0
    return WeightedTriple(v * h, u * h, h, phi)


def random_grid(gen: SeededGenerator, n: int) -> QuadratureGrid:
    """Sorted random nodes on [0, 1] with random positive weights."""
    nodes = np.sort(gen.uniform(n, 0.0, 1.0))
    return QuadratureGrid(nodes, gen.uniform(n, 0.01, 1.0) / n)
