"""Weighted inner-product spaces and the 2-inner product they induce.

The induced form is the 2x2 Gram determinant

    (x, y | z) = <x, y><z, z> - <x, z><z, y>,

linear in ``x``, conjugate-linear in ``y``.  Every evaluator method takes
single vectors or stacks of vectors (the last axis is the coordinate
axis) and broadcasts.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .numeric import (
    DEFAULT_TOL,
    Field,
    InconsistencyError,
    InvalidDimension,
    InvalidInput,
    SeededGenerator,
    Tolerance,
    as_vector,
    sample_vectors,
)


@dataclass(frozen=True, eq=False)
class InnerSpace:
    """``K^dim`` with ``<x, y> = sum_k w_k x_k conj(y_k)`` and positive weights."""

    dim: int
    field: Field = Field.REAL
    weights: np.ndarray = dc_field(default=None)

    def __post_init__(self):
        if int(self.dim) < 2:
            raise InvalidDimension(f"space dimension must be >= 2, got {self.dim}")
        object.__setattr__(self, "field", Field.parse(self.field))
        w = np.ones(self.dim) if self.weights is None else np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.dim,):
            raise InvalidDimension(f"expected {self.dim} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidInput("weights must be finite and strictly positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, dim: int, field: Field | str = Field.REAL) -> "InnerSpace":
        return cls(dim, Field.parse(field))

    def vector(self, x, name: str = "vector") -> np.ndarray:
        v = as_vector(x, self.field, name=name)
        if v.shape[-1] != self.dim:
            raise InvalidDimension(f"{name} has dimension {v.shape[-1]}, space has {self.dim}")
        return v

    def basis(self, k: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=self.field.dtype)
        e[k] = 1
        return e


def inner(space: InnerSpace, x, y):
    """Weighted inner product; conjugate-symmetric, linear in ``x``."""
    x = space.vector(x, "x")
    y = space.vector(y, "y")
    return _inner(space, x, y)


def _inner(space, x, y):
    if space.field is Field.REAL:
        return (space.weights * x * y).sum(axis=-1)
    return (space.weights * x * y.conj()).sum(axis=-1)


def _sqnorm(space, x):
    if np.iscomplexobj(x):
        return (space.weights * (x.real**2 + x.imag**2)).sum(axis=-1)
    return (space.weights * x * x).sum(axis=-1)


class TwoInnerEvaluator:
    """2-inner product, 2-norm and related quantities over an :class:`InnerSpace`.

    Subclasses may override :meth:`two_inner` with another construction;
    the 2-norm, CBS gap and polarization all route through it, so the
    verification suites exercise whatever form is plugged in.
    """

    def __init__(self, space: InnerSpace, tol: Tolerance = DEFAULT_TOL):
        self.space = space
        self.tol = tol

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.space.dim}, field={self.space.field.value})"

    @property
    def field(self) -> Field:
        return self.space.field

    def _vec(self, v, name):
        return self.space.vector(v, name)

    def two_inner(self, x, y, z):
        x, y, z = self._vec(x, "x"), self._vec(y, "y"), self._vec(z, "z")
        s = self.space
        return _inner(s, x, y) * _inner(s, z, z) - _inner(s, x, z) * _inner(s, z, y)

    def scale(self, x, y, z):
        """Magnitude bound ``|x||y||z|^2`` for ``(x, y | z)`` (Hadamard)."""
        s = self.space
        x, y, z = self._vec(x, "x"), self._vec(y, "y"), self._vec(z, "z")
        return np.sqrt(_sqnorm(s, x) * _sqnorm(s, y)) * _sqnorm(s, z)

    def two_norm_sq(self, x, z):
        return np.real(self.two_inner(x, x, z))

    def two_norm(self, x, z, tol: Tolerance | None = None):
        """``sqrt((x, x | z))``; a radicand below ``-tol`` relative to scale raises."""
        tol = tol or self.tol
        rad = self.two_norm_sq(x, z)
        floor = -tol.bound(self.scale(x, x, z))
        if np.any(rad < floor):
            raise InconsistencyError(f"negative 2-norm radicand {np.min(rad)!r}")
        return np.sqrt(np.maximum(rad, 0.0))

    def cbs_gap(self, x, y, z):
        """``||x|z||^2 ||y|z||^2 - |(x,y|z)|^2``; nonnegative up to rounding."""
        return self.two_norm_sq(x, z) * self.two_norm_sq(y, z) - np.abs(self.two_inner(x, y, z)) ** 2

    def polarize(self, x, y, z, field: Field | str | None = None):
        """Recover ``(x, y | z)`` from 2-norms with ``z`` in the first two slots."""
        field = self.field if field is None else Field.parse(field)
        x, y, z = self._vec(x, "x"), self._vec(y, "y"), self._vec(z, "z")
        re = 0.25 * (np.real(self.two_inner(z, z, x + y)) - np.real(self.two_inner(z, z, x - y)))
        if field is Field.REAL:
            return re
        im = 0.25 * (np.real(self.two_inner(z, z, x + 1j * y)) - np.real(self.two_inner(z, z, x - 1j * y)))
        return re + 1j * im


def two_inner(ev: TwoInnerEvaluator, x, y, z):
    return ev.two_inner(x, y, z)


def two_norm(ev: TwoInnerEvaluator, x, z, tol: Tolerance | None = None):
    return ev.two_norm(x, z, tol)


def cbs_gap(ev: TwoInnerEvaluator, x, y, z):
    return ev.cbs_gap(x, y, z)


def polarize(ev: TwoInnerEvaluator, x, y, z, field: Field | str | None = None):
    return ev.polarize(x, y, z, field)


def dependent(rows, rel: float = 1e-10) -> np.ndarray | bool:
    """Numerical linear dependence of the stacked rows (rank below row count).

    ``rows`` has shape ``(..., k, dim)``; a set is dependent when its
    smallest singular value is at most ``rel * sigma_max``.
    """
    sv = np.linalg.svd(np.asarray(rows), compute_uv=False)
    smax = sv[..., 0]
    return sv[..., -1] <= rel * np.where(smax > 0, smax, 1.0)


@dataclass
class CheckResult:
    name: str
    max_residual: float
    max_ratio: float
    count: int

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0

    def merge(self, other: "CheckResult") -> "CheckResult":
        return CheckResult(self.name, max(self.max_residual, other.max_residual),
                           max(self.max_ratio, other.max_ratio), self.count + other.count)


@dataclass
class SuiteReport:
    checks: dict[str, CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        out = dict(self.checks)
        for name, c in other.checks.items():
            out[name] = out[name].merge(c) if name in out else c
        return SuiteReport(out)


# Names of the properties checked by axiom_suite, in report order.
AXIOM_CHECKS = (
    "nonnegativity",             # (x,x|z) >= 0 and real
    "dependence_zero",           # (x,x|bx) = 0
    "strict_positivity",         # (x,x|z) > 0 for well-conditioned independent x, z
    "swap_symmetry",             # (x,x|z) = (z,z|x)
    "conjugate_symmetry",        # (x,y|z) = conj((y,x|z))
    "homogeneity",               # (ax,y|z) = a(x,y|z)
    "additivity",                # (x+x',y|z) = (x,y|z) + (x',y|z)
    "conjugate_homogeneity",     # (x,ay|z) = conj(a)(x,y|z)
    "zero_slots",                # (0,y|z) = (x,0|z) = (x,y|0) = 0
    "third_slot_scaling",        # (x,y|az) = |a|^2 (x,y|z)
    "self_orthogonality",        # (z,y|z) = (y,z|z) = 0
    "norm_dependence",           # ||x|bx|| = 0
    "norm_symmetry",             # ||x|z|| = ||z|x||
    "norm_homogeneity",          # ||ax|z|| = |a| ||x|z||
    "norm_triangle",             # ||x+x'|z|| <= ||x|z|| + ||x'|z||
    "polarization",              # polarize(x,y,z) = (x,y|z)
    "cbs",                       # |(x,y|z)|^2 <= ||x|z||^2 ||y|z||^2
    "cbs_equality",              # gap = 0 when y lies in span(x, z)
)


def _check(name, residual, scale, tol):
    residual = np.abs(np.asarray(residual)).astype(np.float64)
    scale = np.asarray(scale, dtype=np.float64)
    if residual.size == 0:
        return CheckResult(name, 0.0, 0.0, 0)
    ratio = residual / tol.bound(scale)
    return CheckResult(name, float(np.max(residual)), float(np.max(ratio)), int(residual.size))


def axiom_suite(ev: TwoInnerEvaluator, gen: SeededGenerator, trials: int,
                tol: Tolerance = DEFAULT_TOL, *, well_conditioned: float = 1e-6) -> SuiteReport:
    """Sampled residuals of the 2-inner-product axioms and derived properties.

    Draws ``trials`` random tuples from ``gen`` (which is advanced) and
    reports, per property, the largest residual and the largest ratio of
    residual to its allowed bound ``tol.abs + tol.rel * scale``.
    """
    if int(trials) < 1:
        raise InvalidInput("trials must be >= 1")
    n, s, f = int(trials), ev.space, ev.field
    x, x2, y, z = (sample_vectors(gen, n, s.dim, f) for _ in range(4))
    alpha = sample_vectors(gen, n, 2, f)[:, 0]
    beta = gen.uniform(n) + 2.0 * np.sign(gen.uniform(n))  # away from zero
    a = alpha[:, None]
    nx, nx2, ny, nz = (np.sqrt(_sqnorm(s, v)) for v in (x, x2, y, z))
    sc = nx * ny * nz**2
    zero = np.zeros_like(x)

    xxz = ev.two_inner(x, x, z)
    xyz = ev.two_inner(x, y, z)
    checks = {}
    add = checks.__setitem__

    add("nonnegativity", _check("nonnegativity",
                                np.maximum(-np.real(xxz), 0.0) + np.abs(np.imag(xxz)),
                                nx**2 * nz**2, tol))
    dep = beta[:, None] * x
    add("dependence_zero", _check("dependence_zero", ev.two_inner(x, x, dep),
                                  nx**4 * beta**2, tol))
    sv = np.linalg.svd(np.stack([x, z], axis=-2), compute_uv=False)
    good = sv[:, -1] > well_conditioned
    # must clear the rounding band: ratio = band / value, infinite for value <= 0
    band = tol.bound(nx[good] ** 2 * nz[good] ** 2)
    val = np.real(xxz[good])
    ratio = np.divide(band, val, out=np.full_like(val, np.inf), where=val > 0)
    add("strict_positivity", CheckResult("strict_positivity",
                                         float(np.max(np.maximum(band - val, 0.0), initial=0.0)),
                                         float(np.max(ratio, initial=0.0)),
                                         int(np.count_nonzero(good))))
    add("swap_symmetry", _check("swap_symmetry", xxz - ev.two_inner(z, z, x), nx**2 * nz**2, tol))
    add("conjugate_symmetry", _check("conjugate_symmetry", xyz - np.conj(ev.two_inner(y, x, z)), sc, tol))
    add("homogeneity", _check("homogeneity", ev.two_inner(a * x, y, z) - alpha * xyz,
                              np.abs(alpha) * sc, tol))
    x2yz = ev.two_inner(x2, y, z)
    add("additivity", _check("additivity", ev.two_inner(x + x2, y, z) - xyz - x2yz,
                             (nx + nx2) * ny * nz**2, tol))
    add("conjugate_homogeneity", _check("conjugate_homogeneity",
                                        ev.two_inner(x, a * y, z) - np.conj(alpha) * xyz,
                                        np.abs(alpha) * sc, tol))
    zres = np.maximum.reduce([np.abs(ev.two_inner(zero, y, z)), np.abs(ev.two_inner(x, zero, z)),
                              np.abs(ev.two_inner(x, y, zero))])
    add("zero_slots", _check("zero_slots", zres, sc, tol))
    add("third_slot_scaling", _check("third_slot_scaling",
                                     ev.two_inner(x, y, a * z) - np.abs(alpha) ** 2 * xyz,
                                     np.abs(alpha) ** 2 * sc, tol))
    so = np.maximum(np.abs(ev.two_inner(z, y, z)), np.abs(ev.two_inner(y, z, z)))
    add("self_orthogonality", _check("self_orthogonality", so, ny * nz**3, tol))

    nxz = ev.two_norm(x, z)
    # sqrt amplifies rounding near zero, so the vanishing is witnessed on the square
    add("norm_dependence", _check("norm_dependence", ev.two_norm(x, dep) ** 2, nx**4 * beta**2, tol))
    add("norm_symmetry", _check("norm_symmetry", nxz - ev.two_norm(z, x), nx * nz, tol))
    add("norm_homogeneity", _check("norm_homogeneity", ev.two_norm(a * x, z) - np.abs(alpha) * nxz,
                                   np.abs(alpha) * nx * nz, tol))
    tri = ev.two_norm(x + x2, z) - nxz - ev.two_norm(x2, z)
    add("norm_triangle", _check("norm_triangle", np.maximum(tri, 0.0), (nx + nx2) * nz, tol))
    add("polarization", _check("polarization", ev.polarize(x, y, z) - xyz, (nx + ny) ** 2 * nz**2, tol))
    gap = ev.cbs_gap(x, y, z)
    add("cbs", _check("cbs", np.maximum(-gap, 0.0), sc**2, tol))

    b, c = (sample_vectors(gen, n, 2, f)[:, :1] for _ in range(2))
    yd = b * x + c * z
    gd = ev.cbs_gap(x, yd, z)
    add("cbs_equality", _check("cbs_equality", gd, ev.scale(x, yd, z) ** 2, tol))
    return SuiteReport({name: checks[name] for name in AXIOM_CHECKS})
