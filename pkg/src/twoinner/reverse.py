"""Reverse Cauchy-Schwarz bounds in a 2-inner-product space.

All bounds are localized by the hypothesis

    Re(A y - x, x - a y | z) >= 0,

equivalently ``||x - (a+A)/2 y | z|| <= |A - a|/2 * ||y|z||``.  A failed
hypothesis does not raise: the returned report carries
``hypothesis_ok=False`` and the bound values are still filled in so
sweeps can tabulate them.

The report functions broadcast: pass stacks of vectors of shape
``(n, dim)`` and pairs whose members are length-``n`` arrays to evaluate
``n`` instances at once.  Report fields are then arrays; for single
instances they are plain floats and bools.

Inequality labels (``"2.3"``, ``"2.9"`` ...) are stable report ids shared
with the CLI and JSON reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .numeric import (
    DEFAULT_TOL,
    Field,
    InconsistencyError,
    InvalidInput,
    InvalidInstance,
    Tolerance,
    sample_vectors,
)
from .space import InnerSpace, TwoInnerEvaluator, _sqnorm

INEQUALITY_IDS = ("2.3", "2.9", "2.15", "2.16", "2.17", "2.18", "2.19")


def _out(v):
    v = np.asarray(v)
    if v.ndim == 0:
        return bool(v) if v.dtype == bool else float(v)
    return v


def _finite_scalars(value, name):
    arr = np.asarray(value, dtype=np.complex128)
    if not np.isfinite(arr).all():
        raise InvalidInput(f"{name} must be finite")
    return complex(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True, eq=False)
class ScalarPair:
    """Constants ``a``, ``A`` of the hypothesis (scalars, or equal-length arrays)."""

    a: complex
    A: complex

    def __post_init__(self):
        object.__setattr__(self, "a", _finite_scalars(self.a, "a"))
        object.__setattr__(self, "A", _finite_scalars(self.A, "A"))

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.imag(self.a) == 0) and np.all(np.imag(self.A) == 0))

    def check_field(self, field: Field):
        if field is Field.REAL and not self.is_real:
            raise InvalidInput("complex scalar pair used in a real space")


@dataclass(frozen=True, eq=False)
class PositivePair:
    """Real constants ``M >= m > 0``."""

    m: float
    M: float

    def __post_init__(self):
        m, M = (np.asarray(v, dtype=np.float64) for v in (self.m, self.M))
        if not (np.isfinite(m).all() and np.isfinite(M).all()):
            raise InvalidInput("m and M must be finite")
        if not (np.all(m > 0) and np.all(M >= m)):
            raise InvalidInput(f"need M >= m > 0, got m={self.m}, M={self.M}")
        object.__setattr__(self, "m", _out(m))
        object.__setattr__(self, "M", _out(M))

    def as_scalar_pair(self) -> ScalarPair:
        return ScalarPair(self.m, self.M)


@dataclass
class ConditionReport:
    re_form: float
    ball_form: float
    equivalence_residual: float
    holds: bool
    scale: float
    residual_ok: bool = True


@dataclass
class BoundReport:
    """One inequality evaluated on one instance (or a stack of them).

    ``chain`` lists the full chain of quantities the result asserts to be
    nondecreasing; ``lhs`` and ``rhs`` are the members that define
    ``slack``.  ``scale`` sets the rounding band ``tol.abs + tol.rel *
    scale`` for every comparison in the report.
    """

    inequality_id: str
    lhs: float
    rhs: float
    hypothesis_ok: bool
    constant_used: float
    scale: float
    chain: tuple = ()
    residual: float = 0.0
    residual_ok: bool = True
    bound_ok: bool = True
    extras: dict = dc_field(default_factory=dict)

    @property
    def slack(self):
        return _out(np.asarray(self.rhs) - np.asarray(self.lhs))

    @property
    def ok(self):
        """False only for a genuine violation: hypothesis accepted but a bound or identity failed."""
        return _out(np.logical_and(self.residual_ok,
                                   np.logical_or(np.logical_not(self.hypothesis_ok), self.bound_ok)))

    def tight(self, tol: Tolerance = DEFAULT_TOL):
        return _out(np.abs(np.asarray(self.slack)) <= tol.bound(self.scale))


def _report(inequality_id, lhs, rhs, hypothesis_ok, constant, scale, tol, chain=None,
            residual=0.0, residual_ok=True, extras=None) -> BoundReport:
    band = tol.bound(scale)
    lhs, rhs = np.asarray(lhs, dtype=np.float64), np.asarray(rhs, dtype=np.float64)
    values = np.stack(np.broadcast_arrays(*(chain if chain else (lhs, rhs))), axis=-1)
    monotone = np.all(np.diff(values, axis=-1) >= -np.asarray(band)[..., None], axis=-1)
    bound_ok = (rhs - lhs >= -band) & monotone
    return BoundReport(
        inequality_id, _out(lhs), _out(rhs), _out(hypothesis_ok), float(constant), _out(scale),
        chain=tuple(_out(c) for c in chain) if chain else (),
        residual=_out(residual), residual_ok=_out(residual_ok), bound_ok=_out(bound_ok),
        extras={k: _out(v) for k, v in (extras or {}).items()},
    )


def _norm(ev: TwoInnerEvaluator, v):
    return np.sqrt(_sqnorm(ev.space, v))


def _col(s):
    return np.asarray(s)[..., None]


def _prepare(ev, x, y, z, pair: ScalarPair):
    pair.check_field(ev.field)
    s = ev.space
    x, y, z = s.vector(x, "x"), s.vector(y, "y"), s.vector(z, "z")
    a, A = np.asarray(pair.a), np.asarray(pair.A)
    if ev.field is Field.REAL:
        a, A = a.real, A.real
    return x, y, z, a, A


def _ambient(ev, x, y, z, a, A):
    """Rounding scale ``(|x| + max(|a|,|A|) |y|)^2 |z|^2`` for hypothesis quantities."""
    return ((_norm(ev, x) + np.maximum(np.abs(a), np.abs(A)) * _norm(ev, y)) * _norm(ev, z)) ** 2


def _condition(ev, x, y, z, a, A, tol):
    scale = _ambient(ev, x, y, z, a, A)
    re_form = np.real(ev.two_inner(_col(A) * y - x, x - _col(a) * y, z))
    centered = x - _col(0.5 * (a + A)) * y
    dist_sq = ev.two_norm_sq(centered, z)
    diam_sq = ev.two_norm_sq(_col(A - a) * y, z)
    residual = np.abs(0.25 * diam_sq - dist_sq - re_form)
    ball_form = 0.5 * np.abs(A - a) * ev.two_norm(y, z, tol) - ev.two_norm(centered, z, tol)
    band = tol.bound(scale)
    return re_form, ball_form, residual, re_form >= -band, scale, residual <= band


def condition_check(ev: TwoInnerEvaluator, x, y, z, pair: ScalarPair,
                    tol: Tolerance = DEFAULT_TOL) -> ConditionReport:
    """Evaluate both forms of the localization hypothesis and their identity residual."""
    x, y, z, a, A = _prepare(ev, x, y, z, pair)
    return ConditionReport(*(_out(v) for v in _condition(ev, x, y, z, a, A, tol)))


class IIdentity(NamedTuple):
    i1: float
    i2: float
    gap: float
    residual: float
    scale: float


def _product(ev, x, y, z, a, A):
    xy = ev.two_inner(x, y, z)
    yy = ev.two_norm_sq(y, z)
    return np.real((A * yy - xy) * (np.conj(xy) - np.conj(a) * yy)), yy


def i_identity(ev: TwoInnerEvaluator, x, y, z, pair: ScalarPair) -> IIdentity:
    """``I1 - I2 = gap``: product form minus ``||y|z||^2`` times the hypothesis form."""
    x, y, z, a, A = _prepare(ev, x, y, z, pair)
    i1, yy = _product(ev, x, y, z, a, A)
    i2 = yy * np.real(ev.two_inner(_col(A) * y - x, x - _col(a) * y, z))
    gap = ev.cbs_gap(x, y, z)
    scale = _ambient(ev, x, y, z, a, A) * (_norm(ev, y) * _norm(ev, z)) ** 2
    return IIdentity(*(_out(v) for v in (i1, i2, gap, np.abs(i1 - i2 - gap), scale)))


class ProductStep(NamedTuple):
    product: float
    bound: float
    scale: float


def product_step(ev: TwoInnerEvaluator, x, y, z, pair: ScalarPair) -> ProductStep:
    """``Re[(A|y|^2 - (x,y|z)) conj((x,y|z) - a|y|^2)] <= |A-a|^2 |y|^4 / 4``, unconditionally."""
    x, y, z, a, A = _prepare(ev, x, y, z, pair)
    product, yy = _product(ev, x, y, z, a, A)
    bound = 0.25 * np.abs(A - a) ** 2 * yy**2
    scale = _ambient(ev, x, y, z, a, A) * (_norm(ev, y) * _norm(ev, z)) ** 2
    return ProductStep(_out(product), _out(bound), _out(scale))


def triangle_identity(ev: TwoInnerEvaluator, x, y, z):
    """Residual of ``(|x|+|y|)^2 - |x+y|^2 = 2(|x||y| - Re(x,y|z))`` in 2-norms, and its scale."""
    s = ev.space
    x, y, z = s.vector(x, "x"), s.vector(y, "y"), s.vector(z, "z")
    nx, ny = ev.two_norm(x, z), ev.two_norm(y, z)
    sum_sq = ev.two_norm_sq(x + y, z)
    re_xy = np.real(ev.two_inner(x, y, z))
    residual = np.abs((nx + ny) ** 2 - sum_sq - 2.0 * (nx * ny - re_xy))
    scale = ((_norm(ev, x) + _norm(ev, y)) * _norm(ev, z)) ** 2
    return _out(residual), _out(scale)


def additive_reverse(ev: TwoInnerEvaluator, x, y, z, pair: ScalarPair,
                     tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    """``gap <= |A-a|^2 ||y|z||^4 / 4`` under the hypothesis (id 2.3)."""
    x, y, z, a, A = _prepare(ev, x, y, z, pair)
    re_form, _, residual, holds, cscale, res_ok = _condition(ev, x, y, z, a, A, tol)
    gap = ev.cbs_gap(x, y, z)
    yy = ev.two_norm_sq(y, z)
    rhs = 0.25 * np.abs(A - a) ** 2 * yy**2
    sy = (_norm(ev, y) * _norm(ev, z)) ** 2
    scale = np.maximum.reduce([ev.scale(x, x, z) * sy, rhs, cscale * sy])
    return _report("2.3", gap, rhs, holds, 0.25, scale, tol, chain=(0.0, gap, rhs),
                   residual=residual, residual_ok=res_ok, extras={"re_form": re_form})


def quotient_reverse(ev: TwoInnerEvaluator, x, y, z, pair: ScalarPair,
                     tol: Tolerance = DEFAULT_TOL) -> tuple[BoundReport, BoundReport]:
    """Multiplicative bound (id 2.9) and its additive consequence (id 2.16).

    Both need ``Re(conj(a) A) > 0``; where it fails the reports are
    flagged and the right-hand sides are NaN.
    """
    x, y, z, a, A = _prepare(ev, x, y, z, pair)
    _, _, residual, holds, cscale, res_ok = _condition(ev, x, y, z, a, A, tol)
    re_aa = np.real(np.conj(a) * A)
    positive = re_aa > 0
    ok = holds & positive
    root = np.sqrt(np.where(positive, re_aa, np.nan))
    nx, ny = ev.two_norm(x, z, tol), ev.two_norm(y, z, tol)
    xy = ev.two_inner(x, y, z)
    gap = ev.cbs_gap(x, y, z)

    lhs = nx * ny
    mid = 0.5 * np.real((np.conj(A) + np.conj(a)) * xy) / root
    rhs = 0.5 * np.abs(A + a) * np.abs(xy) / root
    sxyz = ev.scale(x, y, z)
    scale9 = np.fmax.reduce([sxyz, np.abs(mid), np.abs(rhs), cscale / root])
    r9 = _report("2.9", lhs, rhs, ok, 0.5, scale9, tol, chain=(lhs, mid, rhs),
                 residual=residual, residual_ok=res_ok, extras={"mid": mid, "re_conj_a_A": re_aa})

    rhs16 = 0.25 * np.abs(A - a) ** 2 / root**2 * np.abs(xy) ** 2
    scale16 = np.fmax.reduce([sxyz**2, np.abs(rhs16), scale9 * sxyz])
    r16 = _report("2.16", gap, rhs16, ok, 0.25, scale16, tol, chain=(0.0, gap, rhs16),
                  residual=residual, residual_ok=res_ok, extras={"re_conj_a_A": re_aa})
    return r9, r16


def positive_reverse(ev: TwoInnerEvaluator, x, y, z, pair: PositivePair,
                     tol: Tolerance = DEFAULT_TOL) -> tuple[BoundReport, BoundReport, BoundReport]:
    """Bounds with real constants ``M >= m > 0`` (ids 2.15, 2.17, 2.18).

    Each chain also carries the ``|(x,y|z)|`` variant of its right-hand
    side; ``extras["coherence_residual"]`` of 2.17 checks that its
    right-hand side is the 2.15 one minus ``Re(x,y|z)``.
    """
    x, y, z, _, _ = _prepare(ev, x, y, z, pair.as_scalar_pair())
    m, M = np.asarray(pair.m), np.asarray(pair.M)
    _, _, residual, holds, cscale, res_ok = _condition(ev, x, y, z, m, M, tol)
    nx, ny = ev.two_norm(x, z, tol), ev.two_norm(y, z, tol)
    xy = ev.two_inner(x, y, z)
    re, mod = np.real(xy), np.abs(xy)
    gm = np.sqrt(m * M)
    k15 = (M + m) / gm
    k17 = (np.sqrt(M) - np.sqrt(m)) ** 2 / gm
    k18 = (M - m) ** 2 / (m * M)
    sxyz = ev.scale(x, y, z)
    common = dict(residual=residual, residual_ok=res_ok)

    lhs = nx * ny
    scale = np.maximum.reduce([sxyz, k15 * np.abs(re), cscale / gm])
    r15 = _report("2.15", lhs, 0.5 * k15 * re, holds, 0.5, scale, tol,
                  chain=(lhs, 0.5 * k15 * re, 0.5 * k15 * mod), **common)
    r17 = _report("2.17", lhs - re, 0.5 * k17 * re, holds, 0.5, scale, tol,
                  chain=(0.0, lhs - mod, lhs - re, 0.5 * k17 * re, 0.5 * k17 * mod),
                  extras={"coherence_residual": np.abs(0.5 * k17 * re - (0.5 * k15 * re - re))},
                  **common)
    gap = ev.cbs_gap(x, y, z)
    nxx, nyy = ev.two_norm_sq(x, z), ev.two_norm_sq(y, z)
    scale18 = np.maximum.reduce([sxyz**2, k18 * re**2, scale * sxyz])
    r18 = _report("2.18", gap, 0.25 * k18 * re**2, holds, 0.25, scale18, tol,
                  chain=(0.0, gap, nxx * nyy - re**2, 0.25 * k18 * re**2, 0.25 * k18 * mod**2),
                  **common)
    return r15, r17, r18


def triangle_reverse(ev: TwoInnerEvaluator, x, y, z, pair: PositivePair,
                     tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    """``||x|z|| + ||y|z|| - ||x+y|z|| <= (sqrt M - sqrt m) (mM)^(-1/4) sqrt(Re(x,y|z))`` (id 2.19).

    ``residual`` is that of the identity behind the bound,
    ``(||x|z|| + ||y|z||)^2 - ||x+y|z||^2 = 2(||x|z|| ||y|z|| - Re(x,y|z))``.
    """
    x, y, z, _, _ = _prepare(ev, x, y, z, pair.as_scalar_pair())
    m, M = np.asarray(pair.m), np.asarray(pair.M)
    _, _, hres, holds, cscale, _ = _condition(ev, x, y, z, m, M, tol)
    nx, ny = ev.two_norm(x, z, tol), ev.two_norm(y, z, tol)
    nsum = ev.two_norm(x + y, z, tol)
    re = np.real(ev.two_inner(x, y, z))
    sxyz = ev.scale(x, y, z)
    if np.any(holds & (re < -tol.bound(sxyz))):
        raise InconsistencyError("Re(x,y|z) < 0 although the hypothesis holds")
    re_c = np.where(re >= 0, re, np.where(holds, 0.0, np.nan))
    k = (np.sqrt(M) - np.sqrt(m)) / (m * M) ** 0.25
    lhs = nx + ny - nsum
    rhs = k * np.sqrt(re_c)
    residual, rscale = triangle_identity(ev, x, y, z)
    scale = np.fmax((_norm(ev, x) + _norm(ev, y)) * _norm(ev, z), np.abs(rhs))
    return _report("2.19", lhs, rhs, holds, np.max(k), scale, tol, chain=(0.0, lhs, rhs),
                   residual=residual, residual_ok=np.asarray(residual) <= tol.bound(rscale),
                   extras={"hypothesis_residual": hres})


def orthonormal_pair(ev: TwoInnerEvaluator, z=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(y, m, z)`` with ``||y|z|| = ||m|z|| = 1`` and ``(y, m | z) = 0``.

    Gram-Schmidt in the 2-inner product relative to ``z`` (default: the
    last basis vector).  Needs dimension >= 3: modulo ``z`` the space has
    dimension ``dim - 1``.
    """
    s = ev.space
    if s.dim < 3:
        raise InvalidInstance("an orthonormal pair relative to z needs dimension >= 3")
    z = s.basis(s.dim - 1) if z is None else s.vector(z, "z")
    found = []
    for k in range(s.dim):
        v = s.basis(k)
        for u in found:
            v = v - ev.two_inner(v, u, z) * u
        n = float(ev.two_norm(v, z))
        if n > 1e-6:
            found.append(v / n)
        if len(found) == 2:
            return found[0], found[1], z
    raise InvalidInstance("z leaves fewer than two independent directions")


def extremal_instance(ev: TwoInnerEvaluator, y, m_vec, z, pair: ScalarPair,
                      tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``x = (A+a)/2 y + (A-a)/2 m``, which attains equality in the additive bound."""
    pair.check_field(ev.field)
    s = ev.space
    y, m_vec, z = s.vector(y, "y"), s.vector(m_vec, "m_vec"), s.vector(z, "z")
    band = tol.bound(1.0)
    if abs(float(ev.two_norm_sq(y, z)) - 1.0) > band:
        raise InvalidInstance("||y|z|| must be 1")
    if abs(float(ev.two_norm_sq(m_vec, z)) - 1.0) > band:
        raise InvalidInstance("||m|z|| must be 1")
    if abs(complex(ev.two_inner(y, m_vec, z))) > band:
        raise InvalidInstance("(y, m | z) must be 0")
    a, A = complex(pair.a), complex(pair.A)
    if a == A:
        raise InvalidInstance("extremal construction needs a != A")
    if ev.field is Field.REAL:
        a, A = a.real, A.real
    return 0.5 * (A + a) * y + 0.5 * (A - a) * m_vec


@dataclass
class Witness:
    """An admissible instance on which the bound with constant ``constant`` fails."""

    which: str
    constant: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    a: complex
    A: complex
    lhs: float
    rhs: float


SHARPNESS_CASES = ("thm2.1", "thm2.2")


def probe_instance(ev: TwoInnerEvaluator | None, C: float, which: str,
                   tol: Tolerance = DEFAULT_TOL) -> Witness:
    """Evaluate the bound with constant ``C`` on the canonical extremal instance.

    ``thm2.1``: additive bound with ``a=0, A=2`` and an orthonormal pair.
    ``thm2.2``: multiplicative bound with ``a=A=1`` and ``x=y``.
    The record is a genuine witness only if ``lhs`` exceeds ``rhs`` beyond
    the tolerance band; :func:`sharpness_probe` applies that test.
    """
    C = float(C)
    if not (C > 0 and math.isfinite(C)):
        raise InvalidInput("constant must be positive and finite")
    if ev is None:
        ev = TwoInnerEvaluator(InnerSpace.unit(3))
    y, m_vec, z = orthonormal_pair(ev)
    if which == "thm2.1":
        pair = ScalarPair(0.0, 2.0)
        x = extremal_instance(ev, y, m_vec, z, pair, tol)
        lhs = float(ev.cbs_gap(x, y, z))
        rhs = C * abs(pair.A - pair.a) ** 2 * float(ev.two_norm_sq(y, z)) ** 2
    elif which == "thm2.2":
        pair = ScalarPair(1.0, 1.0)
        x = y.copy()
        lhs = float(ev.two_norm(x, z)) * float(ev.two_norm(y, z))
        num = ((pair.A.conjugate() + pair.a.conjugate()) * complex(ev.two_inner(x, y, z))).real
        rhs = C * num / math.sqrt((pair.a.conjugate() * pair.A).real)
    else:
        raise InvalidInput(f"unknown sharpness case {which!r}; expected one of {SHARPNESS_CASES}")
    if not condition_check(ev, x, y, z, pair, tol).holds:
        raise InconsistencyError("canonical extremal instance fails its own hypothesis")
    return Witness(which, C, x, y, z, pair.a, pair.A, lhs, rhs)


def sharpness_probe(ev: TwoInnerEvaluator | None, C: float, which: str,
                    tol: Tolerance = DEFAULT_TOL) -> Witness | None:
    """A witness that ``C`` is below the sharp constant, or None."""
    w = probe_instance(ev, C, which, tol)
    if w.lhs > w.rhs + tol.bound(max(abs(w.lhs), abs(w.rhs))):
        return w
    return None


def ball_instance(ev: TwoInnerEvaluator, gen, y, z, pair: ScalarPair, fill) -> np.ndarray:
    """Random ``x`` with ``||x - (a+A)/2 y | z|| = fill * |A-a|/2 * ||y|z||``.

    ``fill`` in [0, 1] places ``x`` inside the hypothesis ball (1 is the
    boundary).  A random multiple of ``z`` is added; it leaves every
    quantity relative to ``z`` unchanged.  Broadcasts over stacks.
    """
    s = ev.space
    y, z, a, A = _prepare(ev, y, y, z, pair)[1:]
    count = None if y.ndim == 1 else y.shape[0]
    radius = 0.5 * np.abs(A - a) * ev.two_norm(y, z)
    u = sample_vectors(gen, count, s.dim, s.field)
    # redraw directions nearly parallel to z
    while True:
        nu = ev.two_norm(u, z)
        bad = nu <= 1e-3 * _norm(ev, u) * _norm(ev, z)
        if not np.any(bad):
            break
        u = np.where(np.asarray(bad)[..., None], sample_vectors(gen, count, s.dim, s.field), u)
    t = sample_vectors(gen, count, 2, s.field)[..., :1]
    return _col(0.5 * (a + A)) * y + _col(np.asarray(fill) * radius / nu) * u + t * z
