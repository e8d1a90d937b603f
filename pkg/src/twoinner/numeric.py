"""Field-aware scalars, tolerance comparison and a counter-based generator.

Vectors are plain 1-D numpy arrays: ``float64`` in the real field and
``complex128`` in the complex field.  A stack of vectors (shape
``(n, dim)``) is accepted wherever a single vector is, which lets the
property sweeps run batched.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class InvalidInput(ValueError):
    """Non-finite or otherwise malformed numeric input."""


class InvalidDimension(InvalidInput):
    """Vector dimension below 2 or mismatched between arguments."""


class InvalidInstance(InvalidInput):
    """An instance violates a construction precondition."""


class InconsistencyError(ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""


class Field(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self):
        return np.float64 if self is Field.REAL else np.complex128

    @classmethod
    def parse(cls, value: "Field | str") -> "Field":
        if isinstance(value, Field):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInput(f"unknown field {value!r}; expected 'real' or 'complex'") from None


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative tolerance: ``|a - b| <= abs + rel * scale``."""

    abs: float = 1e-12
    rel: float = 1e-9

    def __post_init__(self):
        if not (math.isfinite(self.abs) and math.isfinite(self.rel)):
            raise InvalidInput("tolerance components must be finite")
        if self.abs < 0 or self.rel < 0:
            raise InvalidInput("tolerance components must be nonnegative")
        if self.abs == 0 and self.rel == 0:
            raise InvalidInput("tolerance abs and rel cannot both be zero")

    def bound(self, scale=0.0):
        return self.abs + self.rel * np.abs(scale)


DEFAULT_TOL = Tolerance()


def scalar(value, field: Field = Field.COMPLEX) -> complex | float:
    """Coerce ``value`` to a finite scalar of ``field``.

    In the real field a nonzero imaginary part is rejected rather than
    silently dropped.
    """
    try:
        c = complex(value)
    except (TypeError, ValueError):
        raise InvalidInput(f"not a scalar: {value!r}") from None
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidInput(f"non-finite scalar: {value!r}")
    if Field.parse(field) is Field.REAL:
        if c.imag != 0.0:
            raise InvalidInput(f"complex scalar {value!r} in the real field")
        return c.real
    return c


def as_vector(x, field: Field | None = None, *, name: str = "vector") -> np.ndarray:
    """Return ``x`` as a finite float or complex array with last axis >= 2."""
    arr = x if isinstance(x, np.ndarray) else np.asarray(x)
    kind = arr.dtype.kind
    if kind not in "biufc":
        raise InvalidInput(f"{name} is not numeric")
    if field is None:
        field = Field.COMPLEX if kind == "c" else Field.REAL
    if field is Field.REAL:
        if kind == "c":
            if (arr.imag != 0).any():
                raise InvalidInput(f"{name} has nonzero imaginary part in the real field")
            arr = arr.real
        if arr.dtype != np.float64:
            arr = arr.astype(np.float64)
    elif arr.dtype != np.complex128:
        arr = arr.astype(np.complex128)
    if arr.ndim == 0 or arr.shape[-1] < 2:
        raise InvalidDimension(f"{name} must have dimension >= 2, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInput(f"{name} has non-finite entries")
    return arr


def approx_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``|a - b| <= tol.abs + tol.rel * max(|a|, |b|)``."""
    a, b = complex(a), complex(b)
    for v in (a, b):
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidInput(f"non-finite value {v!r}")
    return abs(a - b) <= tol.abs + tol.rel * max(abs(a), abs(b))


# splitmix64 finalizer constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


class SeededGenerator:
    """Counter-based splitmix64 stream.

    Word ``k`` of the stream is ``mix64(mix64(seed) + (k + 1) * golden)``
    (all arithmetic mod 2**64), so any ``(seed, counter)`` pair reproduces
    the same continuation on every platform.  Drawing advances
    ``counter`` by the number of words consumed.  Use :meth:`copy` or
    :meth:`spawn` for independent streams instead of sharing one instance
    across threads.
    """

    def __init__(self, seed: int = 0, counter: int = 0):
        if not (0 <= int(seed) <= _MASK64 and 0 <= int(counter) <= _MASK64):
            raise InvalidInput("seed and counter must be 64-bit unsigned integers")
        self.seed = int(seed)
        self.counter = int(counter)
        self._key = _mix64(np.array([self.seed], dtype=np.uint64))[0]

    def __repr__(self):
        return f"SeededGenerator(seed={self.seed}, counter={self.counter})"

    def copy(self) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.counter)

    def spawn(self, stream: int) -> "SeededGenerator":
        """Independent generator keyed by ``(seed, stream)``."""
        key = int(_mix64(np.array([(self.seed ^ (int(stream) * 0xD1B54A32D192ED03)) & _MASK64],
                                  dtype=np.uint64))[0])
        return SeededGenerator(key)

    def words(self, n: int) -> np.ndarray:
        n = int(n)
        k = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            out = _mix64(self._key + k * _GOLDEN)
        self.counter = (self.counter + n) & _MASK64
        return out

    def uniform(self, size, low: float = -1.0, high: float = 1.0) -> np.ndarray:
        """Uniform doubles on ``[low, high)`` from the top 53 bits of each word."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        u = (self.words(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (low + (high - low) * u).reshape(shape)

    def scalar(self, field: Field, low: float = -1.0, high: float = 1.0):
        field = Field.parse(field)
        if field is Field.REAL:
            return float(self.uniform(1, low, high)[0])
        re, im = self.uniform(2, low, high)
        return complex(re, im)


def sample_vector(gen: SeededGenerator, dim: int, field: Field | str = Field.REAL) -> np.ndarray:
    """Vector with entries uniform on [-1, 1); real and imaginary parts drawn independently."""
    return sample_vectors(gen, None, dim, field)


def sample_vectors(gen: SeededGenerator, count: int | None, dim: int,
                   field: Field | str = Field.REAL) -> np.ndarray:
    """Stack of ``count`` sampled vectors, shape ``(count, dim)``; a single vector if ``count`` is None."""
    field = Field.parse(field)
    if int(dim) < 2:
        raise InvalidDimension(f"dimension must be >= 2, got {dim}")
    shape = (int(dim),) if count is None else (int(count), int(dim))
    if field is Field.REAL:
        return gen.uniform(shape)
    parts = gen.uniform(shape + (2,))
    return parts[..., 0] + 1j * parts[..., 1]
