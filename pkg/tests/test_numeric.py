import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twoinner import (
    Field,
    InvalidDimension,
    InvalidInput,
    SeededGenerator,
    Tolerance,
    approx_equal,
    sample_vector,
    sample_vectors,
)
from twoinner.numeric import as_vector, scalar

MASK = (1 << 64) - 1


def splitmix_word(seed, k):
    """Reference splitmix64 in plain integers: word k of the stream."""

    def mix(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK
        return z ^ (z >> 31)

    return mix((mix(seed) + (k + 1) * 0x9E3779B97F4A7C15) & MASK)


class TestTolerance:
    def test_defaults(self):
        tol = Tolerance()
        assert (tol.abs, tol.rel) == (1e-12, 1e-9)

    @pytest.mark.parametrize("abs_, rel", [(-1e-12, 1e-9), (1e-12, -1.0), (0.0, 0.0),
                                           (math.inf, 1e-9), (1e-12, math.nan)])
    def test_rejects_invalid(self, abs_, rel):
        with pytest.raises(InvalidInput):
            Tolerance(abs_, rel)

    def test_bound(self):
        assert Tolerance(1e-12, 1e-9).bound(-2.0) == pytest.approx(1e-12 + 2e-9)


class TestApproxEqual:
    @pytest.mark.parametrize("a, b, tol, expected", [
        (1.0, 1.0, Tolerance(1e-12, 1e-9), True),
        (1.0, 1.0 + 5e-10, Tolerance(0.0, 1e-9), True),
        (1.0, 1.01, Tolerance(1e-12, 1e-9), False),
        (0.0, 5e-13, Tolerance(1e-12, 0.0), True),
        (1j, 1j + 2e-9, Tolerance(0.0, 1e-9), False),
    ])
    def test_cases(self, a, b, tol, expected):
        assert approx_equal(a, b, tol) is expected

    @pytest.mark.parametrize("bad", [math.nan, math.inf, complex(0, math.inf)])
    def test_non_finite(self, bad):
        with pytest.raises(InvalidInput):
            approx_equal(bad, 1.0)

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_symmetric(self, a, b):
        assert approx_equal(a, b) == approx_equal(b, a)


def test_scalar_real_rejects_imaginary():
    assert scalar(2.5, Field.REAL) == 2.5
    with pytest.raises(InvalidInput):
        scalar(1 + 1e-300j, Field.REAL)
    with pytest.raises(InvalidInput):
        scalar(math.nan)


def test_as_vector():
    assert as_vector([1, 2]).dtype == np.float64
    assert as_vector([1, 2], Field.COMPLEX).dtype == np.complex128
    with pytest.raises(InvalidDimension):
        as_vector([1.0])
    with pytest.raises(InvalidInput):
        as_vector([1.0, math.inf])
    with pytest.raises(InvalidInput):
        as_vector([1j, 0], Field.REAL)


class TestGenerator:
    @pytest.mark.parametrize("seed", [0, 1, 7, 2**64 - 1])
    def test_matches_reference_words(self, seed):
        gen = SeededGenerator(seed)
        words = gen.words(5)
        assert [int(w) for w in words] == [splitmix_word(seed, k) for k in range(5)]
        assert gen.counter == 5

    def test_counter_resumes_stream(self):
        full = SeededGenerator(3).words(10)
        tail = SeededGenerator(3, counter=4).words(6)
        np.testing.assert_array_equal(full[4:], tail)

    def test_uniform_range_and_resolution(self):
        u = SeededGenerator(11).uniform(10_000, 2.0, 3.0)
        assert u.min() >= 2.0 and u.max() < 3.0
        assert abs(u.mean() - 2.5) < 0.02

    def test_spawn_is_independent_and_deterministic(self):
        g = SeededGenerator(5)
        a, b = g.spawn(1).words(4), g.spawn(2).words(4)
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a, SeededGenerator(5).spawn(1).words(4))

    def test_copy(self):
        g = SeededGenerator(9)
        g.words(3)
        c = g.copy()
        np.testing.assert_array_equal(g.words(2), c.words(2))

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            SeededGenerator(-1)
        with pytest.raises(InvalidInput):
            SeededGenerator(2**64)

    def test_scalar_field(self):
        g = SeededGenerator(0)
        assert isinstance(g.scalar(Field.REAL), float)
        assert isinstance(g.scalar("complex"), complex)


class TestSampleVector:
    def test_same_seed_same_vector(self):
        a = sample_vector(SeededGenerator(0), 3, Field.REAL)
        b = sample_vector(SeededGenerator(0), 3, Field.REAL)
        np.testing.assert_array_equal(a, b)

    def test_different_seed_differs(self):
        a = sample_vector(SeededGenerator(0), 3, Field.REAL)
        b = sample_vector(SeededGenerator(1), 3, Field.REAL)
        assert not np.array_equal(a, b)

    def test_dimension_precondition(self):
        with pytest.raises(InvalidDimension):
            sample_vector(SeededGenerator(0), 1, Field.REAL)

    def test_complex_parts_independent(self):
        v = sample_vectors(SeededGenerator(4), 2000, 3, Field.COMPLEX)
        assert v.dtype == np.complex128 and v.shape == (2000, 3)
        assert abs(np.corrcoef(v.real.ravel(), v.imag.ravel())[0, 1]) < 0.05
        assert np.all(np.abs(v.real) <= 1) and np.all(np.abs(v.imag) <= 1)

    def test_real_is_real(self):
        v = sample_vector(SeededGenerator(2), 4, "real")
        assert v.dtype == np.float64

    def test_batch_matches_stream(self):
        g = SeededGenerator(8)
        batch = sample_vectors(g.copy(), 3, 4)
        np.testing.assert_array_equal(batch.ravel(), g.uniform(12))
