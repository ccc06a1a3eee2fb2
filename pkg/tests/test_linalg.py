import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.linalg import (
    as_complex_array,
    frobenius_inner,
    hermitize,
    multi_index_decode,
    multi_index_encode,
)


class TestFrobeniusInner:
    def test_identity_with_itself_is_trace(self):
        eye = np.eye(3, dtype=complex)
        assert frobenius_inner(eye, eye) == 3.0

    def test_zero_first_argument(self):
        assert frobenius_inner(np.zeros((2, 2)), np.ones((2, 2))) == 0.0

    def test_hand_contraction(self):
        a = np.array([[1.0, 1j], [-1j, 2.0]])
        # sum |a_ij|^2 = 1 + 1 + 1 + 4
        assert frobenius_inner(a, a) == pytest.approx(7.0)

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            frobenius_inner(np.eye(2), np.eye(3))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_sesquilinearity(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(3))
        lam = complex(rng.standard_normal(), rng.standard_normal())
        lhs = frobenius_inner(lam * a + b, c)
        rhs = np.conj(lam) * frobenius_inner(a, c) + frobenius_inner(b, c)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        assert frobenius_inner(a, lam * c) == pytest.approx(lam * frobenius_inner(a, c), rel=1e-12)

    def test_self_pairing_real_nonnegative(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        val = frobenius_inner(a, a)
        assert val.imag == 0.0
        assert val.real >= 0.0


class TestHermitize:
    def test_fixed_point(self):
        m = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
        assert np.array_equal(hermitize(m), m)

    def test_upper_triangular_example(self):
        out = hermitize(np.array([[0.0, 2.0], [0.0, 0.0]]))
        assert np.array_equal(out, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_anti_hermitian_killed(self):
        assert np.abs(hermitize(1j * np.eye(3))).max() == 0.0

    def test_non_square_raises(self):
        with pytest.raises(ValueError, match="square"):
            hermitize(np.ones((2, 3)))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_idempotent_projection(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        once = hermitize(m)
        assert np.allclose(hermitize(once), once, atol=1e-15)
        assert np.allclose(once, once.conj().T, atol=1e-15)


class TestMultiIndex:
    def test_zero_tuple(self):
        assert multi_index_encode((0, 0, 0, 0), 3) == 0

    def test_big_endian_convention(self):
        assert multi_index_encode((1, 0), 2) == 2

    def test_decode_base_two(self):
        assert multi_index_decode(5, 2, 3) == (1, 0, 1)

    @pytest.mark.parametrize("n,d", [(2, 3), (3, 4), (5, 2), (10, 6)])
    def test_bijection(self, n, d):
        total = n**d
        flats = range(total) if total <= 10_000 else np.random.default_rng(1).integers(0, total, 500)
        for flat in flats:
            digits = multi_index_decode(int(flat), n, d)
            assert multi_index_encode(digits, n) == flat

    @given(st.integers(2, 6), st.lists(st.integers(0, 5), min_size=1, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_round_trip_from_digits(self, n, digits):
        digits = [d % n for d in digits]
        flat = multi_index_encode(digits, n)
        assert multi_index_decode(flat, n, len(digits)) == tuple(digits)

    def test_out_of_range_digit(self):
        with pytest.raises(ValueError, match="out of range"):
            multi_index_encode((0, 3), 3)

    def test_out_of_range_flat(self):
        with pytest.raises(ValueError, match="out of range"):
            multi_index_decode(8, 2, 3)


def test_as_complex_array_rejects_nan():
    with pytest.raises(ValueError, match="finite"):
        as_complex_array([1.0, float("nan")])
