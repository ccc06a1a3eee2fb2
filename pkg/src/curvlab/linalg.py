"""Dense complex linear algebra shared by the tensor modules.

Everything runs on plain numpy arrays in double-precision complex.  Values
are validated on the way in and treated as immutable afterwards; all helpers
are pure functions.
"""

from __future__ import annotations

import math
import operator

import numpy as np

# Absolute tolerance for validating user-supplied Hermitian data.  Internally
# generated forms are exact by construction and never rely on it.
SYM_TOL = 1e-10


class InvalidTensorError(ValueError):
    """Supplied entries violate a required symmetry beyond tolerance."""


class ResourceLimitError(RuntimeError):
    """A dense operation would exceed the configured size cap."""


def as_complex_array(data, shape=None) -> np.ndarray:
    """Coerce to a contiguous complex array, rejecting NaN/Inf entries."""
    arr = np.ascontiguousarray(data, dtype=complex)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("entries must be finite (no NaN or Inf)")
    return arr


def as_rng(seed) -> np.random.Generator:
    """Accept an integer seed, a seed sequence, or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. standard complex Gaussian samples with E|z|^2 = 1."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def frobenius_inner(a, b) -> complex:
    """Frobenius pairing <A, B> = sum_ij conj(A_ij) B_ij.

    Conjugate-linear in the first argument, linear in the second;
    frobenius_inner(A, A) is real and nonnegative.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def frobenius_norm_sq(a) -> float:
    return float(np.vdot(a, a).real)


def hermitize(m) -> np.ndarray:
    """Project a square matrix onto its Hermitian part, (M + M^H) / 2."""
    m = as_complex_array(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    return (m + m.conj().T) / 2


def is_hermitian(m, tol: float = SYM_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.abs(m - m.conj().T).max(initial=0.0)) <= tol


def multi_index_encode(digits, n: int) -> int:
    """Big-endian base-n encoding: the first digit is the most significant.

    This matches the row-major layout of numpy arrays, so Kronecker-product
    block structure lines up with tensor slot order.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    flat = 0
    for d in digits:
        d = operator.index(d)
        if not 0 <= d < n:
            raise ValueError(f"digit {d} out of range [0, {n})")
        flat = flat * n + d
    return flat


def multi_index_decode(flat: int, n: int, d: int) -> tuple[int, ...]:
    """Inverse of multi_index_encode on [0, n**d)."""
    if n < 1 or d < 0:
        raise ValueError("need dimension >= 1 and degree >= 0")
    flat = operator.index(flat)
    if not 0 <= flat < n**d:
        raise ValueError(f"flat index {flat} out of range [0, {n**d})")
    digits = []
    for _ in range(d):
        flat, r = divmod(flat, n)
        digits.append(r)
    return tuple(reversed(digits))


def all_index_tuples(n: int, d: int) -> np.ndarray:
    """All degree-d index tuples in big-endian flat order, shape (n**d, d)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.intp)
    grids = np.unravel_index(np.arange(n**d), (n,) * d)
    return np.stack(grids, axis=-1)
