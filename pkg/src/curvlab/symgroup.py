"""Slot permutations on tensor powers, the symmetrizer, and trace identities.

A permutation sigma of degree d acts on V^(x)d by

    W_sigma(v_1 (x) ... (x) v_d) = v_sigma(1) (x) ... (x) v_sigma(d),

i.e. output slot p receives the content of input slot sigma(p).  Under this
convention composing the operators reverses the order of the permutations:
W_sigma @ W_tau equals the operator of tau * sigma (pinned by a unit test).

The module also evaluates the 24 traces tr((f (x) f) . W_sigma) for a
Hermitian endomorphism f of V (x) V, twice: once through closed forms in the
partial traces of f, and once by brute force through dense matrices.  The two
routes are kept strictly independent so that either one can catch a slip in
the other.  Rows are keyed by the letter words "jklm" ... "mlkj" that name
how the four tensor slots are rearranged; the word order is the canonical
ordering used throughout (see TRACE_WORDS).
"""

from __future__ import annotations

import itertools
import math
import operator

import numpy as np

from .linalg import (
    SYM_TOL,
    ResourceLimitError,
    all_index_tuples,
    is_hermitian,
)

# Dense matrices on V^(x)d are capped at n^(2d) entries (~64M); beyond this
# the symmetrizer is available only in operator form via symmetrize_power.
DENSE_CAP = 1 << 26

_LETTERS = "jklm"


class Permutation:
    """An element of S_d stored as its image list (zero-based).

    images[p] = sigma(p).  Multiplication is ordinary function composition:
    (sigma * tau)(p) = sigma(tau(p)).
    """

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(operator.index(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection on [0, {len(images)}): {images}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(range(d))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for p, q in enumerate(self.images):
            inv[q] = p
        return Permutation(inv)

    def __call__(self, p: int) -> int:
        return self.images[p]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(tuple(self.images[other.images[p]] for p in range(self.degree)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"


def all_permutations(d: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(d))]


def apply_permutation(perm: Permutation, tensor) -> np.ndarray:
    """Slot-permute a degree-d coordinate array: result[a] = T[a o sigma^-1]."""
    tensor = np.asarray(tensor)
    if tensor.ndim != perm.degree:
        raise ValueError(f"degree mismatch: permutation degree {perm.degree}, tensor rank {tensor.ndim}")
    return np.transpose(tensor, perm.images)


def _check_dense(n: int, d: int) -> None:
    if n ** (2 * d) > DENSE_CAP:
        raise ResourceLimitError(
            f"dense operator on V^(x){d} with n={n} needs {n ** (2 * d)} entries (cap {DENSE_CAP})"
        )


def permutation_matrix(perm: Permutation, n: int) -> np.ndarray:
    """Dense matrix of W_sigma on V^(x)d with big-endian index packing."""
    d = perm.degree
    _check_dense(n, d)
    size = n**d
    tuples = all_index_tuples(n, d)
    # Column c gets its 1 in row r with r_p = c_sigma(p).
    rows = np.ravel_multi_index(tuple(tuples[:, perm.images[p]] for p in range(d)), (n,) * d)
    mat = np.zeros((size, size))
    mat[rows, np.arange(size)] = 1.0
    return mat


def projector_sym(n: int, d: int) -> np.ndarray:
    """Projection of V^(x)d onto the symmetric subspace, as a dense matrix.

    Equals the average of all d! slot-permutation operators; idempotent,
    Hermitian, with trace binom(n+d-1, d).
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    _check_dense(n, d)
    size = n**d
    tuples = all_index_tuples(n, d)
    cols = np.arange(size)
    proj = np.zeros((size, size))
    for images in itertools.permutations(range(d)):
        rows = np.ravel_multi_index(tuple(tuples[:, images[p]] for p in range(d)), (n,) * d)
        proj[rows, cols] += 1.0
    proj /= math.factorial(d)
    return proj


def symmetrize_power(tensor) -> np.ndarray:
    """Apply the symmetrizer to a degree-d coordinate array without dense matrices."""
    tensor = np.asarray(tensor)
    d = tensor.ndim
    acc = np.zeros_like(tensor, dtype=complex)
    for images in itertools.permutations(range(d)):
        acc += np.transpose(tensor, images)
    return acc / math.factorial(d)


def _square_side(f: np.ndarray) -> int:
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"square matrix required, got shape {f.shape}")
    n = math.isqrt(f.shape[0])
    if n * n != f.shape[0]:
        raise ValueError(f"matrix side {f.shape[0]} is not a perfect square; need an operator on V (x) V")
    return n


def partial_trace(f, which: int) -> np.ndarray:
    """Partial trace of an endomorphism of V (x) V, tying one row slot to one column slot.

    With the four-index view F[a,b,c,d] = f[(a,b),(c,d)] the variants are

        13: out[k,l] = sum_j F[j,k,j,l]      14: out[k,l] = sum_j F[j,k,l,j]
        23: out[k,l] = sum_j F[k,j,j,l]      24: out[k,l] = sum_j F[k,j,l,j]
    """
    f = np.asarray(f, dtype=complex)
    n = _square_side(f)
    f4 = f.reshape(n, n, n, n)
    if which == 13:
        return np.einsum("jkjl->kl", f4)
    if which == 14:
        return np.einsum("jklj->kl", f4)
    if which == 23:
        return np.einsum("kjjl->kl", f4)
    if which == 24:
        return np.einsum("kjlj->kl", f4)
    raise ValueError(f"partial trace selector must be one of 13, 14, 23, 24, got {which}")


# The 24 letter words in canonical (table) order.
TRACE_WORDS = (
    "jklm", "jkml", "jlkm", "jlmk", "jmkl", "jmlk",
    "kjlm", "kjml", "kljm", "klmj", "kmjl", "kmlj",
    "ljkm", "ljmk", "lkjm", "lkmj", "lmjk", "lmkj",
    "mjkl", "mjlk", "mkjl", "mklj", "mljk", "mlkj",
)


def row_permutation(word: str) -> Permutation:
    """The degree-4 permutation whose dense trace reproduces the row `word`.

    The word lists where each of the four letters lands; the matching
    operator permutation is the inverse of the letter-position map.  This
    pairing is pinned by the closed-form vs brute-force equivalence tests.
    """
    if sorted(word) != sorted(_LETTERS):
        raise ValueError(f"word must be a rearrangement of {_LETTERS!r}, got {word!r}")
    positions = Permutation(tuple(_LETTERS.index(ch) for ch in word))
    return positions.inverse()


_WORD_BY_IMAGES = {row_permutation(w).images: w for w in TRACE_WORDS}


class _TableParts:
    """Shared sub-expressions of the closed-form trace table."""

    __slots__ = ("f", "fw", "wf", "tr13", "tr14", "tr23", "tr24", "trf", "trt14")

    def __init__(self, f: np.ndarray, n: int):
        swap = permutation_matrix(Permutation((1, 0)), n)
        self.f = f
        self.fw = f @ swap
        self.wf = swap @ f
        self.tr13 = partial_trace(f, 13)
        self.tr14 = partial_trace(f, 14)
        self.tr23 = partial_trace(f, 23)
        self.tr24 = partial_trace(f, 24)
        self.trf = complex(np.trace(f))
        self.trt14 = complex(np.trace(self.tr14))


# Closed forms for tr((f (x) f) . W_sigma), one per letter word.  Each uses
# only traces, partial traces and Frobenius pairings of f (np.vdot conjugates
# its first argument), together with Hermitianity of f.
_ROW_FORMULAS = {
    "jklm": lambda p: p.trf * p.trf,
    "jkml": lambda p: p.trt14 * p.trf,
    "jlkm": lambda p: np.vdot(p.tr13, p.tr24),
    "jlmk": lambda p: np.vdot(p.tr13, p.tr14),
    "jmkl": lambda p: np.vdot(p.tr13, p.tr23),
    "jmlk": lambda p: np.vdot(p.tr13, p.tr13),
    "kjlm": lambda p: p.trt14 * p.trf,
    "kjml": lambda p: p.trt14 * p.trt14,
    "kljm": lambda p: np.vdot(p.tr23, p.tr24),
    "klmj": lambda p: np.vdot(p.tr23, p.tr14),
    "kmjl": lambda p: np.vdot(p.tr23, p.tr23),
    "kmlj": lambda p: np.vdot(p.tr23, p.tr13),
    "ljkm": lambda p: np.vdot(p.tr14, p.tr24),
    "ljmk": lambda p: np.vdot(p.tr14, p.tr14),
    "lkjm": lambda p: np.vdot(p.tr24, p.tr24),
    "lkmj": lambda p: np.vdot(p.tr24, p.tr14),
    "lmjk": lambda p: np.vdot(p.f, p.f),
    "lmkj": lambda p: np.vdot(p.f, p.fw),
    "mjkl": lambda p: np.vdot(p.tr14, p.tr23),
    "mjlk": lambda p: np.vdot(p.tr14, p.tr13),
    "mkjl": lambda p: np.vdot(p.tr24, p.tr23),
    "mklj": lambda p: np.vdot(p.tr24, p.tr13),
    "mljk": lambda p: np.vdot(p.wf, p.f),
    "mlkj": lambda p: np.vdot(p.wf, p.fw),
}


def _require_hermitian(f: np.ndarray, tol: float) -> None:
    if not is_hermitian(f, tol):
        raise ValueError("closed-form trace table requires a Hermitian operator")


def trace_table_closed(f, tol: float = SYM_TOL) -> dict[str, complex]:
    """All 24 closed-form traces tr((f (x) f) . W_sigma), keyed by letter word."""
    f = np.asarray(f, dtype=complex)
    n = _square_side(f)
    _require_hermitian(f, tol)
    parts = _TableParts(f, n)
    return {word: complex(_ROW_FORMULAS[word](parts)) for word in TRACE_WORDS}


def trace_f_tensor_f_sigma(f, sigma: Permutation, tol: float = SYM_TOL) -> complex:
    """Closed-form tr((f (x) f) . W_sigma) for sigma in S_4, f Hermitian."""
    f = np.asarray(f, dtype=complex)
    n = _square_side(f)
    if sigma.degree != 4:
        raise ValueError("sigma must have degree 4")
    _require_hermitian(f, tol)
    word = _WORD_BY_IMAGES[sigma.images]
    return complex(_ROW_FORMULAS[word](_TableParts(f, n)))


def trace_f_tensor_f_sigma_oracle(f, sigma: Permutation) -> complex:
    """Brute-force tr((f (x) f) . W_sigma) through dense n^4 x n^4 matrices."""
    f = np.asarray(f, dtype=complex)
    n = _square_side(f)
    if sigma.degree != 4:
        raise ValueError("sigma must have degree 4")
    _check_dense(n, 4)
    ff = np.kron(f, f)
    w = permutation_matrix(sigma, n)
    return complex(np.einsum("ab,ba->", ff, w))


def trace_table_oracle(f) -> dict[str, complex]:
    """Brute-force version of trace_table_closed, keyed identically."""
    f = np.asarray(f, dtype=complex)
    n = _square_side(f)
    _check_dense(n, 4)
    ff = np.kron(f, f)
    out = {}
    for word in TRACE_WORDS:
        w = permutation_matrix(row_permutation(word), n)
        out[word] = complex(np.einsum("ab,ba->", ff, w))
    return out


def trace_f_pi4(f, tol: float = SYM_TOL) -> float:
    """tr((f (x) f) . Pi_4) as the average of the 24 closed-form rows.

    Real for Hermitian f; the imaginary part is checked and dropped.
    """
    rows = trace_table_closed(f, tol)
    total = sum(rows.values()) / 24.0
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        raise ArithmeticError(f"trace of f(x)f against the symmetrizer came out complex: {total}")
    return float(total.real)
