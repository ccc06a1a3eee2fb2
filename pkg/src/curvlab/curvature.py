"""Algebraic curvature tensors on a Hermitian vector space.

A curvature-type tensor is stored as the coefficient array R[i,j,k,l] in an
orthonormal frame, subject to the conjugate-pair symmetry

    R[i,j,k,l] = conj(R[j,i,l,k]),

which says exactly that the packing f[(i,k),(j,l)] = R[i,j,k,l] is a
Hermitian matrix on V (x) V; `CurvatureTensor.endomorphism` realizes that
packing.  Tensors with the additional swap symmetry R[i,j,k,l] = R[k,j,i,l]
are the pullbacks of Hermitian forms on the symmetric square and get the
subclass `KahlerTensor`.

Slots 1 and 3 are the linear arguments, slots 2 and 4 the conjugated ones:
H(v) contracts v, conj(v), v, conj(v) against the four indices in order.

Constructors accept an optional positive-definite Gram matrix and move the
data to an orthonormal frame (Cholesky change of frame on all four slots)
before storing, so every stored tensor lives in a frame where the metric is
the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    SYM_TOL,
    InvalidTensorError,
    as_complex_array,
    as_rng,
    complex_gaussian,
    frobenius_norm_sq,
    hermitize,
)

# Tolerance for deciding whether a tensor has the symmetric-pullback (swap)
# symmetry; absolute, on the worst entry residual.
KAHLER_TOL = 1e-10


def _orthonormalize(arr: np.ndarray, gram) -> np.ndarray:
    """Re-express entries in an orthonormal frame of the metric `gram`."""
    n = arr.shape[0]
    g = as_complex_array(gram, (n, n))
    if np.abs(g - g.conj().T).max(initial=0.0) > SYM_TOL:
        raise ValueError("gram matrix must be Hermitian")
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError("gram matrix must be positive definite") from exc
    # New frame e~_a = sum_p A[p,a] e_p with A = (L^-1)^T makes the metric
    # the identity; the same change applies to all four slots.
    a = np.linalg.inv(chol).T
    return np.einsum("pqrs,pa,qb,rc,sd->abcd", arr, a, a.conj(), a, a.conj())


class CurvatureTensor:
    """Rank-4 coefficient array with exact conjugate-pair symmetry.

    Instances are immutable after construction.  User-supplied entries are
    validated against the pair symmetry within `tol` and then exactly
    re-symmetrized (averaging conjugate partners) so that downstream trace
    identities hold to machine precision.
    """

    __slots__ = ("_array",)

    def __init__(self, entries, *, gram=None, tol: float = SYM_TOL):
        arr = as_complex_array(entries)
        if arr.ndim != 4 or len(set(arr.shape)) != 1:
            raise ValueError(f"expected shape (n, n, n, n), got {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("dimension must be >= 1")
        if gram is not None:
            arr = _orthonormalize(arr, gram)
        partner = arr.transpose(1, 0, 3, 2).conj()
        residual = np.abs(arr - partner)
        worst = float(residual.max())
        if worst > tol:
            i, j, k, l = (int(x) for x in np.unravel_index(int(residual.argmax()), residual.shape))
            raise InvalidTensorError(
                f"conjugate-pair symmetry violated: |R[{i},{j},{k},{l}] - conj(R[{j},{i},{l},{k}])|"
                f" = {worst:.3e} > {tol:.1e}"
            )
        arr = (arr + partner) / 2
        arr.setflags(write=False)
        object.__setattr__(self, "_array", arr)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def n(self) -> int:
        return self._array.shape[0]

    @property
    def array(self) -> np.ndarray:
        """The (n, n, n, n) coefficient array (read-only view)."""
        return self._array

    def endomorphism(self) -> np.ndarray:
        """The Hermitian matrix f[(i,k),(j,l)] = R[i,j,k,l] on V (x) V."""
        n = self.n
        return np.ascontiguousarray(self._array.transpose(0, 2, 1, 3).reshape(n * n, n * n))

    def kahler_residual(self) -> float:
        """Worst-entry violation of the slot-1/3 swap symmetry."""
        return float(np.abs(self._array - self._array.transpose(2, 1, 0, 3)).max())

    def is_kahler(self, tol: float = KAHLER_TOL) -> bool:
        return self.kahler_residual() <= tol

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class KahlerTensor(CurvatureTensor):
    """Curvature tensor with the exact slot-1/3 swap symmetry.

    Construction validates the swap symmetry within `kahler_tol` and then
    averages over the four-element symmetry orbit, so stored entries satisfy
    it exactly.
    """

    __slots__ = ()

    def __init__(self, entries, *, gram=None, tol: float = SYM_TOL, kahler_tol: float = KAHLER_TOL):
        super().__init__(entries, gram=gram, tol=tol)
        arr = self._array
        residual = float(np.abs(arr - arr.transpose(2, 1, 0, 3)).max())
        if residual > kahler_tol:
            raise InvalidTensorError(
                f"swap symmetry R[i,j,k,l] = R[k,j,i,l] violated: worst residual {residual:.3e}"
            )
        arr = (arr + arr.transpose(2, 1, 0, 3) + arr.transpose(0, 3, 2, 1) + arr.transpose(2, 3, 0, 1)) / 4
        arr.setflags(write=False)
        object.__setattr__(self, "_array", arr)


def curvature_from_entries(n: int, entries, *, gram=None, tol: float = SYM_TOL) -> CurvatureTensor:
    """Build a tensor from an n^4 entry array (flat, big-endian (i,j,k,l) order, or shaped)."""
    arr = as_complex_array(entries)
    if arr.ndim == 1:
        if arr.shape[0] != n**4:
            raise ValueError(f"expected {n**4} flat entries for n={n}, got {arr.shape[0]}")
        arr = arr.reshape(n, n, n, n)
    return CurvatureTensor(arr, gram=gram, tol=tol)


def sym2_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the symmetric square inside V (x) V, as columns.

    Pairs (i, j) with i <= j in lexicographic order; e_i (x) e_i for the
    diagonal pairs and (e_i (x) e_j + e_j (x) e_i)/sqrt(2) off the diagonal.
    The sqrt(2) normalization is what makes block Frobenius norms add up to
    the full tensor norm.
    """
    cols = []
    for i in range(n):
        for j in range(i, n):
            v = np.zeros(n * n)
            if i == j:
                v[i * n + i] = 1.0
            else:
                v[i * n + j] = v[j * n + i] = 1.0 / math.sqrt(2.0)
            cols.append(v)
    return np.column_stack(cols)


def wedge_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the antisymmetric square: (e_i (x) e_j - e_j (x) e_i)/sqrt(2), i < j."""
    cols = []
    for i in range(n):
        for j in range(i + 1, n):
            v = np.zeros(n * n)
            v[i * n + j] = 1.0 / math.sqrt(2.0)
            v[j * n + i] = -1.0 / math.sqrt(2.0)
            cols.append(v)
    if not cols:
        return np.zeros((n * n, 0))
    return np.column_stack(cols)


def kahler_from_sym2(n: int, h_hat, *, tol: float = SYM_TOL) -> KahlerTensor:
    """Pull a Hermitian form on the symmetric square back to a curvature tensor.

    h_hat is given in the orthonormal basis of `sym2_basis`; the result
    satisfies the swap symmetry by construction and `sym2_quotient` recovers
    h_hat exactly.
    """
    size = n * (n + 1) // 2
    h = as_complex_array(h_hat, (size, size))
    if np.abs(h - h.conj().T).max(initial=0.0) > tol:
        raise InvalidTensorError("form on the symmetric square must be Hermitian")
    h = hermitize(h)
    basis = sym2_basis(n)
    f = basis @ h @ basis.conj().T
    arr = f.reshape(n, n, n, n).transpose(0, 2, 1, 3)
    return KahlerTensor(arr)


def sym2_quotient(tensor: CurvatureTensor) -> np.ndarray:
    """Hermitian form induced on the symmetric square, in the `sym2_basis` frame."""
    basis = sym2_basis(tensor.n)
    return basis.conj().T @ tensor.endomorphism() @ basis


def constant_hsc(n: int, c: float) -> KahlerTensor:
    """The space-form tensor with H(v) = c for every unit v.

    R[i,j,k,l] = (c/2) (delta_ij delta_kl + delta_il delta_kj).
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    eye = np.eye(n)
    arr = (c / 2.0) * (np.einsum("ij,kl->ijkl", eye, eye) + np.einsum("il,kj->ijkl", eye, eye))
    return KahlerTensor(arr)


def wedge_rank_one(n: int, w, *, tol: float = SYM_TOL) -> CurvatureTensor:
    """Rank-one tensor R[i,j,k,l] = w[i,k] conj(w[j,l]) from an antisymmetric w.

    The induced form is positive semidefinite and supported on the
    antisymmetric square, so H vanishes identically.
    """
    w = as_complex_array(w, (n, n))
    if np.abs(w + w.T).max(initial=0.0) > tol:
        raise ValueError("w must be antisymmetric: w[i,k] = -w[k,i]")
    w = (w - w.T) / 2
    arr = np.einsum("ik,jl->ijkl", w, w.conj())
    return CurvatureTensor(arr)


def random_hermitian_curvature(n: int, seed) -> CurvatureTensor:
    """Random tensor whose V (x) V form is the Hermitian part of a complex Gaussian."""
    rng = as_rng(seed)
    f = hermitize(complex_gaussian(rng, (n * n, n * n)))
    arr = f.reshape(n, n, n, n).transpose(0, 2, 1, 3)
    return CurvatureTensor(arr)


def random_kahler_curvature(n: int, seed) -> KahlerTensor:
    """Random swap-symmetric tensor pulled back from a Gaussian Hermitian form."""
    rng = as_rng(seed)
    size = n * (n + 1) // 2
    h = hermitize(complex_gaussian(rng, (size, size)))
    return kahler_from_sym2(n, h)


def hsc(tensor: CurvatureTensor, v) -> float:
    """Sectional value along the complex line through v.

    sum R[i,j,k,l] v_i conj(v_j) v_k conj(v_l) / |v|^4; real for every valid
    tensor (the imaginary part is checked and dropped).
    """
    v = as_complex_array(v, (tensor.n,))
    norm_sq = float(np.vdot(v, v).real)
    if norm_sq == 0.0:
        raise ValueError("direction vector must be nonzero")
    vc = v.conj()
    val = complex(np.einsum("ijkl,i,j,k,l->", tensor.array, v, vc, v, vc)) / norm_sq**2
    if abs(val.imag) > 1e-10 * (1.0 + abs(val.real)):
        raise ArithmeticError(f"sectional value came out complex: {val}")
    return float(val.real)


def hsc_batch(tensor: CurvatureTensor, points: np.ndarray) -> np.ndarray:
    """Vectorized `hsc` over unit vectors stacked as rows of `points`."""
    v = np.asarray(points, dtype=complex)
    w = np.einsum("si,sk->sik", v, v).reshape(v.shape[0], -1)
    return np.einsum("sa,ab,sb->s", w, tensor.endomorphism(), w.conj()).real


def bisectional(tensor: CurvatureTensor, u, v) -> float:
    """Paired directional value sum R[i,j,k,l] u_i conj(u_j) v_k conj(v_l) / (|u|^2 |v|^2).

    Real for every stored tensor because the conjugate-pair symmetry is
    enforced exactly at construction.
    """
    u = as_complex_array(u, (tensor.n,))
    v = as_complex_array(v, (tensor.n,))
    nu = float(np.vdot(u, u).real)
    nv = float(np.vdot(v, v).real)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("direction vectors must be nonzero")
    val = complex(np.einsum("ijkl,i,j,k,l->", tensor.array, u, u.conj(), v, v.conj())) / (nu * nv)
    return float(val.real)


@dataclass(frozen=True)
class RicciSet:
    """The four degree-2 traces and the two full traces of a curvature tensor.

    r1 and r3 are Hermitian; r2 and r4 are general matrices satisfying
    r2[u,v] = conj(r4[v,u]).  s1 = tr r1 = tr r3 and s2 = tr r2 = tr r4.
    """

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray
    s1: float
    s2: float

    @property
    def total(self) -> np.ndarray:
        return self.r1 + self.r2 + self.r3 + self.r4


def ricci_set(tensor: CurvatureTensor) -> RicciSet:
    """Contract one index pair in each of the four possible ways.

    r1[k,l] = sum_j R[j,j,k,l]    r2[k,l] = sum_j R[j,l,k,j]
    r3[k,l] = sum_j R[k,l,j,j]    r4[k,l] = sum_j R[k,j,j,l]

    For swap-symmetric tensors all four coincide and s1 = s2.
    """
    arr = tensor.array
    r1 = np.einsum("jjkl->kl", arr)
    r2 = np.einsum("jlkj->kl", arr)
    r3 = np.einsum("kljj->kl", arr)
    r4 = np.einsum("kjjl->kl", arr)
    s1 = complex(np.einsum("jjkk->", arr))
    s2 = complex(np.einsum("jkkj->", arr))
    return RicciSet(r1=r1, r2=r2, r3=r3, r4=r4, s1=float(s1.real), s2=float(s2.real))


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks of the V (x) V form in the orthonormal symmetric/antisymmetric bases."""

    q_sym: np.ndarray
    q_wedge: np.ndarray
    q_cross: np.ndarray

    @property
    def norm_sym_sq(self) -> float:
        return frobenius_norm_sq(self.q_sym)

    @property
    def norm_wedge_sq(self) -> float:
        return frobenius_norm_sq(self.q_wedge)

    @property
    def norm_cross_sq(self) -> float:
        return frobenius_norm_sq(self.q_cross)


def block_decomposition(tensor: CurvatureTensor) -> BlockDecomposition:
    """Express the V (x) V form in the symmetric (+) antisymmetric splitting.

    The change of basis is unitary, so
    |q_sym|^2 + |q_wedge|^2 + 2 |q_cross|^2 equals the full squared norm.
    """
    f = tensor.endomorphism()
    bs = sym2_basis(tensor.n)
    bw = wedge_basis(tensor.n)
    return BlockDecomposition(
        q_sym=bs.conj().T @ f @ bs,
        q_wedge=bw.conj().T @ f @ bw,
        q_cross=bs.conj().T @ f @ bw,
    )


@dataclass(frozen=True)
class TensorNorms:
    """Scalar summaries feeding the closed-form sphere averages."""

    norm_R_sq: float
    norm_r1_sq: float
    s1: float
    s2: float
    norm_Rsym_sq: float
    norm_ricci_sum_sq: float


def tensor_norms(tensor: CurvatureTensor) -> TensorNorms:
    ricci = ricci_set(tensor)
    blocks = block_decomposition(tensor)
    return TensorNorms(
        norm_R_sq=frobenius_norm_sq(tensor.array),
        norm_r1_sq=frobenius_norm_sq(ricci.r1),
        s1=ricci.s1,
        s2=ricci.s2,
        norm_Rsym_sq=blocks.norm_sym_sq,
        norm_ricci_sum_sq=frobenius_norm_sq(ricci.total),
    )


def tensor_to_json_dict(tensor: CurvatureTensor) -> dict:
    """Serialize as {n, entries} with entries flat [re, im] pairs in (i,j,k,l) order."""
    flat = tensor.array.reshape(-1)
    return {
        "n": tensor.n,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def tensor_from_json_dict(data, *, tol: float = SYM_TOL) -> CurvatureTensor:
    """Inverse of tensor_to_json_dict; validates shape and symmetry."""
    try:
        n = int(data["n"])
        entries = data["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("tensor JSON must be an object with keys 'n' and 'entries'") from exc
    if len(entries) != n**4:
        raise ValueError(f"expected {n**4} entries for n={n}, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return curvature_from_entries(n, flat, tol=tol)
