"""Uniform sampling on the complex unit sphere and exact moment integration.

Two independent ways to average over the sphere live here:

* Monte Carlo: normalized complex Gaussians, drawn from a counter-based
  bit generator so every sample occupies a fixed position in the stream and
  results do not depend on how work is scheduled.

* The exact moment oracle: the normalized sphere integral of a monomial
  v^alpha conj(v)^beta is zero unless alpha == beta and otherwise equals
  alpha! (n-1)! / (n-1+|alpha|)!.  Every exact expectation below is a full
  index-tuple contraction against these moments and never touches the
  symmetrizer or any closed-form identity, which is what makes it a usable
  referee for them.

All integrals are normalized averages; absolute sphere volumes never appear.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureTensor
from .linalg import ResourceLimitError, as_complex_array
from .symgroup import DENSE_CAP, projector_sym

# Fixed Monte Carlo block size; summation proceeds block by block in index
# order so estimates are bit-identical regardless of available parallelism.
_MC_BLOCK = 1 << 16

# Exact expectations contract n^(2d) moment entries; cap matches the dense
# operator cap (n <= 6 for the degree-4 moments used by squared averages).
_EXACT_CAP = DENSE_CAP


@dataclass(frozen=True)
class McEstimate:
    """Sample mean, standard error of the mean, and provenance of an MC run."""

    mean: float
    std_error: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least 2 samples")
        if self.std_error < 0:
            raise ValueError("standard error must be nonnegative")


def _counter_rng(seed) -> np.random.Generator:
    # Philox is counter-based: sample s always reads the same stream offsets.
    return np.random.Generator(np.random.Philox(seed))


def sphere_sampler(n: int, seed) -> np.random.Generator:
    """A generator suitable for `sample_unit_sphere`; fixed seed, fixed stream."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return _counter_rng(seed)


def _unit_rows(z: np.ndarray) -> np.ndarray:
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _draw_block(rng: np.random.Generator, count: int, spheres: int, n: int) -> np.ndarray:
    z = rng.standard_normal((count, spheres, n, 2))
    return _unit_rows(z[..., 0] + 1j * z[..., 1])


def sample_unit_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """One point of the unitarily invariant distribution on the unit sphere of C^n."""
    return _draw_block(rng, 1, 1, n)[0, 0]


def sample_unit_sphere_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` independent sphere points stacked as rows."""
    return _draw_block(rng, count, 1, n)[:, 0, :]


def exact_moment(n: int, alpha, beta) -> float:
    """Normalized sphere average of prod v_i^alpha_i * prod conj(v_i)^beta_i.

    alpha and beta are multiplicity vectors of length n with nonnegative
    integer entries; the value is alpha! (n-1)! / (n-1+|alpha|)! when
    alpha == beta and zero otherwise (phase invariance kills the rest).
    """
    alpha = [int(a) for a in alpha]
    beta = [int(b) for b in beta]
    if len(alpha) != n or len(beta) != n:
        raise ValueError(f"multiplicity vectors must have length n={n}")
    if any(a < 0 for a in alpha) or any(b < 0 for b in beta):
        raise ValueError("multiplicities must be nonnegative")
    if alpha != beta:
        return 0.0
    degree = sum(alpha)
    numer = math.factorial(n - 1)
    for a in alpha:
        numer *= math.factorial(a)
    return numer / math.factorial(n - 1 + degree)


def _tuple_weights(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-tuple multiset key ids and moment weights for all n^d index tuples."""
    keys: dict[tuple[int, ...], int] = {}
    ids = np.empty(n**d, dtype=np.intp)
    weights = np.empty(n**d, dtype=float)
    denom = math.factorial(n - 1 + d)
    base = math.factorial(n - 1)
    for flat, tup in enumerate(itertools.product(range(n), repeat=d)):
        key = tuple(sorted(tup))
        ids[flat] = keys.setdefault(key, len(keys))
        # running product of multiplicity factorials: alpha! over the sorted key
        fact = base
        run = 1
        for pos in range(1, d):
            run = run + 1 if key[pos] == key[pos - 1] else 1
            fact *= run
        weights[flat] = fact / denom
    return ids, weights


def moment_matrix(n: int, d: int) -> np.ndarray:
    """Entrywise exact assembly of the averaged projector (vv*)^(x)d.

    Entry [(a_1..a_d), (b_1..b_d)] is the normalized sphere average of
    prod_p v_{a_p} conj(v_{b_p}), assembled purely from `exact_moment`
    values (index tuples contribute iff they agree as multisets).
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if n ** (2 * d) > _EXACT_CAP:
        raise ResourceLimitError(f"moment matrix for n={n}, d={d} needs {n ** (2 * d)} entries")
    ids, weights = _tuple_weights(n, d)
    return (ids[:, None] == ids[None, :]) * weights[:, None]


def exact_expectation_H(tensor: CurvatureTensor) -> float:
    """Exact sphere average of the sectional value, via degree-2 moments."""
    f = tensor.endomorphism()
    m2 = moment_matrix(tensor.n, 2)
    return float(np.sum(f * m2).real)


def exact_expectation_H2(tensor: CurvatureTensor) -> float:
    """Exact sphere average of the squared sectional value, via degree-4 moments."""
    f = tensor.endomorphism()
    m4 = moment_matrix(tensor.n, 4)
    return float(np.sum(np.kron(f, f) * m4).real)


def exact_expectation_B2(tensor: CurvatureTensor) -> float:
    """Exact average of the squared paired value over two independent spheres.

    Factors into one degree-2 moment contraction per sphere.
    """
    n = tensor.n
    m2 = moment_matrix(n, 2).reshape(n, n, n, n)
    arr = tensor.array
    val = np.einsum("ijkl,pqrs,ipjq,krls->", arr, arr, m2, m2, optimize=True)
    return float(complex(val).real)


def exact_expectation_B_mean(tensor: CurvatureTensor, eta) -> float:
    """Exact average of the paired value over the first argument, second fixed at eta."""
    n = tensor.n
    eta = as_complex_array(eta, (n,))
    norm_sq = float(np.vdot(eta, eta).real)
    if norm_sq == 0.0:
        raise ValueError("eta must be nonzero")
    m1 = moment_matrix(n, 1)
    val = np.einsum("ijkl,ij,k,l->", tensor.array, m1, eta, eta.conj())
    return float(complex(val).real) / norm_sq


def mc_expectation(integrand, n: int, samples: int, seed, *, spheres: int = 1) -> McEstimate:
    """Monte Carlo mean and standard error of `integrand` over sphere points.

    `integrand` receives a (block, n) array of unit rows (or (block, spheres, n)
    when spheres > 1) and must return one real value per row.  Sampling and
    accumulation run in fixed-size blocks in index order, so the estimate is
    fully determined by (samples, seed).
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if n < 1 or spheres < 1:
        raise ValueError("need n >= 1 and spheres >= 1")
    rng = _counter_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        count = min(_MC_BLOCK, samples - done)
        pts = _draw_block(rng, count, spheres, n)
        if spheres == 1:
            pts = pts[:, 0, :]
        vals = np.asarray(integrand(pts), dtype=float)
        if vals.shape != (count,):
            raise ValueError(f"integrand returned shape {vals.shape}, expected ({count},)")
        total += float(vals.sum())
        total_sq += float(np.square(vals).sum())
        done += count
    mean = total / samples
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return McEstimate(
        mean=mean,
        std_error=math.sqrt(var / samples),
        samples=samples,
        seed=int(seed) if np.isscalar(seed) else 0,
    )


def exact_projection_residual(n: int, d: int) -> float:
    """Frobenius distance between the moment assembly and the scaled symmetrizer.

    Both sides compute the sphere average of (vv*)^(x)d: the left entrywise
    from exact monomial moments, the right as the symmetrizer divided by
    binom(n+d-1, d).  Agreement to machine precision is the foundation every
    other check in the package rests on.
    """
    target = projector_sym(n, d) / math.comb(n + d - 1, d)
    return float(np.linalg.norm(moment_matrix(n, d) - target))


def mc_projection_residual(n: int, d: int, samples: int, seed) -> float:
    """Frobenius distance between the MC average of (vv*)^(x)d and its exact value."""
    if samples < 1:
        raise ValueError("need at least 1 sample")
    if n ** (2 * d) > _EXACT_CAP:
        raise ResourceLimitError(f"dense average for n={n}, d={d} exceeds the size cap")
    target = projector_sym(n, d) / math.comb(n + d - 1, d)
    rng = _counter_rng(seed)
    acc = np.zeros((n**d, n**d), dtype=complex)
    done = 0
    while done < samples:
        count = min(_MC_BLOCK, samples - done)
        v = _draw_block(rng, count, 1, n)[:, 0, :]
        w = v
        for _ in range(d - 1):
            w = np.einsum("sa,si->sai", w, v).reshape(count, -1)
        acc += np.einsum("sp,sq->pq", w, w.conj())
        done += count
    return float(np.linalg.norm(acc / samples - target))
