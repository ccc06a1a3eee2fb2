"""Closed-form sphere averages and the structural consequences of vanishing H.

Each function returns the closed-form side of one identity; the exact moment
oracle in `curvlab.sphere` provides the other side, and the harness pairs
them up.  Binomial coefficients are computed in exact integer arithmetic.

The squared average of the paired (two-direction) value ships in two
variants whose constants disagree: `l2_bisectional_paper` uses the
simplification that the sphere average of r(v, conj v)^2 is |r|^2 / n, while
`l2_bisectional_derived` replaces that step with the quadratic-moment value
(s^2 + |r|^2) / (n (n+1)).  The two coincide exactly when the degree-2 trace
is a multiple of the identity (in particular for n = 1).  Neither variant is
privileged here: `adjudicate_bisectional` measures both against the exact
oracle and reports which one survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import (
    KAHLER_TOL,
    CurvatureTensor,
    block_decomposition,
    ricci_set,
    tensor_norms,
)
from .linalg import frobenius_norm_sq
from .sphere import exact_expectation_B2
from .symgroup import trace_f_pi4

# Below this scale, pass/fail comparisons switch from relative to absolute
# difference to avoid 0/0 flakiness.
NEAR_ZERO = 1e-12


@dataclass(frozen=True)
class IdentityResult:
    """One closed-form vs oracle comparison, with optional MC corroboration."""

    name: str
    closed_form: float
    exact_oracle: float
    abs_diff: float
    rel_diff: float
    passed: bool
    mc: object = None


def compare(name: str, closed_form: float, exact_oracle: float, rel_tol: float, mc=None) -> IdentityResult:
    """Assemble an IdentityResult with the near-zero comparison rule.

    Below the near-zero threshold the relative quotient degenerates to 0/0,
    so both the pass decision and the reported rel_diff switch to the
    absolute difference there.
    """
    abs_diff = abs(closed_form - exact_oracle)
    scale = max(abs(closed_form), abs(exact_oracle))
    if scale <= NEAR_ZERO:
        rel_diff = abs_diff
        passed = abs_diff <= NEAR_ZERO
    else:
        rel_diff = abs_diff / scale
        passed = rel_diff <= rel_tol
    return IdentityResult(
        name=name,
        closed_form=float(closed_form),
        exact_oracle=float(exact_oracle),
        abs_diff=float(abs_diff),
        rel_diff=float(rel_diff),
        passed=bool(passed),
        mc=mc,
    )


def require_kahler(tensor: CurvatureTensor, tol: float = KAHLER_TOL) -> None:
    if not tensor.is_kahler(tol):
        raise ValueError(
            f"tensor lacks the swap symmetry (worst residual {tensor.kahler_residual():.3e});"
            " use the Hermitian-case formulas instead"
        )


def mean_hsc_kahler(tensor: CurvatureTensor) -> float:
    """Sphere average of H for a swap-symmetric tensor: s / binom(n+1, 2)."""
    require_kahler(tensor)
    return ricci_set(tensor).s1 / math.comb(tensor.n + 1, 2)


def l2_hsc_kahler(tensor: CurvatureTensor) -> float:
    """Sphere average of H^2 for a swap-symmetric tensor.

    (|R|^2 + 4 |r|^2 + s^2) / (binom(n+1,2) binom(n+3,2)).
    """
    require_kahler(tensor)
    n = tensor.n
    # The denominator is equivalently 6 binom(n+3, 4); both are exact ints.
    assert 6 * math.comb(n + 3, 4) == math.comb(n + 1, 2) * math.comb(n + 3, 2)
    norms = tensor_norms(tensor)
    numer = norms.norm_R_sq + 4.0 * norms.norm_r1_sq + norms.s1**2
    return numer / (math.comb(n + 1, 2) * math.comb(n + 3, 2))


def l2_hsc_kahler_trace_route(tensor: CurvatureTensor) -> float:
    """Same average through the degree-4 symmetrizer trace (intermediate route)."""
    require_kahler(tensor)
    n = tensor.n
    return trace_f_pi4(tensor.endomorphism()) / math.comb(n + 3, 4)


def mean_hsc_hermitian(tensor: CurvatureTensor) -> float:
    """Sphere average of H for a general tensor: (s1 + s2) / (2 binom(n+1, 2)).

    Reduces to `mean_hsc_kahler` when the swap symmetry holds (s1 = s2).
    """
    ricci = ricci_set(tensor)
    return (ricci.s1 + ricci.s2) / (2.0 * math.comb(tensor.n + 1, 2))


def l2_hsc_hermitian(tensor: CurvatureTensor) -> float:
    """Sphere average of H^2 for a general tensor.

    (4 |R_sym|^2 + |r1 + r2 + r3 + r4|^2 + (s1 + s2)^2) / (4! binom(n+3, 4)),
    where R_sym is the block of the form on the symmetric square.
    """
    n = tensor.n
    norms = tensor_norms(tensor)
    numer = 4.0 * norms.norm_Rsym_sq + norms.norm_ricci_sum_sq + (norms.s1 + norms.s2) ** 2
    return numer / (24.0 * math.comb(n + 3, 4))


def variance_hsc(tensor: CurvatureTensor) -> float:
    """Variance of H over the sphere for a swap-symmetric tensor.

    Nonnegative up to roundoff (>= -1e-12 in practice); exactly zero for the
    constant-H space forms.
    """
    return l2_hsc_kahler(tensor) - mean_hsc_kahler(tensor) ** 2


@dataclass(frozen=True)
class ZeroHscChecks:
    """The three structural consequences of identically vanishing H."""

    sym_block_zero: bool
    scalar_sum_zero: bool
    ricci_sum_zero: bool
    residuals: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return self.sym_block_zero and self.scalar_sum_zero and self.ricci_sum_zero


def zero_hsc_consequences(tensor: CurvatureTensor, tol: float = 1e-12) -> ZeroHscChecks:
    """Check what a vanishing sectional value forces on the tensor.

    H == 0 on the sphere is equivalent to the conjunction of: the symmetric
    block of the form vanishes, s1 + s2 = 0, and r1 + r2 + r3 + r4 = 0 (the
    squared-average identity has exactly these three terms in its numerator).
    """
    blocks = block_decomposition(tensor)
    ricci = ricci_set(tensor)
    residuals = {
        "sym_block": math.sqrt(blocks.norm_sym_sq),
        "scalar_sum": abs(ricci.s1 + ricci.s2),
        "ricci_sum": math.sqrt(frobenius_norm_sq(ricci.total)),
    }
    return ZeroHscChecks(
        sym_block_zero=residuals["sym_block"] <= tol,
        scalar_sum_zero=residuals["scalar_sum"] <= tol,
        ricci_sum_zero=residuals["ricci_sum"] <= tol,
        residuals=residuals,
    )


def bisectional_mean(tensor: CurvatureTensor, eta) -> float:
    """Average of the paired value over its first direction: r(eta, conj eta) / n."""
    require_kahler(tensor)
    n = tensor.n
    eta = np.asarray(eta, dtype=complex)
    norm_sq = float(np.vdot(eta, eta).real)
    if norm_sq == 0.0:
        raise ValueError("eta must be nonzero")
    r1 = ricci_set(tensor).r1
    val = complex(np.einsum("kl,k,l->", r1, eta, eta.conj()))
    return val.real / (n * norm_sq)


def l2_bisectional_paper(tensor: CurvatureTensor) -> float:
    """Squared-average closed form built on avg r(v, conj v)^2 = |r|^2 / n.

    (|R|^2 + (n+2) |r|^2) / (4 binom(n+1, 2)^2).
    """
    require_kahler(tensor)
    n = tensor.n
    norms = tensor_norms(tensor)
    return (norms.norm_R_sq + (n + 2) * norms.norm_r1_sq) / (4.0 * math.comb(n + 1, 2) ** 2)


def l2_bisectional_derived(tensor: CurvatureTensor) -> float:
    """Squared-average closed form built on avg r(v, conj v)^2 = (s^2 + |r|^2) / (n (n+1)).

    (|R|^2 + 2 |r|^2 + s^2) / (n^2 (n+1)^2).
    """
    require_kahler(tensor)
    n = tensor.n
    norms = tensor_norms(tensor)
    return (norms.norm_R_sq + 2.0 * norms.norm_r1_sq + norms.s1**2) / float(n * n * (n + 1) * (n + 1))


@dataclass(frozen=True)
class BisectionalAdjudication:
    """Both closed-form variants next to the exact oracle, with the verdict."""

    paper: float
    derived: float
    oracle: float
    match: str  # "paper" | "derived" | "both" | "neither"


def adjudicate_bisectional(tensor: CurvatureTensor, rel_tol: float = 1e-10) -> BisectionalAdjudication:
    """Measure both squared-average variants against the exact oracle.

    The verdict is whichever variant agrees within rel_tol (near-zero values
    compare absolutely); nothing is assumed about which one should win.
    """
    paper = l2_bisectional_paper(tensor)
    derived = l2_bisectional_derived(tensor)
    oracle = exact_expectation_B2(tensor)
    paper_ok = compare("", paper, oracle, rel_tol).passed
    derived_ok = compare("", derived, oracle, rel_tol).passed
    match = {
        (True, True): "both",
        (True, False): "paper",
        (False, True): "derived",
        (False, False): "neither",
    }[(paper_ok, derived_ok)]
    return BisectionalAdjudication(paper=paper, derived=derived, oracle=oracle, match=match)
