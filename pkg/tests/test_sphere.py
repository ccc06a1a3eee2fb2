import math

import numpy as np
import pytest

from curvlab.curvature import (
    constant_hsc,
    hsc_batch,
    random_hermitian_curvature,
    random_kahler_curvature,
    ricci_set,
)
from curvlab.sphere import (
    McEstimate,
    exact_expectation_B2,
    exact_expectation_B_mean,
    exact_expectation_H,
    exact_expectation_H2,
    exact_moment,
    exact_projection_residual,
    mc_expectation,
    mc_projection_residual,
    moment_matrix,
    sample_unit_sphere,
    sample_unit_sphere_batch,
    sphere_sampler,
)
from curvlab.symgroup import projector_sym


def compositions(total, parts):
    """All weak compositions of `total` into `parts` nonnegative integers."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


class TestSampling:
    def test_unit_norm(self):
        rng = sphere_sampler(4, 0)
        for _ in range(10):
            v = sample_unit_sphere(4, rng)
            assert abs(np.linalg.norm(v) - 1.0) <= 1e-14

    def test_scalar_dimension_gives_unit_modulus(self):
        rng = sphere_sampler(1, 1)
        v = sample_unit_sphere(1, rng)
        assert v.shape == (1,)
        assert abs(abs(v[0]) - 1.0) <= 1e-14

    def test_reproducible_stream(self):
        a = sample_unit_sphere_batch(3, 5, sphere_sampler(3, 99))
        b = sample_unit_sphere_batch(3, 5, sphere_sampler(3, 99))
        assert np.array_equal(a, b)


class TestExactMoment:
    def test_fourth_moment(self):
        assert exact_moment(2, (2, 0), (2, 0)) == pytest.approx(1.0 / 3.0)

    def test_mixed_moment(self):
        assert exact_moment(2, (1, 1), (1, 1)) == pytest.approx(1.0 / 6.0)

    def test_phase_mismatch_vanishes(self):
        assert exact_moment(2, (1, 0), (0, 1)) == 0.0

    def test_rejects_negative_multiplicity(self):
        with pytest.raises(ValueError, match="nonnegative"):
            exact_moment(2, (-1, 1), (-1, 1))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="length"):
            exact_moment(3, (1, 0), (1, 0))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_multinomial_family_sums_to_one(self, n, d):
        total = 0.0
        for alpha in compositions(d, n):
            weight = math.factorial(d)
            for a in alpha:
                weight //= math.factorial(a)
            total += weight * exact_moment(n, alpha, alpha)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_moments_match_monte_carlo(self):
        # 5-sigma agreement between the closed moment and a direct average.
        rng = sphere_sampler(2, 7)
        v = sample_unit_sphere_batch(2, 200_000, rng)
        samples = (np.abs(v[:, 0]) ** 4).real
        se = samples.std(ddof=1) / math.sqrt(len(samples))
        assert abs(samples.mean() - exact_moment(2, (2, 0), (2, 0))) <= 5 * se


class TestMomentMatrix:
    @pytest.mark.parametrize("n,d", [(1, 1), (2, 2), (3, 2), (2, 4)])
    def test_trace_is_one(self, n, d):
        assert np.trace(moment_matrix(n, d)) == pytest.approx(1.0, abs=1e-12)

    def test_entries_come_from_exact_moment(self):
        m = moment_matrix(2, 2)
        # row (0,0), col (0,0): E|v0|^4; row (0,1), col (1,0): E|v0|^2 |v1|^2
        assert m[0, 0] == pytest.approx(exact_moment(2, (2, 0), (2, 0)))
        assert m[1, 2] == pytest.approx(exact_moment(2, (1, 1), (1, 1)))
        assert m[0, 3] == 0.0


class TestExactExpectations:
    def test_diagonal_mean(self, diagonal_tensor):
        assert exact_expectation_H(diagonal_tensor) == pytest.approx(1.0)

    def test_diagonal_square(self, diagonal_tensor):
        assert exact_expectation_H2(diagonal_tensor) == pytest.approx(17.0 / 15.0)

    def test_diagonal_paired_square(self, diagonal_tensor):
        assert exact_expectation_B2(diagonal_tensor) == pytest.approx(2.0 / 3.0)

    def test_paired_mean_matches_contracted_trace(self):
        t = random_kahler_curvature(3, 11)
        r1 = ricci_set(t).r1
        rng = np.random.default_rng(3)
        for _ in range(5):
            eta = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            expected = float(np.einsum("kl,k,l->", r1, eta, eta.conj()).real)
            expected /= 3 * float(np.vdot(eta, eta).real)
            assert exact_expectation_B_mean(t, eta) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_mean_agrees_with_trace_route(self, n):
        # Two independent computations of the same average.
        t = random_hermitian_curvature(n, 21 + n)
        trace_route = float(np.einsum("ab,ba->", t.endomorphism(), projector_sym(n, 2)).real)
        trace_route /= math.comb(n + 1, 2)
        assert exact_expectation_H(t) == pytest.approx(trace_route, rel=1e-10)

    def test_zero_eta_rejected(self, diagonal_tensor):
        with pytest.raises(ValueError, match="nonzero"):
            exact_expectation_B_mean(diagonal_tensor, [0.0, 0.0])


class TestMonteCarlo:
    def test_constant_integrand(self):
        est = mc_expectation(lambda v: np.ones(len(v)), 3, 500, 0)
        assert est.mean == 1.0
        assert est.std_error == 0.0

    def test_constant_curvature_integrand(self):
        t = constant_hsc(3, 2.0)
        est = mc_expectation(lambda v: hsc_batch(t, v), 3, 2000, 1)
        assert est.mean == pytest.approx(2.0, abs=1e-12)
        assert est.std_error <= 1e-13

    def test_diagonal_mean_within_five_sigma(self, diagonal_tensor):
        est = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 100_000, 2)
        assert abs(est.mean - 1.0) <= 5 * est.std_error

    def test_deterministic_given_seed(self, diagonal_tensor):
        a = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 70_000, 5)
        b = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 70_000, 5)
        assert a == b

    def test_std_error_scales_like_inverse_sqrt(self, diagonal_tensor):
        small = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 2000, 9)
        large = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 20_000, 9)
        ratio = small.std_error / large.std_error
        assert math.sqrt(10) / 2 <= ratio <= 2 * math.sqrt(10)

    def test_unitary_invariance(self, diagonal_tensor):
        rng = np.random.default_rng(12)
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        q, r = np.linalg.qr(z)
        unitary = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        plain = mc_expectation(lambda v: hsc_batch(diagonal_tensor, v), 2, 50_000, 3)
        rotated = mc_expectation(
            lambda v: hsc_batch(diagonal_tensor, v @ unitary.T), 2, 50_000, 4
        )
        combined = math.hypot(plain.std_error, rotated.std_error)
        assert abs(plain.mean - rotated.mean) <= 5 * combined

    def test_too_few_samples(self):
        with pytest.raises(ValueError, match="2 samples"):
            mc_expectation(lambda v: np.ones(len(v)), 2, 1, 0)

    def test_mcestimate_validates(self):
        with pytest.raises(ValueError):
            McEstimate(mean=0.0, std_error=-1.0, samples=10, seed=0)


class TestProjectionResidual:
    def test_scalar_dimension_exact(self):
        for d in (1, 2, 3, 4):
            assert exact_projection_residual(1, d) <= 1e-15

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_exact_assembly_matches_symmetrizer(self, n, d):
        assert exact_projection_residual(n, d) <= 1e-12

    def test_mc_residual_shrinks_with_samples(self):
        small = mc_projection_residual(2, 2, 10_000, 1)
        large = mc_projection_residual(2, 2, 1_000_000, 1)
        assert 5.0 <= small / large <= 20.0

    def test_mc_residual_deterministic(self):
        assert mc_projection_residual(2, 2, 5000, 3) == mc_projection_residual(2, 2, 5000, 3)
