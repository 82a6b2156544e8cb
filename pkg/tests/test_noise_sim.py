import math

import numpy as np
import pytest

from germlab.errors import BadStep, DimensionMismatch, UnknownKind, UnsupportedAlgebra
from germlab.ito_algebra import canonical_algebra, direct_sum, quadruple_algebra
from germlab.jsonio import dumps_canonical
from germlab.noise_sim import (
    ito_moment_check,
    kernel_gram,
    pd_kernel_check,
    sample_paths,
    semigroup_germ_check,
    stochastic_exponential_mc,
)


def eig3_oracle(m):
    """Characteristic-polynomial eigenvalues for a Hermitian 3x3 matrix."""
    m = np.asarray(m, complex)
    c2 = -np.trace(m)
    c1 = 0.5 * (np.trace(m) ** 2 - np.trace(m @ m))
    c0 = -np.linalg.det(m)
    return np.sort(np.roots([1.0, c2, c1, c0]).real)


class TestSamplePaths:
    def test_newton_increments_constant(self):
        for p in sample_paths("newton", 1.0, 0.01, 3, 7):
            np.testing.assert_array_equal(p.increments, 0.01)

    def test_increment_count(self):
        assert len(sample_paths("wiener", 1.0, 0.01, 0, 1)[0].increments) == 100
        assert len(sample_paths("wiener", 1.0, 0.3, 0, 1)[0].increments) == 4

    def test_poisson_counts_nonnegative_integers(self):
        for p in sample_paths("poisson", 1.0, 0.05, 9, 50):
            assert p.increments.dtype.kind == "i"
            assert p.increments.min() >= 0

    def test_deterministic_and_prefix_pure(self):
        a = sample_paths("wiener", 1.0, 0.01, 7, 10)
        b = sample_paths("wiener", 1.0, 0.01, 7, 5000)
        for i in range(10):
            np.testing.assert_array_equal(a[i].increments, b[i].increments)

    def test_seed_changes_paths(self):
        a = sample_paths("wiener", 1.0, 0.01, 1, 1)[0]
        b = sample_paths("wiener", 1.0, 0.01, 2, 1)[0]
        assert not np.array_equal(a.increments, b.increments)

    def test_wiener_quadratic_variation(self):
        # chi-square concentration: sum of squared increments over [0, 1]
        paths = sample_paths("wiener", 1.0, 0.01, 11, 20000)
        qv = np.array([p.increments @ p.increments for p in paths])
        se = math.sqrt(2.0 * 0.01 / len(paths))  # Var(qv) = 2 dt T
        assert abs(qv.mean() - 1.0) <= 4.0 * se

    def test_poisson_total_count_mean(self):
        paths = sample_paths("poisson", 1.0, 0.01, 13, 20000)
        total = np.array([p.increments.sum() for p in paths])
        se = math.sqrt(1.0 / len(paths))
        assert abs(total.mean() - 1.0) <= 4.0 * se

    def test_bad_parameters(self):
        with pytest.raises(BadStep):
            sample_paths("wiener", 1.0, 0.0, 0, 1)
        with pytest.raises(BadStep):
            sample_paths("wiener", 1.0, 2.0, 0, 1)
        with pytest.raises(UnknownKind):
            sample_paths("brown", 1.0, 0.1, 0, 1)


class TestMomentChecks:
    def test_wiener(self):
        rep = ito_moment_check(sample_paths("wiener", 1.0, 0.01, 17, 20000))
        assert rep.ok

    def test_poisson_factorial_moment_bound(self):
        rep = ito_moment_check(sample_paths("poisson", 0.2, 1e-3, 19, 5000))
        assert rep.ok
        rows = {r["name"]: r for r in rep.rows}
        assert rows["factorial_moment_second_order"]["ok"]

    def test_newton_exact(self):
        rep = ito_moment_check(sample_paths("newton", 1.0, 0.1, 0, 3))
        assert rep.ok
        for row in rep.rows:
            assert row["sigmas"] == 0.0

    def test_mixed_batch_rejected(self):
        batch = sample_paths("wiener", 1.0, 0.1, 0, 2) + sample_paths("poisson", 1.0, 0.1, 0, 2)
        with pytest.raises(DimensionMismatch):
            ito_moment_check(batch)


class TestStochasticExponential:
    def test_poisson_euler_number(self):
        alg = canonical_algebra("poisson")
        rep = stochastic_exponential_mc(alg, [1.0], 1.0, 1e-3, 42, 20000)
        assert abs(rep.closed_form - math.e) < 1e-12
        assert rep.sigmas <= 4.0
        assert rep.exact_mean is not None and rep.exact_sigmas <= 4.0

    def test_wiener_martingale_mean_one(self):
        alg = canonical_algebra("wiener")
        rep = stochastic_exponential_mc(alg, [0.0, 1.0], 1.0, 1e-3, 42, 20000)
        assert rep.closed_form == pytest.approx(1.0)
        assert rep.sigmas <= 4.0

    def test_newton_deterministic_product(self):
        alg = canonical_algebra("newton")
        step = 1e-3
        rep = stochastic_exponential_mc(alg, [1.0], 1.0, step, 0, 4)
        assert rep.stderr == 0.0
        expected = (1.0 + step) ** 1000
        assert rep.mc_mean.real == pytest.approx(expected, rel=1e-12)
        assert rep.abs_error <= math.e * step

    def test_direct_sum_factorizes(self):
        alg = direct_sum(canonical_algebra("wiener"), canonical_algebra("poisson"))
        a = [0.25, 0.5, 0.5]
        rep = stochastic_exponential_mc(alg, a, 1.0, 1e-3, 7, 20000)
        target = math.exp(0.25) * math.exp(0.5)
        assert rep.closed_form.real == pytest.approx(target, rel=1e-12)
        assert rep.sigmas <= 4.0

    def test_scale_enters_rate(self):
        alg = canonical_algebra("poisson", scale=2.0)
        rep = stochastic_exponential_mc(alg, [1.0], 1.0, 1e-3, 21, 20000)
        assert rep.closed_form.real == pytest.approx(math.exp(2.0), rel=1e-12)
        assert rep.sigmas <= 4.0

    def test_unsupported_algebra(self):
        with pytest.raises(UnsupportedAlgebra):
            stochastic_exponential_mc(quadruple_algebra(1), [1, 0, 0, 0], 1.0, 0.1, 0, 4)


class TestKernelChecks:
    def test_single_zero_element(self):
        alg = canonical_algebra("poisson")
        sample = kernel_gram(alg, [[0.0]], 1.0)
        np.testing.assert_allclose(sample.gram, [[1.0]], atol=1e-15)

    def test_poisson_triple_analytic_values(self):
        alg = canonical_algebra("poisson")
        sample = kernel_gram(alg, [[0.0], [1.0], [-1.0]], 1.0)
        e = math.e
        expected = np.array(
            [[1.0, e, 1.0 / e], [e, e**3, 1.0 / e], [1.0 / e, 1.0 / e, 1.0 / e]]
        )
        np.testing.assert_allclose(sample.gram.real, expected, atol=1e-12)
        np.testing.assert_allclose(sample.gram.imag, 0, atol=1e-12)
        # PSD by the independent characteristic-polynomial oracle
        assert eig3_oracle(sample.gram)[0] >= -1e-10

    def test_poisson_kernel_full_check(self):
        alg = canonical_algebra("poisson")
        rep = pd_kernel_check(alg, [[0.0], [1.0], [-1.0]], 1.0, seed=5, batch=20000)
        assert rep.ok
        assert rep.psd.ok
        assert rep.max_sigmas <= 4.0
        assert rep.germ_bridge["ok"]
        assert rep.germ_bridge["derivative_defect"] <= 1e-8

    def test_wiener_kernel_small_time(self):
        alg = canonical_algebra("wiener")
        rng = np.random.default_rng(23)
        els = [rng.uniform(-1.0, 1.0, size=2) for _ in range(3)]
        rep = pd_kernel_check(alg, els, 0.1, seed=6, batch=20000, step=1e-3)
        assert rep.ok

    def test_kernel_gram_hermitian_for_complex_elements(self):
        alg = canonical_algebra("wiener")
        rng = np.random.default_rng(29)
        els = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(4)]
        g = kernel_gram(alg, els, 0.5).gram
        np.testing.assert_allclose(g, g.conj().T, atol=1e-12)

    def test_semigroup_germ_bridge_wiener(self):
        alg = canonical_algebra("wiener")
        out = semigroup_germ_check(alg, [[0.0, 0.3], [0.2, -0.4], [0.0, 0.0]])
        assert out["ok"]
        assert out["derivative_defect"] <= 1e-8

    def test_unsupported_algebra(self):
        with pytest.raises(UnsupportedAlgebra):
            pd_kernel_check(quadruple_algebra(1), [[0, 0, 0, 0]], 1.0)


class TestDeterminism:
    def test_reports_are_byte_identical(self):
        alg = canonical_algebra("poisson")
        a = pd_kernel_check(alg, [[0.0], [1.0]], 0.5, seed=3, batch=4096)
        b = pd_kernel_check(alg, [[0.0], [1.0]], 0.5, seed=3, batch=4096)
        assert dumps_canonical(a.to_dict()) == dumps_canonical(b.to_dict())

    def test_exponential_deterministic(self):
        alg = canonical_algebra("wiener")
        a = stochastic_exponential_mc(alg, [0.1, 0.7], 1.0, 1e-2, 11, 8192)
        b = stochastic_exponential_mc(alg, [0.1, 0.7], 1.0, 1e-2, 11, 8192)
        assert a.mc_mean == b.mc_mean and a.stderr == b.stderr
