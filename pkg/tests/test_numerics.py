import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqcomb import (
    CombParams,
    ConvergenceError,
    auto_grid,
    basis_overlap,
    convergence_double,
    distinguishability,
    integrate_1d,
    position_marginal,
    symmetric_eigenvalues,
    wigner_field,
)
from sqcomb.numerics import AsymmetricMatrixError, QuadratureError
from sqcomb.phasespace import auto_position_grid


class TestIntegrate1d:
    def test_constant(self):
        assert integrate_1d(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_truncated_gaussian(self):
        got = integrate_1d(lambda x: np.exp(-x * x), -9.0, 9.0, tol=1e-12)
        assert got == pytest.approx(np.sqrt(np.pi), abs=1e-10)

    def test_comb_marginal_normalization(self, comb_844):
        got = integrate_1d(
            lambda x: position_marginal(comb_844, 0, x), -26.0, 26.0,
            tol=1e-10, min_intervals=128,
        )
        assert got == pytest.approx(1.0, abs=1e-8)

    @given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
    def test_exact_on_cubics(self, coeffs):
        a, b = -1.5, 2.0

        def poly(x):
            return coeffs[0] + coeffs[1] * x + coeffs[2] * x**2 + coeffs[3] * x**3

        exact = sum(c * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, c in enumerate(coeffs))
        assert integrate_1d(poly, a, b) == pytest.approx(exact, abs=1e-12)

    def test_depth_cap_raises(self):
        with pytest.raises(QuadratureError):
            integrate_1d(lambda x: np.sin(50.0 * x) ** 2, 0.0, 10.0,
                         tol=1e-14, max_depth=1, min_intervals=1)

    def test_empty_interval(self):
        assert integrate_1d(lambda x: x, 2.0, 2.0) == 0.0


class TestSymmetricEigenvalues:
    def test_identity(self):
        assert symmetric_eigenvalues(np.eye(3)).tolist() == [1.0, 1.0, 1.0]

    def test_diagonal(self):
        assert symmetric_eigenvalues(np.diag([2.0, -1.0])).tolist() == [2.0, -1.0]

    def test_rank_one_projector(self, rng):
        psi = rng.normal(size=7)
        psi /= np.linalg.norm(psi)
        vals = symmetric_eigenvalues(np.outer(psi, psi))
        assert vals[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(vals[1:]) < 1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(AsymmetricMatrixError):
            symmetric_eigenvalues(np.array([[0.0, 1.0], [0.5, 0.0]]))
        with pytest.raises(AsymmetricMatrixError):
            symmetric_eigenvalues(np.zeros((2, 3)))

    def test_trace_and_negation(self, rng):
        a = rng.normal(size=(40, 40))
        a = 0.5 * (a + a.T)
        vals = symmetric_eigenvalues(a)
        assert np.sum(vals) == pytest.approx(np.trace(a), abs=1e-9 * 40)
        np.testing.assert_allclose(symmetric_eigenvalues(-a), -vals[::-1], atol=1e-10)


class TestConvergenceDouble:
    def test_constant_converges_immediately(self):
        calls = []

        def compute(k):
            calls.append(k)
            return 42.0

        value, err = convergence_double(compute, rel_tol=1e-8)
        assert value == 42.0 and err == 0.0
        assert calls == [0, 1]

    def test_wigner_normalization(self, comb_844):
        base = auto_grid(comb_844)

        def compute(k):
            return wigner_field(comb_844, 0, base.refined(k)).normalization()

        value, err = convergence_double(compute, rel_tol=1e-9, max_doublings=3)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert err < 1e-9

    def test_trace_distance_benchmark(self, comb_844):
        base = auto_position_grid(comb_844)

        def compute(k):
            return distinguishability(comb_844, "damping", 0.0, grid=base, refine=k)

        value, err = convergence_double(compute, rel_tol=1e-7, max_doublings=3)
        assert err < 1e-6
        analytic = np.sqrt(1.0 - basis_overlap(comb_844) ** 2)
        assert value == pytest.approx(analytic, abs=1e-6)
        assert round(value, 4) == 0.9793

    def test_cap_carries_best_estimate(self):
        def compute(k):
            return 1.0 + 2.0 ** -k

        with pytest.raises(ConvergenceError) as info:
            convergence_double(compute, rel_tol=1e-12, max_doublings=4)
        assert info.value.best == pytest.approx(1.0 + 2.0 ** -4)
        assert info.value.estimate > 0
