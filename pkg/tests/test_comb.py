import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqcomb import (
    CombParams,
    ParameterError,
    basis_overlap,
    basis_overlap_approx,
    comb_scalars,
    initial_error,
    initial_error_approx,
    normalization,
    normalization_approx,
    quadrature_variances,
    quadrature_variances_approx,
    tooth_positions,
    wavefunction,
)

params_st = st.builds(
    CombParams,
    teeth=st.integers(1, 16),
    spacing=st.floats(0.5, 10.0),
    squeeze=st.floats(-1.0, 1.5),
)


class TestToothPositions:
    def test_three_teeth(self):
        assert tooth_positions(CombParams(3, 2.0, 0.7)).tolist() == [-2.0, 0.0, 2.0]

    def test_single_tooth_centered(self):
        assert tooth_positions(CombParams(1, 4.0, -0.3)).tolist() == [0.0]

    def test_eight_teeth(self):
        got = tooth_positions(CombParams(8, 4.0, 0.4))
        assert got.tolist() == [-14.0, -10.0, -6.0, -2.0, 2.0, 6.0, 10.0, 14.0]
        assert np.all(np.diff(got) == 4.0)

    def test_rejects_bad_params(self):
        with pytest.raises(ParameterError):
            CombParams(0, 4.0, 0.4)
        with pytest.raises(ParameterError):
            CombParams(3, -1.0, 0.4)
        with pytest.raises(ParameterError):
            CombParams(3, 0.0, 0.4)
        with pytest.raises(ParameterError):
            CombParams(3, 1.0, math.nan)

    @given(params_st)
    def test_centered_and_symmetric(self, params):
        pos = tooth_positions(params)
        assert abs(pos.sum()) < 1e-12
        assert set(np.round(-pos, 12)) == set(np.round(pos, 12))
        assert np.allclose(np.diff(pos), params.spacing, rtol=1e-12, atol=0)


class TestNormalization:
    def test_single_tooth(self):
        assert normalization(CombParams(1, 2.0, 0.9)) == 1.0

    def test_two_teeth_closed_form(self):
        # independent evaluation of the two-term pair sum
        expected = 2.0 + 2.0 * math.exp(-math.exp(0.8) * 4.0)
        assert normalization(CombParams(2, 4.0, 0.4)) == pytest.approx(expected, abs=1e-14)

    def test_eight_teeth_near_leading_order(self):
        p = CombParams(8, 4.0, 0.4)
        expected = 8.0 + 14.0 * math.exp(-math.exp(0.8) * 4.0)
        assert normalization(p) == pytest.approx(expected, abs=1e-3)
        assert normalization_approx(p) == pytest.approx(expected, abs=1e-14)

    @given(params_st)
    @settings(max_examples=60)
    def test_bounds(self, params):
        n_exact = normalization(params)
        assert n_exact >= params.teeth - 1e-12
        if math.exp(params.squeeze) * params.spacing >= 1.5:
            assert n_exact <= 3.0 * params.teeth

    def test_approx_agreement_when_teeth_separated(self):
        for n, d, r in [(2, 4.0, 0.0), (8, 4.0, 0.4), (12, 5.0, 0.2), (5, 8.0, -0.4)]:
            if math.exp(r) * d < 4.0:
                continue
            p = CombParams(n, d, r)
            rel = abs(normalization(p) - normalization_approx(p)) / normalization(p)
            assert rel <= 10.0 * math.exp(-math.exp(2 * r) * d * d)


class TestBasisOverlap:
    def test_single_tooth_exact(self):
        for d, r in [(4.0, 0.3), (2.5, -0.2), (6.0, 0.0)]:
            expected = math.exp(-math.exp(2 * r) * d * d / 16.0)
            assert basis_overlap(CombParams(1, d, r)) == pytest.approx(expected, rel=1e-14)

    def test_benchmark_overlap(self, comb_844):
        assert basis_overlap(comb_844) == pytest.approx(0.202, abs=5e-4)
        assert initial_error(comb_844) == pytest.approx(0.010, abs=5e-4)

    def test_decreasing_in_spacing_and_squeeze(self):
        combs = [CombParams(6, d, 0.3) for d in (3.0, 4.0, 5.0, 6.0)]
        vals = [basis_overlap(p) for p in combs]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        combs = [CombParams(6, 4.0, r) for r in (0.0, 0.25, 0.5, 0.75)]
        vals = [basis_overlap(p) for p in combs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @given(params_st)
    @settings(max_examples=60)
    def test_strictly_inside_unit_interval(self, params):
        c = basis_overlap(params)
        assert 0.0 < c < 1.0

    def test_leading_order_within_five_percent(self):
        for n, d, r in [(8, 6.0, 0.0), (4, 4.0, 0.5), (12, 7.0, 0.1)]:
            assert math.exp(r) * d >= 6.0
            p = CombParams(n, d, r)
            assert basis_overlap(p) == pytest.approx(basis_overlap_approx(p), rel=0.05)


class TestQuadratureVariances:
    def test_vacuum(self):
        assert quadrature_variances(CombParams(1, 3.0, 0.0)) == pytest.approx((0.5, 0.5))

    def test_squeezed_vacuum(self):
        var_q, var_p = quadrature_variances(CombParams(1, 3.0, 0.4))
        assert var_q == pytest.approx(math.exp(-0.8) / 2, rel=1e-12)
        assert var_p == pytest.approx(math.exp(0.8) / 2, rel=1e-12)

    def test_eight_teeth_leading_order(self):
        var_q, _ = quadrature_variances(CombParams(8, 4.0, 0.5))
        assert var_q == pytest.approx(math.exp(-1.0) / 2 + 84.0, rel=1e-3)

    def test_approx_fields(self):
        var_q, var_p = quadrature_variances_approx(CombParams(8, 4.0, 0.5))
        assert var_q == pytest.approx(math.exp(-1.0) / 2 + 84.0, rel=1e-14)
        assert var_p == pytest.approx(math.exp(1.0) / 2, rel=1e-14)

    @given(params_st)
    @settings(max_examples=60)
    def test_squeezing_bounds(self, params):
        var_q, var_p = quadrature_variances(params)
        slack = 1e-6 * max(1.0, var_q)
        assert var_q >= math.exp(-2 * params.squeeze) / 2 - slack
        assert var_p <= math.exp(2 * params.squeeze) / 2 + 1e-6 * var_p


class TestInitialError:
    def test_benchmark_errors(self, bench_params):
        for p, expected in zip(bench_params, (0.004, 0.003, 0.006)):
            assert initial_error(p) == pytest.approx(expected, abs=5e-4)

    def test_orthogonal_limit(self):
        assert initial_error(CombParams(2, 40.0, 0.5)) == pytest.approx(0.0, abs=1e-15)

    def test_small_error_quadratic_in_overlap(self):
        for p in [CombParams(8, d, r) for d, r in [(4.0, 0.5), (5.0, 0.3), (7.0, -0.1)]]:
            eps = initial_error(p)
            assert eps <= 0.01
            assert eps == pytest.approx(basis_overlap(p) ** 2 / 4.0, rel=0.10)

    def test_approx_formula(self, comb_844):
        assert initial_error_approx(comb_844) == pytest.approx(initial_error(comb_844), rel=0.05)


def test_scalar_bundle(comb_844):
    s = comb_scalars(comb_844)
    assert s.normalization == normalization(comb_844)
    assert s.overlap01 == basis_overlap(comb_844)
    assert s.eps0 == initial_error(comb_844)
    assert (s.var_q, s.var_p) == quadrature_variances(comb_844)


class TestWavefunction:
    def test_normalized(self, comb_844):
        x = np.linspace(-30, 30, 20001)
        for basis in (0, 1):
            psi = wavefunction(comb_844, basis, x)
            assert np.trapezoid(psi**2, x) == pytest.approx(1.0, abs=1e-10)

    def test_basis_one_is_shifted_basis_zero(self, comb_844):
        x = np.linspace(-5, 5, 41)
        np.testing.assert_allclose(
            wavefunction(comb_844, 1, x),
            wavefunction(comb_844, 0, x - 2.0),
            rtol=0, atol=1e-15,
        )

    def test_overlap_matches_closed_form(self, comb_844):
        x = np.linspace(-32, 32, 40001)
        num = np.trapezoid(
            wavefunction(comb_844, 0, x) * wavefunction(comb_844, 1, x), x
        )
        assert num == pytest.approx(basis_overlap(comb_844), abs=1e-10)
