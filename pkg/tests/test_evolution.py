import math

import numpy as np
import pytest

from sqcomb import (
    CombParams,
    GridCoverageError,
    NoiseChannel,
    auto_grid,
    density_kernel,
    density_kernel_damping,
    density_kernel_diffusion,
    evolved_widths,
    evolved_wigner_damping,
    evolved_wigner_diffusion,
    evolved_wigner_field,
    incoherent_kernel,
    position_marginal,
    tooth_positions,
    wigner_at,
    wigner_field,
    wigner_overlap,
)
from sqcomb.evolution import DensityKernel, pure_kernel_matrix
from sqcomb.phasespace import PositionGrid, auto_position_grid


@pytest.fixture(scope="module")
def probe_points():
    q = np.linspace(-18.0, 18.0, 13)
    p = np.linspace(-7.0, 7.0, 9)
    return np.meshgrid(q, p)


class TestEvolvedWidths:
    def test_initial_and_late_values(self):
        w0 = evolved_widths(0.4, 0.0)
        assert w0.sigma_q2 == pytest.approx(math.exp(-0.8), rel=1e-15)
        assert w0.sigma_p2 == pytest.approx(math.exp(0.8), rel=1e-15)
        w_inf = evolved_widths(0.4, 50.0)
        assert w_inf.sigma_q2 == pytest.approx(1.0, abs=1e-12)
        assert w_inf.sigma_p2 == pytest.approx(1.0, abs=1e-12)

    def test_positive_for_any_time(self):
        for r in (-1.0, 0.0, 1.2):
            for t in (0.0, 0.3, 2.0, 20.0):
                w = evolved_widths(r, t)
                assert w.sigma_q2 > 0 and w.sigma_p2 > 0


class TestEvolvedWigner:
    def test_reduces_to_static_at_zero_time(self, comb_844, probe_points):
        qq, pp = probe_points
        static = wigner_at(comb_844, 0, qq, pp)
        np.testing.assert_allclose(
            evolved_wigner_damping(comb_844, 0, qq, pp, 0.0), static, rtol=0, atol=1e-12
        )
        np.testing.assert_allclose(
            evolved_wigner_diffusion(comb_844, 0, qq, pp, 0.0), static, rtol=0, atol=1e-12
        )
        static1 = wigner_at(comb_844, 1, qq, pp)
        np.testing.assert_allclose(
            evolved_wigner_damping(comb_844, 1, qq, pp, 0.0), static1, rtol=0, atol=1e-12
        )
        np.testing.assert_allclose(
            evolved_wigner_diffusion(comb_844, 1, qq, pp, 0.0), static1, rtol=0, atol=1e-12
        )

    def test_vacuum_is_damping_fixed_point(self):
        p = CombParams(1, 4.0, 0.0)
        q = np.linspace(-4, 4, 17)
        for t in (0.1, 1.0, 6.0):
            np.testing.assert_allclose(
                evolved_wigner_damping(p, 0, q, 0.3, t),
                wigner_at(p, 0, q, 0.3),
                rtol=0, atol=1e-14,
            )

    def test_damping_drives_comb_to_vacuum(self, comb_844):
        from sqcomb import fidelity_rate_exact

        # late-time deficit follows the linearized decay law
        # 1 - <vac|rho(t)|vac> ~ e^{-gamma t} (Var q + Var p - 1)/2
        rate = fidelity_rate_exact(comb_844, "damping")
        for t in (10.0, 11.0):
            grid = auto_grid(comb_844, t)
            vac = wigner_field(CombParams(1, 1.0, 0.0), 0, grid)
            late = evolved_wigner_field(comb_844, 0, grid, NoiseChannel("damping", t))
            deficit = 1.0 - wigner_overlap(late, vac)
            assert deficit == pytest.approx(math.exp(-t) * rate, rel=0.2)
        assert deficit < 1e-3

    def test_trace_preserved_under_both_channels(self, comb_844):
        for kind in ("damping", "diffusion"):
            for t in (0.05, 0.2, 1.0):
                grid = auto_grid(comb_844, t)
                field = evolved_wigner_field(comb_844, 0, grid, NoiseChannel(kind, t))
                assert field.normalization() == pytest.approx(1.0, abs=1e-8), (kind, t)

    def test_diffusion_keeps_tooth_centers(self, comb_844):
        grid = auto_grid(comb_844, 0.2)
        field = evolved_wigner_field(comb_844, 0, grid, NoiseChannel("diffusion", 0.2))
        wq = np.full(grid.n_p, grid.h_p)
        wq[0] = wq[-1] = 0.5 * grid.h_p
        marg = field.values @ wq
        for tooth in tooth_positions(comb_844):
            sel = np.abs(grid.q_axis - tooth) <= 1.0
            peak = grid.q_axis[sel][np.argmax(marg[sel])]
            assert abs(peak - tooth) <= grid.h_q

    def test_damping_contracts_tooth_centers(self, comb_844):
        t = 0.3
        grid = auto_grid(comb_844, t)
        field = evolved_wigner_field(comb_844, 0, grid, NoiseChannel("damping", t))
        wq = np.full(grid.n_p, grid.h_p)
        wq[0] = wq[-1] = 0.5 * grid.h_p
        marg = field.values @ wq
        shrink = math.exp(-t / 2)
        for tooth in tooth_positions(comb_844):
            sel = np.abs(grid.q_axis - shrink * tooth) <= 1.0
            peak = grid.q_axis[sel][np.argmax(marg[sel])]
            assert abs(peak - shrink * tooth) <= grid.h_q

    def test_field_sampler_matches_pointwise(self, comb_844):
        grid = auto_grid(comb_844, 0.2)
        for kind, fn in (
            ("damping", evolved_wigner_damping),
            ("diffusion", evolved_wigner_diffusion),
        ):
            field = evolved_wigner_field(comb_844, 1, grid, NoiseChannel(kind, 0.2))
            iq, ip = 101, 57
            assert field.values[iq, ip] == pytest.approx(
                fn(comb_844, 1, grid.q_axis[iq], grid.p_axis[ip], 0.2), rel=1e-12, abs=1e-300
            )

    def test_rejects_negative_time(self, comb_844):
        with pytest.raises(ValueError):
            evolved_wigner_damping(comb_844, 0, 0.0, 0.0, -0.1)
        with pytest.raises(ValueError):
            NoiseChannel("damping", -1.0)
        with pytest.raises(ValueError):
            NoiseChannel("thermal", 0.1)


class TestDensityKernels:
    def test_pure_projector_at_zero_time(self, comb_844):
        grid = auto_position_grid(comb_844)
        for build in (density_kernel_damping, density_kernel_diffusion):
            for basis in (0, 1):
                kernel = build(comb_844, basis, 0.0, grid)
                np.testing.assert_allclose(
                    kernel.matrix, pure_kernel_matrix(comb_844, basis, grid), rtol=0, atol=1e-10
                )

    def test_trace_one(self, comb_844):
        grid = auto_position_grid(comb_844, 0.2)
        for build in (density_kernel_damping, density_kernel_diffusion):
            kernel = build(comb_844, 0, 0.2, grid)
            assert kernel.trace() == pytest.approx(1.0, abs=1e-8)

    def test_positive_semidefinite(self, comb_844):
        grid = auto_position_grid(comb_844, 0.2)
        kernel = density_kernel_damping(comb_844, 0, 0.2, grid)
        assert kernel.eigenvalues().min() >= -1e-8

    def test_purity_matches_wigner_square_integral(self, comb_844):
        t = 0.2
        kgrid = auto_position_grid(comb_844, t)
        grid = auto_grid(comb_844, t)
        for kind, build in (
            ("damping", density_kernel_damping),
            ("diffusion", density_kernel_diffusion),
        ):
            kernel = build(comb_844, 0, t, kgrid)
            field = evolved_wigner_field(comb_844, 0, grid, NoiseChannel(kind, t))
            assert kernel.purity() == pytest.approx(wigner_overlap(field, field), abs=1e-6)

    def test_purity_non_increasing(self, comb_844):
        grid = auto_position_grid(comb_844, 1.0)
        for kind in ("damping", "diffusion"):
            purities = [
                density_kernel(comb_844, 0, NoiseChannel(kind, t), grid).purity()
                for t in (0.0, 0.1, 0.3, 1.0)
            ]
            assert all(a >= b - 1e-9 for a, b in zip(purities, purities[1:]))

    def test_fourier_consistency_diffusion(self, comb_844):
        # the kernel equals the p-integral of the evolved Wigner function
        # against e^{ipq} at (Q, q) pairs
        t = 0.2
        kgrid = auto_position_grid(comb_844, t)
        kernel = density_kernel_diffusion(comb_844, 0, t, kgrid)
        p = np.linspace(-12.0, 12.0, 4001)
        x = kgrid.x_axis
        for i, j in [(140, 140), (150, 130), (200, 170)]:
            big_q = 0.5 * (x[i] + x[j])
            rel_q = x[i] - x[j]
            w_slice = evolved_wigner_diffusion(comb_844, 0, big_q, p, t)
            val = np.trapezoid(w_slice * np.exp(1j * p * rel_q), p)
            assert kernel.matrix[i, j] == pytest.approx(val.real, abs=1e-6)
            assert abs(val.imag) < 1e-9

    def test_fourier_consistency_damping(self, comb_844):
        t = 0.15
        kgrid = auto_position_grid(comb_844, t)
        kernel = density_kernel_damping(comb_844, 0, t, kgrid)
        p = np.linspace(-12.0, 12.0, 4001)
        x = kgrid.x_axis
        for i, j in [(150, 150), (180, 160)]:
            w_slice = evolved_wigner_damping(comb_844, 0, 0.5 * (x[i] + x[j]), p, t)
            val = np.trapezoid(w_slice * np.exp(1j * p * (x[i] - x[j])), p)
            assert kernel.matrix[i, j] == pytest.approx(val.real, abs=1e-6)

    def test_grid_coverage_error(self, comb_844):
        small = PositionGrid(-5.0, 5.0, 64)
        with pytest.raises(GridCoverageError):
            density_kernel_damping(comb_844, 0, 0.1, small)

    def test_binary_and_eigenvalue_dump(self, comb_844, tmp_path):
        grid = auto_position_grid(comb_844, 0.05)
        kernel = density_kernel_damping(comb_844, 0, 0.05, grid)
        kernel.to_binary(tmp_path / "k.bin")
        kernel.eigenvalues_to_csv(tmp_path / "eig.csv")
        from sqcomb import gridfile

        rec = gridfile.read_grid(tmp_path / "k.bin")
        assert rec.kind == gridfile.KIND_KERNEL
        assert rec.channel == "damping"
        np.testing.assert_array_equal(rec.values, kernel.matrix)
        rows = np.loadtxt(tmp_path / "eig.csv", delimiter=",", skiprows=1)
        assert rows.shape[1] == 2
        assert rows[0, 1] == pytest.approx(kernel.eigenvalues()[0])


class TestIncoherentKernel:
    def test_single_tooth_equals_coherent(self):
        p = CombParams(1, 4.0, 0.3)
        grid = auto_position_grid(p, 0.1)
        for kind in ("damping", "diffusion"):
            inc = incoherent_kernel(p, 0, 0.1, kind, grid)
            coh = density_kernel(p, 0, NoiseChannel(kind, 0.1), grid)
            np.testing.assert_allclose(inc.matrix, coh.matrix, rtol=0, atol=1e-12)
            assert not inc.coherent

    def test_trace_one(self, comb_844):
        grid = auto_position_grid(comb_844, 0.2)
        for kind in ("damping", "diffusion"):
            inc = incoherent_kernel(comb_844, 0, 0.2, kind, grid)
            assert inc.trace() == pytest.approx(1.0, abs=1e-8)

    def test_mixture_of_evolved_teeth(self, comb_844):
        # under diffusion the tooth centers stay put, so the diagonal
        # restriction equals the average of single-tooth kernels shifted to
        # the tooth positions
        grid = PositionGrid(-44.0, 44.0, 561)
        inc = incoherent_kernel(comb_844, 0, 0.1, "diffusion", grid)
        teeth = tooth_positions(comb_844)
        acc = np.zeros((grid.n_x, grid.n_x))
        single = CombParams(1, comb_844.spacing, comb_844.squeeze)
        for tooth in teeth:
            x = grid.x_axis - tooth
            shifted = PositionGrid(x[0], x[-1], x.size)
            acc += density_kernel_diffusion(single, 0, 0.1, shifted).matrix
        np.testing.assert_allclose(inc.matrix, acc / teeth.size, rtol=0, atol=1e-12)
