"""Analytic time evolution of comb states under damping and diffusion noise.

Both channels act on the Wigner function as Gaussian convolutions, so an
initial comb evolves into another closed-form double sum over tooth
pairs:

* amplitude damping (zero-temperature loss at rate gamma): tooth centers
  contract by e^{-gamma t/2}, quadrature widths relax toward the vacuum,
  and pair interference is suppressed by a separation-dependent
  decoherence factor;
* Gaussian diffusion (loss balanced by equal linear amplification):
  centers stay put while both widths grow linearly with gamma t.

The same closed forms Fourier-transform to position-representation
density kernels <x_i| rho(t) |x_j>, which feed the trace-distance
computation.  All formulas reduce exactly to the static state at
gamma t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .comb import CombParams, normalization, tooth_positions, wavefunction
from .phasespace import (
    DEFAULT_POLICY,
    GridPolicy,
    PhaseGrid,
    PositionGrid,
    WignerField,
    _q_axis_spec,
)
from . import gridfile

__all__ = [
    "CHANNEL_KINDS",
    "NoiseChannel",
    "EvolvedWidths",
    "GridCoverageError",
    "evolved_widths",
    "evolved_wigner_damping",
    "evolved_wigner_diffusion",
    "evolved_wigner_field",
    "DensityKernel",
    "density_kernel_damping",
    "density_kernel_diffusion",
    "density_kernel",
    "incoherent_kernel",
]

CHANNEL_KINDS = ("damping", "diffusion")


class GridCoverageError(ValueError):
    """Kernel grid does not contain the 6-sigma support of the state."""


@dataclass(frozen=True)
class NoiseChannel:
    """One of the two analytic channels with its rate-time product."""

    kind: str
    gamma_t: float

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"channel kind must be one of {CHANNEL_KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.gamma_t) and self.gamma_t >= 0.0):
            raise ValueError(f"gamma_t must be finite and >= 0, got {self.gamma_t!r}")


@dataclass(frozen=True)
class EvolvedWidths:
    """Squared Wigner widths of a damped tooth at rate-time gamma_t."""

    sigma_q2: float
    sigma_p2: float


def evolved_widths(squeeze: float, gamma_t: float) -> EvolvedWidths:
    """Damping-channel width parameters; both relax to 1 as gamma_t grows."""
    decay = math.exp(-gamma_t)
    return EvolvedWidths(
        sigma_q2=1.0 - decay + math.exp(-2.0 * squeeze - gamma_t),
        sigma_p2=1.0 - decay + math.exp(2.0 * squeeze - gamma_t),
    )


def _pair_arrays(params: CombParams):
    pos = tooth_positions(params)
    centers = (0.5 * (pos[:, None] + pos[None, :])).ravel()
    seps = (pos[:, None] - pos[None, :]).ravel()
    return centers, seps


def _check_basis(basis: int) -> None:
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")


def _damping_terms(params: CombParams, gamma_t: float):
    """Per-pair ingredients of the damped Wigner sum and kernel."""
    w = evolved_widths(params.squeeze, gamma_t)
    shrink = math.exp(-gamma_t / 2.0)
    cos_coef = math.exp(2.0 * params.squeeze - gamma_t / 2.0) / w.sigma_p2
    centers, seps = _pair_arrays(params)
    decoh = np.exp(
        -(1.0 - math.exp(-gamma_t)) * math.exp(2.0 * params.squeeze) * seps**2 / (4.0 * w.sigma_p2)
    )
    return w, shrink, cos_coef, centers, seps, decoh


def evolved_wigner_damping(params: CombParams, basis: int, q, p, gamma_t: float):
    """Wigner function of a basis comb after amplitude damping.

    Tooth-pair Gaussians sit at the contracted centers
    e^{-gamma t/2}(qn+qm)/2 with width sigma_q(t); fringes oscillate as
    cos[(qn-qm) p e^{2r-gamma t/2}/sigma_p^2(t)] and are damped by the
    pair decoherence factor.  Basis one is shifted by e^{-gamma t/2} d/2.
    """
    _check_basis(basis)
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    w, shrink, cos_coef, centers, seps, decoh = _damping_terms(params, gamma_t)
    q = np.asarray(q, dtype=float) - (shrink * params.spacing / 2.0 if basis == 1 else 0.0)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    env = np.exp(-p**2 / w.sigma_p2) / (
        normalization(params) * np.pi * math.sqrt(w.sigma_q2 * w.sigma_p2)
    )
    total = np.zeros_like(q)
    for c, s, a in zip(centers, seps, decoh):
        total += a * np.exp(-((q - shrink * c) ** 2) / w.sigma_q2) * np.cos(cos_coef * s * p)
    out = env * total
    return float(out) if out.ndim == 0 else out


def evolved_wigner_diffusion(params: CombParams, basis: int, q, p, gamma_t: float):
    """Wigner function of a basis comb after Gaussian diffusion.

    Centers stay at (qn+qm)/2; the q width grows as e^{-2r} + 2 gamma t,
    the fringe frequency drops by 1/(1 + 2 gamma t e^{-2r}), and pair
    coherence decays with gamma t e^{2r} (qn-qm)^2.  Basis one is shifted
    by the full d/2 at all times.
    """
    _check_basis(basis)
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    sq = math.exp(2.0 * params.squeeze)
    a_p = sq + 2.0 * gamma_t
    b_q = math.exp(-2.0 * params.squeeze) + 2.0 * gamma_t
    cos_coef = 1.0 / (1.0 + 2.0 * gamma_t / sq)
    centers, seps = _pair_arrays(params)
    decoh = np.exp(-gamma_t * sq * seps**2 / (2.0 * a_p))
    q = np.asarray(q, dtype=float) - (params.spacing / 2.0 if basis == 1 else 0.0)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    env = np.exp(-p**2 / a_p) / (normalization(params) * np.pi * math.sqrt(a_p * b_q))
    total = np.zeros_like(q)
    for c, s, a in zip(centers, seps, decoh):
        total += a * np.exp(-((q - c) ** 2) / b_q) * np.cos(cos_coef * s * p)
    out = env * total
    return float(out) if out.ndim == 0 else out


def evolved_wigner_field(params: CombParams, basis: int, grid: PhaseGrid, channel: NoiseChannel) -> WignerField:
    """Evolved Wigner function sampled on a grid (separable pair sum)."""
    _check_basis(basis)
    if channel.kind == "damping":
        w, shrink, cos_coef, centers, seps, decoh = _damping_terms(params, channel.gamma_t)
        inv_q2 = 1.0 / w.sigma_q2
        inv_p2 = 1.0 / w.sigma_p2
        amp = 1.0 / (normalization(params) * np.pi * math.sqrt(w.sigma_q2 * w.sigma_p2))
        q = grid.q_axis - (shrink * params.spacing / 2.0 if basis == 1 else 0.0)
        q_centers = shrink * centers
    else:
        sq = math.exp(2.0 * params.squeeze)
        a_p = sq + 2.0 * channel.gamma_t
        b_q = math.exp(-2.0 * params.squeeze) + 2.0 * channel.gamma_t
        cos_coef = 1.0 / (1.0 + 2.0 * channel.gamma_t / sq)
        centers, seps = _pair_arrays(params)
        decoh = np.exp(-channel.gamma_t * sq * seps**2 / (2.0 * a_p))
        inv_q2 = 1.0 / b_q
        inv_p2 = 1.0 / a_p
        amp = 1.0 / (normalization(params) * np.pi * math.sqrt(a_p * b_q))
        q = grid.q_axis - (params.spacing / 2.0 if basis == 1 else 0.0)
        q_centers = centers
    p = grid.p_axis
    qfac = np.exp(-inv_q2 * (q[None, :] - q_centers[:, None]) ** 2)
    pfac = decoh[:, None] * np.cos(cos_coef * seps[:, None] * p[None, :])
    values = amp * (qfac.T @ pfac) * np.exp(-inv_p2 * p[None, :] ** 2)
    return WignerField(grid=grid, values=values, basis_label=basis, time=channel.gamma_t, channel=channel.kind)


@dataclass(frozen=True)
class DensityKernel:
    """Discretized position-representation density matrix <x_i| rho |x_j>.

    The matrix is real and symmetric; h * matrix is the Nystrom
    discretization of the density operator, so h * trace(matrix) = 1 and
    the eigenvalues of h * matrix approximate the state's spectrum.
    """

    grid: PositionGrid
    matrix: np.ndarray
    basis_label: int
    time: float
    channel: str
    coherent: bool = True

    def __post_init__(self):
        if self.basis_label not in (0, 1):
            raise ValueError(f"basis_label must be 0 or 1, got {self.basis_label!r}")
        if self.matrix.shape != (self.grid.n_x, self.grid.n_x):
            raise ValueError("matrix shape does not match grid")
        self.matrix.setflags(write=False)

    def trace(self) -> float:
        return self.grid.h * float(np.trace(self.matrix))

    def purity(self) -> float:
        """tr rho^2 = h^2 * sum of squared entries (kernel is symmetric)."""
        return self.grid.h**2 * float(np.sum(self.matrix**2))

    def eigenvalues(self) -> np.ndarray:
        from .numerics import symmetric_eigenvalues

        return symmetric_eigenvalues(self.grid.h * self.matrix)

    def to_binary(self, path) -> None:
        gridfile.write_grid(
            path,
            self.matrix,
            kind=gridfile.KIND_KERNEL,
            basis=self.basis_label,
            channel=self.channel,
            time=self.time,
            row_range=(self.grid.x_min, self.grid.x_max),
            col_range=(self.grid.x_min, self.grid.x_max),
        )

    def eigenvalues_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("index,eigenvalue\n")
            for i, lam in enumerate(self.eigenvalues()):
                fh.write(f"{i},{lam:.17g}\n")


def _check_coverage(params: CombParams, gamma_t: float, grid: PositionGrid) -> None:
    required, _ = _q_axis_spec(params, gamma_t, DEFAULT_POLICY)
    slack = 1e-9
    if grid.x_min > -required + slack or grid.x_max < required - slack:
        raise GridCoverageError(
            f"grid [{grid.x_min}, {grid.x_max}] does not contain the state support +-{required:.3f}"
        )


def density_kernel_damping(
    params: CombParams, basis: int, gamma_t: float, grid: PositionGrid
) -> DensityKernel:
    """Damped-state density kernel.

    Gaussian in the center coordinate (x_i+x_j)/2 around the contracted
    pair centers, Gaussian-plus-linear terms in the relative coordinate
    x_i-x_j with the momentum width sigma_p^2(t) and the e^{2r-gamma t/2}
    center-offset coupling.
    """
    _check_basis(basis)
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    _check_coverage(params, gamma_t, grid)
    w, shrink, _, centers, seps, _ = _damping_terms(params, gamma_t)
    sq = math.exp(2.0 * params.squeeze)
    coupling = math.exp(2.0 * params.squeeze - gamma_t / 2.0)
    x = grid.x_axis
    mid = 0.5 * (x[:, None] + x[None, :]) - (shrink * params.spacing / 2.0 if basis == 1 else 0.0)
    rel = x[:, None] - x[None, :]
    amp = 1.0 / (math.sqrt(math.pi) * normalization(params) * math.sqrt(w.sigma_q2))
    total = np.zeros_like(mid)
    for c, s in zip(shrink * centers, seps):
        total += np.exp(
            -((mid - c) ** 2) / w.sigma_q2
            - (w.sigma_p2 * rel**2 + 2.0 * rel * s * coupling + s**2 * sq) / 4.0
        )
    matrix = amp * total
    matrix = 0.5 * (matrix + matrix.T)
    return DensityKernel(grid=grid, matrix=matrix, basis_label=basis, time=gamma_t, channel="damping")


def density_kernel_diffusion(
    params: CombParams, basis: int, gamma_t: float, grid: PositionGrid
) -> DensityKernel:
    """Diffused-state density kernel.

    Center-coordinate Gaussians of width e^{-2r} + 2 gamma t around the
    un-contracted pair centers; the relative coordinate enters through
    2 gamma t u^2 + e^{2r} (qn - qm + u)^2.
    """
    _check_basis(basis)
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    _check_coverage(params, gamma_t, grid)
    sq = math.exp(2.0 * params.squeeze)
    b_q = math.exp(-2.0 * params.squeeze) + 2.0 * gamma_t
    centers, seps = _pair_arrays(params)
    x = grid.x_axis
    mid = 0.5 * (x[:, None] + x[None, :]) - (params.spacing / 2.0 if basis == 1 else 0.0)
    rel = x[:, None] - x[None, :]
    amp = 1.0 / (math.sqrt(math.pi) * normalization(params) * math.sqrt(b_q))
    total = np.zeros_like(mid)
    for c, s in zip(centers, seps):
        total += np.exp(-((mid - c) ** 2) / b_q - (2.0 * gamma_t * rel**2 + sq * (s + rel) ** 2) / 4.0)
    matrix = amp * total
    matrix = 0.5 * (matrix + matrix.T)
    return DensityKernel(grid=grid, matrix=matrix, basis_label=basis, time=gamma_t, channel="diffusion")


def density_kernel(params: CombParams, basis: int, channel: NoiseChannel, grid: PositionGrid) -> DensityKernel:
    if channel.kind == "damping":
        return density_kernel_damping(params, basis, channel.gamma_t, grid)
    return density_kernel_diffusion(params, basis, channel.gamma_t, grid)


def incoherent_kernel(
    params: CombParams, basis: int, gamma_t: float, channel: str, grid: PositionGrid
) -> DensityKernel:
    """Density kernel of the incoherent tooth mixture under a channel.

    Keeps only the diagonal tooth pairs of the coherent kernel and
    weights them 1/N, i.e. the evolved state of the classical mixture of
    the N (normalized) teeth.
    """
    _check_basis(basis)
    if channel not in CHANNEL_KINDS:
        raise ValueError(f"channel must be one of {CHANNEL_KINDS}, got {channel!r}")
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    _check_coverage(params, gamma_t, grid)
    pos = tooth_positions(params)
    x = grid.x_axis
    rel = x[:, None] - x[None, :]
    sq = math.exp(2.0 * params.squeeze)
    if channel == "damping":
        w = evolved_widths(params.squeeze, gamma_t)
        shrink = math.exp(-gamma_t / 2.0)
        mid = 0.5 * (x[:, None] + x[None, :]) - (shrink * params.spacing / 2.0 if basis == 1 else 0.0)
        amp = 1.0 / (math.sqrt(math.pi) * params.teeth * math.sqrt(w.sigma_q2))
        relfac = np.exp(-w.sigma_p2 * rel**2 / 4.0)
        total = np.zeros_like(mid)
        for c in shrink * pos:
            total += np.exp(-((mid - c) ** 2) / w.sigma_q2)
        matrix = amp * total * relfac
    else:
        b_q = math.exp(-2.0 * params.squeeze) + 2.0 * gamma_t
        mid = 0.5 * (x[:, None] + x[None, :]) - (params.spacing / 2.0 if basis == 1 else 0.0)
        amp = 1.0 / (math.sqrt(math.pi) * params.teeth * math.sqrt(b_q))
        relfac = np.exp(-(2.0 * gamma_t + sq) * rel**2 / 4.0)
        total = np.zeros_like(mid)
        for c in pos:
            total += np.exp(-((mid - c) ** 2) / b_q)
        matrix = amp * total * relfac
    matrix = 0.5 * (matrix + matrix.T)
    kernel = DensityKernel(
        grid=grid, matrix=matrix, basis_label=basis, time=gamma_t, channel=channel, coherent=False
    )
    return kernel


def pure_kernel_matrix(params: CombParams, basis: int, grid: PositionGrid) -> np.ndarray:
    """Rank-one projector psi(x_i) psi(x_j) of the pure comb (test oracle)."""
    psi = wavefunction(params, basis, grid.x_axis)
    return np.outer(psi, psi)
