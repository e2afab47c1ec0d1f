"""Phase-space representation of squeezed comb states on rectangular grids.

Evaluates the closed-form Wigner function of a comb, its position and
momentum marginals, and 2D overlap integrals.  Grids are auto-sized so
that all Gaussian tails fall below the quadrature tolerance (6-sigma
truncation) and the fastest interference fringe along p is sampled at
least `samples_per_feature` times per period; with entire integrands this
makes the plain trapezoid rule spectrally accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .comb import CombParams, normalization, tooth_positions
from . import gridfile

__all__ = [
    "GridPolicy",
    "GridCapError",
    "GridMismatchError",
    "PhaseGrid",
    "PositionGrid",
    "WignerField",
    "auto_grid",
    "auto_position_grid",
    "wigner_at",
    "wigner_field",
    "position_marginal",
    "position_marginal_approx",
    "momentum_marginal",
    "chebyshev_u",
    "wigner_overlap",
]


class GridCapError(RuntimeError):
    """Requested grid exceeds the configured point cap."""


class GridMismatchError(ValueError):
    """Two fields that must share a grid were built on different grids."""


@dataclass(frozen=True)
class GridPolicy:
    """How auto-sized grids are constructed.

    samples_per_feature: grid points per Gaussian width and per fringe period.
    sigma_factor: half-extent beyond the comb footprint, in Gaussian widths.
    max_points: cap on n_q * n_p for 2D grids.
    max_kernel_points: cap on n_x for 1D density-kernel grids.
    """

    samples_per_feature: int = 4
    sigma_factor: float = 6.0
    max_points: int = 1 << 24
    max_kernel_points: int = 4096


DEFAULT_POLICY = GridPolicy()


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular (q, p) sampling domain."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    n_q: int
    n_p: int

    def __post_init__(self):
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError("grid extents must be non-degenerate")
        if self.n_q < 2 or self.n_p < 2:
            raise ValueError("grids need at least 2 nodes per axis")

    @property
    def h_q(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def h_p(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @property
    def q_axis(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @property
    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    def refined(self, times: int = 1) -> "PhaseGrid":
        """Same extents with the spacing halved `times` times."""
        f = 1 << times
        return replace(self, n_q=(self.n_q - 1) * f + 1, n_p=(self.n_p - 1) * f + 1)

    def trapz2(self, values: np.ndarray) -> float:
        """2D trapezoid integral of values sampled on this grid."""
        wq = np.full(self.n_q, self.h_q)
        wq[0] = wq[-1] = 0.5 * self.h_q
        wp = np.full(self.n_p, self.h_p)
        wp[0] = wp[-1] = 0.5 * self.h_p
        return float(wq @ values @ wp)


@dataclass(frozen=True)
class PositionGrid:
    """Uniform 1D position grid for density kernels."""

    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("grid extent must be non-degenerate")
        if self.n_x < 2:
            raise ValueError("grids need at least 2 nodes")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def refined(self, times: int = 1) -> "PositionGrid":
        return replace(self, n_x=(self.n_x - 1) * (1 << times) + 1)


@dataclass(frozen=True)
class WignerField:
    """Wigner function of one basis comb sampled on a grid.

    values[i, j] = w(q_i, p_j).  time is the rate-time product of the
    noise channel that produced the field (0 for the pure state), channel
    is "damping", "diffusion" or None for the static state.
    """

    grid: PhaseGrid
    values: np.ndarray
    basis_label: int
    time: float = 0.0
    channel: str | None = None

    def __post_init__(self):
        if self.basis_label not in (0, 1):
            raise ValueError(f"basis_label must be 0 or 1, got {self.basis_label!r}")
        if self.time < 0.0:
            raise ValueError("time must be >= 0")
        if self.values.shape != (self.grid.n_q, self.grid.n_p):
            raise ValueError("values shape does not match grid")
        self.values.setflags(write=False)

    def normalization(self) -> float:
        return self.grid.trapz2(self.values)

    def to_csv(self, path) -> None:
        """Write rows q,p,w in row-major grid order, 17 significant digits."""
        q = self.grid.q_axis
        p = self.grid.p_axis
        with open(path, "w", newline="") as fh:
            fh.write("q,p,w\n")
            for i in range(self.grid.n_q):
                row = self.values[i]
                qi = q[i]
                for j in range(self.grid.n_p):
                    fh.write(f"{qi:.17g},{p[j]:.17g},{row[j]:.17g}\n")

    def to_binary(self, path) -> None:
        gridfile.write_grid(
            path,
            self.values,
            kind=gridfile.KIND_WIGNER,
            basis=self.basis_label,
            channel=self.channel,
            time=self.time,
            row_range=(self.grid.q_min, self.grid.q_max),
            col_range=(self.grid.p_min, self.grid.p_max),
        )

    @classmethod
    def from_binary(cls, path) -> "WignerField":
        rec = gridfile.read_grid(path)
        if rec.kind != gridfile.KIND_WIGNER:
            raise ValueError(f"{path} does not hold a Wigner field")
        grid = PhaseGrid(
            rec.row_range[0], rec.row_range[1], rec.col_range[0], rec.col_range[1],
            rec.values.shape[0], rec.values.shape[1],
        )
        return cls(grid=grid, values=rec.values, basis_label=rec.basis, time=rec.time, channel=rec.channel)


def _axis_nodes(half_extent: float, h_target: float) -> int:
    # +1 for the endpoint, +1 so the realized spacing is strictly below target
    return int(math.ceil(2.0 * half_extent / h_target)) + 2


def _q_axis_spec(params: CombParams, gamma_t: float, policy: GridPolicy) -> tuple[float, float]:
    """(half extent, target spacing) of the position axis at rate-time gamma_t."""
    n, d, r = params.teeth, params.spacing, params.squeeze
    sig_q0 = math.exp(-r)
    # diffusion width bounds the damping width for every gamma_t >= 0
    sig_qt = math.sqrt(math.exp(-2.0 * r) + 2.0 * gamma_t)
    half = (n + 1) * d / 2.0 + d / 2.0 + policy.sigma_factor * max(sig_qt, sig_q0)
    h_target = min(sig_q0, 1.0) / policy.samples_per_feature
    return half, h_target


def auto_grid(params: CombParams, gamma_t: float = 0.0, policy: GridPolicy | None = None) -> PhaseGrid:
    """Phase-space grid sized for a comb evolved up to rate-time gamma_t.

    The q extent covers every tooth of either basis plus 6 widths of the
    broadest channel envelope; the p extent covers 6 momentum widths.  The
    p spacing resolves both the momentum Gaussian and the fastest comb
    fringe cos[p (q_N - q_1)], including the transient fringe-frequency
    growth of the damping channel.
    """
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    policy = policy or DEFAULT_POLICY
    n, d, r = params.teeth, params.spacing, params.squeeze
    spf = policy.samples_per_feature

    q_half, h_q = _q_axis_spec(params, gamma_t, policy)

    sig_p0 = math.exp(r)
    sig_pt = math.sqrt(math.exp(2.0 * r) + 2.0 * gamma_t)
    p_half = policy.sigma_factor * max(sig_pt, sig_p0)
    h_p = min(sig_p0, 1.0) / spf
    if n > 1:
        # fringe frequency under damping: |d cos-arg/dp| = sep * e^{2r - t/2} / sigma_p^2(t)
        sp2_damp = 1.0 - math.exp(-gamma_t) + math.exp(2.0 * r - gamma_t)
        freq = (n - 1) * d * max(1.0, math.exp(2.0 * r - gamma_t / 2.0) / sp2_damp)
        h_p = min(h_p, 2.0 * math.pi / (freq * spf))

    n_q = _axis_nodes(q_half, h_q)
    n_p = _axis_nodes(p_half, h_p)
    if n_q * n_p > policy.max_points:
        raise GridCapError(f"grid {n_q} x {n_p} exceeds cap of {policy.max_points} points")
    return PhaseGrid(-q_half, q_half, -p_half, p_half, n_q, n_p)


def auto_position_grid(params: CombParams, gamma_t: float = 0.0, policy: GridPolicy | None = None) -> PositionGrid:
    """1D kernel grid: the q axis of `auto_grid` under the same policy."""
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    policy = policy or DEFAULT_POLICY
    half, h_target = _q_axis_spec(params, gamma_t, policy)
    n_x = _axis_nodes(half, h_target)
    if n_x > policy.max_kernel_points:
        raise GridCapError(f"kernel grid of {n_x} points exceeds cap of {policy.max_kernel_points}")
    return PositionGrid(-half, half, n_x)


def _pair_arrays(params: CombParams):
    pos = tooth_positions(params)
    centers = (0.5 * (pos[:, None] + pos[None, :])).ravel()
    seps = (pos[:, None] - pos[None, :]).ravel()
    return centers, seps


def wigner_at(params: CombParams, basis: int, q, p):
    """Closed-form Wigner function of basis comb 0 or 1 at (q, p).

    Double sum over tooth pairs: Gaussians in q centered between the pair,
    fringes cos[p (qn - qm)] along p under the envelope exp(-e^{-2r} p^2).
    Basis one is the same function shifted by d/2 in q.  Accepts scalars
    or broadcastable arrays.
    """
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")
    q = np.asarray(q, dtype=float) - (params.spacing / 2.0 if basis == 1 else 0.0)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    sq = np.exp(2.0 * params.squeeze)
    centers, seps = _pair_arrays(params)
    env = np.exp(-p**2 / sq) / (normalization(params) * np.pi)
    total = np.zeros_like(q)
    for c, s in zip(centers, seps):
        total += np.exp(-sq * (q - c) ** 2) * np.cos(p * s)
    out = env * total
    return float(out) if out.ndim == 0 else out


def wigner_field(params: CombParams, basis: int, grid: PhaseGrid) -> WignerField:
    """Pure-state Wigner function sampled on a grid.

    The double sum is separable per tooth pair, so the field is assembled
    as a (pairs x n_q)^T @ (pairs x n_p) matrix product.
    """
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")
    q = grid.q_axis - (params.spacing / 2.0 if basis == 1 else 0.0)
    p = grid.p_axis
    sq = np.exp(2.0 * params.squeeze)
    centers, seps = _pair_arrays(params)
    qfac = np.exp(-sq * (q[None, :] - centers[:, None]) ** 2)
    pfac = np.cos(seps[:, None] * p[None, :]) * np.exp(-p[None, :] ** 2 / sq)
    values = (qfac.T @ pfac) / (normalization(params) * np.pi)
    return WignerField(grid=grid, values=values, basis_label=basis, time=0.0, channel=None)


def position_marginal(params: CombParams, basis: int, q):
    """Exact position density of a basis comb (pairwise Gaussian sum)."""
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")
    q = np.asarray(q, dtype=float) - (params.spacing / 2.0 if basis == 1 else 0.0)
    sq = np.exp(2.0 * params.squeeze)
    centers, seps = _pair_arrays(params)
    amp = math.exp(params.squeeze) / (normalization(params) * math.sqrt(math.pi))
    vals = amp * np.sum(
        np.exp(-sq * (q[..., None] - centers) ** 2) * np.exp(-sq * (seps / 2.0) ** 2), axis=-1
    )
    return float(vals) if np.ndim(q) == 0 else vals


def position_marginal_approx(params: CombParams, basis: int, q):
    """Two-sum split of the position density for well-separated teeth.

    N Gaussian teeth plus 2(N-1) small side peaks halfway between
    neighbours, each suppressed by exp(-e^{2r} d^2/4).
    """
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")
    d = params.spacing
    q = np.asarray(q, dtype=float) - (d / 2.0 if basis == 1 else 0.0)
    sq = np.exp(2.0 * params.squeeze)
    pos = tooth_positions(params)
    amp = math.exp(params.squeeze) / (normalization(params) * math.sqrt(math.pi))
    teeth = np.sum(np.exp(-sq * (q[..., None] - pos) ** 2), axis=-1)
    side = 2.0 * math.exp(-sq * d * d / 4.0) * np.sum(
        np.exp(-sq * (q[..., None] - pos[:-1] - d / 2.0) ** 2), axis=-1
    )
    vals = amp * (teeth + side)
    return float(vals) if np.ndim(q) == 0 else vals


def chebyshev_u(n: int, theta):
    """Chebyshev polynomial of the second kind, U_n(cos theta) = sin((n+1)theta)/sin(theta).

    The sine ratio is replaced by its series limit near the removable
    singularities theta = k*pi, where U_n(+-1) = (+-1)^n (n+1).
    """
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    small = np.abs(s) < 1e-6
    safe = np.where(small, 1.0, s)
    ratio = np.sin((n + 1) * theta) / safe
    k = np.rint(theta / np.pi)
    eps = theta - k * np.pi
    sign = np.where((k.astype(np.int64) * n) % 2 == 0, 1.0, -1.0)
    series = sign * (n + 1) * (1.0 - n * (n + 2) * eps**2 / 6.0)
    out = np.where(small, series, ratio)
    return float(out) if out.ndim == 0 else out


def momentum_marginal(params: CombParams, p):
    """Momentum density, identical for both basis combs.

    An N-slit grating pattern: squeezed Gaussian envelope times the
    squared Chebyshev factor U_{N-1}(cos(p d / 2))^2.
    """
    p = np.asarray(p, dtype=float)
    sq = np.exp(2.0 * params.squeeze)
    amp = math.exp(-params.squeeze) / (normalization(params) * math.sqrt(math.pi))
    u = chebyshev_u(params.teeth - 1, p * params.spacing / 2.0)
    vals = amp * np.exp(-p**2 / sq) * u**2
    return float(vals) if vals.ndim == 0 else vals


def wigner_overlap(a: WignerField, b: WignerField) -> float:
    """Hilbert-Schmidt overlap 2*pi * integral of a*b over the shared grid."""
    if a.grid != b.grid:
        raise GridMismatchError("fields were sampled on different grids")
    return 2.0 * math.pi * a.grid.trapz2(a.values * b.values)
