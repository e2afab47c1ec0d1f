"""Squeezed comb states and their static scalar properties.

A squeezed comb is a uniform superposition of N equally spaced, equally
squeezed Gaussian wave packets ("teeth") along the position quadrature.
Two such combs, offset by half a tooth spacing, encode the computational
basis of a logical qubit.  Everything here is a closed-form double sum
over tooth pairs: normalization, basis overlap, quadrature variances and
the resulting two-state discrimination error.

Conventions: dimensionless quadratures with a = (q + ip)/sqrt(2), so the
vacuum has Var q = Var p = 1/2 and a single tooth squeezed by r has
position width e^{-r} (wavefunction ~ exp(-e^{2r} x^2 / 2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParameterError",
    "CombParams",
    "CombScalars",
    "tooth_positions",
    "normalization",
    "normalization_approx",
    "basis_overlap",
    "basis_overlap_approx",
    "quadrature_variances",
    "quadrature_variances_approx",
    "initial_error",
    "initial_error_approx",
    "comb_scalars",
    "wavefunction",
    "wavefunction_dx",
]


class ParameterError(ValueError):
    """Invalid comb parameters (non-positive tooth count/spacing, non-finite squeeze)."""


@dataclass(frozen=True)
class CombParams:
    """Encoding triple: number of teeth N, tooth spacing d, squeezing r.

    r may have either sign; negative r is anti-squeezing (teeth wider than
    vacuum in position).  The basis-one comb is the basis-zero comb shifted
    by +d/2 in position.
    """

    teeth: int
    spacing: float
    squeeze: float

    def __post_init__(self):
        if not isinstance(self.teeth, (int, np.integer)) or self.teeth < 1:
            raise ParameterError(f"tooth count must be a positive integer, got {self.teeth!r}")
        if not math.isfinite(self.spacing) or self.spacing <= 0.0:
            raise ParameterError(f"tooth spacing must be finite and > 0, got {self.spacing!r}")
        if not math.isfinite(self.squeeze):
            raise ParameterError(f"squeeze parameter must be finite, got {self.squeeze!r}")


@dataclass(frozen=True)
class CombScalars:
    """Static scalars of an encoding: normalization, overlap, variances, error."""

    normalization: float
    overlap01: float
    var_q: float
    var_p: float
    eps0: float


def tooth_positions(params: CombParams) -> np.ndarray:
    """Centers of the N teeth of the basis-zero comb.

    The comb is centered on the origin (minimal mean energy), so the
    positions form the symmetric arithmetic progression
    d*(n - (N+1)/2) for n = 1..N and sum to zero exactly.
    """
    n = np.arange(1, params.teeth + 1, dtype=float)
    return params.spacing * (n - 0.5 * (params.teeth + 1))


def _pair_geometry(params: CombParams):
    """All N^2 tooth pairs as (centers (qn+qm)/2, separations qn-qm)."""
    pos = tooth_positions(params)
    centers = 0.5 * (pos[:, None] + pos[None, :])
    seps = pos[:, None] - pos[None, :]
    return centers.ravel(), seps.ravel()


def normalization(params: CombParams) -> float:
    """Exact norm factor of the comb superposition.

    Equals sum_{n,m} exp(-e^{2r} (qn - qm)^2 / 4); the teeth are unit
    Gaussians with pairwise overlap exp(-e^{2r} dx^2 / 4).  Tends to N
    once e^r d >> 1 (non-overlapping teeth).
    """
    pos = tooth_positions(params)
    seps = pos[:, None] - pos[None, :]
    return float(np.sum(np.exp(-np.exp(2.0 * params.squeeze) * seps**2 / 4.0)))


def normalization_approx(params: CombParams) -> float:
    """Nearest-neighbour approximation N + 2(N-1) exp(-e^{2r} d^2 / 4)."""
    n, d, r = params.teeth, params.spacing, params.squeeze
    return n + 2.0 * (n - 1) * math.exp(-math.exp(2.0 * r) * d * d / 4.0)


def basis_overlap(params: CombParams) -> float:
    """Exact scalar product between the two basis combs.

    The basis-one comb is shifted by d/2, so the pair separations pick up
    a -d/2 offset; the result is strictly inside (0, 1).
    """
    pos = tooth_positions(params)
    seps = pos[:, None] - pos[None, :]
    sq = np.exp(2.0 * params.squeeze)
    return float(np.sum(np.exp(-sq * (seps - params.spacing / 2.0) ** 2 / 4.0))) / normalization(params)


def basis_overlap_approx(params: CombParams) -> float:
    """Leading-order overlap (2N-1)/N * exp(-e^{2r} d^2 / 16)."""
    n, d, r = params.teeth, params.spacing, params.squeeze
    return (2.0 * n - 1.0) / n * math.exp(-math.exp(2.0 * r) * d * d / 16.0)


def quadrature_variances(params: CombParams) -> tuple[float, float]:
    """Exact (Var q, Var p) of either basis comb.

    Both combs have the same variances (they differ by a rigid shift).
    Var q >= e^{-2r}/2 grows with the comb footprint; Var p stays near
    e^{2r}/2 up to exponentially small pair corrections.
    """
    centers, seps = _pair_geometry(params)
    sq = np.exp(2.0 * params.squeeze)
    weights = np.exp(-sq * (seps / 2.0) ** 2)
    norm = float(np.sum(weights))
    var_q = float(np.sum((0.5 / sq + centers**2) * weights)) / norm
    var_p = float(np.sum(0.5 * sq * (1.0 - 0.5 * sq * seps**2) * weights)) / norm
    return var_q, var_p


def quadrature_variances_approx(params: CombParams) -> tuple[float, float]:
    """Diagonal-pair variances: (e^{-2r}/2 + (N^2-1)d^2/12, e^{2r}/2)."""
    n, d, r = params.teeth, params.spacing, params.squeeze
    var_q = math.exp(-2.0 * r) / 2.0 + (n * n - 1.0) * d * d / 12.0
    var_p = math.exp(2.0 * r) / 2.0
    return var_q, var_p


def initial_error(params: CombParams) -> float:
    """Minimum two-state discrimination error between the pure basis combs.

    For pure states the optimal (Helstrom) error is
    (1 - sqrt(1 - |<0|1>|^2)) / 2, computed here from the exact overlap.
    """
    c = basis_overlap(params)
    return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - c * c)))


def initial_error_approx(params: CombParams) -> float:
    """Small-overlap error estimate ((2N-1)/2N)^2 exp(-e^{2r} d^2 / 8)."""
    n, d, r = params.teeth, params.spacing, params.squeeze
    return ((2.0 * n - 1.0) / (2.0 * n)) ** 2 * math.exp(-math.exp(2.0 * r) * d * d / 8.0)


def comb_scalars(params: CombParams) -> CombScalars:
    """Bundle of all exact static scalars for one encoding."""
    var_q, var_p = quadrature_variances(params)
    return CombScalars(
        normalization=normalization(params),
        overlap01=basis_overlap(params),
        var_q=var_q,
        var_p=var_p,
        eps0=initial_error(params),
    )


def wavefunction(params: CombParams, basis: int, x) -> np.ndarray:
    """Real position wavefunction of basis comb 0 or 1 at x.

    psi_0(x) = (e^{2r}/pi)^{1/4} / sqrt(norm) * sum_n exp(-e^{2r}(x - qn)^2 / 2)
    and psi_1(x) = psi_0(x - d/2).
    """
    if basis not in (0, 1):
        raise ParameterError(f"basis must be 0 or 1, got {basis!r}")
    x = np.asarray(x, dtype=float) - (params.spacing / 2.0 if basis == 1 else 0.0)
    sq = np.exp(2.0 * params.squeeze)
    pos = tooth_positions(params)
    amp = (sq / np.pi) ** 0.25 / math.sqrt(normalization(params))
    return amp * np.sum(np.exp(-sq * (x[..., None] - pos) ** 2 / 2.0), axis=-1)


def wavefunction_dx(params: CombParams, basis: int, x) -> np.ndarray:
    """Derivative of `wavefunction` with respect to x (closed form)."""
    if basis not in (0, 1):
        raise ParameterError(f"basis must be 0 or 1, got {basis!r}")
    x = np.asarray(x, dtype=float) - (params.spacing / 2.0 if basis == 1 else 0.0)
    sq = np.exp(2.0 * params.squeeze)
    pos = tooth_positions(params)
    amp = (sq / np.pi) ** 0.25 / math.sqrt(normalization(params))
    dx = x[..., None] - pos
    return amp * np.sum(-sq * dx * np.exp(-sq * dx**2 / 2.0), axis=-1)
