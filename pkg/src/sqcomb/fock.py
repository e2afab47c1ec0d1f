"""Truncated Fock-basis brute force for cross-validation.

Everything in this module deliberately avoids the closed-form phase-space
results: comb states are assembled from displacement and squeezing
matrix exponentials in the number basis, the two master equations are
integrated step by step with classic RK4, and the figures of merit are
recomputed from the density matrices.  Agreement with the analytic
modules is the strongest correctness check the package has.

Conventions match the rest of the package: a = (q + ip)/sqrt(2), and a
position displacement of the wavefunction by +q0 is D(-q0/sqrt(2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .comb import CombParams, quadrature_variances, tooth_positions

__all__ = [
    "FockState",
    "TruncationError",
    "StepInstabilityError",
    "OracleMetrics",
    "annihilation",
    "displacement_operator",
    "squeeze_operator",
    "default_dim",
    "build_comb",
    "integrate_master",
    "fock_wigner",
    "mean_photons",
    "oracle_metrics",
]


class TruncationError(RuntimeError):
    """Fock truncation too small for the requested state."""

    def __init__(self, message, suggested_dim):
        super().__init__(message)
        self.suggested_dim = suggested_dim


class StepInstabilityError(RuntimeError):
    """Master-equation integration lost the trace (step size too large)."""


@dataclass(frozen=True)
class FockState:
    """State in a truncated number basis: vector (pure) or matrix (mixed)."""

    dim: int
    amplitudes: np.ndarray
    tail_mass: float

    def __post_init__(self):
        amp = self.amplitudes
        if amp.shape not in ((self.dim,), (self.dim, self.dim)):
            raise ValueError("amplitudes must be a dim vector or dim x dim matrix")
        if self.is_pure:
            total = float(np.vdot(amp, amp).real)
        else:
            total = float(np.trace(amp).real)
            if float(np.max(np.abs(amp - amp.conj().T))) > 1e-12:
                raise ValueError("density matrix is not Hermitian")
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"state norm/trace is {total!r}, expected 1")
        amp.setflags(write=False)

    @property
    def is_pure(self) -> bool:
        return self.amplitudes.ndim == 1

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return self.amplitudes


def annihilation(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def displacement_operator(dim: int, alpha: complex) -> np.ndarray:
    """D(alpha) = exp(alpha a^dag - alpha* a) on the truncated basis."""
    a = annihilation(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_operator(dim: int, r: float) -> np.ndarray:
    """S(r) = exp(r (a^2 - a^dag^2)/2); positive r narrows the position width."""
    a = annihilation(dim)
    return expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T))


def default_dim(params: CombParams) -> int:
    """Truncation heuristic: four times the total quadrature spread."""
    var_q, var_p = quadrature_variances(params)
    return max(64, int(math.ceil(4.0 * (var_q + var_p))))


def _tail_fraction(weights: np.ndarray) -> float:
    """Probability mass in the top eighth of the basis (truncation proxy)."""
    dim = weights.size
    guard = max(8, dim // 8)
    return float(np.sum(weights[dim - guard:]))


def build_comb(params: CombParams, basis: int, dim: int | None = None) -> FockState:
    """Comb state as a normalized superposition of displaced squeezed vacua.

    Each tooth at position qn is D(-qn/sqrt(2)) S(r)|vac>; the basis-one
    comb shifts every tooth by +d/2.  Raises TruncationError when the
    top-of-basis mass indicates the cutoff is too small.
    """
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis!r}")
    if dim is None:
        dim = default_dim(params)
    seed = squeeze_operator(dim, params.squeeze)[:, 0]
    shift = params.spacing / 2.0 if basis == 1 else 0.0
    vec = np.zeros(dim, dtype=complex)
    a = annihilation(dim)
    for q in tooth_positions(params) + shift:
        # D(q/sqrt 2) moves the wavefunction by +q in this sign convention
        gen = (q / math.sqrt(2.0)) * (a.conj().T - a)
        vec += expm(gen) @ seed
    vec /= math.sqrt(float(np.vdot(vec, vec).real))
    tail = _tail_fraction(np.abs(vec) ** 2)
    if tail > 1e-8:
        raise TruncationError(
            f"tail mass {tail:.3e} at dim {dim}; state needs a larger basis",
            suggested_dim=2 * dim,
        )
    return FockState(dim=dim, amplitudes=vec, tail_mass=tail)


def _generator(kind: str, dim: int):
    a = annihilation(dim)
    ad = a.conj().T
    n_op = ad @ a
    if kind == "damping":

        def lindblad(rho):
            return a @ rho @ ad - 0.5 * (n_op @ rho + rho @ n_op)

    elif kind == "diffusion":
        sym = n_op + 0.5 * np.eye(dim)  # (a^dag a + a a^dag)/2

        def lindblad(rho):
            return a @ rho @ ad + ad @ rho @ a - (sym @ rho + rho @ sym)

    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return lindblad


def integrate_master(state: FockState, channel: str, gamma_t: float, steps: int | None = None) -> FockState:
    """Evolve a state by classic RK4 integration of the chosen dissipator.

    Time is measured in gamma*t units.  The density matrix is
    re-Hermitized after every step; a trace drift beyond 1e-6 aborts with
    StepInstabilityError (the explicit scheme went unstable).
    """
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    rho = state.density_matrix().astype(complex)
    if gamma_t == 0.0:
        return FockState(dim=state.dim, amplitudes=rho, tail_mass=state.tail_mass)
    if steps is None:
        steps = max(400, int(math.ceil(8.0 * gamma_t * state.dim)))
    lindblad = _generator(channel, state.dim)
    h = gamma_t / steps
    for _ in range(steps):
        k1 = lindblad(rho)
        k2 = lindblad(rho + 0.5 * h * k1)
        k3 = lindblad(rho + 0.5 * h * k2)
        k4 = lindblad(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(float(np.trace(rho).real) - 1.0)
        if drift > 1e-6:
            raise StepInstabilityError(
                f"trace drifted by {drift:.3e} after a step of {h:.3e}; increase steps"
            )
    tail = _tail_fraction(np.real(np.diag(rho)))
    return FockState(dim=state.dim, amplitudes=rho, tail_mass=tail)


def fock_wigner(state: FockState, q, p):
    """Wigner function of a truncated-basis state at probe points.

    Displaced-parity form: w(q, p) = (1/pi) tr[D^dag(alpha) rho D(alpha) P]
    with alpha = (q + ip)/sqrt(2) and P the photon-number parity.  The
    displacement splits exactly as D(alpha) = e^{i u v} e^{-i sqrt2 u p_op}
    e^{i sqrt2 v q_op} (u = Re alpha, v = Im alpha), so with both
    quadrature operators diagonalized once, each probe point costs only a
    few matrix-vector products instead of a matrix exponential.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    dim = state.dim
    parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    a = annihilation(dim)
    ad = a.conj().T
    lam_q, v_q = np.linalg.eigh((a + ad) / math.sqrt(2.0))
    lam_p, v_p = np.linalg.eigh((a - ad) / (1j * math.sqrt(2.0)))
    if state.is_pure:
        cols = state.amplitudes[:, None]
        weights = np.ones(1)
    else:
        w, vecs = np.linalg.eigh(state.amplitudes)
        keep = w > 1e-13 * float(np.max(np.abs(w)))
        cols = vecs[:, keep]
        weights = w[keep]
    vp_cols = v_p.conj().T @ cols
    out = np.empty(q.shape, dtype=float)
    for idx in np.ndindex(q.shape):
        u = q[idx] / math.sqrt(2.0)
        v = p[idx] / math.sqrt(2.0)
        # D^dag(alpha) = e^{-iuv} exp(-i sqrt2 v q_op) exp(i sqrt2 u p_op),
        # applied right to left; the global phase drops out of |.|^2
        x = v_p @ (np.exp(1j * math.sqrt(2.0) * u * lam_p)[:, None] * vp_cols)
        x = v_q @ (np.exp(-1j * math.sqrt(2.0) * v * lam_q)[:, None] * (v_q.conj().T @ x))
        out[idx] = float(parity @ (np.abs(x) ** 2 @ weights)) / math.pi
    return float(out) if out.ndim == 0 else out


def mean_photons(state: FockState) -> float:
    n = np.arange(state.dim)
    if state.is_pure:
        return float(np.sum(n * np.abs(state.amplitudes) ** 2))
    return float(np.sum(n * np.real(np.diag(state.amplitudes))))


class OracleMetrics(NamedTuple):
    fidelity: float
    orthogonality: float
    distinguishability: float


def oracle_metrics(
    params: CombParams,
    channel: str,
    gamma_t: float,
    dim: int | None = None,
    steps: int | None = None,
) -> OracleMetrics:
    """Recompute (F, O, D) entirely in the number basis.

    Fidelity as <psi|rho(t)|psi>, orthogonality as tr[rho_0 rho_1] and
    distinguishability from the spectrum of rho_0 - rho_1.
    """
    psi0 = build_comb(params, 0, dim)
    psi1 = build_comb(params, 1, dim)
    rho0 = integrate_master(psi0, channel, gamma_t, steps).amplitudes
    rho1 = integrate_master(psi1, channel, gamma_t, steps).amplitudes
    fid = float(np.real(np.vdot(psi0.amplitudes, rho0 @ psi0.amplitudes)))
    orth = float(np.real(np.sum(rho0 * rho1.T)))
    diff = rho0 - rho1
    vals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    dist = 0.5 * float(np.sum(np.abs(vals)))
    return OracleMetrics(fidelity=fid, orthogonality=orth, distinguishability=dist)
