"""Shared numeric services: adaptive quadrature, eigensolver, convergence harness.

Small, deterministic building blocks used by the phase-space and metric
modules.  All routines work in plain double precision and raise typed
errors instead of returning sentinel values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ToleranceConfig",
    "QuadratureError",
    "AsymmetricMatrixError",
    "EigensolverError",
    "ConvergenceError",
    "integrate_1d",
    "symmetric_eigenvalues",
    "convergence_double",
]


@dataclass
class ToleranceConfig:
    """Numeric tolerances, overridable from the CLI config file.

    quad_abs: absolute tolerance for adaptive 1D quadrature.
    eig_rel:  eigenvalues below eig_rel * max|lambda| are treated as
              discretization noise in trace-norm sums.
    conv_rel: relative change accepted by the grid-doubling harness.
    """

    quad_abs: float = 1e-10
    eig_rel: float = 1e-12
    conv_rel: float = 1e-8

    def __post_init__(self):
        for name in ("quad_abs", "eig_rel", "conv_rel"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")


DEFAULT_TOLERANCES = ToleranceConfig()


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within the depth cap."""


class AsymmetricMatrixError(ValueError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class EigensolverError(RuntimeError):
    """Underlying eigenvalue iteration failed to converge."""


class ConvergenceError(RuntimeError):
    """Grid doubling exhausted its cap; carries the best estimate seen."""

    def __init__(self, message, best, estimate):
        super().__init__(message)
        self.best = best
        self.estimate = estimate


def integrate_1d(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 48,
                 min_intervals: int = 16) -> float:
    """Adaptive Simpson integral of f over [a, b] to absolute tolerance tol.

    f must accept numpy arrays (evaluations are batched level by level).
    Exact on cubics; each interval is refined until its local Richardson
    residual drops below its share of the tolerance.  Raises
    QuadratureError past the depth cap.

    min_intervals sets the initial uniform partition; refinement is purely
    local, so callers must choose it large enough that the narrowest
    feature of f is seen by the initial nodes (an adaptive rule that never
    samples a spike cannot react to it).
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    k = max(1, int(min_intervals))
    edges = np.linspace(a, b, k + 1)
    nodes = np.empty(2 * k + 1)
    nodes[0::2] = edges
    nodes[1::2] = 0.5 * (edges[:-1] + edges[1:])
    fvals = np.asarray(f(nodes), dtype=float)
    # active interval state: edges, f(left), f(mid), f(right), Simpson sum, tol
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    fl = fvals[0:-1:2].copy()
    fc = fvals[1::2].copy()
    fr = fvals[2::2].copy()
    s_whole = (hi - lo) / 6.0 * (fl + 4.0 * fc + fr)
    tols = np.full(k, tol / k)
    total = 0.0
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        fvals = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        flm = fvals[: lm.size]
        frm = fvals[lm.size:]
        left = (mid - lo) / 6.0 * (fl + 4.0 * flm + fc)
        right = (hi - mid) / 6.0 * (fc + 4.0 * frm + fr)
        err = left + right - s_whole
        done = np.abs(err) <= 15.0 * tols
        total += float(np.sum((left + right + err / 15.0)[done]))
        if np.all(done):
            return total
        if depth == max_depth:
            raise QuadratureError(
                f"no convergence after depth {max_depth} "
                f"(worst residual {float(np.max(np.abs(err[~done]))):.3e})"
            )
        keep = ~done
        half_tol = 0.5 * tols[keep]
        lo, hi, mid = lo[keep], hi[keep], mid[keep]
        fl, fc, fr = fl[keep], fc[keep], fr[keep]
        flm, frm = flm[keep], frm[keep]
        left, right = left[keep], right[keep]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        fl, fc, fr = (
            np.concatenate([fl, fc]),
            np.concatenate([flm, frm]),
            np.concatenate([fc, fr]),
        )
        s_whole = np.concatenate([left, right])
        tols = np.concatenate([half_tol, half_tol])
    raise QuadratureError("unreachable")


def symmetric_eigenvalues(matrix: np.ndarray, asym_tol: float = 1e-10) -> np.ndarray:
    """Full real spectrum of a symmetric matrix, sorted descending.

    Rejects matrices whose asymmetry max|A - A^T| exceeds asym_tol
    relative to max(1, max|A|).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise AsymmetricMatrixError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > asym_tol * scale:
        raise AsymmetricMatrixError(f"asymmetry {asym:.3e} exceeds tolerance {asym_tol:.3e} * {scale:.3e}")
    try:
        vals = np.linalg.eigvalsh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    return vals[::-1]


def convergence_double(compute, rel_tol: float = 1e-8, max_doublings: int = 8):
    """Refine compute(k) (resolution doubled k times) until it settles.

    Returns (value, change) where change is the relative difference of the
    last two refinement levels, used as the error estimate.  Raises
    ConvergenceError carrying the best value if the cap is hit.
    """
    prev = compute(0)
    change = np.inf
    for k in range(1, max_doublings + 1):
        cur = compute(k)
        change = abs(cur - prev) / max(abs(cur), abs(prev), 1e-12)
        if change < rel_tol:
            return cur, change
        prev = cur
    raise ConvergenceError(
        f"no convergence after {max_doublings} doublings (last change {change:.3e})",
        best=prev,
        estimate=change,
    )
