"""Figures of merit for noisy comb encodings.

Three complementary quantities track how a comb encoding degrades under
a noise channel:

* fidelity F(t): overlap between a basis state and its own evolved
  version, 2*pi * integral of w(0) * w(t); measures departure from the
  initial code space.
* orthogonality O(t): Hilbert-Schmidt scalar product between the two
  evolved basis states; O(0) equals the squared basis overlap.
* distinguishability D(t): trace distance between the evolved basis
  states, computed by diagonalizing the difference of their position
  density kernels.  The Holevo-Helstrom bound turns it into the minimum
  discrimination error eps = (1 - D)/2.

Initial decay rates of F and O have closed forms (quadrature variances
and comb matrix elements); D has none and is differentiated numerically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json

import numpy as np

from .comb import (
    CombParams,
    quadrature_variances,
    wavefunction,
    wavefunction_dx,
)
from .evolution import (
    CHANNEL_KINDS,
    NoiseChannel,
    density_kernel,
    incoherent_kernel,
    evolved_wigner_field,
)
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, convergence_double, integrate_1d, symmetric_eigenvalues
from .phasespace import (
    GridPolicy,
    auto_grid,
    auto_position_grid,
    wigner_field,
    wigner_overlap,
)

__all__ = [
    "METRIC_NAMES",
    "MetricSeries",
    "InsufficientSamplesError",
    "fidelity",
    "fidelity_rate_exact",
    "fidelity_rate_approx",
    "orthogonality",
    "orthogonality_rate",
    "orthogonality_rate_approx",
    "distinguishability",
    "distinguishability_converged",
    "distinguishability_rate_fd",
    "holevo_error",
    "finite_difference_rate",
    "metric_series",
    "ScanTable",
    "scan_over_teeth",
]

METRIC_NAMES = ("fidelity", "orthogonality", "distinguishability", "error_probability")


class InsufficientSamplesError(ValueError):
    """A rate estimate was requested from fewer than three samples."""


def _check_kind(kind: str) -> None:
    if kind not in CHANNEL_KINDS:
        raise ValueError(f"channel must be one of {CHANNEL_KINDS}, got {kind!r}")


def fidelity(
    params: CombParams,
    basis: int,
    channel: str,
    gamma_t: float,
    policy: GridPolicy | None = None,
    grid=None,
) -> float:
    """F(t) = 2*pi * integral of w(0) w(t) for one basis state."""
    _check_kind(channel)
    if grid is None:
        grid = auto_grid(params, gamma_t, policy)
    w0 = wigner_field(params, basis, grid)
    wt = evolved_wigner_field(params, basis, grid, NoiseChannel(channel, gamma_t))
    return wigner_overlap(w0, wt)


def fidelity_rate_exact(params: CombParams, channel: str) -> float:
    """Initial fidelity decay rate -dF/d(gamma t) at t = 0, exact variances.

    Damping: (Var q + Var p - 1)/2; diffusion: Var q + Var p.  The same
    for both basis states.
    """
    _check_kind(channel)
    var_q, var_p = quadrature_variances(params)
    if channel == "damping":
        return 0.5 * (var_q + var_p - 1.0)
    return var_q + var_p


def fidelity_rate_approx(params: CombParams, channel: str) -> float:
    """Leading-order decay rate for well-separated teeth.

    Damping: ((N^2-1) d^2 / 12 + cosh 2r - 1)/2; diffusion drops the -1
    and doubles the whole expression.
    """
    _check_kind(channel)
    n, d, r = params.teeth, params.spacing, params.squeeze
    spread = (n * n - 1.0) * d * d / 12.0
    if channel == "damping":
        return 0.5 * (spread + math.cosh(2.0 * r) - 1.0)
    return spread + math.cosh(2.0 * r)


def orthogonality(
    params: CombParams,
    channel: str,
    gamma_t: float,
    policy: GridPolicy | None = None,
    grid=None,
) -> float:
    """O(t) = 2*pi * integral of w_0(t) w_1(t) between the evolved basis states."""
    _check_kind(channel)
    if grid is None:
        grid = auto_grid(params, gamma_t, policy)
    ch = NoiseChannel(channel, gamma_t)
    w0 = evolved_wigner_field(params, 0, grid, ch)
    w1 = evolved_wigner_field(params, 1, grid, ch)
    return wigner_overlap(w0, w1)


def _comb_matrix_elements(params: CombParams, tol: float):
    """Cross matrix elements between the basis combs by 1D quadrature.

    Returns (c, mq, wd, m2) with c = <0|1>, mq = <0|x|1>,
    wd = integral psi_0 psi_1', and m2 = <0|x^2 + p^2|1>; all real for
    real wavefunctions, and <0|p|1> = -i * wd.
    """
    n, d, r = params.teeth, params.spacing, params.squeeze
    half = (n + 1) * d / 2.0 + d / 2.0 + 14.0 * max(math.exp(-r), 1.0)
    # initial partition fine enough that every tooth-pair peak is sampled
    cells = max(64, int(math.ceil(2.0 * half / min(math.exp(-r), 1.0))))

    def psi0(x):
        return wavefunction(params, 0, x)

    def psi1(x):
        return wavefunction(params, 1, x)

    c = integrate_1d(lambda x: psi0(x) * psi1(x), -half, half, tol, min_intervals=cells)
    mq = integrate_1d(lambda x: x * psi0(x) * psi1(x), -half, half, tol, min_intervals=cells)
    wd = integrate_1d(
        lambda x: psi0(x) * wavefunction_dx(params, 1, x), -half, half, tol, min_intervals=cells
    )
    # <0|p^2|1> = integral psi_0' psi_1' after integrating by parts
    m2 = integrate_1d(
        lambda x: x * x * psi0(x) * psi1(x)
        + wavefunction_dx(params, 0, x) * wavefunction_dx(params, 1, x),
        -half,
        half,
        tol,
        min_intervals=cells,
    )
    return c, mq, wd, m2


def orthogonality_rate(params: CombParams, channel: str, tolerances: ToleranceConfig | None = None) -> float:
    """Exact initial rate dO/d(gamma t) at t = 0 from comb matrix elements.

    Damping: <0|q|1>^2 - <0|p|1>^2 + <0|1>^2 - <0|1><0|q^2+p^2|1>;
    diffusion doubles the rate and drops the bare <0|1>^2 term.  Negative
    values mean the basis states initially become more orthogonal.
    """
    _check_kind(channel)
    tol = (tolerances or DEFAULT_TOLERANCES).quad_abs
    c, mq, wd, m2 = _comb_matrix_elements(params, min(tol, 1e-12))
    base = mq * mq + wd * wd - c * m2
    if channel == "damping":
        return base + c * c
    return 2.0 * base


def orthogonality_rate_approx(params: CombParams, channel: str) -> float:
    """Leading-order normalized rate -dO/d(gamma t)/O(0) at t = 0.

    Damping:
        cosh 2r - 1 + d^2 N(N-1)/12 - (d^2/4) e^{4r}(2N^2-2N+1)/(2(2N-1)^2);
    the diffusion channel doubles the rate after replacing the -1 by 0
    (its generator lacks the compensating drift term).  The expression
    keeps only tooth pairs separated by d/2.
    """
    _check_kind(channel)
    n, d, r = params.teeth, params.spacing, params.squeeze
    bracket = d * d * n * (n - 1.0) / 12.0 - d * d / 4.0 * math.exp(4.0 * r) * (
        2.0 * n * n - 2.0 * n + 1.0
    ) / (2.0 * (2.0 * n - 1.0) ** 2)
    if channel == "damping":
        return math.cosh(2.0 * r) - 1.0 + bracket
    return 2.0 * (math.cosh(2.0 * r) + bracket)


def _trace_norm(matrix: np.ndarray, eig_rel: float) -> float:
    vals = symmetric_eigenvalues(matrix)
    if vals.size == 0:
        return 0.0
    cutoff = eig_rel * float(np.max(np.abs(vals)))
    kept = vals[np.abs(vals) >= cutoff]
    return float(np.sum(np.abs(kept)))


def distinguishability(
    params: CombParams,
    channel: str,
    gamma_t: float,
    coherent: bool = True,
    policy: GridPolicy | None = None,
    grid=None,
    refine: int = 0,
    tolerances: ToleranceConfig | None = None,
) -> float:
    """Trace distance D(t) = 1/2 tr |rho_0(t) - rho_1(t)|.

    Builds both position density kernels (coherent combs or incoherent
    tooth mixtures), diagonalizes h * (K_0 - K_1) and sums the absolute
    eigenvalues, dropping those below the noise cutoff.
    """
    _check_kind(channel)
    tolrc = tolerances or DEFAULT_TOLERANCES
    if grid is None:
        grid = auto_position_grid(params, gamma_t, policy)
    if refine:
        grid = grid.refined(refine)
    if coherent:
        ch = NoiseChannel(channel, gamma_t)
        k0 = density_kernel(params, 0, ch, grid)
        k1 = density_kernel(params, 1, ch, grid)
    else:
        k0 = incoherent_kernel(params, 0, gamma_t, channel, grid)
        k1 = incoherent_kernel(params, 1, gamma_t, channel, grid)
    diff = grid.h * (k0.matrix - k1.matrix)
    return 0.5 * _trace_norm(diff, tolrc.eig_rel)


def distinguishability_converged(
    params: CombParams,
    channel: str,
    gamma_t: float,
    coherent: bool = True,
    policy: GridPolicy | None = None,
    rel_tol: float | None = None,
    max_doublings: int = 3,
    tolerances: ToleranceConfig | None = None,
):
    """Grid-doubled trace distance; returns (value, error estimate)."""
    tolrc = tolerances or DEFAULT_TOLERANCES
    base = auto_position_grid(params, gamma_t, policy)

    def compute(k: int) -> float:
        return distinguishability(
            params, channel, gamma_t, coherent=coherent, grid=base, refine=k, tolerances=tolrc
        )

    return convergence_double(compute, rel_tol or tolrc.conv_rel, max_doublings)


def holevo_error(d: float) -> float:
    """Minimum two-state discrimination error (1 - D)/2 for trace distance D."""
    if not -1e-9 <= d <= 1.0 + 1e-9:
        raise ValueError(f"trace distance must lie in [0, 1], got {d!r}")
    return 0.5 * (1.0 - min(max(d, 0.0), 1.0))


def finite_difference_rate(series: "MetricSeries") -> float:
    """Initial slope of a sampled metric by a one-sided 3-point formula.

    Uses the first three samples (second-order accurate, spacing may be
    nonuniform); exact for linear series.
    """
    if len(series.times) < 3:
        raise InsufficientSamplesError("need at least 3 early-time samples")
    t0, t1, t2 = (float(t) for t in series.times[:3])
    f0, f1, f2 = (float(v) for v in series.values[:3])
    return (
        f0 * (2.0 * t0 - t1 - t2) / ((t0 - t1) * (t0 - t2))
        + f1 * (t0 - t2) / ((t1 - t0) * (t1 - t2))
        + f2 * (t0 - t1) / ((t2 - t0) * (t2 - t1))
    )


def distinguishability_rate_fd(
    params: CombParams,
    channel: str,
    coherent: bool = True,
    eps_t: float = 1e-3,
    policy: GridPolicy | None = None,
    refine: int = 0,
) -> float:
    """-dD/d(gamma t) at t = 0 by one-sided differences at {0, eps, 2 eps}.

    All three trace distances share a single kernel grid sized for the
    largest time so discretization bias cancels in the differences.
    """
    grid = auto_position_grid(params, 2.0 * eps_t, policy)
    d_vals = [
        distinguishability(params, channel, t, coherent=coherent, grid=grid, refine=refine)
        for t in (0.0, eps_t, 2.0 * eps_t)
    ]
    slope = (-3.0 * d_vals[0] + 4.0 * d_vals[1] - d_vals[2]) / (2.0 * eps_t)
    return -slope


@dataclass(frozen=True)
class MetricSeries:
    """Time-sampled metric values with full parameter provenance."""

    metric_name: str
    channel: str
    params: CombParams
    times: np.ndarray
    values: np.ndarray
    coherent: bool = True

    def __post_init__(self):
        if self.metric_name not in METRIC_NAMES:
            raise ValueError(f"unknown metric {self.metric_name!r}")
        _check_kind(self.channel)
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1D arrays of equal length")
        if times.size == 0 or times[0] != 0.0:
            raise ValueError("time samples must start at 0")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("time samples must be strictly ascending")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("gamma_t,value\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{t:.17g},{v:.17g}\n")

    def to_json(self, path) -> None:
        payload = {
            "metric": self.metric_name,
            "channel": self.channel,
            "coherent": self.coherent,
            "params": {
                "teeth": self.params.teeth,
                "spacing": self.params.spacing,
                "squeeze": self.params.squeeze,
            },
            "gamma_t": [float(t) for t in self.times],
            "values": [float(v) for v in self.values],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _worker_count(n_items: int) -> int:
    env = os.environ.get("SQCOMB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, min(n_items, os.cpu_count() or 1))


def _parallel_map(fn, items):
    workers = _worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def metric_series(
    params: CombParams,
    metric: str,
    channel: str,
    times,
    basis: int = 0,
    coherent: bool = True,
    policy: GridPolicy | None = None,
    tolerances: ToleranceConfig | None = None,
) -> MetricSeries:
    """Evaluate one metric on an ascending gamma-t sample list.

    All time points share a single grid sized for the latest time; points
    are independent and evaluated in parallel (thread count overridable
    via the SQCOMB_THREADS environment variable).
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}")
    _check_kind(channel)
    times = np.asarray(times, dtype=float)
    t_max = float(times[-1]) if times.size else 0.0

    if metric == "fidelity":
        grid = auto_grid(params, t_max, policy)
        w0 = wigner_field(params, basis, grid)

        def evaluate(t: float) -> float:
            wt = evolved_wigner_field(params, basis, grid, NoiseChannel(channel, t))
            return wigner_overlap(w0, wt)

    elif metric == "orthogonality":
        grid = auto_grid(params, t_max, policy)

        def evaluate(t: float) -> float:
            ch = NoiseChannel(channel, t)
            return wigner_overlap(
                evolved_wigner_field(params, 0, grid, ch),
                evolved_wigner_field(params, 1, grid, ch),
            )

    else:
        kgrid = auto_position_grid(params, t_max, policy)

        def evaluate(t: float) -> float:
            d = distinguishability(
                params, channel, t, coherent=coherent, grid=kgrid, tolerances=tolerances
            )
            return holevo_error(d) if metric == "error_probability" else d

    values = np.array(_parallel_map(evaluate, [float(t) for t in times]))
    return MetricSeries(
        metric_name=metric, channel=channel, params=params, times=times, values=values, coherent=coherent
    )


@dataclass(frozen=True)
class ScanTable:
    """Initial rate versus tooth number, with the matching scaling law.

    For fidelity the rate column holds -dF/d(gamma t); for orthogonality
    the normalized -dO/d(gamma t)/O(0); for distinguishability the
    finite-difference -dD/d(gamma t) (no closed-form scaling column).
    """

    metric: str
    channel: str
    spacing: float
    squeeze: float
    teeth: np.ndarray
    rate: np.ndarray
    scaling: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("teeth,rate,scaling\n")
            for n, rate, scal in zip(self.teeth, self.rate, self.scaling):
                fh.write(f"{int(n)},{rate:.17g},{scal:.17g}\n")


def scan_over_teeth(
    spacing: float,
    squeeze: float,
    channel: str,
    metric: str,
    teeth_values,
    policy: GridPolicy | None = None,
) -> ScanTable:
    """Tabulate initial decay rates against the tooth number N."""
    _check_kind(channel)
    if metric not in ("fidelity", "orthogonality", "distinguishability"):
        raise ValueError(f"no rate scan for metric {metric!r}")
    teeth = np.asarray(sorted(int(n) for n in teeth_values), dtype=int)
    if teeth.size == 0 or teeth[0] < 1:
        raise ValueError("tooth counts must be positive")

    def one(n: int) -> tuple[float, float]:
        params = CombParams(int(n), spacing, squeeze)
        if metric == "fidelity":
            return fidelity_rate_exact(params, channel), fidelity_rate_approx(params, channel)
        if metric == "orthogonality":
            from .comb import basis_overlap

            rate = -orthogonality_rate(params, channel) / basis_overlap(params) ** 2
            return rate, orthogonality_rate_approx(params, channel)
        return distinguishability_rate_fd(params, channel, policy=policy), math.nan

    pairs = _parallel_map(one, [int(n) for n in teeth])
    rate = np.array([p[0] for p in pairs])
    scaling = np.array([p[1] for p in pairs])
    return ScanTable(
        metric=metric, channel=channel, spacing=spacing, squeeze=squeeze,
        teeth=teeth, rate=rate, scaling=scaling,
    )
