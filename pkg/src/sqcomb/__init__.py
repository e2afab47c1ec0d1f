"""Squeezed comb states: phase-space simulation, noise channels, code errors.

A comb is a finite uniform superposition of equally spaced squeezed
Gaussian wave packets along the position quadrature; two combs offset by
half a spacing encode a logical qubit.  The package provides

* closed-form Wigner functions and quadrature marginals (`phasespace`),
* analytic evolution under amplitude damping and Gaussian diffusion,
  both for Wigner functions and position density kernels (`evolution`),
* fidelity, orthogonality and trace-distance distinguishability with
  their initial decay rates and scaling laws (`metrics`),
* an independent truncated Fock-basis oracle that re-derives everything
  by direct master-equation integration (`fock`),
* shared numeric services (`numerics`) and a CLI (`sqcomb`) that emits
  CSV data, plot scripts and run manifests.
"""

from .comb import (
    CombParams,
    CombScalars,
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
from .evolution import (
    DensityKernel,
    EvolvedWidths,
    GridCoverageError,
    NoiseChannel,
    density_kernel,
    density_kernel_damping,
    density_kernel_diffusion,
    evolved_widths,
    evolved_wigner_damping,
    evolved_wigner_diffusion,
    evolved_wigner_field,
    incoherent_kernel,
)
from .metrics import (
    MetricSeries,
    ScanTable,
    distinguishability,
    distinguishability_converged,
    distinguishability_rate_fd,
    fidelity,
    fidelity_rate_approx,
    fidelity_rate_exact,
    finite_difference_rate,
    holevo_error,
    metric_series,
    orthogonality,
    orthogonality_rate,
    orthogonality_rate_approx,
    scan_over_teeth,
)
from .numerics import (
    ConvergenceError,
    ToleranceConfig,
    convergence_double,
    integrate_1d,
    symmetric_eigenvalues,
)
from .phasespace import (
    GridCapError,
    GridMismatchError,
    GridPolicy,
    PhaseGrid,
    PositionGrid,
    WignerField,
    auto_grid,
    auto_position_grid,
    momentum_marginal,
    position_marginal,
    position_marginal_approx,
    wigner_at,
    wigner_field,
    wigner_overlap,
)
from .fock import (
    FockState,
    OracleMetrics,
    StepInstabilityError,
    TruncationError,
    build_comb,
    fock_wigner,
    integrate_master,
    oracle_metrics,
)

__version__ = "0.1.0"
