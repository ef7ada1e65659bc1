"""Pseudospectral simulation of curvature-driven flame fronts.

The library implements the fully nonlinear graph-form front law, its
sharp-cutoff mollified regularization, the Kuramoto-Sivashinsky equation
in both scalings, and a slow-variable form whose small-parameter limit is
the rescaled KS equation, together with energy diagnostics and experiment
harnesses that measure the closeness of the nonlinear and weakly nonlinear
models.
"""

__version__ = "0.1.0"

from .analysis import (
    EnergyReport,
    GronwallParams,
    energy_report,
    existence_time,
    gn_check,
    gronwall_beta,
    gronwall_threshold,
)
from .dynamics import (
    ModelParams,
    RhsSplit,
    make_split,
    rhs_graph,
    rhs_ks,
    rhs_ks_rescaled,
    rhs_mollified,
    rhs_phi,
)
from .geometry import (
    CurvatureBundle,
    curvature,
    curvature_bundle,
    curvature_dx,
    curvature_dxx,
    curvature_ss,
    graph_velocity,
    normal_velocity,
)
from .spectral import (
    Grid,
    GridMismatchError,
    RealField,
    SpectralField,
    derivative,
    forward_transform,
    fractional_derivative,
    inverse_transform,
    l2_inner,
    mollify,
    pointwise_apply,
    refine,
    restrict,
    sobolev_norm,
)
from .stepping import (
    BlowUpError,
    StepperConfig,
    Stepper,
    TimeSeries,
    integrate,
    precompute_exponential_weights,
    step,
)
from .validation import (
    DeltaConvergenceResult,
    SweepResult,
    delta_convergence,
    dispersion_check,
    epsilon_sweep,
    phi_vs_ks,
)
