"""Experiments that measure the asymptotic-closeness claims numerically.

``phi_vs_ks`` integrates the slow-variable graph law and the rescaled KS
equation from the same data and measures their largest L2 separation up to
a horizon.  ``epsilon_sweep`` repeats that over a decreasing sequence of
epsilon values and fits the log-log slope of the error; the graph-frame
error is reconstructed with the exact change-of-variables factor
epsilon^(3/4), so that an O(epsilon) slow-variable error corresponds to an
O(epsilon^(7/4)) bound in the original frame.  ``delta_convergence``
measures the Cauchy behavior of the mollified-model trajectories as the
cutoff is removed, and ``dispersion_check`` verifies linear growth rates
against k^2 - 4 k^4.

Runs within a sweep are independent; they execute on a thread pool capped
by the FLAMEFRONT_THREADS environment variable and results are aggregated
in parameter order, so sweeps are deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import ModelParams
from .spectral import (
    Grid,
    RealField,
    _coefficients,
    field_from_modes,
    mollify,
    sobolev_norm,
)
from .stepping import StepperConfig, TimeSeries, integrate

__all__ = [
    "SweepResult",
    "DeltaConvergenceResult",
    "DispersionResult",
    "phi_vs_ks",
    "epsilon_sweep",
    "delta_convergence",
    "dispersion_check",
    "fit_loglog_slope",
    "rescale_argument",
    "default_sweep_data",
]


def sweep_workers(n_runs: int) -> int:
    env = os.environ.get("FLAMEFRONT_THREADS", "")
    if env.strip():
        return max(1, min(int(env), n_runs))
    return max(1, min(4, os.cpu_count() or 1, n_runs))


def _run_parallel(jobs):
    workers = sweep_workers(len(jobs))
    if workers == 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Ordinary least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    if lx.size < 2:
        raise ValueError("need at least two points to fit a slope")
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass(frozen=True)
class SweepResult:
    """Errors and fitted convergence slope of an epsilon sweep."""

    eps_values: tuple[float, ...]
    sup_errors: tuple[float, ...]
    y_space_errors: tuple[float, ...]
    fitted_slope: float
    tau_star: float
    dropped: tuple[tuple[float, float], ...] = ()


class PairedRunsBlowUp(RuntimeError):
    """One of the paired integrations blew up before the horizon."""

    def __init__(self, which: str, time: float):
        self.which = which
        self.time = float(time)
        super().__init__(f"{which} run blew up at t = {time:.6g}")


def _l2_difference(a: RealField, b: RealField) -> float:
    return sobolev_norm(RealField(a.grid, a.values - b.values), 0)


def phi_vs_ks(
    u0: RealField, eps: float, tau_star: float, cfg: StepperConfig
) -> float:
    """Largest L2 separation, over snapshots up to tau_star, between the
    slow-variable graph law (alpha = 1 + eps) and the rescaled KS equation
    started from the same data."""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    horizon = StepperConfig(
        dt=cfg.dt,
        scheme=cfg.scheme,
        t_end=tau_star,
        snapshot_every=cfg.snapshot_every,
    )
    slow = integrate(u0, ModelParams(model="phi", epsilon=eps), horizon)
    if not slow.completed:
        raise PairedRunsBlowUp("slow-variable", slow.blowup_time)
    reference = integrate(u0, ModelParams(model="ks_rescaled"), horizon)
    if not reference.completed:
        raise PairedRunsBlowUp("rescaled KS", reference.blowup_time)
    return max(
        _l2_difference(a, b) for a, b in zip(slow.snapshots, reference.snapshots)
    )


def epsilon_sweep(
    u0: RealField,
    eps_values: Sequence[float],
    tau_star: float,
    cfg: StepperConfig,
) -> SweepResult:
    """Run ``phi_vs_ks`` per epsilon and fit the log-log error slope.

    Epsilon values must be strictly decreasing.  Runs that blow up before
    the horizon are dropped and reported; at least three surviving values
    are required for a slope.
    """
    eps_values = tuple(float(e) for e in eps_values)
    if len(eps_values) < 3:
        raise ValueError("need >= 3 epsilon values")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("epsilon values must be strictly decreasing")

    def job(eps: float):
        def run():
            try:
                return phi_vs_ks(u0, eps, tau_star, cfg)
            except PairedRunsBlowUp as blow:
                return blow

        return run

    outcomes = _run_parallel([job(e) for e in eps_values])
    survivors: list[tuple[float, float]] = []
    dropped: list[tuple[float, float]] = []
    for eps, outcome in zip(eps_values, outcomes):
        if isinstance(outcome, PairedRunsBlowUp):
            dropped.append((eps, outcome.time))
        else:
            survivors.append((eps, outcome))
    if len(survivors) < 3:
        raise RuntimeError(
            f"only {len(survivors)} epsilon runs survived to tau_star; need >= 3"
        )
    eps_kept = tuple(e for e, _ in survivors)
    sups = tuple(err for _, err in survivors)
    return SweepResult(
        eps_values=eps_kept,
        sup_errors=sups,
        y_space_errors=tuple(e**0.75 * s for e, s in zip(eps_kept, sups)),
        fitted_slope=fit_loglog_slope(eps_kept, sups),
        tau_star=float(tau_star),
        dropped=tuple(dropped),
    )


@dataclass(frozen=True)
class DeltaConvergenceResult:
    """Successive H4 differences of mollified-model runs as delta shrinks."""

    delta_values: tuple[float, ...]
    h4_differences: tuple[float, ...]
    dropped: tuple[tuple[float, float], ...] = ()


def delta_convergence(
    y0: RealField,
    alpha: float,
    delta_values: Sequence[float],
    t_end: float,
    cfg: StepperConfig,
) -> DeltaConvergenceResult:
    """Integrate the mollified graph law per delta (with mollified data,
    matching the regularized problem) and measure successive H4 gaps of
    the final states."""
    delta_values = tuple(float(d) for d in delta_values)
    if len(delta_values) < 2:
        raise ValueError("need >= 2 delta values")
    if any(b >= a for a, b in zip(delta_values, delta_values[1:])):
        raise ValueError("delta values must be strictly decreasing")
    horizon = StepperConfig(
        dt=cfg.dt, scheme=cfg.scheme, t_end=t_end, snapshot_every=t_end
    )

    def job(delta: float):
        def run() -> TimeSeries:
            params = ModelParams(model="graph_mollified", alpha=alpha, delta=delta)
            return integrate(mollify(y0, delta), params, horizon)

        return run

    runs = _run_parallel([job(d) for d in delta_values])
    finals: list[tuple[float, RealField]] = []
    dropped: list[tuple[float, float]] = []
    for delta, series in zip(delta_values, runs):
        if series.completed:
            finals.append((delta, series.final))
        else:
            dropped.append((delta, series.blowup_time))
    diffs = tuple(
        sobolev_norm(RealField(a.grid, a.values - b.values), 4)
        for (_, a), (_, b) in zip(finals, finals[1:])
    )
    return DeltaConvergenceResult(
        delta_values=tuple(d for d, _ in finals),
        h4_differences=diffs,
        dropped=tuple(dropped),
    )


class DispersionResult(NamedTuple):
    wavenumber: float
    measured_rate: float
    analytic_rate: float


def dispersion_check(
    domain_length: float,
    mode: int,
    amplitude: float,
    cfg: StepperConfig,
    n_points: int = 256,
) -> DispersionResult:
    """Measure the early-time growth rate of a single small mode of the
    rescaled KS equation and compare with k^2 - 4 k^4."""
    if not 0 < amplitude <= 1e-6:
        raise ValueError("amplitude must be positive and at most 1e-6")
    grid = Grid(domain_length, n_points)
    k = 2.0 * np.pi * mode / domain_length
    analytic = k**2 - 4.0 * k**4
    if abs(analytic) < 1e-6:
        raise ValueError(
            f"mode {mode} has |growth rate| {abs(analytic):.2e} < 1e-6; unmeasurable"
        )
    u0 = field_from_modes(grid, [(mode, amplitude, 0.0)])
    series = integrate(u0, ModelParams(model="ks_rescaled"), cfg)
    if not series.completed:
        raise PairedRunsBlowUp("dispersion", series.blowup_time)
    amplitudes = [
        np.abs(_coefficients(snap)[mode]) for snap in series.snapshots
    ]
    times = np.asarray(series.times)
    measured = float(np.polyfit(times, np.log(amplitudes), 1)[0])
    return DispersionResult(
        wavenumber=k, measured_rate=measured, analytic_rate=analytic
    )


def rescale_argument(f: RealField, a: float) -> RealField:
    """The field x -> f(a x), represented exactly on the grid of length L/a.

    Mode p of f at wavenumber 2*pi*p/L becomes mode p of the result at
    wavenumber 2*pi*p/(L/a), so the coefficients carry over verbatim and
    ||f(a .)||_{L2} = a^(-1/2) ||f||_{L2} holds exactly.
    """
    if not a > 0:
        raise ValueError("rescaling factor must be positive")
    squeezed = Grid(f.grid.L / a, f.grid.N)
    values = np.fft.ifft(_coefficients(f) * squeezed.N).real
    return RealField(squeezed, values)


def default_sweep_data(grid: Grid) -> RealField:
    """The documented default data for sweeps: two linearly active modes of
    modest amplitude, 0.1 (sin(2 pi 4 x/L) + 0.5 sin(2 pi 6 x/L))."""
    return field_from_modes(grid, [(4, 0.1, 0.0), (6, 0.05, 0.0)])
