"""Time integration of u_t = L u + N(u) with diagonal stiff L.

The workhorse is the fourth-order exponential scheme of Cox and Matthews
with the Kassam-Trefethen contour evaluation of the phi-function weights;
a first-order IMEX step and a fully explicit classical RK4 step serve as
independent cross-checks.  Steps are taken at fixed dt; snapshots are
recorded at a fixed multiple of dt.  Blow-up (non-finite samples or
samples beyond 1e12) is a reportable outcome: ``integrate`` returns the
partial series flagged with the time reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .analysis import EnergyReport, energy_report
from .dynamics import ModelParams, RhsSplit, make_split
from .spectral import Grid, RealField, _coefficients

__all__ = [
    "SCHEMES",
    "BlowUpError",
    "StepperConfig",
    "TimeSeries",
    "EtdrkWeights",
    "phi1",
    "precompute_exponential_weights",
    "Stepper",
    "step",
    "integrate",
]

SCHEMES = ("etdrk4", "imex1", "rk4_explicit")
BLOWUP_THRESHOLD = 1e12
CONTOUR_RADIUS_CUTOFF = 0.5
CONTOUR_POINTS = 32


class BlowUpError(RuntimeError):
    """Solution left the finite range; carries the last healthy time."""

    def __init__(self, time: float, detail: str = ""):
        self.time = float(time)
        message = f"solution blew up at t = {time:.6g}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


@dataclass(frozen=True)
class StepperConfig:
    """Fixed-step integration plan.

    ``snapshot_every`` and ``t_end`` are rounded at construction to integer
    multiples of ``dt`` (and of the snapshot interval, respectively); the
    stored values are the rounded ones.
    """

    dt: float
    scheme: str = "etdrk4"
    t_end: float = 1.0
    snapshot_every: float | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        snap = self.snapshot_every
        if snap is None:
            snap = self.t_end / 100.0
        if not self.dt <= snap <= self.t_end + 1e-12:
            raise ValueError(
                f"need dt <= snapshot_every <= t_end, got dt={self.dt}, "
                f"snapshot_every={snap}, t_end={self.t_end}"
            )
        steps = max(1, round(snap / self.dt))
        snap = steps * self.dt
        n_snapshots = max(1, round(self.t_end / snap))
        object.__setattr__(self, "snapshot_every", snap)
        object.__setattr__(self, "t_end", n_snapshots * snap)

    @property
    def steps_per_snapshot(self) -> int:
        return round(self.snapshot_every / self.dt)

    @property
    def n_snapshots(self) -> int:
        return round(self.t_end / self.snapshot_every)


@dataclass
class TimeSeries:
    """Snapshots of one integration with per-snapshot diagnostics."""

    times: list[float] = field(default_factory=list)
    snapshots: list[RealField] = field(default_factory=list)
    diagnostics: list[EnergyReport] = field(default_factory=list)
    blowup_time: float | None = None

    @property
    def completed(self) -> bool:
        return self.blowup_time is None

    @property
    def final(self) -> RealField:
        return self.snapshots[-1]


def _phi_exprs(z: np.ndarray) -> tuple[np.ndarray, ...]:
    """The four ETDRK4 weight kernels evaluated at complex z (no safeguards)."""
    ez = np.exp(z)
    z2, z3 = z**2, z**3
    q = (np.exp(z / 2.0) - 1.0) / z
    f1 = (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3
    f2 = (2.0 + z + ez * (z - 2.0)) / z3
    f3 = (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3
    return q, f1, f2, f3


def _stable_weights(z: np.ndarray) -> tuple[np.ndarray, ...]:
    """Evaluate the weight kernels, averaging over a unit contour near 0
    where the direct formulas cancel catastrophically."""
    z = np.asarray(z, dtype=np.float64)
    out = [np.empty_like(z) for _ in range(4)]
    near = np.abs(z) < CONTOUR_RADIUS_CUTOFF
    far = ~near
    if np.any(far):
        direct = _phi_exprs(z[far].astype(np.complex128))
        for target, vals in zip(out, direct):
            target[far] = vals.real
    if np.any(near):
        angles = np.exp(1j * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS)
        ring = z[near, None] + angles[None, :]
        averaged = _phi_exprs(ring)
        for target, vals in zip(out, averaged):
            target[near] = vals.mean(axis=1).real
    return tuple(out)


def phi1(z: np.ndarray | float) -> np.ndarray | float:
    """(exp(z) - 1)/z evaluated stably (contour average near zero)."""
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    out = np.empty_like(z)
    near = np.abs(z) < CONTOUR_RADIUS_CUTOFF
    if np.any(~near):
        zz = z[~near]
        out[~near] = (np.exp(zz) - 1.0) / zz
    if np.any(near):
        angles = np.exp(1j * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS)
        ring = z[near, None] + angles[None, :]
        out[near] = ((np.exp(ring) - 1.0) / ring).mean(axis=1).real
    return out if out.size > 1 else float(out[0])


@dataclass(frozen=True, eq=False)
class EtdrkWeights:
    """Per-mode exponential integrator tables for a fixed (L, dt)."""

    dt: float
    exp_full: np.ndarray
    exp_half: np.ndarray
    q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray


def precompute_exponential_weights(linear: np.ndarray, dt: float) -> EtdrkWeights:
    """Weight tables for the exponential scheme; stable for all |L dt|."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    z = np.asarray(linear, dtype=np.float64) * dt
    q, f1, f2, f3 = _stable_weights(z)
    return EtdrkWeights(
        dt=dt,
        exp_full=np.exp(z),
        exp_half=np.exp(z / 2.0),
        q=dt * q,
        f1=dt * f1,
        f2=dt * f2,
        f3=dt * f3,
    )


class Stepper:
    """One-step integrator bound to a grid, a splitting, and a step size.

    Internally the state is the normalized coefficient array; the nonlinear
    callback sees real fields.  Every materialization of the state checks
    for blow-up.
    """

    def __init__(self, grid: Grid, split: RhsSplit, cfg: StepperConfig):
        self.grid = grid
        self.split = split
        self.cfg = cfg
        self.linear = np.asarray(split.linear_symbol(grid.k), dtype=np.float64)
        if self.linear.shape != grid.k.shape:
            raise ValueError("linear symbol must return one multiplier per mode")
        if cfg.scheme == "etdrk4":
            self.weights = precompute_exponential_weights(self.linear, cfg.dt)

    def _materialize(self, coeffs: np.ndarray, t: float) -> RealField:
        values = np.fft.ifft(coeffs * self.grid.N).real
        if not np.all(np.isfinite(values)) or np.abs(values).max() > BLOWUP_THRESHOLD:
            raise BlowUpError(t)
        fld = RealField(self.grid, values)
        cache = np.asarray(coeffs, dtype=np.complex128).copy()
        cache[self.grid.nyquist] = cache[self.grid.nyquist].real
        cache.setflags(write=False)
        object.__setattr__(fld, "_spectrum", cache)
        return fld

    def _nonlinear(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        try:
            out = self.split.nonlinear(self._materialize(coeffs, t))
        except ValueError as exc:
            # non-finite values surfacing inside the right-hand side are a
            # blow-up of the run, not a usage error
            raise BlowUpError(t, str(exc)) from exc
        return _coefficients(out)

    def to_coefficients(self, u: RealField) -> np.ndarray:
        return _coefficients(u)

    def advance(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        if self.cfg.scheme == "etdrk4":
            return self._advance_etdrk4(coeffs, t)
        if self.cfg.scheme == "imex1":
            return self._advance_imex1(coeffs, t)
        return self._advance_rk4(coeffs, t)

    def _advance_etdrk4(self, v: np.ndarray, t: float) -> np.ndarray:
        w = self.weights
        nv = self._nonlinear(v, t)
        a = w.exp_half * v + w.q * nv
        na = self._nonlinear(a, t)
        b = w.exp_half * v + w.q * na
        nb = self._nonlinear(b, t)
        c = w.exp_half * a + w.q * (2.0 * nb - nv)
        nc = self._nonlinear(c, t)
        return w.exp_full * v + w.f1 * nv + 2.0 * w.f2 * (na + nb) + w.f3 * nc

    def _advance_imex1(self, v: np.ndarray, t: float) -> np.ndarray:
        dt = self.cfg.dt
        return (v + dt * self._nonlinear(v, t)) / (1.0 - dt * self.linear)

    def _advance_rk4(self, v: np.ndarray, t: float) -> np.ndarray:
        dt = self.cfg.dt

        def rhs(c: np.ndarray) -> np.ndarray:
            return self.linear * c + self._nonlinear(c, t)

        k1 = rhs(v)
        k2 = rhs(v + 0.5 * dt * k1)
        k3 = rhs(v + 0.5 * dt * k2)
        k4 = rhs(v + dt * k3)
        return v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(u: RealField, split: RhsSplit, cfg: StepperConfig) -> RealField:
    """Advance a field by one step of the configured scheme."""
    stepper = Stepper(u.grid, split, cfg)
    coeffs = stepper.advance(stepper.to_coefficients(u), 0.0)
    return stepper._materialize(coeffs, cfg.dt)


def integrate(
    u0: RealField,
    params: ModelParams,
    cfg: StepperConfig,
    observers: Sequence[Callable[[float, RealField], None]] = (),
) -> TimeSeries:
    """Integrate the selected model, recording snapshots and diagnostics.

    On blow-up the partial series is returned with ``blowup_time`` set.
    """
    split = make_split(params)
    stepper = Stepper(u0.grid, split, cfg)
    series = TimeSeries()

    def record(t: float, fld: RealField) -> None:
        series.times.append(t)
        series.snapshots.append(fld)
        series.diagnostics.append(energy_report(fld, t))
        for obs in observers:
            obs(t, fld)

    record(0.0, u0)
    coeffs = stepper.to_coefficients(u0)
    steps_done = 0
    try:
        for _ in range(cfg.n_snapshots):
            for _ in range(cfg.steps_per_snapshot):
                coeffs = stepper.advance(coeffs, steps_done * cfg.dt)
                steps_done += 1
            t = steps_done * cfg.dt
            record(t, stepper._materialize(coeffs, t))
    except BlowUpError as blow:
        series.blowup_time = blow.time
        return series
    return series
