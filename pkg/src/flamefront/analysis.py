"""Monitored energy quantities and closed-form a-priori bound evaluators.

The energy report tracks the Sobolev norms and weighted dissipation
integrals that control local existence for the graph model; the remaining
functions evaluate the explicit pieces of the two Gronwall-type lemmas:
the guaranteed-existence time, the blow-up horizon of the power-law
integral inequality, and the threshold pair (tau0, E_star) of the
exponential bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .spectral import (
    RealField,
    _require_same_grid,
    derivative,
    fractional_derivative,
    l2_inner,
    sobolev_norm,
)

__all__ = [
    "EnergyReport",
    "GronwallParams",
    "GnCheckResult",
    "energy_report",
    "existence_time",
    "gronwall_beta",
    "gronwall_threshold",
    "gn_check",
]

DIAGNOSTIC_COLUMNS = ("t", "l2", "h4", "h5", "energy_I", "wdiss2", "wdiss6", "wdiss7")


@dataclass(frozen=True)
class EnergyReport:
    """Norms and weighted dissipation integrals of a field at one time.

    ``energy_I`` is ||u||_{L2}^2 + ||d^4 u||_{L2}^2; ``wdiss{s}`` is
    integral (d^s u)^2 / (1 + w_x^2)^2 dx with w the denominator field.
    """

    t: float
    l2: float
    h4: float
    h5: float
    energy_I: float
    wdiss2: float
    wdiss6: float
    wdiss7: float

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in DIAGNOSTIC_COLUMNS)


def energy_report(
    u: RealField, t: float = 0.0, denominator_field: RealField | None = None
) -> EnergyReport:
    """Compute the monitored quantities with spectral derivatives and
    periodic-trapezoid quadrature.

    The denominator field defaults to ``u``; mollified runs pass the
    mollified state (which equals the state itself when the trajectory is
    band-limited by construction).
    """
    w = u if denominator_field is None else denominator_field
    _require_same_grid(u, w)
    d4 = derivative(u, 4)
    weight = 1.0 / (1.0 + derivative(w, 1).values ** 2) ** 2
    h = u.grid.h

    def wdiss(order: int) -> float:
        du = derivative(u, order).values
        return float(h * np.sum(du**2 * weight))

    l2 = sobolev_norm(u, 0)
    return EnergyReport(
        t=float(t),
        l2=l2,
        h4=sobolev_norm(u, 4),
        h5=sobolev_norm(u, 5),
        energy_I=l2**2 + l2_inner(d4, d4),
        wdiss2=wdiss(2),
        wdiss6=wdiss(6),
        wdiss7=wdiss(7),
    )


def existence_time(h4_norm_y0: float, gamma: float, m: float) -> float:
    """Guaranteed-existence horizon ln(1 + gamma/||y0||^(m-2)) / gamma.

    Requires m > 2; the horizon grows without bound as the initial norm
    shrinks and decreases as it grows.
    """
    if m <= 2:
        raise ValueError(f"power m must exceed 2, got {m}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if h4_norm_y0 < 0:
        raise ValueError("initial norm must be nonnegative")
    if h4_norm_y0 == 0:
        return float("inf")
    return float(np.log1p(gamma / h4_norm_y0 ** (m - 2.0)) / gamma)


def gronwall_beta(
    a: Callable[[float], float],
    b: Callable[[float], float],
    k: Callable[[float], float],
    n: int,
    interval: tuple[float, float],
    quad_points: int = 10_000,
    bisect_tol: float = 1e-10,
) -> float:
    """Horizon sup{ t : (n-1) * integral_alpha^t k b a^(n-1) ds < 1 }.

    The cumulative integral is a composite trapezoid on ``quad_points``
    panels; the crossing is then refined by bisection.  Returns the right
    endpoint when the integral never reaches one.
    """
    if n < 2:
        raise ValueError(f"power n must be at least 2, got {n}")
    lo, hi = interval
    if not hi > lo:
        raise ValueError("interval must have positive length")
    ts = np.linspace(lo, hi, quad_points + 1)
    integrand = np.array([(n - 1) * k(t) * b(t) * a(t) ** (n - 1) for t in ts])
    if np.any(integrand < 0):
        raise ValueError("integrand must be nonnegative")
    dt = ts[1] - ts[0]
    cumulative = np.concatenate(
        ([0.0], np.cumsum(0.5 * dt * (integrand[1:] + integrand[:-1])))
    )
    if cumulative[-1] < 1.0:
        return float(hi)

    def total(t: float) -> float:
        idx = min(int((t - lo) / dt), quad_points - 1)
        f_t = (n - 1) * k(t) * b(t) * a(t) ** (n - 1)
        partial = 0.5 * (t - ts[idx]) * (integrand[idx] + f_t)
        return float(cumulative[idx] + partial)

    left, right = lo, hi
    while right - left > bisect_tol:
        mid = 0.5 * (left + right)
        if total(mid) < 1.0:
            left = mid
        else:
            right = mid
    return 0.5 * (left + right)


@dataclass(frozen=True)
class GronwallParams:
    """Coefficients of dE/dt <= alpha E + beta E^2 + eps^n E^m plus the
    target bound gamma_star, horizon t_star, and initial value e0."""

    alpha: float
    beta: float
    eps: float
    n: int
    m: float
    gamma_star: float
    t_star: float
    e0: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "eps", "e0"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not self.gamma_star > 0 or not self.t_star > 0:
            raise ValueError("gamma_star and t_star must be positive")


class GronwallThreshold(NamedTuple):
    tau0: float
    e_star: float


def gronwall_threshold(p: GronwallParams) -> GronwallThreshold:
    """First time the exponential envelope can reach gamma_star, and the
    initial size that makes that time exactly t_star.

    tau0   = ln(gamma_star/e0) / r       with r = alpha + beta*gamma_star
                                              + eps^n * gamma_star^(m-1)
    e_star = gamma_star * exp(-r * t_star), the solution of
             tau0(gamma_star, e_star, eps) = t_star.
    """
    if p.e0 >= p.gamma_star:
        raise ValueError("e0 must be strictly below gamma_star")
    if not p.e0 > 0:
        raise ValueError("e0 must be positive")
    rate = p.alpha + p.beta * p.gamma_star + p.eps**p.n * p.gamma_star ** (p.m - 1.0)
    if not rate > 0:
        raise ValueError("growth rate must be positive")
    tau0 = float(np.log(p.gamma_star / p.e0) / rate)
    e_star = float(p.gamma_star * np.exp(-rate * p.t_star))
    return GronwallThreshold(tau0=tau0, e_star=e_star)


class GnCheckResult(NamedTuple):
    passed: bool
    ratio: float


def gn_check(
    f: RealField, s: float, s1: float, s2: float, theta: float, c: float = 1.0
) -> GnCheckResult:
    """Check the L2-scale interpolation inequality
    ||D^s f|| <= c * ||D^s1 f||^theta * ||D^s2 f||^(1-theta)
    for s = theta*s1 + (1-theta)*s2, reporting the measured ratio.

    With c = 1 this is Hoelder on the Fourier side and holds for every field.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if abs(s - (theta * s1 + (1.0 - theta) * s2)) > 1e-9:
        raise ValueError("exponents must satisfy s = theta*s1 + (1-theta)*s2")
    if not c > 0:
        raise ValueError("constant must be positive")

    def seminorm(order: float) -> float:
        return sobolev_norm(fractional_derivative(f, order), 0)

    lhs = seminorm(s)
    bound = seminorm(s1) ** theta * seminorm(s2) ** (1.0 - theta)
    if bound == 0.0:
        return GnCheckResult(passed=lhs <= 1e-14, ratio=0.0)
    ratio = lhs / bound
    return GnCheckResult(passed=ratio <= c * (1.0 + 1e-12), ratio=float(ratio))
