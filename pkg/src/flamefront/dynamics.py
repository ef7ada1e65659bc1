"""Right-hand sides of the front-evolution equations and their stiff splitting.

Five models are supported:

- ``ks``:              f_t = -1/2 f_x^2 - (alpha-1) f_xx - 4 f_xxxx
- ``ks_rescaled``:     the alpha = 2 form, U_t = -1/2 U_x^2 - U_xx - 4 U_xxxx
- ``graph``:           the fully nonlinear curvature law written for a graph
- ``graph_mollified``: the graph law with sharp Fourier mollification of
                       every derivative and of the assembled nonlinearity
- ``phi``:             the graph law in slow variables (x, t) ->
                       (sqrt(eps) x, eps^2 t) with alpha = 1 + eps, whose
                       eps -> 0 limit is ``ks_rescaled``

Every nonlinearity is evaluated on a 2x zero-padded grid and projected back,
which suppresses aliasing from the rational terms.  The splitting used by the
time steppers keeps only the constant-coefficient fourth-derivative part in
the linear symbol; the variable-coefficient remainder is bounded because the
denominators 1 + (y_x)^2 never drop below one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectral import (
    Grid,
    RealField,
    _coefficients,
    _to_values,
    derivative_symbol,
    field_from_coefficients,
    mollifier_mask,
    pad_coefficients,
    truncate_coefficients,
)

__all__ = [
    "MODELS",
    "ModelParams",
    "RhsSplit",
    "rhs_ks",
    "rhs_ks_rescaled",
    "rhs_graph",
    "rhs_mollified",
    "rhs_phi",
    "rhs_for",
    "make_split",
]

MODELS = ("ks", "ks_rescaled", "graph", "graph_mollified", "phi")
PAD_FACTOR = 2


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters selecting and configuring an evolution equation.

    ``alpha`` may be omitted for the ``phi`` model (defaults to 1 + epsilon)
    and for ``ks_rescaled`` (fixed at 2 by the scaling).
    """

    model: str
    alpha: float | None = None
    epsilon: float = 0.0
    delta: float | None = None
    law: str = "full"

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.model == "graph_mollified" and (
            self.delta is None or not self.delta > 0
        ):
            raise ValueError("graph_mollified requires a positive delta")
        if self.model == "phi" and self.epsilon < 0:
            raise ValueError("phi model requires epsilon >= 0")
        if self.law not in ("full", "simplified"):
            raise ValueError(f"law must be 'full' or 'simplified', got {self.law!r}")
        if self.alpha is None:
            if self.model == "phi":
                object.__setattr__(self, "alpha", 1.0 + self.epsilon)
            elif self.model == "ks_rescaled":
                object.__setattr__(self, "alpha", 2.0)
            else:
                raise ValueError(f"alpha is required for model {self.model!r}")


@dataclass(frozen=True)
class RhsSplit:
    """Splitting u_t = L u + N(u) with L diagonal in Fourier space.

    ``linear_symbol`` maps a wavenumber array to the real multiplier of L;
    ``nonlinear`` is the remainder, so applying both reconstructs the full
    right-hand side.
    """

    linear_symbol: Callable[[np.ndarray], np.ndarray]
    nonlinear: Callable[[RealField], RealField]


def _fine_derivatives(
    u: RealField, orders: tuple[int, ...], delta: float | None = None
) -> tuple[Grid, dict[int, np.ndarray]]:
    """Spectral derivatives of u (mollified first if delta is given),
    interpolated onto the 2x padded grid."""
    grid = u.grid
    c = _coefficients(u)
    if delta is not None:
        c = c * mollifier_mask(grid, delta)
    fine = grid.refined(PAD_FACTOR)
    arrays = {}
    for j in orders:
        cj = c if j == 0 else c * derivative_symbol(grid, j)
        arrays[j] = _to_values(fine, pad_coefficients(cj, PAD_FACTOR))
    return fine, arrays


def _project(
    grid: Grid, fine: Grid, values: np.ndarray, delta: float | None = None
) -> RealField:
    """Project fine-grid samples back onto the coarse resolved modes."""
    c = truncate_coefficients(np.fft.fft(values) / fine.N, grid.N)
    if delta is not None:
        c = c * mollifier_mask(grid, delta)
    return field_from_coefficients(grid, c)


def _ks_nonlinear(f: RealField) -> RealField:
    fine, d = _fine_derivatives(f, (1,))
    return _project(f.grid, fine, -0.5 * d[1] ** 2)


def rhs_ks(f: RealField, alpha: float) -> RealField:
    """Kuramoto-Sivashinsky tendency -1/2 f_x^2 - (alpha-1) f_xx - 4 f_xxxx."""
    k = f.grid.k
    linear = _to_values(f.grid, _coefficients(f) * ((alpha - 1.0) * k**2 - 4.0 * k**4))
    return RealField(f.grid, linear + _ks_nonlinear(f).values)


def rhs_ks_rescaled(u: RealField) -> RealField:
    """The rescaled KS equation; identical to ``rhs_ks`` with alpha = 2."""
    return rhs_ks(u, 2.0)


def _graph_assembly(arrays: dict[int, np.ndarray], alpha: float) -> np.ndarray:
    y1, y2, y3, y4 = arrays[1], arrays[2], arrays[3], arrays[4]
    q = 1.0 + y1**2
    c4 = alpha**2 * (alpha + 3.0)
    kappa = y2 / q**1.5
    kappa_x = y3 / q**1.5 - 3.0 * y1 * y2**2 / q**2.5
    kappa_xx = (
        y4 / q**1.5
        - (3.0 * y2**3 + 9.0 * y1 * y2 * y3) / q**2.5
        + 15.0 * y1**2 * y2**3 / q**3.5
    )
    return (
        -(alpha - 1.0) * y2 / q
        - (1.0 + 0.5 * alpha**2) * y2**2 / q**2.5
        - (2.0 * alpha + 5.0 * alpha**2 - alpha**3 / 3.0) * y2**3 / q**4
        - c4 * kappa_xx / np.sqrt(q)
        - np.sqrt(q)
        + c4 * y1 * kappa * kappa_x
    )


def _simplified_graph_assembly(arrays: dict[int, np.ndarray], alpha: float) -> np.ndarray:
    y1, y2, y3, y4 = arrays[1], arrays[2], arrays[3], arrays[4]
    q = 1.0 + y1**2
    kappa = y2 / q**1.5
    kappa_x = y3 / q**1.5 - 3.0 * y1 * y2**2 / q**2.5
    kappa_xx = (
        y4 / q**1.5
        - (3.0 * y2**3 + 9.0 * y1 * y2 * y3) / q**2.5
        + 15.0 * y1**2 * y2**3 / q**3.5
    )
    kappa_ss = kappa_xx / q - y1 * y2 * kappa_x / q**2
    v_n = 1.0 + (alpha - 1.0) * kappa + 4.0 * kappa_ss
    return -np.sqrt(q) * v_n


def rhs_graph(y: RealField, alpha: float, law: str = "full") -> RealField:
    """Tendency of the graph-form curvature law."""
    fine, arrays = _fine_derivatives(y, (1, 2, 3, 4))
    if law == "simplified":
        assembled = _simplified_graph_assembly(arrays, alpha)
    elif law == "full":
        assembled = _graph_assembly(arrays, alpha)
    else:
        raise ValueError(f"law must be 'full' or 'simplified', got {law!r}")
    return _project(y.grid, fine, assembled)


def rhs_mollified(y: RealField, alpha: float, delta: float) -> RealField:
    """Graph-law tendency with the sharp mollifier applied to every
    derivative entering the nonlinearities and to the assembled result."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    fine, arrays = _fine_derivatives(y, (1, 2, 3, 4), delta=delta)
    return _project(y.grid, fine, _graph_assembly(arrays, alpha), delta=delta)


def rhs_phi(phi: RealField, alpha: float, epsilon: float) -> RealField:
    """Tendency of the slow-variable form of the graph law.

    At epsilon = 0, alpha = 1 this reduces exactly to ``rhs_ks_rescaled``.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    fine, d = _fine_derivatives(phi, (1, 2, 3, 4))
    p1, p2, p3, p4 = d[1], d[2], d[3], d[4]
    e3 = epsilon**3
    c4 = alpha**2 * (alpha + 3.0)
    q = 1.0 + e3 * p1**2
    assembled = (
        -c4 * p4 / q**2
        - p2 / q
        - p1**2 / (1.0 + np.sqrt(q))
        + 10.0 * c4 * e3 * p1 * p2 * p3 / q**3
        + 3.0 * c4 * e3 * p2**3 / q**3
        - 18.0 * c4 * e3**2 * p2**3 * p1**2 / q**4
        - (1.0 + 0.5 * alpha**2) * epsilon * p2**2 / q**2.5
        - (2.0 * alpha + 5.0 * alpha**2 - alpha**3 / 3.0) * e3 * p2**3 / q**4
    )
    return _project(phi.grid, fine, assembled)


def rhs_for(params: ModelParams) -> Callable[[RealField], RealField]:
    """The monolithic right-hand side selected by the model parameters."""
    alpha = params.alpha
    if params.model == "ks":
        return lambda u: rhs_ks(u, alpha)
    if params.model == "ks_rescaled":
        return rhs_ks_rescaled
    if params.model == "graph":
        return lambda u: rhs_graph(u, alpha, params.law)
    if params.model == "graph_mollified":
        return lambda u: rhs_mollified(u, alpha, params.delta)
    if params.model == "phi":
        return lambda u: rhs_phi(u, alpha, params.epsilon)
    raise ValueError(f"unknown model {params.model!r}")


def make_split(params: ModelParams) -> RhsSplit:
    """Split the selected model into a diagonal stiff part and a remainder.

    For the KS forms the nonlinearity is the advective term alone; for the
    graph and slow-variable models the linear symbol is the constant-
    coefficient fourth-derivative term and the remainder is everything else.
    """
    alpha = params.alpha
    if params.model == "ks":

        def symbol(k: np.ndarray) -> np.ndarray:
            return (alpha - 1.0) * k**2 - 4.0 * k**4

        return RhsSplit(linear_symbol=symbol, nonlinear=_ks_nonlinear)

    if params.model == "ks_rescaled":

        def symbol(k: np.ndarray) -> np.ndarray:
            return k**2 - 4.0 * k**4

        return RhsSplit(linear_symbol=symbol, nonlinear=_ks_nonlinear)

    c4 = alpha**2 * (alpha + 3.0)
    if params.model == "graph_mollified":
        delta = params.delta

        def symbol(k: np.ndarray) -> np.ndarray:
            return np.where(np.abs(k) <= 1.0 / delta, -c4 * k**4, 0.0)

    else:

        def symbol(k: np.ndarray) -> np.ndarray:
            return -c4 * k**4

    full_rhs = rhs_for(params)

    def remainder(u: RealField) -> RealField:
        linear = _to_values(u.grid, _coefficients(u) * symbol(u.grid.k))
        return RealField(u.grid, full_rhs(u).values - linear)

    return RhsSplit(linear_symbol=symbol, nonlinear=remainder)
