"""Curvature of a graph y(x) and normal-velocity front laws.

All derivatives of y are spectral; the curvature derivatives use the
closed-form expressions in x rather than nested differentiation of the
curvature itself.  Everything here evaluates sample-wise on the field's
own grid; the dynamics module handles aliasing by refining first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import RealField, _require_same_grid, derivative

__all__ = [
    "CurvatureBundle",
    "curvature",
    "curvature_dx",
    "curvature_dxx",
    "curvature_ss",
    "curvature_bundle",
    "normal_velocity",
    "graph_velocity",
]

LAWS = ("full", "simplified")


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    """Curvature of a graph with its x- and arclength derivatives."""

    kappa: RealField
    kappa_x: RealField
    kappa_xx: RealField
    kappa_ss: RealField


def _graph_derivatives(y: RealField, up_to: int = 4) -> list[np.ndarray]:
    return [derivative(y, j).values for j in range(1, up_to + 1)]


def _kappa(y1, y2):
    return y2 / (1.0 + y1**2) ** 1.5


def _kappa_dx(y1, y2, y3):
    q = 1.0 + y1**2
    return y3 / q**1.5 - 3.0 * y1 * y2**2 / q**2.5


def _kappa_dxx(y1, y2, y3, y4):
    q = 1.0 + y1**2
    return (
        y4 / q**1.5
        - (3.0 * y2**3 + 9.0 * y1 * y2 * y3) / q**2.5
        + 15.0 * y1**2 * y2**3 / q**3.5
    )


def _kappa_ss(y1, y2, k_x, k_xx):
    q = 1.0 + y1**2
    return k_xx / q - y1 * y2 * k_x / q**2


def curvature(y: RealField) -> RealField:
    """kappa = y_xx / (1 + y_x^2)^(3/2)."""
    y1, y2 = _graph_derivatives(y, 2)
    return RealField(y.grid, _kappa(y1, y2))


def curvature_dx(y: RealField) -> RealField:
    """Closed-form d(kappa)/dx of a graph."""
    y1, y2, y3 = _graph_derivatives(y, 3)
    return RealField(y.grid, _kappa_dx(y1, y2, y3))


def curvature_dxx(y: RealField) -> RealField:
    """Closed-form d^2(kappa)/dx^2 of a graph."""
    y1, y2, y3, y4 = _graph_derivatives(y, 4)
    return RealField(y.grid, _kappa_dxx(y1, y2, y3, y4))


def curvature_ss(y: RealField) -> RealField:
    """Second arclength derivative of curvature.

    Uses the coordinate-change identity
    kappa_ss = kappa_xx/(1+y_x^2) - y_x y_xx kappa_x/(1+y_x^2)^2.
    """
    y1, y2, y3, y4 = _graph_derivatives(y, 4)
    k_x = _kappa_dx(y1, y2, y3)
    k_xx = _kappa_dxx(y1, y2, y3, y4)
    return RealField(y.grid, _kappa_ss(y1, y2, k_x, k_xx))


def curvature_bundle(y: RealField) -> CurvatureBundle:
    """Curvature and its derivatives, sharing one set of spectral derivatives."""
    y1, y2, y3, y4 = _graph_derivatives(y, 4)
    k_x = _kappa_dx(y1, y2, y3)
    k_xx = _kappa_dxx(y1, y2, y3, y4)
    grid = y.grid
    return CurvatureBundle(
        kappa=RealField(grid, _kappa(y1, y2)),
        kappa_x=RealField(grid, k_x),
        kappa_xx=RealField(grid, k_xx),
        kappa_ss=RealField(grid, _kappa_ss(y1, y2, k_x, k_xx)),
    )


def normal_velocity(y: RealField, alpha: float, law: str = "full") -> RealField:
    """Normal speed of the front prescribed by the curvature law.

    law="full":        1 + (a-1)k + (1 + a^2/2)k^2
                         + (2a + 5a^2 - a^3/3)k^3 + a^2(a+3)k_ss
    law="simplified":  1 + (a-1)k + 4 k_ss
    """
    if law not in LAWS:
        raise ValueError(f"law must be one of {LAWS}, got {law!r}")
    bundle = curvature_bundle(y)
    k = bundle.kappa.values
    k_ss = bundle.kappa_ss.values
    if law == "simplified":
        vn = 1.0 + (alpha - 1.0) * k + 4.0 * k_ss
    else:
        vn = (
            1.0
            + (alpha - 1.0) * k
            + (1.0 + 0.5 * alpha**2) * k**2
            + (2.0 * alpha + 5.0 * alpha**2 - alpha**3 / 3.0) * k**3
            + alpha**2 * (alpha + 3.0) * k_ss
        )
    return RealField(y.grid, vn)


def graph_velocity(y: RealField, v_n: RealField) -> RealField:
    """Vertical front speed y_t = -sqrt(1 + y_x^2) * V_n."""
    _require_same_grid(y, v_n)
    y1 = derivative(y, 1).values
    return RealField(y.grid, -np.sqrt(1.0 + y1**2) * v_n.values)
