"""Boundary data for the step channel: inflow profile, inlet pressure
gradient, smoothing parameter and the velocity boundary sweep."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, VectorField
from .operators import convective_acceleration, ddx


def _check_h_ratio(h_ratio: float) -> None:
    # 0 is the straight channel used by the Poiseuille fixed-point case
    if not 0.0 <= h_ratio < 1.0:
        raise ValueError(f"h_ratio must lie in [0, 1), got {h_ratio}")


def inlet_gradient(re: float, h_ratio: float, J: float = 1.0, tau: float = 0.0) -> float:
    """Inlet ``dp/dx`` that carries mass flow rate ``J`` through the inflow gap.

    Accounts for the QHD flux correction ``-tau * dp/dx`` so that
    ``integral(u0 - w_x) dy == J``.
    """
    if re <= 0:
        raise ValueError(f"re must be positive, got {re}")
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    _check_h_ratio(h_ratio)
    gap = 1.0 - h_ratio
    return -12.0 * J / (re * gap**3) / (1.0 + 12.0 * tau / (re * gap**2))


def inflow_profile(y, re: float, h_ratio: float, gradient: float):
    """Poiseuille parabola ``u0(y) = (Re/2) g (1 - y)(h - y)`` on ``h <= y <= 1``."""
    _check_h_ratio(h_ratio)
    y_arr = np.asarray(y, dtype=float)
    tol = 1e-12
    if np.any(y_arr < h_ratio - tol) or np.any(y_arr > 1.0 + tol):
        raise ValueError(f"y must lie in the inflow gap [{h_ratio}, 1]")
    u0 = 0.5 * re * gradient * (1.0 - y_arr) * (h_ratio - y_arr)
    return float(u0) if np.ndim(u0) == 0 else u0


def flow_rate(re: float, h_ratio: float, gradient: float, tau: float) -> float:
    """Exact ``integral(u0 - w_x) dy`` over the gap for a given inlet gradient."""
    gap = 1.0 - h_ratio
    return -re / 12.0 * gap**3 * gradient - tau * gap * gradient


def compute_tau(gamma: float, Sc: float, Ma: float, Re_s: float, tau0: float) -> float:
    """Smoothing parameter ``(gamma / Sc) * (Ma / Re_s) + tau0``."""
    if Sc <= 0 or Re_s <= 0:
        raise ValueError("Sc and Re_s must be positive")
    if min(gamma, Ma, tau0) < 0:
        raise ValueError("gamma, Ma and tau0 must be non-negative")
    return gamma / Sc * Ma / Re_s + tau0


@dataclass(frozen=True)
class InflowSpec:
    """Inflow boundary data.

    ``gradient`` is the Neumann datum for pressure at the inflow and the
    slope of the Poiseuille profile; ``profile_gradient`` may differ from it
    when the pressure datum is overridden at fixed flow rate.
    """

    re: float
    h_ratio: float
    gradient: float
    J: float = 1.0
    profile_gradient: float | None = None

    def profile(self, y):
        g = self.gradient if self.profile_gradient is None else self.profile_gradient
        return inflow_profile(y, self.re, self.h_ratio, g)


def left_pressure_datum(grid: GridSpec, gradient: float) -> np.ndarray:
    """Per-row ``dp/dx`` prescribed on the left boundary column.

    The inflow rows and the upper-left corner carry the inlet gradient; the
    solid part and the step corner carry zero. In the straight channel the
    whole column is inflow.
    """
    g = np.zeros(grid.ny)
    js = grid.j_step
    g[js + 1 :] = gradient
    if js == 0:
        g[0] = gradient
    return g


def apply_velocity_bcs(u: VectorField, spec: InflowSpec, grid: GridSpec) -> VectorField:
    """Impose the velocity boundary conditions in place and return ``u``.

    Walls and the step corner get no-slip, inflow rows the Poiseuille
    profile, and the outlet column copies its left neighbour.
    """
    ux, uy = u.x, u.y
    js = grid.j_step
    # outlet first, so the wall rows below overwrite the outlet corners
    ux[-1, :] = ux[-2, :]
    uy[-1, :] = uy[-2, :]
    ux[0, :] = 0.0
    uy[0, :] = 0.0
    y_in = grid.y[js + 1 : -1]
    ux[0, js + 1 : -1] = spec.profile(y_in)
    ux[:, 0] = 0.0
    uy[:, 0] = 0.0
    ux[:, -1] = 0.0
    uy[:, -1] = 0.0
    return u


def boundary_convection(u: VectorField, grid: GridSpec) -> VectorField:
    """``(u . grad) u`` with streamwise derivatives dropped on the inflow and
    outlet columns (developed inflow, zero-gradient outflow).

    Wall values vanish with the velocity.
    """
    conv = convective_acceleration(u, grid)
    for i in (0, -1):
        # ddx on a single column differentiates along y
        conv.x[i] = u.y[i] * ddx(u.x[i], grid.dy)
        conv.y[i] = u.y[i] * ddx(u.y[i], grid.dy)
    return conv


def apply_w_bcs(
    w: VectorField, u: VectorField, p: np.ndarray, tau: float, spec: InflowSpec, grid: GridSpec
) -> VectorField:
    """Replace boundary values of ``w`` with their boundary-condition form, in place.

    At walls the velocity vanishes, so ``w = tau * grad p`` and its normal
    component is zero by the Neumann condition. At the inflow the profile is
    fully developed (``du/dx = 0``, ``u_y = 0``) so ``w_x = tau * dp/dx``
    with the prescribed datum. At the outlet ``du/dx = 0``.
    """
    if tau == 0:
        return w
    dx, dy = grid.dx, grid.dy
    wx, wy = w.x, w.y
    # 1-D derivatives along each boundary line (ddx differentiates axis 0)
    wx[:, 0] = tau * ddx(p[:, 0], dx)
    wy[:, 0] = 0.0
    wx[:, -1] = tau * ddx(p[:, -1], dx)
    wy[:, -1] = 0.0

    datum = left_pressure_datum(grid, spec.gradient)
    wx[0, 1:-1] = tau * datum[1:-1]
    # solid part of the left wall: no-slip and dp/dx = 0 leave only tau dp/dy
    wy[0, 1:-1] = tau * ddx(p[0], dy)[1:-1]
    wx[0, 0] = tau * datum[0]
    wx[0, -1] = tau * datum[-1]

    uy_out = u.y[-1, 1:-1]
    dpdx_out = (3.0 * p[-1] - 4.0 * p[-2] + p[-3])[1:-1] / (2.0 * dx)
    wx[-1, 1:-1] = tau * (uy_out * ddx(u.x[-1], dy)[1:-1] + dpdx_out)
    wy[-1, 1:-1] = tau * (uy_out * ddx(u.y[-1], dy)[1:-1] + ddx(p[-1], dy)[1:-1])
    return w
