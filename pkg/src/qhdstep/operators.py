"""Second-order central-difference operators for the plane QHD equations.

All first derivatives are 3-point central at interior nodes and 3-point
one-sided at boundary nodes.
Momentum right-hand sides are returned for interior nodes only; boundary
entries are zero and are owned by the boundary sweep.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, VectorField


def ddx(f: np.ndarray, dx: float) -> np.ndarray:
    """d/dx: central inside, 3-point one-sided on the end columns.

    The one-sided stencils difference against the end value first so a
    locally constant field gives exactly zero.
    """
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    out[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * dx)
    out[-1] = ((f[-3] - f[-1]) - 4.0 * (f[-2] - f[-1])) / (2.0 * dx)
    return out


def ddy(f: np.ndarray, dy: float) -> np.ndarray:
    f = np.ascontiguousarray(f)
    out = np.empty_like(f)
    # flat central difference; wraps across rows only at the end columns,
    # which are overwritten below
    flat, of = f.reshape(-1), out.reshape(-1)
    np.subtract(flat[2:], flat[:-2], out=of[1:-1])
    of[1:-1] *= 1.0 / (2.0 * dy)
    out[:, 0] = (4.0 * (f[:, 1] - f[:, 0]) - (f[:, 2] - f[:, 0])) / (2.0 * dy)
    out[:, -1] = ((f[:, -3] - f[:, -1]) - 4.0 * (f[:, -2] - f[:, -1])) / (2.0 * dy)
    return out


def d2x(f: np.ndarray, dx: float) -> np.ndarray:
    """Compact second difference in x; boundary columns left at zero."""
    out = np.zeros_like(f)
    out[1:-1, :] = (f[2:, :] - 2.0 * f[1:-1, :] + f[:-2, :]) / dx**2
    return out


def d2y(f: np.ndarray, dy: float) -> np.ndarray:
    f = np.ascontiguousarray(f)
    out = np.empty_like(f)
    flat, of = f.reshape(-1), out.reshape(-1)
    of[1:-1] = (flat[2:] - 2.0 * flat[1:-1] + flat[:-2]) * (1.0 / dy**2)
    out[:, 0] = 0.0
    out[:, -1] = 0.0
    return out


def _check_vector(grid: GridSpec, v: VectorField, name: str) -> VectorField:
    return VectorField(grid.check_field(v.x, name + ".x"), grid.check_field(v.y, name + ".y"))


def convective_acceleration(u: VectorField, grid: GridSpec) -> VectorField:
    """Advective form ``(u . grad) u``."""
    dux_dx, dux_dy = ddx(u.x, grid.dx), ddy(u.x, grid.dy)
    duy_dx, duy_dy = ddx(u.y, grid.dx), ddy(u.y, grid.dy)
    return VectorField(u.x * dux_dx + u.y * dux_dy, u.x * duy_dx + u.y * duy_dy)


def compute_w(u: VectorField, p: np.ndarray, tau: float, grid: GridSpec) -> VectorField:
    """QHD correction velocity ``w = tau * ((u . grad) u + grad p)``.

    Density is 1 in the scaled equations. For ``tau == 0`` the result is
    exactly zero.
    """
    u = _check_vector(grid, u, "u")
    p = grid.check_field(p, "p")
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    if tau == 0:
        return VectorField(grid.zeros(), grid.zeros())
    conv = convective_acceleration(u, grid)
    return VectorField(
        tau * (conv.x + ddx(p, grid.dx)),
        tau * (conv.y + ddy(p, grid.dy)),
    )


def _stress_rhs(u: VectorField, p: np.ndarray, w: VectorField | None, nu: float, grid: GridSpec) -> VectorField:
    """``div(T) - grad p`` with the symmetric momentum-flux tensor

    ``T = nu (grad u + grad u^T) - u (x) u + w (x) u + u (x) w``.

    Each component is differenced once: the interior central stencil is
    linear, so this equals the sum of the individual terms.
    """
    dx, dy = grid.dx, grid.dy
    ux, uy = u.x, u.y
    dux_dy = ddy(ux, dy)
    duy_dx = ddx(uy, dx)
    txx = -ux * ux - p
    tyy = -uy * uy - p
    txy = -ux * uy
    if w is not None:
        txx += 2.0 * ux * w.x
        tyy += 2.0 * uy * w.y
        txy += ux * w.y + uy * w.x
    # the viscous normal terms use the compact second difference
    rx = ddx(txx, dx) + ddy(txy + nu * duy_dx, dy) + 2.0 * nu * d2x(ux, dx) + nu * d2y(ux, dy)
    ry = ddx(txy + nu * dux_dy, dx) + ddy(tyy, dy) + nu * d2x(uy, dx) + 2.0 * nu * d2y(uy, dy)
    return VectorField(rx, ry)


def navier_stokes_rhs(u: VectorField, p: np.ndarray, nu: float, grid: GridSpec) -> VectorField:
    """Convection, pressure and viscous terms of the momentum balance."""
    return _stress_rhs(u, p, None, nu, grid)


def qhd_terms(u: VectorField, w: VectorField, grid: GridSpec) -> VectorField:
    """Divergence of ``w (x) u + u (x) w``: the five QHD cross terms per component."""
    dx, dy = grid.dx, grid.dy
    ux, uy, wx, wy = u.x, u.y, w.x, w.y
    rx = 2.0 * ddx(ux * wx, dx) + ddy(uy * wx, dy) + ddy(ux * wy, dy)
    ry = ddx(ux * wy, dx) + ddx(uy * wx, dx) + 2.0 * ddy(uy * wy, dy)
    return VectorField(rx, ry)


def _interior_only(f: np.ndarray) -> np.ndarray:
    f[0, :] = 0.0
    f[-1, :] = 0.0
    f[:, 0] = 0.0
    f[:, -1] = 0.0
    return f


def momentum_rhs(
    u: VectorField, p: np.ndarray, w: VectorField, nu: float, grid: GridSpec
) -> VectorField:
    """Time derivative of velocity from the conservative-form QHD momentum equations.

    Boundary entries of the result are zero.
    """
    u = _check_vector(grid, u, "u")
    w = _check_vector(grid, w, "w")
    p = grid.check_field(p, "p")
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    for name, a in (("u.x", u.x), ("u.y", u.y), ("p", p), ("w.x", w.x), ("w.y", w.y)):
        if not np.all(np.isfinite(a)):
            raise FloatingPointError(f"non-finite values in {name}")
    rhs = _stress_rhs(u, p, w, nu, grid)
    return VectorField(_interior_only(rhs.x), _interior_only(rhs.y))


def divergence(v: VectorField, grid: GridSpec) -> np.ndarray:
    v = _check_vector(grid, v, "v")
    return ddx(v.x, grid.dx) + ddy(v.y, grid.dy)


def dissipation(u: VectorField, w: VectorField, nu: float, tau: float, grid: GridSpec) -> np.ndarray:
    """Pointwise dissipation ``Pi:Pi / (2 nu) + |w|^2 / tau`` (density 1).

    ``Pi = nu * (grad u + grad u^T)`` is the Navier-Stokes stress.
    """
    if tau <= 0:
        raise ValueError("dissipation is undefined for tau <= 0")
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    u = _check_vector(grid, u, "u")
    w = _check_vector(grid, w, "w")
    sxx = 2.0 * ddx(u.x, grid.dx)
    syy = 2.0 * ddy(u.y, grid.dy)
    sxy = ddy(u.x, grid.dy) + ddx(u.y, grid.dx)
    # Pi = nu * s, so Pi:Pi / (2 nu) = nu * s:s / 2
    viscous = 0.5 * nu * (sxx**2 + syy**2 + 2.0 * sxy**2)
    return viscous + (w.x**2 + w.y**2) / tau
