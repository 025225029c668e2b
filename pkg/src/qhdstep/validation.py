"""Verification cases behind ``qhdstep validate``.

``poiseuille``: the exact channel solution is a discrete fixed point of the
whole step (w-terms included). ``manufactured``: observed convergence order
of the spatial operators and of the pressure solve on smooth fields.
"""

from __future__ import annotations

import numpy as np

from .boundary import inflow_profile
from .config import Config
from .grid import GridSpec, VectorField, build_grid
from .operators import compute_w, divergence, momentum_rhs
from .poisson import PoissonProblem, assemble_rhs, pcg_solve
from .timestepper import Simulation, State, delta_p

ORDER_BAND = (3.5, 4.5)


def poiseuille_config(**overrides) -> Config:
    """Straight channel (inflow across the whole left boundary)."""
    params = dict(re=100.0, h_ratio=0.0, length=2.0, dx=0.025, dt=1e-4, t_max=0.1)
    params.update(overrides)
    return Config(**params)


def poiseuille_state(sim: Simulation) -> State:
    """Exact steady state: parabolic ``u_x``, ``u_y = 0``, linear pressure."""
    grid, cfg = sim.grid, sim.config
    X, Y = grid.mesh()
    g = cfg.pressure_datum
    ux = inflow_profile(Y, cfg.re, 0.0, cfg.gradient)
    return State(VectorField(ux, np.zeros_like(ux)), g * (X - grid.length))


def run_poiseuille(n_steps: int = 1000, **overrides) -> dict:
    sim = Simulation(poiseuille_config(**overrides))
    state0 = poiseuille_state(sim)
    state = state0
    last_dp = 0.0
    for _ in range(n_steps):
        new = sim.step(state)
        last_dp = delta_p(state.p, new.p, sim.config.dt)
        state = new
    err = max(np.max(np.abs(state.u.x - state0.u.x)), np.max(np.abs(state.u.y)))
    return {
        "case": "poiseuille",
        "n_steps": n_steps,
        "max_velocity_error": float(err),
        "final_delta_p": float(last_dp),
        "passed": bool(err < 1e-3 and last_dp < 1e-4),
    }


def taylor_green(grid: GridSpec):
    """``u = (sin x cos y, -cos x sin y)``, ``p = 0`` with its exact Navier-Stokes terms."""
    X, Y = grid.mesh()
    u = VectorField(np.sin(X) * np.cos(Y), -np.cos(X) * np.sin(Y))
    return u, X, Y


def no_slip_field(X: np.ndarray, Y: np.ndarray):
    """Solenoidal field vanishing on the unit square boundary, with the exact
    pressure source ``-div((u . grad) u)``."""
    s1x, s1y = np.sin(np.pi * X), np.sin(np.pi * Y)
    s2x, s2y = np.sin(2 * np.pi * X), np.sin(2 * np.pi * Y)
    u = VectorField(s1x**2 * s2y, -s2x * s1y**2)
    pi2 = np.pi**2
    source = -(
        2 * pi2 * s2x**2 * s2y**2
        - 8 * pi2 * s1x**2 * s1y**2 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    )
    return u, source


def _interior(a: np.ndarray) -> np.ndarray:
    return a[1:-1, 1:-1]


def operator_errors(n_cells: int, nu: float = 0.05) -> dict[str, float]:
    grid = build_grid(1.0, 0.0, nx=n_cells + 1, ny=n_cells + 1)
    u, X, Y = taylor_green(grid)
    p = np.zeros_like(X)
    w = compute_w(u, p, 0.0, grid)
    rhs = momentum_rhs(u, p, w, nu, grid)
    exact_x = -0.5 * np.sin(2 * X) - 2 * nu * np.sin(X) * np.cos(Y)
    exact_y = -0.5 * np.sin(2 * Y) + 2 * nu * np.cos(X) * np.sin(Y)
    err_mom = max(
        np.max(np.abs(_interior(rhs.x - exact_x))), np.max(np.abs(_interior(rhs.y - exact_y)))
    )
    # non-solenoidal field for the divergence check
    v = VectorField(np.sin(X) * np.cos(Y), np.sin(X) * np.sin(Y))
    err_div = np.max(np.abs(divergence(v, grid) - (np.cos(X) * np.cos(Y) + np.sin(X) * np.cos(Y))))
    tau = 0.01
    q, exact_q = no_slip_field(X, Y)
    err_prhs = np.max(np.abs(_interior(assemble_rhs(q, tau, grid) - exact_q)))
    return {"momentum_rhs": float(err_mom), "divergence": float(err_div), "assemble_rhs": float(err_prhs)}


def poisson_error(n_cells: int, length: float = 2.0) -> float:
    """Solve with ``p* = cos(pi y) cos(pi x / 2L)`` (zero Neumann left, zero at the outlet)."""
    ny = n_cells + 1
    nx = int(round(length * n_cells)) + 1
    grid = build_grid(length, 0.5, nx=nx, ny=ny)
    X, Y = grid.mesh()
    k = np.pi / (2 * length)
    exact = np.cos(np.pi * Y) * np.cos(k * X)
    f = -(np.pi**2 + k**2) * exact
    p, _ = pcg_solve(PoissonProblem(grid, f, 0.0), tol=1e-12)
    return float(np.max(np.abs(p - exact)))


def run_manufactured(levels=(16, 32, 64)) -> dict:
    errors: dict[str, list[float]] = {}
    for n in levels:
        for key, val in operator_errors(n).items():
            errors.setdefault(key, []).append(val)
        errors.setdefault("poisson_solution", []).append(poisson_error(n))
    ratios = {k: [v[i] / v[i + 1] for i in range(len(v) - 1)] for k, v in errors.items()}
    lo, hi = ORDER_BAND
    passed = all(lo <= r <= hi for rs in ratios.values() for r in rs)
    return {
        "case": "manufactured",
        "levels": list(levels),
        "errors": errors,
        "ratios": ratios,
        "band": list(ORDER_BAND),
        "passed": bool(passed),
    }


CASES = {"poiseuille": run_poiseuille, "manufactured": run_manufactured}
