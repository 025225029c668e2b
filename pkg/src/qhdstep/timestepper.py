"""Explicit time marching of the QHD system to a steady state.

One step:

1. apply velocity boundary conditions;
2. ``w`` from the current velocity and pressure;
3. forward-Euler momentum update at interior nodes;
4. re-apply velocity boundary conditions;
5. solve the pressure equation from the new velocity (warm start);
6. advance time and step counter.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .boundary import InflowSpec, apply_velocity_bcs, apply_w_bcs, boundary_convection
from .config import Config
from .diagnostics import mass_flux_error, negative_regions, separation_length, stream_function
from .grid import GridSpec, VectorField
from .operators import compute_w, momentum_rhs
from .poisson import PoissonConvergenceError, PoissonProblem, PoissonSolver, SolveReport, assemble_rhs

logger = logging.getLogger(__name__)


class BlowUpError(FloatingPointError):
    """Non-finite values appeared in the solution."""

    def __init__(self, message: str, n: int):
        super().__init__(message)
        self.n = n


@dataclass
class State:
    u: VectorField
    p: np.ndarray
    t: float = 0.0
    n: int = 0

    def copy(self) -> "State":
        return State(self.u.copy(), self.p.copy(), self.t, self.n)


@dataclass
class StepInfo:
    """What observers see after each completed step."""

    state: State
    delta_p: float | None
    poisson: SolveReport


@dataclass
class RunSummary:
    converged: bool
    n_steps: int
    t: float
    final_delta_p: float
    separation_length: float
    separation_over_h: float
    mass_flux_error: float
    psi_top_inlet: float
    negative_regions: int
    wall_seconds: float
    blew_up: bool = False
    message: str = ""
    delta_p_history: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "delta_p_history"}
        return d


def delta_p(p_prev: np.ndarray, p_new: np.ndarray, dt: float) -> float:
    """``max |p_new - p_prev| / dt``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return float(np.max(np.abs(np.asarray(p_new) - np.asarray(p_prev)))) / dt


def inflow_spec(config: Config) -> InflowSpec:
    return InflowSpec(
        re=config.re,
        h_ratio=config.h_ratio,
        gradient=config.pressure_datum,
        J=config.J,
        profile_gradient=config.gradient,
    )


def init_state(config: Config, grid: GridSpec | None = None) -> State:
    """Fluid at rest with the inflow profile imposed and a uniform pressure gradient.

    ``p = g * (x - L)`` so the outlet sits at zero.
    """
    grid = grid or config.grid()
    u = VectorField(grid.zeros(), grid.zeros())
    apply_velocity_bcs(u, inflow_spec(config), grid)
    X, _ = grid.mesh()
    p = config.pressure_datum * (X - grid.length)
    return State(u, p)


class Simulation:
    """Holds the grid, boundary data and pressure solver for one configuration."""

    def __init__(self, config: Config):
        self.config = config
        self.grid = config.grid()
        self.spec = inflow_spec(config)
        self.tau = config.tau
        self.nu = config.nu
        self.poisson = PoissonSolver(
            self.grid, config.preconditioner, config.poisson_tol, config.poisson_max_iter
        )
        self.last_report: SolveReport | None = None

    def init_state(self) -> State:
        return init_state(self.config, self.grid)

    def w_field(self, u: VectorField, p: np.ndarray) -> VectorField:
        w = compute_w(u, p, self.tau, self.grid)
        return apply_w_bcs(w, u, p, self.tau, self.spec, self.grid)

    def solve_pressure(self, u: VectorField, p0: np.ndarray) -> np.ndarray:
        rhs = assemble_rhs(u, self.tau, self.grid, conv=boundary_convection(u, self.grid))
        problem = PoissonProblem(self.grid, rhs, self.spec.gradient)
        p, self.last_report = self.poisson.solve(problem, p0)
        return p

    def step(self, state: State) -> State:
        grid, dt = self.grid, self.config.dt
        u = apply_velocity_bcs(state.u.copy(), self.spec, grid)
        w = self.w_field(u, state.p)
        rhs = momentum_rhs(u, state.p, w, self.nu, grid)
        u_new = VectorField(u.x + dt * rhs.x, u.y + dt * rhs.y)
        if not (np.all(np.isfinite(u_new.x)) and np.all(np.isfinite(u_new.y))):
            raise BlowUpError(f"non-finite velocity at step {state.n + 1}", state.n + 1)
        apply_velocity_bcs(u_new, self.spec, grid)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                p_new = self.solve_pressure(u_new, state.p)
        except FloatingPointError as exc:
            raise BlowUpError(f"{exc} at step {state.n + 1}", state.n + 1) from exc
        except PoissonConvergenceError as exc:
            if np.isfinite(exc.report.final_residual):
                raise
            raise BlowUpError(f"pressure solve overflowed at step {state.n + 1}", state.n + 1) from exc
        return State(u_new, p_new, state.t + dt, state.n + 1)

    def advisory(self) -> dict:
        """CFL-style numbers at startup; reported, never enforced."""
        umax = float(np.max(np.abs(self.spec.profile(self.grid.y[self.grid.j_step:]))))
        h = min(self.grid.dx, self.grid.dy)
        return {
            "convective_courant": umax * self.config.dt / h,
            "viscous_number": self.nu * self.config.dt / h**2,
            "qhd_number": self.tau * umax**2 * self.config.dt / h**2,
        }

    def summarize(self, state: State, converged: bool, last_dp: float, wall: float, **extra) -> RunSummary:
        grid = self.grid
        w = self.w_field(state.u, state.p)
        psi = stream_function(state.u, w, grid)
        ls = separation_length(psi, grid)
        h = grid.step_ratio
        return RunSummary(
            converged=converged,
            n_steps=state.n,
            t=state.t,
            final_delta_p=last_dp,
            separation_length=ls,
            separation_over_h=ls / h if h > 0 else float("nan"),
            mass_flux_error=mass_flux_error(state.u, w, grid, self.config.J),
            psi_top_inlet=float(psi[0, -1]),
            negative_regions=negative_regions(psi),
            wall_seconds=wall,
            **extra,
        )

    def run(
        self,
        observers: Iterable[Callable[[StepInfo], None]] = (),
        state: State | None = None,
    ) -> tuple[RunSummary, State]:
        """March until ``delta_p < conv_tol`` or ``t >= t_max``.

        Returns the summary and the final state. A ``t_max`` exit is marked
        not converged; a blow-up is reported in the summary rather than raised.
        """
        cfg = self.config
        observers = list(observers)
        state = state or self.init_state()
        adv = self.advisory()
        logger.info(
            "grid %dx%d tau=%.4g dt=%.3g courant=%.3g viscous=%.3g",
            self.grid.nx, self.grid.ny, self.tau, cfg.dt,
            adv["convective_courant"], adv["viscous_number"],
        )
        if adv["convective_courant"] > 1.0 or adv["viscous_number"] > 0.25:
            logger.warning("time step is large for an explicit scheme: %s", adv)
        start = time.perf_counter()
        converged = False
        last_dp = math.inf
        history: list[tuple[int, float]] = []
        # float accumulation of t: compare against t_max with half-step slack
        while state.t < cfg.t_max - 0.5 * cfg.dt:
            check = (state.n + 1) % cfg.check_every == 0
            try:
                new = self.step(state)
            except BlowUpError as exc:
                logger.error("%s", exc)
                summary = self.summarize(
                    state, False, last_dp, time.perf_counter() - start,
                    blew_up=True, message=str(exc), delta_p_history=history,
                )
                return summary, state
            dp = delta_p(state.p, new.p, cfg.dt) if check else None
            state = new
            if dp is not None:
                last_dp = dp
                history.append((state.n, dp))
            info = StepInfo(state, dp, self.last_report)
            for obs in observers:
                obs(info)
            if state.n % cfg.log_every == 0:
                logger.debug("n=%d t=%.4f dp=%.3e cg=%d", state.n, state.t, last_dp,
                             self.last_report.iterations)
            if dp is not None and dp < cfg.conv_tol:
                converged = True
                break
        summary = self.summarize(
            state, converged, last_dp, time.perf_counter() - start, delta_p_history=history
        )
        return summary, state


def step(state: State, config: Config, simulation: Simulation | None = None) -> State:
    """Single step; pass a :class:`Simulation` to reuse its pressure solver."""
    return (simulation or Simulation(config)).step(state)


def run(config: Config, observers: Iterable[Callable[[StepInfo], None]] = ()) -> RunSummary:
    summary, _ = Simulation(config).run(observers)
    return summary
