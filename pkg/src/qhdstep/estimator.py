"""Estimator-style facade: ``fit`` marches to steady state, ``predict``
samples the converged velocity at arbitrary points."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .config import Config
from .diagnostics import stream_function
from .timestepper import Simulation


class BackwardStepFlow(BaseEstimator):
    """Steady laminar flow over a backward-facing step.

    Constructor arguments mirror :class:`~qhdstep.config.Config` fields;
    ``tau0=None`` means ``0.5 / re``.
    """

    def __init__(
        self,
        re: float = 100.0,
        h_ratio: float = 0.5,
        length: float = 7.5,
        dx: float = 0.025,
        dt: float = 1e-4,
        tau0: float | None = None,
        conv_tol: float = 1e-3,
        t_max: float = 100.0,
        preconditioner: str = "fastpoisson",
    ):
        self.re = re
        self.h_ratio = h_ratio
        self.length = length
        self.dx = dx
        self.dt = dt
        self.tau0 = tau0
        self.conv_tol = conv_tol
        self.t_max = t_max
        self.preconditioner = preconditioner

    def to_config(self) -> Config:
        cfg = Config(**self.get_params())
        cfg.validate()
        return cfg

    def fit(self, X=None, y=None):
        """Run to steady state. ``X`` and ``y`` are ignored."""
        sim = Simulation(self.to_config())
        summary, state = sim.run()
        w = sim.w_field(state.u, state.p)
        self.grid_ = sim.grid
        self.u_ = state.u
        self.p_ = state.p
        self.w_ = w
        self.psi_ = stream_function(state.u, w, sim.grid)
        self.summary_ = summary
        self.converged_ = summary.converged
        self.n_steps_ = summary.n_steps
        self.separation_length_ = summary.separation_length
        self._interp = [
            RegularGridInterpolator((sim.grid.x, sim.grid.y), f) for f in (state.u.x, state.u.y)
        ]
        return self

    def predict(self, X) -> np.ndarray:
        """Velocity ``(u_x, u_y)`` at points ``X`` of shape ``(n, 2)`` by bilinear interpolation."""
        check_is_fitted(self, "u_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected points of shape (n, 2), got {X.shape}")
        return np.column_stack([f(X) for f in self._interp])
