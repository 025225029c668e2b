"""Pressure Poisson equation on the colocated grid.

Boundary conditions: ``dp/dn = 0`` on the walls and the solid part of the
left boundary, ``dp/dx = g`` on the inflow rows, ``p = 0`` on the outlet
column. Neumann rows use a mirrored ghost node; after scaling boundary rows
by 1/2 (corners by 1/4) and dropping the outlet column, the negated system
matrix is symmetric positive definite and is solved by preconditioned
conjugate gradients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.fft import dct, idct

from .boundary import left_pressure_datum
from .grid import GridSpec, VectorField
from .operators import convective_acceleration, ddx, ddy, divergence

logger = logging.getLogger(__name__)

TAU_FLOOR = 1e-6


class PoissonConvergenceError(RuntimeError):
    def __init__(self, message: str, report: "SolveReport"):
        super().__init__(message)
        self.report = report


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool
    residual_history: list[float] = field(default_factory=list, repr=False)


@dataclass
class PoissonProblem:
    """Right-hand side plus boundary data for one pressure solve."""

    grid: GridSpec
    rhs: np.ndarray
    inlet_gradient: float = 0.0

    def __post_init__(self):
        self.rhs = self.grid.check_field(self.rhs, "rhs")
        if not np.all(np.isfinite(self.rhs)):
            raise FloatingPointError("non-finite Poisson right-hand side")

    @property
    def left_datum(self) -> np.ndarray:
        return left_pressure_datum(self.grid, self.inlet_gradient)


def assemble_rhs(u: VectorField, tau: float, grid: GridSpec, conv: VectorField | None = None) -> np.ndarray:
    """``div(u) / tau - div((u . grad) u)``.

    ``conv`` overrides the convective vector; the time stepper passes the
    boundary-condition form also used for ``w``.
    """
    if tau <= 0:
        raise ValueError("the pressure equation needs tau > 0")
    tau = max(tau, TAU_FLOOR)
    if conv is None:
        conv = convective_acceleration(u, grid)
    return divergence(u, grid) / tau - (ddx(conv.x, grid.dx) + ddy(conv.y, grid.dy))


def apply_operator(p: np.ndarray, problem: PoissonProblem) -> np.ndarray:
    """Discrete Laplacian with the boundary conditions eliminated, on the full grid.

    Non-Dirichlet rows hold the 5-point Laplacian with ghost values taken
    from the Neumann data (so the result is affine in ``p`` when the inlet
    datum is non-zero); outlet rows return ``p`` itself.
    """
    grid = problem.grid
    p = grid.check_field(p, "p")
    dx2, dy2 = grid.dx**2, grid.dy**2
    pe = np.empty((grid.nx + 2, grid.ny + 2))
    pe[1:-1, 1:-1] = p
    # mirrored ghosts: p[-1] = p[1] - 2 dx g on the left, p[j-1] = p[j+1] on walls
    pe[0, 1:-1] = p[1, :] - 2.0 * grid.dx * problem.left_datum
    pe[1:-1, 0] = pe[1:-1, 2]
    pe[1:-1, -1] = pe[1:-1, -3]
    pe[-1, 1:-1] = 0.0  # never read by a non-Dirichlet row
    lap = (pe[2:, 1:-1] - 2.0 * p + pe[:-2, 1:-1]) / dx2 + (
        pe[1:-1, 2:] - 2.0 * p + pe[1:-1, :-2]
    ) / dy2
    lap[-1, :] = p[-1, :]
    return lap


def row_weights(grid: GridSpec) -> np.ndarray:
    """Row scaling that symmetrizes the Neumann rows (unknowns only)."""
    wgt = np.ones((grid.nx - 1, grid.ny))
    wgt[0, :] *= 0.5
    wgt[:, 0] *= 0.5
    wgt[:, -1] *= 0.5
    return wgt


def assemble_matrix(grid: GridSpec) -> sp.csr_matrix:
    """SPD matrix ``-W L`` over the non-Dirichlet nodes, C-ordered ``(i, j)``."""
    nxu, ny = grid.nx - 1, grid.ny
    idx = np.arange(nxu * ny).reshape(nxu, ny)
    cx, cy = 1.0 / grid.dx**2, 1.0 / grid.dy**2
    wgt = row_weights(grid)
    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(np.broadcast_to(v, r.shape).ravel())

    diag = np.full((nxu, ny), 2.0 * cx + 2.0 * cy)
    add(idx, idx, wgt * diag)
    # x neighbours; the left ghost doubles the i=1 coefficient of row i=0
    east = np.full((nxu, ny), cx)
    east[0, :] = 2.0 * cx
    add(idx[:-1, :], idx[1:, :], -(wgt * east)[:-1, :])
    add(idx[1:, :], idx[:-1, :], -(wgt * cx)[1:, :])
    # y neighbours with mirrored wall ghosts
    north = np.full((nxu, ny), cy)
    north[:, 0] = 2.0 * cy
    south = np.full((nxu, ny), cy)
    south[:, -1] = 2.0 * cy
    add(idx[:, :-1], idx[:, 1:], -(wgt * north)[:, :-1])
    add(idx[:, 1:], idx[:, :-1], -(wgt * south)[:, 1:])
    n = nxu * ny
    a = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return a.tocsr()


def reduced_rhs(problem: PoissonProblem) -> np.ndarray:
    """Right-hand side of the SPD system, Neumann data folded in."""
    grid = problem.grid
    f = problem.rhs[:-1, :].copy()
    f[0, :] += 2.0 * problem.left_datum / grid.dx
    return -(row_weights(grid) * f).ravel()


def pcg(
    matvec,
    b: np.ndarray,
    x0: np.ndarray,
    precond,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, SolveReport]:
    """Preconditioned conjugate gradients on an SPD operator.

    Stops when ``||b - A x|| <= tol * ||b||``. The returned report holds the
    relative residual history, starting with the warm-start residual.
    """
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), SolveReport(0, 0.0, True, [0.0])
    x = x0.copy()
    r = b - matvec(x)
    res = np.linalg.norm(r) / bnorm
    history = [res]
    if res <= tol:
        return x, SolveReport(0, res, True, history)
    z = precond(r)
    d = z.copy()
    rz = r @ z
    for k in range(1, max_iter + 1):
        ad = matvec(d)
        alpha = rz / (d @ ad)
        x += alpha * d
        r -= alpha * ad
        res = np.linalg.norm(r) / bnorm
        history.append(res)
        if res <= tol:
            return x, SolveReport(k, res, True, history)
        z = precond(r)
        rz_new = r @ z
        d *= rz_new / rz
        d += z
        rz = rz_new
    return x, SolveReport(max_iter, res, False, history)


class FastLaplace:
    """Exact inverse of the unscaled Laplacian by separable cosine transforms.

    On the unknown block (outlet column removed) the x-operator with a
    mirrored left ghost and a zero right neighbour has eigenvectors
    ``cos(pi (2k+1) i / 2N)`` (a DCT-II basis); the y-operator with mirrored
    ghosts on both walls has the DCT-I basis ``cos(pi l j / (M-1))``.
    """

    def __init__(self, grid: GridSpec):
        n, m = grid.nx - 1, grid.ny
        lam_x = (2.0 * np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n)) - 2.0) / grid.dx**2
        lam_y = (2.0 * np.cos(np.pi * np.arange(m) / (m - 1)) - 2.0) / grid.dy**2
        self._inv_lam = 1.0 / (lam_x[:, None] + lam_y[None, :])
        self._end_weights = np.full(m, 2.0)
        self._end_weights[[0, -1]] = 1.0
        self.shape = (n, m)

    def solve(self, f: np.ndarray) -> np.ndarray:
        """Return ``v`` with ``L v = f`` on the ``(nx - 1, ny)`` unknown block."""
        c = 2.0 * idct(f, type=2, axis=0)
        c = self._end_weights * idct(c, type=1, axis=1)
        c *= self._inv_lam
        v = dct(c / self._end_weights, type=1, axis=1)
        return 0.5 * dct(v, type=2, axis=0)


def _incomplete_cholesky(a: sp.csr_matrix):
    """Zero-fill incomplete factorization ``(D + L) D^-1 (D + L^T)`` of an SPD matrix.

    The symmetric form of ILU(0): only the pivots change, so the preconditioner
    stays SPD as conjugate gradients requires.
    """
    a = a.tocsr()
    n = a.shape[0]
    lower = sp.tril(a, k=-1, format="csr")
    diag = a.diagonal().copy()
    indptr, indices, data = lower.indptr, lower.indices, lower.data
    for k in range(n):
        cols = indices[indptr[k] : indptr[k + 1]]
        vals = data[indptr[k] : indptr[k + 1]]
        diag[k] -= np.sum(vals * vals / diag[cols])
    lower_d = (lower + sp.diags(diag)).tocsr()
    upper_d = lower_d.T.tocsr()

    def apply(r):
        y = spla.spsolve_triangular(lower_d, r, lower=True)
        return spla.spsolve_triangular(upper_d, diag * y, lower=False)

    return apply


class PoissonSolver:
    """Reusable pressure solver for one grid.

    Args:
        grid: the mesh.
        preconditioner: ``"fastpoisson"`` (cosine-transform inverse of the
            constant-coefficient operator, converges in one or two
            iterations), ``"jacobi"`` or ``"ilu"`` (zero-fill incomplete Cholesky,
            the symmetric ILU(0)).
        tol: relative residual target.
        max_iter: iteration cap.
    """

    def __init__(self, grid: GridSpec, preconditioner: str = "fastpoisson", tol: float = 1e-8, max_iter: int = 5000):
        if tol <= 0:
            raise ValueError("tol must be positive")
        self.grid = grid
        self.tol = tol
        self.max_iter = max_iter
        self.matrix = assemble_matrix(grid)
        if preconditioner == "fastpoisson":
            fast = FastLaplace(grid)
            inv_w = 1.0 / row_weights(grid)
            # -W L z = r  <=>  L z = -r / W
            self._precond = lambda r: fast.solve(-(inv_w * r.reshape(fast.shape))).ravel()
        elif preconditioner == "jacobi":
            inv_diag = 1.0 / self.matrix.diagonal()
            self._precond = lambda r: inv_diag * r
        elif preconditioner == "ilu":
            self._precond = _incomplete_cholesky(self.matrix)
        else:
            raise ValueError(f"unknown preconditioner {preconditioner!r}")
        self.preconditioner = preconditioner

    def solve(self, problem: PoissonProblem, p0: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
        grid = self.grid
        if problem.grid != grid:
            raise ValueError("problem grid does not match solver grid")
        b = reduced_rhs(problem)
        x0 = np.zeros(b.shape) if p0 is None else grid.check_field(p0, "p0")[:-1, :].ravel()
        x, report = pcg(self.matrix.dot, b, x0, self._precond, self.tol, self.max_iter)
        p = grid.zeros()
        p[:-1, :] = x.reshape(grid.nx - 1, grid.ny)
        if not report.converged:
            raise PoissonConvergenceError(
                f"PCG did not reach tol={self.tol:g} in {self.max_iter} iterations "
                f"(residual {report.final_residual:.3e})",
                report,
            )
        return p, report


def pcg_solve(
    problem: PoissonProblem,
    p0: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 5000,
    preconditioner: str = "fastpoisson",
) -> tuple[np.ndarray, SolveReport]:
    """One-shot solve; builds the matrix each call. Prefer :class:`PoissonSolver` in loops."""
    return PoissonSolver(problem.grid, preconditioner, tol, max_iter).solve(problem, p0)
