"""Stream function, separation length, mass-flux audit and isolines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .grid import GridSpec, VectorField


@dataclass
class IsolineSet:
    levels: list[float] = field(default_factory=list)
    polylines: list[list[np.ndarray]] = field(default_factory=list)

    def __len__(self):
        return len(self.levels)


def _column_integral(f: np.ndarray, dy: float) -> np.ndarray:
    # cumulative Simpson is exact for quadratic integrands such as the inflow parabola
    out = np.zeros_like(f)
    out[:, 1:] = cumulative_simpson(f, dx=dy, axis=1)
    return out


def stream_function(u: VectorField, w: VectorField, grid: GridSpec) -> np.ndarray:
    """``psi`` with ``d psi / dy = u_x - w_x`` and ``psi = 0`` on the lower wall."""
    integrand = grid.check_field(u.x, "u.x") - grid.check_field(w.x, "w.x")
    return _column_integral(integrand, grid.dy)


def mass_flux(u: VectorField, w: VectorField, grid: GridSpec, column: int) -> float:
    """Flow rate ``integral(u_x - w_x) dy`` through column ``i``; same quadrature as ``psi``."""
    if not 0 <= column < grid.nx:
        raise IndexError(f"column {column} outside 0..{grid.nx - 1}")
    integrand = (u.x[column] - w.x[column])[None, :]
    return float(_column_integral(integrand, grid.dy)[0, -1])


def mass_flux_error(u: VectorField, w: VectorField, grid: GridSpec, J: float) -> float:
    """``max_i |flux_i - J| / |J|`` over all columns."""
    psi_top = stream_function(u, w, grid)[:, -1]
    return float(np.max(np.abs(psi_top - J)) / abs(J))


def separation_length(psi: np.ndarray, grid: GridSpec) -> float:
    """Reattachment abscissa from the sign of ``psi`` on the first row above the wall.

    Returns the last negative-to-non-negative crossing, linearly
    interpolated, or 0 when the row has no negative values.
    """
    row = grid.check_field(psi, "psi")[:, 1]
    neg = row < 0
    if not neg.any():
        return 0.0
    last = int(np.flatnonzero(neg)[-1])
    if last == grid.nx - 1:
        return float(grid.length)
    a, b = row[last], row[last + 1]
    x0 = last * grid.dx
    return float(x0 + grid.dx * a / (a - b))


def negative_regions(psi: np.ndarray) -> int:
    """Number of separate runs of ``psi < 0`` on row ``j = 1``."""
    neg = np.asarray(psi)[:, 1] < 0
    return int(np.count_nonzero(neg[1:] & ~neg[:-1]) + int(neg[0]))


# marching squares: for each of the 16 corner sign cases, edge pairs to join.
# corners 0:(i,j) 1:(i+1,j) 2:(i+1,j+1) 3:(i,j+1); edges 0:bottom 1:right 2:top 3:left
_SEGMENTS = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    3: ((3, 1),), 12: ((3, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    6: ((0, 2),), 9: ((0, 2),),
    7: ((3, 2),), 8: ((3, 2),),
    5: ((3, 0), (1, 2)),
    10: ((0, 1), (2, 3)),
}


def _edge_point(f, x, y, i, j, edge, level):
    if edge == 0:
        a, b, pa, pb = f[i, j], f[i + 1, j], (x[i], y[j]), (x[i + 1], y[j])
    elif edge == 1:
        a, b, pa, pb = f[i + 1, j], f[i + 1, j + 1], (x[i + 1], y[j]), (x[i + 1], y[j + 1])
    elif edge == 2:
        a, b, pa, pb = f[i, j + 1], f[i + 1, j + 1], (x[i], y[j + 1]), (x[i + 1], y[j + 1])
    else:
        a, b, pa, pb = f[i, j], f[i, j + 1], (x[i], y[j]), (x[i], y[j + 1])
    s = (level - a) / (b - a)
    s = min(max(s, 0.0), 1.0)
    return (pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]))


def _chain(segments: list[tuple[tuple, tuple]]) -> list[np.ndarray]:
    """Join segments sharing endpoints into polylines."""
    def key(pt):
        return (round(pt[0], 12), round(pt[1], 12))

    ends: dict[tuple, list[int]] = {}
    for n, (a, b) in enumerate(segments):
        ends.setdefault(key(a), []).append(n)
        ends.setdefault(key(b), []).append(n)
    used = [False] * len(segments)
    chains = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for forward in (True, False):
            while True:
                tip = chain[-1] if forward else chain[0]
                nxt = None
                for n in ends.get(key(tip), ()):
                    if not used[n]:
                        nxt = n
                        break
                if nxt is None:
                    break
                used[nxt] = True
                p, q = segments[nxt]
                other = q if key(p) == key(tip) else p
                if forward:
                    chain.append(other)
                else:
                    chain.insert(0, other)
        chains.append(np.array(chain))
    return chains


def extract_isolines(psi: np.ndarray, levels, grid: GridSpec) -> IsolineSet:
    """Marching-squares contours of ``psi`` with linear edge interpolation."""
    f = grid.check_field(psi, "psi")
    x, y = grid.x, grid.y
    out = IsolineSet()
    for level in levels:
        level = float(level)
        if not np.isfinite(level):
            raise ValueError("isoline levels must be finite")
        above = f >= level
        code = (
            above[:-1, :-1].astype(int)
            | above[1:, :-1] << 1
            | above[1:, 1:] << 2
            | above[:-1, 1:] << 3
        )
        segments = []
        for i, j in zip(*np.nonzero((code != 0) & (code != 15))):
            c = int(code[i, j])
            pairs = _SEGMENTS[c]
            if c in (5, 10):
                centre = 0.25 * (f[i, j] + f[i + 1, j] + f[i + 1, j + 1] + f[i, j + 1])
                if centre >= level:
                    pairs = ((3, 2), (0, 1)) if c == 5 else ((0, 3), (1, 2))
            for e1, e2 in pairs:
                segments.append(
                    (_edge_point(f, x, y, i, j, e1, level), _edge_point(f, x, y, i, j, e2, level))
                )
        out.levels.append(level)
        out.polylines.append(_chain(segments))
    return out
