"""Run artifacts: CSV field snapshots, residual log, JSON summary, SVG isolines."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .config import Config
from .diagnostics import extract_isolines, stream_function
from .grid import GridSpec, VectorField
from .timestepper import RunSummary, Simulation, State, StepInfo

SNAPSHOT_COLUMNS = ("x", "y", "u_x", "u_y", "p", "psi", "w_x", "w_y")


def _fmt(v: float) -> str:
    return repr(float(v))


def write_snapshot(path: Path, grid: GridSpec, u: VectorField, p: np.ndarray, w: VectorField, psi: np.ndarray) -> None:
    """One row per node, ordered by ``j`` then ``i``; 17 significant digits."""
    X, Y = grid.mesh()
    cols = [X, Y, u.x, u.y, p, psi, w.x, w.y]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SNAPSHOT_COLUMNS)
        for j in range(grid.ny):
            for i in range(grid.nx):
                writer.writerow([_fmt(c[i, j]) for c in cols])


def read_snapshot(path: Path, grid: GridSpec) -> dict[str, np.ndarray]:
    """Inverse of :func:`write_snapshot`: field name -> ``(nx, ny)`` array."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SNAPSHOT_COLUMNS:
            raise ValueError(f"unexpected snapshot header {header}")
        rows = np.array([[float(v) for v in row] for row in reader])
    if rows.shape[0] != grid.nx * grid.ny:
        raise ValueError("snapshot does not match grid size")
    return {name: rows[:, k].reshape(grid.ny, grid.nx).T.copy() for k, name in enumerate(header)}


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def summary_document(config: Config, summary: RunSummary) -> dict:
    doc = {
        "config": {k: _jsonable(v) for k, v in config.to_dict().items()},
        "derived": config.derived(),
    }
    doc.update({k: _jsonable(v) for k, v in summary.to_dict().items()})
    return doc


def write_summary(path: Path, config: Config, summary: RunSummary) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary_document(config, summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_from_summary(doc: dict) -> Config:
    from .config import from_dict

    data = dict(doc["config"])
    for k, v in data.items():
        if v in ("inf", "Infinity"):
            data[k] = math.inf
    return from_dict(data)


def render_svg_isolines(psi: np.ndarray, n_levels: int, grid: GridSpec, width: int = 900) -> str:
    """Equidistant stream-function isolines as a standalone SVG 1.1 document.

    Negative levels (recirculation) use a dashed red stroke. A constant
    field yields the outline only.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be at least 1")
    psi = grid.check_field(psi, "psi")
    scale = width / grid.length
    height = int(math.ceil(grid.height * scale))
    pad = 10

    def pt(x, y):
        return f"{pad + x * scale:.2f},{pad + (grid.height - y) * scale:.2f}"

    lo, hi = float(psi.min()), float(psi.max())
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width + 2 * pad}" '
        f'height="{height + 2 * pad}" viewBox="0 0 {width + 2 * pad} {height + 2 * pad}">',
        f"<title>{escape(f'stream function, {n_levels} levels')}</title>",
        f'<polygon id="outline" points="{pt(0, 0)} {pt(grid.length, 0)} {pt(grid.length, 1)} '
        f'{pt(0, 1)}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    if grid.step_ratio > 0:
        cx, cy = pt(0, grid.step_ratio).split(",")
        parts.append(f'<circle id="step-corner" cx="{cx}" cy="{cy}" r="3" fill="black"/>')
    if hi - lo > 1e-12 * max(1.0, abs(hi), abs(lo)):
        # levels strictly inside (lo, hi) so every one yields a contour
        levels = lo + (hi - lo) * (np.arange(1, n_levels + 1) / (n_levels + 1))
        iso = extract_isolines(psi, levels, grid)
        for level, chains in zip(iso.levels, iso.polylines):
            style = 'stroke="#c0392b" stroke-dasharray="4,2"' if level < 0 else 'stroke="#1f4e9c"'
            for chain in chains:
                pts = " ".join(pt(x, y) for x, y in chain)
                parts.append(
                    f'<polyline class="isoline" data-level="{level:.6g}" points="{pts}" '
                    f'fill="none" {style} stroke-width="1"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


class RunRecorder:
    """Observer that writes the residual log and periodic snapshots."""

    def __init__(self, out_dir: Path, simulation: Simulation, n_levels: int = 20):
        self.out_dir = Path(out_dir)
        self.sim = simulation
        self.n_levels = n_levels
        self.snapshots: list[Path] = []
        self._log = open(self.out_dir / "residuals.csv", "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._log)
        self._writer.writerow(["step", "t", "delta_p", "poisson_iters"])

    def __call__(self, info: StepInfo) -> None:
        st = info.state
        cfg = self.sim.config
        if info.delta_p is not None and (st.n % cfg.log_every == 0 or info.delta_p < cfg.conv_tol):
            self._writer.writerow([st.n, _fmt(st.t), _fmt(info.delta_p), info.poisson.iterations])
        if cfg.snapshot_every and st.n % cfg.snapshot_every == 0:
            self.snapshot(st)

    def snapshot(self, state: State) -> Path:
        grid = self.sim.grid
        w = self.sim.w_field(state.u, state.p)
        psi = stream_function(state.u, w, grid)
        stem = f"snapshot_{state.n:07d}"
        path = self.out_dir / f"{stem}.csv"
        write_snapshot(path, grid, state.u, state.p, w, psi)
        (self.out_dir / f"{stem}.svg").write_text(
            render_svg_isolines(psi, self.n_levels, grid), encoding="utf-8"
        )
        if path not in self.snapshots:
            self.snapshots.append(path)
        return path

    def close(self) -> None:
        self._log.close()
