"""Uniform colocated grid over the backward-facing-step channel.

The channel occupies [0, L/H] x [0, 1] in dimensionless units. The step is
not meshed as an obstacle: it only splits the left boundary into a solid
part (0 < y < h/H) and the inflow part (h/H < y < 1).

Fields are plain ``numpy`` arrays of shape ``(nx, ny)`` indexed ``[i, j]``
with ``x = i * dx`` and ``y = j * dy``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

_GRID_TOL = 1e-9


class NodeClass(enum.IntEnum):
    INTERIOR = 0
    LOWER_WALL = 1
    UPPER_WALL = 2
    LEFT_SOLID_WALL = 3
    INLET = 4
    OUTLET = 5
    STEP_CORNER = 6


WALL_CLASSES = (
    NodeClass.LOWER_WALL,
    NodeClass.UPPER_WALL,
    NodeClass.LEFT_SOLID_WALL,
    NodeClass.STEP_CORNER,
)


class VectorField(NamedTuple):
    """Pair of node-centred components sharing one grid."""

    x: np.ndarray
    y: np.ndarray

    def copy(self) -> "VectorField":
        return VectorField(self.x.copy(), self.y.copy())


@dataclass(frozen=True)
class GridSpec:
    """Uniform node-centred grid with the step corner on a grid line.

    Attributes:
        nx, ny: node counts in x and y.
        dx, dy: node spacings.
        length: channel length L/H.
        step_ratio: step height h/H. ``0.0`` gives a straight channel whose
            inflow spans the whole left boundary.
        height: channel height, fixed to 1 by the scaling.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    length: float
    step_ratio: float
    height: float = 1.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 nodes, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0 and self.length > 0):
            raise ValueError("grid spacings and length must be strictly positive")
        if abs((self.nx - 1) * self.dx - self.length) > 1e-12 * max(1.0, self.length):
            raise ValueError("(nx - 1) * dx must equal length")
        if abs((self.ny - 1) * self.dy - self.height) > 1e-12:
            raise ValueError("(ny - 1) * dy must equal the channel height")
        if not 0.0 <= self.step_ratio < 1.0:
            raise ValueError(f"step_ratio must lie in [0, 1), got {self.step_ratio}")
        k = self.step_ratio / self.dy
        if abs(k - round(k)) > _GRID_TOL:
            raise ValueError(
                f"step_ratio={self.step_ratio} does not fall on a grid line (dy={self.dy})"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def j_step(self) -> int:
        """Row index of the step corner node (0, h/H)."""
        return int(round(self.step_ratio / self.dy))

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy

    @property
    def equal_spacing(self) -> bool:
        return abs(self.dx - self.dy) <= 1e-12

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def node_classes(self) -> np.ndarray:
        """Array of :class:`NodeClass` codes, one per node."""
        cls = np.full(self.shape, NodeClass.INTERIOR, dtype=np.int8)
        js = self.j_step
        cls[:, 0] = NodeClass.LOWER_WALL
        cls[:, -1] = NodeClass.UPPER_WALL
        cls[-1, 1:-1] = NodeClass.OUTLET
        cls[0, 1:js] = NodeClass.LEFT_SOLID_WALL
        cls[0, js + 1 : -1] = NodeClass.INLET
        cls[0, js] = NodeClass.STEP_CORNER
        return cls

    def check_field(self, a: np.ndarray, name: str = "field") -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != self.shape:
            raise ValueError(f"{name} has shape {a.shape}, grid expects {self.shape}")
        return a


def build_grid(
    length: float,
    step_ratio: float,
    dx: float | None = None,
    dy: float | None = None,
    nx: int | None = None,
    ny: int | None = None,
) -> GridSpec:
    """Create a grid from spacings or from explicit node counts.

    Spacings win when both are given for a direction. ``dy`` defaults to
    ``dx`` so that the default mesh has equal widths.
    """
    if length <= 0:
        raise ValueError(f"length must be positive, got {length}")
    if dx is None and nx is None:
        raise ValueError("either dx or nx is required")
    if dy is None and ny is None:
        dy = dx if dx is not None else length / (nx - 1)
    if dx is not None:
        if dx <= 0:
            raise ValueError(f"dx must be positive, got {dx}")
        cells = length / dx
        if abs(cells - round(cells)) > _GRID_TOL * max(1.0, cells):
            raise ValueError(f"length={length} is not a multiple of dx={dx}")
        nx = int(round(cells)) + 1
    if dy is not None:
        if dy <= 0:
            raise ValueError(f"dy must be positive, got {dy}")
        cells = 1.0 / dy
        if abs(cells - round(cells)) > _GRID_TOL * max(1.0, cells):
            raise ValueError(f"channel height 1 is not a multiple of dy={dy}")
        ny = int(round(cells)) + 1
    return GridSpec(
        nx=int(nx),
        ny=int(ny),
        dx=length / (nx - 1),
        dy=1.0 / (ny - 1),
        length=float(length),
        step_ratio=float(step_ratio),
    )


def classify(grid: GridSpec, i: int, j: int) -> NodeClass:
    """Boundary class of node ``(i, j)``.

    Corners of the outer rectangle belong to the walls. The node at the
    step lip gets its own class and is treated as solid.
    """
    if not (0 <= i < grid.nx and 0 <= j < grid.ny):
        raise IndexError(f"node ({i}, {j}) outside {grid.nx}x{grid.ny} grid")
    js = grid.j_step
    if i == 0 and j == js:
        return NodeClass.STEP_CORNER
    if j == 0:
        return NodeClass.LOWER_WALL
    if j == grid.ny - 1:
        return NodeClass.UPPER_WALL
    if i == 0:
        return NodeClass.LEFT_SOLID_WALL if j < js else NodeClass.INLET
    if i == grid.nx - 1:
        return NodeClass.OUTLET
    return NodeClass.INTERIOR
