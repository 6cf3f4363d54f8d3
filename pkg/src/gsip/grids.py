"""Uniform 1-D grids and grid-sampled functions.

Grids hold interior nodes only; the endpoints carry implied Dirichlet
zeros.  All inner products and norms use the trapezoidal weight h, which
for interior-node data with zero boundary values reduces to h * sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import GridError


@dataclass(frozen=True)
class Grid:
    """Uniform discretization of (x_lo, x_hi) with n interior nodes."""

    x_lo: float
    x_hi: float
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise GridError(f"grid needs at least 5 interior nodes, got {self.n}")
        if not (self.x_hi > self.x_lo):
            raise GridError(f"empty interval ({self.x_lo}, {self.x_hi})")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n + 1)

    @property
    def nodes(self) -> NDArray[np.float64]:
        """Interior nodes x_lo + h, ..., x_hi - h."""
        return self.x_lo + self.h * np.arange(1, self.n + 1)

    @property
    def half_nodes(self) -> NDArray[np.float64]:
        """Cell midpoints, one per interval, length n + 1."""
        return self.x_lo + self.h * (np.arange(self.n + 1) + 0.5)

    def refined(self) -> "Grid":
        """Grid with exactly halved spacing (2n + 1 interior nodes)."""
        return Grid(self.x_lo, self.x_hi, 2 * self.n + 1)


@dataclass(frozen=True)
class GridFunction:
    """Real values sampled on the interior nodes of a grid."""

    grid: Grid
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise GridError(
                f"values shape {vals.shape} does not match grid with n={self.grid.n}"
            )
        object.__setattr__(self, "values", vals)

    def norm(self) -> float:
        return float(np.sqrt(self.grid.h * np.sum(self.values**2)))

    def normalized(self) -> "GridFunction":
        nrm = self.norm()
        if nrm == 0.0:
            return self
        return GridFunction(self.grid, self.values / nrm)

    def inner(self, other: "GridFunction") -> float:
        if other.grid != self.grid:
            raise GridError("inner product requires functions on the same grid")
        return float(self.grid.h * np.sum(self.values * other.values))


def overlap(f: GridFunction, g: GridFunction) -> float:
    """|<f, g>| after normalizing both; in [0, 1] up to roundoff."""
    return abs(f.normalized().inner(g.normalized()))
