"""Uniform tensor-product grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParams


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise InvalidParams(f"axis bounds must be finite, got {self.min}, {self.max}")
        if not self.min < self.max:
            raise InvalidParams(f"axis needs min < max, got {self.min} >= {self.max}")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParams(f"axis count must be an integer >= 2, got {self.count}")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class GridSpec:
    """Per-dimension ``(min, max, count)`` with uniform spacing.

    Nodes are enumerated in row-major order (last axis fastest), which is
    also the layout used by grid CSV files.
    """

    axes: tuple[Axis, ...]

    def __post_init__(self):
        if len(self.axes) == 0:
            raise InvalidParams("grid needs at least one axis")

    @classmethod
    def from_bounds(cls, bounds: Sequence[Sequence[float]]) -> "GridSpec":
        return cls(tuple(Axis(float(lo), float(hi), int(n)) for lo, hi, n in bounds))

    @classmethod
    def from_step(cls, lo: float, hi: float, step: float, dim: int = 1) -> "GridSpec":
        """Square grid ``[lo, hi]^dim`` with the given step (rounded to fit)."""
        count = int(round((hi - lo) / step)) + 1
        return cls(tuple(Axis(float(lo), float(hi), count) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> np.ndarray:
        return np.array([a.spacing for a in self.axes])

    @property
    def h(self) -> float:
        """Largest spacing over all axes."""
        return float(self.spacing.max())

    @property
    def lower(self) -> np.ndarray:
        return np.array([a.min for a in self.axes])

    @property
    def upper(self) -> np.ndarray:
        return np.array([a.max for a in self.axes])

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def axis_values(self) -> list[np.ndarray]:
        return [a.values() for a in self.axes]

    def nodes(self) -> np.ndarray:
        """All nodes as an ``(size, dim)`` array in row-major order."""
        mesh = np.meshgrid(*self.axis_values(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def interior_mask(self) -> np.ndarray:
        """Boolean mask (flat, row-major) of nodes not on the boundary."""
        masks = []
        for a in self.axes:
            m = np.ones(a.count, dtype=bool)
            m[0] = m[-1] = False
            masks.append(m)
        mesh = np.meshgrid(*masks, indexing="ij")
        return np.logical_and.reduce([m.ravel() for m in mesh])

    def locate(self, x, atol: float = 1e-9) -> int | None:
        """Flat index of the node equal to ``x`` (within ``atol`` in grid units), else None."""
        x = np.asarray(x, dtype=float)
        idx = []
        for xi, a in zip(x, self.axes):
            t = (xi - a.min) / a.spacing
            k = int(round(t))
            if abs(t - k) > atol or k < 0 or k >= a.count:
                return None
            idx.append(k)
        return int(np.ravel_multi_index(tuple(idx), self.shape))

    def header(self) -> str:
        return "# grid: " + ";".join(f"{a.min!r},{a.max!r},{a.count}" for a in self.axes)

    @classmethod
    def parse_header(cls, line: str) -> "GridSpec":
        line = line.strip()
        prefix = "# grid:"
        if not line.startswith(prefix):
            raise InvalidParams(f"grid header must start with '{prefix}'")
        parts = [p.strip() for p in line[len(prefix):].split(";") if p.strip()]
        bounds = []
        for p in parts:
            fields = [f.strip() for f in p.split(",")]
            if len(fields) != 3:
                raise InvalidParams(f"bad grid axis spec {p!r}")
            bounds.append((float(fields[0]), float(fields[1]), int(fields[2])))
        return cls.from_bounds(bounds)

    def to_list(self) -> list[list[float]]:
        return [[a.min, a.max, a.count] for a in self.axes]
