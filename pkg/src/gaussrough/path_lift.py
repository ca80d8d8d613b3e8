"""Piecewise-linear paths on [0, 1] and their step-N signature lifts.

A sample path is a d-vector of node values on a shared time grid; its lift is
the product of segment exponentials, so the degree-1 part of the lifted path
is the path increment from time 0 (the start value is subtracted).  Chen's
identity holds exactly: the increment of the lift between two nodes equals the
lift of the path restricted to those nodes.

``young_integral_quadratic`` integrates a piecewise-quadratic scalar function
against a coordinate of a piecewise-linear path with Simpson weights per
segment, which is exact for that class of integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor_group import (
    MAX_DEPTH,
    GroupElement,
    _check_depth,
    _inv_levels,
    _mul_levels,
    _unit_levels,
)

__all__ = [
    "TimeGrid",
    "SamplePath",
    "GroupPath",
    "lift_pl",
    "lift_cameron_martin",
    "signature_increment",
    "young_integral_quadratic",
    "uniform_grid",
]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing node times with t_0 = 0 and t_n = 1."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("grid needs at least two nodes")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if np.any(np.diff(t) <= 0):
            raise ValueError("grid times must be strictly increasing")
        object.__setattr__(self, "times", t)

    @property
    def n_segments(self) -> int:
        return self.times.size - 1

    @property
    def n_nodes(self) -> int:
        return self.times.size

    @property
    def midpoints(self) -> np.ndarray:
        t = self.times
        return 0.5 * (t[:-1] + t[1:])

    def same_as(self, other: "TimeGrid") -> bool:
        return self.times.size == other.times.size and bool(np.all(self.times == other.times))


def uniform_grid(n: int) -> TimeGrid:
    """Uniform grid with n segments."""
    return TimeGrid(np.linspace(0.0, 1.0, n + 1))


@dataclass(frozen=True)
class SamplePath:
    """d-dimensional piecewise-linear path: values[c, i] at grid node i."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.grid.n_nodes:
            raise ValueError("values must have shape (d, n_nodes)")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class GroupPath:
    """Group-valued path on a grid, stored level-stacked.

    ``levels[k]`` has shape ``(n_nodes,) + (dim,)*k``; ``point(i)`` wraps node
    i as a GroupElement and ``points`` materializes all of them.
    """

    grid: TimeGrid
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if np.asarray(self.levels[0]).shape != (self.grid.n_nodes,):
            raise ValueError("levels must carry one entry per grid node")
        object.__setattr__(self, "levels", tuple(np.asarray(lv, dtype=float) for lv in self.levels))

    @property
    def dim(self) -> int:
        return self.levels[1].shape[-1]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def point(self, i: int) -> GroupElement:
        return GroupElement(self.dim, self.depth, tuple(lv[i] for lv in self.levels))

    @property
    def points(self) -> tuple[GroupElement, ...]:
        return tuple(self.point(i) for i in range(self.grid.n_nodes))

    @classmethod
    def from_points(cls, grid: TimeGrid, points: Sequence[GroupElement]) -> "GroupPath":
        if len(points) != grid.n_nodes:
            raise ValueError("one point per grid node required")
        depth = points[0].depth
        stacked = tuple(
            np.stack([p.levels[k] for p in points]) for k in range(depth + 1)
        )
        return cls(grid, stacked)


def _segment_exp(delta: np.ndarray, depth: int) -> list[np.ndarray]:
    # exp of a degree-1 element: 1 + v + v(x)v/2 + v(x)v(x)v/6.
    lv = [np.ones(delta.shape[:-1]), delta]
    if depth >= 2:
        lv.append(np.einsum("...i,...j->...ij", delta, delta) / 2.0)
    if depth >= 3:
        lv.append(np.einsum("...i,...j,...k->...ijk", delta, delta, delta) / 6.0)
    return lv


def _lift_values(values: np.ndarray, depth: int) -> list[np.ndarray]:
    """Scan of segment exponentials over the last (node) axis.

    values: (..., d, n_nodes) -> levels[k]: (..., n_nodes) + (d,)*k.
    """
    deltas = np.diff(values, axis=-1)
    batch = values.shape[:-2]
    d = values.shape[-2]
    n_seg = deltas.shape[-1]
    out = [np.empty(batch + (n_seg + 1,) + (d,) * k) for k in range(depth + 1)]

    def node(k: int, m: int) -> tuple:
        return (Ellipsis, m) + (slice(None),) * k

    g = _unit_levels(d, depth, batch)
    for k in range(depth + 1):
        out[k][node(k, 0)] = g[k]
    for m in range(n_seg):
        g = _mul_levels(g, _segment_exp(deltas[..., m], depth))
        for k in range(depth + 1):
            out[k][node(k, m + 1)] = g[k]
    return out


def lift_pl(path: SamplePath, depth: int = MAX_DEPTH) -> GroupPath:
    """Signature lift of a piecewise-linear path, node by node."""
    _check_depth(depth)
    return GroupPath(path.grid, tuple(_lift_values(path.values, depth)))


def lift_cameron_martin(path: SamplePath, depth: int = MAX_DEPTH) -> GroupPath:
    """Lift of a grid function from the covariance's reproducing space.

    On a grid such functions are themselves piecewise linear, so this is the
    same computation as ``lift_pl``; the alias marks intent at call sites.
    """
    return lift_pl(path, depth)


def signature_increment(gp: GroupPath, a: int, b: int) -> GroupElement:
    """Increment of the lift between node a and node b (Chen bracket)."""
    if not 0 <= a <= b < gp.grid.n_nodes:
        raise ValueError("need 0 <= a <= b over grid nodes")
    la = [lv[a] for lv in gp.levels]
    lb = [lv[b] for lv in gp.levels]
    return GroupElement(gp.dim, gp.depth, tuple(_mul_levels(_inv_levels(la), lb)))


def young_integral_quadratic(
    f_nodes: np.ndarray,
    f_mids: np.ndarray,
    integrator: SamplePath,
    j: int,
    a: int,
    b: int,
) -> float:
    """Integral of a piecewise-quadratic f against component j of a PL path.

    f is given by its node values and segment-midpoint values; per segment the
    integrand is quadratic and the integrator linear, so the Simpson average
    (f_left + 4 f_mid + f_right)/6 times the segment increment is exact.
    Integrates over nodes a..b.
    """
    f_nodes = np.asarray(f_nodes, dtype=float)
    f_mids = np.asarray(f_mids, dtype=float)
    n_seg = integrator.grid.n_segments
    if f_nodes.shape != (n_seg + 1,) or f_mids.shape != (n_seg,):
        raise ValueError("f must carry one value per node and per segment midpoint")
    if not 0 <= a <= b <= n_seg:
        raise ValueError("need 0 <= a <= b <= n_segments")
    dx = np.diff(integrator.values[j])[a:b]
    w = (f_nodes[a:b] + 4.0 * f_mids[a:b] + f_nodes[a + 1 : b + 1]) / 6.0
    return float(np.dot(dx, w))
