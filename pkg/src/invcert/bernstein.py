"""Tensor-product Bernstein-Bezier control nets on the unit cube.

A :class:`ControlNet` holds the coefficients of a polynomial map
[0,1]^n -> R^n in the tensor-product Bernstein basis, and a
:class:`PatchGrid` tiles the unit cube with such nets along axis-parallel
cuts. Evaluation runs an axis-wise de Casteljau reduction, which is
numerically stable on [0,1] and reproduces corner control points exactly.
Differentiation along an axis is the first-difference construction: the
result is again a net, one degree lower along that axis, whose control
points enclose every value of the partial derivative on the patch. Those
derivative control points are what the certifier consumes as column
generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .cones import GeneratorSet, dedup_exact

__all__ = [
    "ConstantAxis",
    "ControlNet",
    "PatchGrid",
    "column_generators",
    "derivative_net",
    "eval_bb",
    "eval_bb_many",
    "eval_many",
    "eval_map",
    "locate_patch",
]


class ConstantAxis(ValueError):
    """Derivative requested along an axis of degree zero."""

    def __init__(self, axis: int):
        super().__init__(
            f"net has degree 0 along axis {axis}; the derivative net would be empty"
        )
        self.axis = axis


@dataclass(frozen=True)
class ControlNet:
    """Control points of one Bernstein-Bezier patch.

    ``points`` has shape ``(degrees[0]+1, ..., degrees[n-1]+1, n)``; the
    entry at multi-index ``(i_1, ..., i_n)`` is the control point with
    that index, a vector in the n-dimensional codomain.
    """

    degrees: tuple[int, ...]
    points: np.ndarray

    def __post_init__(self):
        degrees = tuple(int(p) for p in self.degrees)
        if len(degrees) == 0:
            raise ValueError("a net needs at least one axis")
        if any(p < 0 for p in degrees):
            raise ValueError(f"degrees must be nonnegative, got {degrees}")
        points = np.array(self.points, dtype=float)
        expected = tuple(p + 1 for p in degrees) + (len(degrees),)
        if points.shape != expected:
            raise ValueError(
                f"points shape {points.shape} does not match degrees {degrees}: "
                f"expected {expected}"
            )
        if not np.all(np.isfinite(points)):
            raise ValueError("control points must be finite")
        points.setflags(write=False)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "points", points)

    @property
    def dimension(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class PatchGrid:
    """Axis-parallel tiling of [0,1]^n with one control net per cell.

    ``breakpoints[k]`` is the strictly increasing list of cut coordinates
    along axis ``k``, starting at 0 and ending at 1. ``patches`` maps each
    cell multi-index to the net giving the map on that cell in local
    coordinates.
    """

    breakpoints: tuple[np.ndarray, ...]
    patches: Mapping[tuple[int, ...], ControlNet]

    def __post_init__(self):
        breaks = []
        for axis, raw in enumerate(self.breakpoints):
            b = np.asarray(raw, dtype=float)
            if b.ndim != 1 or b.size < 2:
                raise ValueError(f"axis {axis}: need at least two breakpoints")
            if b[0] != 0.0 or b[-1] != 1.0:
                raise ValueError(f"axis {axis}: breakpoints must start at 0 and end at 1")
            if np.any(np.diff(b) <= 0.0):
                raise ValueError(f"axis {axis}: breakpoints must be strictly increasing")
            b.setflags(write=False)
            breaks.append(b)
        n = len(breaks)
        if n == 0:
            raise ValueError("a grid needs at least one axis")
        shape = tuple(len(b) - 1 for b in breaks)
        patches = dict(self.patches)
        expected_cells = set(itertools.product(*(range(s) for s in shape)))
        got_cells = {tuple(int(i) for i in cell) for cell in patches}
        if got_cells != expected_cells:
            missing = sorted(expected_cells - got_cells)
            extra = sorted(got_cells - expected_cells)
            raise ValueError(
                f"grid of shape {shape} needs one patch per cell; "
                f"missing {missing[:3]}, unexpected {extra[:3]}"
            )
        for cell, net in patches.items():
            if net.dimension != n:
                raise ValueError(
                    f"patch {cell} has dimension {net.dimension}, grid has {n}"
                )
        object.__setattr__(self, "breakpoints", tuple(breaks))
        object.__setattr__(
            self, "patches", {tuple(int(i) for i in c): p for c, p in patches.items()}
        )

    @property
    def dimension(self) -> int:
        return len(self.breakpoints)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(b) - 1 for b in self.breakpoints)

    @classmethod
    def single(cls, net: ControlNet) -> "PatchGrid":
        """Wrap one net as a grid with a single cell covering [0,1]^n."""
        breaks = tuple(np.array([0.0, 1.0]) for _ in range(net.dimension))
        return cls(breaks, {(0,) * net.dimension: net})

    def cells(self) -> list[tuple[int, ...]]:
        return sorted(self.patches)

    def cell_widths(self, cell: tuple[int, ...]) -> np.ndarray:
        return np.array(
            [self.breakpoints[axis][k + 1] - self.breakpoints[axis][k]
             for axis, k in enumerate(cell)]
        )


def _reduce_batch(points: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """De Casteljau reduction of a point tensor at a batch of parameters.

    ``points`` has shape (m_1, ..., m_n, n); ``xs`` has shape (N, n).
    Returns the N evaluated codomain vectors, shape (N, n).
    """
    b = points[..., None, :]
    for axis in range(xs.shape[1]):
        t = xs[:, axis][:, None]
        while b.shape[0] > 1:
            b = (1.0 - t) * b[:-1] + t * b[1:]
        b = b[0]
    if b.shape[0] != xs.shape[0]:
        # Degree-0 axes never touch the parameters, so the batch axis may
        # not have materialized through broadcasting.
        b = np.broadcast_to(b, (xs.shape[0], points.shape[-1])).copy()
    return b


def _check_unit_cube(xs: np.ndarray, n: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[None, :]
    if xs.ndim != 2 or xs.shape[1] != n:
        raise ValueError(f"expected points with {n} coordinates, got shape {xs.shape}")
    if not np.all(np.isfinite(xs)):
        raise ValueError("evaluation points must be finite")
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("evaluation point lies outside the unit cube")
    return xs


def eval_bb(net: ControlNet, xi) -> np.ndarray:
    """Evaluate the net at one point of [0,1]^n.

    At a domain vertex the reduction multiplies by exact 0/1 factors, so
    the corresponding corner control point is returned exactly.
    """
    xs = _check_unit_cube(xi, net.dimension)
    if xs.shape[0] != 1:
        raise ValueError("eval_bb takes a single point; use eval_many for batches")
    return _reduce_batch(net.points, xs)[0]


def eval_bb_many(net: ControlNet, xs) -> np.ndarray:
    """Evaluate the net at a batch of points, shape (N, n) -> (N, n)."""
    return _reduce_batch(net.points, _check_unit_cube(xs, net.dimension))


def derivative_net(net: ControlNet, axis: int) -> ControlNet:
    """Net of the partial derivative along ``axis`` (0-based).

    Control points are ``p * (f[..., i+1, ...] - f[..., i, ...])`` where
    ``p`` is the degree along the axis; evaluating the result equals the
    analytic partial derivative of the original net everywhere.
    """
    if not 0 <= axis < net.dimension:
        raise ValueError(f"axis {axis} out of range for dimension {net.dimension}")
    p = net.degrees[axis]
    if p == 0:
        raise ConstantAxis(axis)
    moved = np.moveaxis(net.points, axis, 0)
    diff = p * (moved[1:] - moved[:-1])
    degrees = tuple(
        d - 1 if k == axis else d for k, d in enumerate(net.degrees)
    )
    return ControlNet(degrees, np.moveaxis(diff, 0, axis))


def column_generators(net: ControlNet, axis: int) -> GeneratorSet:
    """Generators enclosing column ``axis`` of the Jacobian on the patch.

    These are the control points of the derivative net along the axis;
    every realized column value is a convex combination of them. Exact
    duplicates are dropped.
    """
    dnet = derivative_net(net, axis)
    vectors = dnet.points.reshape(-1, net.dimension)
    return GeneratorSet(column=axis, vectors=dedup_exact(vectors))


def locate_patch(grid: PatchGrid, x) -> tuple[tuple[int, ...], np.ndarray]:
    """Cell containing ``x`` and the affine local coordinates inside it.

    Points on shared faces resolve to the lexicographically smallest
    containing cell; any containing cell gives valid generators, since
    certification uses closed-patch control nets.
    """
    xs = _check_unit_cube(x, grid.dimension)
    if xs.shape[0] != 1:
        raise ValueError("locate_patch takes a single point")
    cell = []
    local = []
    for axis, breaks in enumerate(grid.breakpoints):
        k = int(np.searchsorted(breaks, xs[0, axis], side="left")) - 1
        k = min(max(k, 0), len(breaks) - 2)
        lo, hi = breaks[k], breaks[k + 1]
        cell.append(k)
        local.append((xs[0, axis] - lo) / (hi - lo))
    return tuple(cell), np.array(local)


def eval_many(map_like, xs) -> np.ndarray:
    """Evaluate a ControlNet or PatchGrid at a batch of global points."""
    if isinstance(map_like, ControlNet):
        return eval_bb_many(map_like, xs)
    if not isinstance(map_like, PatchGrid):
        raise TypeError(f"expected ControlNet or PatchGrid, got {type(map_like)!r}")
    grid = map_like
    pts = _check_unit_cube(xs, grid.dimension)
    n = grid.dimension
    idx = np.empty((pts.shape[0], n), dtype=int)
    lo = np.empty_like(pts)
    width = np.empty_like(pts)
    for axis, breaks in enumerate(grid.breakpoints):
        k = np.searchsorted(breaks, pts[:, axis], side="left") - 1
        k = np.clip(k, 0, len(breaks) - 2)
        idx[:, axis] = k
        lo[:, axis] = breaks[k]
        width[:, axis] = breaks[k + 1] - breaks[k]
    local = (pts - lo) / width
    flat = np.ravel_multi_index(tuple(idx.T), grid.shape)
    out = np.empty_like(pts)
    for cell_id in np.unique(flat):
        mask = flat == cell_id
        cell = tuple(int(i) for i in np.unravel_index(cell_id, grid.shape))
        out[mask] = _reduce_batch(grid.patches[cell].points, local[mask])
    return out


def eval_map(map_like, x) -> np.ndarray:
    """Evaluate a ControlNet or PatchGrid at a single global point."""
    return eval_many(map_like, np.asarray(x, dtype=float)[None, :])[0]
