"""Shared map builders for the tests."""

from __future__ import annotations

import itertools

import numpy as np

from invcert import ControlNet, PatchGrid


def identity_net(n: int = 2) -> ControlNet:
    """Degree-(1,...,1) net of the identity map on the unit cube."""
    shape = (2,) * n
    points = np.zeros(shape + (n,))
    for index in itertools.product(*(range(2) for _ in range(n))):
        points[index] = np.array(index, dtype=float)
    return ControlNet((1,) * n, points)


def bilinear_net(f00, f10, f01, f11) -> ControlNet:
    """Degree-(1,1) net from its four corner control points."""
    return ControlNet((1, 1), np.array([[f00, f01], [f10, f11]], dtype=float))


def quad_net() -> ControlNet:
    return bilinear_net((0, 0), (1, 0), (0, 1), (2, 2))


def collapsed_net() -> ControlNet:
    """The rank-one map (x1+x2, x1+x2)."""
    return bilinear_net((0, 0), (1, 1), (1, 1), (2, 2))


def folded_net() -> ControlNet:
    """Bilinear map folding over itself (corner pulled to (0.1, 0.1))."""
    return bilinear_net((0, 0), (1, 0), (0, 1), (0.1, 0.1))


def linear_net(matrix) -> ControlNet:
    """Degree-(1,1) net of the linear map x -> M x on the unit square."""
    M = np.asarray(matrix, dtype=float)
    points = np.zeros((2, 2, 2))
    for i in range(2):
        for j in range(2):
            points[i, j] = M @ np.array([i, j], dtype=float)
    return ControlNet((1, 1), points)


def rotation_net(angle: float) -> ControlNet:
    c, s = np.cos(angle), np.sin(angle)
    return linear_net([[c, -s], [s, c]])


def random_net(rng: np.random.Generator, n: int, max_degree: int = 3,
               min_degree: int = 0, scale: float = 1.0) -> ControlNet:
    degrees = tuple(int(d) for d in rng.integers(min_degree, max_degree + 1, size=n))
    shape = tuple(p + 1 for p in degrees) + (n,)
    return ControlNet(degrees, scale * rng.uniform(-1.0, 1.0, size=shape))


def perturbed_identity_net(rng: np.random.Generator, amplitude: float) -> ControlNet:
    """Identity corners plus a uniform perturbation of the given amplitude."""
    base = identity_net(2).points
    noise = rng.uniform(-amplitude, amplitude, size=base.shape)
    return ControlNet((1, 1), base + noise)


def random_grid_2x2(rng: np.random.Generator) -> PatchGrid:
    """Random 2x2 grid of bilinear patches with random interior cuts."""
    bx = np.array([0.0, rng.uniform(0.3, 0.7), 1.0])
    by = np.array([0.0, rng.uniform(0.3, 0.7), 1.0])
    patches = {}
    for cell in itertools.product(range(2), range(2)):
        patches[cell] = ControlNet((1, 1), rng.uniform(-1.0, 1.0, size=(2, 2, 2)))
    return PatchGrid((bx, by), patches)


def identity_grid_2x2() -> PatchGrid:
    """The identity map split into a uniform 2x2 grid of bilinear patches."""
    breaks = np.array([0.0, 0.5, 1.0])
    patches = {}
    for cx, cy in itertools.product(range(2), range(2)):
        lo = np.array([breaks[cx], breaks[cy]])
        points = np.zeros((2, 2, 2))
        for i in range(2):
            for j in range(2):
                points[i, j] = lo + 0.5 * np.array([i, j])
        patches[(cx, cy)] = ControlNet((1, 1), points)
    return PatchGrid((breaks, breaks), patches)
