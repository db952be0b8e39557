"""Independent desk-scale checks used to cross-examine the certifier.

None of these share machinery with the certification path: injectivity is
probed by sampling and local refinement, planar acuteness is decided
exactly from polar angles, Jacobians come from central differences, and
hull membership goes through a nonnegative least-squares fit. They are
deliberately one-sided in the opposite direction from the certifier,
which is what makes the agreement tests meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .bernstein import (
    ConstantAxis,
    ControlNet,
    PatchGrid,
    derivative_net,
    eval_many,
    locate_patch,
)

__all__ = [
    "COLLISION_TOL",
    "SEPARATION_FLOOR",
    "CollisionReport",
    "acute_2d",
    "fd_jacobian",
    "hull_membership",
    "sampled_injectivity",
]

# Two sampled points count as a collision only if their images agree to
# COLLISION_TOL while the points themselves stay SEPARATION_FLOOR apart;
# the floor keeps evaluation round-off from faking collisions.
COLLISION_TOL = 1e-9
SEPARATION_FLOOR = 1e-3

_REFINE_CANDIDATES = 8
_REFINE_MAX_ITER = 80


@dataclass(frozen=True)
class CollisionReport:
    """Outcome of an injectivity sampling run.

    ``witness`` is ``(u, v, F(u), F(v))`` when a collision was found.
    """

    collided: bool
    witness: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None
    trials: int
    seed: int


def _dimension(map_like) -> int:
    if isinstance(map_like, (ControlNet, PatchGrid)):
        return map_like.dimension
    raise TypeError(f"expected ControlNet or PatchGrid, got {type(map_like)!r}")


class _JacobianCache:
    """Evaluate exact Jacobians of a net or grid via derivative nets.

    Degree-0 axes contribute a zero column (the map is constant along
    them), so refinement never trips over ConstantAxis.
    """

    def __init__(self, map_like):
        self._map = map_like
        self._nets: dict[tuple, ControlNet | None] = {}

    def _dnet(self, net: ControlNet, axis: int, key: tuple) -> ControlNet | None:
        if key not in self._nets:
            try:
                self._nets[key] = derivative_net(net, axis)
            except ConstantAxis:
                self._nets[key] = None
        return self._nets[key]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        n = _dimension(self._map)
        J = np.zeros((n, n))
        if isinstance(self._map, ControlNet):
            net, local, widths = self._map, x, np.ones(n)
            cell: tuple = ()
        else:
            cell, local = locate_patch(self._map, x)
            net = self._map.patches[cell]
            widths = self._map.cell_widths(cell)
        for axis in range(n):
            dnet = self._dnet(net, axis, cell + (axis,))
            if dnet is not None:
                J[:, axis] = eval_many(dnet, local[None, :])[0] / widths[axis]
        return J


def _pair_mismatch(map_like, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return np.linalg.norm(eval_many(map_like, U) - eval_many(map_like, V), axis=1)


def _refine_pair(map_like, jac: _JacobianCache, u0: np.ndarray, v0: np.ndarray):
    """Drive ``|F(u) - F(v)|`` toward zero with damped Gauss-Newton steps.

    Both points stay inside the unit cube and at least SEPARATION_FLOOR
    apart, so any limit with zero mismatch is a genuine collision rather
    than the trivial ``u = v`` one.
    """
    u, v = u0.copy(), v0.copy()
    gap = float(_pair_mismatch(map_like, u[None, :], v[None, :])[0])
    stalls = 0
    for _ in range(_REFINE_MAX_ITER):
        if gap <= 1e-12 or stalls >= 3:
            break
        r = eval_many(map_like, u[None, :])[0] - eval_many(map_like, v[None, :])[0]
        M = np.hstack([jac(u), -jac(v)])
        MMt = M @ M.T
        damping = 1e-12 * max(1.0, float(np.trace(MMt)))
        try:
            step = -M.T @ np.linalg.solve(MMt + damping * np.eye(M.shape[0]), r)
        except np.linalg.LinAlgError:
            break
        n = u.size
        improved = False
        alpha = 1.0
        while alpha > 1e-4:
            u_new = np.clip(u + alpha * step[:n], 0.0, 1.0)
            v_new = np.clip(v + alpha * step[n:], 0.0, 1.0)
            sep = np.linalg.norm(u_new - v_new)
            if sep < SEPARATION_FLOOR:
                u_new, v_new = _push_apart(u_new, v_new)
                sep = np.linalg.norm(u_new - v_new)
            if sep >= SEPARATION_FLOOR:
                gap_new = float(_pair_mismatch(map_like, u_new[None, :], v_new[None, :])[0])
                if gap_new < gap:
                    stalls = stalls + 1 if gap_new > 0.99 * gap else 0
                    u, v, gap = u_new, v_new, gap_new
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            break
    return u, v, gap


def _push_apart(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = v - u
    dist = np.linalg.norm(d)
    if dist == 0.0:
        return u, v
    mid = (u + v) / 2.0
    direction = d / dist
    u2 = np.clip(mid - direction * SEPARATION_FLOOR / 2.0, 0.0, 1.0)
    v2 = np.clip(mid + direction * SEPARATION_FLOOR / 2.0, 0.0, 1.0)
    return u2, v2


def sampled_injectivity(map_like, trials: int, seed: int = 0) -> CollisionReport:
    """Probe a map for collisions with seeded uniform pair samples.

    Draws ``trials`` pairs from the unit cube (re-drawing the rare pairs
    closer than the separation floor), then polishes the most promising
    pairs with a local Gauss-Newton descent on the image mismatch. Raw
    uniform pairs essentially never agree to within the collision
    tolerance even on badly folded maps, so the refinement is what turns
    near-misses into exact witnesses; it respects the separation floor,
    and every step is deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    n = _dimension(map_like)
    rng = np.random.Generator(np.random.Philox(int(seed)))
    U = rng.random((trials, n))
    V = rng.random((trials, n))
    while True:
        close = np.linalg.norm(U - V, axis=1) < SEPARATION_FLOOR
        if not close.any():
            break
        U[close] = rng.random((int(close.sum()), n))
        V[close] = rng.random((int(close.sum()), n))

    mismatch = _pair_mismatch(map_like, U, V)
    order = np.argsort(mismatch, kind="stable")

    best = int(order[0])
    if mismatch[best] <= COLLISION_TOL:
        return CollisionReport(True, _witness(map_like, U[best], V[best]), trials, int(seed))

    jac = _JacobianCache(map_like)
    for idx in order[:_REFINE_CANDIDATES]:
        u, v, gap = _refine_pair(map_like, jac, U[idx], V[idx])
        if gap <= COLLISION_TOL and np.linalg.norm(u - v) >= SEPARATION_FLOOR:
            return CollisionReport(True, _witness(map_like, u, v), trials, int(seed))
    return CollisionReport(False, None, trials, int(seed))


def _witness(map_like, u: np.ndarray, v: np.ndarray):
    images = eval_many(map_like, np.vstack([u, v]))
    return (u.copy(), v.copy(), images[0], images[1])


def acute_2d(generators) -> bool:
    """Exact planar acuteness test: do all directions fit in an open half-plane?

    Sorts polar angles and checks that the largest angular gap exceeds pi.
    Comparison-based on atan2 values, so it serves as ground truth for
    the LP margin in two dimensions.
    """
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    if gens.shape[1] != 2:
        raise ValueError(f"acute_2d needs 2-D vectors, got shape {gens.shape}")
    if np.any(np.linalg.norm(gens, axis=1) == 0.0):
        raise ValueError("generators must be nonzero")
    angles = np.sort(np.arctan2(gens[:, 1], gens[:, 0]))
    gaps = np.diff(angles)
    wrap = angles[0] + 2.0 * np.pi - angles[-1]
    largest = max(float(gaps.max()) if gaps.size else 0.0, float(wrap))
    return largest > np.pi


def fd_jacobian(map_like, x, h: float) -> np.ndarray:
    """Central-difference Jacobian at an interior point.

    Column ``j`` is ``(F(x + h e_j) - F(x - h e_j)) / (2 h)``; the point
    must keep distance ``h`` from the boundary of the unit cube.
    """
    if not h > 0.0:
        raise ValueError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    n = _dimension(map_like)
    if x.shape != (n,):
        raise ValueError(f"expected a point with {n} coordinates, got shape {x.shape}")
    if np.any(x < h) or np.any(x > 1.0 - h):
        raise ValueError("point too close to the boundary for the requested step")
    steps = h * np.eye(n)
    plus = eval_many(map_like, x[None, :] + steps)
    minus = eval_many(map_like, x[None, :] - steps)
    return (plus - minus).T / (2.0 * h)


def hull_membership(point, vertices, tol: float = 1e-9) -> bool:
    """Is ``point`` a convex combination of ``vertices``?

    Decided by nonnegative least squares on the system ``sum(w_k v_k) =
    point, sum(w_k) = 1, w >= 0``: the point is inside exactly when the
    residual vanishes (here: drops below ``tol``).
    """
    p = np.asarray(point, dtype=float)
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.shape[0] == 0:
        raise ValueError("vertex list must be non-empty")
    if p.shape != (V.shape[1],):
        raise ValueError(
            f"point has shape {p.shape}, vertices have {V.shape[1]} coordinates"
        )
    A = np.vstack([V.T, np.ones(V.shape[0])])
    b = np.append(p, 1.0)
    _, residual = nnls(A, b)
    return bool(residual <= tol)
