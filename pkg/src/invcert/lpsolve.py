"""Dense two-phase primal simplex for small linear programs.

Solves ``maximize c.x`` subject to ``G x <= h`` and per-variable bounds.
Bounded variables are shifted (finite lower bound), mirrored (finite
upper bound only), or split into positive and negative parts (free);
inequality rows get slack variables, and rows whose right-hand side turns
negative get phase-1 artificials. Pivot selection follows Bland's
least-index rule in both phases: the entering column is the lowest index
with an improving reduced cost, and ratio ties leave by the lowest basis
index. Bland's rule cannot cycle, so termination is guaranteed and the
whole solve is deterministic: identical inputs take the identical pivot
path and return bit-identical solutions.

Problem sizes here are tiny (tens of variables, a few hundred rows), so
the dense tableau is the right tool; there is no sparse storage and no
warm starting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "FEASIBILITY_TOL",
    "INFEASIBLE",
    "LinearProgram",
    "LpSolution",
    "OPTIMAL",
    "PIVOT_TOL",
    "UNBOUNDED",
    "solve",
]

FEASIBILITY_TOL = 1e-9
PIVOT_TOL = 1e-10
_REDUCED_COST_TOL = 1e-10

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

Bound = tuple[float | None, float | None]


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective . x`` s.t. ``constraint_matrix x <= constraint_bounds``.

    ``bounds[j]`` is the (lower, upper) pair for variable ``j``; ``None``
    means unbounded on that side. When ``bounds`` is omitted every
    variable gets ``(0, None)``.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    constraint_bounds: np.ndarray
    bounds: tuple[Bound, ...] | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        G = np.atleast_2d(np.asarray(self.constraint_matrix, dtype=float))
        h = np.asarray(self.constraint_bounds, dtype=float).ravel()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("objective must be a non-empty vector")
        if G.size == 0:
            G = G.reshape(0, c.size)
        if G.shape[1] != c.size:
            raise ValueError(
                f"constraint rows have {G.shape[1]} coefficients, objective has {c.size}"
            )
        if h.shape != (G.shape[0],):
            raise ValueError(
                f"got {h.size} constraint bounds for {G.shape[0]} rows"
            )
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError("all coefficients must be finite")
        bounds = self.bounds
        if bounds is None:
            bounds = tuple((0.0, None) for _ in range(c.size))
        else:
            bounds = tuple(
                (None if lo is None else float(lo), None if hi is None else float(hi))
                for lo, hi in bounds
            )
            if len(bounds) != c.size:
                raise ValueError(f"got {len(bounds)} bounds for {c.size} variables")
            for j, (lo, hi) in enumerate(bounds):
                if lo is not None and not np.isfinite(lo):
                    raise ValueError(f"variable {j}: finite or None lower bound required")
                if hi is not None and not np.isfinite(hi):
                    raise ValueError(f"variable {j}: finite or None upper bound required")
        for arr in (c, G, h):
            arr.setflags(write=False)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", G)
        object.__setattr__(self, "constraint_bounds", h)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_variables(self) -> int:
        return self.objective.size

    @property
    def n_constraints(self) -> int:
        return self.constraint_matrix.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome; ``x``, ``objective_value`` and ``duals`` only when optimal.

    ``duals[i]`` is the nonnegative multiplier of constraint row ``i`` at
    the optimum (zero on slack rows).
    """

    status: str
    x: np.ndarray | None = None
    objective_value: float | None = None
    duals: np.ndarray | None = None


def _pivot(T: np.ndarray, obj: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    obj -= obj[col] * T[row]
    basis[row] = col


def _init_objective(T: np.ndarray, basis: np.ndarray, costs: np.ndarray) -> np.ndarray:
    # obj[j] = z_j - c_j for the current basis; obj[-1] accumulates the value.
    obj = np.append(-costs, 0.0)
    for i, bi in enumerate(basis):
        if costs[bi] != 0.0:
            obj += costs[bi] * T[i]
    return obj


def _run_simplex(T: np.ndarray, obj: np.ndarray, basis: np.ndarray, n_cols: int) -> str:
    max_iter = 10_000 + 50 * (T.shape[0] + n_cols)
    for _ in range(max_iter):
        improving = np.nonzero(obj[:n_cols] < -_REDUCED_COST_TOL)[0]
        if improving.size == 0:
            return OPTIMAL
        enter = int(improving[0])
        col = T[:, enter]
        positive = col > PIVOT_TOL
        if not positive.any():
            return UNBOUNDED
        rows = np.nonzero(positive)[0]
        ratios = T[rows, -1] / col[rows]
        tied = rows[ratios == ratios.min()]
        leave = int(tied[np.argmin(basis[tied])])
        _pivot(T, obj, basis, leave, enter)
    raise RuntimeError("simplex iteration limit exceeded")


def solve(lp: LinearProgram) -> LpSolution:
    """Solve the program; returns a vertex optimizer when one exists."""
    G, h, c = lp.constraint_matrix, lp.constraint_bounds, lp.objective
    m, n_var = G.shape

    # Substitute x = shift + S y with y >= 0.
    shift = np.zeros(n_var)
    s_cols: list[np.ndarray] = []
    upper_rows: list[tuple[int, float]] = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and hi is not None and lo > hi:
            return LpSolution(INFEASIBLE)
        e = np.zeros(n_var)
        e[j] = 1.0
        if lo is not None:
            shift[j] = lo
            s_cols.append(e)
            if hi is not None:
                upper_rows.append((len(s_cols) - 1, hi - lo))
        elif hi is not None:
            shift[j] = hi
            s_cols.append(-e)
        else:
            s_cols.append(e)
            s_cols.append(-e)
    S = np.column_stack(s_cols)
    n_std = S.shape[1]

    A_rows = [G @ S]
    b_rows = [h - G @ shift]
    for k, ub in upper_rows:
        row = np.zeros(n_std)
        row[k] = 1.0
        A_rows.append(row[None, :])
        b_rows.append(np.array([ub]))
    A_ub = np.vstack(A_rows)
    b = np.concatenate(b_rows)
    n_rows = A_ub.shape[0]

    A = np.hstack([A_ub, np.eye(n_rows)])
    negated = b < 0.0
    A[negated] *= -1.0
    b = np.where(negated, -b, b)
    n_total = n_std + n_rows

    basis = np.empty(n_rows, dtype=int)
    art_rows = np.nonzero(negated)[0]
    n_art = art_rows.size
    if n_art:
        art_block = np.zeros((n_rows, n_art))
        for k, i in enumerate(art_rows):
            art_block[i, k] = 1.0
        A_full = np.hstack([A, art_block])
    else:
        A_full = A
    for i in range(n_rows):
        basis[i] = n_std + i
    for k, i in enumerate(art_rows):
        basis[i] = n_total + k

    T = np.hstack([A_full, b[:, None]])

    if n_art:
        costs1 = np.zeros(n_total + n_art)
        costs1[n_total:] = -1.0
        obj = _init_objective(T, basis, costs1)
        status = _run_simplex(T, obj, basis, n_total + n_art)
        if status != OPTIMAL or obj[-1] < -FEASIBILITY_TOL:
            return LpSolution(INFEASIBLE)
        # Pivot leftover artificials out; the slack block keeps every row
        # nonzero over the real columns, so a pivot entry always exists.
        for i in range(n_rows):
            if basis[i] >= n_total:
                row = np.abs(T[i, :n_total])
                candidates = np.nonzero(row > PIVOT_TOL)[0]
                col = int(candidates[0]) if candidates.size else int(np.argmax(row))
                _pivot(T, obj, basis, i, col)
        T = np.hstack([T[:, :n_total], T[:, -1:]])

    costs2 = np.concatenate([S.T @ c, np.zeros(n_rows)])
    obj = _init_objective(T, basis, costs2)
    status = _run_simplex(T, obj, basis, n_total)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    y = np.zeros(n_total)
    y[basis] = T[:, -1]
    x = shift + S @ y[:n_std]
    value = float(c @ x)

    duals = None
    try:
        basis_matrix = A[:, basis]
        sys_duals = np.linalg.solve(basis_matrix.T, costs2[basis])
        signs = np.where(negated, -1.0, 1.0)
        duals = (sys_duals * signs)[:m]
        duals.setflags(write=False)
    except np.linalg.LinAlgError:
        pass

    x.setflags(write=False)
    return LpSolution(OPTIMAL, x, value, duals)
