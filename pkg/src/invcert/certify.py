"""Strict V-family certification of matrix families and piecewise Bezier maps.

The test takes one generator set per Jacobian column and asks, for each
of the 2^(n-1) column sign patterns, whether a single direction ``a``
makes a strictly positive margin with every signed unit generator. Each
pattern question is one small linear program; a positive optimal margin
``t`` yields a certificate ``(a/|a|, t/|a|)`` that is re-verified against
the generators before the pattern is accepted. If every pattern passes,
the family is a strict V-family and the underlying map is globally
invertible on its convex domain: along the segment between any two domain
points, the difference of map values integrates Jacobian columns whose
signed combination stays inside one certified cone, so it cannot vanish.

For a piecewise Bezier map the column generators are the per-patch
derivative control points, rescaled by the cell widths so they live in
global coordinates, and aggregated by union across patches. The union is
enough: the test only sees cone hulls, which convex aggregation does not
enlarge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lpsolve
from .bernstein import ConstantAxis, ControlNet, PatchGrid, column_generators
from .cones import (
    DEFAULT_DELTA,
    Certificate,
    DegenerateColumn,
    GeneratorSet,
    SignPattern,
    dedup_exact,
    enumerate_sign_patterns,
    normalize_generators,
    verify_certificate,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "CertificateReport",
    "CertificationError",
    "PatternResult",
    "Witness",
    "certificate_lp",
    "certify_map",
    "certify_matrix_family",
    "grid_column_generators",
    "patch_column_generators",
    "test_strict_vfamily",
]

# A pattern is accepted only when its LP margin clears this floor; smaller
# positive margins are reported as numerically marginal rather than strict.
DEFAULT_THRESHOLD = 1e-7

VERDICT_STRICT = "strict-v-family"
VERDICT_NOT_CERTIFIED = "not-certified"

STATUS_STRICT = "strict"
STATUS_NOT_STRICT = "not-strict"
STATUS_DEGENERATE = "degenerate"

PROVENANCE_SINGLE = "single-patch"
PROVENANCE_MULTI = "multi-patch"
PROVENANCE_MATRIX = "matrix-family"


class CertificationError(RuntimeError):
    """The certificate LP failed in a way that should be impossible."""


@dataclass(frozen=True)
class Witness:
    """Near-zero nonnegative combination of signed generators.

    Produced for patterns that fail: ``weights`` are convex coefficients
    over the pattern's signed unit generators and ``combination`` is the
    weighted sum, whose small norm shows which columns almost cancel.
    """

    weights: np.ndarray
    combination: np.ndarray
    residual_norm: float


@dataclass(frozen=True)
class PatternResult:
    pattern: SignPattern
    status: str
    certificate: Certificate | None
    lp_margin: float | None
    witness: Witness | None = None
    note: str | None = None


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the full strict V-family test.

    ``verdict`` is strict only when every pattern result is strict.
    ``min_generator_norms`` records, per column, how far the raw
    generators stay from the origin; together with each pattern's margin
    it quantifies the separation the certificates rest on.
    """

    dimension: int
    verdict: str
    pattern_results: tuple[PatternResult, ...]
    generator_counts: tuple[int, ...] | None
    min_generator_norms: tuple[float, ...] | None
    provenance: str
    delta: float
    threshold: float
    degenerate_column: int | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == VERDICT_STRICT


def _margin_lp(unit_generators: np.ndarray) -> tuple[np.ndarray, float, np.ndarray | None]:
    """Max-margin LP over unit generators; returns (a, t, generator duals).

    Maximizes ``t`` subject to ``a . w_k >= t`` for every generator and
    ``-1 <= a_j <= 1``. Internally ``a`` is split into nonnegative parts
    and ``t >= 0`` is imposed, which loses nothing (``a = 0, t = 0`` is
    always feasible) and keeps the initial slack basis feasible, so the
    solver never needs a phase 1.
    """
    W = np.atleast_2d(np.asarray(unit_generators, dtype=float))
    m, n = W.shape
    if m == 0:
        raise ValueError("empty generator list")
    # Variables: a_plus (n), a_minus (n), t. Rows: t - (a_plus - a_minus).w_k <= 0.
    rows = np.hstack([-W, W, np.ones((m, 1))])
    lp = lpsolve.LinearProgram(
        objective=np.concatenate([np.zeros(2 * n), [1.0]]),
        constraint_matrix=rows,
        constraint_bounds=np.zeros(m),
        bounds=tuple([(0.0, 1.0)] * (2 * n) + [(0.0, None)]),
    )
    sol = lpsolve.solve(lp)
    if sol.status != lpsolve.OPTIMAL:
        raise CertificationError(f"certificate LP terminated with status {sol.status}")
    a = sol.x[:n] - sol.x[n:2 * n]
    t = float(sol.x[2 * n])
    return a, t, sol.duals


def certificate_lp(unit_generators) -> tuple[np.ndarray, float]:
    """Best certificate direction over a set of unit generators.

    Returns ``(a_star, t_star)`` with ``a_star`` in the unit box; a strict
    certificate exists over these generators exactly when ``t_star > 0``,
    and then ``(a_star/|a_star|, t_star/|a_star|)`` is one.
    """
    a, t, _ = _margin_lp(unit_generators)
    return a, t


def _witness_from_duals(duals: np.ndarray | None, signed: np.ndarray) -> Witness | None:
    if duals is None:
        return None
    lam = np.clip(np.asarray(duals, dtype=float), 0.0, None)
    total = lam.sum()
    if total <= 0.0:
        return None
    weights = lam / total
    combination = weights @ signed
    return Witness(weights, combination, float(np.linalg.norm(combination)))


def _pattern_result(pattern: SignPattern, signed: np.ndarray, threshold: float) -> PatternResult:
    a_raw, t, duals = _margin_lp(signed)
    if t > threshold:
        scale = np.linalg.norm(a_raw)
        a_unit = a_raw / scale
        claimed = t / scale
        achieved = float(np.min(signed @ a_unit / np.linalg.norm(signed, axis=1)))
        # The LP optimum is only accurate to round-off; report the margin the
        # generators verifiably meet, but refuse anything beyond float dust.
        if achieved < claimed * (1.0 - 1e-9) - 1e-12:
            return PatternResult(
                pattern,
                STATUS_NOT_STRICT,
                None,
                t,
                witness=_witness_from_duals(duals, signed),
                note="certificate failed post-hoc verification",
            )
        epsilon = min(claimed, achieved)
        for _ in range(3):
            if epsilon > 0.0 and verify_certificate(a_unit, epsilon, signed):
                return PatternResult(pattern, STATUS_STRICT,
                                     Certificate(a_unit, epsilon), t)
            epsilon = float(np.nextafter(epsilon, 0.0))
        return PatternResult(
            pattern,
            STATUS_NOT_STRICT,
            None,
            t,
            witness=_witness_from_duals(duals, signed),
            note="certificate failed post-hoc verification",
        )
    note = "numerically marginal" if t > 0.0 else None
    return PatternResult(
        pattern,
        STATUS_NOT_STRICT,
        None,
        t,
        witness=_witness_from_duals(duals, signed),
        note=note,
    )


def _degenerate_report(
    n: int,
    column: int,
    counts: tuple[int, ...] | None,
    provenance: str,
    delta: float,
    threshold: float,
) -> CertificateReport:
    results = tuple(
        PatternResult(p, STATUS_DEGENERATE, None, None)
        for p in enumerate_sign_patterns(n)
    )
    return CertificateReport(
        dimension=n,
        verdict=VERDICT_NOT_CERTIFIED,
        pattern_results=results,
        generator_counts=counts,
        min_generator_norms=None,
        provenance=provenance,
        delta=delta,
        threshold=threshold,
        degenerate_column=column,
    )


def test_strict_vfamily(
    columns: list[GeneratorSet],
    delta: float = DEFAULT_DELTA,
    threshold: float = DEFAULT_THRESHOLD,
    provenance: str = PROVENANCE_MATRIX,
) -> CertificateReport:
    """Run the full certification over one generator set per column.

    Every sign pattern gets its own max-margin LP; a pattern is strict
    only if the LP margin clears ``threshold`` and the rescaled
    certificate passes an independent generator-wise re-check. Failing
    patterns carry a witness combination extracted from the LP duals.
    """
    columns = list(columns)
    n = len(columns)
    if n == 0:
        raise ValueError("need at least one column")
    for col in columns:
        if col.dimension != n:
            raise ValueError(
                f"column {col.column} has vectors of length {col.dimension}, "
                f"but {n} columns were supplied"
            )
    counts = tuple(int(col.vectors.shape[0]) for col in columns)
    try:
        normalized = [normalize_generators(col, delta) for col in columns]
    except DegenerateColumn as exc:
        return _degenerate_report(n, exc.column, counts, provenance, delta, threshold)
    units = [u for u, _ in normalized]
    min_norms = tuple(mn for _, mn in normalized)

    results = []
    for pattern in enumerate_sign_patterns(n):
        signed = np.vstack([s * u for s, u in zip(pattern.signs, units)])
        results.append(_pattern_result(pattern, signed, threshold))

    verdict = (
        VERDICT_STRICT
        if all(r.status == STATUS_STRICT for r in results)
        else VERDICT_NOT_CERTIFIED
    )
    return CertificateReport(
        dimension=n,
        verdict=verdict,
        pattern_results=tuple(results),
        generator_counts=counts,
        min_generator_norms=min_norms,
        provenance=provenance,
        delta=delta,
        threshold=threshold,
    )


def patch_column_generators(grid: PatchGrid, cell: tuple[int, ...]) -> list[GeneratorSet]:
    """Column generators of one cell, rescaled to global coordinates.

    Local derivative control points are divided by the cell width along
    the column's axis (chain rule). The factor is positive, so cone hulls
    are unchanged; it is applied so margins refer to global derivatives.
    """
    net = grid.patches[tuple(cell)]
    widths = grid.cell_widths(tuple(cell))
    return [
        GeneratorSet(j, column_generators(net, j).vectors / widths[j])
        for j in range(grid.dimension)
    ]


def grid_column_generators(grid: PatchGrid) -> list[GeneratorSet]:
    """Union of the scaled per-patch generators, one set per column."""
    n = grid.dimension
    stacked: list[list[np.ndarray]] = [[] for _ in range(n)]
    for cell in grid.cells():
        for j, gens in enumerate(patch_column_generators(grid, cell)):
            stacked[j].append(gens.vectors)
    return [
        GeneratorSet(j, dedup_exact(np.vstack(stacked[j]))) for j in range(n)
    ]


def certify_map(
    map_like,
    delta: float = DEFAULT_DELTA,
    threshold: float = DEFAULT_THRESHOLD,
) -> CertificateReport:
    """Certify global invertibility of a Bezier map on the unit cube.

    Accepts a single :class:`ControlNet` or a :class:`PatchGrid`. Column
    generators are aggregated across all patches, so a strict verdict
    certifies the whole piecewise map at once (continuity across patch
    faces is assumed, not checked).
    """
    if isinstance(map_like, ControlNet):
        grid = PatchGrid.single(map_like)
    elif isinstance(map_like, PatchGrid):
        grid = map_like
    else:
        raise TypeError(f"expected ControlNet or PatchGrid, got {type(map_like)!r}")
    provenance = PROVENANCE_SINGLE if len(grid.patches) == 1 else PROVENANCE_MULTI
    try:
        columns = grid_column_generators(grid)
    except ConstantAxis as exc:
        # A constant axis means a zero Jacobian column: degenerate by definition.
        return _degenerate_report(
            grid.dimension, exc.axis, None, provenance, delta, threshold
        )
    return test_strict_vfamily(columns, delta, threshold, provenance)


def certify_matrix_family(
    columns: list[GeneratorSet],
    delta: float = DEFAULT_DELTA,
    threshold: float = DEFAULT_THRESHOLD,
) -> CertificateReport:
    """Certify a raw matrix family given directly by per-column generators.

    The caller owns the hypothesis that the generators enclose every
    matrix column of interest over a convex domain.
    """
    return test_strict_vfamily(columns, delta, threshold, PROVENANCE_MATRIX)
