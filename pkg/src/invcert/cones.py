"""Column generator sets, sign patterns, and cone-margin certificates.

Everything here works with finitely generated cones: a column of a matrix
family is represented by the finite set of vectors whose nonnegative
combinations cover every value that column can take. A certificate
``(a, epsilon)`` for such a cone states that ``a . x >= epsilon * |x|``
for every ``x`` in the cone, which is checked on the generators alone and
extends to the whole cone by positive combination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_DELTA",
    "Certificate",
    "DegenerateColumn",
    "GeneratorSet",
    "SignPattern",
    "apply_sign_pattern",
    "dedup_exact",
    "enumerate_sign_patterns",
    "normalize_generators",
    "verify_certificate",
]

# Default separation threshold: generators with Euclidean norm below this
# are treated as touching the origin, which makes the column uncertifiable.
DEFAULT_DELTA = 1e-12


class DegenerateColumn(ValueError):
    """A column's generators are not separated from the origin."""

    def __init__(self, column: int, norm: float):
        super().__init__(
            f"column {column} has a generator of norm {norm:.6g} "
            "below the separation threshold"
        )
        self.column = column
        self.norm = norm


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GeneratorSet:
    """Finite set of vectors generating one column cone.

    ``column`` is the 0-based index of the Jacobian column the set
    over-approximates; ``vectors`` has shape (m, n).
    """

    column: int
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if vectors.ndim != 2 or vectors.shape[0] == 0:
            raise ValueError("generator set must contain at least one vector")
        if not np.all(np.isfinite(vectors)):
            raise ValueError(f"column {self.column}: generators must be finite")
        object.__setattr__(self, "column", int(self.column))
        object.__setattr__(self, "vectors", _readonly(vectors))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class SignPattern:
    """Signs (+1/-1) applied to the column cones; the first sign is fixed +1.

    Flipping every sign asks the same question with ``a`` negated, so only
    patterns with a leading +1 are enumerated.
    """

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) == 0:
            raise ValueError("sign pattern must be non-empty")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        if signs[0] != 1:
            raise ValueError("the first sign is fixed at +1")
        object.__setattr__(self, "signs", signs)

    def label(self) -> str:
        return " ".join("+" if s > 0 else "-" for s in self.signs)


@dataclass(frozen=True)
class Certificate:
    """Unit direction ``a`` and margin ``epsilon > 0`` for one signed cone."""

    a: np.ndarray
    epsilon: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1:
            raise ValueError("certificate vector must be one-dimensional")
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("certificate vector must have unit Euclidean norm")
        if not (self.epsilon > 0.0 and np.isfinite(self.epsilon)):
            raise ValueError(f"certificate margin must be positive, got {self.epsilon}")
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "epsilon", float(self.epsilon))


def dedup_exact(rows: np.ndarray) -> np.ndarray:
    """Drop exactly equal duplicate rows, keeping first occurrences in order."""
    rows = np.ascontiguousarray(rows, dtype=float)
    seen: set[bytes] = set()
    keep = []
    for k in range(rows.shape[0]):
        key = rows[k].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(k)
    return rows[keep]


def normalize_generators(gens: GeneratorSet, delta: float = DEFAULT_DELTA) -> tuple[np.ndarray, float]:
    """Scale every generator to unit norm.

    Returns ``(units, min_norm)`` where ``min_norm`` is the smallest
    original generator norm, kept for reporting alongside the margin.
    Raises :class:`DegenerateColumn` if any generator has norm below
    ``delta``: the cone then touches the origin and no margin can hold.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    norms = np.linalg.norm(gens.vectors, axis=1)
    if np.any(norms < delta):
        raise DegenerateColumn(gens.column, float(norms.min()))
    return gens.vectors / norms[:, None], float(norms.min())


def enumerate_sign_patterns(n: int) -> list[SignPattern]:
    """All 2^(n-1) sign patterns with leading +1, in binary-counting order."""
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")
    patterns = []
    for code in range(1 << (n - 1)):
        signs = [1] + [
            -1 if (code >> (n - 1 - j)) & 1 else 1 for j in range(1, n)
        ]
        patterns.append(SignPattern(tuple(signs)))
    return patterns


def apply_sign_pattern(
    columns: list[GeneratorSet],
    pattern: SignPattern,
    delta: float = DEFAULT_DELTA,
) -> np.ndarray:
    """Concatenate the signed, unit-normalized generators of every column.

    The positive hull of the result is the signed sum cone selected by
    ``pattern``, so a certificate over these vectors certifies that cone.
    """
    n = len(pattern.signs)
    if len(columns) != n:
        raise ValueError(f"expected {n} columns, got {len(columns)}")
    blocks = []
    for sign, col in zip(pattern.signs, columns):
        if col.dimension != n:
            raise ValueError(
                f"column {col.column} has vectors of length {col.dimension}, expected {n}"
            )
        units, _ = normalize_generators(col, delta)
        blocks.append(sign * units)
    return np.vstack(blocks)


def verify_certificate(a: np.ndarray, epsilon: float, generators: np.ndarray) -> bool:
    """Check ``a . v >= epsilon * |v|`` for every generator ``v``.

    A pass extends to the full cone hull: for ``x = sum(lambda_k v_k)``
    with ``lambda_k >= 0``, ``a . x >= epsilon * sum(lambda_k |v_k|) >=
    epsilon * |x|`` by the triangle inequality.
    """
    a = np.asarray(a, dtype=float)
    if np.linalg.norm(a) == 0.0:
        raise ValueError("certificate vector must be nonzero")
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    norms = np.linalg.norm(gens, axis=1)
    return bool(np.all(gens @ a >= epsilon * norms))
