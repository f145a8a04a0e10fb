"""Helper functions for subprocesses: exact sparse linear algebra over QQ, hashing and random samples.

Vectors are sparse maps ``{column: coefficient}`` with coefficients in sympy's ``QQ``; a list of
such maps is a matrix given by rows.
"""

import hashlib
import json
import random
from typing import Iterable, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from pslab import config

SparseVector = dict[int, object]


def to_qq(value) -> object:
    """Convert an int, a ``"p/q"`` string or a QQ element to QQ."""
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            numerator, denominator = text.split("/", 1)
            return QQ(int(numerator), int(denominator))
        return QQ(int(text))
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def format_rational(value) -> str:
    """Render a QQ element as ``"p"`` or ``"p/q"``."""
    value = QQ.convert(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _clean(rows: Iterable[SparseVector]) -> list[SparseVector]:
    return [{col: QQ.convert(val) for col, val in row.items() if val} for row in rows if any(row.values())]


def row_reduce(rows: Iterable[SparseVector], ncols: int) -> tuple[list[SparseVector], list[int]]:
    """Reduced row echelon form of the matrix with the given rows.

    Args:
        rows: Sparse rows.
        ncols: Number of columns.

    Returns:
        The nonzero rref rows in pivot order and the list of pivot columns.
    """
    rows = _clean(rows)
    if not rows or ncols == 0:
        return [], []
    matrix = DomainMatrix({i: row for i, row in enumerate(rows)}, (len(rows), ncols), QQ)
    reduced, pivots = matrix.rref()
    entries = reduced.to_sparse().rep
    result = []
    for index in range(len(pivots)):
        result.append(dict(entries.get(index, {})))
    return result, list(pivots)


def rank(rows: Iterable[SparseVector], ncols: int) -> int:
    """Rank of the matrix with the given rows."""
    return len(row_reduce(rows, ncols)[1])


def nullspace(rows: Iterable[SparseVector], ncols: int) -> list[SparseVector]:
    """Basis of {v : row · v = 0 for every row}, read off the rref."""
    reduced, pivots = row_reduce(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = {free: QQ(1)}
        for pivot, row in zip(pivots, reduced):
            value = row.get(free)
            if value:
                vector[pivot] = -value
        basis.append(vector)
    return basis


def intersect_subspaces(subspaces: Sequence[Sequence[SparseVector]], ncols: int) -> list[SparseVector]:
    """Intersection of row spaces, returned as rref rows.

    Uses U ∩ W = (U^⊥ + W^⊥)^⊥ for the standard pairing.
    """
    if not subspaces:
        return [{i: QQ(1)} for i in range(ncols)]
    complement = []
    for subspace in subspaces:
        complement.extend(nullspace(subspace, ncols))
    return row_reduce(nullspace(complement, ncols), ncols)[0]


def in_span(vector: SparseVector, basis: Sequence[SparseVector], ncols: int) -> bool:
    """True iff ``vector`` lies in the row space of ``basis``."""
    base_rank = rank(basis, ncols)
    return rank(list(basis) + [vector], ncols) == base_rank


def is_proportional(first: SparseVector, second: SparseVector, ncols: int) -> bool:
    """True iff two nonzero vectors span the same line."""
    return rank([first, second], ncols) == 1


def columns_to_rows(columns: Sequence[SparseVector], offset: int = 0) -> dict[int, SparseVector]:
    """Transpose a matrix given by columns; column j lands at unknown ``offset + j``."""
    rows: dict[int, SparseVector] = {}
    for j, column in enumerate(columns):
        for i, value in column.items():
            if value:
                rows.setdefault(i, {})[offset + j] = value
    return rows


def solve_columns(columns: Sequence[SparseVector], target: SparseVector) -> SparseVector | None:
    """Some c with Σ c_j·columns[j] = target, or None when target is outside the column span."""
    unknowns = len(columns)
    rows = columns_to_rows(list(columns) + [{i: -v for i, v in target.items()}])
    for vector in nullspace(rows.values(), unknowns + 1):
        last = vector.get(unknowns)
        if last:
            return {j: v / last for j, v in vector.items() if j != unknowns}
    return None


def random_sample(rng: random.Random, columns: Sequence[int]) -> SparseVector:
    """A vector with independent uniform coefficients from the nonzero sample range on ``columns``."""
    choices = [c for c in range(-config.SAMPLE_RANGE, config.SAMPLE_RANGE + 1) if c]
    return {col: QQ(rng.choice(choices)) for col in columns}


def content_hash(payload) -> str:
    """Stable sha256 over a JSON-serializable payload."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
