"""Dense linear algebra over GF(p): reduced row echelon form, null spaces,
affine linear-system solving.

Vectors are plain tuples of ints in [0, p); the field is passed alongside.
RREF output is canonical: two generating sets with equal span produce
identical bases, which is what lets subspaces and flats be hashed and
compared structurally everywhere else in the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .field import Field

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class RrefBasis:
    """Rows in reduced row echelon form plus their pivot columns."""

    rows: Tuple[Vector, ...]
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.rows)


def _eliminate(rows: list[list[int]], field: Field) -> Tuple[list[list[int]], list[int]]:
    """In-place Gauss-Jordan elimination; returns (reduced rows, pivots)."""
    if not rows:
        return [], []
    n = len(rows[0])
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        pivot_row = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [field.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def rref(vectors: Iterable[Vector], field: Field) -> RrefBasis:
    """Canonical reduced row echelon basis of the span of the input vectors.

    Empty input (or all-zero input) yields the rank-0 basis.
    """
    rows = [list(v) for v in vectors]
    dims = {len(r) for r in rows}
    if len(dims) > 1:
        raise ValueError("vectors of mixed ambient dimension")
    reduced, pivots = _eliminate(rows, field)
    return RrefBasis(tuple(tuple(r) for r in reduced), tuple(pivots))


def reduce_vector(v: Vector, basis: RrefBasis, field: Field) -> Vector:
    """Residual of v after eliminating every pivot coordinate of the basis.

    The result has a zero in each pivot column; it is the zero vector iff v
    lies in the span of the basis.
    """
    out = list(v)
    for row, piv in zip(basis.rows, basis.pivots):
        coeff = out[piv]
        if coeff != 0:
            out = [field.sub(x, field.mul(coeff, y)) for x, y in zip(out, row)]
    return tuple(out)


def in_span(v: Vector, basis: RrefBasis, field: Field) -> bool:
    return all(x == 0 for x in reduce_vector(v, basis, field))


def null_space(basis: RrefBasis, n: int, field: Field) -> RrefBasis:
    """Canonical basis of {c in F^n : B c = 0} for the row space B.

    Applying this to a subspace basis yields the linear functionals cutting
    out the subspace, which is how flats turn into equation systems.
    """
    pivot_set = set(basis.pivots)
    free_cols = [j for j in range(n) if j not in pivot_set]
    rows: list[Vector] = []
    for j in free_cols:
        vec = [0] * n
        vec[j] = 1
        for row, piv in zip(basis.rows, basis.pivots):
            vec[piv] = field.neg(row[j])
        rows.append(tuple(vec))
    # Rows are already independent; run rref to get the canonical form.
    return rref(rows, field)


def solve_affine_system(
    equations: Sequence[Tuple[Vector, int]], n: int, field: Field
) -> Optional[Tuple[Vector, RrefBasis]]:
    """Solve the stacked system {c . x = d} exactly.

    Returns (particular solution with free coordinates set to 0, null-space
    basis of the homogeneous part), or None if the system is inconsistent.
    An empty equation list describes all of F^n.
    """
    aug = [list(c) + [d % field.p] for c, d in equations]
    reduced, pivots = _eliminate(aug, field)
    if n in pivots:
        return None
    coeff_basis = RrefBasis(
        tuple(tuple(r[:n]) for r in reduced), tuple(pivots)
    )
    particular = [0] * n
    for row, piv in zip(reduced, pivots):
        particular[piv] = row[n]
    return tuple(particular), null_space(coeff_basis, n, field)
