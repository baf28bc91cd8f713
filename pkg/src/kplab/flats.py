"""Linear subspaces, affine flats, and their enumeration over GF(p).

Subspaces carry a canonical RREF basis, flats carry a canonical coset
representative (zero in every pivot coordinate of the direction), so
equality and hashing are structural throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .field import Field
from .linalg import RrefBasis, Vector, in_span, null_space, reduce_vector, rref, solve_affine_system


@dataclass(frozen=True)
class LinearSubspace:
    """A k-dimensional subspace of F^n in canonical RREF form."""

    ambient: int
    basis: RrefBasis

    @property
    def dim(self) -> int:
        return self.basis.rank

    def contains(self, v: Vector, field: Field) -> bool:
        return in_span(v, self.basis, field)

    def contains_subspace(self, other: "LinearSubspace", field: Field) -> bool:
        return all(self.contains(row, field) for row in other.basis.rows)


@dataclass(frozen=True)
class AffineFlat:
    """A coset representative + direction subspace; representative canonical."""

    direction: LinearSubspace
    representative: Vector

    @property
    def ambient(self) -> int:
        return self.direction.ambient

    @property
    def dim(self) -> int:
        return self.direction.dim


def span_of(vectors: Iterable[Vector], n: int, field: Field) -> LinearSubspace:
    basis = rref(vectors, field)
    if basis.rows and len(basis.rows[0]) != n:
        raise ValueError("ambient dimension mismatch")
    return LinearSubspace(n, basis)


def zero_subspace(n: int) -> LinearSubspace:
    return LinearSubspace(n, RrefBasis((), ()))


def make_flat(direction: LinearSubspace, point: Vector, field: Field) -> AffineFlat:
    """Canonical affine flat through `point` with the given direction."""
    rep = reduce_vector(point, direction.basis, field)
    return AffineFlat(direction, rep)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (k - i) - 1
    assert num % den == 0
    return num // den


def enumerate_grassmannian(n: int, k: int, field: Field) -> Iterator[LinearSubspace]:
    """All k-subspaces of F^n, each exactly once, in deterministic order.

    Pivot patterns are visited lexicographically; for each pattern the free
    entries (RREF shape) run through all field values in ascending order.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        yield zero_subspace(n)
        return
    for pivots in itertools.combinations(range(n), k):
        pivot_set = set(pivots)
        free_positions = [
            (i, j)
            for i in range(k)
            for j in range(pivots[i] + 1, n)
            if j not in pivot_set
        ]
        for values in itertools.product(field.elements(), repeat=len(free_positions)):
            rows = [[0] * n for _ in range(k)]
            for i, piv in enumerate(pivots):
                rows[i][piv] = 1
            for (i, j), v in zip(free_positions, values):
                rows[i][j] = v
            basis = RrefBasis(tuple(tuple(r) for r in rows), tuple(pivots))
            yield LinearSubspace(n, basis)


def enumerate_points(flat: AffineFlat, field: Field) -> Iterator[Vector]:
    """All p^dim points of the flat, deterministically."""
    rows = flat.direction.basis.rows
    rep = flat.representative
    if not rows:
        yield rep
        return
    n = flat.ambient
    for coeffs in itertools.product(field.elements(), repeat=len(rows)):
        point = list(rep)
        for c, row in zip(coeffs, rows):
            if c:
                point = [field.add(x, field.mul(c, y)) for x, y in zip(point, row)]
        yield tuple(point)


def membership(point: Vector, flat: AffineFlat, field: Field) -> bool:
    diff = tuple(field.sub(a, b) for a, b in zip(point, flat.representative))
    return in_span(diff, flat.direction.basis, field)


def flat_equations(flat: AffineFlat, field: Field) -> List[Tuple[Vector, int]]:
    """The n - dim linear equations c . x = c . rep cutting out the flat."""
    n = flat.ambient
    functionals = null_space(flat.direction.basis, n, field)
    eqs = []
    for c in functionals.rows:
        rhs = 0
        for ci, xi in zip(c, flat.representative):
            rhs = field.add(rhs, field.mul(ci, xi))
        eqs.append((c, rhs))
    return eqs


def intersect_flats(flats: Sequence[AffineFlat], field: Field) -> Optional[AffineFlat]:
    """Common solution set of the flats, canonicalized; None if empty."""
    if not flats:
        raise ValueError("empty flat list")
    n = flats[0].ambient
    if any(f.ambient != n for f in flats):
        raise ValueError("ambient dimension mismatch")
    equations: List[Tuple[Vector, int]] = []
    for f in flats:
        equations.extend(flat_equations(f, field))
    solution = solve_affine_system(equations, n, field)
    if solution is None:
        return None
    particular, direction_basis = solution
    return make_flat(LinearSubspace(n, direction_basis), particular, field)


def affine_hull(points: Sequence[Vector], field: Field) -> Tuple[int, AffineFlat]:
    """Dimension and canonical flat of the affine span of the points."""
    if not points:
        raise ValueError("affine hull of empty point set")
    base = points[0]
    diffs = [
        tuple(field.sub(a, b) for a, b in zip(q, base)) for q in points[1:]
    ]
    direction = span_of(diffs, len(base), field)
    return direction.dim, make_flat(direction, base, field)


def is_direction_separated(flats: Sequence[AffineFlat]) -> bool:
    directions = {f.direction for f in flats}
    return len(directions) == len(flats)


def enumerate_coset_representatives(direction: LinearSubspace, field: Field) -> Iterator[Vector]:
    """Canonical representatives of all p^(n-k) cosets of the subspace."""
    n = direction.ambient
    pivot_set = set(direction.basis.pivots)
    free_cols = [j for j in range(n) if j not in pivot_set]
    for values in itertools.product(field.elements(), repeat=len(free_cols)):
        rep = [0] * n
        for j, v in zip(free_cols, values):
            rep[j] = v
        yield tuple(rep)
