"""The (n,k) maximal operator: exact application over the Grassmannian,
Lebesgue norms against the counting and normalized measures, and a
seeded witness search lower-bounding the operator norm.

Function values are exact rationals; the operator itself (coset sums and
sups) is exact.  Norms with rational exponents are rendered as floats, but
the exponent identities that matter are checked with PowerProduct.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .config import gen_degenerate
from .exponents import PowerProduct
from .field import Field
from .flats import (
    LinearSubspace,
    enumerate_coset_representatives,
    enumerate_grassmannian,
    enumerate_points,
    gaussian_binomial,
    make_flat,
)
from .linalg import Vector, reduce_vector


@dataclass(frozen=True)
class GridFunction:
    """Nonnegative rational-valued function on F^n, sparse (absent = 0)."""

    field: Field
    n: int
    values: Tuple[Tuple[Vector, Fraction], ...]

    @classmethod
    def from_dict(cls, field: Field, n: int, values: Dict[Vector, Fraction]) -> "GridFunction":
        items = []
        for pt, v in sorted(values.items()):
            v = Fraction(v)
            if v < 0:
                raise ValueError("grid function values must be nonnegative")
            if v:
                items.append((pt, v))
        return cls(field, n, tuple(items))

    @classmethod
    def indicator(cls, field: Field, n: int, points: Iterable[Vector]) -> "GridFunction":
        return cls.from_dict(field, n, {pt: Fraction(1) for pt in points})

    @classmethod
    def constant(cls, field: Field, n: int, value: Fraction = Fraction(1)) -> "GridFunction":
        import itertools

        pts = itertools.product(field.elements(), repeat=n)
        return cls.from_dict(field, n, {pt: Fraction(value) for pt in pts})

    def is_zero(self) -> bool:
        return not self.values

    def as_dict(self) -> Dict[Vector, Fraction]:
        return dict(self.values)


def apply_maximal(f: GridFunction, n: int, k: int) -> Dict[LinearSubspace, Fraction]:
    """For each direction, the maximum coset sum of f.

    The sup over all translates x + pi equals the max over the p^{n-k}
    cosets of pi, so each nonzero point is binned by its canonical coset
    representative and the per-direction max is taken over the bins.
    """
    fld = f.field
    out: Dict[LinearSubspace, Fraction] = {}
    for pi in enumerate_grassmannian(n, k, fld):
        sums: Dict[Vector, Fraction] = {}
        for pt, v in f.values:
            rep = reduce_vector(pt, pi.basis, fld)
            sums[rep] = sums.get(rep, Fraction(0)) + v
        out[pi] = max(sums.values(), default=Fraction(0))
    return out


def apply_maximal_bruteforce(f: GridFunction, n: int, k: int) -> Dict[LinearSubspace, Fraction]:
    """Tiny-instance oracle summing over every coset's points explicitly."""
    fld = f.field
    values = f.as_dict()
    out: Dict[LinearSubspace, Fraction] = {}
    for pi in enumerate_grassmannian(n, k, fld):
        best = Fraction(0)
        for rep in enumerate_coset_representatives(pi, fld):
            total = sum(
                (values.get(pt, Fraction(0)) for pt in enumerate_points(make_flat(pi, rep, fld), fld)),
                Fraction(0),
            )
            best = max(best, total)
        out[pi] = best
    return out


def lp_norm(f: GridFunction, p_exp) -> float:
    """(sum f^p)^{1/p} against counting measure; p = inf gives the max."""
    if not f.values:
        return 0.0
    if p_exp == math.inf:
        return float(max(v for _, v in f.values))
    p_exp = Fraction(p_exp)
    if p_exp < 1:
        raise ValueError("exponent must be >= 1")
    total = sum(float(v) ** float(p_exp) for _, v in f.values)
    return total ** (1 / float(p_exp))


def lq_norm_grassmann(
    g: Dict[LinearSubspace, Fraction], q_exp, n: int, k: int, field: Field
) -> float:
    """L^q norm with the weight |F|^{-k(n-k)} per Grassmannian element.

    Note the weighted total mass of G(n,k) exceeds 1 (the subspace count is
    larger than p^{k(n-k)}); the formula is applied as given and callers can
    report the mass alongside, see grassmann_measure_total.
    """
    if q_exp == math.inf:
        return float(max(g.values(), default=Fraction(0)))
    q_exp = Fraction(q_exp)
    if q_exp < 1:
        raise ValueError("exponent must be >= 1")
    weight = field.p ** (-k * (n - k))
    total = weight * sum(float(v) ** float(q_exp) for v in g.values())
    return total ** (1 / float(q_exp))


def grassmann_measure_total(n: int, k: int, p: int) -> Fraction:
    return Fraction(gaussian_binomial(n, k, p), p ** (k * (n - k)))


def operator_ratio(f: GridFunction, p_exp, q_exp, n: int, k: int) -> float:
    """The testable lower bound ||Tf||_q / ||f||_p for one witness f."""
    if f.is_zero():
        raise ValueError("operator ratio of the zero function")
    tf = apply_maximal(f, n, k)
    return lq_norm_grassmann(tf, q_exp, n, k, f.field) / lp_norm(f, p_exp)


def constant_witness_ratio_exact(
    n: int, k: int, field: Field, p_exp: Fraction, q_exp: Fraction
) -> PowerProduct:
    """Exact ratio for f identically 1:
    p^{k - n/p} * (|G(n,k)| / p^{k(n-k)})^{1/q}."""
    p_exp, q_exp = Fraction(p_exp), Fraction(q_exp)
    p = field.p
    return PowerProduct(
        [
            (p, Fraction(k) - Fraction(n) / p_exp),
            (gaussian_binomial(n, k, p), 1 / q_exp),
            (p, Fraction(-k * (n - k)) / q_exp),
        ]
    )


@dataclass
class SearchResult:
    best_ratio: float
    best_name: str
    witness: GridFunction
    all_ratios: Dict[str, float]


def default_candidates(
    n: int, k: int, field: Field, seed: int
) -> Dict[str, GridFunction]:
    """Built-in witness family: constant, point spike, r-flat indicators,
    random dyadic-density sets, degenerate-configuration points."""
    import itertools

    rng = random.Random(seed)
    fld = field
    out: Dict[str, GridFunction] = {}
    out["constant"] = GridFunction.constant(fld, n)
    origin = tuple([0] * n)
    out["point"] = GridFunction.indicator(fld, n, [origin])
    for r in range(1, k + 1):
        basis = [tuple(1 if j == i else 0 for j in range(n)) for i in range(r)]
        from .flats import span_of

        flat = make_flat(span_of(basis, n, fld), origin, fld)
        out[f"flat_dim_{r}"] = GridFunction.indicator(fld, n, enumerate_points(flat, fld))
    for exponent in (1, 2, 3):
        density = Fraction(1, 2**exponent)
        pts = [
            pt
            for pt in itertools.product(fld.elements(), repeat=n)
            if rng.randrange(density.denominator) < density.numerator
        ]
        if pts:
            out[f"random_density_1/{2**exponent}"] = GridFunction.indicator(fld, n, pts)
    if 1 <= k - 1 and k <= n - 1:
        deg = gen_degenerate(n, k, max(1, k - 1), fld)
        out["degenerate_points"] = GridFunction.indicator(fld, n, deg.points)
    return out


def empirical_norm_search(
    n: int,
    k: int,
    field: Field,
    p_exp,
    q_exp,
    candidates: Optional[Dict[str, GridFunction]] = None,
    seed: int = 0,
) -> SearchResult:
    """Maximize the operator ratio over a finite witness family.

    This is a certified lower bound on the operator norm (each witness is
    exact), not an estimate of the sup over all functions.
    """
    if candidates is None:
        candidates = default_candidates(n, k, field, seed)
    if not candidates:
        raise ValueError("empty candidate family")
    ratios = {
        name: operator_ratio(f, p_exp, q_exp, n, k)
        for name, f in sorted(candidates.items())
        if not f.is_zero()
    }
    best_name = max(ratios, key=lambda name: (ratios[name], name))
    return SearchResult(ratios[best_name], best_name, candidates[best_name], ratios)
