"""Exact counting of (k+1)-simplices, (k,l)-chains and the deleted-spine
plane pairs, plus the evaluation of the simplex upper/lower bound
expressions.  A brute-force simplex counter is kept permanently as the
oracle for the fast path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Set, Tuple

from .config import Configuration
from .flats import AffineFlat, affine_hull, membership, span_of
from .incidence import (
    IncidenceIndex,
    RefinementChainReport,
    build_refinement_chain,
    incidence_count,
)
from .linalg import Vector
from .reports import CountReport

BRUTE_FORCE_POINT_GUARD = 40
CHAIN_POINT_GUARD = 20


class SizeError(RuntimeError):
    pass


def _hull_flat(points: Tuple[Vector, ...], fld) -> Tuple[int, AffineFlat]:
    return affine_hull(points, fld)


def count_simplices(
    config: Configuration,
    flats: Optional[Tuple[AffineFlat, ...]] = None,
    index: Optional[IncidenceIndex] = None,
) -> int:
    """Unordered count of (k+2)-point sets spanning dimension k+1 whose k+2
    facet hulls all belong to the flat family.

    Fast path: pivot on each flat as a face.  For every spanning (k+1)-subset
    of its points whose hull is the flat itself, each apex completing a
    simplex is found through the remaining facet checks; every simplex is
    discovered once per face, so the tally divides by k+2 exactly.
    """
    fld = config.field
    k = config.k
    family = set(flats if flats is not None else config.flats)
    if not family or len(config.points) < k + 2:
        return 0
    if index is None:
        index = incidence_count(config)
    flat_points: Dict[AffineFlat, list] = {}
    for pt, incident in index.per_point.items():
        for flat in incident:
            if flat in family:
                flat_points.setdefault(flat, []).append(pt)
    hull_cache: Dict[Tuple[Vector, ...], Tuple[int, AffineFlat]] = {}

    def hull(points: Tuple[Vector, ...]) -> Tuple[int, AffineFlat]:
        cached = hull_cache.get(points)
        if cached is None:
            cached = _hull_flat(points, fld)
            hull_cache[points] = cached
        return cached

    face_incidences = 0
    for face, pts in flat_points.items():
        pts = sorted(pts)
        for base in itertools.combinations(pts, k + 1):
            dim, base_hull = hull(base)
            if dim != k or base_hull != face:
                continue
            for apex in sorted(config.points):
                if apex in base or membership(apex, face, fld):
                    continue
                if _completes_simplex(base, apex, family, hull):
                    face_incidences += 1
    assert face_incidences % (k + 2) == 0
    return face_incidences // (k + 2)


def _completes_simplex(base, apex, family, hull) -> bool:
    k = len(base) - 1
    for omit in range(len(base)):
        facet_vertices = tuple(sorted(base[:omit] + base[omit + 1 :] + (apex,)))
        dim, facet = hull(facet_vertices)
        if dim != k or facet not in family:
            return False
    return True


def count_simplices_bruteforce(
    config: Configuration, flats: Optional[Tuple[AffineFlat, ...]] = None
) -> int:
    """Independent oracle: iterate all (k+2)-subsets of P directly."""
    if len(config.points) > BRUTE_FORCE_POINT_GUARD:
        raise SizeError(
            f"brute force limited to {BRUTE_FORCE_POINT_GUARD} points, "
            f"got {len(config.points)}"
        )
    fld = config.field
    k = config.k
    family = set(flats if flats is not None else config.flats)
    if not family:
        return 0
    count = 0
    for vertices in itertools.combinations(sorted(config.points), k + 2):
        dim, _ = affine_hull(vertices, fld)
        if dim != k + 1:
            continue
        ok = True
        for i in range(k + 2):
            fdim, facet = affine_hull(vertices[:i] + vertices[i + 1 :], fld)
            if fdim != k or facet not in family:
                ok = False
                break
        if ok:
            count += 1
    return count


def count_chains(config: Configuration, l: int) -> int:
    """Number of (k,l)-chains, ordered in both the point tuple and the flat
    tuple: (k+2) points spanning dimension k+1 and l flats whose every
    m-fold intersection has dimension k-m+1 and is affinely spanned by the
    chain points lying on it."""
    k = config.k
    if not 2 <= l <= k + 1:
        raise ValueError(f"need 2 <= l <= k+1={k + 1}, got l={l}")
    if len(config.points) > CHAIN_POINT_GUARD:
        raise SizeError(
            f"chain counting limited to {CHAIN_POINT_GUARD} points, "
            f"got {len(config.points)}"
        )
    fld = config.field
    from .flats import intersect_flats

    # Unordered flat subsets whose intersection lattice has the right
    # dimensions; the point/flat conditions are ordering-invariant, so the
    # ordered count is the unordered count times (k+2)! * l!.
    valid_pairs = 0
    spanning_sets = [
        vertices
        for vertices in itertools.combinations(sorted(config.points), k + 2)
        if affine_hull(vertices, fld)[0] == k + 1
    ]
    if not spanning_sets:
        return 0
    for flat_set in itertools.combinations(config.flats, l):
        intersections: Dict[Tuple[int, ...], Optional[AffineFlat]] = {}
        lattice_ok = True
        for m in range(2, l + 1):
            for subset in itertools.combinations(range(l), m):
                inter = intersect_flats([flat_set[i] for i in subset], fld)
                if inter is None or inter.dim != k - m + 1:
                    lattice_ok = False
                    break
                intersections[subset] = inter
            if not lattice_ok:
                break
        if not lattice_ok:
            continue
        for vertices in spanning_sets:
            if _chain_conditions(vertices, flat_set, intersections, k, l, fld):
                valid_pairs += 1
    return valid_pairs * math.factorial(k + 2) * math.factorial(l)


def _chain_conditions(vertices, flat_set, intersections, k, l, fld) -> bool:
    # m = 1: each flat must be spanned by k+1 of the chain points.
    for flat in flat_set:
        on = tuple(v for v in vertices if membership(v, flat, fld))
        if len(on) < k + 1 or affine_hull(on, fld) != (k, flat):
            return False
    for subset, inter in intersections.items():
        m = len(subset)
        on = tuple(v for v in vertices if membership(v, inter, fld))
        if len(on) < k - m + 2 or affine_hull(on, fld) != (k - m + 1, inter):
            return False
    return True


def v_k_del(chain: RefinementChainReport) -> int:
    """Number of distinct ordered plane pairs admitting a shared spanning
    spine tuple."""
    pairs: Set[Tuple[AffineFlat, AffineFlat]] = set()
    for group in chain.spine_groups.values():
        if len(group) < 2:
            continue
        for a, b in itertools.permutations(group, 2):
            pairs.add((a, b))
    return len(pairs)


def _deleted_pairs(chain: RefinementChainReport) -> Set[Tuple[AffineFlat, AffineFlat]]:
    pairs: Set[Tuple[AffineFlat, AffineFlat]] = set()
    for group in chain.spine_groups.values():
        for a, b in itertools.permutations(group, 2):
            pairs.add((a, b))
    return pairs


def lambda_flat_counts(config: Configuration, chain: RefinementChainReport) -> Tuple[int, ...]:
    """For each deleted-spine plane pair, the number of family flats lying
    inside the (k+1)-dimensional span of the pair."""
    fld = config.field
    counts = []
    for pi0, pi in sorted(
        _deleted_pairs(chain),
        key=lambda pr: (pr[0].representative, pr[0].direction.basis.rows,
                        pr[1].representative, pr[1].direction.basis.rows),
    ):
        diff = tuple(fld.sub(a, b) for a, b in zip(pi.representative, pi0.representative))
        rows = pi0.direction.basis.rows + pi.direction.basis.rows + (diff,)
        span = span_of(rows, config.n, fld)
        inside = 0
        for flat in chain.refined.flats:
            rep_diff = tuple(
                fld.sub(a, b) for a, b in zip(flat.representative, pi0.representative)
            )
            if span.contains(rep_diff, fld) and span.contains_subspace(flat.direction, fld):
                inside += 1
        counts.append(inside)
    return tuple(counts)


def simplex_bound_report(config: Configuration) -> CountReport:
    """Exact |S_k|, |V_k|, |I~|, |Pi~| and the three bound expressions: the
    deleted-spine upper bound, the inductive lower bound and the
    independence heuristic.  Ratios are reported, never asserted."""
    n, k, p = config.n, config.k, config.field.p
    report = CountReport("simplex-bounds", params={"n": n, "k": k, "p": p})
    if not config.direction_separated:
        raise ValueError("configuration is not direction separated")
    index = incidence_count(config)
    num_points = len(config.points)
    num_flats = len(config.flats)
    report.counts.update(
        {"num_points": num_points, "num_flats": num_flats, "incidences": index.total}
    )
    if index.total == 0:
        report.ratios.update({"upper": None, "lower": None, "heuristic": None})
        return report
    chain = build_refinement_chain(config)
    refined = chain.refined
    simplices = count_simplices(config, flats=refined.flats, index=index)
    ordered = simplices * math.factorial(k + 2)
    deleted = v_k_del(chain)
    i_tilde, m_flats = refined.refined_total, refined.num_flats
    report.counts.update(
        {
            "simplices": simplices,
            "simplices_ordered": ordered,
            "vk": chain.vk,
            "vk_del": deleted,
            "refined_incidences": i_tilde,
            "refined_flats": m_flats,
        }
    )
    upper = (
        Fraction(chain.vk)
        * Fraction(m_flats * p, i_tilde) ** k
        * Fraction(p) ** (k * k)
    )
    report.ratios["upper"] = float(Fraction(simplices) / upper) if upper else None
    report.verdicts["spine_deletion_lower"] = (
        Fraction(chain.vk) >= Fraction(i_tilde, 10 * m_flats * p) ** k * deleted
    )
    if chain.vk > 0 and simplices > 0:
        lower = (
            Fraction(chain.vk) ** (k + 1)
            * Fraction(m_flats) ** (k * k - 2 * k - 2)
            / (Fraction(num_points) ** k * Fraction(i_tilde) ** (k * k - k - 2))
        )
        report.ratios["lower"] = float(Fraction(simplices) / lower) if lower else None
    else:
        report.ratios["lower"] = None
    if simplices > 0:
        heuristic = (
            Fraction(num_points) ** (k + 2)
            * Fraction(num_flats) ** (k + 2)
            * Fraction(index.total, num_points * num_flats) ** ((k + 1) * (k + 2))
        )
        report.ratios["heuristic"] = (
            float(Fraction(simplices) / heuristic) if heuristic else None
        )
    else:
        report.ratios["heuristic"] = None
    lam = lambda_flat_counts(config, chain)
    report.notes["lambda_max_flats"] = max(lam, default=0)
    return report
