import math
from fractions import Fraction

import pytest

from conftest import random_corpus
from kplab.config import Configuration, gen_degenerate
from kplab.exponents import PowerProduct
from kplab.field import Field
from kplab.flats import enumerate_points, make_flat, span_of
from kplab.incidence import (
    EmptyRefinementError,
    PreconditionError,
    build_refinement_chain,
    check_main_bound,
    check_max_ic,
    cs_holder_count,
    hypothesis_check,
    incidence_count,
    jr_decompose,
    refine_dyadic,
)


def single_flat_config(fld, n, k, with_points=True):
    basis = [tuple(1 if j == i else 0 for j in range(n)) for i in range(k)]
    flat = make_flat(span_of(basis, n, fld), tuple([0] * n), fld)
    points = frozenset(enumerate_points(flat, fld)) if with_points else frozenset()
    return Configuration(fld, n, k, points, (flat,))


class TestIncidenceCount:
    def test_full_flat(self, f3):
        cfg = single_flat_config(f3, 3, 2)
        assert incidence_count(cfg).total == 9

    def test_degenerate_pinned(self, f3):
        assert incidence_count(gen_degenerate(4, 2, 1, f3)).total == 39

    def test_empty_points(self, f3):
        cfg = single_flat_config(f3, 3, 2, with_points=False)
        index = incidence_count(cfg)
        assert index.total == 0
        assert index.per_flat[cfg.flats[0]] == 0

    def test_marginals_agree(self, f3):
        for _, cfg in random_corpus(4, 2, 3, 10):
            index = incidence_count(cfg)
            assert index.total == sum(index.per_flat.values())
            assert index.total == sum(len(fl) for fl in index.per_point.values())


class TestCsHolder:
    def test_m1_is_incidence_count(self, f3):
        cfg = gen_degenerate(4, 2, 1, f3)
        assert cs_holder_count(cfg, 1) == incidence_count(cfg).total

    def test_single_flat_equality(self, f3):
        cfg = single_flat_config(f3, 3, 1)
        c = incidence_count(cfg).total
        assert cs_holder_count(cfg, 2) == c * c

    def test_degenerate_tight(self, f3):
        # Uniform per-flat counts make Cauchy-Schwarz an equality:
        # 13 * 3^2 = 117 = 39^2 / 13.
        cfg = gen_degenerate(4, 2, 1, f3)
        assert cs_holder_count(cfg, 2) == 117

    def test_invalid_m(self, f3):
        with pytest.raises(PreconditionError):
            cs_holder_count(gen_degenerate(4, 2, 1, f3), 0)


class TestJrDecompose:
    def test_degenerate_pinned(self, f3):
        decomp = jr_decompose(gen_degenerate(4, 2, 1, f3), 1)
        assert decomp.total == 117
        assert decomp.strata == (39, 78)

    def test_single_point_all_constant(self, f3):
        cfg = single_flat_config(f3, 3, 1)
        cfg = cfg.with_points(frozenset([next(iter(sorted(cfg.points)))]))
        decomp = jr_decompose(cfg, 1)
        assert decomp.total == 1
        assert decomp.strata == (1, 0)

    def test_partition_and_stratum0_on_corpus(self):
        for _, cfg in random_corpus(3, 1, 3, 20):
            index = incidence_count(cfg)
            for r in (1,):
                decomp = jr_decompose(cfg, r, index)
                assert sum(decomp.strata) == decomp.total
                assert decomp.strata[0] == index.total

    def test_invalid_r(self, f3):
        with pytest.raises(PreconditionError):
            jr_decompose(gen_degenerate(4, 2, 1, f3), 3)


class TestRefineDyadic:
    def test_uniform_counts_keep_everything(self, f3):
        cfg = gen_degenerate(4, 2, 1, f3)
        refined = refine_dyadic(cfg)
        assert set(refined.flats) == set(cfg.flats)
        assert refined.refined_total == 39

    def test_one_heavy_flat_wins(self):
        # Per-flat counts {8, 1, 1}: level 3 contributes 8 > 2 from level 0.
        fld = Field(11)
        l1 = make_flat(span_of([(1, 0)], 2, fld), (0, 0), fld)
        l2 = make_flat(span_of([(0, 1)], 2, fld), (9, 0), fld)
        l3 = make_flat(span_of([(0, 1)], 2, fld), (10, 0), fld)
        points = frozenset([(i, 0) for i in range(8)] + [(9, 1), (10, 2)])
        cfg = Configuration(fld, 2, 1, points, (l1, l2, l3))
        refined = refine_dyadic(cfg)
        assert refined.bucket_level == 3
        assert refined.flats == (l1,)
        assert refined.refined_total == 8

    def test_pigeonhole_guarantee_on_corpus(self):
        for _, cfg in random_corpus(4, 2, 3, 30):
            index = incidence_count(cfg)
            if index.total == 0:
                with pytest.raises(EmptyRefinementError):
                    refine_dyadic(cfg, index)
                continue
            refined = refine_dyadic(cfg, index)
            levels = {
                c.bit_length() - 1 for c in index.per_flat.values() if c > 0
            }
            assert refined.refined_total * len(levels) >= index.total
            # Loose closed-form version of the same guarantee.
            bound = cfg.k * math.ceil(math.log2(cfg.field.p)) + 2
            assert refined.refined_total * bound >= index.total


class TestHypothesisCheck:
    def test_degenerate_h2_ratio_one_fails_margin(self, f3):
        verdict = hypothesis_check(gen_degenerate(4, 2, 1, f3), "H2")
        assert verdict.ratio == PowerProduct.integer(1)
        assert not verdict.holds

    def test_full_space_h2_ratio_is_p(self, f3):
        flats = []
        from kplab.flats import enumerate_coset_representatives, enumerate_grassmannian

        for pi in enumerate_grassmannian(2, 1, f3):
            for rep in enumerate_coset_representatives(pi, f3):
                flats.append(make_flat(pi, rep, f3))
        points = frozenset((x, y) for x in range(3) for y in range(3))
        cfg = Configuration(f3, 2, 1, points, tuple(flats))
        verdict = hypothesis_check(cfg, "H2")
        assert verdict.ratio == PowerProduct.integer(3)

    def test_empty_points_fail(self, f3):
        cfg = single_flat_config(f3, 3, 1, with_points=False)
        assert not hypothesis_check(cfg, "H1").holds

    def test_unknown_hypothesis(self, f3):
        with pytest.raises(PreconditionError):
            hypothesis_check(gen_degenerate(4, 2, 1, f3), "H3")


class TestCheckMaxIc:
    def test_single_flat_ratio(self, f3):
        n, k = 3, 1
        cfg = single_flat_config(f3, n, k)
        report = check_max_ic(cfg, Fraction(1), Fraction(1))
        assert report.ratio == PowerProduct([(3, Fraction(-k * (n - k)))])

    def test_chain_inequality_on_corpus(self):
        for _, cfg in random_corpus(4, 2, 3, 20):
            assert check_max_ic(cfg, Fraction(2), Fraction(4)).chain_holds

    def test_degenerate_endpoint_finite(self, f3):
        report = check_max_ic(gen_degenerate(4, 2, 1, f3), Fraction(2), Fraction(4))
        assert report.ratio_float is not None and report.ratio_float > 0

    def test_requires_direction_separated(self, f3):
        flat = make_flat(span_of([(1, 0)], 2, f3), (0, 0), f3)
        other = make_flat(span_of([(1, 0)], 2, f3), (0, 1), f3)
        cfg = Configuration(f3, 2, 1, frozenset([(0, 0)]), (flat, other))
        with pytest.raises(PreconditionError):
            check_max_ic(cfg, Fraction(2), Fraction(2))


class TestCheckMainBound:
    @pytest.mark.parametrize("n,k,p", [(4, 2, 3), (4, 2, 5), (5, 2, 3), (5, 3, 3)])
    def test_degenerate_ratio_near_one(self, n, k, p):
        report = check_main_bound(gen_degenerate(n, k, 1, Field(p)))
        assert report.notes["dominant_term"] == "Pi_F"
        assert Fraction(1, 4) <= Fraction(report.ratios["main_bound"]) <= 4

    def test_empty_points_absent(self, f3):
        cfg = single_flat_config(f3, 4, 2, with_points=False)
        report = check_main_bound(cfg)
        assert report.ratios["main_bound"] is None
        assert report.notes["dominant_term"] == "absent"

    def test_k_range_enforced(self, f3):
        with pytest.raises(PreconditionError):
            check_main_bound(single_flat_config(f3, 3, 1))


class TestRefinementChain:
    def test_degenerate_pinned_counts(self, f3):
        chain = build_refinement_chain(gen_degenerate(4, 2, 1, f3))
        # Ordered distinct collinear pairs: 3*2 per plane over 13 planes.
        assert chain.ik_prime == 78
        assert chain.ik == 78
        assert chain.vk_prime == 1014
        assert chain.vk == 936
        # No plane has a point off the common line, so no extended pairs.
        assert chain.vkp == 0
        assert chain.d_size == 0

    def test_invariants_on_corpus(self):
        for _, cfg in random_corpus(4, 2, 3, 15):
            index = incidence_count(cfg)
            if index.total == 0:
                continue
            chain = build_refinement_chain(cfg)
            assert 0 <= chain.ik <= chain.ik_prime
            assert chain.vk <= chain.vk_prime
            assert chain.vk_prime == chain.vk + sum(
                len(g) for g in chain.spine_groups.values()
            )
            assert chain.holder_lower_holds
            assert chain.cs_lower_holds

    def test_empty_configuration_rejected(self, f3):
        cfg = single_flat_config(f3, 4, 2, with_points=False)
        with pytest.raises(EmptyRefinementError):
            build_refinement_chain(cfg)
