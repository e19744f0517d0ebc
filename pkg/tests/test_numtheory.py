import math
from fractions import Fraction

import pytest
from mpmath import mp

from hexband import (
    ExactRatio,
    ExplicitCF,
    HexGeometry,
    NumericRatio,
    QuadraticSurd,
    RatioClassKind,
    RationalRatioError,
    VertexCoupling,
    approx_constant,
    cf_expand,
    classify_ratio,
    commensurability_witness,
    convergents,
    gc1,
    predicted_gap_centers,
    ratio_divide,
)
from hexband.numtheory import reconstruct_rational

GOLDEN = QuadraticSurd(1, 2, 5)
SQRT2 = QuadraticSurd(0, 1, 2)
SQRT3 = QuadraticSurd(0, 1, 3)


class TestRatioInputs:
    def test_exact_ratio_reduces(self):
        r = ExactRatio(14, 6)
        assert (r.p, r.q) == (7, 3)
        assert r.invert().value() == pytest.approx(3 / 7)

    def test_surd_validation(self):
        with pytest.raises(ValueError):
            QuadraticSurd(0, 1, 4)  # perfect square
        with pytest.raises(ValueError):
            QuadraticSurd(0, 0, 2)  # zero denominator
        with pytest.raises(ValueError):
            QuadraticSurd(-5, 1, 2)  # negative value

    def test_surd_inversion_value(self):
        inv = GOLDEN.invert()
        assert inv.value() == pytest.approx(1 / GOLDEN.value(), rel=1e-14)
        # 3 - sqrt(2) needs a negative denominator representation
        surd = QuadraticSurd(-3, -1, 2)
        assert surd.value() == pytest.approx(3 - math.sqrt(2), rel=1e-14)
        assert surd.invert().value() == pytest.approx(1 / (3 - math.sqrt(2)), rel=1e-14)

    def test_exact_comparison(self):
        assert GOLDEN.compare_fraction(Fraction(3, 2)) == 1
        assert GOLDEN.compare_fraction(Fraction(2, 1)) == -1
        assert SQRT2.compare_fraction(Fraction(17, 12)) == -1
        assert SQRT2.compare_fraction(Fraction(7, 5)) == 1


class TestRatioDivide:
    def test_rational_by_rational(self):
        out = ratio_divide(ExactRatio(3, 2), ExactRatio(5, 7))
        assert isinstance(out, ExactRatio)
        assert (out.p, out.q) == (21, 10)

    def test_surd_by_rational(self):
        out = ratio_divide(GOLDEN, ExactRatio(2, 3))
        assert isinstance(out, QuadraticSurd)
        assert out.value() == pytest.approx(GOLDEN.value() * 1.5, rel=1e-14)

    def test_rational_by_surd(self):
        out = ratio_divide(ExactRatio(2, 1), SQRT2)
        assert isinstance(out, QuadraticSurd)
        assert out.value() == pytest.approx(2 / math.sqrt(2), rel=1e-14)

    def test_surd_by_surd_same_radicand(self):
        num = QuadraticSurd(1, 2, 5)
        den = QuadraticSurd(3, 2, 5)
        out = ratio_divide(num, den)
        assert isinstance(out, QuadraticSurd)
        assert out.value() == pytest.approx(num.value() / den.value(), rel=1e-14)

    def test_surd_by_itself_is_rational_one(self):
        out = ratio_divide(GOLDEN, GOLDEN)
        assert isinstance(out, ExactRatio)
        assert (out.p, out.q) == (1, 1)

    def test_mixed_radicands_fall_back_to_numeric(self):
        out = ratio_divide(SQRT2, SQRT3)
        assert isinstance(out, NumericRatio)
        assert out.value() == pytest.approx(math.sqrt(2 / 3), rel=1e-14)


class TestCFExpand:
    def test_rational_terminates(self):
        cf = cf_expand(ExactRatio(7, 3), 10)
        assert cf.a0 == 2
        assert cf.partials == (3,)
        assert cf.period is None

    def test_golden_ratio_period(self):
        cf = cf_expand(GOLDEN, 15)
        assert cf.a0 == 1
        assert cf.partials == tuple([1] * 15)
        assert cf.period == (1, 1)

    def test_sqrt2(self):
        cf = cf_expand(SQRT2, 10)
        assert cf.a0 == 1
        assert cf.partials == tuple([2] * 10)

    def test_sqrt3_alternating(self):
        cf = cf_expand(SQRT3, 10)
        assert cf.a0 == 1
        assert cf.partials == (1, 2, 1, 2, 1, 2, 1, 2, 1, 2)

    def test_surd_with_scaling_invariant(self):
        # (3 + sqrt(7))/4 has (D - P^2) not divisible by Q: exercises the
        # entry rescaling of the exact recurrence
        surd = QuadraticSurd(3, 4, 7)
        cf = cf_expand(surd, 12)
        value = cf.a0 + _cf_tail_value(cf.partials)
        assert value == pytest.approx(surd.value(), rel=1e-9)

    def test_float_input_of_rational_value(self):
        cf = cf_expand(NumericRatio(7 / 3), 10)
        assert cf.a0 == 2
        assert cf.partials[0] in (2, 3)  # float noise may split the quotient
        value = cf.a0 + _cf_tail_value(cf.partials)
        assert value == pytest.approx(7 / 3, abs=1e-12)
        assert not cf.exact

    def test_float_input_precision_exhaustion(self):
        cf = cf_expand(NumericRatio((1 + math.sqrt(5)) / 2), 60)
        assert cf.precision_exhausted
        assert all(p == 1 for p in cf.partials[:20])


def _cf_tail_value(partials):
    value = 0.0
    for a in reversed(partials):
        value = 1.0 / (a + value)
    return value


class TestConvergents:
    def test_golden_sequence(self):
        cf = cf_expand(GOLDEN, 10)
        convs = convergents(cf, GOLDEN, 5)
        assert [(c.p, c.q) for c in convs] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]
        assert [c.approach_sign for c in convs] == [1, -1, 1, -1, 1]

    def test_rational_terminal_convergent(self):
        cf = cf_expand(ExactRatio(7, 3), 10)
        convs = convergents(cf, ExactRatio(7, 3), cf.depth + 1)
        assert (convs[-1].p, convs[-1].q) == (7, 3)
        assert convs[-1].quality == 0.0
        assert convs[-1].approach_sign == 0

    def test_sqrt2_quality(self):
        cf = cf_expand(SQRT2, 10)
        convs = convergents(cf, SQRT2, 4)
        assert [(c.p, c.q) for c in convs] == [(1, 1), (3, 2), (7, 5), (17, 12)]
        mp.dps = 40
        expected = float(144 * abs(mp.sqrt(2) - mp.mpf(17) / 12))
        assert convs[-1].quality == pytest.approx(expected, rel=1e-9)
        assert convs[-1].quality == pytest.approx(0.3532470182743097, rel=1e-9)

    def test_determinant_identity(self):
        for ratio in (GOLDEN, SQRT2, SQRT3, ExactRatio(355, 113)):
            cf = cf_expand(ratio, 20)
            convs = convergents(cf, ratio, min(20, cf.depth + 1))
            for prev, cur in zip(convs, convs[1:]):
                assert abs(cur.p * prev.q - prev.p * cur.q) == 1

    def test_depth_exhausted(self):
        cf = cf_expand(ExactRatio(7, 3), 10)
        with pytest.raises(ValueError, match="depth exhausted"):
            convergents(cf, ExactRatio(7, 3), 5)

    def test_hurwitz_filter(self):
        # at depth 30, at least a third of the convergents approximate
        # better than 1/sqrt(5)
        bound = 1 / math.sqrt(5)
        for ratio in (GOLDEN, SQRT2, SQRT3):
            cf = cf_expand(ratio, 30)
            convs = convergents(cf, ratio, 30)
            passing = sum(1 for c in convs if c.quality < bound)
            assert passing >= math.ceil(30 / 3)


class TestClassify:
    def test_rational(self):
        cls = classify_ratio(ExactRatio(22, 7))
        assert cls.kind is RatioClassKind.RATIONAL
        assert cls.certified
        assert cls.rational_pq == (22, 7)

    def test_golden_ratio_gamma(self):
        cls = classify_ratio(GOLDEN, depth=20)
        assert cls.kind is RatioClassKind.BADLY_APPROXIMABLE
        assert cls.certified
        assert cls.gamma_lower == pytest.approx(1 / math.sqrt(5), rel=0.05)

    def test_numeric_cannot_certify(self):
        cls = classify_ratio(NumericRatio(0.7182818284590453))
        assert cls.kind is RatioClassKind.UNKNOWN_NUMERIC
        assert not cls.certified

    def test_numeric_of_golden_float_still_uncertified(self):
        cls = classify_ratio(NumericRatio((1 + math.sqrt(5)) / 2))
        assert cls.kind is RatioClassKind.UNKNOWN_NUMERIC

    def test_explicit_unbounded_generator(self):
        liouville = ExplicitCF(1, lambda j: 10**j, unbounded=True)
        cls = classify_ratio(liouville)
        assert cls.kind is RatioClassKind.LAST_ADMISSIBLE
        assert cls.certified

    def test_explicit_without_declaration(self):
        cls = classify_ratio(ExplicitCF(1, lambda j: 1, unbounded=False))
        assert cls.kind is RatioClassKind.UNKNOWN_NUMERIC


class TestApproxConstant:
    def test_golden_ratio(self):
        gamma = approx_constant(GOLDEN, depth=20)
        assert gamma == pytest.approx(1 / math.sqrt(5), rel=0.05)

    def test_sqrt2(self):
        gamma = approx_constant(SQRT2, depth=20)
        assert gamma == pytest.approx(1 / (2 * math.sqrt(2)), rel=0.01)

    def test_rational_rejected(self):
        with pytest.raises(RationalRatioError):
            approx_constant(ExactRatio(7, 3), depth=10)

    def test_inversion_agreement(self):
        for ratio in (GOLDEN, SQRT2):
            direct = approx_constant(ratio, depth=24)
            inverted = approx_constant(ratio.invert(), depth=24)
            assert direct == pytest.approx(inverted, rel=0.02)

    def test_class_preserved_under_inversion(self):
        for ratio in (GOLDEN, SQRT2, SQRT3):
            assert classify_ratio(ratio.invert()).kind is classify_ratio(ratio).kind


class TestPredictedGapCenters:
    def test_golden_positive_coupling(self):
        centers = predicted_gap_centers(GOLDEN, ExactRatio(1, 1), 6.0, 3)
        family_b = [c for c in centers if c.family == "b"]
        assert [c.q for c in family_b] == [2, 5, 13]
        assert [c.k for c in family_b] == pytest.approx([2 * math.pi, 5 * math.pi, 13 * math.pi])
        family_a = [c for c in centers if c.family == "a"]
        assert [c.q for c in family_a] == [2, 5, 13]
        assert [c.k for c in family_a] == pytest.approx(
            [q * math.pi / GOLDEN.value() for q in (2, 5, 13)]
        )

    def test_golden_negative_coupling_complementary_family(self):
        centers = predicted_gap_centers(GOLDEN, ExactRatio(1, 1), -6.0, 3)
        family_b = [c for c in centers if c.family == "b"]
        assert [c.q for c in family_b] == [1, 3, 8]

    def test_rational_ratio_rejected(self):
        with pytest.raises(RationalRatioError, match="commensurability"):
            predicted_gap_centers(ExactRatio(3, 1), ExactRatio(2, 1), 1.0, 2)

    def test_zero_coupling_rejected(self):
        with pytest.raises(ValueError):
            predicted_gap_centers(GOLDEN, ExactRatio(1, 1), 0.0, 2)

    def test_centers_are_sound_for_strong_coupling(self):
        # cross-module: GC1 opens on the right of each of the first three
        # stretched-family centers once the coupling beats the guarantee
        geom = HexGeometry(GOLDEN.value(), 1.0, 1.0)
        coupling = VertexCoupling(6.0)
        centers = [c for c in predicted_gap_centers(GOLDEN, ExactRatio(1, 1), 6.0, 3)
                   if c.family == "b"]
        for center in centers:
            hit = False
            for i in range(1, 2000):
                k = center.k + 0.5 * i / 2000
                try:
                    if gc1(geom, coupling, k):
                        hit = True
                        break
                except Exception:
                    continue
            assert hit, f"no GC1 gap in (k, k+0.5) for center {center}"


class TestCommensurabilityWitness:
    def test_integer_lengths(self):
        w = commensurability_witness(1, 2, 3)
        assert (w.p, w.q, w.r) == (1, 2, 3)
        assert w.d == pytest.approx(1.0)
        assert w.exact

    def test_float_integer_lengths(self):
        w = commensurability_witness(1.0, 2.0, 3.0)
        assert (w.p, w.q, w.r) == (1, 2, 3)
        assert not w.exact

    def test_fraction_lengths(self):
        w = commensurability_witness(Fraction(1, 2), Fraction(3, 2), Fraction(1))
        assert (w.p, w.q, w.r) == (1, 3, 2)
        assert w.d_exact == Fraction(1, 2)

    def test_gcd_reduction(self):
        w = commensurability_witness(2, 4, 6)
        assert (w.p, w.q, w.r) == (1, 2, 3)
        assert w.d_exact == Fraction(2)

    def test_irrational_ratio_gives_none(self):
        assert commensurability_witness(1.0, math.sqrt(2), 1.0) is None
        assert commensurability_witness(1.0, (1 + math.sqrt(5)) / 2, 2.0) is None

    def test_float_rationals_recovered(self):
        w = commensurability_witness(0.5, 1.5, 1.0)
        assert (w.p, w.q, w.r) == (1, 3, 2)
        assert w.d == pytest.approx(0.5)


class TestReconstructRational:
    def test_exact_double_of_small_rational(self):
        assert reconstruct_rational(1 / 3) == (1, 3)
        assert reconstruct_rational(355 / 113) == (355, 113)

    def test_sqrt2_rejected_with_default_knobs(self):
        assert reconstruct_rational(math.sqrt(2)) is None

    def test_cap_controls_acceptance(self):
        # with a loose tolerance sqrt(2) admits a modest-denominator match
        assert reconstruct_rational(math.sqrt(2), tol=1e-6, max_denominator=10**6) is not None

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            reconstruct_rational(-1.0)
