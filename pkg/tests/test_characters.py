"""Tests for the subset-character triviality engine.

Reference spectra for the power-2 fields and the plastic field are known
values for these unit choices; the quartic subfield-unit spectrum and the
size-2 product constant below were derived by an exact independent oracle
(Z[sqrt(2)] arithmetic and 50-digit mpmath) and frozen here.
"""

from fractions import Fraction

import pytest

from otcohom.characters import (
    IndexSet,
    SpectrumConfig,
    certify_trivial,
    decide_value_is_one,
    enumerate_spectrum,
    oracle_spectrum,
    screen_trivial,
    sigma_value,
)
from otcohom.embeddings import build_field
from otcohom.errors import InputError
from otcohom.units import AlgebraicNumber, UnitSubgroup, norm, validate_subgroup

# 2^(2/3) + 2^(1/3) + 1, the (2,3) subset product for x^3 - 2, u = alpha - 1
PAIR_PRODUCT_CUBIC = Fraction(
    "3.8473221018630726395189162465505366109617"
)
REF_TOL = Fraction(1, 10**38)


def mid_frac(ball):
    re = Fraction(*ball.re.as_integer_ratio())
    im = Fraction(*ball.im.as_integer_ratio())
    return re, im


def ball_contains(ball, re, im=0, tol=Fraction(0)):
    bre, bim = mid_frac(ball)
    rad = Fraction(*ball.rad.as_integer_ratio())
    d2 = (bre - re) ** 2 + (bim - im) ** 2
    return d2 <= (rad + tol) ** 2


@pytest.fixture(scope="module")
def cubic2():
    F = build_field([-2, 0, 0, 1])
    U = validate_subgroup(F, [AlgebraicNumber(F, [-1, 1, 0])])
    return F, U


@pytest.fixture(scope="module")
def quintic2():
    F = build_field([-2, 0, 0, 0, 0, 1])
    U = validate_subgroup(F, [AlgebraicNumber(F, [-1, 1, 0, 0, 0])])
    return F, U


@pytest.fixture(scope="module")
def septic2():
    F = build_field([-2, 0, 0, 0, 0, 0, 0, 1])
    U = validate_subgroup(F, [AlgebraicNumber(F, [-1, 1, 0, 0, 0, 0, 0])])
    return F, U


@pytest.fixture(scope="module")
def plastic():
    F = build_field([-1, -1, 0, 1])
    U = validate_subgroup(F, [AlgebraicNumber(F, [0, 1, 0])])
    return F, U


@pytest.fixture(scope="module")
def quartic_subfield():
    # u = 3 + 2*sqrt(2) lies in the real quadratic subfield of Q(2^(1/4)),
    # so its four embedding values are 3+2*sqrt(2) twice and 3-2*sqrt(2)
    # twice and every mixed pair multiplies to exactly 1. Not admissible as
    # a subgroup (rank 1 < s = 2), so it is constructed directly.
    F = build_field([-2, 0, 0, 0, 1])
    u = AlgebraicNumber(F, [3, 0, 2, 0])
    assert norm(F, u) == 1
    return F, UnitSubgroup(F, [u], ((),), False)


class TestIndexSet:
    def test_mask_roundtrip(self):
        for ix in [(), (1,), (2, 3), (1, 2, 3), (1, 4)]:
            s = IndexSet(ix, 4)
            assert IndexSet.from_mask(s.mask).indices == ix

    def test_not_increasing_rejected(self):
        with pytest.raises(InputError, match="strictly increasing"):
            IndexSet((2, 2))
        with pytest.raises(InputError, match="strictly increasing"):
            IndexSet((3, 1))

    def test_below_one_rejected(self):
        with pytest.raises(InputError, match="below 1"):
            IndexSet((0, 2))

    def test_beyond_degree_rejected(self):
        with pytest.raises(InputError, match="exceeds the degree"):
            IndexSet((1, 5), 4)

    def test_empty_allowed(self):
        assert IndexSet(()).mask == 0
        assert len(IndexSet(())) == 0


class TestSigmaValue:
    def test_empty_product_is_exact_one(self, cubic2):
        F, U = cubic2
        ball = sigma_value(F, U.generators[0], ())
        re, im = mid_frac(ball)
        assert (re, im) == (1, 0)
        assert Fraction(*ball.rad.as_integer_ratio()) == 0

    def test_full_product_contains_norm(self, cubic2):
        F, U = cubic2
        ball = sigma_value(F, U.generators[0], (1, 2, 3))
        assert ball_contains(ball, 1)

    def test_complex_pair_value(self, cubic2):
        F, U = cubic2
        ball = sigma_value(F, U.generators[0], (2, 3))
        assert ball_contains(ball, PAIR_PRODUCT_CUBIC, tol=REF_TOL)
        assert ball.excludes_one()

    def test_conjugate_indices_conjugate_value(self, cubic2):
        F, U = cubic2
        b2 = sigma_value(F, U.generators[0], (2,))
        b3 = sigma_value(F, U.generators[0], (3,))
        assert mid_frac(b2)[0] == mid_frac(b3)[0]
        assert mid_frac(b2)[1] == -mid_frac(b3)[1]

    def test_accepts_plain_coefficient_list(self, cubic2):
        F, U = cubic2
        ball = sigma_value(F, [Fraction(-1), Fraction(1), Fraction(0)], (2, 3))
        assert ball_contains(ball, PAIR_PRODUCT_CUBIC, tol=REF_TOL)


class TestScreen:
    def test_empty_set_passes(self, cubic2):
        _, U = cubic2
        assert screen_trivial(U, ()) is True

    def test_full_set_passes(self, cubic2):
        _, U = cubic2
        assert screen_trivial(U, (1, 2, 3)) is True

    def test_single_real_embedding_rejected(self, cubic2):
        _, U = cubic2
        assert screen_trivial(U, (1,)) is False

    def test_complex_pair_rejected(self, cubic2):
        _, U = cubic2
        assert screen_trivial(U, (2, 3)) is False

    def test_screen_never_rejects_certified_trivial(
        self, cubic2, quintic2, plastic, quartic_subfield
    ):
        for F, U in (cubic2, quintic2, plastic, quartic_subfield):
            spec = enumerate_spectrum(F, U)
            for sets in spec.trivial_sets:
                for ix in sets:
                    assert screen_trivial(U, ix) is True


class TestEnumerate:
    def test_cubic_spectrum(self, cubic2):
        F, U = cubic2
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 0, 0, 1)
        assert spec.trivial_sets[0] == ((),)
        assert spec.trivial_sets[3] == ((1, 2, 3),)
        assert spec.undecided_sets == ()
        assert spec.exact_cap_hit is False

    def test_quintic_spectrum(self, quintic2):
        F, U = quintic2
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 0, 0, 0, 0, 1)
        assert spec.trivial_sets[5] == ((1, 2, 3, 4, 5),)

    def test_septic_spectrum(self, septic2):
        F, U = septic2
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 0, 0, 0, 0, 0, 0, 1)

    def test_plastic_spectrum(self, plastic):
        F, U = plastic
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 0, 0, 1)

    def test_subfield_unit_spectrum(self, quartic_subfield):
        F, U = quartic_subfield
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 0, 4, 0, 1)
        assert spec.trivial_sets[2] == ((1, 3), (1, 4), (2, 3), (2, 4))
        assert spec.undecided_sets == ()

    def test_identity_generator_all_trivial(self, quartic_subfield):
        F, _ = quartic_subfield
        U = UnitSubgroup(F, [AlgebraicNumber.one(F)], ((),), False)
        spec = enumerate_spectrum(F, U)
        assert spec.rho == (1, 4, 6, 4, 1)

    def test_complement_and_conjugation_symmetry(
        self, cubic2, quintic2, quartic_subfield
    ):
        for F, U in (cubic2, quintic2, quartic_subfield):
            spec = enumerate_spectrum(F, U)
            n = F.n
            full = frozenset(range(1, n + 1))
            trivial = {ix for sets in spec.trivial_sets for ix in sets}
            for q in range(n + 1):
                assert spec.rho[q] == spec.rho[n - q]
            for ix in trivial:
                comp = tuple(sorted(full - set(ix)))
                assert comp in trivial
                conj = tuple(
                    sorted(
                        i if i <= F.s else (i + F.t if i <= F.s + F.t else i - F.t)
                        for i in ix
                    )
                )
                assert conj in trivial

    def test_worker_count_does_not_change_result(self, quintic2):
        F, U = quintic2
        base = enumerate_spectrum(F, U, SpectrumConfig(workers=1))
        for w in (2, 4):
            assert enumerate_spectrum(F, U, SpectrumConfig(workers=w)) == base

    def test_paranoid_mode_agrees(self, cubic2, quartic_subfield):
        for F, U in (cubic2, quartic_subfield):
            plain = enumerate_spectrum(F, U)
            paranoid = enumerate_spectrum(F, U, SpectrumConfig(paranoid=True))
            assert paranoid == plain

    def test_enumeration_cap_refused(self, quintic2):
        F, U = quintic2
        with pytest.raises(InputError, match="certify_trivial"):
            enumerate_spectrum(F, U, SpectrumConfig(enumeration_cap=3))

    def test_numeric_fallback_spectrum(self, quartic_subfield):
        # a dimension cap of 1 pushes every middle degree to the numeric
        # route; the spectrum must not change, only the report flag
        F, U = quartic_subfield
        spec = enumerate_spectrum(F, U, SpectrumConfig(exact_dim_cap=1))
        assert spec.rho == (1, 0, 4, 0, 1)
        assert spec.trivial_sets[2] == ((1, 3), (1, 4), (2, 3), (2, 4))
        assert spec.exact_cap_hit is True

    def test_numeric_fallback_paranoid(self, quartic_subfield):
        F, U = quartic_subfield
        spec = enumerate_spectrum(
            F, U, SpectrumConfig(exact_dim_cap=1, paranoid=True)
        )
        assert spec.rho == (1, 0, 4, 0, 1)

    def test_precision_cap_reports_undecided(self, quartic_subfield):
        # a ceiling below the base precision forbids every escalation step,
        # so candidates that need certification surface as undecided instead
        # of being guessed
        F, U = quartic_subfield
        spec = enumerate_spectrum(F, U, SpectrumConfig(max_precision_bits=64))
        assert spec.rho == (1, 0, 0, 0, 0)
        assert spec.undecided_sets == (
            (1, 2, 3, 4),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
        )


class TestCertify:
    def test_full_set_trivial_exact(self, cubic2):
        F, U = cubic2
        v = certify_trivial(F, U, (1, 2, 3))
        assert v.trivial is True
        assert v.certificate == "exact_certified"

    def test_empty_set_trivial(self, cubic2):
        F, U = cubic2
        v = certify_trivial(F, U, ())
        assert v.trivial is True

    def test_complex_pair_rejected_with_witness(self, cubic2):
        F, U = cubic2
        v = certify_trivial(F, U, (2, 3))
        assert v.trivial is False
        assert v.certificate == "exact_certified"
        assert v.witness_generator == 1

    def test_subfield_mixed_pair_trivial(self, quartic_subfield):
        F, U = quartic_subfield
        v = certify_trivial(F, U, (1, 3))
        assert v.trivial is True
        assert v.certificate == "exact_certified"

    def test_numeric_mode(self, quartic_subfield):
        F, U = quartic_subfield
        v = certify_trivial(F, U, (1, 3), mode="numeric")
        assert v.trivial is True
        assert v.certificate == "numeric_certified"
        v = certify_trivial(F, U, (1, 2), mode="numeric")
        assert v.trivial is False
        assert v.certificate == "exact_certified"

    def test_undecided_when_precision_capped(self, quartic_subfield):
        F, U = quartic_subfield
        v = certify_trivial(
            F, U, (1, 3), config=SpectrumConfig(max_precision_bits=64)
        )
        assert v.trivial is False
        assert v.certificate == "undecided"

    def test_invalid_indices_rejected(self, cubic2):
        F, U = cubic2
        with pytest.raises(InputError):
            certify_trivial(F, U, (1, 4))


class TestDecideValue:
    def test_product_of_parts(self, quartic_subfield):
        # sigma_{(1,2)}(u) * sigma_{(3,4)}(u) = norm(u) = 1 even though
        # neither factor alone is 1
        F, U = quartic_subfield
        u = U.generators[0]
        cfg = SpectrumConfig()
        m12 = IndexSet((1, 2), 4).mask
        m34 = IndexSet((3, 4), 4).mask
        dec, cert, _ = decide_value_is_one(F, [(u, m12)], cfg)
        assert dec is False
        dec, cert, _ = decide_value_is_one(F, [(u, m12), (u, m34)], cfg)
        assert dec is True
        assert cert == "exact_certified"

    def test_numeric_route_decisions(self, quartic_subfield):
        F, U = quartic_subfield
        u = U.generators[0]
        cfg = SpectrumConfig()
        m13 = IndexSet((1, 3), 4).mask
        dec, cert, _ = decide_value_is_one(F, [(u, m13)], cfg, dim_cap=0)
        assert dec is True
        assert cert == "numeric_certified"
        m12 = IndexSet((1, 2), 4).mask
        dec, cert, _ = decide_value_is_one(F, [(u, m12)], cfg, dim_cap=0)
        assert dec is False
        assert cert == "exact_certified"


class TestOracle:
    def test_oracle_agrees_on_corpus(
        self, cubic2, quintic2, plastic, quartic_subfield
    ):
        for F, U in (cubic2, quintic2, plastic, quartic_subfield):
            spec = enumerate_spectrum(F, U)
            ref = oracle_spectrum(F, U)
            assert ref.rho == spec.rho
            assert ref.trivial_sets == spec.trivial_sets

    def test_oracle_agrees_on_septic(self, septic2):
        F, U = septic2
        spec = enumerate_spectrum(F, U)
        ref = oracle_spectrum(F, U)
        assert ref.rho == spec.rho
        assert ref.trivial_sets == spec.trivial_sets

    def test_oracle_degree_guard(self):
        F = build_field([-2, 0, 0, 0, 0, 0, 0, 0, 0, 1])
        u = AlgebraicNumber(F, [-1, 1] + [0] * 7)
        U = UnitSubgroup(F, [u], ((),), False)
        with pytest.raises(InputError, match="degree"):
            oracle_spectrum(F, U)
