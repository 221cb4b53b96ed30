import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from betakit.exactnum import SqrtPiValue, beta_exact, binomial, gamma_half
from betakit.identities import (
    IdentityCase,
    IdentityError,
    binomial_inversion,
    cor21_sides,
    cor21_terms,
    cor31_lhs,
    cor31_rhs,
    cor31_sides,
    conv11_sides,
    eq29_sides,
    eq226_sides,
    mikic_rhs,
    pairwise_cancellation,
    thm21_sides,
    thm22_sides,
    thm23_sides,
    thm24_gamma_sides,
    thm24_gamma_terms,
    thm24_sides,
    thm24_terms,
    thm31_sides,
    verify,
    verify_grid,
)

HALF = F(1, 2)
PI = SqrtPiValue.monomial(1, 2)
HALF_GRID = [F(k, 2) for k in range(1, 11)]
S_GRID = [F(1, 3), F(1, 2), F(1), F(5, 2), F(7), F(22, 7)]


class TestThm21:
    def test_n1_is_basic_identity(self):
        lhs, rhs = thm21_sides(F(3, 2), F(7, 2), 1)
        assert lhs == beta_exact([F(3, 2), F(9, 2)]) + beta_exact([F(5, 2), F(7, 2)])
        assert lhs == rhs

    @pytest.mark.parametrize("n", range(21))
    def test_half_half_gives_pi(self, n):
        lhs, rhs = thm21_sides(HALF, HALF, n)
        assert lhs == PI == rhs
        assert str(lhs) == "π"

    def test_n0(self):
        lhs, rhs = thm21_sides(F(2), F(5, 2), 0)
        assert lhs == rhs == beta_exact([2, F(5, 2)])

    def test_rejects_non_half_integer_exact(self):
        with pytest.raises(IdentityError):
            thm21_sides(F(1, 3), F(1), 2)

    def test_float_mode(self):
        lhs, rhs = thm21_sides(0.5, 0.5, 7, "float")
        assert lhs == pytest.approx(math.pi, rel=1e-12)
        assert rhs == pytest.approx(math.pi, rel=1e-12)


class TestThm22Thm23:
    @pytest.mark.parametrize("s", S_GRID)
    def test_small_n(self, s):
        assert thm22_sides(s, 0) == (1 / s, 1 / s)
        assert thm22_sides(s, 1)[0] == 1 / (s + 1)
        assert thm22_sides(s, 2)[0] == 1 / (s + 2)
        assert thm23_sides(s, 0) == (1 / s ** 2, 1 / s ** 2)

    def test_thm22_n2_expanded(self):
        # B(1,s) - 2 B(2,s) + B(3,s) with B(j+1,s) from the gamma ratio
        s = F(5, 2)
        lhs = beta_exact([1, s]) - 2 * beta_exact([2, s]) + beta_exact([3, s])
        assert lhs == 1 / (s + 2)

    def test_thm23_hand_expansion(self):
        # s=1, n=1: 1 - (1/2)(1 + 1/2) = 1/4
        assert thm23_sides(1, 1) == (F(1, 4), F(1, 4))

    def test_thm23_random_rationals(self):
        rng = random.Random(23)
        for _ in range(20):
            s = F(rng.randint(1, 60), rng.randint(1, 17))
            n = rng.randint(0, 15)
            lhs, rhs = thm23_sides(s, n)
            assert lhs == rhs

    def test_invariant_grid(self):
        for s in S_GRID:
            for n in range(16):
                lhs, rhs = thm22_sides(s, n)
                assert lhs == rhs
                lhs, rhs = thm23_sides(s, n)
                assert lhs == rhs
                a, mid, b = eq29_sides(s, n)
                assert a == mid == b

    def test_rejects_non_positive(self):
        with pytest.raises(IdentityError):
            thm22_sides(0, 3)
        with pytest.raises(IdentityError):
            thm23_sides(F(-1, 2), 3)
        with pytest.raises(IdentityError):
            eq29_sides(-1.0, 2, "float")


class TestEq29:
    def test_examples(self):
        s = F(3, 7)
        assert eq29_sides(s, 0) == (1, 1, 1)
        assert eq29_sides(s, 1)[0] == 1 - s / (s + 1) == 1 / (s + 1)
        assert eq29_sides(F(2), 3) == (F(1, 10), F(1, 10), F(1, 10))


class TestBinomialInversion:
    def test_constant_sequence(self):
        assert binomial_inversion([1] * 6) == [1, 0, 0, 0, 0, 0]

    def test_eq210(self):
        s = 1
        b = binomial_inversion([F(1, s + j) for j in range(3)])
        assert b[2] == F(1, 3) == beta_exact([3, 1])
        # B(n+1, s) is the inversion of 1/(s+j) for every n
        s = F(5, 2)
        b = binomial_inversion([1 / (s + j) for j in range(10)])
        assert b == [beta_exact([n + 1, s]).to_fraction() for n in range(10)]

    @settings(max_examples=100)
    @given(st.lists(st.fractions(max_denominator=1000), min_size=1, max_size=25))
    def test_involution(self, seq):
        assert binomial_inversion(binomial_inversion(seq)) == seq

    def test_length_preserved_and_empty_rejected(self):
        assert len(binomial_inversion([F(1, 2), 3, 4])) == 3
        with pytest.raises(ValueError):
            binomial_inversion([])


class TestThm24:
    @pytest.mark.parametrize("p", HALF_GRID)
    @pytest.mark.parametrize("n", [1, 3, 5, 9, 19])
    def test_odd_pairwise_cancellation(self, p, n):
        for terms in (thm24_terms(p, n), thm24_gamma_terms(p, n)):
            assert all(pair.is_zero() for pair in pairwise_cancellation(terms))
        lhs, rhs = thm24_sides(p, n)
        assert lhs.is_zero() and rhs.is_zero()

    def test_p1_n2(self):
        lhs, rhs = thm24_sides(1, 2)
        assert lhs == F(1, 3) == rhs

    def test_gamma_form_half_n2(self):
        lhs, rhs = thm24_gamma_sides(HALF, 2)
        assert lhs == PI == rhs

    @pytest.mark.parametrize("p", HALF_GRID)
    @pytest.mark.parametrize("n", range(1, 21))
    def test_gamma_form_divided_gives_beta_form(self, p, n):
        lhs_g, rhs_g = thm24_gamma_sides(p, n)
        lhs, rhs = thm24_sides(p, n)
        norm = gamma_half(2 * p + n)
        assert lhs_g / norm == lhs
        assert rhs_g / norm == rhs == lhs

    @pytest.mark.parametrize("n", [2, 4, 6, 10])
    def test_half_consistent_with_cor21(self, n):
        # sum C(n,k) G(k+1/2) G(n-k+1/2) / G(1/2)^2 = n!/4^n * sum (-1)^k C(2k,k) C(2n-2k,n-k)
        lhs_g, _ = thm24_gamma_sides(HALF, n)
        normalised = (lhs_g / gamma_half(HALF) ** 2).to_fraction()
        lhs_c, _ = cor21_sides(n)
        assert normalised * 4 ** n == lhs_c * math.factorial(n)

    def test_n_zero_excluded(self):
        with pytest.raises(IdentityError):
            thm24_sides(HALF, 0)

    def test_float_odd_is_exact_zero(self):
        for p in (0.7, 3.3, 29.0):
            terms = thm24_terms(p, 5, "float")
            assert all(pair == 0.0 for pair in pairwise_cancellation(terms))
            assert thm24_sides(p, 5, "float") == (0.0, 0.0)


class TestIntegerIdentities:
    def test_cor21_examples(self):
        assert cor21_terms(2) == [6, -4, 6]
        assert cor21_sides(2) == (8, 8)
        assert cor21_sides(3) == (0, 0)
        assert cor21_sides(4) == (96, 96)

    def test_conv11_examples(self):
        assert conv11_sides(1) == (4, 4)
        assert conv11_sides(2) == (16, 16)
        assert conv11_sides(30)[0] == 4 ** 30

    def test_conv11_needs_k_zero(self):
        # the sum from k = 1 misses the C(0,0) C(2n,n) term
        n = 1
        from_one = sum(binomial(2 * k, k) * binomial(2 * n - 2 * k, n - k) for k in range(1, n + 1))
        assert from_one == 2 != 4 ** n

    def test_cor21_odd_pairwise(self):
        for n in range(1, 31, 2):
            assert all(pair == 0 for pair in pairwise_cancellation(cor21_terms(n)))

    def test_cor31_examples(self):
        assert cor31_sides(3, 1) == (6, 6)
        for n in range(1, 15):
            assert cor31_rhs(2, n) == 4 ** n
            assert cor31_rhs(1, n) == binomial(2 * n, n)

    def test_cor31_brute_force_m4_n2(self):
        # 4 compositions with a single 2 (C(4,2)=6 each) and 6 with two 1s (2*2)
        assert cor31_lhs(4, 2) == 4 * 6 + 6 * 4 == 48
        assert mikic_rhs(4, 2) == 48

    def test_mikic_examples(self):
        assert mikic_rhs(2, 7) == 4 ** 7
        assert mikic_rhs(3, 1) == 6

    def test_mikic_equals_gamma_ratio(self):
        for m in range(1, 10):
            for n in range(1, 11):
                assert mikic_rhs(m, n) == cor31_rhs(m, n)

    def test_integer_identities_up_to_30(self):
        for n in range(1, 31):
            assert conv11_sides(n)[0] == conv11_sides(n)[1]
            assert cor21_sides(n)[0] == cor21_sides(n)[1]
        for m in range(1, 7):
            for n in range(1, 9):
                lhs, rhs = cor31_sides(m, n)
                assert lhs == rhs == mikic_rhs(m, n)

    def test_eq226(self):
        for n in range(25):
            lhs, rhs = eq226_sides(n)
            assert lhs == rhs
        assert eq226_sides(2)[1] == F(3, 4)


class TestThm31:
    def test_m3_ones(self):
        lhs, rhs = thm31_sides([1, 1, 1], 1)
        assert lhs == F(1, 2) == rhs
        assert beta_exact([2, 1, 1]) == F(1, 6)

    def test_n0(self):
        lhs, rhs = thm31_sides([HALF, 2, F(7, 2)], 0)
        assert lhs == rhs

    def test_m2_agrees_with_thm21(self):
        for p1 in HALF_GRID[::3]:
            for p2 in HALF_GRID[::4]:
                for n in range(6):
                    assert thm31_sides([p1, p2], n) == thm21_sides(p1, p2, n)

    def test_random_half_integer_vectors(self):
        rng = random.Random(31)
        for _ in range(25):
            m = rng.randint(2, 4)
            ps = [rng.choice(HALF_GRID) for _ in range(m)]
            n = rng.randint(0, 20 if m < 4 else 10)
            lhs, rhs = thm31_sides(ps, n)
            assert lhs == rhs

    def test_rejects_single_parameter(self):
        with pytest.raises(IdentityError):
            thm31_sides([HALF], 2)


class TestVerify:
    def test_thm21_exact(self):
        r = verify(IdentityCase("thm21", (HALF, HALF), 5))
        assert r.passed and r.discrepancy.is_zero() and r.mode == "exact"

    def test_thm24_float_odd(self):
        r = verify(IdentityCase("thm24", (0.7,), 3, "float"))
        assert r.passed
        assert abs(r.lhs) <= 1e-6 * max(abs(t) for t in thm24_terms(0.7, 3, "float"))
        assert r.condition_hint == math.inf

    def test_cor31_exact(self):
        r = verify(IdentityCase("cor31", (3,), 1))
        assert r.lhs == 6 and r.rhs == 6 and r.passed

    def test_condition_hint_present_for_alternating(self):
        r = verify(IdentityCase("thm22", (0.25,), 8, "float"))
        assert r.passed and r.condition_hint > 1
        r = verify(IdentityCase("thm21", (0.25, 3.0), 8, "float"))
        assert r.condition_hint is None

    def test_eq29_mid_compared(self):
        r = verify(IdentityCase("eq29", (F(2),), 3))
        assert r.passed and r.diagnostics["mid"] == F(1, 10)

    @pytest.mark.parametrize("case", [
        IdentityCase("thm21", (HALF,), 2),
        IdentityCase("nope", (), 1),
        IdentityCase("thm21", (HALF, HALF), 2, "symbolic"),
        IdentityCase("cor21", (), 2, "float"),
        IdentityCase("thm24", (HALF,), 0),
        IdentityCase("thm21", (0.5, 0.5), 2, "exact"),
        IdentityCase("basic23", (HALF, HALF), 3),
    ])
    def test_mismatch_flagged(self, case):
        with pytest.raises(IdentityError):
            verify(case)

    def test_failure_is_reported_not_raised(self):
        r = verify(IdentityCase("thm22", (0.01,), 8, "float"), tol=1e-30)
        assert not r.passed

    def test_grid_parallel_matches_serial(self):
        cases = [IdentityCase("thm24", (p,), n) for p in HALF_GRID[:4] for n in range(1, 6)]
        serial = verify_grid(cases)
        parallel = verify_grid(cases, workers=2)
        assert [(r.case, r.lhs, r.rhs, r.passed) for r in serial] == \
               [(r.case, r.lhs, r.rhs, r.passed) for r in parallel]


class TestFloatProperties:
    def test_non_alternating_random(self):
        rng = random.Random(101)
        for _ in range(60):
            m = rng.randint(2, 4)
            ps = [rng.uniform(1e-3, 30) for _ in range(m)]
            n = rng.randint(0, 15 if m < 4 else 10)
            ident = "thm21" if m == 2 and rng.random() < 0.5 else "thm31"
            r = verify(IdentityCase(ident, tuple(ps), n, "float"), tol=1e-9)
            assert r.passed, (ps, n, r.discrepancy)

    def test_alternating_random(self):
        rng = random.Random(202)
        for _ in range(60):
            v = rng.uniform(1e-3, 30)
            n = rng.randint(1, 8)
            for ident in ("thm22", "thm23", "thm24"):
                r = verify(IdentityCase(ident, (v,), n, "float"), tol=1e-6)
                assert r.passed, (ident, v, n, r.discrepancy)
                assert r.condition_hint is not None

    def test_basic23_float(self):
        assert verify(IdentityCase("basic23", (0.3, 41.0), 0, "float")).passed
