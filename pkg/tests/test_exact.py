import math
import pickle
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from urnlab import oracles
from urnlab.exact import (
    EULER_GAMMA,
    INF,
    MomentReport,
    PositiveInfinity,
    UrnConfig,
    beta_int,
    beta_ratio,
    conditional_expectation_T11,
    eulerian_row,
    expectation,
    pmf,
    prob_odd_T11,
    raw_moment,
    survival,
    survival_factorial,
    variance,
)

small = st.integers(min_value=1, max_value=12)


def C(b, w):
    return UrnConfig(b, w)


def weight(b, w):
    """(b+w-1)!/(w-1)!"""
    return math.factorial(b + w - 1) // math.factorial(w - 1)


class TestUrnConfig:
    @pytest.mark.parametrize("b,w", [(0, 1), (1, 0), (-3, 2), (2**63, 1)])
    def test_rejects_out_of_range(self, b, w):
        with pytest.raises(ValueError):
            UrnConfig(b, w)

    @pytest.mark.parametrize("b,w", [(1.0, 1), (True, 1), ("2", 3)])
    def test_rejects_non_integers(self, b, w):
        with pytest.raises(TypeError):
            UrnConfig(b, w)

    def test_accepts_max(self):
        cfg = UrnConfig(2**63 - 1, 2**63 - 1)
        assert survival(cfg, 1) == Fraction(1, 2)


class TestInfinity:
    def test_singleton(self):
        assert PositiveInfinity() is INF
        assert pickle.loads(pickle.dumps(INF)) is INF

    def test_ordering(self):
        assert Fraction(10**100) < INF
        assert INF > Fraction(3)
        assert not INF < Fraction(3)
        assert float(INF) == math.inf
        assert str(INF) == "inf"


class TestSurvival:
    @pytest.mark.parametrize(
        "b,w,n,expected",
        [
            (1, 1, 5, Fraction(1, 6)),
            (3, 7, 0, Fraction(1)),
            (2, 3, 2, Fraction(2, 5)),
        ],
    )
    def test_examples(self, b, w, n, expected):
        assert survival(C(b, w), n) == expected

    def test_2_3_2_by_enumeration(self):
        # all-white path of length 2 is the only way to survive two draws
        assert oracles.first_black_by_enumeration(2, 3, 1) + oracles.first_black_by_enumeration(
            2, 3, 2
        ) == 1 - survival(C(2, 3), 2)

    @pytest.mark.parametrize("w,n", [(1, 1), (3, 2), (10, 7), (10**9, 3)])
    def test_two_black_closed_form(self, w, n):
        assert survival(C(2, w), n) == Fraction(w * (w + 1), (w + n) * (w + n + 1))

    def test_one_black_haystack(self):
        w = 10**9
        assert survival(C(1, w), 10**6) == Fraction(w, w + 10**6)

    def test_matches_factorial_twin(self):
        for b in range(1, 8):
            for w in range(1, 8):
                for n in (0, 1, 2, 5, 17, 80):
                    assert survival(C(b, w), n) == survival_factorial(C(b, w), n)

    def test_long_product_path(self):
        # more than 64 factors goes through the binary-splitting product
        cfg = C(150, 4)
        assert survival(cfg, 100) == survival_factorial(cfg, 100)
        assert survival(cfg, 300) == survival_factorial(cfg, 300)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            survival(C(1, 1), -1)

    @given(small, small, st.integers(min_value=0, max_value=300))
    def test_strictly_decreasing(self, b, w, n):
        assert survival(C(b, w), n + 1) < survival(C(b, w), n)

    @given(small, small, st.integers(min_value=1, max_value=400))
    def test_tail_sandwich(self, b, w, n):
        s = survival(C(b, w), n)
        assert s * (b + w + n) ** b >= weight(b, w)
        assert s * n**b <= weight(b, w)


class TestPmf:
    @pytest.mark.parametrize(
        "b,w,n,expected",
        [
            (1, 1, 3, Fraction(1, 12)),
            (1, 1, 1, Fraction(1, 2)),
            (2, 3, 2, Fraction(1, 5)),
        ],
    )
    def test_examples(self, b, w, n, expected):
        assert pmf(C(b, w), n) == expected

    def test_zero_is_domain_error(self):
        with pytest.raises(ValueError):
            pmf(C(1, 1), 0)

    @pytest.mark.parametrize("j", [1, 2, 3, 10, 999])
    def test_fair_urn(self, j):
        assert pmf(C(1, 1), j) == Fraction(1, j * (j + 1))

    def test_telescoping(self):
        for b in range(1, 7):
            for w in range(1, 7):
                cfg = C(b, w)
                prev = survival(cfg, 0)
                for n in range(1, 201):
                    cur = survival(cfg, n)
                    assert pmf(cfg, n) == prev - cur
                    prev = cur

    def test_enumeration_oracle(self):
        for b in range(1, 5):
            for w in range(1, 5):
                for n in range(1, 9):
                    assert pmf(C(b, w), n) == oracles.first_black_by_enumeration(b, w, n)

    @given(small, small, st.integers(min_value=0, max_value=60))
    def test_normalization(self, b, w, big_n):
        cfg = C(b, w)
        total = sum((pmf(cfg, n) for n in range(1, big_n + 1)), Fraction(0))
        assert total + survival(cfg, big_n) == 1

    @given(small, small, st.integers(min_value=1, max_value=200))
    def test_in_unit_interval(self, b, w, n):
        assert 0 < pmf(C(b, w), n) < 1


class TestExpectationVariance:
    @pytest.mark.parametrize(
        "b,w,expected", [(2, 5, Fraction(6)), (1, 1, INF), (3, 4, Fraction(3))]
    )
    def test_expectation_examples(self, b, w, expected):
        assert expectation(C(b, w)) == expected

    @pytest.mark.parametrize("w", [1, 10, 1000, 10**9])
    def test_two_black(self, w):
        assert expectation(C(2, w)) == w + 1

    @pytest.mark.parametrize(
        "b,w,expected", [(3, 2, Fraction(6)), (3, 1, Fraction(9, 4)), (2, 10, INF), (1, 3, INF)]
    )
    def test_variance_examples(self, b, w, expected):
        assert variance(C(b, w)) == expected

    @pytest.mark.parametrize("w", range(1, 21))
    def test_three_black(self, w):
        cfg = C(3, w)
        assert expectation(cfg) == Fraction(w + 2, 2)
        assert variance(cfg) == Fraction(3 * w * (w + 2), 4)

    @pytest.mark.parametrize("b,w", [(b, w) for b in range(3, 9) for w in (1, 2, 9)])
    def test_variance_decomposition(self, b, w):
        # E[Var(T|P)] + Var(E[T|P]) with P ~ Beta(b, w)
        e_cond_var = Fraction(w * (b + w - 1), (b - 1) * (b - 2))
        var_cond_mean = Fraction(w * (b + w - 1), (b - 1) ** 2 * (b - 2))
        assert variance(C(b, w)) == e_cond_var + var_cond_mean

    @pytest.mark.parametrize("b,w", [(b, w) for b in range(2, 7) for w in (1, 4)])
    def test_beta_mixture_mean(self, b, w):
        assert expectation(C(b, w)) == beta_int(b - 1, w) / beta_int(b, w)


class TestRawMoment:
    def test_eulerian_rows(self):
        assert eulerian_row(1) == (1,)
        assert eulerian_row(3) == (1, 4, 1)
        assert eulerian_row(5) == (1, 26, 66, 26, 1)
        for r in range(1, 10):
            assert sum(eulerian_row(r)) == math.factorial(r)

    def test_b3_second_moment(self):
        # (w+2)(2w+1)/2 at w = 2
        assert raw_moment(C(3, 2), 2) == MomentReport(2, True, Fraction(10))

    def test_divergent(self):
        rep = raw_moment(C(2, 1), 2)
        assert rep.finite is False and rep.value is None

    def test_r_zero_rejected(self):
        with pytest.raises(ValueError):
            raw_moment(C(3, 1), 0)

    def test_report_invariant(self):
        with pytest.raises(ValueError):
            MomentReport(2, True, None)

    def test_against_truncated_series(self):
        value = raw_moment(C(4, 1), 3).value
        lo, hi, n = oracles.certified_moment(4, 1, 3, rel_width=1e-12)
        assert lo <= float(value) <= hi
        assert (hi - lo) / lo <= 1e-12

    @pytest.mark.parametrize("b,w", [(b, w) for b in range(2, 8) for w in (1, 3, 10**9)])
    def test_consistency(self, b, w):
        cfg = C(b, w)
        assert raw_moment(cfg, 1).value == expectation(cfg)
        if b >= 3:
            assert raw_moment(cfg, 2).value - expectation(cfg) ** 2 == variance(cfg)

    @given(st.integers(1, 8), st.integers(1, 6), st.integers(1, 30))
    def test_finiteness_rule(self, b, r, w):
        assert raw_moment(C(b, w), r).finite == (b > r)

    def test_beta_ratio_large(self):
        assert beta_ratio(1, 10**9, 2, 10**9) == Fraction(10**9 + 1, 1) / 1
        assert beta_ratio(3, 4, 3, 4) == 1
        assert beta_ratio(2, 5, 4, 3) == beta_int(2, 5) / beta_int(4, 3)


class TestDivergenceWitness:
    @pytest.mark.parametrize("b,w", [(1, 100), (2, 30), (3, 12)])
    def test_partial_sums_exceed_1000(self, b, w):
        total = oracles.moment_partial_sum(b, w, b, 10**7)
        assert total > 1e3
        # exact spot check of the float terms
        cfg = C(b, w)
        head = sum((n**b * pmf(cfg, n) for n in range(1, 201)), Fraction(0))
        assert math.isclose(oracles.moment_partial_sum(b, w, b, 200), float(head), rel_tol=1e-12)

    @pytest.mark.parametrize("b,w", [(1, 1), (2, 1), (3, 1)])
    def test_partial_sums_grow_each_decade(self, b, w):
        # terms behave like C b / n, so each decade adds about C b ln 10
        gain = weight(b, w) * b * math.log(10)
        sums = [oracles.moment_partial_sum(b, w, b, 10**k) for k in range(2, 8)]
        for lo, hi in zip(sums, sums[1:]):
            assert hi - lo > 0.9 * gain


class TestT11:
    def test_small_k(self):
        assert conditional_expectation_T11(1) == 1
        assert conditional_expectation_T11(2) == Fraction(5, 4)

    @pytest.mark.parametrize("k", [1, 2, 3, 10, 57])
    def test_matches_direct_conditioning(self, k):
        cfg = C(1, 1)
        num = sum((j * pmf(cfg, j) for j in range(1, k + 1)), Fraction(0))
        den = 1 - survival(cfg, k)
        assert conditional_expectation_T11(k) == num / den

    @pytest.mark.parametrize("k", [10**3, 10**4, 10**5])
    def test_asymptotic_expansion(self, k):
        # E = log k + gamma - 1 + (log k + gamma + 1/2)/k + O(log k / k^2)
        value = float(conditional_expectation_T11(k))
        first = math.log(k) + EULER_GAMMA - 1
        second = (math.log(k) + EULER_GAMMA + 0.5) / k
        assert abs(value - first - second) <= 2 * math.log(k) / k**2

    @pytest.mark.parametrize("tol", [1.0, 1e-6, 1e-8, 1e-10, 1e-12])
    def test_odd_probability_bracket(self, tol):
        lo, hi = prob_odd_T11(tol)
        assert hi - lo <= tol
        assert lo <= math.log(2) <= hi

    def test_odd_probability_pairs(self):
        # pairs 1/((2l+1)(2l+2)) summed exactly stay inside the bracket's reach
        lo, hi = prob_odd_T11(1e-6)
        pair_sum = sum(Fraction(1, (2 * l + 1) * (2 * l + 2)) for l in range(2000))
        tail = Fraction(1, 4 * 2000)  # sum over l >= L is below 1/(4L)
        assert float(pair_sum) <= hi and float(pair_sum + tail) >= lo

    @pytest.mark.parametrize("tol", [0.0, -1.0, 1e-15])
    def test_odd_probability_bad_tol(self, tol):
        with pytest.raises(ValueError):
            prob_odd_T11(tol)
