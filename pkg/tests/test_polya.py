from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from urnlab import oracles
from urnlab.exact import UrnConfig
from urnlab.polya import (
    ProportionState,
    beta_binomial_pmf,
    count_distribution,
    martingale_step_check,
    polya_pmf,
)

counts = st.integers(min_value=1, max_value=9)


class TestPolyaPmf:
    def test_uniform_case(self):
        assert polya_pmf(UrnConfig(1, 1), 7, 3) == Fraction(1, 8)

    def test_empty(self):
        assert polya_pmf(UrnConfig(4, 9), 0, 0) == 1

    def test_two_step_tree(self):
        # BW and WB each have probability 2/3 * 1/4 = 1/6
        assert polya_pmf(UrnConfig(2, 1), 2, 1) == Fraction(1, 3)
        assert oracles.count_by_enumeration(2, 1, 2)[1] == Fraction(1, 3)

    @pytest.mark.parametrize("n,k", [(3, 4), (3, -1), (-1, 0)])
    def test_domain(self, n, k):
        with pytest.raises(ValueError):
            polya_pmf(UrnConfig(1, 1), n, k)

    @given(counts, counts, st.integers(min_value=0, max_value=40))
    def test_rows_sum_to_one(self, b, w, n):
        assert sum(polya_pmf(UrnConfig(b, w), n, k) for k in range(n + 1)) == 1

    @given(counts, counts, st.integers(min_value=0, max_value=40))
    def test_mean_is_proportional(self, b, w, n):
        # the black fraction is a martingale, so E[B_n] = n b/(b+w)
        assert count_distribution(UrnConfig(b, w), n).mean() == Fraction(n * b, b + w)

    @given(counts, counts, st.integers(min_value=0, max_value=30), st.data())
    def test_colour_symmetry(self, b, w, n, data):
        k = data.draw(st.integers(min_value=0, max_value=n))
        assert polya_pmf(UrnConfig(b, w), n, k) == polya_pmf(UrnConfig(w, b), n, n - k)

    def test_enumeration(self):
        for b in range(1, 4):
            for w in range(1, 4):
                for n in range(7):
                    assert list(oracles.count_by_enumeration(b, w, n)) == [
                        polya_pmf(UrnConfig(b, w), n, k) for k in range(n + 1)
                    ]


class TestBetaBinomial:
    def test_uniform(self):
        assert beta_binomial_pmf(1, 1, 9, 4) == Fraction(1, 10)

    def test_empty(self):
        assert beta_binomial_pmf(3, 2, 0, 0) == 1

    def test_matches_polya(self):
        assert beta_binomial_pmf(2, 3, 5, 2) == polya_pmf(UrnConfig(2, 3), 5, 2)

    @given(counts, counts, st.integers(min_value=0, max_value=25), st.data())
    def test_identity(self, b, w, n, data):
        k = data.draw(st.integers(min_value=0, max_value=n))
        assert beta_binomial_pmf(b, w, n, k) == polya_pmf(UrnConfig(b, w), n, k)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValueError):
            beta_binomial_pmf(0, 1, 2, 1)


class TestCountDistribution:
    def test_csv(self):
        text = count_distribution(UrnConfig(1, 1), 2).to_csv()
        lines = text.splitlines()
        assert lines[0] == "k,numerator,denominator,float"
        assert lines[1].startswith("0,1,3,")
        assert len(lines) == 4

    def test_rows(self):
        rows = count_distribution(UrnConfig(2, 1), 1).rows()
        assert [r["value"] for r in rows] == ["1/3", "2/3"]


class TestMartingale:
    @pytest.mark.parametrize(
        "b,w,n,k,expected",
        [
            (1, 1, 0, 0, Fraction(1, 2)),
            (2, 3, 4, 1, Fraction(3, 9)),
            (5, 1, 10, 10, Fraction(15, 16)),
        ],
    )
    def test_examples(self, b, w, n, k, expected):
        lhs, rhs = martingale_step_check(UrnConfig(b, w), n, k)
        assert lhs == rhs == expected

    @given(counts, counts, st.integers(min_value=0, max_value=50), st.data())
    def test_identity(self, b, w, n, data):
        k = data.draw(st.integers(min_value=0, max_value=n))
        lhs, rhs = martingale_step_check(UrnConfig(b, w), n, k)
        assert lhs == rhs

    def test_successors_are_a_distribution(self):
        state = ProportionState(UrnConfig(3, 4), 5, 2)
        probs = [p for p, _ in state.successors()]
        assert sum(probs) == 1 and all(p > 0 for p in probs)

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            ProportionState(UrnConfig(1, 1), 2, 3)
