from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prioritygames.costs import (
    INFINITY,
    ZERO,
    ExtCost,
    cost,
    improvement,
    parse_fraction,
    sum_costs,
)

finite_costs = st.builds(
    lambda n, d: ExtCost(Fraction(n, d)),
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=10**3),
)
any_costs = st.one_of(finite_costs, st.just(INFINITY))


def test_infinity_is_maximal_and_reflexive():
    assert INFINITY == INFINITY
    assert not INFINITY < INFINITY
    assert cost(10**9) < INFINITY
    assert INFINITY > cost("999999999/7")


def test_saturating_addition():
    assert INFINITY + cost(3) == INFINITY
    assert cost(3) + INFINITY == INFINITY
    assert cost("1/2") + cost("1/3") == cost("5/6")
    assert sum_costs([]) == ZERO
    assert sum_costs([cost(1), INFINITY, cost(2)]) == INFINITY


def test_parse_and_format():
    assert cost("7/2").to_string() == "7/2"
    assert cost("4/2").to_string() == "2/1"
    assert cost("3").to_string() == "3/1"
    assert cost("inf").to_string() == "inf"
    assert ExtCost.of(cost("inf")) is INFINITY


@pytest.mark.parametrize("bad", ["3/0", "-1", "1/-2", "a/b", "1.5", "", "1/2/3"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_fraction(bad)


def test_negative_rejected():
    with pytest.raises(ValueError):
        ExtCost.of(-1)


def test_improvement():
    assert improvement(cost(5), cost(2)) == cost(3)
    assert improvement(INFINITY, cost(2)) == INFINITY
    with pytest.raises(ValueError):
        improvement(cost(2), cost(2))


@given(any_costs, any_costs)
def test_total_order(a, b):
    assert (a < b) + (b < a) + (a == b) == 1


@given(any_costs, any_costs, any_costs)
def test_order_transitive(a, b, c):
    if a <= b and b <= c:
        assert a <= c


@given(finite_costs)
def test_string_round_trip(a):
    assert ExtCost.of(a.to_string()) == a


@given(any_costs, any_costs)
def test_addition_monotone(a, b):
    assert a <= a + b
