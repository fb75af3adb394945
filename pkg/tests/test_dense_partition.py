import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entire_interp.dense_partition import DyadicValuationPartition, color, partition_by_name, pick
from entire_interp.exact_algebra import RatInterval
from oracles import brute_pick


def test_color_examples():
    assert color(F(1)) == 0
    assert color(F(3, 4)) == 2
    assert color(F(5, 6)) == 1
    assert color(F(0)) == 0


def test_pick_examples():
    assert pick(0, F(3, 2), F(2)) == F(5, 3)
    assert pick(1, F(0), F(1)) == F(1, 2)
    for q in (-3, 0, 7):
        assert pick(0, q - 1, q + 1) == q


def test_pick_rejects_empty_interval():
    with pytest.raises(ValueError):
        pick(0, 1, 1)


def test_pick_matches_enumeration_oracle():
    rng = random.Random(7)
    for _ in range(3000):
        i = rng.randint(0, 4)
        lo = F(rng.randint(-300, 300), rng.choice([1, 3, 8, 50, 97]) * rng.randint(1, 9))
        hi = lo + F(rng.randint(1, 40), rng.randint(1, 400))
        assert pick(i, lo, hi) == brute_pick(i, lo, hi), (i, lo, hi)


intervals = st.tuples(st.fractions(min_value=-1000, max_value=1000, max_denominator=2**20),
                      st.integers(0, 20)).map(lambda t: (t[0], t[0] + F(1, 2**t[1])))


@given(st.integers(0, 6), intervals)
def test_pick_lands_in_class_and_interval(i, iv):
    lo, hi = iv
    x = pick(i, lo, hi)
    assert lo < x < hi
    assert color(x) == i


@given(st.integers(0, 6), st.integers(0, 2**600 - 1), st.booleans())
def test_pick_on_very_narrow_intervals(i, num, neg):
    lo = F(num, 2**600) * (-1 if neg else 1)
    hi = lo + F(1, 2**500)
    x = pick(i, lo, hi)
    assert lo < x < hi and color(x) == i


@given(st.integers(0, 5), intervals, st.fractions(min_value=0, max_value=1, max_denominator=97),
       st.fractions(min_value=0, max_value=1, max_denominator=97))
def test_shrinking_keeps_the_pick(i, iv, a, b):
    lo, hi = iv
    x = pick(i, lo, hi)
    lo2 = lo + (x - lo) * min(a, F(99, 100))
    hi2 = hi - (hi - x) * min(b, F(99, 100))
    assert pick(i, lo2, hi2) == x


@given(st.fractions(max_denominator=10**6))
def test_classes_are_disjoint(q):
    assert sum(1 for i in range(40) if color(q) == i) == 1
    d = q.denominator
    assert d % 2**color(q) == 0 and (d // 2**color(q)) % 2 == 1


def test_partition_registry():
    p = partition_by_name("dyadic-valuation")
    assert isinstance(p, DyadicValuationPartition)
    assert p.pick(0, RatInterval(F(3, 2), 2)) == F(5, 3)
    with pytest.raises(ValueError):
        partition_by_name("residue")
