import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entire_interp.exact_algebra import GaussianRational, Poly
from entire_interp.growth_bounds import (
    GrowthFn,
    TaylorDepthError,
    exp_lower,
    exp_upper,
    min_ratio_lower_bound,
    polynomial_envelope,
    round_up_bits,
    select_alpha,
)


def test_exp_lower_examples():
    assert exp_lower(0, 5) == 1
    assert exp_lower(2, 3) == F(19, 3)
    v = exp_lower(1, 10)
    assert F(271827, 100000) < v < F(271828183, 10**8)


def test_exp_upper_examples():
    assert exp_upper(0, 4) == 1
    v = exp_upper(1, 10)
    assert math.e < v < 2.71829


def test_exp_upper_needs_depth():
    with pytest.raises(TaylorDepthError):
        exp_upper(12, 10)
    with pytest.raises(ValueError):
        exp_lower(-1, 3)


@given(st.fractions(min_value=0, max_value=9, max_denominator=64), st.integers(8, 20), st.integers(8, 20))
def test_exp_sandwich(t, K1, K2):
    assert exp_lower(t, K1) <= exp_upper(t, K2)
    assert exp_lower(t, K1) <= math.exp(t) * (1 + 1e-12)
    assert exp_upper(t, K2) >= math.exp(t) * (1 - 1e-12)


@given(st.fractions(min_value=0, max_value=5, max_denominator=16), st.integers(1, 15))
def test_exp_lower_increasing_in_depth(t, K):
    assert exp_lower(t, K) <= exp_lower(t, K + 1)


def test_envelope_examples():
    assert polynomial_envelope(Poly([0, 1])) == (2, 1)
    assert polynomial_envelope(Poly([0, 0, -1, 1])) == (4, 16)
    assert polynomial_envelope(Poly([3])) == (1, 3)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=5),
       st.fractions(min_value=-4, max_value=4, max_denominator=9),
       st.fractions(min_value=-4, max_value=4, max_denominator=9))
def test_envelope_holds_on_complex_samples(coeffs, re, im):
    h = Poly(coeffs)
    if h.is_zero():
        return
    m, c = polynomial_envelope(h)
    z = GaussianRational(re, im)
    lhs = h(z).abs2()
    r2 = z.abs2()
    # |h|^2 <= (|z|^m + c)^2, compared through an upper bound on |z|^m
    rm_upper = F(math.ceil(float(r2) ** (m / 2) * (1 + 1e-9) * 10**6), 10**6)
    assert lhs <= (rm_upper + c) ** 2


def test_round_up_bits():
    c = F(10**30 + 7, 3)
    r = round_up_bits(c)
    assert c <= r <= c * (1 + F(1, 2**62))
    assert round_up_bits(F(16)) == 16


def test_min_ratio_examples():
    # e^t/(t^2+1) has infimum 1 at t = 0
    assert min_ratio_lower_bound(2, F(1), 8) == 1
    r = min_ratio_lower_bound(4, F(16), 8)
    assert 0 < r <= F(1, 16)
    with pytest.raises(TaylorDepthError):
        min_ratio_lower_bound(4, F(16), 4)


def test_select_alpha_e1_stage1():
    cert = select_alpha(Poly([0, 1]), 1)
    assert cert.alpha == F(1, 2)
    assert (cert.m, cert.c) == (2, 1)
    assert cert.deriv_floor == 1


def test_select_alpha_e1_stage2_certificate():
    cert = select_alpha(Poly([0, 0, -1, 1]), 2)
    checks = cert.satisfies()
    assert all(checks.values()), checks
    assert cert.alpha <= F(3, 4)
    assert cert.deriv_floor <= F(-1, 3)
    # largest admissible power of two: doubling breaks some bound
    bigger = cert.alpha * 2
    eps = F(1, 4)
    assert bigger > eps or bigger > eps * cert.min_ratio_lower_bound or bigger * -cert.deriv_floor > eps


def test_nonnegative_derivative_imposes_nothing():
    cert = select_alpha(Poly([0, 1, 0, 1]), 1)
    assert cert.deriv_floor >= 0


@given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=5), min_size=0, max_size=4),
       st.integers(1, 8))
def test_certificate_inequalities_on_samples(roots, n):
    h = Poly.from_roots([0] + roots + ([1] if len(roots) % 2 else []))
    if h.degree % 2 == 0:
        h = h * Poly([0, 1])
    cert = select_alpha(h, n)
    eps = F(1, 2**n)
    assert all(cert.satisfies().values())
    rng = random.Random(n)
    dh = h.derivative()
    for _ in range(200):
        t = F(rng.randint(0, 4 * cert.m * 64), 64)
        assert cert.alpha * (t**cert.m + cert.c) <= eps * exp_lower(t, cert.taylor_terms)
        x = F(rng.randint(-2000, 2000), 100)
        assert cert.alpha * dh(x) >= -eps


def test_raising_depth_never_lowers_alpha():
    h = Poly.from_roots([0, 1, F(-1, 2)])
    a8 = select_alpha(h, 3, GrowthFn(taylor_terms=8)).alpha
    a16 = select_alpha(h, 3, GrowthFn(taylor_terms=16)).alpha
    assert a16 >= a8


def test_growth_fn_rejects_unknown_kind():
    with pytest.raises(ValueError):
        GrowthFn(kind="sqrt")
