from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entire_interp.dense_partition import color
from entire_interp.exact_algebra import Poly
from entire_interp.records import dumps, records_document
from entire_interp.stage_builder import (
    ConfigError,
    ConstructionConfig,
    ConstructionError,
    correction_polynomial,
    even_step,
    init,
    odd_step,
    run,
)
from entire_interp.verifier import verify_state


def test_init_base_function():
    assert init(ConstructionConfig(0, 0, (), 0)).f == Poly([0, F(3, 2)])
    assert init(ConstructionConfig(1, 1, (), 0)).f == Poly([F(-1, 2), F(3, 2)])


@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_base_passes_through_p(x, y):
    assert init(ConstructionConfig(x, y, (), 0)).f(x) == y


def test_duplicate_w_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        ConstructionConfig(0, 0, (1, F(2, 2)), 2)


def test_stage_count_bounded_by_schedule():
    with pytest.raises(ConfigError):
        ConstructionConfig(0, 0, (1,), 3)


def test_e1_stage1(e1_state):
    r1 = e1_state.records[0]
    assert r1.case == "A"
    assert r1.h == Poly([0, 1]) and r1.beta == 1
    assert r1.alpha_cert.alpha == F(1, 2)
    assert r1.d == F(5, 3) and r1.M == F(1, 3)
    assert r1.f == Poly([0, F(5, 3)])
    assert r1.f(1) == F(5, 3) and color(F(5, 3)) == 0


def test_e1_stage2(e1_state):
    r2 = e1_state.records[1]
    assert r2.case == "A"
    assert r2.h == Poly([0, 0, -1, 1]) and r2.beta == 2
    assert r2.h.degree % 2 == 1
    d = r2.registry_delta[0]
    assert d == r2.d
    assert r2.f(d) == 1
    assert color(d) == 0
    assert 0 < r2.M < 1
    # d sits strictly between the old and new preimage of 1
    assert F(3, 5) < d or d < F(3, 5)
    assert r2.f(1) == F(5, 3)


def test_odd_case_b_at_x_p():
    state = init(ConstructionConfig(0, 5, (0,), 1))
    rec = odd_step(state, 0)
    assert rec.case == "B" and rec.reason == "x_P"
    assert rec.f == state.records[0].f == Poly([5, F(3, 2)])
    assert rec.A == (0,) and rec.B == ()


def test_even_case_b_at_y_p():
    state = run(ConstructionConfig(0, 5, (5,), 2))
    rec = state.records[1]
    assert rec.case == "B" and rec.reason == "y_P"
    assert rec.registry_delta == {0: 0}
    assert rec.f == state.records[0].f


def test_odd_case_b_registry_branch(e1_state):
    d = e1_state.registry[0]
    state = run(ConstructionConfig(0, 0, (1, d), 3))
    rec = state.records[2]
    assert rec.case == "B" and rec.reason == "registered-preimage"
    assert rec.witness == 0
    assert state.f(d) == 1 == rec.forward_value
    assert color(rec.forward_value) == color(d)


def test_even_case_b_forward_image():
    # w_1 = f_1(w_0) makes stage 4 a Case B
    first = run(ConstructionConfig(0, 0, (1, 2), 1))
    image = first.f(1)
    state = run(ConstructionConfig(0, 0, (1, image), 4))
    rec = state.records[3]
    assert rec.case == "B" and rec.reason == "forward-image"
    assert rec.registry_delta == {1: F(1)}
    assert verify_state(state).passed


def test_steps_must_follow_schedule():
    state = init(ConstructionConfig(0, 0, (1, 2), 4))
    with pytest.raises(ConstructionError):
        even_step(state, 0)


def test_beta_makes_degree_odd():
    for roots in ([0], [0, 1], [0, 1, 2], [0, F(1, 2), 2, 3]):
        h, beta = correction_polynomial(F(0), roots)
        assert beta in (1, 2) and h.degree % 2 == 1 and h.leading == 1
        for r in roots:
            assert h(r) == 0


def test_empty_run():
    state = run(ConstructionConfig(F(1, 3), F(2, 7), (), 0))
    assert state.records == [] and state.f(F(1, 3)) == F(2, 7)


def test_determinism():
    cfg = ConstructionConfig(F(1, 2), F(-3, 4), (F(2, 3), F(-5, 7), F(9, 4)), 6)
    assert dumps(records_document(run(cfg))) == dumps(records_document(run(cfg)))


def test_bookkeeping_and_registry_stability():
    cfg = ConstructionConfig(F(1, 2), F(-3, 4), (F(2, 3), F(-5, 7), F(9, 4)), 6)
    state = run(cfg)
    A, B = [], []
    registry = {}
    for rec in state.records:
        k = rec.k
        if rec.parity == "odd":
            A.append(k)
        else:
            B.append(k)
            registry.update(rec.registry_delta)
        assert list(rec.A) == A and list(rec.B) == B
        assert rec.f(cfg.x_p) == cfg.y_p
        for j, x in registry.items():
            assert rec.f(x) == cfg.w[j]
        if rec.case == "A":
            assert 0 < rec.M < 1


@settings(max_examples=8)
@given(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9), min_size=1, max_size=3, unique=True),
       st.fractions(min_value=-9, max_value=9, max_denominator=9),
       st.fractions(min_value=-9, max_value=9, max_denominator=9))
def test_random_small_runs_verify(ws, x, y):
    state = run(ConstructionConfig(x, y, tuple(ws), 2 * len(ws)))
    report = verify_state(state)
    assert report.passed, report.failures()
