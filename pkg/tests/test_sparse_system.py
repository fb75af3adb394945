import random
from fractions import Fraction as F

import pytest

from entire_interp.dense_partition import color
from entire_interp.sparse_system import (
    DisjointSet,
    SystemConfig,
    build_equiv_graph,
    build_finite_system,
    check_component_bounds,
    check_sparseness,
    check_upper_lower_sets,
)
from entire_interp.stage_builder import ConfigError


@pytest.fixture(scope="module")
def sample3():
    cfg = SystemConfig(points=((0, 0), (1, F(1, 2)), (F(-1, 3), 2)), reals=(F(5, 2), F(-3, 4), 7))
    return build_finite_system(cfg, workers=1)


def test_system_config_validation():
    with pytest.raises(ConfigError):
        SystemConfig(points=((0, 0),), reals=(1, F(2, 2)))
    with pytest.raises(ConfigError):
        SystemConfig(points=((0, 0), (1, 1), (2, 2)), reals=(1,))
    with pytest.raises(ConfigError):
        SystemConfig.from_json({"points": [["1"]], "reals": []})


def test_system_config_round_trip():
    cfg = SystemConfig(points=((0, 0), (1, F(1, 2))), reals=(F(5, 2),))
    assert SystemConfig.from_json(cfg.to_json()) == cfg


def test_member_alpha_zero_is_affine(sample3):
    f0 = sample3.states[0].f
    assert f0.degree == 1 and f0(0) == 0


def test_three_by_three_passes(sample3):
    assert all(sample3.verified)
    report = check_sparseness(sample3)
    assert report.passed, report.failures
    graph = build_equiv_graph(sample3)
    for z in graph.universe:
        rep = check_upper_lower_sets(graph, sample3, z)
        assert rep.passed, rep.failures
    assert check_component_bounds(graph) == []


def test_forward_and_preimage_tables(sample3):
    cfg = sample3.config
    for a in range(len(cfg.points)):
        f = sample3.states[a].f
        for xi, w in enumerate(cfg.reals):
            assert sample3.forward[a][xi] == f(w)
        for xi, x in sample3.preimage[a].items():
            assert xi < a and f(x) == cfg.reals[xi]


def test_swapped_target_is_caught(sample3):
    # negative control: pretend f_2 sends w_0 somewhere of the wrong color
    cfg = sample3.config
    bad = [row[:] for row in sample3.forward]
    v = bad[2][0]
    bad[2][0] = v + F(1, 2 ** (color(v) + 5))
    from dataclasses import replace

    report = check_sparseness(replace(sample3, forward=bad))
    assert not report.passed
    assert any(f[0] == 2 and f[1] == 0 for f in report.failures)
    assert cfg.reals[0] != sample3.preimage[2][0]


def test_universe_at_x_p_only(sample3):
    graph = build_equiv_graph(sample3, universe=[F(0)])
    # f_0 pins 0 but f_1 and f_2 move it
    assert graph.out_neighbours(F(0)) == {sample3.states[a].f(0) for a in (1, 2)}
    assert F(0) not in {u for (u, v) in graph.edges if graph.edges[(u, v)] == [0]}


def test_e1_edge():
    cfg = SystemConfig(points=((5, 5), (0, 0)), reals=(1,))
    sample = build_finite_system(cfg, workers=1)
    graph = build_equiv_graph(sample, universe=[F(1)])
    f1 = sample.states[1].f
    assert (F(1), f1(1)) in graph.edges
    assert graph.dsu.same(F(1), f1(1))


def test_component_order_independence(sample3):
    graph = build_equiv_graph(sample3)
    edges = sorted(graph.edges)
    rng = random.Random(3)
    for _ in range(5):
        rng.shuffle(edges)
        d = DisjointSet(graph.universe)
        for u, v in edges:
            d.add(u)
            d.add(v)
            d.union(u, v)
        assert d.components() == graph.components()


def test_components_partition_vertices(sample3):
    graph = build_equiv_graph(sample3)
    comps = graph.components()
    flat = [x for c in comps for x in c]
    assert sorted(flat) == graph.vertices
    assert len(set(flat)) == len(flat)
