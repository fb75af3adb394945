"""A finite family of constructions over a shared partition, and the
equivalence relation generated by their graphs.

Function ``alpha`` passes through P_alpha and handles the first ``alpha``
reals.  So for xi < alpha the value f_alpha(w_xi) and the preimage
f_alpha^{-1}(w_xi) fall in the class of w_xi, and only the indices
alpha <= xi are exceptional.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from networkx.utils import UnionFind

from .dense_partition import DensePartition, DyadicValuationPartition, partition_by_name
from .exact_algebra import ParseError, format_rational, parse_rational
from .growth_bounds import GrowthFn
from .root_certificates import monotone_solve
from .stage_builder import ConfigError, ConstructionConfig, ConstructionState, run
from .verifier import verify_state

INVERSE_EPS = Fraction(1, 2**64)


class DisjointSet:
    """Union-find over hashable points with a canonical component listing."""

    def __init__(self, items: Iterable = ()):
        self._uf = UnionFind()
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        self._uf[x]  # registers x as a singleton

    @property
    def parent(self) -> dict:
        return self._uf.parents

    def find(self, x):
        return self._uf[x]

    def union(self, a, b) -> None:
        self._uf.union(a, b)

    def same(self, a, b) -> bool:
        return self._uf[a] == self._uf[b]

    def components(self) -> list[list]:
        """Each component sorted, components sorted by first element."""
        return sorted((sorted(g) for g in self._uf.to_sets()), key=lambda g: g[0])


@dataclass(frozen=True)
class SystemConfig:
    points: tuple[tuple[Fraction, Fraction], ...]
    reals: tuple[Fraction, ...]
    partition: DensePartition = field(default_factory=DyadicValuationPartition)
    growth: GrowthFn = field(default_factory=GrowthFn)
    radius: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((Fraction(a), Fraction(b)) for a, b in self.points))
        object.__setattr__(self, "reals", tuple(Fraction(v) for v in self.reals))
        if len(set(self.reals)) != len(self.reals):
            raise ConfigError("reals contain a duplicate entry")
        if len(self.points) > len(self.reals) + 1:
            raise ConfigError("need at least len(points) - 1 reals")

    def construction(self, alpha: int) -> ConstructionConfig:
        a, b = self.points[alpha]
        w = self.reals[:alpha]
        return ConstructionConfig(a, b, w, 2 * alpha, self.partition, self.growth, self.radius)

    def to_json(self) -> dict:
        return {
            "points": [[format_rational(a), format_rational(b)] for a, b in self.points],
            "reals": [format_rational(v) for v in self.reals],
            "partition": self.partition.name,
            "growth": self.growth.to_json(),
            "radius": format_rational(self.radius),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SystemConfig":
        if not isinstance(data, dict):
            raise ConfigError("system config must be a JSON object")
        try:
            pts = data.get("points", [])
            if not isinstance(pts, list) or any(not isinstance(p, list) or len(p) != 2 for p in pts):
                raise ConfigError("points must be an array of rational pairs")
            return cls(
                points=tuple((parse_rational(a, f"points[{i}][0]"), parse_rational(b, f"points[{i}][1]"))
                             for i, (a, b) in enumerate(pts)),
                reals=tuple(parse_rational(s, f"reals[{i}]") for i, s in enumerate(data.get("reals", []))),
                partition=partition_by_name(data.get("partition", DyadicValuationPartition.name)),
                growth=GrowthFn.from_json(data.get("growth", {})),
                radius=parse_rational(data.get("radius", "2"), "radius"),
            )
        except ParseError as exc:
            raise ConfigError(str(exc)) from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None


@dataclass
class SparseSample:
    config: SystemConfig
    states: list[ConstructionState]
    verified: list[bool]
    # forward[alpha][xi] = f_alpha(w_xi) for every xi
    forward: list[list[Fraction]]
    # preimage[alpha][xi] = registered f_alpha^{-1}(w_xi) for xi < alpha
    preimage: list[dict]

    @property
    def functions(self):
        return [s.f for s in self.states]


def _build_one(cfg: ConstructionConfig) -> tuple[ConstructionState, bool]:
    state = run(cfg)
    return state, verify_state(state).passed


def build_finite_system(config: SystemConfig, workers: Optional[int] = None) -> SparseSample:
    cfgs = [config.construction(a) for a in range(len(config.points))]
    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cfgs))) as pool:
            built = list(pool.map(_build_one, cfgs))
    else:
        built = [_build_one(c) for c in cfgs]
    states = [s for s, _ in built]
    forward = [[s.f(w) for w in config.reals] for s in states]
    preimage = [dict(s.registry) for s in states]
    return SparseSample(config, states, [ok for _, ok in built], forward, preimage)


@dataclass
class SparsenessReport:
    passed: bool
    failures: list[tuple]  # (alpha, xi, what, detail)
    # colors[alpha][xi] = (forward color, preimage color) for xi < alpha, else None
    colors: list[list[Optional[tuple[int, int]]]]
    exceptional: list[int]  # per xi, number of alpha <= xi

    def to_json(self) -> dict:
        return {
            "status": "PASS" if self.passed else "FAIL",
            "failures": [{"alpha": a, "xi": x, "check": w, "detail": d} for a, x, w, d in self.failures],
            "exceptional": self.exceptional,
        }

    def csv_rows(self) -> list[list[str]]:
        """Matrix of colors, rows alpha, columns xi; exceptional cells are '-'."""
        width = len(self.exceptional)
        rows = [["alpha"] + [f"xi={x}" for x in range(width)]]
        for a, row in enumerate(self.colors):
            rows.append([str(a)] + ["-" if c is None else f"{c[0]}/{c[1]}" for c in row])
        return rows


def check_sparseness(sample: SparseSample) -> SparsenessReport:
    cfg = sample.config
    color = cfg.partition.color
    failures = []
    colors = []
    for a, (xa, ya) in enumerate(cfg.points):
        if not sample.verified[a]:
            failures.append((a, None, "verifier", "construction failed verification"))
        f = sample.states[a].f
        row: list = []
        for xi, w in enumerate(cfg.reals):
            if a <= xi:
                row.append(None)
                continue
            fw = sample.forward[a][xi]
            if fw != f(w):
                failures.append((a, xi, "forward-table", f"recorded {format_rational(fw)} != f(w)"))
            pre = sample.preimage[a].get(xi)
            if pre is None or f(pre) != w:
                failures.append((a, xi, "preimage-table", "registered preimage missing or wrong"))
                row.append(None)
                continue
            if w != xa and color(fw) != color(w):
                failures.append((a, xi, "forward-class", f"color(f(w)) = {color(fw)} != {color(w)}"))
            if w != ya and color(pre) != color(w):
                failures.append((a, xi, "backward-class", f"color(f^-1(w)) = {color(pre)} != {color(w)}"))
            row.append((color(fw), color(pre)))
        colors.append(row)
    exceptional = [min(xi + 1, len(cfg.points)) for xi in range(len(cfg.reals))]
    for xi, e in enumerate(exceptional):
        if e > xi + 1:
            failures.append((None, xi, "exceptional-count", f"{e} > {xi + 1}"))
    return SparsenessReport(not failures, failures, colors, exceptional)


def default_universe(sample: SparseSample) -> list[Fraction]:
    """Reals, the points a_alpha and b_alpha, and every handled target."""
    cfg = sample.config
    pts = set(cfg.reals)
    for a, (xa, ya) in enumerate(cfg.points):
        pts.update((xa, ya))
        for xi in range(min(a, len(cfg.reals))):
            pts.add(sample.forward[a][xi])
            pts.add(sample.preimage[a][xi])
    return sorted(pts)


def _rational_preimage(sample: SparseSample, a: int, v: Fraction) -> tuple[Optional[Fraction], bool]:
    """(f_a^{-1}(v), determined).  Exact for registered points and rational roots."""
    cfg = sample.config
    xa, ya = cfg.points[a]
    if v == ya:
        return xa, True
    for xi, x in sample.preimage[a].items():
        if cfg.reals[xi] == v:
            return x, True
    enc = monotone_solve(sample.states[a].f, v, INVERSE_EPS, check_derivative=False)
    if enc.exact:
        return enc.lo, True
    return None, False


@dataclass
class EquivGraph:
    universe: list[Fraction]
    vertices: list[Fraction]
    # (u, v) -> sorted indices alpha with u != a_alpha and f_alpha(u) = v
    edges: dict
    dsu: DisjointSet
    undetermined: list[tuple[int, Fraction]]

    def out_neighbours(self, z: Fraction) -> set:
        return {v for (u, v) in self.edges if u == z}

    def in_neighbours(self, z: Fraction) -> set:
        return {u for (u, v) in self.edges if v == z}

    def components(self) -> list[list[Fraction]]:
        return self.dsu.components()

    def to_json(self) -> dict:
        return {
            "universe": [format_rational(x) for x in self.universe],
            "components": [[format_rational(x) for x in c] for c in self.components()],
            "edges": [[format_rational(u), format_rational(v), fs] for (u, v), fs in sorted(self.edges.items())],
            "undetermined": [[a, format_rational(v)] for a, v in self.undetermined],
        }


def build_equiv_graph(sample: SparseSample, universe: Optional[list] = None) -> EquivGraph:
    """Edges (u, f_alpha(u)) with u != a_alpha (equivalently f_alpha(u) != b_alpha).

    Forward edges leave every universe point; backward edges enter every
    universe point whenever the preimage is an exact rational.  Endpoints
    outside the universe join the vertex set so no edge is dropped.
    """
    cfg = sample.config
    uni = sorted(set(universe if universe is not None else default_universe(sample)))
    edges: dict = {}
    undetermined = []
    for a, (xa, ya) in enumerate(cfg.points):
        f = sample.states[a].f
        for u in uni:
            if u != xa:
                edges.setdefault((u, f(u)), set()).add(a)
        for v in uni:
            if v == ya:
                continue
            x, known = _rational_preimage(sample, a, v)
            if not known:
                undetermined.append((a, v))
            elif f(x) == v and x != xa:
                edges.setdefault((x, v), set()).add(a)
    dsu = DisjointSet(uni)
    for u, v in sorted(edges):
        dsu.add(u)
        dsu.add(v)
        dsu.union(u, v)
    vertices = sorted(dsu.parent)
    return EquivGraph(uni, vertices, {e: sorted(fs) for e, fs in edges.items()}, dsu, undetermined)


@dataclass
class PointReport:
    z: Fraction
    passed: bool
    failures: list[str]
    up: list[Fraction]
    down: list[Fraction]


def check_upper_lower_sets(graph: EquivGraph, sample: SparseSample, z: Fraction) -> PointReport:
    cfg = sample.config
    z = Fraction(z)
    failures = []
    fs = sample.functions
    images = {fs[a](z) for a, (xa, _) in enumerate(cfg.points) if z != xa}
    up = graph.out_neighbours(z)
    if not up <= images:
        failures.append(f"z^up has {sorted(up - images)} outside the direct images")
    down = graph.in_neighbours(z)
    for u in down:
        if not any(z != yb and fs[a](u) == z for a, (_, yb) in enumerate(cfg.points)):
            failures.append(f"{format_rational(u)} in z_down is no preimage of z")
    if len(up) > len(cfg.points):
        failures.append(f"|z^up| = {len(up)} exceeds the number of functions")
    for a, (xa, _) in enumerate(cfg.points):
        if z == xa:
            continue
        v = fs[a](z)
        if (z, v) not in graph.edges:
            failures.append(f"edge (z, f_{a}(z)) missing")
        elif not graph.dsu.same(z, v):
            failures.append(f"z and f_{a}(z) in different components")
    return PointReport(z, not failures, failures, sorted(up), sorted(down))


def check_component_bounds(graph: EquivGraph) -> list[str]:
    """Each component has at most 1 + (edges touching it) points."""
    failures = []
    for comp in graph.components():
        members = set(comp)
        touching = sum(1 for (u, v) in graph.edges if u in members or v in members)
        if len(comp) > 1 + touching:
            failures.append(f"component of {format_rational(comp[0])} has {len(comp)} points, {touching} edges")
    return failures
