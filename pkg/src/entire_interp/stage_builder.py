"""Stage-by-stage construction of an increasing polynomial sequence f_0, f_1, ...

Stage ``n = 2k+1`` pins the forward value ``f(w_k)`` into the class of
``w_k``; stage ``n = 2k+2`` pins a preimage ``f^{-1}(w_k)`` into that class.
Every correction vanishes at all points pinned earlier, so pinned values
never move again.  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dense_partition import DensePartition, DyadicValuationPartition, partition_by_name
from .exact_algebra import (
    ParseError,
    Poly,
    RatInterval,
    format_rational,
    parse_rational,
)
from .growth_bounds import AlphaCertificate, GrowthFn, select_alpha
from .root_certificates import RootEnclosure, monotone_solve, refine_enclosure

DEFAULT_RADIUS = Fraction(2)
SEPARATION_START = Fraction(1, 2**8)
SEPARATION_ROUNDS = 4096


class ConfigError(ValueError):
    """The run configuration is malformed or inconsistent."""


class ConstructionError(RuntimeError):
    """A stage could not be completed; always signals a bug or corrupt input."""


@dataclass(frozen=True)
class ConstructionConfig:
    x_p: Fraction
    y_p: Fraction
    w: tuple[Fraction, ...]
    stages: int
    partition: DensePartition = field(default_factory=DyadicValuationPartition)
    growth: GrowthFn = field(default_factory=GrowthFn)
    radius: Fraction = DEFAULT_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "x_p", Fraction(self.x_p))
        object.__setattr__(self, "y_p", Fraction(self.y_p))
        object.__setattr__(self, "w", tuple(Fraction(v) for v in self.w))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if len(set(self.w)) != len(self.w):
            seen = set()
            dup = next(v for v in self.w if v in seen or seen.add(v))
            raise ConfigError(f"w contains the duplicate entry {format_rational(dup)}")
        if not isinstance(self.stages, int) or self.stages < 0:
            raise ConfigError("stages must be a non-negative integer")
        if self.stages > 2 * len(self.w):
            raise ConfigError(f"stages={self.stages} exceeds 2*len(w)={2 * len(self.w)}")
        if self.radius < 0:
            raise ConfigError("radius must be non-negative")

    def with_stages(self, stages: int) -> "ConstructionConfig":
        return ConstructionConfig(self.x_p, self.y_p, self.w, stages, self.partition, self.growth, self.radius)

    def to_json(self) -> dict:
        return {
            "point": [format_rational(self.x_p), format_rational(self.y_p)],
            "w": [format_rational(v) for v in self.w],
            "partition": self.partition.name,
            "growth": self.growth.to_json(),
            "stages": self.stages,
            "radius": format_rational(self.radius),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        try:
            point = data["point"]
            if not isinstance(point, list) or len(point) != 2:
                raise ConfigError("point must be a pair of rational strings")
            ws = data.get("w", [])
            if not isinstance(ws, list):
                raise ConfigError("w must be an array of rational strings")
            w = tuple(parse_rational(s, f"w[{i}]") for i, s in enumerate(ws))
            stages = data.get("stages", 2 * len(w))
            if isinstance(stages, bool) or not isinstance(stages, int):
                raise ConfigError("stages must be an integer")
            growth = data.get("growth", {})
            if not isinstance(growth, dict):
                raise ConfigError("growth must be an object")
            return cls(
                x_p=parse_rational(point[0], "point[0]"),
                y_p=parse_rational(point[1], "point[1]"),
                w=w,
                stages=stages,
                partition=partition_by_name(data.get("partition", DyadicValuationPartition.name)),
                growth=GrowthFn.from_json(growth),
                radius=parse_rational(data.get("radius", "2"), "radius"),
            )
        except ParseError as exc:
            raise ConfigError(str(exc)) from None
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None


def base_function(x_p: Fraction, y_p: Fraction) -> Poly:
    """f_0(z) = (3/2)(z - x_P) + y_P."""
    return Poly.linear(Fraction(3, 2), y_p - Fraction(3, 2) * x_p)


@dataclass
class StageRecord:
    n: int
    k: int
    parity: str  # "odd" | "even"
    target: Fraction  # w_k
    case: str  # "A" | "B"
    reason: str  # why this case was taken
    f: Poly
    A: tuple[int, ...]
    B: tuple[int, ...]
    h: Optional[Poly] = None
    h_roots: tuple[Fraction, ...] = ()
    beta: Optional[int] = None
    alpha_cert: Optional[AlphaCertificate] = None
    M: Fraction = Fraction(0)
    d: Optional[Fraction] = None
    # odd stages: recorded f_n(w_k), None when w_k = x_P
    forward_value: Optional[Fraction] = None
    # index j whose pinned point supplied the Case B answer
    witness: Optional[int] = None
    registry_delta: dict = field(default_factory=dict)
    # even Case A: certified enclosures of f_{n-1}^{-1}(w_k) and (f_{n-1}+g_n)^{-1}(w_k)
    enclosures: tuple = ()

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "parity": self.parity,
            "target": format_rational(self.target),
            "case": self.case,
            "reason": self.reason,
            "f": self.f.to_json(),
            "A": list(self.A),
            "B": list(self.B),
            "M": format_rational(self.M),
            "registryDelta": {str(j): format_rational(x) for j, x in sorted(self.registry_delta.items())},
        }
        if self.h is not None:
            out["h"] = self.h.to_json()
            out["hRoots"] = [format_rational(r) for r in self.h_roots]
            out["beta"] = self.beta
            out["alphaCert"] = self.alpha_cert.to_json()
        if self.d is not None:
            out["d"] = format_rational(self.d)
        if self.forward_value is not None:
            out["forwardValue"] = format_rational(self.forward_value)
        if self.witness is not None:
            out["witness"] = self.witness
        if self.enclosures:
            out["enclosures"] = [e.to_json() for e in self.enclosures]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "StageRecord":
        where = f"stage {d.get('n', '?')}"

        def rat(key):
            return parse_rational(d[key], f"{where}.{key}")

        h = Poly.from_json(d["h"], f"{where}.h") if "h" in d else None
        return cls(
            n=int(d["n"]),
            k=int(d["k"]),
            parity=d["parity"],
            target=rat("target"),
            case=d["case"],
            reason=d.get("reason", ""),
            f=Poly.from_json(d["f"], f"{where}.f"),
            A=tuple(int(i) for i in d["A"]),
            B=tuple(int(i) for i in d["B"]),
            h=h,
            h_roots=tuple(parse_rational(s, f"{where}.hRoots") for s in d.get("hRoots", [])),
            beta=d.get("beta"),
            alpha_cert=AlphaCertificate.from_json(d["alphaCert"], f"{where}.alphaCert") if "alphaCert" in d else None,
            M=rat("M"),
            d=rat("d") if "d" in d else None,
            forward_value=rat("forwardValue") if "forwardValue" in d else None,
            witness=d.get("witness"),
            registry_delta={int(j): parse_rational(x, f"{where}.registryDelta") for j, x in d.get("registryDelta", {}).items()},
            enclosures=tuple(
                RootEnclosure(RatInterval(parse_rational(a, where), parse_rational(b, where)))
                for a, b in d.get("enclosures", [])
            ),
        )


@dataclass
class ConstructionState:
    config: ConstructionConfig
    f: Poly
    A: list[int] = field(default_factory=list)
    B: list[int] = field(default_factory=list)
    # index j -> exact x with f(x) = w_j
    registry: dict = field(default_factory=dict)
    records: list[StageRecord] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.records)


def init(config: ConstructionConfig) -> ConstructionState:
    return ConstructionState(config=config, f=base_function(config.x_p, config.y_p))


def pinned_points(state: ConstructionState) -> list[Fraction]:
    """Sorted distinct zeros every correction must have: x_P, A and the registered preimages."""
    cfg = state.config
    pts = {cfg.x_p}
    pts.update(cfg.w[a] for a in state.A)
    pts.update(state.registry[b] for b in state.B)
    return sorted(pts)


def correction_polynomial(x_p: Fraction, roots: list[Fraction]) -> tuple[Poly, int]:
    """(z - x_P)^beta * prod (z - r) over the other roots, beta in {1, 2} making the degree odd."""
    others = [r for r in roots if r != x_p]
    beta = 1 if len(others) % 2 == 0 else 2
    h = Poly.from_roots([x_p] * beta + others)
    return h, beta


def _correction(state: ConstructionState, n: int):
    roots = pinned_points(state)
    h, beta = correction_polynomial(state.config.x_p, roots)
    cert = select_alpha(h, n, state.config.growth)
    return h, tuple(roots), beta, cert


def _record(state: ConstructionState, **kw) -> StageRecord:
    n = state.n + 1
    k = (n - 1) // 2
    rec = StageRecord(
        n=n,
        k=k,
        parity="odd" if n % 2 else "even",
        target=state.config.w[k],
        f=state.f,
        A=tuple(state.A),
        B=tuple(state.B),
        **kw,
    )
    state.records.append(rec)
    return rec


def odd_step(state: ConstructionState, k: int) -> StageRecord:
    """Stage n = 2k+1: make f_n(w_k) lie in the class of w_k."""
    cfg = state.config
    n = 2 * k + 1
    if state.n != n - 1:
        raise ConstructionError(f"odd step {n} requested after stage {state.n}")
    wk = cfg.w[k]
    f_prev = state.f
    witness = None
    if wk == cfg.x_p:
        reason = "x_P"
    else:
        hits = [j for j in state.B if state.registry[j] == wk]
        if len(hits) > 1:
            raise ConstructionError(f"stage {n}: w_{k} is the registered preimage of several targets {hits}")
        witness = hits[0] if hits else None
        reason = "registered-preimage" if hits else ""
    if reason:
        state.A.append(k)
        fwd = cfg.w[witness] if witness is not None else None
        return _record(state, case="B", reason=reason, forward_value=fwd, witness=witness)

    h, roots, beta, cert = _correction(state, n)
    g_at = cert.alpha * h(wk)
    if g_at == 0:
        raise ConstructionError(f"stage {n}: correction vanishes at w_{k}; case misclassified")
    base = f_prev(wk)
    lo, hi = sorted((base, base + g_at))
    d = cfg.partition.pick(cfg.partition.color(wk), RatInterval(lo, hi))
    M = (d - base) / g_at
    if not 0 < M < 1:
        raise ConstructionError(f"stage {n}: M={M} outside (0, 1)")
    state.f = f_prev + (M * cert.alpha) * h
    state.A.append(k)
    return _record(state, case="A", reason="perturb", h=h, h_roots=roots, beta=beta,
                   alpha_cert=cert, M=M, d=d, forward_value=d)


def _separate(lower: Poly, upper: Poly, w: Fraction, eps: Fraction, rounds: int):
    """Disjoint enclosures of the solutions of lower(x) = w and upper(x) = w."""
    e0 = monotone_solve(lower, w, eps, check_derivative=False)
    e1 = monotone_solve(upper, w, eps, check_derivative=False)
    q0, q1 = lower - w, upper - w
    for _ in range(rounds):
        if e0.hi < e1.lo or e1.hi < e0.lo:
            return e0, e1
        if e0.exact and e1.exact:
            break
        eps /= 2
        e0 = refine_enclosure(q0, e0, eps)
        e1 = refine_enclosure(q1, e1, eps)
    raise ConstructionError("preimage enclosures failed to separate; the correction vanishes there")


def even_step(state: ConstructionState, k: int,
              eps: Fraction = SEPARATION_START, rounds: int = SEPARATION_ROUNDS) -> StageRecord:
    """Stage n = 2k+2: make f_n^{-1}(w_k) lie in the class of w_k."""
    cfg = state.config
    n = 2 * k + 2
    if state.n != n - 1:
        raise ConstructionError(f"even step {n} requested after stage {state.n}")
    wk = cfg.w[k]
    f_prev = state.f
    reason, pre, witness = "", None, None
    if wk == cfg.y_p:
        reason, pre = "y_P", cfg.x_p
    else:
        hits = [a for a in state.A if f_prev(cfg.w[a]) == wk]
        if len(hits) > 1:
            raise ConstructionError(f"stage {n}: w_{k} is the image of several handled points {hits}")
        if hits:
            witness = hits[0]
            reason, pre = "forward-image", cfg.w[witness]
    if reason:
        state.B.append(k)
        state.registry[k] = pre
        return _record(state, case="B", reason=reason, witness=witness, registry_delta={k: pre})

    h, roots, beta, cert = _correction(state, n)
    g = cert.alpha * h
    e0, e1 = _separate(f_prev, f_prev + g, wk, eps, rounds)
    lo, hi = (e0.hi, e1.lo) if e0.hi < e1.lo else (e1.hi, e0.lo)
    d = cfg.partition.pick(cfg.partition.color(wk), RatInterval(lo, hi))
    g_d = g(d)
    if g_d == 0:
        raise ConstructionError(f"stage {n}: correction vanishes at the chosen point")
    M = (wk - f_prev(d)) / g_d
    if not 0 < M < 1:
        raise ConstructionError(f"stage {n}: M={M} outside (0, 1)")
    state.f = f_prev + (M * cert.alpha) * h
    if state.f(d) != wk:
        raise ConstructionError(f"stage {n}: registered preimage does not evaluate exactly")
    state.B.append(k)
    state.registry[k] = d
    return _record(state, case="A", reason="perturb", h=h, h_roots=roots, beta=beta,
                   alpha_cert=cert, M=M, d=d, registry_delta={k: d}, enclosures=(e0, e1))


def step(state: ConstructionState) -> StageRecord:
    n = state.n + 1
    k = (n - 1) // 2
    return odd_step(state, k) if n % 2 else even_step(state, k)


def run(config: ConstructionConfig) -> ConstructionState:
    state = init(config)
    for _ in range(config.stages):
        step(state)
    return state
