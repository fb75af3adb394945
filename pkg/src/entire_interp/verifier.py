"""Independent re-checking of finished constructions.

The verifier reads a records document, rebuilds the bookkeeping (handled
sets, preimage registry) from the recorded cases on its own, and
re-establishes every inequality from f_{n-1}, f_n, h_n, alpha_n and M_n.
Failures are report entries with a witness, never exceptions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dense_partition import DensePartition
from .exact_algebra import (
    GaussianRational,
    ParseError,
    Poly,
    format_gaussian,
    format_rational,
    parse_gaussian,
    parse_rational,
    poly_derivative,
)
from .growth_bounds import (
    AlphaCertificate,
    GrowthFn,
    TaylorDepthError,
    derivative_floor,
    exp_lower,
    min_ratio_lower_bound,
    polynomial_envelope,
)
from .records import records_document
from .root_certificates import UnboundedBelow, certified_minimum
from .stage_builder import ConfigError, ConstructionConfig, base_function

INVARIANTS = ("I", "II", "III", "IV", "V", "VI", "VII")
INVARIANT_NAMES = {
    "I": "real polynomial",
    "II": "interpolates P",
    "III": "derivative floor",
    "IV": "growth-bounded increment",
    "V": "forward targets",
    "VI": "backward targets",
    "VII": "pinned points stable",
}
SAMPLES = 200


@dataclass
class Check:
    label: str
    passed: bool
    witness: str = ""

    def to_json(self) -> dict:
        return {"label": self.label, "status": "PASS" if self.passed else "FAIL", "witness": self.witness}


@dataclass
class InvariantResult:
    invariant: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def witness(self) -> str:
        return "; ".join(f"{c.label}: {c.witness}" for c in self.checks if not c.passed)

    def add(self, label: str, ok: bool, witness: str = "") -> bool:
        self.checks.append(Check(label, bool(ok), "" if ok else witness))
        return bool(ok)

    def to_json(self) -> dict:
        return {
            "invariant": self.invariant,
            "status": "PASS" if self.passed else "FAIL",
            "witness": self.witness,
            "checks": [c.to_json() for c in self.checks],
        }


@dataclass
class StageResult:
    n: int
    results: dict  # invariant label -> InvariantResult

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_json(self) -> dict:
        return {"n": self.n, "status": "PASS" if self.passed else "FAIL",
                "invariants": [self.results[k].to_json() for k in INVARIANTS]}


@dataclass
class VerificationReport:
    base: InvariantResult
    stages: list[StageResult]
    theorem: list[InvariantResult]
    cauchy: list[Check]
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (not self.errors and self.base.passed and all(s.passed for s in self.stages)
                and all(t.passed for t in self.theorem) and all(c.passed for c in self.cauchy))

    def failures(self) -> list[tuple[int, str, str]]:
        out = []
        for s in self.stages:
            for k in INVARIANTS:
                r = s.results[k]
                if not r.passed:
                    out.append((s.n, k, r.witness))
        return out

    def to_json(self) -> dict:
        return {
            "status": "PASS" if self.passed else "FAIL",
            "errors": list(self.errors),
            "base": self.base.to_json(),
            "stages": [s.to_json() for s in self.stages],
            "theorem": [t.to_json() for t in self.theorem],
            "cauchy": {"status": "PASS" if all(c.passed for c in self.cauchy) else "FAIL",
                       "failures": [c.to_json() for c in self.cauchy if not c.passed],
                       "checked": len(self.cauchy)},
        }

    def csv_rows(self) -> list[tuple[int, str, str, str]]:
        return [(s.n, k, "PASS" if s.results[k].passed else "FAIL", s.results[k].witness)
                for s in self.stages for k in INVARIANTS]


def _fr(x) -> str:
    return format_rational(x)


# ---------------------------------------------------------------- parsing


@dataclass
class _Stage:
    n: int
    k: int
    parity: str
    case: str
    f: Poly
    f_nonreal: list  # indices of non-real coefficients
    A: tuple
    B: tuple
    h: Optional[Poly]
    beta: Optional[int]
    cert: Optional[AlphaCertificate]
    M: Fraction
    d: Optional[Fraction]
    forward_value: Optional[Fraction]
    witness: Optional[int]
    registry_delta: dict
    target: Fraction


def _parse_poly_gaussian(raw, where: str) -> tuple[Poly, list]:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected an array")
    coeffs = [parse_gaussian(s, f"{where}[{i}]") for i, s in enumerate(raw)]
    nonreal = [(i, c) for i, c in enumerate(coeffs) if not c.is_real()]
    return Poly(c.re for c in coeffs), nonreal


def _parse_stage(d: dict) -> _Stage:
    where = f"stage {d.get('n', '?')}"
    f, nonreal = _parse_poly_gaussian(d["f"], f"{where}.f")
    return _Stage(
        n=int(d["n"]),
        k=int(d["k"]),
        parity=d["parity"],
        case=d["case"],
        f=f,
        f_nonreal=nonreal,
        A=tuple(int(i) for i in d["A"]),
        B=tuple(int(i) for i in d["B"]),
        h=Poly.from_json(d["h"], f"{where}.h") if "h" in d else None,
        beta=d.get("beta"),
        cert=AlphaCertificate.from_json(d["alphaCert"], f"{where}.alphaCert") if "alphaCert" in d else None,
        M=parse_rational(d["M"], f"{where}.M"),
        d=parse_rational(d["d"], f"{where}.d") if "d" in d else None,
        forward_value=parse_rational(d["forwardValue"], f"{where}.forwardValue") if "forwardValue" in d else None,
        witness=d.get("witness"),
        registry_delta={int(j): parse_rational(x, f"{where}.registryDelta") for j, x in d.get("registryDelta", {}).items()},
        target=parse_rational(d["target"], f"{where}.target"),
    )


# ---------------------------------------------------------------- checks


def _derivative_floor_check(res: InvariantResult, f: Poly, floor: Fraction, label: str) -> None:
    """Certify f' - floor >= 0 on R."""
    q = poly_derivative(f) - floor
    try:
        cert = certified_minimum(q)
    except UnboundedBelow as exc:
        res.add(label, False, f"f' - {_fr(floor)} unbounded below ({exc})")
        return
    if cert.lower >= 0:
        res.add(label, True)
    elif cert.upper < 0:
        res.add(label, False, f"f'({_fr(cert.at)}) = {_fr(cert.upper + floor)} < {_fr(floor)}")
    else:
        res.add(label, False, f"lower bound {_fr(cert.lower)} of f' - {_fr(floor)} not certified >= 0")


def _check_certificate(res: InvariantResult, st: _Stage, growth: GrowthFn) -> None:
    cert, h, n = st.cert, st.h, st.n
    eps = Fraction(1, 2**n)
    res.add("stage-index", cert.stage == n, f"certificate stage {cert.stage} != {n}")
    res.add("alpha>0", cert.alpha > 0, f"alpha = {_fr(cert.alpha)}")
    res.add("alpha<=2^-n", cert.alpha <= eps, f"alpha = {_fr(cert.alpha)} > {_fr(eps)}")
    m, c = polynomial_envelope(h)
    res.add("envelope", (m, c) == (cert.m, cert.c),
            f"recorded (m, c) = ({cert.m}, {_fr(cert.c)}), recomputed ({m}, {_fr(c)})")
    K = cert.taylor_terms
    if not res.add("taylor-depth", K > cert.m and K >= growth.taylor_terms, f"K = {K} with m = {cert.m}"):
        return
    try:
        ratio = min_ratio_lower_bound(cert.m, cert.c, K)
    except TaylorDepthError as exc:
        res.add("min-ratio", False, str(exc))
        return
    res.add("min-ratio", cert.min_ratio_lower_bound <= ratio,
            f"recorded {_fr(cert.min_ratio_lower_bound)} exceeds recomputed {_fr(ratio)}")
    res.add("growth-bound", cert.alpha <= eps * cert.min_ratio_lower_bound,
            f"alpha = {_fr(cert.alpha)} > 2^-n * minRatio = {_fr(eps * cert.min_ratio_lower_bound)}")
    rng = random.Random(n)
    scale = 2**16
    for _ in range(SAMPLES):
        t = Fraction(rng.randint(0, 4 * cert.m * scale), scale)
        lhs = cert.alpha * (t**cert.m + cert.c)
        if lhs > eps * exp_lower(t, K):
            res.add("growth-samples", False, f"t = {_fr(t)}: alpha*(t^m+c) > 2^-n*T_K(t)")
            break
    else:
        res.add("growth-samples", True)


def _check_correction_shape(res: InvariantResult, st: _Stage, zeros: list, probe: Optional[Fraction]) -> None:
    h = st.h
    bad = [z for z in zeros if h(z) != 0]
    res.add("h-vanishes", not bad, f"h({_fr(bad[0])}) != 0" if bad else "")
    res.add("h-odd-degree", h.degree % 2 == 1, f"deg h = {h.degree}")
    res.add("h-positive-lead", h.leading > 0, f"lead = {_fr(h.leading)}")
    if probe is not None:
        res.add("h-probe-nonzero", h(probe) != 0, f"h({_fr(probe)}) = 0")


class _Verifier:
    def __init__(self, cfg: ConstructionConfig, base: Poly, stages: list[_Stage]):
        self.cfg = cfg
        self.base = base
        self.stages = stages
        self.partition: DensePartition = cfg.partition
        self.fs: list[Poly] = [base] + [s.f for s in stages]

    def color(self, q: Fraction) -> int:
        return self.partition.color(q)

    def run(self) -> tuple[InvariantResult, list[StageResult]]:
        cfg = self.cfg
        base = InvariantResult("base")
        expected = base_function(cfg.x_p, cfg.y_p)
        base.add("f0-affine", self.base == expected, f"recorded f_0 = {self.base}, expected {expected}")
        base.add("stage-count", len(self.stages) == cfg.stages,
                 f"{len(self.stages)} stages recorded, config says {cfg.stages}")
        A: list[int] = []
        B: list[int] = []
        registry: dict = {}
        out = []
        for i, st in enumerate(self.stages):
            n = i + 1
            results = {k: InvariantResult(k) for k in INVARIANTS}
            if st.n != n or st.k != (n - 1) // 2 or st.parity != ("odd" if n % 2 else "even"):
                results["V"].add("schedule", False, f"record {i} labelled n={st.n}, k={st.k}, {st.parity}")
            self.check(st, n, results, A, B, registry)
            out.append(StageResult(n, results))
        return base, out

    def check(self, st: _Stage, n: int, res: dict, A: list, B: list, registry: dict) -> None:
        cfg = self.cfg
        k = (n - 1) // 2
        wk = cfg.w[k]
        f_prev, f = self.fs[n - 1], st.f
        eps = Fraction(1, 2**n)
        odd = n % 2 == 1

        # (I) entire and real on R: a polynomial with real rational coefficients
        r = res["I"]
        r.add("real-coefficients", not st.f_nonreal,
              f"coefficient {st.f_nonreal[0][0]} = {format_gaussian(st.f_nonreal[0][1])}" if st.f_nonreal else "")
        r.add("target-matches-w", st.target == wk, f"recorded w_k = {_fr(st.target)}, config w_{k} = {_fr(wk)}")

        # (II) interpolation at P
        val = f(cfg.x_p)
        res["II"].add("f(x_P)=y_P", val == cfg.y_p, f"f_{n}({_fr(cfg.x_p)}) = {_fr(val)} != {_fr(cfg.y_p)}")

        # bookkeeping and case analysis, recomputed independently
        zeros = sorted({cfg.x_p} | {cfg.w[a] for a in A} | {registry[b] for b in B})
        if odd:
            expect_b = wk == cfg.x_p or any(registry[b] == wk for b in B)
            probe = wk
        else:
            expect_b = wk == cfg.y_p or any(f_prev(cfg.w[a]) == wk for a in A)
            probe = st.d
        case_ok = st.case == ("B" if expect_b else "A")

        # (IV) growth-bounded increment, by certificate replay
        r = res["IV"]
        if st.case == "B":
            r.add("unchanged", f == f_prev, "Case B stage changed the function")
            r.add("M=0", st.M == 0, f"M = {_fr(st.M)}")
        elif st.h is None or st.cert is None:
            r.add("certificate-present", False, "Case A stage without h or alphaCert")
        else:
            r.add("M-range", 0 <= st.M <= 1, f"M = {_fr(st.M)} not in [0, 1]")
            diff = f - f_prev
            r.add("increment=M*alpha*h", diff == (st.M * st.cert.alpha) * st.h,
                  "f_n - f_{n-1} is not M_n*alpha_n*h_n")
            _check_certificate(r, st, cfg.growth)
            _check_correction_shape(r, st, zeros, probe)

        # (III) derivative floor, directly and through the slope certificate
        r = res["III"]
        _derivative_floor_check(r, f, Fraction(1, 2) + eps, "f'>=1/2+2^-n")
        if st.case == "A" and st.h is not None and st.cert is not None:
            try:
                floor = derivative_floor(st.h)
                r.add("slope-chain", st.M * st.cert.alpha * min(Fraction(0), floor) >= -eps,
                      f"M*alpha*inf h' = {_fr(st.M * st.cert.alpha * floor)} < -2^-n")
                r.add("recorded-floor", st.cert.deriv_floor <= floor,
                      f"recorded derivFloor {_fr(st.cert.deriv_floor)} exceeds certified {_fr(floor)}")
            except UnboundedBelow as exc:
                r.add("slope-chain", False, str(exc))

        # (VII) pinned points keep their values
        r = res["VII"]
        moved = [a for a in A if f(cfg.w[a]) != f_prev(cfg.w[a])]
        r.add("forward-stable", not moved,
              f"f_{n}(w_{moved[0]}) = {_fr(f(cfg.w[moved[0]]))} != {_fr(f_prev(cfg.w[moved[0]]))}" if moved else "")
        broken = [b for b in B if f(registry[b]) != cfg.w[b]]
        r.add("backward-stable", not broken,
              f"f_{n}({_fr(registry[broken[0]])}) != w_{broken[0]}" if broken else "")

        if odd:
            # (V) forward target at w_k
            r = res["V"]
            r.add("case", case_ok, f"recorded Case {st.case}, expected Case {'B' if expect_b else 'A'}")
            r.add("A_n", list(st.A) == A + [k], f"A_n = {list(st.A)}, expected {A + [k]}")
            r.add("B_n", list(st.B) == B, f"B_n = {list(st.B)}, expected {B}")
            r.add("no-registration", not st.registry_delta, "odd stage registered a preimage")
            fk = f(wk)
            if st.case == "A":
                r.add("d=f_n(w_k)", st.d == fk, f"recorded d = {_fr(st.d) if st.d is not None else None}, f_{n}(w_k) = {_fr(fk)}")
            elif wk != cfg.x_p:
                j = st.witness
                ok = j in B and registry.get(j) == wk and fk == cfg.w[j]
                r.add("witness", ok, f"witness {j} does not account for f_{n}(w_k) = {_fr(fk)}")
            if st.forward_value is not None:
                r.add("forwardValue", st.forward_value == fk, f"recorded {_fr(st.forward_value)}, f_{n}(w_k) = {_fr(fk)}")
            A.append(k)
        else:
            r = res["VI"]
            r.add("case", case_ok, f"recorded Case {st.case}, expected Case {'B' if expect_b else 'A'}")
            r.add("A_n", list(st.A) == A, f"A_n = {list(st.A)}, expected {A}")
            r.add("B_n", list(st.B) == B + [k], f"B_n = {list(st.B)}, expected {B + [k]}")
            delta_ok = set(st.registry_delta) == {k}
            if r.add("registration", delta_ok, f"registryDelta keys {sorted(st.registry_delta)} != [{k}]"):
                x = st.registry_delta[k]
                r.add("f_n(preimage)=w_k", f(x) == wk, f"f_{n}({_fr(x)}) = {_fr(f(x))} != {_fr(wk)}")
                if st.case == "A":
                    r.add("d=preimage", st.d == x, f"recorded d = {_fr(st.d) if st.d is not None else None}, registered {_fr(x)}")
                elif wk == cfg.y_p:
                    r.add("preimage=x_P", x == cfg.x_p, f"registered {_fr(x)} for w_k = y_P")
                else:
                    j = st.witness
                    r.add("witness", j in A and cfg.w[j] == x, f"witness {j} does not match registered {_fr(x)}")
                registry[k] = x
            B.append(k)

        # (V)/(VI) class memberships over everything handled so far
        r = res["V"]
        wrong = [a for a in A if cfg.w[a] != cfg.x_p and self.color(f(cfg.w[a])) != self.color(cfg.w[a])]
        r.add("classes", not wrong,
              f"color(f_{n}(w_{wrong[0]})) = {self.color(f(cfg.w[wrong[0]]))} != color(w_{wrong[0]}) = {self.color(cfg.w[wrong[0]])}" if wrong else "")
        r = res["VI"]
        wrong = [b for b in B if b in registry and cfg.w[b] != cfg.y_p and self.color(registry[b]) != self.color(cfg.w[b])]
        r.add("classes", not wrong,
              f"color(f_{n}^-1(w_{wrong[0]})) = {self.color(registry[wrong[0]])} != color(w_{wrong[0]}) = {self.color(cfg.w[wrong[0]])}" if wrong else "")


def check_theorem_conclusions(cfg: ConstructionConfig, fs: list[Poly], registry_by_stage: list[dict]) -> list[InvariantResult]:
    """Conclusions about the limit, for every point whose schedule is complete.

    ``fs[n]`` is f_n and ``registry_by_stage[n]`` the registry after stage n.
    """
    N = len(fs) - 1
    out = []
    color = cfg.partition.color
    for i, wi in enumerate(cfg.w):
        if 2 * i + 2 > N:
            break
        r = InvariantResult(f"w_{i}")
        first = fs[2 * i + 1](wi)
        moved = [n for n in range(2 * i + 1, N + 1) if fs[n](wi) != first]
        r.add("forward-constant", not moved, f"f_{moved[0]}(w_{i}) != f_{2 * i + 1}(w_{i})" if moved else "")
        pre = registry_by_stage[2 * i + 2].get(i)
        if not r.add("registered", pre is not None, f"w_{i} not registered at stage {2 * i + 2}"):
            out.append(r)
            continue
        changed = [n for n in range(2 * i + 2, N + 1)
                   if registry_by_stage[n].get(i) != pre or fs[n](pre) != wi]
        r.add("preimage-constant", not changed, f"preimage of w_{i} differs at stage {changed[0]}" if changed else "")
        if wi != cfg.x_p:
            r.add("image-class", color(first) == color(wi), f"color(f(w_{i})) = {color(first)} != {color(wi)}")
        if wi != cfg.y_p:
            r.add("preimage-class", color(pre) == color(wi), f"color(f^-1(w_{i})) = {color(pre)} != {color(wi)}")
        else:
            r.add("preimage-of-y_P", pre == cfg.x_p, f"f^-1(y_P) = {_fr(pre)} != x_P")
        out.append(r)
    r = InvariantResult("limit")
    r.add("f(x_P)=y_P", fs[-1](cfg.x_p) == cfg.y_p, "final function misses P")
    _derivative_floor_check(r, fs[-1], Fraction(1, 2), "f'>=1/2")
    out.append(r)
    return out


def default_grid(r: Fraction) -> list[GaussianRational]:
    """25 points r*(i + j*i)/4 for i, j in -2..2; all inside |z| <= r."""
    r = Fraction(r)
    return [GaussianRational(r * i / 4, r * j / 4) for i in range(-2, 3) for j in range(-2, 3)]


def check_cauchy_on_disk(fs: list[Poly], r: Fraction, grid: list[GaussianRational], growth: GrowthFn) -> list[Check]:
    """Certify |f_n(z) - f_{n-1}(z)|^2 <= (2^-n * e^r upper)^2 at every grid point."""
    r = Fraction(r)
    out = []
    for z in grid:
        if z.abs2() > r * r:
            raise ValueError(f"grid point {format_gaussian(z)} lies outside |z| <= {_fr(r)}")
    top = growth.upper(r)
    for n in range(1, len(fs)):
        bound = (top / 2**n) ** 2
        for z in grid:
            diff = (fs[n](z) - fs[n - 1](z)).abs2()
            ok = diff <= bound
            out.append(Check(f"n={n} z={format_gaussian(z)}", ok,
                             "" if ok else f"|f_n - f_n-1|^2 = {_fr(diff)} > {_fr(bound)}"))
    return out


def verify_document(doc: dict, radius: Optional[Fraction] = None,
                    grid: Optional[list[GaussianRational]] = None) -> VerificationReport:
    """Verify a records document; parse failures of the structure raise ConfigError."""
    if not isinstance(doc, dict) or "config" not in doc or "stages" not in doc:
        raise ConfigError("not a records document (missing config or stages)")
    cfg = ConstructionConfig.from_json(doc["config"])
    try:
        base, base_nonreal = _parse_poly_gaussian(doc["base"], "base")
        stages = [_parse_stage(s) for s in doc["stages"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed records: {exc}") from None
    for i, st in enumerate(stages):
        if not 0 <= st.k < len(cfg.w):
            raise ConfigError(f"stage {i + 1}: index k={st.k} outside w")
    v = _Verifier(cfg, base, stages)
    base_res, stage_res = v.run()
    base_res.add("f0-real", not base_nonreal, "non-real coefficient in f_0")

    registry_by_stage = [{}]
    reg: dict = {}
    for st in stages:
        reg = {**reg, **st.registry_delta}
        registry_by_stage.append(reg)
    theorem = check_theorem_conclusions(cfg, v.fs, registry_by_stage)
    r = cfg.radius if radius is None else Fraction(radius)
    cauchy = check_cauchy_on_disk(v.fs, r, grid if grid is not None else default_grid(r), cfg.growth)
    return VerificationReport(base_res, stage_res, theorem, cauchy)


def verify_state(state) -> VerificationReport:
    """Verify a freshly built construction through its serialized form."""
    return verify_document(records_document(state))
