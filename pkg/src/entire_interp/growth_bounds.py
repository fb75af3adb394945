"""Growth majorant e^t with two-sided rational Taylor bounds, and the
certified choice of the damping factor alpha for a correction polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exact_algebra import Poly, format_rational, parse_rational, poly_derivative
from .root_certificates import (
    UnboundedBelow,
    _ceil_log2,
    global_min_lower_bound,
    isolate_real_roots,
    refine_enclosure,
    squarefree_with_chain,
)

MAX_TAYLOR_TERMS = 64
RATIO_SLACK = Fraction(1, 2**20)
ENVELOPE_BITS = 64


class TaylorDepthError(ValueError):
    pass


def exp_lower(t, K: int) -> Fraction:
    """sum_{k<=K} t^k/k!, a lower bound of e^t for t >= 0."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("exp_lower needs t >= 0")
    term = Fraction(1)
    total = Fraction(1)
    for k in range(1, K + 1):
        term = term * t / k
        total += term
    return total


def exp_upper(t, K: int) -> Fraction:
    """Partial sum plus the geometric tail bound t^(K+1)/(K+1)! / (1 - t/(K+2)).

    Valid (and >= e^t) for 0 <= t < K + 2.
    """
    t = Fraction(t)
    if t < 0:
        raise ValueError("exp_upper needs t >= 0")
    if t >= K + 2:
        raise TaylorDepthError(f"t={t} too large for K={K}; need t < K+2")
    first_omitted = t ** (K + 1) / factorial(K + 1)
    return exp_lower(t, K) + first_omitted / (1 - t / (K + 2))


def taylor_poly(K: int) -> Poly:
    return Poly(Fraction(1, factorial(k)) for k in range(K + 1))


@dataclass(frozen=True)
class GrowthFn:
    """The majorant p(t) = e^t.

    e^t is positive, continuous and e^t / t^n -> infinity for every n, which
    is all the construction asks of a growth function.  ``taylor_terms`` is
    the minimum certification depth K.
    """

    kind: str = "exp"
    taylor_terms: int = 8

    def __post_init__(self):
        if self.kind != "exp":
            raise ValueError(f"unsupported growth kind {self.kind!r}")
        if self.taylor_terms < 1:
            raise ValueError("taylor_terms must be positive")

    def lower(self, t, K: int | None = None) -> Fraction:
        return exp_lower(t, K or self.taylor_terms)

    def upper(self, t, K: int | None = None) -> Fraction:
        t = Fraction(t)
        K = K or self.taylor_terms
        # raise depth until the tail bound is valid
        while t >= K + 2:
            K *= 2
        return exp_upper(t, K)

    def to_json(self) -> dict:
        return {"kind": self.kind, "taylorTerms": self.taylor_terms}

    @classmethod
    def from_json(cls, data: dict) -> "GrowthFn":
        return cls(kind=data.get("kind", "exp"), taylor_terms=int(data.get("taylorTerms", 8)))


def polynomial_envelope(h: Poly) -> tuple[int, Fraction]:
    """(m, c) with |h(z)| <= |z|^m + c on all of C.

    With S = max(1, sum |a_i|) and d = deg h: for |z| >= S the sum
    sum |a_i||z|^i is at most S|z|^d <= |z|^(d+1), and for |z| < S it is
    at most S^(d+1).
    """
    if h.is_zero():
        raise ValueError("envelope of the zero polynomial")
    d = h.degree
    S = max(Fraction(1), sum((abs(a) for a in h.coeffs), Fraction(0)))
    return d + 1, S ** (d + 1)


def round_up_bits(c: Fraction, bits: int = ENVELOPE_BITS) -> Fraction:
    """Smallest rational >= c of the form k * 2^e with k < 2^bits (c > 0)."""
    e = _ceil_log2(c) - bits
    scale = Fraction(2) ** e
    k = -((-c / scale).numerator // (c / scale).denominator)
    return k * scale


def min_ratio_lower_bound(m: int, c: Fraction, K: int) -> Fraction:
    """Certified lower bound of inf_{t >= 0} T_K(t) / (t^m + c), T_K the Taylor sum.

    R(0) = 1/c is exact; every other candidate minimum is a positive root of
    the numerator of R', which is isolated and refined until
    T_K(lo) / (hi^m + c) is within RATIO_SLACK of R at the midpoint.
    Requires K > m so that R -> infinity.  The ratio is decreasing in c, so
    c is first rounded up to a short dyadic, which keeps the remainder
    sequence small without giving up validity.
    """
    if K <= m:
        raise TaylorDepthError(f"need K > m for the ratio to diverge (K={K}, m={m})")
    c = round_up_bits(Fraction(c))
    T = taylor_poly(K)
    dT = taylor_poly(K - 1)
    denom = Poly([c] + [0] * (m - 1) + [1])
    numer = dT * denom - T * Poly([0] * (m - 1) + [m])
    best = 1 / c
    if numer.degree < 1:
        return best
    q = squarefree_with_chain(numer)[0]
    for enc in isolate_real_roots(numer, Fraction(1, 4)):
        if enc.hi <= 0:
            continue
        while True:
            lo, hi = max(enc.lo, Fraction(0)), enc.hi
            bound = T(lo) / (hi**m + c)
            if enc.exact:
                break
            mid = (lo + hi) / 2
            at_mid = T(mid) / (mid**m + c)
            if at_mid - bound <= RATIO_SLACK * at_mid:
                break
            enc = refine_enclosure(q, enc, enc.interval.width / 4)
        best = min(best, bound)
    return best


@dataclass(frozen=True)
class AlphaCertificate:
    stage: int
    m: int
    c: Fraction
    taylor_terms: int
    deriv_floor: Fraction
    alpha: Fraction
    min_ratio_lower_bound: Fraction

    def bound_ii(self) -> Fraction:
        return Fraction(1, 2**self.stage) * self.min_ratio_lower_bound

    def satisfies(self) -> dict:
        """The three certificate inequalities, evaluated exactly."""
        eps_n = Fraction(1, 2**self.stage)
        return {
            "alpha_positive": self.alpha > 0,
            "alpha_le_2^-n": self.alpha <= eps_n,
            "growth_ii": self.alpha <= eps_n * self.min_ratio_lower_bound,
            "derivative_iii": self.alpha * min(Fraction(0), self.deriv_floor) >= -eps_n,
        }

    def to_json(self) -> dict:
        return {
            "n": self.stage,
            "m": self.m,
            "c": format_rational(self.c),
            "taylorTerms": self.taylor_terms,
            "derivFloor": format_rational(self.deriv_floor),
            "alpha": format_rational(self.alpha),
            "minRatioLowerBound": format_rational(self.min_ratio_lower_bound),
        }

    @classmethod
    def from_json(cls, d: dict, where: str = "alphaCert") -> "AlphaCertificate":
        return cls(
            stage=int(d["n"]),
            m=int(d["m"]),
            c=parse_rational(d["c"], f"{where}.c"),
            taylor_terms=int(d["taylorTerms"]),
            deriv_floor=parse_rational(d["derivFloor"], f"{where}.derivFloor"),
            alpha=parse_rational(d["alpha"], f"{where}.alpha"),
            min_ratio_lower_bound=parse_rational(d["minRatioLowerBound"], f"{where}.minRatioLowerBound"),
        )


def derivative_floor(h: Poly) -> Fraction:
    """Certified lower bound of h' on R (h of odd degree, positive leading)."""
    dh = poly_derivative(h)
    if dh.degree <= 0:
        return dh.coeff(0)
    try:
        return global_min_lower_bound(dh)
    except UnboundedBelow as exc:
        raise UnboundedBelow(f"infimum of h' is not bounded below: {exc}") from None


def largest_power_of_two_at_most(bound: Fraction) -> Fraction:
    if bound <= 0:
        raise ValueError("bound must be positive")
    j = _ceil_log2(1 / bound)
    return Fraction(1, 2**j) if j >= 0 else Fraction(2 ** (-j))


def select_alpha(h: Poly, n: int, growth: GrowthFn = GrowthFn()) -> AlphaCertificate:
    """Largest alpha = 2^-j meeting alpha <= 2^-n, the growth bound and the slope bound."""
    if n < 1:
        raise ValueError("stage index must be >= 1")
    m, c = polynomial_envelope(h)
    floor = derivative_floor(h)
    K = max(growth.taylor_terms, m + 2)
    while True:
        ratio = min_ratio_lower_bound(m, c, K)
        if ratio > 0:
            break
        K *= 2
        if K > MAX_TAYLOR_TERMS:
            raise TaylorDepthError("Taylor depth exhausted while certifying the growth ratio")
    eps_n = Fraction(1, 2**n)
    bound = min(eps_n, eps_n * ratio)
    if floor < 0:
        bound = min(bound, eps_n / -floor)
    alpha = largest_power_of_two_at_most(bound)
    return AlphaCertificate(n, m, c, K, floor, alpha, ratio)
