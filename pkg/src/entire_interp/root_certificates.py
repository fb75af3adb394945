"""Certified real-root isolation and global bounds for rational polynomials.

All answers are exact: Sturm sign-variation counts separate the roots,
sign bisection refines them, and interval evaluation produces lower bounds
that are valid for every real argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Optional

from .exact_algebra import (
    Poly,
    RatInterval,
    eval_interval,
    format_rational,
    int_coeffs,
    int_prem_sign,
    _primitive,
    poly_derivative,
    poly_eval,
    simplest_between,
    poly_exact_quotient,
)

DEFAULT_MIN_SLACK = Fraction(1, 2**20)
# terminates refinement when the true minimum is (numerically) zero
ABS_SLACK_FLOOR = Fraction(1, 2**256)


class UnboundedBelow(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class RootEnclosure:
    """One real root inside ``interval``.

    A degenerate interval (``lo == hi``) is an exactly known rational root;
    otherwise the root lies strictly inside and the endpoint signs differ.
    """

    interval: RatInterval
    multiplicity_free: bool = True

    @property
    def exact(self) -> bool:
        return self.interval.is_point()

    @property
    def lo(self) -> Fraction:
        return self.interval.lo

    @property
    def hi(self) -> Fraction:
        return self.interval.hi

    def to_json(self) -> list[str]:
        return self.interval.to_json()


def sturm_chain(p: Poly) -> list[Poly]:
    """Sturm sequence ``p, p', -rem(p, p'), ...`` up to the last nonzero entry.

    Entries are kept as primitive integer polynomials; each is a positive
    multiple of the textbook entry, so sign variations are unchanged.
    """
    if p.is_zero():
        raise ValueError("Sturm chain of the zero polynomial")
    first = int_coeffs(p)
    if first[-1] < 0 and p.leading > 0 or first[-1] > 0 and p.leading < 0:
        first = [-x for x in first]
    chain = [first]
    if p.degree > 0:
        chain.append(int_coeffs(poly_derivative(p)))
        if (chain[-1][-1] > 0) != (p.degree * p.leading > 0):
            chain[-1] = [-x for x in chain[-1]]
        while True:
            r, sign = int_prem_sign(chain[-2], chain[-1])
            if not r:
                break
            # prem = sign * |scale| * rem; the chain wants -rem
            r = _primitive(r)
            chain.append([-x for x in r] if sign > 0 else r)
    return [Poly(c) for c in chain]


@lru_cache(maxsize=128)
def squarefree_with_chain(p: Poly) -> tuple[Poly, tuple[Poly, ...]]:
    """Squarefree part of ``p`` and its Sturm chain.

    The last entry of the Sturm chain of ``p`` is gcd(p, p'), so the common
    squarefree case costs a single remainder sequence.
    """
    chain = sturm_chain(p)
    g = chain[-1]
    if g.degree <= 0:
        return p, tuple(chain)
    q = poly_exact_quotient(p, g)
    return q, tuple(sturm_chain(q))


def _variations(signs) -> int:
    v = 0
    last = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            v += 1
        last = s
    return v


def _variations_at(chain: list[Poly], x: Optional[Fraction], side: int = 1) -> int:
    """Sign variations at ``x``; ``x=None`` means ``side * infinity``."""
    if x is None:
        signs = []
        for q in chain:
            s = 1 if q.leading > 0 else -1
            if side < 0 and q.degree % 2 == 1:
                s = -s
            signs.append(s)
        return _variations(signs)
    return _variations(q.sign_at(x) for q in chain)


def sturm_count(p: Poly, iv: RatInterval, chain: Optional[list[Poly]] = None) -> int:
    """Number of distinct real roots of ``p`` in the half-open ``(lo, hi]``."""
    if p.is_zero():
        raise ValueError("root count of the zero polynomial")
    if chain is None:
        chain = squarefree_with_chain(p)[1]
    return _variations_at(chain, iv.lo) - _variations_at(chain, iv.hi)


def _ceil_log2(q: Fraction) -> int:
    """Smallest integer e with q <= 2**e (q > 0)."""
    n, d = q.numerator, q.denominator
    e = n.bit_length() - d.bit_length()
    # now 2**(e-1) < q < 2**(e+1); settle it exactly
    while Fraction(2) ** e < q:
        e += 1
    while Fraction(2) ** (e - 1) >= q:
        e -= 1
    return e


def cauchy_bound(p: Poly) -> Fraction:
    """Root bound ``1 + max|a_i|/|a_n|``; every real root lies in (-B, B)."""
    lead = abs(p.leading)
    return 1 + max((abs(c) for c in p.coeffs[:-1]), default=Fraction(0)) / lead


def root_bound(p: Poly) -> Fraction:
    """Power of two strictly above every |root|.

    The smaller of the Cauchy bound and Fujiwara's bound
    ``2 max |a_{n-k}/a_n|^{1/k}`` (last term halved), rounded up to 2**e.
    """
    n = p.degree
    lead = abs(p.leading)
    cb = cauchy_bound(p)
    e_cauchy = _ceil_log2(cb)
    e_fuji = None
    for k in range(1, n + 1):
        c = abs(p.coeffs[n - k])
        if c == 0:
            continue
        ratio = c / lead
        if k == n:
            ratio /= 2
        # ratio**(1/k) <= 2**ceil(ceil_log2(ratio)/k)
        e = -((-_ceil_log2(ratio)) // k)
        e_fuji = e if e_fuji is None else max(e_fuji, e)
    e_fuji = 0 if e_fuji is None else e_fuji + 1
    e = min(e_cauchy, e_fuji) + 1
    return Fraction(2) ** max(e, 0)


def _simplest_in_open(lo: Fraction, hi: Fraction) -> Fraction:
    if lo >= 0:
        return simplest_between(lo, hi)
    if hi <= 0:
        return -simplest_between(-hi, -lo)
    return Fraction(0)


def _exact_or(q: Poly, lo: Fraction, hi: Fraction) -> RootEnclosure:
    """Return an exact enclosure if the simplest rational in (lo, hi) is a root."""
    if lo < hi:
        s = _simplest_in_open(lo, hi)
        if q.sign_at(s) == 0:
            return RootEnclosure(RatInterval(s, s))
    return RootEnclosure(RatInterval(lo, hi))


def _bisect(q: Poly, lo: Fraction, hi: Fraction, eps: Fraction,
            avoid: frozenset = frozenset()) -> tuple[Fraction, Fraction, bool]:
    """Shrink (lo, hi), holding one simple root of q with q(hi) != 0, to width <= eps.

    Also keeps going while an endpoint is a root of q (a neighbouring root
    sitting on ``lo``) or lies in ``avoid``.
    """
    s_hi = q.sign_at(hi)
    while hi - lo > eps or lo in avoid or hi in avoid or q.sign_at(lo) == 0:
        mid = (lo + hi) / 2
        s = q.sign_at(mid)
        if s == 0:
            return mid, mid, True
        if s == s_hi:
            hi = mid
        else:
            lo = mid
    return lo, hi, False


def isolate_real_roots(p: Poly, eps: Fraction) -> list[RootEnclosure]:
    """Disjoint enclosures of width <= eps around every distinct real root."""
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if p.degree < 1:
        return []
    q, chain = squarefree_with_chain(p)
    if q.degree == 1:
        r = -q.coeffs[0] / q.coeffs[1]
        return [RootEnclosure(RatInterval(r, r))]
    B = root_bound(q)
    cuts: set = set()
    found: list[tuple[Fraction, Fraction]] = []
    stack = [(-B, B, _variations_at(chain, -B), _variations_at(chain, B))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            found.append((a, b))
            continue
        mid = (a + b) / 2
        cuts.add(mid)
        vm = _variations_at(chain, mid)
        stack.append((mid, b, vm, vb))
        stack.append((a, mid, va, vm))
    out: list[RootEnclosure] = []
    avoid = frozenset(cuts)
    for a, b in found:
        if q.sign_at(b) == 0:
            out.append(RootEnclosure(RatInterval(b, b)))
            continue
        # shared cut points are not roots (those land in the left piece as b),
        # so moving off them keeps closed enclosures pairwise disjoint
        lo, hi, hit = _bisect(q, a, b, eps, avoid)
        out.append(RootEnclosure(RatInterval(lo, hi)) if hit else _exact_or(q, lo, hi))
    out.sort(key=lambda e: e.lo)
    return out


@dataclass(frozen=True)
class MinCertificate:
    """``lower <= min p <= upper``; ``at`` is a point where p(at) = upper."""

    lower: Fraction
    upper: Fraction
    at: Fraction


def _enclosure_lower(p: Poly, dp: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    iv = RatInterval(lo, hi)
    horner = eval_interval(p, iv).lo
    m = iv.mid
    d = eval_interval(dp, iv)
    slope = max(abs(d.lo), abs(d.hi))
    mean_value = poly_eval(p, m) - slope * (iv.width / 2)
    return max(horner, mean_value)


def certified_minimum(p: Poly, slack: Fraction = DEFAULT_MIN_SLACK) -> MinCertificate:
    """Certified bracket of inf_{x in R} p(x).

    The critical points (roots of p') are isolated and refined until the
    bracket is within ``slack`` relative to the value (or the absolute floor).
    """
    if p.degree <= 0:
        c = p.coeff(0)
        return MinCertificate(c, c, Fraction(0))
    if p.degree % 2 == 1 or p.leading < 0:
        raise UnboundedBelow(f"polynomial of degree {p.degree} with leading {p.leading} is unbounded below")
    dp = poly_derivative(p)
    crit = isolate_real_roots(dp, Fraction(1, 16))
    dq = squarefree_with_chain(dp)[0]
    best: Optional[MinCertificate] = None
    for enc in crit:
        lo, hi = enc.lo, enc.hi
        while True:
            if lo == hi:
                v = poly_eval(p, lo)
                lower, upper, at = v, v, lo
                break
            at = (lo + hi) / 2
            upper = poly_eval(p, at)
            lower = _enclosure_lower(p, dp, lo, hi)
            tol = max(slack * abs(upper), ABS_SLACK_FLOOR)
            if upper - lower <= tol:
                break
            lo, hi, _ = _bisect(dq, lo, hi, (hi - lo) / 4)
        if best is None or lower < best.lower:
            best = MinCertificate(lower, min(upper, best.upper) if best else upper, at)
        elif upper < best.upper:
            best = MinCertificate(best.lower, upper, at)
    assert best is not None  # even degree >= 2 has a critical point
    return best


def global_min_lower_bound(p: Poly, slack: Fraction = DEFAULT_MIN_SLACK) -> Fraction:
    """Rational L with L <= p(x) for every real x, within ``slack`` of the infimum."""
    return certified_minimum(p, slack).lower


def monotone_solve(p: Poly, y: Fraction, eps: Fraction, check_derivative: bool = True) -> RootEnclosure:
    """Enclose the unique real solution of p(x) = y for p with p' > 0 on R."""
    y = Fraction(y)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    dp = poly_derivative(p)
    if check_derivative:
        if dp.degree % 2 == 1 or dp.is_zero() or global_min_lower_bound(dp) <= 0:
            raise PreconditionError("derivative is not certifiably positive on R")
    q = p - y
    if q.degree == 1:
        r = -q.coeffs[0] / q.coeffs[1]
        return RootEnclosure(RatInterval(r, r))
    B = root_bound(q)
    return refine_enclosure(q, RootEnclosure(RatInterval(-B, B)), eps)


def refine_enclosure(q: Poly, enc: RootEnclosure, eps: Fraction) -> RootEnclosure:
    """Continue bisecting an enclosure of the single sign change of increasing q."""
    if enc.exact or enc.interval.width <= eps:
        return enc
    lo, hi = enc.lo, enc.hi
    if q.sign_at(hi) == 0:
        return RootEnclosure(RatInterval(hi, hi))
    if q.sign_at(lo) == 0:
        return RootEnclosure(RatInterval(lo, lo))
    lo, hi, hit = _bisect(q, lo, hi, eps)
    return RootEnclosure(RatInterval(lo, hi)) if hit else _exact_or(q, lo, hi)


def enclosure_summary(enc: RootEnclosure) -> dict:
    return {"lo": format_rational(enc.lo), "hi": format_rational(enc.hi), "exact": enc.exact}
