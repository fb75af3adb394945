"""Reference computations that share no code paths with the engine."""

from __future__ import annotations

from fractions import Fraction


def horner(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_scan(coeffs, lo: Fraction, hi: Fraction, step: Fraction):
    """Root cells found by scanning a grid: exact zeros as (x, x), sign changes as (a, b)."""
    cells = []
    x = lo
    prev_x, prev_s = None, 0
    while x <= hi:
        s = sign(horner(coeffs, x))
        if s == 0:
            cells.append((x, x))
        elif prev_s and s != prev_s:
            cells.append((prev_x, x))
        if s != 0:
            prev_x, prev_s = x, s
        x += step
    return cells


def plain_bisection(coeffs, y: Fraction, lo: Fraction, hi: Fraction, width: Fraction):
    """Bisection of p(x) = y for increasing p on [lo, hi] with p(lo) < y < p(hi)."""
    assert horner(coeffs, lo) < y < horner(coeffs, hi)
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = horner(coeffs, mid)
        if v == y:
            return mid, mid
        if v < y:
            lo = mid
        else:
            hi = mid
    return lo, hi


def brute_pick(i: int, lo: Fraction, hi: Fraction) -> Fraction:
    """First a/(o*2^i) in (lo, hi) with that exact reduced denominator, o odd,
    ordered by (o, |a|, positive first)."""
    o = 1
    while True:
        den = o * 2**i
        best = None
        for a in range(int(lo * den) - 1, int(hi * den) + 2):
            x = Fraction(a, den)
            if lo < x < hi and x.denominator == den:
                key = (abs(a), a < 0)
                if best is None or key < best[0]:
                    best = (key, x)
        if best:
            return best[1]
        o += 2
