"""A computable partition of the rationals into countably many dense classes.

Class ``i`` holds the rationals whose reduced denominator is ``2**i`` times
an odd number.  Every class meets every open interval, so ``pick`` always
succeeds.

``pick`` returns the class member of an interval that comes first under the
order (odd part of the denominator, |numerator|, positive before negative).
Scaling by ``2**i`` turns class ``i`` into fractions ``a/o`` with ``o`` odd
(and ``a`` odd when ``i > 0``), which is a question about the parity class
``(a mod 2, o mod 2)`` in the Stern-Brocot tree.  Two Farey neighbours always
have different parity classes and a mediant has the third one, which is what
lets the search jump straight to the right node instead of enumerating
denominators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Protocol

from .exact_algebra import RatInterval, simplest_between


def color(q: Fraction) -> int:
    """2-adic valuation of the reduced denominator of ``q``."""
    d = Fraction(q).denominator
    return (d & -d).bit_length() - 1


def _parity(x: Fraction) -> tuple[int, int]:
    return x.numerator & 1, x.denominator & 1


def _mediant(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a.numerator + b.numerator, a.denominator + b.denominator)


def _neighbours(s: Fraction) -> tuple[Fraction, Fraction]:
    """Stern-Brocot parents (left, right) of ``s`` in (0, 1)."""
    p, q = s.numerator, s.denominator
    q_left = pow(p, -1, q)
    p_left = (p * q_left - 1) // q
    return Fraction(p_left, q_left), Fraction(p - p_left, q - q_left)


def _key(x: Fraction) -> tuple[int, Fraction]:
    return x.denominator, x


def _class_child(cur: Fraction, bound: Fraction, target: tuple[int, int]) -> Fraction:
    """First node of class ``target`` strictly between ``cur`` and its parent ``bound``.

    The nodes there are ``a*cur (+) b*bound`` with coprime a, b >= 1; the
    mediant (1, 1) has the third class and (2, 1) has the class of ``bound``.
    """
    m1 = _mediant(cur, bound)
    return m1 if _parity(m1) == target else _mediant(m1, cur)


def _best_in_unit(lo: Fraction, hi: Fraction, target: tuple[int, int]) -> Fraction:
    """Smallest-denominator (then smallest) fraction of parity ``target`` in (lo, hi).

    Requires 0 <= lo < hi <= 1 and a target with odd denominator.
    """
    s = simplest_between(lo, hi)
    if _parity(s) == target:
        return s
    best: Optional[Fraction] = None
    for side in (0, 1):
        cur = s
        while True:
            if best is not None and cur.denominator > best.denominator:
                break
            bound = _neighbours(cur)[side]
            m1 = _mediant(cur, bound)
            inside = m1 > lo if side == 0 else m1 < hi
            if inside:
                cand = _class_child(cur, bound, target)
                if best is None or _key(cand) < _key(best):
                    best = cand
                break
            nxt = simplest_between(lo, cur) if side == 0 else simplest_between(cur, hi)
            if _parity(nxt) == target:
                cand = nxt
            else:
                # between nxt and cur nothing else constrains the search
                cand = _class_child(nxt, cur, target)
            if best is None or _key(cand) < _key(best):
                best = cand
            cur = nxt
    assert best is not None
    return best


def _pick_key(y: Fraction) -> tuple[int, int, bool]:
    return y.denominator, abs(y.numerator), y.numerator < 0


def _allowed_integer(lo: Fraction, hi: Fraction, odd_only: bool) -> Optional[int]:
    """Allowed integer of least |a| (positive first) in the open (lo, hi)."""
    cands = []
    # smallest allowed a >= 0 with a > lo, and largest allowed a <= 0 with a < hi
    a = max(0, lo.numerator // lo.denominator + 1)
    if odd_only and a % 2 == 0:
        a += 1
    if a < hi:
        cands.append(a)
    b = min(0, -((-hi.numerator) // hi.denominator) - 1)
    if odd_only and b % 2 == 0:
        b -= 1
    if b > lo:
        cands.append(b)
    if not cands:
        return None
    return min(cands, key=lambda v: (abs(v), v < 0))


def pick(i: int, lo, hi) -> Fraction:
    """First member of class ``i`` inside the open interval (lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if i < 0:
        raise ValueError("color index must be >= 0")
    scale = 2**i
    jl, jh = lo * scale, hi * scale
    odd_only = i > 0
    a = _allowed_integer(jl, jh, odd_only)
    if a is not None:
        return Fraction(a, scale)
    numerator_parities = (1,) if odd_only else (0, 1)
    best: Optional[Fraction] = None
    first = jl.numerator // jl.denominator
    last = -((-jh.numerator) // jh.denominator) - 1
    for n in range(first, last + 1):
        if n >= 0:
            g_lo, g_hi, shift, sign = max(jl, n) - n, min(jh, n + 1) - n, n, 1
        else:
            m = -n - 1
            g_lo, g_hi, shift, sign = max(-jh, m) - m, min(-jl, m + 1) - m, m, -1
        if not g_lo < g_hi:
            continue
        for par in numerator_parities:
            y = sign * (shift + _best_in_unit(g_lo, g_hi, ((par - shift) % 2, 1)))
            if best is None or _pick_key(y) < _pick_key(best):
                best = y
    assert best is not None, "every class is dense"
    return best / scale


class DensePartition(Protocol):
    name: str

    def color(self, q: Fraction) -> int: ...

    def pick(self, i: int, interval: RatInterval) -> Fraction: ...


class DyadicValuationPartition:
    """Default partition: class of q = 2-adic valuation of its denominator."""

    name = "dyadic-valuation"

    def color(self, q: Fraction) -> int:
        return color(q)

    def pick(self, i: int, interval: RatInterval) -> Fraction:
        return pick(i, interval.lo, interval.hi)

    def to_json(self) -> dict:
        return {"name": self.name}

    def __eq__(self, other):
        return isinstance(other, DyadicValuationPartition)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return "DyadicValuationPartition()"


PARTITIONS = {DyadicValuationPartition.name: DyadicValuationPartition}


def partition_by_name(name: str) -> DensePartition:
    try:
        return PARTITIONS[name]()
    except KeyError:
        raise ValueError(f"unknown partition {name!r}; known: {sorted(PARTITIONS)}") from None
