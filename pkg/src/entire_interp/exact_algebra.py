"""Exact rational scalars, Gaussian rationals and dense univariate polynomials.

Everything here is immutable.  Rationals are :class:`fractions.Fraction`
(always reduced, zero is ``0/1``); polynomials keep their coefficients in
ascending degree order with no trailing zeros.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
_GAUSSIAN_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-]\s*\d+(?:/\d+)?)\s*\*?\s*i\s*$")


class ParseError(ValueError):
    """Raised when a serialized rational or polynomial is malformed."""


def parse_rational(text: str, where: str = "") -> Fraction:
    """Parse ``"num/den"`` or ``"num"`` into a reduced Fraction."""
    if not isinstance(text, str):
        raise ParseError(f"{where or 'value'}: expected a rational string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ParseError(f"{where or 'value'}: malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"{where or 'value'}: zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def as_rational(x: Union[int, Fraction, str]) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return Fraction(x)


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _lift(other) -> "GaussianRational":
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        return format_gaussian(self)


def parse_gaussian(text: str, where: str = "") -> GaussianRational:
    """Parse a real rational string or the complex form ``"a/b+c/di"``."""
    m = _GAUSSIAN_RE.match(text) if isinstance(text, str) else None
    if m is not None:
        im = m.group(2).replace(" ", "")
        return GaussianRational(parse_rational(m.group(1), where), parse_rational(im, where))
    return GaussianRational(parse_rational(text, where))


def format_gaussian(z: GaussianRational) -> str:
    if z.im == 0:
        return format_rational(z.re)
    sign = "+" if z.im >= 0 else "-"
    return f"{format_rational(z.re)}{sign}{format_rational(abs(z.im))}i"


Scalar = Union[Fraction, GaussianRational]


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def to_json(self) -> list[str]:
        return [format_rational(self.lo), format_rational(self.hi)]


def _strip(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Univariate polynomial with exact coefficients, ascending degree order.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs", "_int_form")

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip(Fraction(c) for c in coeffs)
        self._int_form = None

    # construction helpers
    @classmethod
    def constant(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def linear(cls, slope, intercept) -> "Poly":
        return cls((intercept, slope))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Poly":
        p = cls.constant(lead)
        for r in roots:
            p = poly_mul(p, cls((-Fraction(r), 1)))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip((Fraction(other),))
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"({c}){mono}" if mono else f"{c}")
        return " + ".join(terms)

    def __add__(self, other):
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_sub(self, _coerce(other))

    def __rsub__(self, other):
        return poly_sub(_coerce(other), self)

    def __neg__(self):
        return poly_scale(self, Fraction(-1))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return poly_scale(self, Fraction(other))
        return poly_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = Poly.constant(1)
        base = self
        while e:
            if e & 1:
                result = poly_mul(result, base)
            base = poly_mul(base, base)
            e >>= 1
        return result

    def __call__(self, z):
        return poly_eval(self, z)

    def derivative(self) -> "Poly":
        return poly_derivative(self)

    def integer_form(self) -> tuple[int, ...]:
        """Coefficients scaled by the positive lcm of the denominators."""
        if self._int_form is None:
            den = 1
            for c in self.coeffs:
                den = den * c.denominator // math.gcd(den, c.denominator)
            self._int_form = tuple(int(c * den) for c in self.coeffs)
        return self._int_form

    def sign_at(self, x: Fraction) -> int:
        """Exact sign of ``self(x)`` using integer arithmetic only."""
        ints = self.integer_form()
        if not ints:
            return 0
        x = Fraction(x)
        a, b = x.numerator, x.denominator
        # sum c_i a^i b^(d-i) has the sign of p(x) since b > 0
        d = len(ints) - 1
        acc = ints[d]
        bpow = 1
        for i in range(d - 1, -1, -1):
            bpow *= b
            acc = acc * a + ints[i] * bpow
        return (acc > 0) - (acc < 0)

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str], where: str = "poly") -> "Poly":
        if not isinstance(data, (list, tuple)):
            raise ParseError(f"{where}: expected an array of rational strings")
        return cls(parse_rational(s, f"{where}[{i}]") for i, s in enumerate(data))


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.constant(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a.coeffs), len(b.coeffs))
    return Poly(a.coeff(i) + b.coeff(i) for i in range(n))


def poly_sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a.coeffs), len(b.coeffs))
    return Poly(a.coeff(i) - b.coeff(i) for i in range(n))


def poly_mul(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(b.coeffs):
            out[i + j] += ai * bj
    return Poly(out)


def poly_scale(a: Poly, s) -> Poly:
    s = Fraction(s)
    if s == 0:
        return Poly()
    return Poly(c * s for c in a.coeffs)


def poly_derivative(a: Poly) -> Poly:
    return Poly(i * c for i, c in enumerate(a.coeffs) if i > 0)


def poly_eval(a: Poly, z):
    """Horner evaluation at a Rational or GaussianRational, exact."""
    if isinstance(z, GaussianRational):
        acc = GaussianRational(0, 0)
        for c in reversed(a.coeffs):
            acc = acc * z + c
        return acc
    z = Fraction(z)
    acc = Fraction(0)
    for c in reversed(a.coeffs):
        acc = acc * z + c
    return acc


def poly_divrem(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by the zero polynomial")
    rem = list(a.coeffs)
    db = b.degree
    lead = b.leading
    if len(rem) - 1 < db:
        return Poly(), a
    quot = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] / lead
        quot[k] = c
        if c:
            for j, bj in enumerate(b.coeffs):
                rem[k + j] -= c * bj
    return Poly(quot), Poly(rem[:db])


def poly_monic(a: Poly) -> Poly:
    if a.is_zero():
        return a
    return poly_scale(a, 1 / a.leading)


def _primitive(c: list[int]) -> list[int]:
    g = 0
    for x in c:
        g = math.gcd(g, x)
        if g == 1:
            return c
    return [x // g for x in c] if g > 1 else c


def int_coeffs(p: Poly) -> list[int]:
    """Primitive integer coefficients, a positive multiple of ``p``."""
    return _primitive(list(p.integer_form()))


def int_prem_sign(a: list[int], b: list[int]) -> tuple[list[int], int]:
    """Pseudo-remainder lc(b)^(da-db+1) * rem(a, b) over Z, and sign(lc(b)^(da-db+1))."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(r) - 1 - db
    if delta < 0:
        return r, 1
    for k in range(delta, -1, -1):
        c = r[k + db]
        r = [x * lb for x in r]
        if c:
            for j, bj in enumerate(b):
                r[k + j] -= c * bj
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    sign = -1 if (lb < 0 and (delta + 1) % 2 == 1) else 1
    return r, sign


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd via the primitive pseudo-remainder sequence over Z."""
    if b.is_zero():
        return poly_monic(a)
    if a.is_zero():
        return poly_monic(b)
    x, y = int_coeffs(a), int_coeffs(b)
    if len(x) < len(y):
        x, y = y, x
    while y:
        r, _ = int_prem_sign(x, y)
        x, y = y, (_primitive(r) if r else [])
    return poly_monic(Poly(x))


def poly_exact_quotient(a: Poly, b: Poly) -> Poly:
    q, r = poly_divrem(a, b)
    if not r.is_zero():
        raise ArithmeticError("division is not exact")
    return q


def squarefree_part(p: Poly) -> Poly:
    if p.degree < 1:
        return p
    g = poly_gcd(p, poly_derivative(p))
    if g.degree == 0:
        return p
    return poly_exact_quotient(p, g)


def eval_interval(p: Poly, iv: RatInterval) -> RatInterval:
    """Interval Horner enclosure of ``p`` over ``iv`` (exact endpoints)."""
    lo = hi = Fraction(0)
    a, b = iv.lo, iv.hi
    for c in reversed(p.coeffs):
        prods = (lo * a, lo * b, hi * a, hi * b)
        lo, hi = min(prods) + c, max(prods) + c
    return RatInterval(lo, hi)


def simplest_between(lo: Fraction, hi: Fraction | None) -> Fraction:
    """Fraction with the smallest denominator in the open interval ``(lo, hi)``.

    Requires ``lo >= 0``; ``hi=None`` means +infinity.  When several integers
    fit, the smallest one is returned.  Continued-fraction descent, so the
    cost is linear in the length of the expansions and not in the size of
    the answer.
    """
    lo = Fraction(lo)
    if lo < 0 or (hi is not None and hi <= lo):
        raise ValueError("simplest_between needs 0 <= lo < hi")
    # the answer is (a*z + b) / (c*z + d) for the z of the reduced problem
    a, b, c, d = 1, 0, 0, 1
    x, y = lo, (None if hi is None else Fraction(hi))
    while True:
        fl = x.numerator // x.denominator
        if y is None or fl + 1 < y:
            z = fl + 1
            return Fraction(a * z + b, c * z + d)
        a, b, c, d = a * fl + b, a, c * fl + d, c
        x, y = 1 / (y - fl), (None if x == fl else 1 / (x - fl))
