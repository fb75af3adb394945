"""Certified evaluation of the limit function and exact inverse lookup."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact_algebra import GaussianRational, Poly, format_gaussian, format_rational
from .growth_bounds import GrowthFn
from .stage_builder import ConstructionConfig, StageRecord, base_function


class OutsideDisk(ValueError):
    pass


class NotHandled(LookupError):
    pass


def tail_bound(N: int, r, growth: GrowthFn = GrowthFn()) -> Fraction:
    """2^-N * e^r (upper), which bounds sum_{n>N} 2^-n e^r."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("radius must be >= 0")
    return growth.upper(r) / 2**N


@dataclass(frozen=True)
class CertifiedBox:
    """The limit value lies within sqrt(radius2) of ``center``."""

    center: GaussianRational
    radius2: Fraction
    stages_used: int
    # extra stages needed for the requested accuracy (0 if met or exact)
    stages_short: int = 0

    def contains(self, z: GaussianRational) -> bool:
        return (z - self.center).abs2() <= self.radius2

    def to_json(self, digits: int = 12) -> dict:
        c = self.center
        return {
            "center": format_gaussian(c),
            "radius2": format_rational(self.radius2),
            "stagesUsed": self.stages_used,
            "stagesShort": self.stages_short,
            "approx (not certified)": {
                "center": _approx(c.re, digits) + ("" if c.im == 0 else f" + {_approx(c.im, digits)}i"),
                "radius2": _approx(self.radius2, digits),
            },
        }


def _approx(q: Fraction, digits: int) -> str:
    return f"{float(q):.{digits}g}"


def _as_gaussian(z) -> GaussianRational:
    if isinstance(z, GaussianRational):
        return z
    return GaussianRational(Fraction(z), Fraction(0))


def eval_limit(cfg: ConstructionConfig, stages: list[StageRecord], z, eps=None,
               upto: Optional[int] = None, radius=None) -> CertifiedBox:
    """Box around f(z) = lim f_n(z) from the first ``upto`` stages (default: all).

    Once every entry of w has had both of its stages, the sequence is
    constant from then on and the box is exact (radius 0).
    """
    z = _as_gaussian(z)
    r = cfg.radius if radius is None else Fraction(radius)
    if z.abs2() > r * r:
        raise OutsideDisk(f"|{format_gaussian(z)}| exceeds the certified radius {format_rational(r)}")
    N = len(stages) if upto is None else upto
    if not 0 <= N <= len(stages):
        raise ValueError(f"stage count {N} outside 0..{len(stages)}")
    f: Poly = stages[N - 1].f if N > 0 else base_function(cfg.x_p, cfg.y_p)
    center = f(z)
    if N >= 2 * len(cfg.w):
        return CertifiedBox(center, Fraction(0), N)
    tail = tail_bound(N, r, cfg.growth)
    short = 0
    if eps is not None:
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        # the tail halves per stage
        t = tail
        while t > eps and N + short < 2 * len(cfg.w):
            t /= 2
            short += 1
    return CertifiedBox(center, tail * tail, N, short)


def inverse_lookup(cfg: ConstructionConfig, stages: list[StageRecord], w, upto: Optional[int] = None) -> Fraction:
    """Exact f^{-1}(w) for y_P and for every entry registered by an even stage."""
    w = Fraction(w)
    if w == cfg.y_p:
        return cfg.x_p
    N = len(stages) if upto is None else upto
    for rec in stages[:N]:
        for j, x in rec.registry_delta.items():
            if cfg.w[j] == w:
                return x
    raise NotHandled(f"{format_rational(w)} has no registered preimage within {N} stages")
