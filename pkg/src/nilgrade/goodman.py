"""Guivarch norms, dilations, and the empirical difference-law exponent check.

All law differences are computed exactly; floating point enters only
through the norms and the fitted slope.  Sampling uses a fixed 64-bit
linear congruential generator so reports are bit-reproducible from the
seed alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import bch, carnot, lie
from .carnot import CarnotAlgebra
from .derivability import GradingOperator, e_of_operator
from .lie import LieAlgebra
from .linalg import Vec, q

_LCG_A = 6364136223846793005
_LCG_C = 1442695040888963407
_LCG_MASK = (1 << 64) - 1
_GRID = 33  # coordinates k/16 with k in -16..16


class GridSampler:
    """Seeded LCG drawing grid coordinates k/16, one state step per draw."""

    def __init__(self, seed: int):
        self.state = seed & _LCG_MASK

    def draw(self) -> Fraction:
        self.state = (_LCG_A * self.state + _LCG_C) & _LCG_MASK
        k = ((self.state >> 32) % _GRID) - 16
        return Fraction(k, 16)

    def vector(self, dim: int) -> Vec:
        return [self.draw() for _ in range(dim)]


@dataclass(frozen=True)
class GuivarchContext:
    """Layer degree of each eigenbasis coordinate; the layer norm is the
    maximum absolute value of the coordinates in that layer."""

    degrees: tuple[int, ...]

    @staticmethod
    def for_carnot(ca: CarnotAlgebra) -> "GuivarchContext":
        return GuivarchContext(tuple(ca.degrees))


def _root_float(value: Fraction, i: int) -> float:
    """|value|**(1/i) as float, robust to very large numerators."""
    if value == 0:
        return 0.0
    num, den = abs(value.numerator), value.denominator
    log2 = (num.bit_length() - 1) + math.log2(num / (1 << (num.bit_length() - 1)))
    log2 -= (den.bit_length() - 1) + math.log2(den / (1 << (den.bit_length() - 1)))
    return 2.0 ** (log2 / i)


def guivarch_norm(ctx: GuivarchContext, x: Sequence[Fraction]) -> float:
    """max over layers i of (max |coordinate| in layer i)^(1/i)."""
    if len(x) != len(ctx.degrees):
        raise ValueError("dimension mismatch")
    best = 0.0
    for deg, coord in zip(ctx.degrees, x):
        if coord:
            best = max(best, _root_float(q(coord), deg))
    return best


def dilate(ctx: GuivarchContext, t: Fraction, x: Sequence[Fraction]) -> Vec:
    """Multiply the layer-i component by t^i, exactly."""
    t = q(t)
    if t <= 0:
        raise ValueError("dilation parameter must be positive")
    if len(x) != len(ctx.degrees):
        raise ValueError("dimension mismatch")
    return [q(coord) * t**deg for deg, coord in zip(ctx.degrees, x)]


def fit_exponent(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log v against log r; needs >= 2 points, r > 1."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    if any(r <= 1 for r, _ in points):
        raise ValueError("all r must exceed 1")
    if any(v <= 0 for _, v in points):
        raise ValueError("all values must be positive")
    xs = [math.log(r) for r, _ in points]
    ys = [math.log(v) for _, v in points]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("need at least two distinct r values")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


@dataclass(frozen=True)
class GoodmanSample:
    pair_index: int
    t: Fraction
    r: float
    diff_norm: float


@dataclass(frozen=True)
class GoodmanReport:
    e_d: Fraction
    samples: tuple[GoodmanSample, ...]
    fitted_slope: float
    constant_estimate: float
    seed: int
    identically_zero: bool

    def to_json_dict(self) -> dict:
        return {
            "e_D": str(self.e_d),
            "seed": str(self.seed),
            "identically_zero": self.identically_zero,
            "fitted_slope": f"{self.fitted_slope:.12g}",
            "constant_estimate": f"{self.constant_estimate:.12g}",
            "samples": [
                {
                    "pair": str(s.pair_index),
                    "t": str(s.t),
                    "r": f"{s.r:.12g}",
                    "diff_norm": f"{s.diff_norm:.12g}",
                }
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def goodman_check(
    g: LieAlgebra,
    d: GradingOperator,
    n_samples: int,
    t_ladder: Sequence[Fraction],
    seed: int,
) -> GoodmanReport:
    """Sample the inequality between the two laws attached to (g, D).

    Base pairs are drawn on the grid in [-1, 1], dilated through the
    ladder; the law difference is exact and the report carries the
    fitted exponent plus the best constant for
    diff <= C * max(1, r)^(e_D).
    """
    g_eig, ca = carnot.carnot_pair(g, d)
    ctx = GuivarchContext.for_carnot(ca)
    e_d = e_of_operator(g, d)
    e_float = float(e_d)
    sampler = GridSampler(seed)
    pairs = [
        (sampler.vector(g.dim), sampler.vector(g.dim)) for _ in range(n_samples)
    ]
    f_eig = lie.lower_central_series(g_eig)
    f_ca = lie.lower_central_series(ca.algebra)
    samples: list[GoodmanSample] = []
    constant = 0.0
    fit_points: list[tuple[float, float]] = []
    all_zero = True
    for index, (z1, z2) in enumerate(pairs):
        for t in t_ladder:
            z1t = dilate(ctx, t, z1)
            z2t = dilate(ctx, t, z2)
            a = bch.bch_product(g_eig, f_eig, z1t, z2t)
            b = bch.bch_product(ca.algebra, f_ca, z1t, z2t)
            diff = [s - u for s, u in zip(a, b)]
            r = max(guivarch_norm(ctx, z1t), guivarch_norm(ctx, z2t))
            dn = guivarch_norm(ctx, diff)
            samples.append(GoodmanSample(index, q(t), r, dn))
            if dn > 0:
                all_zero = False
                constant = max(constant, dn / max(1.0, r) ** e_float)
                if r > 1:
                    fit_points.append((r, dn))
    estimable = len(fit_points) >= 2 and len({r for r, _ in fit_points}) >= 2
    slope = fit_exponent(fit_points) if estimable else 0.0
    return GoodmanReport(
        e_d=e_d,
        samples=tuple(samples),
        fitted_slope=slope,
        constant_estimate=constant,
        seed=seed,
        identically_zero=all_zero,
    )


def segment_constants(report: GoodmanReport) -> list[float]:
    """Best constant per ladder position, ordered as the ladder was run."""
    by_t: dict[Fraction, float] = {}
    order: list[Fraction] = []
    e_float = float(report.e_d)
    for s in report.samples:
        if s.t not in by_t:
            by_t[s.t] = 0.0
            order.append(s.t)
        if s.diff_norm > 0:
            by_t[s.t] = max(by_t[s.t], s.diff_norm / max(1.0, s.r) ** e_float)
    return [by_t[t] for t in order]


def layer_component(ctx: GuivarchContext, x: Sequence[Fraction], layer: int) -> Vec:
    """The layer-`layer` component of x in eigenbasis coordinates."""
    return [q(c) if deg == layer else Fraction(0) for deg, c in zip(ctx.degrees, x)]


def four_step_components(
    g_eig: LieAlgebra,
    ctx: GuivarchContext,
    x: Sequence[Fraction],
    y: Sequence[Fraction],
) -> tuple[Vec, Vec, Vec, Vec]:
    """The four metrically distinct pieces of the 4-step law difference.

    M1 = 1/2 [x1,y1]_3, M2 = 1/2 [x1,y1]_4, M3 = 1/2 ([x1,y2]_4 + [x2,y1]_4),
    M4 = 1/12 ([x1,[x1,y1]_3] + [y1,[y1,x1]_3] + [x1,[x1,y1]_2]_4
               + [y1,[y1,x1]_2]_4); their sum is the exact law difference.
    """
    half = Fraction(1, 2)
    twelfth = Fraction(1, 12)
    x1 = layer_component(ctx, x, 1)
    x2 = layer_component(ctx, x, 2)
    y1 = layer_component(ctx, y, 1)
    y2 = layer_component(ctx, y, 2)
    br = lambda a, b: lie.bracket(g_eig, a, b)
    proj = lambda v, k: layer_component(ctx, v, k)
    xy = br(x1, y1)
    yx = br(y1, x1)
    m1 = [half * c for c in proj(xy, 3)]
    m2 = [half * c for c in proj(xy, 4)]
    m3 = [
        half * (a + b)
        for a, b in zip(proj(br(x1, y2), 4), proj(br(x2, y1), 4))
    ]
    inner = [
        proj(br(x1, proj(xy, 3)), 4),
        proj(br(y1, proj(yx, 3)), 4),
        proj(br(x1, proj(xy, 2)), 4),
        proj(br(y1, proj(yx, 2)), 4),
    ]
    m4 = [twelfth * sum(vals) for vals in zip(*inner)]
    return m1, m2, m3, m4
