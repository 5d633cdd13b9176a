"""Named prior families: a non-regular cubic, a truncated equal-revenue law,
a discrete family with a growing approximation gap, and smoothing of atoms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numerics import refine_root
from .distribution import (
    ContinuousDistribution,
    DiscreteDistribution,
    DistributionError,
)


class InvalidParams(ValueError):
    """Constructor parameters outside the documented range."""


class NonnegativityViolated(InvalidParams):
    """The cubic's density would go negative."""


class NoUnitRoot(InvalidParams):
    """The cubic cdf never reaches 1."""


class OverlapError(InvalidParams):
    """Smeared atoms would overlap."""


def _vectorized(fn):
    def wrapped(v):
        arr = np.asarray(v, dtype=float)
        out = fn(arr)
        return out if out.ndim else float(out)
    return wrapped


@dataclass(frozen=True)
class CubicSpec:
    """Coefficients of P(v) = c v^3 - b v^2 + a v - 1, the adjusted virtual value."""

    a: float
    b: float
    c: float

    @property
    def density_floor(self) -> float:
        """Minimum over the real line of f(v) = a/2 - 2b/3 v + 3c/4 v^2 (c > 0)."""
        if self.c == 0:
            return -math.inf if self.b > 0 else self.a / 2
        return self.a / 2 - 4 * self.b ** 2 / (27 * self.c)

    @property
    def nonnegative(self) -> bool:
        return 27 / 8 * self.a * self.c >= self.b ** 2

    def P(self, v):
        return self.c * v ** 3 - self.b * v ** 2 + self.a * v - 1


def build_cubic(spec: CubicSpec) -> ContinuousDistribution:
    """Distribution whose adjusted virtual value phi_0 * f is the cubic P.

    F(v) = a/2 v - b/3 v^2 + c/4 v^3 on [0, M], with M the first point where
    F reaches 1.
    """
    a, b, c = float(spec.a), float(spec.b), float(spec.c)
    if a <= 0 or b < 0 or c < 0:
        raise InvalidParams(f"need a > 0 and b, c >= 0, got a={a}, b={b}, c={c}")

    def F(v):
        return (a / 2) * v - (b / 3) * v ** 2 + (c / 4) * v ** 3

    def f(v):
        return a / 2 - (2 * b / 3) * v + (3 * c / 4) * v ** 2

    hi = 1.0
    while F(hi) < 1:
        hi *= 2
        if hi > 1e6:
            raise NoUnitRoot(f"F stays below 1 on [0, 1e6] for {spec}")
    xs = np.linspace(0.0, hi, 4097)
    above = np.nonzero(F(xs) >= 1)[0][0]
    M = refine_root(lambda v: F(v) - 1, float(xs[above - 1]), float(xs[above]))

    grid_ok = bool(np.all(f(np.linspace(0.0, M, 1000)) >= 0))
    if not spec.nonnegative:
        raise NonnegativityViolated(
            f"27/8*a*c = {27 / 8 * a * c:.6g} < b^2 = {b * b:.6g}"
            + ("; the density is nonetheless nonnegative on [0, M]" if grid_ok else "")
        )

    pdf = _vectorized(lambda v: np.where((v >= 0) & (v <= M), f(v), 0.0))
    cdf = _vectorized(lambda v: np.where(v <= 0, 0.0, np.where(v >= M, 1.0, F(np.clip(v, 0, M)))))
    return ContinuousDistribution(
        0.0, M, pdf, cdf,
        pieces=(("cubic", 0.0, M, (a, b, c)),),
        name=f"cubic(a={a:g},b={b:g},c={c:g})",
    )


@dataclass(frozen=True)
class TruncEqualRevenueSpec:
    T: float
    eps: float

    def __post_init__(self):
        if not (self.T > 0 and 0 < self.eps <= min(self.T, 1)):
            raise InvalidParams(f"need T > 0 and 0 < eps <= min(T, 1), got T={self.T}, eps={self.eps}")


def build_trunc_equal_revenue(spec: TruncEqualRevenueSpec) -> ContinuousDistribution:
    """Equal-revenue density 1/(z+1)^2 on [0, T], the leftover mass spread on (T, T+eps]."""
    T, eps = float(spec.T), float(spec.eps)
    top = T + eps
    flat = 1.0 / (eps * (T + 1))

    def pdf(v):
        return np.where((v >= 0) & (v <= T), 1.0 / (np.maximum(v, 0) + 1) ** 2,
                        np.where((v > T) & (v <= top), flat, 0.0))

    def cdf(v):
        v = np.clip(v, 0.0, top)
        return np.where(v <= T, 1.0 - 1.0 / (v + 1), T / (T + 1) + (v - T) * flat)

    return ContinuousDistribution(
        0.0, top, _vectorized(pdf), _vectorized(cdf), breakpoints=(T,),
        pieces=(("equal_revenue", 0.0, T), ("uniform", T, top)),
        name=f"trunc_equal_revenue(T={T:g},eps={eps:g})",
    )


def build_piecewise_uniform(pieces) -> ContinuousDistribution:
    """Piecewise-constant density from ``(lo, hi, mass)`` triples.

    Pieces must be disjoint; gaps between them carry zero density.
    """
    pieces = sorted((float(lo), float(hi), float(m)) for lo, hi, m in pieces)
    if not pieces:
        raise InvalidParams("need at least one piece")
    for lo, hi, m in pieces:
        if not (0 <= lo < hi) or m <= 0:
            raise InvalidParams(f"bad piece ({lo}, {hi}, {m})")
    for (_, h1, _), (l2, _, _) in zip(pieces, pieces[1:]):
        if l2 < h1:
            raise OverlapError(f"pieces overlap at {l2} < {h1}")
    total = sum(m for _, _, m in pieces)
    if abs(total - 1.0) > 1e-9:
        raise InvalidParams(f"piece masses sum to {total}, expected 1")

    los = np.array([p[0] for p in pieces])
    his = np.array([p[1] for p in pieces])
    dens = np.array([p[2] / (p[1] - p[0]) for p in pieces])
    before = np.concatenate(([0.0], np.cumsum([p[2] for p in pieces])[:-1]))

    def pdf(v):
        out = np.zeros_like(v)
        for lo, hi, d in zip(los, his, dens):
            out = np.where((v >= lo) & (v <= hi) & (out == 0), d, out)
        return out

    def cdf(v):
        out = np.zeros_like(v)
        for lo, hi, d, acc in zip(los, his, dens, before):
            out = np.where(v >= lo, acc + d * (np.minimum(v, hi) - lo), out)
        return np.minimum(out, 1.0)

    cuts = sorted({x for lo, hi, _ in pieces for x in (lo, hi)} - {pieces[0][0], pieces[-1][1]})
    return ContinuousDistribution(
        pieces[0][0], pieces[-1][1], _vectorized(pdf), _vectorized(cdf),
        breakpoints=tuple(cuts),
        pieces=tuple(("uniform", lo, hi, m) for lo, hi, m in pieces),
        name="piecewise_uniform",
    )


def epsilon_smear(dist: DiscreteDistribution, eps) -> ContinuousDistribution:
    """Replace each atom (v, w) by mass w spread uniformly on [v, v + eps]."""
    eps = float(eps)
    if eps <= 0:
        raise InvalidParams("eps must be positive")
    vals = [float(v) for v in dist.values]
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    if gaps and eps >= min(gaps) / 2:
        raise OverlapError(f"eps={eps} is not below half the smallest atom gap {min(gaps) / 2}")
    try:
        out = build_piecewise_uniform([(v, v + eps, float(w)) for v, w in zip(vals, dist.weights)])
    except DistributionError as exc:
        raise InvalidParams(str(exc)) from exc
    return ContinuousDistribution(out.support_lo, out.support_hi, out.pdf, out.cdf,
                                  out.breakpoints, out.pieces, name=f"smear({dist.name},{eps:g})")


def sqrt_fraction(n: int) -> Fraction:
    """sqrt(n) exactly when n is a perfect square, else the nearest double as a Fraction."""
    r = math.isqrt(n)
    return Fraction(r) if r * r == n else Fraction(math.sqrt(n))


def build_sqrtlog_family(n: int) -> DiscreteDistribution:
    """Atoms 2^(i-1) with weight 2^-i for i < n, and sqrt(n) 2^(n-2) with weight 2^-(n-1).

    Every atom below the top earns revenue 1 as a posted price; the top earns
    sqrt(n)/2. Values and weights are Fractions so tail sums stay exact.
    """
    if not isinstance(n, int) or n < 5:
        raise InvalidParams(f"need an integer n >= 5, got {n!r}")
    values = [Fraction(2) ** (i - 1) for i in range(1, n)]
    weights = [Fraction(1, 2 ** i) for i in range(1, n)]
    values.append(sqrt_fraction(n) * Fraction(2) ** (n - 2))
    weights.append(Fraction(1, 2 ** (n - 1)))
    return DiscreteDistribution(tuple(values), tuple(weights), name=f"sqrtlog(n={n})")


def sqrtlog_top(n: int) -> float:
    """Largest value M of the n-atom family; C grows like sqrt(log M)."""
    return math.sqrt(n) * 2.0 ** (n - 2)


CUBIC_EXAMPLE = CubicSpec(5.62, 10.0, 5.62)
