"""Single-bidder value priors and virtual values with a constant burn."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from ._numerics import integrate_piecewise, refine_root

GRID_POINTS = 10_000
REGULARITY_SLACK = 1e-9
ROOT_RESIDUAL = 1e-7


class DistributionError(ValueError):
    """A distribution failed one of its structural invariants."""


class ZeroDensity(DistributionError):
    """The virtual value is undefined because the density vanishes."""


@dataclass(frozen=True)
class ContinuousDistribution:
    """A prior with density on a bounded support ``[support_lo, support_hi]``.

    ``pdf`` and ``cdf`` must accept floats and numpy arrays. ``breakpoints``
    lists interior points where the density may jump; scans and quadrature
    split there.
    """

    support_lo: float
    support_hi: float
    pdf: Callable
    cdf: Callable
    breakpoints: tuple = ()
    pieces: tuple = ()
    name: str = "continuous"

    def __post_init__(self):
        if not (0 <= self.support_lo < self.support_hi < math.inf):
            raise DistributionError(
                f"support must satisfy 0 <= lo < hi < inf, got [{self.support_lo}, {self.support_hi}]"
            )

    def tail(self, rho) -> float:
        """P(v >= rho); the cdf is continuous so F(rho-) = F(rho)."""
        if rho <= self.support_lo:
            return 1.0
        if rho >= self.support_hi:
            return 0.0
        return float(min(1.0, max(0.0, 1.0 - float(self.cdf(rho)))))

    def expect(self, g, lo=None, hi=None) -> float:
        """E[g(v); lo <= v <= hi] by quadrature."""
        lo = self.support_lo if lo is None else max(float(lo), self.support_lo)
        hi = self.support_hi if hi is None else min(float(hi), self.support_hi)
        return integrate_piecewise(lambda v: g(v) * float(self.pdf(v)), lo, hi, self.breakpoints)

    def mean(self) -> float:
        return self.expect(lambda v: v)

    def scan_segments(self, n_grid: int = GRID_POINTS) -> list[np.ndarray]:
        """Grid points split into segments that never straddle a breakpoint."""
        lo, hi = self.support_lo, self.support_hi
        pts = np.linspace(lo, hi, n_grid)
        cuts = [lo] + sorted(b for b in self.breakpoints if lo < b < hi) + [hi]
        nudge = 1e-9 * (hi - lo)
        segments = []
        for k, (a, b) in enumerate(zip(cuts, cuts[1:])):
            inner = pts[(pts > a) & (pts < b)]
            left = a if k == 0 else a + nudge
            right = b if k == len(cuts) - 2 else b - nudge
            segments.append(np.concatenate(([left], inner, [right])))
        return segments

    def validate(self, n_grid: int = GRID_POINTS) -> None:
        """Raise ``DistributionError`` unless cdf/pdf invariants hold."""
        if abs(float(self.cdf(self.support_lo))) > 1e-7:
            raise DistributionError(f"cdf(lo) = {float(self.cdf(self.support_lo))}, expected 0")
        if abs(float(self.cdf(self.support_hi)) - 1.0) > 1e-7:
            raise DistributionError(f"cdf(hi) = {float(self.cdf(self.support_hi))}, expected 1")
        xs = np.linspace(self.support_lo, self.support_hi, n_grid)
        F = np.asarray(self.cdf(xs), dtype=float)
        if np.any(np.diff(F) < -1e-12):
            raise DistributionError("cdf is decreasing somewhere on the support")
        if np.any(np.asarray(self.pdf(xs), dtype=float) < 0):
            raise DistributionError("pdf is negative somewhere on the support")
        mass = integrate_piecewise(lambda v: float(self.pdf(v)), self.support_lo,
                                   self.support_hi, self.breakpoints)
        if abs(mass - 1.0) > 1e-6:
            raise DistributionError(f"pdf integrates to {mass}, expected 1")


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely many point masses. Arithmetic stays exact for Fraction inputs."""

    values: tuple
    weights: tuple
    name: str = "discrete"
    tail_sums: tuple = field(init=False, repr=False)

    def __post_init__(self):
        values, weights = tuple(self.values), tuple(self.weights)
        if not values or len(values) != len(weights):
            raise DistributionError("need equally many (at least one) values and weights")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise DistributionError("values must be strictly increasing")
        if values[0] < 0:
            raise DistributionError("values must be non-negative")
        if any(w <= 0 for w in weights):
            raise DistributionError("weights must be positive")
        if abs(sum(weights) - 1) > 1e-12:
            raise DistributionError(f"weights sum to {float(sum(weights))}, expected 1")
        tails, acc = [], 0
        for w in reversed(weights):
            acc = acc + w
            tails.append(acc)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "tail_sums", tuple(reversed(tails)))

    @classmethod
    def from_points(cls, points: Sequence, name: str = "discrete") -> "DiscreteDistribution":
        pts = sorted(points, key=lambda p: p[0])
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts), name=name)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def support_lo(self):
        return self.values[0]

    @property
    def support_hi(self):
        return self.values[-1]

    @property
    def breakpoints(self) -> tuple:
        return self.values

    def first_at_least(self, rho) -> int:
        """0-based index of the first atom >= rho (``n`` when none)."""
        for k, v in enumerate(self.values):
            if v >= rho:
                return k
        return self.n

    def tail(self, rho):
        """P(v >= rho), counting the atom at rho."""
        k = self.first_at_least(rho)
        return self.tail_sums[k] if k < self.n else 0

    def expect(self, g, lo=None, hi=None):
        return sum(
            (g(v) * w for v, w in zip(self.values, self.weights)
             if (lo is None or v >= lo) and (hi is None or v <= hi)),
            0,
        )

    def mean(self):
        return self.expect(lambda v: v)


Distribution = ContinuousDistribution | DiscreteDistribution


def virtual_value(dist: ContinuousDistribution, beta, v) -> float:
    """v - (1 - F(v)) / f(v) - beta."""
    f = float(dist.pdf(v))
    if f <= 0:
        raise ZeroDensity(f"density vanishes at v={v}")
    return v - (1.0 - float(dist.cdf(v))) / f - beta


def adjusted_virtual_value(dist: ContinuousDistribution, beta, v) -> float:
    """phi_beta(v) * f(v), written without division so it exists where f = 0."""
    return (v - beta) * float(dist.pdf(v)) - (1.0 - float(dist.cdf(v)))


def _phi_array(dist: ContinuousDistribution, beta, xs: np.ndarray) -> np.ndarray:
    f = np.asarray(dist.pdf(xs), dtype=float)
    F = np.asarray(dist.cdf(xs), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = xs - (1.0 - F) / f - beta
    return np.where(f > 0, phi, np.nan)


def virtual_value_discrete(dist: DiscreteDistribution, i: int):
    """Discrete virtual value of the i-th atom (1-based).

    v_i - (v_{i+1} - v_i) * s_{i+1} / w_i, and v_n for the top atom.
    """
    if not 1 <= i <= dist.n:
        raise IndexError(f"atom index {i} outside 1..{dist.n}")
    k = i - 1
    v, w, s = dist.values, dist.weights, dist.tail_sums
    if k == dist.n - 1:
        return v[k]
    return v[k] - (v[k + 1] - v[k]) * s[k + 1] / w[k]


def is_discrete_regular(dist: DiscreteDistribution) -> bool:
    phis = [virtual_value_discrete(dist, i) for i in range(1, dist.n + 1)]
    return all(b >= a - 1e-12 for a, b in zip(phis, phis[1:]))


def is_regular(dist: ContinuousDistribution, n_grid: int = GRID_POINTS,
               slack: float = REGULARITY_SLACK) -> bool:
    """True iff phi_0 is non-decreasing on the scan grid (up to ``slack``).

    Raises ``ZeroDensity`` if the density vanishes strictly inside the support.
    """
    seq = []
    for seg in dist.scan_segments(n_grid):
        phi = _phi_array(dist, 0.0, seg)
        bad = np.isnan(phi)
        interior = (seg > dist.support_lo) & (seg < dist.support_hi)
        if np.any(bad & interior):
            where = seg[bad & interior][0]
            raise ZeroDensity(f"density vanishes at interior point v={where:.6g}")
        seq.append(phi[~bad])
    phi = np.concatenate(seq)
    return bool(np.all(np.diff(phi) >= -slack))


def root_set(dist: ContinuousDistribution, beta=0.0, n_grid: int = GRID_POINTS) -> list[float]:
    """Sign-change roots of phi_beta, sorted ascending.

    Points with zero density and declared breakpoints interrupt the scan, so
    jumps across them never count as roots.
    """
    beta = float(beta)
    roots: list[float] = []

    def phi(x):
        return virtual_value(dist, beta, x)

    for seg in dist.scan_segments(n_grid):
        vals = _phi_array(dist, beta, seg)
        for k in range(len(seg)):
            if vals[k] == 0.0:
                roots.append(float(seg[k]))
        for k in range(len(seg) - 1):
            a, b = vals[k], vals[k + 1]
            if np.isnan(a) or np.isnan(b) or a == 0.0 or b == 0.0:
                continue
            if (a < 0) != (b < 0):
                r = refine_root(phi, float(seg[k]), float(seg[k + 1]))
                if abs(phi(r)) < ROOT_RESIDUAL:
                    roots.append(r)
    return sorted(set(roots))


@dataclass(frozen=True)
class VirtualValueCurve:
    """phi_beta for a continuous prior, with lazily computed roots."""

    dist: ContinuousDistribution
    burn: float = 0.0

    def evaluate(self, v) -> float:
        return virtual_value(self.dist, self.burn, v)

    def base_curve(self, v) -> float:
        return virtual_value(self.dist, 0.0, v)

    @cached_property
    def roots(self) -> list[float]:
        return root_set(self.dist, self.burn)

    @cached_property
    def is_monotone(self) -> bool:
        # shifting by a constant burn never changes monotonicity
        return is_regular(self.dist)


def uniform(lo=0.0, hi=1.0) -> ContinuousDistribution:
    lo, hi = float(lo), float(hi)
    width = hi - lo

    def pdf(v):
        v = np.asarray(v, dtype=float)
        out = np.where((v >= lo) & (v <= hi), 1.0 / width, 0.0)
        return out if out.ndim else float(out)

    def cdf(v):
        v = np.asarray(v, dtype=float)
        out = np.clip((v - lo) / width, 0.0, 1.0)
        return out if out.ndim else float(out)

    return ContinuousDistribution(lo, hi, pdf, cdf, pieces=(("uniform", lo, hi),),
                                  name=f"uniform[{lo:g},{hi:g}]")


def truncated_exponential(rate=1.0, hi=5.0) -> ContinuousDistribution:
    """Exponential(rate) conditioned on [0, hi]; has a monotone hazard rate."""
    rate, hi = float(rate), float(hi)
    norm = 1.0 - math.exp(-rate * hi)

    def pdf(v):
        v = np.asarray(v, dtype=float)
        out = np.where((v >= 0) & (v <= hi), rate * np.exp(-rate * v) / norm, 0.0)
        return out if out.ndim else float(out)

    def cdf(v):
        v = np.clip(np.asarray(v, dtype=float), 0.0, hi)
        out = (1.0 - np.exp(-rate * v)) / norm
        return out if out.ndim else float(out)

    return ContinuousDistribution(0.0, hi, pdf, cdf, pieces=(("exponential", rate, hi),),
                                  name=f"exp({rate:g})|[0,{hi:g}]")


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, numeric string ('1/4', '0.1') or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x).strip())
