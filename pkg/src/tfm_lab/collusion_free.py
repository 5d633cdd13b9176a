"""Which posted prices survive every incentive-compatible, individually
rational collusion, and how well they approximate revenue or welfare."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numerics import maximize_in
from .distribution import (
    ContinuousDistribution,
    DiscreteDistribution,
    ZeroDensity,
    is_regular,
    root_set,
)
from .pricing import myerson_price, revenue

EXCLUSION_SLACK = 1e-9
SCAN_POINTS = 1000
EDGE_TOL = 1e-6
APPROX_POINTS = 1000


class ZeroOptimal(ValueError):
    """Both optimal revenue and optimal welfare are zero."""


@dataclass(frozen=True)
class PriceSet:
    """Sorted, disjoint, closed price intervals."""

    intervals: tuple = ()

    def __post_init__(self):
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"interval [{lo}, {hi}] is reversed")
        for (_, h1), (l2, _) in zip(self.intervals, self.intervals[1:]):
            if l2 <= h1:
                raise ValueError("intervals must be sorted and disjoint")

    def __contains__(self, price) -> bool:
        return any(lo <= price <= hi for lo, hi in self.intervals)

    def contains(self, price, tol=0.0) -> bool:
        return any(lo - tol <= price <= hi + tol for lo, hi in self.intervals)

    def lines(self) -> list[str]:
        return [f"{float(lo):.9g}..{float(hi):.9g}" for lo, hi in self.intervals]

    def __str__(self) -> str:
        return "\n".join(self.lines()) if self.intervals else "(empty)"


def _merge(intervals) -> PriceSet:
    merged = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return PriceSet(tuple(merged))


def _discrete_free(dist: DiscreteDistribution, beta) -> PriceSet:
    # In (v_{k-1}, v_k] revenue is s_k (rho - beta); a price survives iff no
    # cheaper price earns strictly more.
    mu = myerson_price(dist, beta)
    out = []
    best_below = 0 * beta
    prev = None
    for k, v in enumerate(dist.values):
        if v < beta:
            prev = v
            continue
        if v > mu:
            break
        s = dist.tail_sums[k]
        start = beta + best_below / s
        cell_lo = beta if prev is None or prev < beta else prev
        start = max(start, cell_lo)
        if start <= v:
            out.append((start, v))
        best_below = max(best_below, s * (v - beta))
        prev = v
    if not out or out[0][0] > beta:
        out.insert(0, (beta, beta))
    return _merge(out)


class _RevenueEnvelope:
    """Revenue at burn beta and its running maximum over cheaper prices."""

    def __init__(self, dist: ContinuousDistribution, beta: float, mu: float):
        self.dist, self.beta = dist, beta
        roots = [r for r in root_set(dist, beta) if beta <= r <= mu]
        cuts = [b for b in dist.breakpoints if beta < b < mu]
        xs = np.unique(np.concatenate((np.linspace(beta, mu, SCAN_POINTS), roots, cuts)))
        revs = np.array([self.rev(x) for x in xs])
        # refine interior local maxima so the running max sees true peaks
        peaks_x, peaks_r = [], []
        for k in range(1, len(xs) - 1):
            if revs[k] >= revs[k - 1] and revs[k] >= revs[k + 1]:
                x, r = maximize_in(self.rev, float(xs[k - 1]), float(xs[k + 1]))
                if r > revs[k]:
                    peaks_x.append(x)
                    peaks_r.append(r)
        self.xs = np.concatenate((xs, peaks_x))
        self.revs = np.concatenate((revs, peaks_r))
        order = np.argsort(self.xs, kind="stable")
        self.xs, self.revs = self.xs[order], self.revs[order]
        self.runmax = np.maximum.accumulate(self.revs)

    def rev(self, x) -> float:
        return float(revenue(self.dist, float(x), self.beta))

    def best_below(self, price):
        """(argmax, max) of revenue over sampled prices strictly below ``price``."""
        k = int(np.searchsorted(self.xs, price, side="left"))
        if k == 0:
            return None, -np.inf
        j = int(np.argmax(self.revs[:k]))
        return float(self.xs[j]), float(self.revs[j])

    def excluded(self, price) -> bool:
        _, m = self.best_below(price)
        return m - self.rev(price) > EXCLUSION_SLACK


def _continuous_free(dist: ContinuousDistribution, beta: float) -> PriceSet:
    mu = float(myerson_price(dist, beta))
    if mu <= beta:
        return PriceSet(((beta, beta),))
    try:
        regular = is_regular(dist)
    except ZeroDensity:
        regular = False
    if regular:
        return PriceSet(((beta, mu),))
    env = _RevenueEnvelope(dist, beta, mu)
    grid = np.unique(np.concatenate((np.linspace(beta, mu, SCAN_POINTS), env.xs)))
    grid = grid[(grid >= beta) & (grid <= mu)]
    flags = [env.excluded(x) for x in grid]

    def edge(a, b, a_flag):
        # bisect the switch of the exclusion indicator inside (a, b)
        while b - a > EDGE_TOL:
            m = 0.5 * (a + b)
            if env.excluded(m) == a_flag:
                a = m
            else:
                b = m
        return a, b

    out, start = [], None
    for k, x in enumerate(grid):
        if not flags[k] and start is None:
            start = float(x) if k == 0 else edge(float(grid[k - 1]), float(x), True)[1]
        if flags[k] and start is not None:
            out.append((start, edge(float(grid[k - 1]), float(x), False)[0]))
            start = None
    if start is not None:
        out.append((start, mu))
    return _merge(out)


def collusion_free_prices(dist, beta=0.0) -> PriceSet:
    """Posted prices in [beta, mu(beta)] that no IC+IR collusion can undercut.

    A price is excluded when a cheaper price at least ``beta`` earns strictly
    more revenue (more than 1e-9), which is the same as the adjusted virtual
    value integrating to a positive amount from that cheaper point.
    """
    if isinstance(dist, DiscreteDistribution):
        return _discrete_free(dist, beta)
    return _continuous_free(dist, float(beta))


def exclusion_witness(dist, beta, price):
    """(cheaper price, revenue gain) that excludes ``price``, or None."""
    if isinstance(dist, DiscreteDistribution):
        best = None
        for v in dist.values:
            if beta <= v < price:
                gain = revenue(dist, v, beta) - revenue(dist, price, beta)
                if gain > 0 and (best is None or gain > best[1]):
                    best = (v, gain)
        return best
    beta, price = float(beta), float(price)
    env = _RevenueEnvelope(dist, beta, max(price, beta))
    x, m = env.best_below(price)
    gain = m - env.rev(price)
    return (x, gain) if gain > EXCLUSION_SLACK else None


@dataclass(frozen=True)
class ApproxReport:
    price: float
    C_rho: float
    revenue_ratio: float
    welfare_ratio: float


def _optima(dist):
    opt_rev = revenue(dist, myerson_price(dist, 0 * dist.support_lo), 0)
    opt_welfare = dist.mean()
    if opt_rev == 0 and opt_welfare == 0:
        raise ZeroOptimal("all mass sits at zero")
    return opt_rev, opt_welfare


def welfare_revenue_approx(dist, rho, _optimum=None) -> ApproxReport:
    """Least C with C Rev(rho) >= optimal revenue or C Welfare(rho) >= optimal welfare."""
    opt_rev, opt_welfare = _optimum or _optima(dist)
    rev_ratio = revenue(dist, rho, 0) / opt_rev if opt_rev else 1
    wel_ratio = dist.expect(lambda v: v, lo=rho) / opt_welfare if opt_welfare else 1
    best = max(rev_ratio, wel_ratio)
    C = 1 / best if best else float("inf")
    return ApproxReport(rho, C, rev_ratio, wel_ratio)


def worst_case_report(dist) -> ApproxReport:
    """ApproxReport at the price in [0, mu(0)] with the largest C.

    Discrete priors scan 0 and the atoms up to mu(0): any price strictly
    between atoms sells to the same types as the next atom up, for less.
    """
    optimum = _optima(dist)
    mu = myerson_price(dist, 0)
    if isinstance(dist, DiscreteDistribution):
        prices = [0 * mu] + [v for v in dist.values if v <= mu]
    else:
        mu = float(mu)
        extra = [b for b in dist.breakpoints if 0 <= b <= mu]
        prices = np.unique(np.concatenate((np.linspace(0.0, mu, APPROX_POINTS), extra))).tolist()
    reports = [welfare_revenue_approx(dist, p, optimum) for p in prices]
    best = max(range(len(reports)), key=lambda k: reports[k].C_rho)
    if isinstance(dist, DiscreteDistribution):
        return reports[best]
    # polish the peak between the neighbouring grid points
    lo, hi = prices[max(best - 1, 0)], prices[min(best + 1, len(prices) - 1)]
    x, _ = maximize_in(lambda p: welfare_revenue_approx(dist, p, optimum).C_rho, lo, hi, tol=1e-9)
    polished = welfare_revenue_approx(dist, x, optimum)
    return polished if polished.C_rho > reports[best].C_rho else reports[best]


def worst_case_C(dist) -> float:
    return worst_case_report(dist).C_rho
