"""Posted-price economics with a constant burn: revenue, welfare split and
the revenue-maximizing price."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._numerics import integrate_piecewise, maximize_in
from .distribution import (
    GRID_POINTS,
    ContinuousDistribution,
    DiscreteDistribution,
    adjusted_virtual_value,
    virtual_value_discrete,
)

CSV_HEADER = ("beta", "price", "revenue", "bidder_utility", "realized_burn", "welfare")
_TIE = 1e-12


class BurnExceedsPrice(ValueError):
    """Burn larger than the posted price breaks burn balance."""


@dataclass(frozen=True)
class PricePoint:
    price: float
    burn: float
    revenue: float
    bidder_utility: float
    realized_burn: float
    welfare: float

    def row(self) -> list[str]:
        return [f"{float(x):.9g}" for x in (self.burn, self.price, self.revenue,
                                             self.bidder_utility, self.realized_burn, self.welfare)]


def revenue(dist, rho, beta):
    """P(v >= rho) * (rho - beta)."""
    if beta > rho:
        raise BurnExceedsPrice(f"burn {beta} exceeds price {rho}")
    return dist.tail(rho) * (rho - beta)


def _revenue_array(dist: ContinuousDistribution, beta: float, xs: np.ndarray) -> np.ndarray:
    tail = 1.0 - np.asarray(dist.cdf(xs), dtype=float)
    tail = np.where(xs >= dist.support_hi, 0.0, np.clip(tail, 0.0, 1.0))
    return tail * (xs - beta)


def _myerson_discrete(dist: DiscreteDistribution, beta):
    best_p, best_r = beta, 0 * beta
    for v in dist.values:
        if v >= beta:
            r = revenue(dist, v, beta)
            if r > best_r:
                best_p, best_r = v, r
    return best_p


def myerson_price(dist, beta=0.0, n_grid: int = GRID_POINTS):
    """Lowest price maximizing revenue at burn ``beta``.

    Continuous priors: global grid scan on [beta, hi] plus declared
    breakpoints, then a bounded refinement of every near-best grid cell.
    Discrete priors: exact search over atoms >= beta and beta itself.
    """
    if isinstance(dist, DiscreteDistribution):
        return _myerson_discrete(dist, beta)
    beta = float(beta)
    hi = dist.support_hi
    if beta >= hi:
        return beta
    lo = max(beta, dist.support_lo)
    xs = np.linspace(lo, hi, n_grid)
    extra = [b for b in dist.breakpoints if lo < b < hi]
    xs = np.unique(np.concatenate((xs, extra, [beta]))) if extra or beta < lo else xs
    rev = _revenue_array(dist, beta, xs)
    top = float(rev.max())

    def objective(x):
        return revenue(dist, x, beta)

    best_x, best_r = None, -np.inf
    # local maxima within a coarse band of the top are refined; others cannot win
    band = max(1e-6, 1e-6 * abs(top))
    for k in np.nonzero(rev >= top - band)[0]:
        left = rev[k - 1] if k > 0 else -np.inf
        right = rev[k + 1] if k + 1 < len(xs) else -np.inf
        if rev[k] < left or rev[k] < right:
            continue
        cand = [(float(xs[k]), float(rev[k]))]
        a, b = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, len(xs) - 1)])
        if b > a:
            cand.append(maximize_in(objective, a, b))
        for x, r in cand:
            if r > best_r + _TIE or (abs(r - best_r) <= _TIE and x < best_x):
                best_x, best_r = x, r
    return best_x


def price_point(dist, rho, beta) -> PricePoint:
    """Revenue, bidder surplus, burn and welfare of posting ``rho``."""
    rev = revenue(dist, rho, beta)
    welfare = dist.expect(lambda v: v, lo=rho)
    surplus = dist.expect(lambda v: v - rho, lo=rho)
    return PricePoint(rho, beta, rev, surplus, dist.tail(rho) * beta, welfare)


def price_curves(dist, beta_grid) -> list[PricePoint]:
    """PricePoint at the Myerson price for each burn level."""
    return [price_point(dist, myerson_price(dist, b), b) for b in beta_grid]


def myerson_identity_check(dist, rho, beta):
    """(revenue, integral of phi_beta f above rho).

    For continuous priors the right side is integrated in the division-free
    form (v - beta) f(v) - (1 - F(v)). For discrete priors it is the sum of
    (phi(v_i) - beta) w_i over atoms >= rho, which matches revenue exactly
    when rho is an atom.
    """
    lhs = revenue(dist, rho, beta)
    if isinstance(dist, DiscreteDistribution):
        k = dist.first_at_least(rho)
        rhs = sum(((virtual_value_discrete(dist, i + 1) - beta) * dist.weights[i]
                   for i in range(k, dist.n)), 0 * beta)
        return lhs, rhs
    a = max(float(rho), dist.support_lo)
    if a >= dist.support_hi:
        return lhs, 0.0
    rhs = integrate_piecewise(lambda v: adjusted_virtual_value(dist, beta, v), a,
                              dist.support_hi, dist.breakpoints)
    return lhs, rhs


def curves_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow(p.row())
    return buf.getvalue()


def write_curves_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(curves_csv(points))
