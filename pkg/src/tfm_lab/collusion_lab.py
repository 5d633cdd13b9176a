"""Side agreements between the miner and bidders: bid rewrites plus
budget-balanced transfers, their incentive checks, and a search for
profitable agreements against single-bidder mechanisms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from ._report import AuditReport, Witness
from .distribution import ContinuousDistribution, DiscreteDistribution, as_fraction
from .mechanism_core import BidGrid, GridMechanism, InvalidParams, Outcome

TOL = Fraction(0)
FLOAT_TOL = 1e-9


class CompositionUndefined(ValueError):
    """Composition is only defined for single-bidder mechanisms."""


RewriteRule = Callable[[tuple], tuple]


@dataclass(frozen=True)
class Collusion:
    """Rewrite ``c`` and transfers ``t`` as one rule.

    ``rule(bids)`` returns ``(rewritten_bids, transfers)`` where transfers has
    one entry per bid position followed by the miner's entry. Positions at or
    beyond the real bidders belong to the miner's fakes; their transfers
    accrue to the miner.
    """

    members: frozenset
    rule: RewriteRule
    name: str = "collusion"
    trivial: bool = False

    @property
    def k(self) -> int:
        return len(self.members)

    def apply(self, bids):
        bids = tuple(as_fraction(b) for b in bids)
        new, t = self.rule(bids)
        return tuple(as_fraction(b) for b in new), tuple(as_fraction(x) for x in t)

    def rewrite(self, bids):
        return self.apply(bids)[0]

    def transfers(self, bids):
        return self.apply(bids)[1]


def _zero(m):
    return (Fraction(0),) * (m + 1)


def identity_collusion(members=(0,)) -> Collusion:
    return Collusion(frozenset(members), lambda b: (b, _zero(len(b))), "identity", trivial=True)


def table_collusion(members, entries: dict, name="table") -> Collusion:
    """Collusion from explicit ``{bids: (rewritten, transfers)}``; identity elsewhere."""
    norm = {}
    for bids, (new, t) in entries.items():
        key = tuple(as_fraction(b) for b in bids)
        norm[key] = (tuple(as_fraction(b) for b in new), tuple(as_fraction(x) for x in t))

    def rule(bids):
        return norm.get(bids, (bids, _zero(len(bids))))
    return Collusion(frozenset(members), rule, name)


def _single(fn):
    """Lift a one-bid rule; longer profiles are left alone."""
    def rule(bids):
        if len(bids) != 1:
            return bids, _zero(len(bids))
        return fn(bids[0])
    return rule


def threshold_collusion(threshold, target, rebate, name=None) -> Collusion:
    """Bids at or above ``threshold`` become ``target``; the miner pays ``rebate`` back."""
    threshold, target, rebate = map(as_fraction, (threshold, target, rebate))

    def one(b):
        if b > 0 and b >= threshold:
            return (target,), (rebate, -rebate)
        return (b,), (Fraction(0), Fraction(0))
    return Collusion(frozenset({0}), _single(one),
                     name or f"threshold({threshold}->{target}, rebate {rebate})")


def example_II_collusion(reserve, k: int) -> Collusion:
    """The top colluder (among the first k positions) stays, the other
    colluders withdraw, and the winner tops the miner up to the second
    colluder bid whenever that exceeds the reserve. Nothing happens when an
    outsider bids at least the reserve."""
    reserve = as_fraction(reserve)

    def rule(bids):
        col = [i for i in range(min(k, len(bids))) if bids[i] > 0]
        t = [Fraction(0)] * (len(bids) + 1)
        if not col:
            return bids, tuple(t)
        top = max(col, key=lambda i: (bids[i], -i))
        if bids[top] < reserve:
            return bids, tuple(t)
        # an outsider able to take the item leaves nothing to share
        if any(bids[j] >= reserve for j in range(len(bids)) if j not in col and bids[j] > 0):
            return bids, tuple(t)
        rest = [bids[i] for i in col if i != top]
        second = max(rest, default=Fraction(0))
        new = list(bids)
        for i in col:
            if i != top:
                new[i] = Fraction(0)
        gap = max(second - reserve, Fraction(0))
        t[top] = -gap
        t[-1] = gap
        return tuple(new), tuple(t)
    return Collusion(frozenset(range(k)), rule, f"example_II(P={reserve}, k={k})")


def builtin_collusion(kind: str, grid: BidGrid | None = None, **params) -> Collusion:
    """Named collusions.

    example_I: a bid of 5 becomes 10 with transfers (6, -6).
    example_II(P, k): second price among colluders above reserve P.
    example_III: bids >= 5 become 10 with transfers (5, -5).
    lower_price(price, target) and price_to_burn(price, burn): bids at or above
    the target become the posted price and the miner refunds the difference.
    burn_drop(high, low): bid ``high`` is rewritten to ``low``, no transfers.
    identity.
    """
    if kind == "identity":
        col = identity_collusion(params.get("members", (0,)))
    elif kind == "example_I":
        col = table_collusion({0}, {(5,): ((10,), (6, -6))}, "example_I")
    elif kind == "example_II":
        col = example_II_collusion(params["P"], int(params.get("k", 2)))
    elif kind == "example_III":
        col = threshold_collusion(5, 10, 5, "example_III")
    elif kind in ("lower_price", "price_to_burn"):
        price = as_fraction(params["price"])
        target = as_fraction(params["target"] if kind == "lower_price" else params["burn"])
        if target > price:
            raise InvalidParams(f"target {target} exceeds price {price}")
        col = threshold_collusion(target, price, price - target, f"{kind}({price}, {target})")
    elif kind == "burn_drop":
        hi, lo = as_fraction(params["high"]), as_fraction(params["low"])
        col = table_collusion({0}, {(hi,): ((lo,), (0, 0))}, f"burn_drop({hi}, {lo})")
    else:
        raise InvalidParams(f"unknown collusion kind {kind!r}")
    if grid is not None:
        _check_on_grid(col, grid, params)
    return col


def _check_on_grid(col: Collusion, grid: BidGrid, params) -> None:
    for b in grid.levels:
        new, _ = col.apply((b,))
        for x in new:
            if x not in grid:
                raise InvalidParams(f"{col.name} rewrites bid {b} to {x}, which is off the grid")


# ----------------------------------------------------------------- utilities


def _out(m: GridMechanism, bids) -> Outcome:
    return m.outcome(tuple(bids))


def member_utility(m: GridMechanism, col: Collusion, bids, i: int, value):
    """u_i(c(b); v_i) + t_i(b)."""
    new, t = col.apply(bids)
    out = _out(m, new)
    return (as_fraction(value) if out.winner == i else 0) - out.pay[i] + t[i]


def miner_collusion_utility(m: GridMechanism, col: Collusion, bids, n: int):
    """Miner's take on c(b) with n real bidders, plus its transfer and the fakes' transfers."""
    new, t = col.apply(bids)
    out = _out(m, new)
    total = Fraction(0)
    for i in range(len(new)):
        total += out.pay[i] - out.burn[i] if i < n else -out.burn[i]
    return total + t[-1] + sum(t[n:len(new)], Fraction(0))


def _validate(m: GridMechanism, col: Collusion):
    """Budget balance, outsider preservation and ex-post member IR on every profile."""
    for bids in m.profiles():
        if not bids:
            continue
        new, t = col.apply(bids)
        if len(new) != len(bids) or len(t) != len(bids) + 1:
            return Witness(bids, "rewrite or transfer vector has the wrong length", 0, 1)
        if sum(t) != 0:
            return Witness(bids, f"transfers sum to {sum(t)}", 0, abs(sum(t)))
        for i in range(len(bids)):
            if i not in col.members and (new[i] != bids[i] or t[i] != 0):
                return Witness(bids, f"non-member {i} is touched", 0, 1)
            if new[i] not in m.grid:
                return Witness(bids, f"bid {new[i]} is off the grid", 0, 1)
        for i in col.members:
            if i < len(bids) and bids[i] > 0:
                u = member_utility(m, col, bids, i, bids[i])
                if u < 0:
                    return Witness(bids, f"member {i} ends with {u} < 0", 0, -u, coalition=(i,))
    return None


def _is_trivial(m: GridMechanism, col: Collusion) -> bool:
    if col.trivial:
        return True
    for bids in m.profiles():
        new, t = col.apply(bids)
        if new != tuple(bids) or any(t):
            return False
    return True


def _miner_strategies(bids, n_max: int, grid: BidGrid, budget: int):
    """(deviant profile, label) for every omission/fake choice except honest play."""
    n = len(bids)
    for mask in range(1 << n):
        kept = tuple(b if mask >> i & 1 else Fraction(0) for i, b in enumerate(bids))
        for k in range(min(budget, n_max - n) + 1):
            if k == 0 and mask == (1 << n) - 1:
                continue
            for fakes in product(grid.levels[1:], repeat=k):
                yield kept + fakes, mask, fakes


def check_collusion_ic(m: GridMechanism, col: Collusion, fake_budget: int = 2,
                       profiles=None) -> AuditReport:
    """No member gains by misreporting into the agreement and the miner gains
    nothing by omitting bids or adding fakes around it.

    A collusion that is the identity with zero transfers everywhere passes
    vacuously; any other one must satisfy the inequalities on all profiles.
    """
    bad = _validate(m, col)
    if bad is not None:
        return AuditReport.fail("IC", bad, stage="validity")
    if _is_trivial(m, col):
        return AuditReport.ok("IC", trivial=True)
    grid = m.grid
    todo = list(m.profiles()) if profiles is None else [tuple(as_fraction(b) for b in p) for p in profiles]
    for bids in todo:
        n = len(bids)
        if n == 0:
            continue
        for i in sorted(col.members):
            if i >= n:
                continue
            honest = member_utility(m, col, bids, i, bids[i])
            for d in grid.levels:
                if d == bids[i]:
                    continue
                dev = list(bids)
                dev[i] = d
                u = member_utility(m, col, dev, i, bids[i])
                if u > honest:
                    return AuditReport.fail("IC", Witness(
                        bids, f"member {i} with value {bids[i]} reports {d}", honest, u,
                        tuple(dev), valuations=bids, coalition=(i,)), party="bidder")
        honest = miner_collusion_utility(m, col, bids, n)
        for dev, mask, fakes in _miner_strategies(bids, m.n_max, grid, fake_budget):
            u = miner_collusion_utility(m, col, dev, n)
            if u > honest:
                omitted = [i for i in range(n) if not mask >> i & 1 and bids[i] != 0]
                parts = ([f"omit bidders {omitted}"] if omitted else []) + \
                        ([f"add fake bids {', '.join(str(f) for f in fakes)}"] if fakes else [])
                return AuditReport.fail("IC", Witness(
                    bids, "; ".join(parts), honest, u, dev, fakes=tuple(fakes)), party="miner")
    return AuditReport.ok("IC")


# ---------------------------------------------------------------- expectations


@dataclass(frozen=True)
class _Cell:
    """Values that bid grid level ``bid``: their probability and first moment."""

    bid: object
    mass: object
    moment: object


def grid_cells(grid: BidGrid, prior) -> list[_Cell]:
    """Probability and E[v; cell] for each floor-to-grid bid."""
    levels = grid.levels
    cells = []
    if isinstance(prior, DiscreteDistribution):
        for d, lv in enumerate(levels):
            nxt = levels[d + 1] if d + 1 < len(levels) else None
            pts = [(v, w) for v, w in zip(prior.values, prior.weights)
                   if v >= lv and (nxt is None or v < nxt)]
            mass = sum((w for _, w in pts), 0 * prior.weights[0])
            moment = sum((v * w for v, w in pts), 0 * prior.weights[0])
            cells.append(_Cell(lv, mass, moment))
        return cells
    for d, lv in enumerate(levels):
        a = max(float(lv), prior.support_lo)
        b = float(levels[d + 1]) if d + 1 < len(levels) else prior.support_hi
        b = min(b, prior.support_hi)
        if b <= a:
            cells.append(_Cell(lv, 0.0, 0.0))
            continue
        mass = float(prior.cdf(b)) - float(prior.cdf(a))
        cells.append(_Cell(lv, mass, prior.expect(lambda v: v, a, b)))
    return cells


@dataclass
class IRSummary:
    member_with: dict = field(default_factory=dict)
    member_without: dict = field(default_factory=dict)
    miner_with: object = 0
    miner_without: object = 0


def expected_utilities(m: GridMechanism, col: Collusion, prior, n: int = 1,
                       cells=None) -> IRSummary:
    """Ex-ante utilities with and without the agreement; values i.i.d. from ``prior``."""
    cells = grid_cells(m.grid, prior) if cells is None else cells
    exact = isinstance(prior, DiscreteDistribution)
    zero = Fraction(0) if exact else 0.0
    conv = (lambda x: x) if exact else float
    out = IRSummary()
    members = [i for i in sorted(col.members) if i < n]
    for i in members:
        out.member_with[i] = zero
        out.member_without[i] = zero
    out.miner_with = zero
    out.miner_without = zero
    ident = identity_collusion()
    for combo in product(cells, repeat=n):
        prob = zero + 1
        for c in combo:
            prob = prob * c.mass
        if prob == 0:
            continue
        bids = tuple(c.bid for c in combo)
        for i in members:
            others = prob / combo[i].mass
            for tag, which in (("with", col), ("without", ident)):
                new, t = which.apply(bids)
                o = _out(m, new)
                win = combo[i].moment * others if o.winner == i else zero
                val = win + prob * conv(t[i] - o.pay[i])
                target = out.member_with if tag == "with" else out.member_without
                target[i] = target[i] + val
        out.miner_with += prob * conv(miner_collusion_utility(m, col, bids, n))
        out.miner_without += prob * conv(miner_collusion_utility(m, ident, bids, n))
    return out


def check_collusion_ir(m: GridMechanism, col: Collusion, prior, n: int = 1) -> AuditReport:
    """Every member and the miner expect at least their no-agreement utility."""
    s = expected_utilities(m, col, prior, n)
    tol = 0 if isinstance(prior, DiscreteDistribution) else FLOAT_TOL
    stats = {"miner_with": s.miner_with, "miner_without": s.miner_without,
             "members_with": dict(s.member_with), "members_without": dict(s.member_without)}
    for i in sorted(s.member_with):
        if s.member_with[i] < s.member_without[i] - tol:
            return AuditReport.fail("IR", Witness(
                (), f"member {i} expects more without the agreement",
                s.member_with[i], s.member_without[i], coalition=(i,)), party="bidder", **stats)
    if s.miner_with < s.miner_without - tol:
        return AuditReport.fail("IR", Witness(
            (), "the miner expects more without the agreement",
            s.miner_with, s.miner_without), party="miner", **stats)
    return AuditReport.ok("IR", **stats)


# ------------------------------------------------------------- composition


def compose(m: GridMechanism, col: Collusion) -> GridMechanism:
    """Single-bidder mechanism a∘c with payment p∘c - t_1 and burn β∘c."""
    if m.n_max != 1:
        raise CompositionUndefined("composition is defined for single-bidder mechanisms only")
    rows = []
    for bids in m.profiles():
        if not bids:
            rows.append(m.outcome(bids))
            continue
        new, t = col.apply(bids)
        o = _out(m, new)
        rows.append(Outcome(o.winner, (o.pay[0] - t[0],), o.burn))
    return m.with_rows(rows, f"{m.name}∘{col.name}")


# ------------------------------------------------------------------ search


@dataclass(frozen=True)
class SearchResult:
    collusion: Collusion
    threshold: object
    target: object
    rebate: object
    miner_gain: object
    bidder_gain: object


def _cheapest_winning_bid(m: GridMechanism):
    wins = [b[0] for b in m.profiles(1) if m.outcome(b).winner == 0]
    return min(wins) if wins else None


def search_ic_ir_collusion(m: GridMechanism, prior, k: int = 1, fake_budget: int = 0,
                           return_all: bool = False):
    """Most profitable (for the miner) IC and IR threshold collusion, or None.

    Candidates rewrite every bid at or above a threshold to the cheapest
    winning bid and pay a constant rebate drawn from grid-level differences.
    They are filtered by ex-post IR, ex-ante IR, a strict expected gain for
    some party, and IC, in that order.
    """
    if m.n_max != 1 or k != 1:
        raise InvalidParams("exact search covers single-bidder mechanisms and k = 1")
    bad = check_basic_properties_quick(m)
    if bad:
        raise InvalidParams(bad)
    target = _cheapest_winning_bid(m)
    if target is None:
        return [] if return_all else None
    levels = m.grid.levels
    rebates = sorted({a - b for a in levels for b in levels if a > b})
    tol = 0 if isinstance(prior, DiscreteDistribution) else FLOAT_TOL
    cells = grid_cells(m.grid, prior)
    found = []
    for theta in levels[1:]:
        if theta >= target:
            continue
        for tau in rebates:
            name = f"lower_price({target}, {theta})" if tau == target - theta else None
            col = threshold_collusion(theta, target, tau, name)
            if _validate(m, col) is not None:
                continue
            s = expected_utilities(m, col, prior, 1, cells)
            if s.miner_with < s.miner_without - tol or s.member_with[0] < s.member_without[0] - tol:
                continue
            mg = s.miner_with - s.miner_without
            bg = s.member_with[0] - s.member_without[0]
            if not (mg > tol or bg > tol):
                continue
            found.append(SearchResult(col, theta, target, tau, mg, bg))
    if return_all:
        return [r for r in found if check_collusion_ic(m, col=r.collusion, fake_budget=fake_budget)]
    # IC is the costly filter: try candidates best-first and stop at the first pass
    for r in sorted(found, key=lambda r: -r.miner_gain):
        if check_collusion_ic(m, r.collusion, fake_budget):
            return r
    return None


def check_basic_properties_quick(m: GridMechanism) -> str | None:
    """Reason the single-bidder mechanism is malformed, if it is."""
    for bids in m.profiles(1):
        o = m.outcome(bids)
        if o.burn[0] > o.pay[0] or o.burn[0] < 0:
            return f"burn {o.burn[0]} exceeds payment {o.pay[0]} at bid {bids[0]}"
    return None
