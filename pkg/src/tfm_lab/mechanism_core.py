"""Deterministic single-item fee mechanisms tabulated on a finite bid lattice."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from ._report import AuditReport, Witness
from .distribution import as_fraction


class InvalidParams(ValueError):
    """Mechanism parameters outside their allowed range."""


@dataclass(frozen=True)
class BidGrid:
    """Allowed bids; level 0 means the bidder is absent."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(as_fraction(x) for x in self.levels)
        if not levels or levels[0] != 0:
            raise InvalidParams("grid must start at 0")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise InvalidParams("grid levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "_digit", {v: d for d, v in enumerate(levels)})

    @classmethod
    def uniform(cls, top=1, steps=10) -> "BidGrid":
        top = as_fraction(top)
        return cls(tuple(top * k / steps for k in range(steps + 1)))

    @property
    def L(self) -> int:
        return len(self.levels)

    def digit(self, bid) -> int:
        try:
            return self._digit[as_fraction(bid)]
        except KeyError:
            raise InvalidParams(f"bid {bid} is not a grid level") from None

    def __contains__(self, bid) -> bool:
        return as_fraction(bid) in self._digit

    def floor_digit(self, value) -> int:
        """Largest level not above ``value``."""
        value = as_fraction(value)
        d = 0
        for k, v in enumerate(self.levels):
            if v <= value:
                d = k
        return d

    def floor(self, value) -> Fraction:
        return self.levels[self.floor_digit(value)]

    def midpoints(self) -> tuple:
        return tuple((a + b) / 2 for a, b in zip(self.levels, self.levels[1:]))

    def __iter__(self):
        return iter(self.levels)


@dataclass(frozen=True)
class Profile:
    """Bids of the n real bidders followed by any miner-injected fakes."""

    real_bids: tuple
    fake_bids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "real_bids", tuple(as_fraction(b) for b in self.real_bids))
        object.__setattr__(self, "fake_bids", tuple(as_fraction(b) for b in self.fake_bids))

    @property
    def n(self) -> int:
        return len(self.real_bids)

    @property
    def bids(self) -> tuple:
        return self.real_bids + self.fake_bids


@dataclass(frozen=True)
class Outcome:
    winner: int | None
    pay: tuple
    burn: tuple

    def paid(self, i):
        return self.pay[i]


Rule = Callable[[tuple], Outcome]


def _profiles(L: int, m: int):
    """Digit tuples of length m in table order (bidder 0 least significant)."""
    for idx in range(L ** m):
        digits = []
        for _ in range(m):
            digits.append(idx % L)
            idx //= L
        yield tuple(digits)


@dataclass(frozen=True)
class GridMechanism:
    """Allocation, payment and burn tabulated for every profile of 0..n_max bids.

    ``rows`` is ordered by length, then by base-L index with bidder 0 the
    least significant digit; ``offsets[m]`` is where length m starts.
    """

    grid: BidGrid
    n_max: int
    rows: tuple
    name: str = "table"
    offsets: tuple = field(init=False, repr=False)

    def __post_init__(self):
        L = self.grid.L
        offs, acc = [], 0
        for m in range(self.n_max + 2):
            offs.append(acc)
            acc += L ** m
        if len(self.rows) != offs[-1]:
            raise InvalidParams(f"expected {offs[-1]} rows, got {len(self.rows)}")
        object.__setattr__(self, "offsets", tuple(offs))

    @classmethod
    def from_rule(cls, grid: BidGrid, n_max: int, rule: Rule, name: str = "rule") -> "GridMechanism":
        rows = []
        for m in range(n_max + 1):
            for digits in _profiles(grid.L, m):
                bids = tuple(grid.levels[d] for d in digits)
                rows.append(_normalize(rule(bids), m))
        return cls(grid, n_max, tuple(rows), name)

    def row_index(self, bids: Sequence) -> int:
        m = len(bids)
        if m > self.n_max:
            raise InvalidParams(f"{m} bids exceed n_max={self.n_max}")
        idx, place = 0, 1
        for b in bids:
            idx += self.grid.digit(b) * place
            place *= self.grid.L
        return self.offsets[m] + idx

    def outcome(self, bids) -> Outcome:
        if isinstance(bids, Profile):
            bids = bids.bids
        return self.rows[self.row_index(tuple(bids))]

    def profiles(self, m: int | None = None) -> Iterable[tuple]:
        """Bid tuples in table order, of one length or of all lengths."""
        lengths = range(self.n_max + 1) if m is None else (m,)
        for k in lengths:
            for digits in _profiles(self.grid.L, k):
                yield tuple(self.grid.levels[d] for d in digits)

    def with_rows(self, rows, name=None) -> "GridMechanism":
        return GridMechanism(self.grid, self.n_max, tuple(rows), name or self.name)


def _normalize(out, m: int) -> Outcome:
    if isinstance(out, Outcome):
        winner, pay, burn = out.winner, out.pay, out.burn
    else:
        winner, pay, burn = out
    zero = Fraction(0)
    pay = tuple(as_fraction(x) for x in pay) if pay is not None else (zero,) * m
    burn = tuple(as_fraction(x) for x in burn) if burn is not None else (zero,) * m
    if len(pay) != m or len(burn) != m:
        raise InvalidParams(f"payment/burn vectors must have length {m}")
    return Outcome(winner, pay, burn)


def bidder_utility(m: GridMechanism, prof, i: int, v_i):
    """v_i [i wins] - p_i."""
    out = m.outcome(prof)
    return (as_fraction(v_i) if out.winner == i else 0) - out.pay[i]


def miner_utility(m: GridMechanism, prof: Profile):
    """Net of real bidders' payments over burns, minus burns on fake bids."""
    out = m.outcome(prof)
    n = prof.n if isinstance(prof, Profile) else len(prof)
    return sum((out.pay[i] - out.burn[i] if i < n else -out.burn[i]
                for i in range(len(out.pay))), Fraction(0))


def joint_utility(m: GridMechanism, prof: Profile, valuations, coalition):
    total = miner_utility(m, prof)
    for i in coalition:
        total += bidder_utility(m, prof, i, valuations[i])
    return total


def _highest(bids):
    """Index of the highest nonzero bid, lowest index on ties."""
    best = None
    for i, b in enumerate(bids):
        if b > 0 and (best is None or b > bids[best]):
            best = i
    return best


def _kth_bid(bids, k):
    ordered = sorted((b for b in bids if b > 0), reverse=True)
    return ordered[k - 1] if len(ordered) >= k else Fraction(0)


def _vec(m, i, x):
    out = [Fraction(0)] * m
    if i is not None:
        out[i] = x
    return tuple(out)


def posted_price_rule(price, burn=0) -> Rule:
    """The first bidder (by index) bidding at least ``price`` wins and pays it.

    Priority by index keeps the rule truthful with several bidders; letting the
    highest bid win would reward overbidding.
    """
    price, burn = as_fraction(price), as_fraction(burn)
    if burn > price or burn < 0:
        raise InvalidParams(f"need 0 <= burn <= price, got price={price}, burn={burn}")

    def rule(bids):
        w = next((i for i, b in enumerate(bids) if b > 0 and b >= price), None)
        return w, _vec(len(bids), w, price), _vec(len(bids), w, burn)
    return rule


def kth_price_rule(k: int, burn=0) -> Rule:
    """Highest bid wins and pays the k-th highest bid (1 = first price)."""
    burn = as_fraction(burn)

    def rule(bids):
        w = _highest(bids)
        if w is None:
            return None, None, None
        pay = bids[w] if k == 1 else _kth_bid(bids, k)
        return w, _vec(len(bids), w, pay), _vec(len(bids), w, min(burn, pay))
    return rule


def second_price_reserve_rule(reserve, burn=0) -> Rule:
    """Highest bid at or above the reserve wins, pays max(reserve, second bid)."""
    reserve, burn = as_fraction(reserve), as_fraction(burn)
    if burn > reserve:
        raise InvalidParams("burn exceeds reserve")

    def rule(bids):
        w = _highest(bids)
        if w is None or bids[w] < reserve:
            return None, None, None
        pay = max(reserve, _kth_bid(bids, 2))
        return w, _vec(len(bids), w, pay), _vec(len(bids), w, burn)
    return rule


DEFAULT_N_MAX = 3


def builtin_mechanism(kind: str, grid: BidGrid | None = None, n_max: int = DEFAULT_N_MAX,
                      **params) -> GridMechanism:
    """Named mechanisms: posted_price(price, burn), posted_burn(burn),
    first_price, second_price, third_price, second_price_reserve(reserve, burn)."""
    grid = grid or BidGrid.uniform()
    if kind == "posted_price":
        rule = posted_price_rule(params["price"], params.get("burn", 0))
        name = f"posted_price({params['price']},{params.get('burn', 0)})"
    elif kind == "posted_burn":
        rule = posted_price_rule(params["burn"], params["burn"])
        name = f"posted_burn({params['burn']})"
    elif kind in ("first_price", "second_price", "third_price"):
        k = {"first_price": 1, "second_price": 2, "third_price": 3}[kind]
        rule = kth_price_rule(k, params.get("burn", 0))
        name = kind
    elif kind == "second_price_reserve":
        rule = second_price_reserve_rule(params["reserve"], params.get("burn", 0))
        name = f"second_price_reserve({params['reserve']},{params.get('burn', 0)})"
    else:
        raise InvalidParams(f"unknown mechanism kind {kind!r}")
    return GridMechanism.from_rule(grid, n_max, rule, name)


def check_basic_properties(m: GridMechanism) -> AuditReport:
    """EPIR, burn balance and anonymity on tie-free profiles, exhaustively."""
    for bids in m.profiles():
        out = m.outcome(bids)
        n = len(bids)
        w = out.winner
        if w is not None and not (0 <= w < n and bids[w] > 0):
            return AuditReport.fail("BASIC", Witness(bids, f"winner {w} is absent", 0, 1))
        for i in range(n):
            p, b = out.pay[i], out.burn[i]
            if i != w and p != 0:
                return AuditReport.fail("BASIC", Witness(bids, f"loser {i} pays {p}", 0, p))
            if i == w and p > bids[i]:
                return AuditReport.fail("BASIC", Witness(bids, f"winner {i} pays {p} above bid", bids[i], p))
            if not (0 <= b <= p):
                return AuditReport.fail("BASIC", Witness(bids, f"burn {b} outside [0, {p}] for {i}", p, b))
        nonzero = [b for b in bids if b > 0]
        if len(set(nonzero)) != len(nonzero):
            continue
        for i in range(n - 1):
            swapped = list(bids)
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            o2 = m.outcome(tuple(swapped))
            perm = {i: i + 1, i + 1: i}
            mapped_w = perm.get(w, w) if w is not None else None
            pay2 = list(out.pay)
            pay2[i], pay2[i + 1] = pay2[i + 1], pay2[i]
            burn2 = list(out.burn)
            burn2[i], burn2[i + 1] = burn2[i + 1], burn2[i]
            if o2.winner != mapped_w or list(o2.pay) != pay2 or list(o2.burn) != burn2:
                return AuditReport.fail(
                    "BASIC", Witness(bids, f"swapping bidders {i},{i + 1} is not equivariant", 0, 1))
    return AuditReport.ok("BASIC")
