"""Exhaustive incentive audits on grid mechanisms and a brute-force
enumeration of small mechanism spaces.

Every audit scales the mechanism's rational tables to integers and hands the
loops to the kernel backend. Valuations for the coalition audits range over
the grid levels, or with ``midpoints=True`` also over the midpoints between
them (values live on a continuum, bids on the grid); honest bidders bid the
largest level not above their value.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import _kernels
from ._numerics import thread_cap
from ._report import AuditReport, Witness
from .distribution import as_fraction
from .mechanism_core import BidGrid, GridMechanism, InvalidParams, Outcome

DEFAULT_FAKE_BUDGET = 2


def _lcm(xs) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


@dataclass
class Encoded:
    """Integer image of a mechanism's tables (all money multiplied by ``D``)."""

    D: int
    L: int
    n_max: int
    levels: object
    winner: object
    pay: object
    burn: object
    offsets: object
    python: bool = False
    vals: object = None
    vfloor: object = None
    val_fracs: tuple = ()

    def kernel(self, name):
        return _kernels.get(name, force_python=self.python)


def _valuation_domain(levels: tuple) -> tuple:
    mids = [(a + b) / 2 for a, b in zip(levels, levels[1:])]
    above = levels[-1] + (levels[-1] - levels[-2]) / 2 if len(levels) > 1 else Fraction(1, 2)
    return tuple(sorted(set(levels) | set(mids) | {above}))


def encode(m: GridMechanism, midpoints: bool = False) -> Encoded:
    levels = m.grid.levels
    money = set(levels)
    for row in m.rows:
        money.update(row.pay)
        money.update(row.burn)
    D = 2 * _lcm(Fraction(x).denominator for x in money)
    vals = _valuation_domain(levels) if midpoints else tuple(levels)
    scaled_top = max(abs(x) for x in money) * D * (m.n_max + 2)
    python = scaled_top >= _kernels.INT64_SAFE or _kernels.BACKEND == "python"
    n_rows = len(m.rows)
    winner = [-1] * n_rows
    pay = [0] * (n_rows * max(m.n_max, 1))
    burn = [0] * (n_rows * max(m.n_max, 1))
    for r, out in enumerate(m.rows):
        winner[r] = -1 if out.winner is None else out.winner
        for i, (p, b) in enumerate(zip(out.pay, out.burn)):
            pay[r * m.n_max + i] = int(p * D)
            burn[r * m.n_max + i] = int(b * D)
    ints = [int(x * D) for x in levels]
    vints = [int(x * D) for x in vals]
    vfloor = [max(d for d, lv in enumerate(levels) if lv <= v) for v in vals]
    wrap = (lambda a: list(a)) if python else (lambda a: np.asarray(a, dtype=np.int64))
    return Encoded(D, m.grid.L, m.n_max, wrap(ints), wrap(winner), wrap(pay), wrap(burn),
                   wrap(list(m.offsets)), python, wrap(vints), wrap(vfloor), vals)


def _digits(idx: int, base: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(idx % base)
        idx //= base
    return out


def _bids(m: GridMechanism, idx: int, length: int) -> tuple:
    return tuple(m.grid.levels[d] for d in _digits(idx, m.grid.L, length))


def _first_hit(jobs):
    """Run thunks concurrently; return the first non-None result in job order."""
    jobs = list(jobs)
    workers = min(thread_cap(), len(jobs))
    if workers <= 1:
        for job in jobs:
            res = job()
            if res is not None:
                return res
        return None
    with ThreadPoolExecutor(workers) as pool:
        for res in pool.map(lambda j: j(), jobs):
            if res is not None:
                return res
    return None


def _lengths(m: GridMechanism, lengths):
    return range(1, m.n_max + 1) if lengths is None else sorted(lengths)


def audit_dsic(m: GridMechanism, lengths=None) -> AuditReport:
    """Truthful bidding is weakly dominant for every grid value and opponent profile."""
    enc = encode(m)
    scan = enc.kernel("dsic_scan")

    def job(n):
        return lambda: (lambda r: None if r is None else (n, r))(
            scan(enc.levels, enc.winner, enc.pay, enc.offsets, enc.L, enc.n_max, n))

    hit = _first_hit(job(n) for n in _lengths(m, lengths))
    if hit is None:
        return AuditReport.ok("DSIC", backend=_backend(enc))
    n, (idx, i, dd, honest, dev) = hit
    bids = _bids(m, idx, n)
    dev_bids = list(bids)
    dev_bids[i] = m.grid.levels[dd]
    w = Witness(bids, f"bidder {i} with value {bids[i]} bids {m.grid.levels[dd]}",
                Fraction(honest, enc.D), Fraction(dev, enc.D), tuple(dev_bids),
                valuations=bids, coalition=(i,))
    return AuditReport.fail("DSIC", w, backend=_backend(enc))


def _backend(enc: Encoded) -> str:
    return "python" if enc.python else _kernels.BACKEND


def _group_profiles(m: GridMechanism, profiles):
    """Table indices of the given real profiles, grouped by length."""
    groups: dict[int, list[int]] = {}
    for bids in profiles:
        r = m.row_index(tuple(bids))
        n = len(bids)
        groups.setdefault(n, []).append(r - m.offsets[n])
    return groups


def audit_mmic(m: GridMechanism, fake_budget: int = DEFAULT_FAKE_BUDGET, profiles=None,
               lengths=None) -> AuditReport:
    """The miner cannot gain by omitting real bids or injecting fake ones.

    Fake bids are nonzero grid levels appended after the real bids, at most
    ``fake_budget`` of them and never beyond ``n_max`` bids in total.
    """
    if fake_budget < 0:
        raise InvalidParams("fake budget must be non-negative")
    enc = encode(m)
    scan = enc.kernel("mmic_scan")
    if profiles is None:
        groups = {n: list(range(m.grid.L ** n)) for n in _lengths(m, lengths)}
    else:
        groups = _group_profiles(m, profiles)

    def job(n, idxs):
        arr = idxs if enc.python else np.asarray(idxs, dtype=np.int64)

        def run():
            r = scan(enc.levels, enc.winner, enc.pay, enc.burn, enc.offsets, enc.L,
                     enc.n_max, n, fake_budget, arr)
            return None if r is None else (n, r)
        return run

    hit = _first_hit(job(n, groups[n]) for n in sorted(groups))
    if hit is None:
        return AuditReport.ok("MMIC", fake_budget=fake_budget, backend=_backend(enc))
    n, (idx, mask, k, code, honest, dev) = hit
    bids = _bids(m, idx, n)
    dev_bids = _bids(m, code, n + k)
    omitted = [i for i in range(n) if not mask >> i & 1 and bids[i] != 0]
    fakes = dev_bids[n:]
    parts = []
    if omitted:
        parts.append(f"omit bidders {omitted}")
    if fakes:
        parts.append("add fake bids " + ", ".join(str(f) for f in fakes))
    w = Witness(bids, "; ".join(parts) or "reorder", Fraction(honest, enc.D), Fraction(dev, enc.D),
                dev_bids, fakes=fakes)
    return AuditReport.fail("MMIC", w, fake_budget=fake_budget, backend=_backend(enc))


def _valcodes(enc: Encoded, n: int, valuations):
    V = len(enc.val_fracs)
    if valuations is None:
        return list(range(V ** n))
    where = {v: k for k, v in enumerate(enc.val_fracs)}
    codes = []
    for vec in valuations:
        if len(vec) != n:
            continue
        code, place = 0, 1
        for v in vec:
            v = as_fraction(v)
            if v not in where:
                raise InvalidParams(f"valuation {v} is outside the audited valuation domain")
            code += where[v] * place
            place *= V
        codes.append(code)
    return codes


def _valuation_lengths(m, valuations, lengths):
    if valuations is not None:
        return sorted({len(v) for v in valuations})
    return list(_lengths(m, lengths))


def _decode_vals(enc: Encoded, code: int, n: int) -> tuple:
    return tuple(enc.val_fracs[d] for d in _digits(code, len(enc.val_fracs), n))


def _honest_rows(enc: Encoded, n: int, codes) -> list[int]:
    """Length-n profile index bid under honest play, per valuation code.

    Bidders bid their value floored to the grid. A bidder valued strictly
    between 0 and the lowest positive level would floor to 0 and so stay
    out; it bids the lowest level instead when that wins at positive
    utility against the others' honest bids (bidders settle in index order).
    """
    V, L, n_max = len(enc.val_fracs), enc.L, enc.n_max
    vfloor = [int(x) for x in enc.vfloor]
    vals = [int(x) for x in enc.vals]
    low = [k for k, v in enumerate(enc.val_fracs) if 0 < v and vfloor[k] == 0]
    base = int(enc.offsets[n])
    out = []
    for code in codes:
        vdig = _digits(code, V, n)
        h = _splice_mask([vfloor[d] for d in vdig], (1 << n) - 1, L)
        for i, d in enumerate(vdig):
            if d in low:
                alt = h + L ** i
                row = base + alt
                u = (vals[d] if enc.winner[row] == i else 0) - enc.pay[row * n_max + i]
                if u > 0:
                    h = alt
        out.append(h)
    return out


def audit_oca(m: GridMechanism, fake_budget: int = DEFAULT_FAKE_BUDGET, valuations=None,
              lengths=None, midpoints: bool = False) -> AuditReport:
    """Honest play maximizes the joint utility of the miner and all bidders.

    For each valuation vector the honest outcome is every bidder bidding its
    value floored to the grid (see ``_honest_rows`` for values below the
    lowest level) with the miner including all bids. A failure is
    any reachable profile (real bids anywhere on the grid plus fakes) whose
    joint utility is strictly higher.
    """
    enc = encode(m, midpoints)
    scan = enc.kernel("oca_scan")

    def job(n):
        codes = _valcodes(enc, n, valuations)
        honest = _honest_rows(enc, n, codes)
        arr, harr = (codes, honest) if enc.python else (
            np.asarray(codes, dtype=np.int64), np.asarray(honest, dtype=np.int64))

        def run():
            r = scan(enc.vals, harr, enc.winner, enc.pay, enc.burn, enc.offsets,
                     enc.L, enc.n_max, n, fake_budget, arr)
            return None if r is None else (n, r)
        return run

    hit = _first_hit(job(n) for n in _valuation_lengths(m, valuations, lengths))
    if hit is None:
        return AuditReport.ok("OCA", fake_budget=fake_budget, backend=_backend(enc))
    n, (code, honest, best, dev_len, dev_idx) = hit
    vals = _decode_vals(enc, code, n)
    dev_bids = _bids(m, dev_idx, dev_len)
    honest_bids = _bids(m, _honest_rows(enc, n, [code])[0], n)
    w = Witness(honest_bids, f"coalition of miner and all bidders plays {_tuple_str(dev_bids)}",
                Fraction(honest, enc.D), Fraction(best, enc.D), dev_bids, valuations=vals,
                coalition=tuple(range(n)), fakes=dev_bids[n:])
    return AuditReport.fail("OCA", w, fake_budget=fake_budget, backend=_backend(enc))


def _tuple_str(xs) -> str:
    return "(" + ", ".join(str(x) for x in xs) + ")"


def coalitions_up_to(n: int, c: int) -> list[int]:
    """Bitmasks of nonempty bidder subsets of size <= c, smallest first."""
    out = []
    for size in range(1, min(c, n) + 1):
        for members in combinations(range(n), size):
            out.append(sum(1 << i for i in members))
    return out


def audit_scp(m: GridMechanism, c: int, fake_budget: int = DEFAULT_FAKE_BUDGET, valuations=None,
              lengths=None, midpoints: bool = False) -> AuditReport:
    """No coalition of the miner and at most ``c`` bidders gains by deviating.

    Honest play is every bidder bidding its value floored to the grid (see
    ``_honest_rows``) and the miner including all bids. The coalition may move its members' bids
    anywhere on the grid (0 withdraws), omit outsiders and add fakes.
    Deviations with an honest miner are searched first.
    """
    if c < 1 or c > m.n_max:
        raise InvalidParams(f"coalition size c must be in 1..{m.n_max}")
    enc = encode(m, midpoints)
    scan = enc.kernel("scp_scan")

    def job(n):
        codes = _valcodes(enc, n, valuations)
        honest = _honest_rows(enc, n, codes)
        arr, harr = (codes, honest) if enc.python else (
            np.asarray(codes, dtype=np.int64), np.asarray(honest, dtype=np.int64))
        coal = coalitions_up_to(n, c)
        carr = coal if enc.python else np.asarray(coal, dtype=np.int64)

        def run():
            r = scan(enc.vals, harr, enc.winner, enc.pay, enc.burn, enc.offsets,
                     enc.L, enc.n_max, n, fake_budget, carr, arr)
            return None if r is None else (n, r)
        return run

    prop = f"SCP({c})"
    hit = _first_hit(job(n) for n in _valuation_lengths(m, valuations, lengths))
    if hit is None:
        return AuditReport.ok(prop, fake_budget=fake_budget, backend=_backend(enc))
    n, (code, S, dev_len, dev_idx, honest, dev) = hit
    vals = _decode_vals(enc, code, n)
    members = tuple(i for i in range(n) if S >> i & 1)
    honest_bids = _bids(m, _honest_rows(enc, n, [code])[0], n)
    dev_bids = _bids(m, dev_idx, dev_len)
    moves = [f"bidder {i} bids {dev_bids[i]}" for i in range(n) if dev_bids[i] != honest_bids[i]]
    if dev_len > n:
        moves.append("fakes " + _tuple_str(dev_bids[n:]))
    w = Witness(honest_bids, "; ".join(moves), Fraction(honest, enc.D), Fraction(dev, enc.D),
                dev_bids, valuations=vals, coalition=members, fakes=dev_bids[n:])
    return AuditReport.fail(prop, w, fake_budget=fake_budget, backend=_backend(enc))


def dsic_by_characterization(m: GridMechanism) -> AuditReport:
    """DSIC through its structure: for every bidder and opponent profile the
    allocation is monotone in the own bid, losers pay nothing and winners pay
    one constant lying between the critical level and the level below it."""
    levels = m.grid.levels
    L = m.grid.L
    for n in range(1, m.n_max + 1):
        for i in range(n):
            for rest in product(range(L), repeat=n - 1):
                outs = []
                for d in range(L):
                    digits = list(rest[:i]) + [d] + list(rest[i:])
                    outs.append(m.outcome(tuple(levels[x] for x in digits)))
                won = [o.winner == i for o in outs]
                base = tuple(levels[x] for x in (list(rest[:i]) + [0] + list(rest[i:])))
                if any(won[d] and not won[d + 1] for d in range(L - 1)):
                    d = next(d for d in range(L - 1) if won[d] and not won[d + 1])
                    return _char_fail(base, i, f"allocation drops between bids {levels[d]} and {levels[d + 1]}")
                for d, o in enumerate(outs):
                    if not won[d] and o.pay[i] != 0:
                        return _char_fail(base, i, f"loser pays {o.pay[i]} at bid {levels[d]}")
                if not any(won):
                    continue
                k = won.index(True)
                pays = {outs[d].pay[i] for d in range(k, L)}
                if len(pays) != 1:
                    return _char_fail(base, i, "winning payment depends on own bid")
                p = pays.pop()
                lo = levels[k - 1] if k > 0 else levels[0]
                if not lo <= p <= levels[k]:
                    return _char_fail(base, i, f"payment {p} outside [{lo}, {levels[k]}]")
    return AuditReport.ok("DSIC-char")


def _char_fail(bids, i, why) -> AuditReport:
    return AuditReport.fail("DSIC-char", Witness(bids, f"bidder {i}: {why}", 0, 1, coalition=(i,)))


# ---------------------------------------------------------------- enumeration


@dataclass
class EnumerationSummary:
    levels: tuple
    n: int
    allocation_tables: dict = field(default_factory=dict)
    monotone_tables: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)
    pruned: dict = field(default_factory=dict)
    mechanisms: int = 0
    survivors: list = field(default_factory=list)
    max_revenue: Fraction = Fraction(0)
    min_revenue: Fraction = Fraction(0)
    fixed_winner: bool = True
    all_posted_burn: bool | None = None
    posted_burn_survivors: int = 0

    @property
    def survivor_count(self) -> int:
        return len(self.survivors)

    def line(self) -> str:
        return f"survivors: {self.survivor_count}, max revenue: {self.max_revenue}"

    def __str__(self) -> str:
        rows = [f"levels {_tuple_str(self.levels)}, bidders up to {self.n}"]
        for m in sorted(self.allocation_tables):
            rows.append(
                f"  length {m}: {self.allocation_tables[m]} allocation tables, "
                f"{self.monotone_tables[m]} monotone, {self.candidates[m]} with payments and burns, "
                f"{self.pruned[m]} pass single-length MMIC+OCA")
        rows.append(f"  mechanisms audited: {self.mechanisms}")
        rows.append(f"  fixed winner per bidder count: {self.fixed_winner}")
        if self.all_posted_burn is not None:
            rows.append(f"  survivors all posted-burn: {self.all_posted_burn}")
        rows.append(self.line())
        return "\n".join(rows)


def _length_candidates(levels, m: int):
    """Monotone allocations with critical-level payments and burn in {0, pay}.

    Yields (winner, pay, burn) lists over the L^m profiles of length m, plus
    the raw and monotone allocation counts as the first item.
    """
    L = len(levels)
    profiles = [_digits(idx, L, m) for idx in range(L ** m)]
    options = [[None] + [i for i in range(m) if p[i] > 0] for p in profiles]
    raw = 1
    for o in options:
        raw *= len(o)
    monotone = []
    for alloc in product(*options):
        if _monotone(alloc, profiles, L, m):
            monotone.append(alloc)
    yield raw, len(monotone)
    for alloc in monotone:
        # one payment choice per (bidder, opponent profile) that ever wins
        slots = {}
        for idx, w in enumerate(alloc):
            if w is None:
                continue
            key = (w, tuple(d for j, d in enumerate(profiles[idx]) if j != w))
            if key not in slots:
                k = min(d for d in range(L)
                        if alloc[_splice(profiles[idx], w, d, L)] == w)
                slots[key] = (levels[k - 1] if k > 0 else levels[0], levels[k])
        keys = list(slots)
        winners = [idx for idx, w in enumerate(alloc) if w is not None]
        for choice in product(*[sorted(set(slots[k])) for k in keys]):
            price = dict(zip(keys, choice))
            pays = {}
            for idx in winners:
                w = alloc[idx]
                pays[idx] = price[(w, tuple(d for j, d in enumerate(profiles[idx]) if j != w))]
            burn_opts = [sorted({0, pays[idx]}) for idx in winners]
            for burns in product(*burn_opts):
                yield alloc, pays, dict(zip(winners, burns))


def _splice(digits, i, d, L) -> int:
    idx, place = 0, 1
    for j, x in enumerate(digits):
        idx += (d if j == i else x) * place
        place *= L
    return idx


def _monotone(alloc, profiles, L, m) -> bool:
    for idx, w in enumerate(alloc):
        if w is None:
            continue
        d = profiles[idx][w]
        if d + 1 < L and alloc[_splice(profiles[idx], w, d + 1, L)] != w:
            return False
    return True


def _prune_length(grid: BidGrid, m_len: int, cands, midpoints: bool = True):
    """Indices of candidates passing omission-only MMIC and fake-free OCA at one length.

    Vectorized over candidates: only the winner pays or burns, so a
    candidate is fully described by its winner, payment and burn columns.
    """
    levels = grid.levels
    L = grid.L
    vals = _valuation_domain(levels) if midpoints else tuple(levels)
    money = set(levels) | set(vals)
    D = 2 * _lcm(Fraction(x).denominator for x in money)
    R = L ** m_len
    C = len(cands)
    W = np.full((C, R), -1, dtype=np.int64)
    P = np.zeros((C, R), dtype=np.int64)
    B = np.zeros((C, R), dtype=np.int64)
    for c, (alloc, pays, burns) in enumerate(cands):
        for idx, w in enumerate(alloc):
            if w is not None:
                W[c, idx] = w
                P[c, idx] = int(pays[idx] * D)
                B[c, idx] = int(burns[idx] * D)
    ok = np.ones(C, dtype=bool)
    miner = P - B
    profiles = [_digits(idx, L, m_len) for idx in range(R)]
    for idx, digits in enumerate(profiles):
        for mask in range(1 << m_len):
            kept = _splice_mask(digits, mask, L)
            if kept != idx:
                ok &= miner[:, kept] <= miner[:, idx]
    vints = np.array([int(v * D) for v in vals], dtype=np.int64)
    vfloor = [max(d for d, lv in enumerate(levels) if lv <= v) for v in vals]
    Wc = np.maximum(W, 0)
    rows = np.arange(C)
    for code in range(len(vals) ** m_len):
        vdig = _digits(code, len(vals), m_len)
        per_bidder = vints[vdig]
        joint = np.where(W >= 0, per_bidder[Wc], 0) - B
        # same honest profile as _honest_rows, per candidate
        h = np.full(C, _splice_mask([vfloor[d] for d in vdig], (1 << m_len) - 1, L))
        for i, d in enumerate(vdig):
            if vals[d] > 0 and vfloor[d] == 0:
                alt = h + L ** i
                u = np.where(W[rows, alt] == i, vints[d] - P[rows, alt], 0)
                h = np.where(u > 0, alt, h)
        ok &= joint.max(axis=1) <= joint[rows, h]
    return np.nonzero(ok)[0]


def _splice_mask(digits, mask, L) -> int:
    idx, place = 0, 1
    for j, x in enumerate(digits):
        if mask >> j & 1:
            idx += x * place
        place *= L
    return idx


MAX_CANDIDATES = 1_000_000


def enumerate_zero_revenue(grid, n: int, fake_budget: int | None = None,
                           max_candidates: int = MAX_CANDIDATES) -> EnumerationSummary:
    """Audit every small DSIC mechanism for MMIC and OCA and summarize survivors.

    Per bidder count m the space is all monotone allocation tables with a
    critical-level payment per opponent profile and burn 0 or equal to the
    payment. Valuations include grid midpoints and one value above the top
    level, so a price above the lowest level can be undercut by a buyer
    valued between levels. Tables failing omission-only MMIC or fake-free
    OCA at their own length are dropped first; the cross product over
    lengths 1..n then gets the full DSIC, MMIC and OCA audits with fakes.
    """
    grid = grid if isinstance(grid, BidGrid) else BidGrid(tuple(grid))
    if n < 1:
        raise InvalidParams("need at least one bidder")
    levels = grid.levels
    budget = n - 1 if fake_budget is None else fake_budget
    summary = EnumerationSummary(levels, n)
    per_length = {}
    for m_len in range(1, n + 1):
        gen = _length_candidates(levels, m_len)
        raw, mono = next(gen)
        summary.allocation_tables[m_len] = raw
        summary.monotone_tables[m_len] = mono
        cands = []
        for cand in gen:
            cands.append(cand)
            if len(cands) > max_candidates:
                raise InvalidParams(
                    f"more than {max_candidates} candidate tables at {m_len} bidders; "
                    "use fewer levels or bidders")
        keep = _prune_length(grid, m_len, cands)
        summary.candidates[m_len] = len(cands)
        summary.pruned[m_len] = len(keep)
        per_length[m_len] = [_rows_for(*cands[k], m_len) for k in keep]

    empty = [Outcome(None, (), ())]
    combos = list(product(*[per_length[k] for k in range(1, n + 1)]))
    summary.mechanisms = len(combos)

    def audit(combo):
        rows = list(empty)
        for part in combo:
            rows.extend(part)
        mech = GridMechanism(grid, n, tuple(rows), "enumerated")
        if not audit_dsic(mech):
            return None
        if not audit_mmic(mech, budget):
            return None
        if not audit_oca(mech, budget, midpoints=True):
            return None
        return mech

    for combo in combos:
        mech = audit(combo)
        if mech is not None:
            summary.survivors.append(mech)

    revs = [_miner_revenue(mech, bids) for mech in summary.survivors for bids in mech.profiles()]
    summary.max_revenue = max(revs, default=Fraction(0))
    summary.min_revenue = min(revs, default=Fraction(0))
    summary.fixed_winner = all(_fixed_winner(mech) for mech in summary.survivors)
    if n == 1:
        flags = [_is_posted_burn(mech) for mech in summary.survivors]
        summary.all_posted_burn = all(flags)
        summary.posted_burn_survivors = sum(flags)
    return summary


def _rows_for(alloc, pays, burns, m_len):
    rows = []
    for idx, w in enumerate(alloc):
        pay = [Fraction(0)] * m_len
        burn = [Fraction(0)] * m_len
        if w is not None:
            pay[w] = Fraction(pays[idx])
            burn[w] = Fraction(burns[idx])
        rows.append(Outcome(w, tuple(pay), tuple(burn)))
    return rows


def _miner_revenue(mech: GridMechanism, bids) -> Fraction:
    out = mech.outcome(bids)
    return sum((p - b for p, b in zip(out.pay, out.burn)), Fraction(0))


def _fixed_winner(mech: GridMechanism) -> bool:
    for m_len in range(1, mech.n_max + 1):
        winners = {mech.outcome(b).winner for b in mech.profiles(m_len)} - {None}
        if len(winners) > 1:
            return False
    return True


def _is_posted_burn(mech: GridMechanism) -> bool:
    allocated = [(b[0], mech.outcome(b)) for b in mech.profiles(1)]
    wins = [bid for bid, o in allocated if o.winner == 0]
    if wins and any(bid >= min(wins) and o.winner != 0 for bid, o in allocated):
        return False
    prices = {(o.pay[0], o.burn[0]) for _, o in allocated if o.winner == 0}
    return len(prices) <= 1 and all(p == b for p, b in prices)
