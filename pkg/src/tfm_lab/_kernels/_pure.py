"""Reference implementation of the exhaustive audit loops.

Every routine works on integer-scaled mechanism tables:

* ``levels[d]`` is the scaled bid of grid digit ``d`` (``levels[0] == 0``).
* Profiles of length ``m`` are indexed in base ``L`` with bidder 0 as the
  least significant digit; table rows for length ``m`` start at
  ``offsets[m]``.
* ``winner[row]`` is the allocated position or ``-1``; ``pay`` and ``burn``
  are flattened ``row * n_max + position``.
* ``vals`` lists the valuation domain (grid levels and midpoints) and
  ``honest[c]`` is the index of the length-n profile bid under honest play
  for the c-th valuation code.

The compiled module ``_native`` mirrors these signatures exactly. Arguments
may be numpy arrays or lists; Python ints are used internally so oversized
scales cannot overflow here.
"""
from itertools import product


def _as_list(a):
    return a.tolist() if hasattr(a, "tolist") else list(a)


def _miner(winner, pay, burn, n_max, row, m, n):
    total = 0
    for i in range(m):
        if i < n:
            total += pay[row * n_max + i] - burn[row * n_max + i]
        else:
            total -= burn[row * n_max + i]
    return total


def dsic_scan(levels, winner, pay, offsets, L, n_max, n):
    """First ``(idx, bidder, dev_digit, honest, deviant)`` violating DSIC."""
    levels, winner, pay, offsets = map(_as_list, (levels, winner, pay, offsets))
    base = offsets[n]
    for idx in range(L ** n):
        w = winner[base + idx]
        rem = idx
        place = 1
        for i in range(n):
            d = rem % L
            rem //= L
            v = levels[d]
            honest = (v if w == i else 0) - pay[(base + idx) * n_max + i]
            for dd in range(L):
                if dd == d:
                    continue
                j = base + idx + (dd - d) * place
                u = (v if winner[j] == i else 0) - pay[j * n_max + i]
                if u > honest:
                    return (idx, i, dd, honest, u)
            place *= L
    return None


def mmic_scan(levels, winner, pay, burn, offsets, L, n_max, n, budget, profiles):
    """First ``(idx, keep_mask, n_fakes, dev_row_idx, honest, deviant)``."""
    winner, pay, burn, offsets = map(_as_list, (winner, pay, burn, offsets))
    max_fakes = min(budget, n_max - n)
    for idx in _as_list(profiles):
        honest = _miner(winner, pay, burn, n_max, offsets[n] + idx, n, n)
        digits = []
        rem = idx
        for _ in range(n):
            digits.append(rem % L)
            rem //= L
        for mask in range(1 << n):
            kept = 0
            place = 1
            for i in range(n):
                if mask >> i & 1:
                    kept += digits[i] * place
                place *= L
            for k in range(max_fakes + 1):
                if k == 0 and mask == (1 << n) - 1:
                    continue
                for fakes in product(range(1, L), repeat=k):
                    code = kept
                    fp = L ** n
                    for f in fakes:
                        code += f * fp
                        fp *= L
                    dev = _miner(winner, pay, burn, n_max, offsets[n + k] + code, n + k, n)
                    if dev > honest:
                        return (idx, mask, k, code, honest, dev)
    return None


def _joint_tables(winner, burn, offsets, L, n_max, n, budget):
    """Rows reachable by real bids plus nonzero fakes: (m, idx, winner, burn sum)."""
    rows = []
    for m in range(n, min(n + budget, n_max) + 1):
        base = offsets[m]
        for idx in range(L ** m):
            rem = idx // (L ** n)
            ok = True
            for _ in range(m - n):
                if rem % L == 0:
                    ok = False
                    break
                rem //= L
            if not ok:
                continue
            row = base + idx
            bs = 0
            for i in range(m):
                bs += burn[row * n_max + i]
            rows.append((m, idx, winner[row], bs))
    return rows


def oca_scan(vals, honest, winner, pay, burn, offsets, L, n_max, n, budget, valcodes):
    """First valuation code where some reachable profile beats honest play
    on the joint utility of the miner and all bidders.

    Returns ``(code, honest, deviant, dev_len, dev_idx)``.
    """
    vals, honest, winner, burn, offsets = map(_as_list, (vals, honest, winner, burn, offsets))
    V = len(vals)
    rows = _joint_tables(winner, burn, offsets, L, n_max, n, budget)
    honest_rows = {(m, idx): (w, bs) for m, idx, w, bs in rows if m == n}
    for c, code in enumerate(_as_list(valcodes)):
        vdig = []
        rem = code
        for _ in range(n):
            vdig.append(rem % V)
            rem //= V
        w, bs = honest_rows[(n, honest[c])]
        base = (vals[vdig[w]] if 0 <= w < n else 0) - bs
        for m, idx, w, bs in rows:
            j = (vals[vdig[w]] if 0 <= w < n else 0) - bs
            if j > base:
                return (code, base, j, m, idx)
    return None


def scp_scan(vals, honest, winner, pay, burn, offsets, L, n_max, n, budget, coalitions, valcodes):
    """First coalition deviation beating honest play.

    ``coalitions`` are bitmasks over the ``n`` real bidders, in search order.
    Returns ``(code, coalition, dev_len, dev_idx, honest, deviant)``.
    """
    vals, hrows, winner, pay, burn, offsets = map(
        _as_list, (vals, honest, winner, pay, burn, offsets)
    )
    V = len(vals)
    top = min(n + budget, n_max)

    def value(row, m, S, vdig):
        total = _miner(winner, pay, burn, n_max, row, m, n)
        w = winner[row]
        for i in range(n):
            if S >> i & 1:
                total += (vals[vdig[i]] if w == i else 0) - pay[row * n_max + i]
        return total

    for c, code in enumerate(_as_list(valcodes)):
        vdig = []
        rem = code
        for _ in range(n):
            vdig.append(rem % V)
            rem //= V
        floor_idx = hrows[c]
        hdig = [floor_idx // L ** i % L for i in range(n)]
        for S in _as_list(coalitions):
            honest = value(offsets[n] + floor_idx, n, S, vdig)
            # pass 0: honest miner, only coalition bids move; pass 1: full strategy space
            for stage in (0, 1):
                for m in range(n, (n if stage == 0 else top) + 1):
                    for idx in range(L ** m):
                        rem = idx
                        ok = True
                        for i in range(m):
                            d = rem % L
                            rem //= L
                            if i >= n:
                                if d == 0:
                                    ok = False
                                    break
                            elif not (S >> i & 1):
                                f = hdig[i]
                                if d != f and (stage == 0 or d != 0):
                                    ok = False
                                    break
                        if not ok:
                            continue
                        dev = value(offsets[m] + idx, m, S, vdig)
                        if dev > honest:
                            return (code, S, m, idx, honest, dev)
    return None
