# Compiled twin of tfm_lab._kernels._pure; see that module for the table layout.
from libc.stdint cimport int64_t

import numpy as np


cdef inline int64_t ipow(int64_t b, int e) noexcept nogil:
    cdef int64_t r = 1
    cdef int k
    for k in range(e):
        r *= b
    return r


cdef inline int64_t miner_util(const int64_t[:] pay, const int64_t[:] burn, int n_max,
                               int64_t row, int m, int n) noexcept nogil:
    cdef int64_t total = 0
    cdef int i
    for i in range(m):
        if i < n:
            total += pay[row * n_max + i] - burn[row * n_max + i]
        else:
            total -= burn[row * n_max + i]
    return total


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def dsic_scan(levels_, winner_, pay_, offsets_, int L, int n_max, int n):
    cdef const int64_t[:] levels = _i64(levels_)
    cdef const int64_t[:] winner = _i64(winner_)
    cdef const int64_t[:] pay = _i64(pay_)
    cdef const int64_t[:] offsets = _i64(offsets_)
    cdef int64_t base = offsets[n], size = ipow(L, n)
    cdef int64_t idx, rem, place, j, v, honest, u, w
    cdef int i, d, dd
    cdef int found = 0
    cdef int64_t r_idx = 0, r_honest = 0, r_u = 0
    cdef int r_i = 0, r_dd = 0
    with nogil:
        idx = 0
        while idx < size and not found:
            w = winner[base + idx]
            rem = idx
            place = 1
            for i in range(n):
                d = <int>(rem % L)
                rem = rem // L
                v = levels[d]
                honest = (v if w == i else 0) - pay[(base + idx) * n_max + i]
                for dd in range(L):
                    if dd == d:
                        continue
                    j = base + idx + (dd - d) * place
                    u = (v if winner[j] == i else 0) - pay[j * n_max + i]
                    if u > honest:
                        found = 1
                        r_idx = idx; r_i = i; r_dd = dd; r_honest = honest; r_u = u
                        break
                if found:
                    break
                place *= L
            idx += 1
    if found:
        return (int(r_idx), r_i, r_dd, int(r_honest), int(r_u))
    return None


def mmic_scan(levels_, winner_, pay_, burn_, offsets_, int L, int n_max, int n,
              int budget, profiles_):
    cdef const int64_t[:] pay = _i64(pay_)
    cdef const int64_t[:] burn = _i64(burn_)
    cdef const int64_t[:] offsets = _i64(offsets_)
    cdef const int64_t[:] profiles = _i64(profiles_)
    cdef int max_fakes = min(budget, n_max - n)
    cdef int64_t digits[16]
    cdef int fk[16]
    cdef int64_t idx, honest, dev, kept, place, code, fp, rem
    cdef int p, i, k, mask, t, carry
    cdef int found = 0
    cdef int64_t r_idx = 0, r_code = 0, r_honest = 0, r_dev = 0
    cdef int r_mask = 0, r_k = 0
    with nogil:
        for p in range(profiles.shape[0]):
            idx = profiles[p]
            honest = miner_util(pay, burn, n_max, offsets[n] + idx, n, n)
            rem = idx
            for i in range(n):
                digits[i] = rem % L
                rem = rem // L
            for mask in range(1 << n):
                kept = 0
                place = 1
                for i in range(n):
                    if (mask >> i) & 1:
                        kept += digits[i] * place
                    place *= L
                for k in range(max_fakes + 1):
                    if k == 0 and mask == (1 << n) - 1:
                        continue
                    for t in range(k):
                        fk[t] = 1
                    while True:
                        code = kept
                        fp = ipow(L, n)
                        for t in range(k):
                            code += fk[t] * fp
                            fp *= L
                        dev = miner_util(pay, burn, n_max, offsets[n + k] + code, n + k, n)
                        if dev > honest:
                            found = 1
                            r_idx = idx; r_mask = mask; r_k = k; r_code = code
                            r_honest = honest; r_dev = dev
                            break
                        # odometer over fake digits 1..L-1, last position fastest
                        t = k - 1
                        carry = 1
                        while t >= 0 and carry:
                            fk[t] += 1
                            if fk[t] == L:
                                fk[t] = 1
                                t -= 1
                            else:
                                carry = 0
                        if carry:
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                break
    if found:
        return (int(r_idx), r_mask, r_k, int(r_code), int(r_honest), int(r_dev))
    return None


def oca_scan(vals_, honest_, winner_, pay_, burn_, offsets_, int L, int n_max, int n,
             int budget, valcodes_):
    cdef const int64_t[:] vals = _i64(vals_)
    cdef const int64_t[:] hrow = _i64(honest_)
    cdef const int64_t[:] winner = _i64(winner_)
    cdef const int64_t[:] burn = _i64(burn_)
    cdef const int64_t[:] offsets = _i64(offsets_)
    cdef const int64_t[:] valcodes = _i64(valcodes_)
    cdef int V = vals.shape[0]
    cdef int top = min(n + budget, n_max)
    # reachable rows: real digits free, fake digits nonzero
    rows_m = []
    rows_idx = []
    rows_w = []
    rows_bs = []
    cdef int m, i
    cdef int64_t idx, rem, row, bs
    cdef int64_t Ln = ipow(L, n)
    for m in range(n, top + 1):
        for idx in range(ipow(L, m)):
            rem = idx // Ln
            ok = True
            for i in range(m - n):
                if rem % L == 0:
                    ok = False
                    break
                rem = rem // L
            if not ok:
                continue
            row = offsets[m] + idx
            bs = 0
            for i in range(m):
                bs += burn[row * n_max + i]
            rows_m.append(m); rows_idx.append(idx); rows_w.append(winner[row]); rows_bs.append(bs)
    cdef const int64_t[:] RM = _i64(rows_m)
    cdef const int64_t[:] RI = _i64(rows_idx)
    cdef const int64_t[:] RW = _i64(rows_w)
    cdef const int64_t[:] RB = _i64(rows_bs)
    cdef int nrows = RM.shape[0]
    cdef int64_t vdig[16]
    cdef int64_t code, honest, j, w, floor_idx, place
    cdef int r, c
    cdef int found = 0
    cdef int64_t r_code = 0, r_h = 0, r_b = 0, r_m = 0, r_i = 0
    with nogil:
        for c in range(valcodes.shape[0]):
            code = valcodes[c]
            rem = code
            floor_idx = hrow[c]
            for i in range(n):
                vdig[i] = rem % V
                rem = rem // V
            # rows of length n come first and are indexed densely
            w = RW[floor_idx]
            honest = (vals[vdig[w]] if (w >= 0 and w < n) else 0) - RB[floor_idx]
            for r in range(nrows):
                w = RW[r]
                j = (vals[vdig[w]] if (w >= 0 and w < n) else 0) - RB[r]
                if j > honest:
                    found = 1
                    r_code = code; r_h = honest; r_b = j; r_m = RM[r]; r_i = RI[r]
                    break
            if found:
                break
    if found:
        return (int(r_code), int(r_h), int(r_b), int(r_m), int(r_i))
    return None


cdef inline int64_t coalition_value(const int64_t[:] vals, const int64_t[:] winner,
                                    const int64_t[:] pay, const int64_t[:] burn,
                                    int n_max, int64_t row, int m, int n, int S,
                                    const int64_t* vdig) noexcept nogil:
    cdef int64_t total = miner_util(pay, burn, n_max, row, m, n)
    cdef int64_t w = winner[row]
    cdef int i
    for i in range(n):
        if (S >> i) & 1:
            total += (vals[vdig[i]] if w == i else 0) - pay[row * n_max + i]
    return total


def scp_scan(vals_, honest_, winner_, pay_, burn_, offsets_, int L, int n_max, int n,
             int budget, coalitions_, valcodes_):
    cdef const int64_t[:] vals = _i64(vals_)
    cdef const int64_t[:] hrow = _i64(honest_)
    cdef const int64_t[:] winner = _i64(winner_)
    cdef const int64_t[:] pay = _i64(pay_)
    cdef const int64_t[:] burn = _i64(burn_)
    cdef const int64_t[:] offsets = _i64(offsets_)
    cdef const int64_t[:] coalitions = _i64(coalitions_)
    cdef const int64_t[:] valcodes = _i64(valcodes_)
    cdef int V = vals.shape[0]
    cdef int top = min(n + budget, n_max)
    cdef int64_t vdig[16]
    cdef int64_t hdig[16]
    cdef int64_t code, rem, floor_idx, place, honest, dev, idx, d, f, size
    cdef int c, s, S, stage, m, i, ok, last
    cdef int found = 0
    cdef int64_t r_code = 0, r_m = 0, r_idx = 0, r_h = 0, r_d = 0
    cdef int r_S = 0
    with nogil:
        for c in range(valcodes.shape[0]):
            code = valcodes[c]
            rem = code
            floor_idx = hrow[c]
            place = floor_idx
            for i in range(n):
                vdig[i] = rem % V
                rem = rem // V
                hdig[i] = place % L
                place = place // L
            for s in range(coalitions.shape[0]):
                S = <int>coalitions[s]
                honest = coalition_value(vals, winner, pay, burn, n_max,
                                         offsets[n] + floor_idx, n, n, S, vdig)
                for stage in range(2):
                    last = n if stage == 0 else top
                    for m in range(n, last + 1):
                        size = ipow(L, m)
                        for idx in range(size):
                            rem = idx
                            ok = 1
                            for i in range(m):
                                d = rem % L
                                rem = rem // L
                                if i >= n:
                                    if d == 0:
                                        ok = 0
                                        break
                                elif not ((S >> i) & 1):
                                    f = hdig[i]
                                    if d != f and (stage == 0 or d != 0):
                                        ok = 0
                                        break
                            if not ok:
                                continue
                            dev = coalition_value(vals, winner, pay, burn, n_max,
                                                  offsets[m] + idx, m, n, S, vdig)
                            if dev > honest:
                                found = 1
                                r_code = code; r_S = S; r_m = m; r_idx = idx
                                r_h = honest; r_d = dev
                                break
                        if found:
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                break
    if found:
        return (int(r_code), r_S, int(r_m), int(r_idx), int(r_h), int(r_d))
    return None
