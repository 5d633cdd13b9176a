"""Time the compiled audit kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from tfm_lab._kernels import _pure
from tfm_lab.audits import _honest_rows, coalitions_up_to, encode
from tfm_lab.mechanism_core import BidGrid, builtin_mechanism

try:
    from tfm_lab._kernels import _native
except ImportError:
    _native = None


def cases():
    g5 = BidGrid((0, Fraction(1, 4), Fraction(1, 2), 1, 2))
    g8 = BidGrid.uniform(1, 10)
    third = builtin_mechanism("third_price", g5, 3)
    second = builtin_mechanism("second_price", g8, 4)
    for label, m, n in (("third_price L=5 n=3", third, 3), ("second_price L=11 n=3", second, 3)):
        enc = encode(m, midpoints=False)
        codes = list(range(len(enc.val_fracs) ** n))
        honest = np.asarray(_honest_rows(enc, n, codes), dtype=np.int64)
        codes = np.asarray(codes, dtype=np.int64)
        profiles = np.arange(enc.L ** n, dtype=np.int64)
        coal = np.asarray(coalitions_up_to(n, 1), dtype=np.int64)
        yield label, "dsic", (enc.levels, enc.winner, enc.pay, enc.offsets, enc.L, enc.n_max, n)
        yield label, "mmic", (enc.levels, enc.winner, enc.pay, enc.burn, enc.offsets,
                              enc.L, enc.n_max, n, 1, profiles)
        yield label, "oca", (enc.vals, honest, enc.winner, enc.pay, enc.burn, enc.offsets,
                             enc.L, enc.n_max, n, 1, codes)
        yield label, "scp", (enc.vals, honest, enc.winner, enc.pay, enc.burn, enc.offsets,
                             enc.L, enc.n_max, n, 1, coal, codes)


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'case':24} {'kernel':6} {'python s':>10} {'native s':>10} {'speedup':>8}")
    for label, kind, call in cases():
        name = f"{kind}_scan"
        tp, rp = best_of(getattr(_pure, name), call, args.repeat)
        if _native is None:
            print(f"{label:24} {kind:6} {tp:10.4f} {'-':>10} {'-':>8}")
            continue
        tn, rn = best_of(getattr(_native, name), call, args.repeat)
        assert rp == rn, (label, kind, rp, rn)
        print(f"{label:24} {kind:6} {tp:10.4f} {tn:10.4f} {tp / max(tn, 1e-9):8.0f}x")


if __name__ == "__main__":
    main()
