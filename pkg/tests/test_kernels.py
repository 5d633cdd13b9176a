import os
import subprocess
import sys
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tfm_lab import _kernels
from tfm_lab._kernels import _pure
from tfm_lab.audits import _honest_rows, coalitions_up_to, encode
from tfm_lab.mechanism_core import BidGrid, builtin_mechanism

from .oracles import random_mechanism

native = pytest.importorskip("tfm_lab._kernels._native")
G3 = BidGrid((0, 1, 2))


def _args(m, n, midpoints=True):
    enc = encode(m, midpoints)
    codes = list(range(len(enc.val_fracs) ** n))
    honest = _honest_rows(enc, n, codes)
    as64 = lambda a: np.asarray(a, dtype=np.int64)
    return enc, as64(codes), as64(honest)


def _both(name, *args):
    return getattr(native, name)(*args), getattr(_pure, name)(*args)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.data())
def test_scans_agree(data):
    m = random_mechanism(data.draw, G3, 2, epir=data.draw(st.booleans()))
    for n in (1, 2):
        enc, codes, honest = _args(m, n)
        profiles = np.arange(enc.L ** n, dtype=np.int64)
        a, b = _both("dsic_scan", enc.levels, enc.winner, enc.pay, enc.offsets, enc.L, enc.n_max, n)
        assert a == b
        a, b = _both("mmic_scan", enc.levels, enc.winner, enc.pay, enc.burn, enc.offsets,
                     enc.L, enc.n_max, n, 1, profiles)
        assert a == b
        a, b = _both("oca_scan", enc.vals, honest, enc.winner, enc.pay, enc.burn, enc.offsets,
                     enc.L, enc.n_max, n, 1, codes)
        assert a == b
        coal = np.asarray(coalitions_up_to(n, 2), dtype=np.int64)
        a, b = _both("scp_scan", enc.vals, honest, enc.winner, enc.pay, enc.burn, enc.offsets,
                     enc.L, enc.n_max, n, 1, coal, codes)
        assert a == b


def test_known_hit_indices():
    g = BidGrid((0, Fr(1, 4), Fr(1, 2), 1, 2))
    m = builtin_mechanism("first_price", g, 2)
    enc = encode(m)
    hit = native.dsic_scan(enc.levels, enc.winner, enc.pay, enc.offsets, enc.L, enc.n_max, 1)
    # a lone bid of 1/2 wins more by shading to 1/4
    assert hit[:3] == (2, 0, 1)
    assert hit == _pure.dsic_scan(enc.levels, enc.winner, enc.pay, enc.offsets, enc.L, enc.n_max, 1)


def test_pure_backend_selected_by_env():
    env = dict(os.environ, TFM_LAB_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "import tfm_lab; from tfm_lab.audits import audit_oca; "
         "from tfm_lab.mechanism_core import BidGrid, builtin_mechanism; "
         "m = builtin_mechanism('third_price', BidGrid((0, 1, 2)), 2); "
         "print(tfm_lab.BACKEND, audit_oca(m).stats['backend'])"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "python"]


@pytest.mark.skipif(os.environ.get("TFM_LAB_PURE", "") not in ("", "0"), reason="fallback forced")
def test_native_is_default_when_built():
    assert _kernels.BACKEND == "native"
