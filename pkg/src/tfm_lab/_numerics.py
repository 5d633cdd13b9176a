"""Quadrature and root refinement shared by the pricing modules."""
import math
import os

import numpy as np
from scipy import integrate, optimize

QUAD_TOL = 1e-11
ROOT_TOL = 1e-12


def integrate_piecewise(g, a, b, breakpoints=(), tol=QUAD_TOL):
    """Integrate ``g`` over ``[a, b]``, splitting at interior breakpoints.

    Gauss-Kronrod never samples interval endpoints, so one-sided values at
    density jumps are handled without special casing.
    """
    if b <= a:
        return 0.0
    cuts = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        val, _ = integrate.quad(g, lo, hi, epsabs=tol, epsrel=tol, limit=200)
        total += val
    return total


def refine_root(fn, lo, hi, tol=ROOT_TOL):
    return optimize.brentq(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def maximize_in(fn, lo, hi, tol=1e-10):
    """Bounded scalar maximization; returns ``(x, fn(x))``."""
    if hi - lo <= tol:
        return lo, fn(lo)
    res = optimize.minimize_scalar(
        lambda x: -fn(x), bounds=(lo, hi), method="bounded", options={"xatol": tol}
    )
    return float(res.x), -float(res.fun)


def thread_cap():
    """Worker cap from ``TFM_LAB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("TFM_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def isclose(a, b, tol):
    return math.isclose(float(a), float(b), rel_tol=0.0, abs_tol=tol)
