"""JSON loaders for distributions, mechanisms and collusions.

Numbers may be JSON numbers or strings such as ``"1/4"``; mechanism and
collusion money is kept exact.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import constructions as K
from .collusion_lab import Collusion, builtin_collusion, table_collusion
from .distribution import (
    DiscreteDistribution,
    DistributionError,
    as_fraction,
    truncated_exponential,
    uniform,
)
from .mechanism_core import BidGrid, GridMechanism, InvalidParams, Outcome, builtin_mechanism


class SpecError(ValueError):
    """A spec file could not be parsed or failed validation."""


def _read(src) -> dict:
    if isinstance(src, dict):
        return src
    try:
        text = Path(src).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {src}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{src}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict) or "kind" not in data:
        raise SpecError(f"{src}: expected an object with a 'kind' field")
    return data


def _num(x, what="value") -> Fraction:
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{what}: cannot read {x!r} as a number") from exc


def _need(data: dict, key: str):
    if key not in data:
        raise SpecError(f"missing field {key!r} for kind {data.get('kind')!r}")
    return data[key]


def distribution_from_spec(data: dict):
    kind = data["kind"]
    try:
        if kind == "uniform":
            dist = uniform(float(_num(data.get("lo", 0))), float(_num(data.get("hi", 1))))
        elif kind == "exponential":
            dist = truncated_exponential(float(_num(data.get("rate", 1))), float(_num(data.get("hi", 5))))
        elif kind == "cubic_poly":
            dist = K.build_cubic(K.CubicSpec(*(float(_num(_need(data, k), k)) for k in "abc")))
        elif kind == "trunc_equal_revenue":
            dist = K.build_trunc_equal_revenue(
                K.TruncEqualRevenueSpec(float(_num(_need(data, "T"), "T")),
                                        float(_num(_need(data, "eps"), "eps"))))
        elif kind == "discrete":
            pts = _need(data, "points")
            dist = DiscreteDistribution.from_points([(_num(v), _num(w)) for v, w in pts])
        elif kind == "piecewise":
            dist = K.build_piecewise_uniform(
                [tuple(float(_num(x)) for x in piece) for piece in _need(data, "pieces")])
        elif kind == "sqrtlog":
            dist = K.build_sqrtlog_family(int(_need(data, "n")))
        elif kind == "smear":
            inner = distribution_from_spec(_need(data, "inner"))
            if not isinstance(inner, DiscreteDistribution):
                raise SpecError("smear needs a discrete inner distribution")
            dist = K.epsilon_smear(inner, float(_num(_need(data, "eps"), "eps")))
        else:
            raise SpecError(f"unknown distribution kind {kind!r}")
        if not isinstance(dist, DiscreteDistribution):
            dist.validate()
    except (DistributionError, K.InvalidParams, TypeError) as exc:
        raise SpecError(f"{kind}: {exc}") from exc
    return dist


def load_distribution(src):
    return distribution_from_spec(_read(src))


def _grid(data) -> BidGrid:
    try:
        return BidGrid(tuple(_num(x, "grid level") for x in data))
    except InvalidParams as exc:
        raise SpecError(str(exc)) from exc


def mechanism_from_spec(data: dict) -> GridMechanism:
    kind = data["kind"]
    try:
        if kind == "builtin":
            grid = _grid(data["grid"]) if "grid" in data else None
            params = {k: _num(v, k) for k, v in data.get("params", {}).items()}
            return builtin_mechanism(_need(data, "name"), grid, int(data.get("n_max", 3)), **params)
        if kind == "table":
            grid = _grid(_need(data, "grid"))
            n_max = int(_need(data, "n_max"))
            given = {}
            for e in _need(data, "entries"):
                bids = tuple(_num(b, "bid") for b in e["bids"])
                m = len(bids)
                w = e.get("winner")
                pay = tuple(_num(x, "pay") for x in e.get("pay", [0] * m))
                burn = tuple(_num(x, "burn") for x in e.get("burn", [0] * m))
                given[bids] = Outcome(w, pay, burn)
            rows = []
            empty = GridMechanism.from_rule(grid, n_max, lambda b: (None, None, None), "table")
            for bids in empty.profiles():
                rows.append(given.get(bids, empty.outcome(bids)))
            unknown = set(given) - set(empty.profiles())
            if unknown:
                raise SpecError(f"entry bids {sorted(unknown)[0]} are not grid profiles up to n_max")
            return empty.with_rows(rows, data.get("name", "table"))
    except (InvalidParams, KeyError) as exc:
        raise SpecError(f"mechanism: {exc}") from exc
    raise SpecError(f"unknown mechanism kind {kind!r}")


def load_mechanism(src) -> GridMechanism:
    return mechanism_from_spec(_read(src))


def collusion_from_spec(data: dict, grid: BidGrid | None = None) -> Collusion:
    kind = data["kind"]
    try:
        if kind == "builtin":
            params = {k: (v if k in ("k", "members") else _num(v, k))
                      for k, v in data.get("params", {}).items()}
            return builtin_collusion(_need(data, "name"), grid, **params)
        if kind == "table":
            entries = {}
            for e in _need(data, "entries"):
                entries[tuple(_num(b) for b in e["bids"])] = (
                    tuple(_num(b) for b in e["rewritten"]),
                    tuple(_num(t) for t in e["transfers"]))
            return table_collusion(_need(data, "members"), entries, data.get("name", "table"))
    except (InvalidParams, KeyError) as exc:
        raise SpecError(f"collusion: {exc}") from exc
    raise SpecError(f"unknown collusion kind {kind!r}")


def load_collusion(src, grid: BidGrid | None = None) -> Collusion:
    return collusion_from_spec(_read(src), grid)
