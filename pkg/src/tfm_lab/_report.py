from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    return x


@dataclass(frozen=True)
class Witness:
    """A replayable deviation: the honest situation and what beats it."""

    profile: tuple
    deviation: str
    honest_value: object
    deviant_value: object
    deviant_profile: tuple | None = None
    valuations: tuple | None = None
    coalition: tuple | None = None
    fakes: tuple = ()

    @property
    def gap(self):
        return self.deviant_value - self.honest_value

    def to_dict(self) -> dict:
        return _plain({
            "profile": list(self.profile),
            "deviation": self.deviation,
            "honest_value": self.honest_value,
            "deviant_value": self.deviant_value,
            "deviant_profile": None if self.deviant_profile is None else list(self.deviant_profile),
            "valuations": None if self.valuations is None else list(self.valuations),
            "coalition": None if self.coalition is None else list(self.coalition),
            "fakes": list(self.fakes),
        })


@dataclass(frozen=True)
class AuditReport:
    property: str
    passed: bool
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @classmethod
    def ok(cls, prop, **stats) -> "AuditReport":
        return cls(prop, True, None, stats)

    @classmethod
    def fail(cls, prop, witness, **stats) -> "AuditReport":
        return cls(prop, False, witness, stats)

    def __bool__(self) -> bool:
        return self.passed

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "stats": _plain(self.stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __str__(self) -> str:
        head = f"{self.property}: {self.verdict}"
        if self.witness is None:
            return head
        w = self.witness
        lines = [head, f"  profile: {_fmt(w.profile)}", f"  deviation: {w.deviation}"]
        if w.valuations is not None:
            lines.append(f"  valuations: {_fmt(w.valuations)}")
        if w.coalition is not None:
            lines.append(f"  coalition: {_fmt(w.coalition)}")
        if w.deviant_profile is not None:
            lines.append(f"  deviant profile: {_fmt(w.deviant_profile)}")
        lines.append(f"  honest: {_fmt1(w.honest_value)}  deviant: {_fmt1(w.deviant_value)}  "
                     f"gap: {_fmt1(w.gap)}")
        return "\n".join(lines)


def _fmt1(x) -> str:
    return str(x) if isinstance(x, Fraction) else f"{x}"


def _fmt(xs) -> str:
    return "(" + ", ".join(_fmt1(x) for x in xs) + ")"
