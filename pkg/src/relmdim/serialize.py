"""JSON helpers: rationals as "a/b" strings, cylinders and points as plain data."""

from __future__ import annotations

import json
from fractions import Fraction

from .symbolic import Cylinder, PeriodicPoint


def rational(value) -> str:
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, float):
        return Fraction(str(text))
    return Fraction(text)


def point_to_dict(x: PeriodicPoint) -> dict:
    return {"word": list(x.word), "period": x.period}


def cylinder_to_dict(U: Cylinder) -> dict:
    return {"offsets": list(U.offsets), "words": sorted(list(w) for w in U.words)}


def cylinder_from_dict(data: dict) -> Cylinder:
    return Cylinder(tuple(data["offsets"]), frozenset(tuple(w) for w in data["words"]))


def _default(obj):
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, PeriodicPoint):
        return str(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, default=_default, sort_keys=True, indent=2) + "\n"
