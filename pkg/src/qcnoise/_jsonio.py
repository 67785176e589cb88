"""JSON emission with fixed-precision floats.

Floats are written with 17 significant digits so that every value read back
is bit-identical; infinities become the string ``"inf"``.
"""

import json
import math

_TOKEN = "\x00f{}\x00"


def _format_float(x: float) -> str:
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def dumps(obj, indent: int | None = 2) -> str:
    floats: list[float] = []

    def walk(o):
        if isinstance(o, bool) or o is None or isinstance(o, (int, str)):
            return o
        if isinstance(o, float):
            floats.append(o)
            return _TOKEN.format(len(floats) - 1)
        if isinstance(o, dict):
            return {k: walk(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [walk(v) for v in o]
        raise TypeError(f"cannot serialise {type(o).__name__}")

    text = json.dumps(walk(obj), indent=indent)
    for k, x in enumerate(floats):
        text = text.replace(json.dumps(_TOKEN.format(k)), _format_float(x), 1)
    return text


def number(x):
    """Inverse of the float encoding for fields that may hold ``"inf"``."""
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return x
