"""Point and report serialisation shared by the CLI."""

from __future__ import annotations

import ast
import json
import math
import operator
import re
from dataclasses import asdict, is_dataclass

import numpy as np

from .quadric_core import QuadricError, QuadricPoint


class InputError(ValueError):
    """Malformed user input; the message names the offending field."""


def _parse_complex(tok: str, field: str) -> complex:
    s = re.sub(r"(?<![0-9.])j", "1j", tok.strip().replace(" ", "").replace("i", "j"))
    try:
        return complex(eval_complex(s))
    except (ValueError, ZeroDivisionError, SyntaxError) as exc:
        raise InputError(f"{field}: cannot parse {tok!r} as a complex number") from exc


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_NUM = re.compile(r"^[0-9eE.+\-j*/()]*$")


def eval_complex(s: str) -> complex:
    """Evaluate a small arithmetic expression over complex literals, e.g. ``(1+1j)/2``."""
    if not s or not _NUM.match(s):
        raise ValueError(s)
    node = ast.parse(s, mode="eval").body

    def ev(n):
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float, complex)):
            return n.value
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.UAdd, ast.USub)):
            v = ev(n.operand)
            return v if isinstance(n.op, ast.UAdd) else -v
        if isinstance(n, ast.BinOp) and type(n.op) in _BINOPS:
            return _BINOPS[type(n.op)](ev(n.left), ev(n.right))
        raise ValueError(s)

    return complex(ev(node))


def _split_top_level(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def parse_point(text: str, tol: float = 1e-9) -> QuadricPoint:
    """Accept ``{"w": [[re,im] x4]}``, ``re1,im1,...,re4,im4`` or ``(w1,w2,w3,w4)``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"point: invalid JSON ({exc.msg})") from exc
        w = data.get("w") if isinstance(data, dict) else None
        if not isinstance(w, list) or len(w) != 4:
            raise InputError("point.w: expected a list of four [re, im] pairs")
        vals = []
        for k, pair in enumerate(w):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(x, (int, float)) for x in pair)):
                raise InputError(f"point.w[{k}]: expected [re, im] numbers")
            vals.append(complex(pair[0], pair[1]))
    elif text.startswith("("):
        if not text.endswith(")"):
            raise InputError("point: unbalanced parentheses")
        toks = _split_top_level(text[1:-1])
        if len(toks) != 4:
            raise InputError(f"point: expected 4 coordinates, got {len(toks)}")
        vals = [_parse_complex(t, f"point.w{k + 1}") for k, t in enumerate(toks)]
    else:
        toks = text.split(",")
        if len(toks) != 8:
            raise InputError(f"point: CSV form needs 8 numbers re1,im1,...,re4,im4, got {len(toks)}")
        try:
            nums = [float(t) for t in toks]
        except ValueError as exc:
            raise InputError(f"point: non-numeric CSV field ({exc})") from exc
        vals = [complex(nums[2 * k], nums[2 * k + 1]) for k in range(4)]
    try:
        return QuadricPoint(*vals, tol=tol)
    except QuadricError as exc:
        raise InputError(f"point: {exc}") from exc


def point_to_json(W: QuadricPoint) -> dict:
    return {"w": [[w.real, w.imag] for w in W.coords]}


def point_to_csv(W: QuadricPoint) -> str:
    return ",".join(repr(x) for w in W.coords for x in (w.real, w.imag))


def to_jsonable(obj):
    """Recursively convert dataclasses, complex numbers and numpy scalars."""
    if isinstance(obj, QuadricPoint):
        return point_to_json(obj)
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
