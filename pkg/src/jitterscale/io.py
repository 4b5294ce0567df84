"""System description files.

A continuous system is a JSON object with row-major nested arrays ``"A"``,
``"B"``, ``"C"``, ``"D"`` and an optional ``"ts"``.  The same keys are accepted
one level down under ``"system"`` so that the output of ``perceive`` can be fed
back in.  A discrete system uses ``"A_d"``, ``"B_d"``, ``"C"``, ``"D"``, ``"dt"``.
"""
import json
import numbers
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, SystemParseError
from .lti import ContinuousStateSpace, DiscreteStateSpace

__all__ = ["parse_matrix", "read_json", "system_from_dict", "discrete_from_dict",
           "load_system", "load_discrete", "dumps"]


def _is_number(x):
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def parse_matrix(obj, name):
    """Nested list -> 2-D float array; errors name the offending position."""
    if _is_number(obj):
        return np.array([[float(obj)]])
    if not isinstance(obj, list) or not obj:
        raise SystemParseError(f"{name}: expected a non-empty array of rows")
    if all(_is_number(v) for v in obj):
        # a flat list is a single row
        obj = [obj]
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise SystemParseError(f"{name}[{i}]: expected an array, got {type(row).__name__}")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SystemParseError(
                f"{name}[{i}]: ragged array, expected {width} entries, got {len(row)}")
        for j, v in enumerate(row):
            if not _is_number(v):
                raise SystemParseError(f"{name}[{i}][{j}]: expected a number, got {v!r}")
    arr = np.array(obj, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise SystemParseError(f"{name}: entries must be finite")
    return arr


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SystemParseError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def _lookup(data, keys):
    if not isinstance(data, dict):
        raise SystemParseError("system description must be a JSON object")
    if "system" in data and isinstance(data["system"], dict) and keys[0] not in data:
        inner = dict(data["system"])
        inner.setdefault("ts", data.get("ts"))
        data = inner
    missing = [k for k in keys if k not in data]
    if missing:
        raise SystemParseError(f"system description lacks key(s) {missing}")
    return data


def _ts(value, name="ts"):
    if value is None:
        return None
    if not _is_number(value) or not value > 0:
        raise SystemParseError(f"{name}: expected a positive number, got {value!r}")
    return float(value)


def system_from_dict(data):
    """Return ``(ContinuousStateSpace, ts or None)``."""
    data = _lookup(data, ("A", "B", "C", "D"))
    mats = [parse_matrix(data[k], k) for k in "ABCD"]
    try:
        sys = ContinuousStateSpace(*mats)
    except DimensionMismatchError as exc:
        raise SystemParseError(str(exc)) from None
    return sys, _ts(data.get("ts"))


def discrete_from_dict(data, dt=None):
    data = _lookup(data, ("A_d", "B_d", "C", "D"))
    mats = [parse_matrix(data[k], k) for k in ("A_d", "B_d", "C", "D")]
    step = dt if dt is not None else _ts(data.get("dt", data.get("ts")), "dt")
    if step is None:
        raise SystemParseError("discrete system needs 'dt' (or pass --ts)")
    try:
        return DiscreteStateSpace(*mats, dt=step)
    except DimensionMismatchError as exc:
        raise SystemParseError(str(exc)) from None


def load_system(path):
    return system_from_dict(read_json(path))


def load_discrete(path, dt=None):
    return discrete_from_dict(read_json(path), dt=dt)


def dumps(obj):
    """Deterministic JSON (sorted keys, shortest round-trip float repr)."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
