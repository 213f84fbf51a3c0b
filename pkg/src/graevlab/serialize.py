"""JSON instance files: spaces, words, combinations, angles, models and certificates.

Rationals are written as strings ``"p/q"`` or ``"n"``.  Parse failures raise
:class:`InputError`, which names the offending file and field.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from .core import LinComb, PointedSpace, SpaceShapeError, Word, validate_space
from .embedding import AmbientModel
from .numeric import as_fraction
from .rolewicz import GeneratorCertificate, MalformedCertificate
from .torus import Angle, TorusPoint


class InputError(ValueError):
    def __init__(self, path: str, fieldname: str, message: str):
        self.path = path
        self.field = fieldname
        self.message = message
        super().__init__(f"{path}: field {fieldname!r}: {message}")

    def to_json(self) -> dict:
        return {"path": self.path, "field": self.field, "message": self.message}


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("graevlab") / "fixtures" / name))


def read_json(path: str | Path) -> tuple[Any, str]:
    """Parsed document and the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(str(path), "<file>", exc.strerror or str(exc)) from None
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(str(path), "<document>", f"invalid JSON: {exc}") from None
    return data, hashlib.sha256(raw).hexdigest()


def _field(data, key: str, path: str, where: str = ""):
    name = f"{where}.{key}" if where else key
    if not isinstance(data, dict):
        raise InputError(path, where or "<document>", "expected an object")
    if key not in data:
        raise InputError(path, name, "missing")
    return data[key]


def _rational(value, path: str, name: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(path, name, f"not a rational: {value!r} ({exc})") from None


def _guard(path: str, name: str, fn: Callable[[], Any]):
    try:
        return fn()
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise InputError(path, name, str(exc)) from None


def parse_space(data, path: str = "<space>", validate: bool = True) -> PointedSpace:
    points = _field(data, "points", path)
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise InputError(path, "points", "expected a list of point names")
    if len(set(points)) != len(points):
        raise InputError(path, "points", "duplicate point names")
    base = _field(data, "basepoint", path)
    if base not in points:
        raise InputError(path, "basepoint", f"{base!r} is not among the points")
    rows = _field(data, "dist", path)
    if not isinstance(rows, list) or len(rows) != len(points):
        raise InputError(path, "dist", f"expected {len(points)} rows")
    dist = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(points):
            raise InputError(path, f"dist[{i}]", f"expected {len(points)} entries")
        dist.append([_rational(v, path, f"dist[{i}][{j}]") for j, v in enumerate(row)])
    space = PointedSpace.from_names(points, base, dist)
    if validate:
        try:
            report = validate_space(space)
        except SpaceShapeError as exc:
            raise InputError(path, "dist", str(exc)) from None
        if not report.ok:
            v = report.violations[0]
            raise InputError(path, "dist", f"not a pseudometric: {v}")
    return space


def space_to_json(space: PointedSpace) -> dict:
    return {"points": list(space.points), "basepoint": space.basepoint,
            "dist": [[str(d) for d in row] for row in space.dist]}


def _coeffs(data, space: PointedSpace, path: str, integral: bool) -> dict[int, Fraction]:
    coeffs = _field(data, "coeffs", path)
    if not isinstance(coeffs, dict):
        raise InputError(path, "coeffs", "expected an object mapping point names to coefficients")
    out = {}
    for name, raw in coeffs.items():
        fname = f"coeffs.{name}"
        if name not in space.points:
            raise InputError(path, fname, "unknown point")
        if name == space.basepoint:
            raise InputError(path, fname, "the basepoint cannot carry a coefficient")
        q = _rational(raw, path, fname)
        if integral and q.denominator != 1:
            raise InputError(path, fname, "word coefficients must be integers")
        out[space.index(name)] = q
    return out


def parse_word(data, space: PointedSpace, path: str = "<word>") -> Word:
    return Word({i: int(q) for i, q in _coeffs(data, space, path, True).items()})


def parse_lincomb(data, space: PointedSpace, path: str = "<lincomb>") -> LinComb:
    return LinComb(_coeffs(data, space, path, False))


def combination_to_json(space: PointedSpace, element) -> dict:
    return {"coeffs": {space.points[i]: str(c) for i, c in element.items()}}


def parse_angle(data, path: str = "<angle>", name: str = "angle") -> Angle:
    return _guard(path, name, lambda: Angle.from_json(data))


def parse_torus_point(data, path: str = "<point>", name: str = "point") -> TorusPoint:
    """A list of angles; a bare angle is read as a point of the circle."""
    if isinstance(data, dict) and "angles" in data:
        data = data["angles"]
    if not isinstance(data, list):
        data = [data]
    return TorusPoint(parse_angle(a, path, f"{name}[{i}]") for i, a in enumerate(data))


def parse_model(data, path: str = "<model>") -> tuple[AmbientModel, tuple[str, ...]]:
    """The model and the metric names to check it under (``"metrics"`` may list two)."""
    e_dim = _field(data, "e_dim", path)
    if not isinstance(e_dim, int) or e_dim < 1:
        raise InputError(path, "e_dim", "expected a positive integer")
    pts = _field(data, "x_points", path)
    if not isinstance(pts, list) or not pts:
        raise InputError(path, "x_points", "expected a nonempty list of vectors")
    x_points = []
    for m, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != e_dim:
            raise InputError(path, f"x_points[{m}]", f"expected {e_dim} coordinates")
        x_points.append([_rational(c, path, f"x_points[{m}][{j}]") for j, c in enumerate(p)])
    n_max = _field(data, "n_max", path)
    if not isinstance(n_max, int) or n_max < 1:
        raise InputError(path, "n_max", "expected a positive integer")
    metric = data.get("e_metric", "l1")
    metrics = data.get("metrics", [metric])
    if not isinstance(metrics, list) or not metrics:
        raise InputError(path, "metrics", "expected a nonempty list")
    for i, name in enumerate(metrics):
        if name not in ("l1", "linf"):
            raise InputError(path, f"metrics[{i}]", f"unknown metric {name!r}")
    if metric not in ("l1", "linf"):
        raise InputError(path, "e_metric", f"unknown metric {metric!r}")
    return AmbientModel(e_dim, x_points, n_max, metric), tuple(metrics)


def parse_certificate(data, path: str = "<certificate>") -> GeneratorCertificate:
    """A bare certificate, or the report printed by ``graev rolewicz build``."""
    if isinstance(data, dict) and "model" not in data and isinstance(data.get("result"), dict):
        data = data["result"]
    try:
        return GeneratorCertificate.from_json(data)
    except MalformedCertificate as exc:
        raise InputError(path, "certificate", str(exc)) from None


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str)
