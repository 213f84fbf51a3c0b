"""Recursive generator construction on a depth-k truncated omega-torus.

The group is ``T_1 x ... x T_k`` with metric ``rho(a, b) = sum_i w_i * d(a_i, b_i)``
where ``d`` is the circle distance.  Level ``i`` picks ``x_i`` in ``T_i`` and a
power count ``n_i`` such that

1. ``rho(x_i, 0) < r_i``;
2. the first ``n_i`` powers of ``(x_1, ..., x_i)`` form an ``r_i``-net of ``T^i``;
3. for ``j > i`` the first ``n_i`` powers of ``x_j`` stay in the ``r_j``-ball of zero,

with radii ``r_i = 2**-i`` by default.  Each ``x_i`` is ``sqrt(p_i) / L_i`` for the
i-th prime, so 1 and the generators are rationally independent by construction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numeric import Enclosure, as_fraction
from .torus import (
    CONVENTIONS,
    FLOAT_ROUNDING,
    POWERS_FROM_1,
    Angle,
    NetResult,
    TorusPoint,
    basis_prime,
    circle_distance,
    float_orbit,
    independence_check,
    orbit_net_check,
    powers,
    weighted_distance,
)

DEFAULT_GRID_STEP = Fraction(1, 512)
MAX_DEPTH = 4
MAX_POWERS = 1 << 22


class ConstructionError(RuntimeError):
    def __init__(self, level: int, reason: str, suggested_grid: Fraction | None = None):
        self.level = level
        self.reason = reason
        self.suggested_grid = suggested_grid
        hint = f"; try grid_step {suggested_grid}" if suggested_grid else ""
        super().__init__(f"level {level}: {reason}{hint}")


class TruncationFloorError(ValueError):
    """Requested accuracy is below what a depth-k truncation can promise."""


class ApproximationContradiction(RuntimeError):
    """No power reaches the target although the net was certified; a bug."""


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class OmegaTorusModel:
    depth: int
    weights: tuple[Fraction, ...] = ()
    radii: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        halving = tuple(Fraction(1, 2 ** i) for i in range(1, self.depth + 1))
        weights = tuple(as_fraction(w) for w in self.weights) or halving
        radii = tuple(as_fraction(r) for r in self.radii) or halving
        if len(weights) != self.depth or len(radii) != self.depth:
            raise ValueError("one weight and one radius per level")
        if any(w <= 0 for w in weights) or any(r <= 0 for r in radii):
            raise ValueError("weights and radii must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "radii", radii)

    @property
    def tail_bound(self) -> Fraction:
        """Bound on the levels beyond the truncation: sum_{l>k} 2**-l = r_k on the halving schedule."""
        return self.radii[-1]

    def floor(self, level: int | None = None) -> Fraction:
        """Smallest eps :func:`approximate_target` accepts for targets in ``T^level``.

        Levels strictly between ``level`` and ``k`` contribute at most half
        their weight; the truncated tail contributes :attr:`tail_bound`.
        """
        level = self.depth if level is None else level
        inner = sum(self.weights[level:], Fraction(0)) / 2
        return self.radii[level - 1] + inner + self.tail_bound

    def rho(self, a: TorusPoint, b: TorusPoint) -> Enclosure:
        return weighted_distance(a, b, self.weights)

    def to_json(self) -> dict:
        return {"depth": self.depth,
                "weights": [str(w) for w in self.weights],
                "radii": [str(r) for r in self.radii]}

    @classmethod
    def from_json(cls, data) -> "OmegaTorusModel":
        return cls(int(data["depth"]), tuple(data.get("weights", ())), tuple(data.get("radii", ())))


@dataclass(frozen=True)
class ConditionReport:
    condition: int
    level: int
    status: str  # pass | fail | inconclusive | advisory
    margin: float | None = None
    detail: str = ""
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "advisory")

    def to_json(self) -> dict:
        out = {"condition": self.condition, "level": self.level, "status": self.status}
        if self.margin is not None:
            out["margin"] = self.margin
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class GeneratorCertificate:
    model: OmegaTorusModel
    x: tuple[Angle, ...]
    n: tuple[int, ...]
    grid_step: Fraction
    convention: str = POWERS_FROM_1
    condition_reports: tuple[ConditionReport, ...] = field(default=(), compare=False)

    def generator(self, level: int | None = None) -> TorusPoint:
        """The product ``x_1 ... x_level`` as a point of ``T^level``."""
        level = self.model.depth if level is None else level
        return TorusPoint(self.x[:level])

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "grid_step": str(self.grid_step),
            "convention": self.convention,
            "x": [a.to_json() for a in self.x],
            "n": list(self.n),
            "condition_reports": [r.to_json() for r in self.condition_reports],
        }

    @classmethod
    def from_json(cls, data) -> "GeneratorCertificate":
        try:
            model = OmegaTorusModel.from_json(data["model"])
            x = tuple(Angle.from_json(a) for a in data["x"])
            n = tuple(int(v) for v in data["n"])
            grid = as_fraction(data.get("grid_step", str(DEFAULT_GRID_STEP)))
            conv = data.get("convention", POWERS_FROM_1)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificate(f"cannot read certificate: {exc}") from exc
        return cls(model, x, n, grid, conv)


def _check_shape(model: OmegaTorusModel, cert: GeneratorCertificate) -> None:
    k = model.depth
    if len(cert.x) != k or len(cert.n) != k:
        raise MalformedCertificate(f"certificate must carry {k} generators and {k} power counts")
    if any(n < 1 for n in cert.n):
        raise MalformedCertificate("power counts must be positive")
    if cert.convention not in CONVENTIONS:
        raise MalformedCertificate(f"unknown convention {cert.convention!r}")


def _level_net(model, xs, level, n, grid_step, convention) -> NetResult:
    point = TorusPoint(xs[:level])
    return orbit_net_check(point, powers(n, convention), model.radii[level - 1],
                           grid_step, weights=model.weights[:level])


def _minimal_power_count(model, xs, level, start, grid_step, convention) -> tuple[int, NetResult]:
    """Least n >= start whose first n powers certify the level-``level`` net."""
    def check(n):
        return _level_net(model, xs, level, n, grid_step, convention)

    hi = max(start, 1)
    res = check(hi)
    while not res.certified and hi < MAX_POWERS:
        hi *= 2
        res = check(hi)
    if not res.certified:
        raise ConstructionError(
            level, f"net not certified with {hi} powers (last status {res.status})",
            suggested_grid=grid_step / 2)
    lo = max(start, 1) - 1 if hi == max(start, 1) else hi // 2
    best = res
    # Invariant: lo fails (or is below start), hi certifies.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        r = check(mid)
        if r.certified:
            hi, best = mid, r
        else:
            lo = mid
    return hi, best


def _scale_for(model: OmegaTorusModel, level: int, prev_n: int) -> tuple[Angle, int]:
    """``sqrt(p_level) / L`` with L the least power of two keeping the first
    ``prev_n`` powers inside the level's radius."""
    beta = Angle.sqrt(basis_prime(level))
    w, r = model.weights[level - 1], model.radii[level - 1]
    L = 1
    while not beta.value().scale(Fraction(prev_n) * w / L).certainly_lt(r):
        L *= 2
    return beta * Fraction(1, L), L


def construct_generator(
    model: OmegaTorusModel,
    grid_step=DEFAULT_GRID_STEP,
    convention: str = POWERS_FROM_1,
    max_depth: int = MAX_DEPTH,
) -> GeneratorCertificate:
    """Build generators level by level and return a verified certificate."""
    if model.depth > max_depth:
        raise ValueError(f"depth {model.depth} exceeds the desk bound {max_depth}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    grid_step = as_fraction(grid_step)
    xs: list[Angle] = []
    ns: list[int] = []
    for level in range(1, model.depth + 1):
        slack = sum(model.weights[:level], Fraction(0)) * grid_step / 2
        if slack >= model.radii[level - 1]:
            raise ConstructionError(level, "grid slack already exceeds the net radius",
                                    suggested_grid=grid_step / 2)
        prev_n = max(ns, default=1)
        x, _ = _scale_for(model, level, prev_n)
        xs.append(x)
        # Starting at prev_n keeps n_i nondecreasing; more powers never spoil a net.
        n, _ = _minimal_power_count(model, xs, level, prev_n if ns else 1, grid_step, convention)
        ns.append(n)

    cert = GeneratorCertificate(model, tuple(xs), tuple(ns), grid_step, convention)
    report = verify_certificate(model, cert)
    if not report.ok:
        failing = [r for r in report.reports if not r.ok]
        raise ConstructionError(failing[0].level, f"re-verification failed: {failing[0].status}",
                                suggested_grid=grid_step / 2)
    return GeneratorCertificate(model, cert.x, cert.n, grid_step, convention, report.reports)


@dataclass(frozen=True)
class VerificationReport:
    reports: tuple[ConditionReport, ...]
    independent: bool
    relation: tuple[int, ...] | None
    monotone: bool
    seconds: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def inconclusive(self) -> bool:
        return any(r.status == "inconclusive" for r in self.reports)

    def condition(self, number: int, level: int) -> ConditionReport:
        for r in self.reports:
            if r.condition == number and r.level == level:
                return r
        raise KeyError((number, level))

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "independent": self.independent,
            "relation": list(self.relation) if self.relation else None,
            "monotone": self.monotone,
            "conditions": [r.to_json() for r in self.reports],
        }


def _ball_check(angle: Angle, exps: Sequence[int], bound: Fraction) -> tuple[str, float, int | None]:
    """Is circle_distance(m * angle, 0) < bound for every m in ``exps``?"""
    exps = list(exps)
    if not exps:
        return "pass", float(bound), None
    vals, err = angle.float_multiples(exps)
    d = np.minimum(vals, 1.0 - vals)
    tol = err + FLOAT_ROUNDING
    worst_i = int(np.argmax(d))
    worst = float(d[worst_i])
    status = "pass"
    for i in np.nonzero(d + tol >= float(bound))[0]:
        enc = circle_distance(angle * exps[i], Angle())
        if enc.certainly_ge(bound):
            return "fail", float(bound) - float(enc.mid), exps[i]
        if not enc.certainly_lt(bound):
            status = "inconclusive"
    return status, float(bound) - worst, (exps[worst_i] if status != "pass" else None)


def verify_certificate(model: OmegaTorusModel, cert: GeneratorCertificate,
                       grid_step=None) -> VerificationReport:
    """Independently re-check conditions (1)-(3) and the independence of the generators."""
    start = time.perf_counter()
    _check_shape(model, cert)
    grid_step = cert.grid_step if grid_step is None else as_fraction(grid_step)
    k = model.depth
    out: list[ConditionReport] = []

    for i in range(1, k + 1):
        w, r = model.weights[i - 1], model.radii[i - 1]
        d1 = circle_distance(cert.x[i - 1], Angle()).scale(w)
        if d1.certainly_lt(r):
            out.append(ConditionReport(1, i, "pass", float(r - d1.hi)))
        elif d1.certainly_ge(r):
            out.append(ConditionReport(1, i, "fail", float(r - d1.mid)))
        else:
            out.append(ConditionReport(1, i, "inconclusive", 0.0))

        net = _level_net(model, cert.x, i, cert.n[i - 1], grid_step, cert.convention)
        status = {"certified": "pass", "refuted": "fail"}.get(net.status, "inconclusive")
        witness = [str(q) for q in net.witness] if net.witness else None
        out.append(ConditionReport(2, i, status, net.margin,
                                   f"{net.method} net, covering {net.covering:.6g}", witness))

    for i in range(1, k + 1):
        exps = powers(cert.n[i - 1], cert.convention)
        for j in range(i + 1, k + 1):
            bound = model.radii[j - 1] / model.weights[j - 1]
            status, margin, wit = _ball_check(cert.x[j - 1], exps, bound)
            out.append(ConditionReport(3, i, status, margin * float(model.weights[j - 1]),
                                       f"powers of x_{j}", wit))

    ind = independence_check(list(cert.x))
    if not ind.independent:
        out.append(ConditionReport(0, k, "advisory", None,
                                   "generators are rationally dependent", list(ind.relation)))
    monotone = all(a <= b for a, b in zip(cert.n, cert.n[1:]))
    return VerificationReport(tuple(out), ind.independent, ind.relation, monotone,
                              time.perf_counter() - start)


@dataclass(frozen=True)
class Approximation:
    m: int
    distance: Enclosure
    eps: Fraction
    floor: Fraction


def approximate_target(model: OmegaTorusModel, cert: GeneratorCertificate, z: TorusPoint,
                       eps) -> Approximation:
    """Power ``m`` among the first ``n_level`` with ``rho(x**m, z) < eps``.

    ``z`` may have fewer coordinates than the model; it is then read as a
    point of ``T^level`` (zeros beyond), and the powers scanned are the first
    ``n_level``.  The closest such power is returned.
    """
    _check_shape(model, cert)
    eps = as_fraction(eps)
    level = z.dim
    if not 1 <= level <= model.depth:
        raise ValueError(f"target must have between 1 and {model.depth} coordinates")
    floor = model.floor(level)
    if eps < floor:
        raise TruncationFloorError(
            f"eps {eps} is below the truncation floor {floor} for level {level}: "
            "levels past the model depth are not represented")
    z_full = TorusPoint(z.angles + tuple(Angle() for _ in range(model.depth - level)))
    x = cert.generator()
    exps = list(powers(cert.n[level - 1], cert.convention))
    orbit, err = float_orbit(x, exps)
    zf = np.array([float(a.value().mid) % 1.0 for a in z_full.angles])
    diff = np.abs(orbit - zf) % 1.0
    circ = np.minimum(diff, 1.0 - diff)
    wf = np.array([float(w) for w in model.weights])
    rho = circ @ wf
    tol = (err + FLOAT_ROUNDING) * float(sum(model.weights))
    for idx in np.argsort(rho, kind="stable"):
        if rho[idx] - tol >= float(eps):
            break
        m = exps[idx]
        d = model.rho(x * m, z_full)
        if d.certainly_lt(eps):
            return Approximation(m, d, eps, floor)
    raise ApproximationContradiction(
        f"no power up to n_{level} = {cert.n[level - 1]} within {eps} of the target; "
        "this contradicts the certified net")
