"""Circle and torus arithmetic over a symbolic basis of square roots.

An :class:`Angle` is ``r + sum_k c_k * sqrt(p_k)`` read modulo 1, with exact
rational ``r`` and ``c_k`` and ``p_k`` the k-th prime.  Together with 1 the
square roots of distinct primes are linearly independent over Q, so rational
independence of angles reduces to exact rank computations on coordinates.

Numerics come in two grades.  Single distances are :class:`Enclosure`
intervals with rational endpoints.  Bulk orbit scans use fixed-point integer
arithmetic converted to float64 together with a proven error bound; every
decision made from floats demands a margin larger than that bound, and
anything closer is reported as inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy
from scipy.spatial import cKDTree

from .numeric import Enclosure, _sqrt_floor_scaled, as_fraction, precision_bits

POWERS_FROM_1 = "powers-from-1"
POWERS_FROM_0 = "powers-from-0"
CONVENTIONS = (POWERS_FROM_1, POWERS_FROM_0)

# Rounding allowance for float64 distance arithmetic on values in [0, 1].
FLOAT_ROUNDING = 1e-13
MAX_GRID_POINTS = 8_000_000


class InconclusiveError(ArithmeticError):
    """A comparison sits inside the numeric error bound and cannot be decided."""


@lru_cache(maxsize=None)
def basis_prime(k: int) -> int:
    """Prime under basis slot ``k`` (slot 0 is the rational unit)."""
    if k < 1:
        raise ValueError("basis slot 0 is the rational unit")
    return int(sympy.prime(k))


@lru_cache(maxsize=None)
def prime_slot(p: int) -> int:
    if not sympy.isprime(p):
        raise ValueError(f"sqrt({p}) is not a basis symbol; use primes")
    return int(sympy.primepi(p))


@lru_cache(maxsize=None)
def _sqrt_enclosure(k: int) -> Enclosure:
    return Enclosure.sqrt_int(basis_prime(k))


def powers(n: int, convention: str = POWERS_FROM_1) -> range:
    """Exponents of "the first n powers" under either convention."""
    if convention == POWERS_FROM_1:
        return range(1, n + 1)
    if convention == POWERS_FROM_0:
        return range(0, n)
    raise ValueError(f"unknown power convention {convention!r}")


class Angle:
    """Element of R/Z with an exact symbolic representative."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable = (0,)):
        c = [as_fraction(x) for x in coords] or [Fraction(0)]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coords: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def rational(cls, q) -> "Angle":
        return cls((as_fraction(q),))

    @classmethod
    def sqrt(cls, p: int, coeff=1, shift=0) -> "Angle":
        """``shift + coeff * sqrt(p)`` for a prime ``p``."""
        slot = prime_slot(p)
        c = [Fraction(0)] * (slot + 1)
        c[0] = as_fraction(shift)
        c[slot] = as_fraction(coeff)
        return cls(c)

    @property
    def is_rational(self) -> bool:
        return len(self.coords) == 1

    def _binary(self, other, sign):
        a, b = self.coords, other.coords
        n = max(len(a), len(b))
        a = a + (Fraction(0),) * (n - len(a))
        b = b + (Fraction(0),) * (n - len(b))
        return Angle(x + sign * y for x, y in zip(a, b))

    def __add__(self, other: "Angle") -> "Angle":
        return self._binary(other, 1)

    def __sub__(self, other: "Angle") -> "Angle":
        return self._binary(other, -1)

    def __neg__(self) -> "Angle":
        return Angle(-x for x in self.coords)

    def __mul__(self, q) -> "Angle":
        q = as_fraction(q)
        return Angle(q * x for x in self.coords)

    __rmul__ = __mul__

    def shifted(self, n: int) -> "Angle":
        return Angle((self.coords[0] + n,) + self.coords[1:])

    def __eq__(self, other) -> bool:
        return isinstance(other, Angle) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        terms = [str(self.coords[0])]
        terms += [f"{c}*sqrt({basis_prime(k)})" for k, c in enumerate(self.coords) if k and c]
        return "Angle(" + " + ".join(terms) + ")"

    def value(self) -> Enclosure:
        """Enclosure of the real representative (not reduced mod 1)."""
        out = Enclosure.exact(self.coords[0])
        for k, c in enumerate(self.coords[1:], start=1):
            if c:
                out = out + _sqrt_enclosure(k).scale(c)
        return out

    def reduced(self) -> "Angle":
        """Representative whose value lies in [0, 1) up to enclosure width."""
        return self.shifted(-math.floor(self.value().mid))

    def float_multiples(self, ms: Sequence[int]) -> tuple[np.ndarray, float]:
        """Fractional parts of ``m * self`` as float64, with an absolute error bound."""
        bits = precision_bits()
        scale = 1 << bits
        approx = self.coords[0] + sum(
            (c * Fraction(_sqrt_floor_scaled(basis_prime(k), bits), scale)
             for k, c in enumerate(self.coords[1:], start=1) if c),
            Fraction(0))
        num, den = approx.numerator, approx.denominator
        out = np.fromiter(((m * num % den) / den for m in ms), dtype=np.float64, count=len(ms))
        out[out >= 1.0] = 0.0
        coeff_mass = sum(abs(c) for c in self.coords[1:])
        m_max = max((abs(m) for m in ms), default=0)
        err = float(m_max * coeff_mass / scale) + 2.0 ** -52
        return out, err

    def to_json(self) -> dict:
        if self.is_rational:
            return {"rat": str(self.coords[0])}
        coords = {"1": str(self.coords[0])}
        for k, c in enumerate(self.coords[1:], start=1):
            if c:
                coords[f"sqrt{basis_prime(k)}"] = str(c)
        return {"coords": coords}

    @classmethod
    def from_json(cls, data) -> "Angle":
        if isinstance(data, (int, str)):
            return cls.rational(data)
        if "rat" in data:
            return cls.rational(data["rat"])
        coords: dict[int, Fraction] = {}
        for key, val in data["coords"].items():
            if key == "1":
                slot = 0
            elif key.startswith("sqrt"):
                slot = prime_slot(int(key[4:]))
            else:
                raise ValueError(f"unknown basis symbol {key!r}")
            coords[slot] = coords.get(slot, Fraction(0)) + as_fraction(val)
        size = max(coords, default=0) + 1
        return cls(coords.get(k, Fraction(0)) for k in range(size))


@dataclass(frozen=True)
class TorusPoint:
    angles: tuple[Angle, ...]

    def __init__(self, angles: Iterable[Angle]):
        object.__setattr__(self, "angles", tuple(angles))

    @classmethod
    def zero(cls, dim: int) -> "TorusPoint":
        return cls(Angle() for _ in range(dim))

    @property
    def dim(self) -> int:
        return len(self.angles)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        _same_dim(self, other)
        return TorusPoint(a + b for a, b in zip(self.angles, other.angles))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        _same_dim(self, other)
        return TorusPoint(a - b for a, b in zip(self.angles, other.angles))

    def __mul__(self, m) -> "TorusPoint":
        return TorusPoint(a * m for a in self.angles)

    __rmul__ = __mul__

    def to_json(self) -> list:
        return [a.to_json() for a in self.angles]

    @classmethod
    def from_json(cls, data) -> "TorusPoint":
        return cls(Angle.from_json(a) for a in data)


def _same_dim(a: TorusPoint, b: TorusPoint) -> None:
    if a.dim != b.dim:
        raise ValueError(f"torus dimensions differ: {a.dim} vs {b.dim}")


def _circle_from_enclosure(delta: Enclosure) -> Enclosure:
    # Shift to the nearest integer, then 1/2 - ||r| - 1/2| is the circle distance on [-1, 1].
    r = delta - round(delta.mid)
    half = Fraction(1, 2)
    out = half - abs(abs(r) - half)
    return Enclosure(max(out.lo, Fraction(0)), min(out.hi, half))


def circle_distance(a: Angle, b: Angle) -> Enclosure:
    """Distance in R/Z, an enclosure inside [0, 1/2]."""
    return _circle_from_enclosure((a - b).value())


def torus_distance(x: TorusPoint, y: TorusPoint) -> Enclosure:
    """Max over factors of the circle distance."""
    _same_dim(x, y)
    out = Enclosure.exact(0)
    for a, b in zip(x.angles, y.angles):
        out = out.max(circle_distance(a, b))
    return out


def weighted_distance(x: TorusPoint, y: TorusPoint, weights: Sequence[Fraction]) -> Enclosure:
    """``sum_i w_i * circle_distance(x_i, y_i)``."""
    _same_dim(x, y)
    if len(weights) != x.dim:
        raise ValueError("one weight per factor required")
    out = Enclosure.exact(0)
    for w, a, b in zip(weights, x.angles, y.angles):
        out = out + circle_distance(a, b).scale(w)
    return out


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    # Integers (c_unit, c_1, ..., c_n) with c_unit + sum c_i * angle_i = 0 as reals.
    relation: tuple[int, ...] | None = None


def independence_check(angles: Sequence[Angle]) -> IndependenceResult:
    """Are 1 and the given angle representatives linearly independent over Q?"""
    if not angles:
        return IndependenceResult(True)
    width = max(len(a.coords) for a in angles)
    cols = [[Fraction(1)] + [Fraction(0)] * (width - 1)]
    cols += [list(a.coords) + [Fraction(0)] * (width - len(a.coords)) for a in angles]
    mat = sympy.Matrix(width, len(cols), lambda i, j: sympy.Rational(cols[j][i]))
    null = mat.nullspace()
    if not null:
        return IndependenceResult(True)
    vec = null[0]
    den = sympy.ilcm(*[sympy.Rational(x).q for x in vec])
    ints = [int(sympy.Rational(x) * den) for x in vec]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints[1:] if x) if any(ints[1:]) else ints[0]
    if lead < 0:
        ints = [-x for x in ints]
    return IndependenceResult(False, tuple(ints))


def _float_torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b) % 1.0
    return np.minimum(d, 1.0 - d)


def float_orbit(x: TorusPoint, ms: Sequence[int]) -> tuple[np.ndarray, float]:
    """Array of shape (len(ms), dim) with fractional parts of ``m * x`` and an error bound."""
    cols, err = [], 0.0
    for a in x.angles:
        col, e = a.float_multiples(ms)
        cols.append(col)
        err = max(err, e)
    if not cols:
        return np.zeros((len(ms), 0)), 0.0
    return np.stack(cols, axis=1), err


@dataclass(frozen=True)
class KroneckerHit:
    m: int
    distance: Enclosure


def kronecker_search(x: TorusPoint, target: TorusPoint, eps, max_m: int,
                     chunk: int = 65536) -> KroneckerHit | None:
    """Smallest ``m`` in 1..max_m with max-distance(m*x, target) < eps.

    Every exponent is decided: a float pass with a proven error bound settles
    the clear cases and exact enclosures settle the rest.  ``None`` therefore
    proves that no exponent up to ``max_m`` qualifies.
    """
    eps = as_fraction(eps)
    if eps <= 0 or max_m < 1:
        raise ValueError("need eps > 0 and max_m >= 1")
    _same_dim(x, target)
    t_vals = np.array([float(a.value().mid) % 1.0 for a in target.angles])
    t_err = max((float(a.value().width) for a in target.angles), default=0.0)
    for start in range(1, max_m + 1, chunk):
        ms = list(range(start, min(start + chunk, max_m + 1)))
        orbit, err = float_orbit(x, ms)
        d = _float_torus_distance(orbit, t_vals).max(axis=1) if x.dim else np.zeros(len(ms))
        tol = err + t_err + FLOAT_ROUNDING
        undecided = np.nonzero(d < float(eps) + tol)[0]
        for idx in undecided:
            m = ms[idx]
            exact = torus_distance(x * m, target)
            if exact.certainly_lt(eps):
                return KroneckerHit(m, exact)
            if not exact.certainly_ge(eps):
                raise InconclusiveError(f"distance at m={m} is within precision of eps")
    return None


@dataclass(frozen=True)
class NetResult:
    status: str  # certified | refuted | inconclusive
    covering: float  # covering radius estimate (1-D exact path) or grid maximum
    covering_enclosure: Enclosure | None
    slack: Fraction
    eps: Fraction
    witness: tuple[Fraction, ...] | None
    method: str

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    @property
    def margin(self) -> float:
        return float(self.eps) - self.covering - float(self.slack)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "method": self.method,
            "covering": self.covering,
            "slack": str(self.slack),
            "eps": str(self.eps),
            "margin": self.margin,
        }
        if self.covering_enclosure is not None:
            out["covering_enclosure"] = self.covering_enclosure.to_json()
        if self.witness is not None:
            out["witness"] = [str(q) for q in self.witness]
        return out


def _grid_count(grid_step: Fraction) -> int:
    inv = 1 / grid_step
    if inv.denominator != 1 or inv < 1:
        raise ValueError("grid_step must be 1/G for a positive integer G")
    return int(inv)


def _net_setup(k, eps, grid_step, weights):
    eps = as_fraction(eps)
    G = _grid_count(as_fraction(grid_step))
    w = [Fraction(1)] * k if weights is None else [as_fraction(x) for x in weights]
    if len(w) != k or any(x <= 0 for x in w):
        raise ValueError("need one positive weight per factor")
    slack = (sum(w) if weights is not None else Fraction(1)) * as_fraction(grid_step) / 2
    return eps, G, w, slack


def net_check(points: Sequence[TorusPoint], k: int, eps, grid_step,
              weights: Sequence | None = None, method: str = "auto") -> NetResult:
    """Decide whether ``points`` form an eps-net of the k-torus.

    The metric is the max of circle distances, or the weighted sum when
    ``weights`` is given.  ``method="exact"`` (default on the circle) computes
    the covering radius from sorted gaps; ``method="grid"`` checks every grid
    point of spacing ``grid_step``.  Either way the certificate condition is
    ``covering + slack < eps`` with slack the grid half-cell, so both methods
    answer to the same rule; refutation needs ``covering >= eps``.
    """
    if not points:
        raise ValueError("an empty set is not a net")
    if any(p.dim != k for p in points):
        raise ValueError(f"all points must lie on the {k}-torus")
    eps, G, w, slack = _net_setup(k, eps, grid_step, weights)
    method = _pick_method(method, k)
    if method == "exact":
        return _net_exact_circle([p.angles[0] for p in points], eps, slack, w[0])
    coords, err = _points_to_floats(points, k)
    return _net_grid(coords, err, k, eps, slack, G, w, weighted=weights is not None)


def orbit_net_check(x: TorusPoint, exponents: Sequence[int], eps, grid_step,
                    weights: Sequence | None = None, method: str = "auto") -> NetResult:
    """:func:`net_check` for the points ``m * x``, ``m`` in ``exponents``."""
    if not len(exponents):
        raise ValueError("an empty set is not a net")
    k = x.dim
    eps, G, w, slack = _net_setup(k, eps, grid_step, weights)
    method = _pick_method(method, k)
    if method == "exact":
        return _net_exact_circle([x.angles[0] * m for m in exponents], eps, slack, w[0])
    coords, err = float_orbit(x, list(exponents))
    return _net_grid(coords, err, k, eps, slack, G, w, weighted=weights is not None)


def _pick_method(method: str, k: int) -> str:
    if method == "auto":
        return "exact" if k == 1 else "grid"
    if method == "exact" and k != 1:
        raise ValueError("the exact covering radius is only available on the circle")
    if method not in ("exact", "grid"):
        raise ValueError(f"unknown net_check method {method!r}")
    return method


def circle_covering_radius(angles: Sequence[Angle]) -> tuple[Enclosure, Fraction]:
    """Half the largest cyclic gap, with the midpoint of that gap."""
    reps = [a.reduced() for a in angles]
    vals = [r.value() for r in reps]
    order = sorted(range(len(reps)), key=lambda i: vals[i].mid)
    # Overlapping enclosures could misorder near-equal points; widen by the worst width.
    ambiguous = any(vals[a].hi >= vals[b].lo for a, b in zip(order, order[1:]))
    slop = max(v.width for v in vals) if ambiguous else Fraction(0)
    best, best_start = None, None
    for pos, i in enumerate(order):
        if pos + 1 < len(order):
            gap = (reps[order[pos + 1]] - reps[i]).value()
        else:
            gap = (reps[order[0]].shifted(1) - reps[i]).value()
        if best is None or gap.hi > best.hi:
            best_start = vals[i].mid
            best_gap = gap
        best = gap if best is None else best.max(gap)
    radius = Enclosure(best.lo / 2 - slop, best.hi / 2 + slop)
    midpoint = (best_start + best_gap.mid / 2) % 1
    return radius, midpoint


def _net_exact_circle(angles, eps, slack, weight) -> NetResult:
    radius, midpoint = circle_covering_radius(angles)
    covering = radius.scale(weight)
    if (covering + slack).certainly_lt(eps):
        status, witness = "certified", None
    elif covering.certainly_ge(eps):
        status, witness = "refuted", (midpoint,)
    else:
        status, witness = "inconclusive", (midpoint,)
    return NetResult(status, float(covering.hi), covering, slack, eps, witness, "exact")


def _net_grid(coords, err, k, eps, slack, G, w, weighted) -> NetResult:
    if G ** k > MAX_GRID_POINTS:
        raise ValueError(f"grid of {G}^{k} points exceeds the {MAX_GRID_POINTS} point budget")
    wf = np.array([float(x) for x in w])
    if weighted:
        data = coords * wf
        box = wf
        p = 1
        tol = err * float(sum(w)) + FLOAT_ROUNDING
    else:
        data = coords
        box = np.ones(k)
        p = np.inf
        tol = err + FLOAT_ROUNDING
    data = np.where(data >= box, 0.0, data)
    tree = cKDTree(data, boxsize=box)

    worst, worst_idx = -1.0, 0
    axis = np.arange(G, dtype=np.float64) / G
    # Enumerate the grid in slabs over the first coordinate to bound memory.
    inner = np.stack(np.meshgrid(*([axis] * (k - 1)), indexing="ij"), axis=-1).reshape(-1, k - 1) \
        if k > 1 else np.zeros((1, 0))
    for j0 in range(G):
        slab = np.concatenate([np.full((len(inner), 1), j0 / G), inner], axis=1)
        q = slab * wf if weighted else slab
        q = np.where(q >= box, 0.0, q)
        dist, _ = tree.query(q, k=1, p=p)
        i = int(np.argmax(dist))
        if dist[i] > worst:
            worst, worst_idx = float(dist[i]), j0 * len(inner) + i
    witness_idx = np.unravel_index(worst_idx, (G,) * k)
    witness = tuple(Fraction(int(j), G) for j in witness_idx)

    if worst + float(slack) + tol < float(eps):
        status, wit = "certified", None
    elif worst - tol >= float(eps):
        status, wit = "refuted", witness
    else:
        status, wit = "inconclusive", witness
    return NetResult(status, worst, None, slack, eps, wit, "grid")


def _points_to_floats(points: Sequence[TorusPoint], k: int) -> tuple[np.ndarray, float]:
    out = np.empty((len(points), k))
    err = 0.0
    for i, p in enumerate(points):
        for j, a in enumerate(p.angles):
            col, e = a.float_multiples([1])
            out[i, j] = col[0]
            err = max(err, e)
    return out, err
