"""Truncated model of ``H = E (+) l2`` and the discrete subgroup ``D``.

``E`` is ``Q^e_dim`` with an exact translation-invariant metric (l1 or
sup), ``x_1..x_M`` is a finite sample of ``E``, and the l2 summand is cut
down to the orthonormal vectors ``e_{m,n}`` with ``m <= M``, ``n <= N``.
``D`` is generated by ``xi_{m,n} = (n * x_m, e_{m,n})`` and distances on ``H``
are ``d(e-parts) + ||l2-parts||``.  Every claim is relative to the
truncation ``(M, N)``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .numeric import Enclosure, as_fraction

METRICS = ("l1", "linf")

Index = tuple[int, int]


def e_distance(metric: str, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    diffs = [abs(x - y) for x, y in zip(a, b)]
    if metric == "l1":
        return sum(diffs, Fraction(0))
    if metric == "linf":
        return max(diffs, default=Fraction(0))
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class AmbientModel:
    e_dim: int
    x_points: tuple[tuple[Fraction, ...], ...]
    n_max: int
    e_metric: str = "l1"

    def __post_init__(self):
        pts = tuple(tuple(as_fraction(c) for c in p) for p in self.x_points)
        object.__setattr__(self, "x_points", pts)
        if self.e_dim < 1 or self.n_max < 1:
            raise ValueError("e_dim and n_max must be positive")
        if not pts:
            raise ValueError("the dense sample needs at least one point")
        if any(len(p) != self.e_dim for p in pts):
            raise ValueError(f"sample points must have {self.e_dim} coordinates")
        if self.e_metric not in METRICS:
            raise ValueError(f"unknown metric {self.e_metric!r}")

    @property
    def M(self) -> int:
        return len(self.x_points)

    @property
    def N(self) -> int:
        return self.n_max

    def indices(self) -> list[Index]:
        return [(m, n) for m in range(1, self.M + 1) for n in range(1, self.N + 1)]

    def check_index(self, m: int, n: int) -> None:
        if not (1 <= m <= self.M and 1 <= n <= self.N):
            raise IndexError(f"(m, n) = ({m}, {n}) outside 1..{self.M} x 1..{self.N}")

    def d(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        return e_distance(self.e_metric, a, b)

    def with_metric(self, metric: str) -> "AmbientModel":
        return AmbientModel(self.e_dim, self.x_points, self.n_max, metric)

    def to_json(self) -> dict:
        return {"e_dim": self.e_dim,
                "x_points": [[str(c) for c in p] for p in self.x_points],
                "n_max": self.n_max,
                "e_metric": self.e_metric}


@dataclass(frozen=True)
class AmbientVector:
    e_part: tuple[Fraction, ...]
    l2_part: tuple[tuple[Index, Fraction], ...] = ()

    def __init__(self, e_part: Sequence, l2_part: Mapping[Index, object] | None = None):
        object.__setattr__(self, "e_part", tuple(as_fraction(c) for c in e_part))
        l2 = {}
        for key, val in (l2_part or {}).items():
            q = as_fraction(val)
            if q:
                l2[tuple(key)] = q
        object.__setattr__(self, "l2_part", tuple(sorted(l2.items())))

    @classmethod
    def zero(cls, model: AmbientModel) -> "AmbientVector":
        return cls((0,) * model.e_dim)

    @property
    def l2(self) -> dict[Index, Fraction]:
        return dict(self.l2_part)

    def _combine(self, other: "AmbientVector", sign: int) -> "AmbientVector":
        if len(self.e_part) != len(other.e_part):
            raise ValueError("vectors belong to different models")
        l2 = self.l2
        for key, val in other.l2_part:
            l2[key] = l2.get(key, 0) + sign * val
        return AmbientVector([a + sign * b for a, b in zip(self.e_part, other.e_part)], l2)

    def __add__(self, other: "AmbientVector") -> "AmbientVector":
        return self._combine(other, 1)

    def __sub__(self, other: "AmbientVector") -> "AmbientVector":
        return self._combine(other, -1)

    def __mul__(self, q) -> "AmbientVector":
        q = as_fraction(q)
        return AmbientVector([q * c for c in self.e_part], {k: q * v for k, v in self.l2_part})

    __rmul__ = __mul__

    def __neg__(self) -> "AmbientVector":
        return self * -1


@dataclass(frozen=True)
class LatticeElement:
    k: tuple[tuple[Index, int], ...]

    def __init__(self, k: Mapping[Index, int] | None = None):
        items = {tuple(key): int(v) for key, v in (k or {}).items() if int(v)}
        object.__setattr__(self, "k", tuple(sorted(items.items())))

    def __bool__(self) -> bool:
        return bool(self.k)

    @property
    def square_norm(self) -> int:
        return sum(v * v for _, v in self.k)

    def vector(self, model: AmbientModel) -> AmbientVector:
        out = AmbientVector.zero(model)
        for (m, n), c in self.k:
            out = out + xi_vector(model, m, n) * c
        return out


def xi_vector(model: AmbientModel, m: int, n: int) -> AmbientVector:
    model.check_index(m, n)
    return AmbientVector([n * c for c in model.x_points[m - 1]], {(m, n): 1})


def embed_e(model: AmbientModel, y: Sequence) -> AmbientVector:
    """The point ``(y, 0)`` of H."""
    if len(y) != model.e_dim:
        raise ValueError(f"E has dimension {model.e_dim}")
    return AmbientVector(y)


@dataclass(frozen=True)
class TildeDistance:
    e_distance: Fraction
    l2_square: Fraction
    value: Enclosure

    @property
    def exact(self) -> Fraction | None:
        return self.value.lo if self.value.is_exact else None


def tilde_distance(model: AmbientModel, h1: AmbientVector, h2: AmbientVector) -> TildeDistance:
    """``d(e1, e2) + ||l1 - l2||``; exact when the squared l2 norm is a rational square."""
    diff = h1 - h2
    if len(diff.e_part) != model.e_dim:
        raise ValueError("vector does not belong to this model")
    d = model.d(h1.e_part, h2.e_part)
    sq = sum((v * v for _, v in diff.l2_part), Fraction(0))
    return TildeDistance(d, sq, Enclosure.sqrt(sq) + d)


class ZeroLatticeElement(ValueError):
    """Separation is claimed only for nonzero elements of D."""


@dataclass(frozen=True)
class SeparationResult:
    distance: TildeDistance
    l2_square: int

    @property
    def l2_bound(self) -> Enclosure:
        return Enclosure.sqrt(self.l2_square)

    @property
    def ok(self) -> bool:
        # d >= 0 and ||sum k e|| = sqrt(integer >= 1) >= 1, decided on squares.
        return self.l2_square >= 1 and self.distance.value.certainly_ge(1)


def separation_check(model: AmbientModel, k: LatticeElement, y: Sequence) -> SeparationResult:
    """Distance from a nonzero lattice vector to a point ``(y, 0)`` of E, with its l2 bound."""
    if not k:
        raise ZeroLatticeElement("the lattice element reduces to zero")
    for (m, n), _ in k.k:
        model.check_index(m, n)
    dist = tilde_distance(model, k.vector(model), embed_e(model, y))
    return SeparationResult(dist, k.square_norm)


def _lattice_chunks(dim: int, bound: int, chunk_rows: int = 1 << 17) -> Iterator[np.ndarray]:
    """All integer vectors in [-bound, bound]^dim, as int64 blocks (zero included)."""
    side = 2 * bound + 1
    tail = 0
    while tail < dim and side ** (tail + 1) <= chunk_rows:
        tail += 1
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    if tail:
        block = np.stack(np.meshgrid(*([axis] * tail), indexing="ij"), axis=-1).reshape(-1, tail)
    else:
        block = np.zeros((1, 0), dtype=np.int64)
    for head in itertools.product(range(-bound, bound + 1), repeat=dim - tail):
        lead = np.broadcast_to(np.array(head, dtype=np.int64), (len(block), dim - tail))
        yield np.concatenate([lead, block], axis=1)


def _common_denominator(values: Sequence[Fraction]) -> int:
    q = 1
    for v in values:
        q = q * v.denominator // math.gcd(q, v.denominator)
    return q


@dataclass(frozen=True)
class SeparationSweep:
    coeff_bound: int
    checked: int
    ys: tuple[tuple[Fraction, ...], ...]
    failures: tuple[tuple[LatticeElement, tuple[Fraction, ...]], ...]
    closest: LatticeElement
    closest_y: tuple[Fraction, ...]
    closest_distance: TildeDistance

    @property
    def ok(self) -> bool:
        return not self.failures and self.closest_distance.value.certainly_ge(1)


def separation_sweep(model: AmbientModel, coeff_bound: int,
                     ys: Sequence[Sequence]) -> SeparationSweep:
    """Exhaustive exact check of ``d~(k, y) >= 1`` over all nonzero k in the coefficient box.

    Integer arithmetic throughout: with ``Q`` a common denominator of the
    sample and of the ys, ``d~ >= 1`` iff ``D >= Q`` or ``s * Q**2 >= (Q - D)**2``
    where ``D = Q * d`` and ``s = sum k**2``.
    """
    idx = model.indices()
    ys = [tuple(as_fraction(c) for c in y) for y in ys]
    Q = _common_denominator([c for p in model.x_points for c in p] + [c for y in ys for c in y])
    X = np.array([[int(n * c * Q) for c in model.x_points[m - 1]] for m, n in idx], dtype=object)
    Y = [np.array([int(c * Q) for c in y], dtype=object) for y in ys]
    mag = (2 * coeff_bound + 1) * len(idx) * max((abs(int(v)) for v in X.flat), default=1) \
        + max((abs(int(v)) for y in Y for v in y), default=0)
    dtype = np.int64 if (mag + Q) ** 2 * len(idx) * coeff_bound ** 2 < 2 ** 62 else object
    X = X.astype(dtype)
    Y = [y.astype(dtype) for y in Y]

    failures = []
    checked = 0
    best = None  # (float value, k row, y index)
    for block in _lattice_chunks(len(idx), coeff_bound):
        s = (block * block).sum(axis=1)
        nz = s > 0
        block, s = block[nz], s[nz]
        if not len(block):
            continue
        e = block.astype(dtype) @ X
        for yi, y in enumerate(Y):
            res = e - y
            D = np.abs(res).sum(axis=1) if model.e_metric == "l1" else np.abs(res).max(axis=1)
            ok = (D >= Q) | (s.astype(dtype) * Q * Q >= (Q - D) ** 2)
            for bad in np.nonzero(~np.asarray(ok, dtype=bool))[0][:10 - len(failures)]:
                failures.append((_row_to_element(block[bad], idx), ys[yi]))
            approx = D.astype(np.float64) / Q + np.sqrt(s.astype(np.float64))
            j = int(np.argmin(approx))
            if best is None or approx[j] < best[0]:
                best = (float(approx[j]), block[j].copy(), yi)
        checked += len(block) * len(Y)
    closest = _row_to_element(best[1], idx)
    cy = ys[best[2]]
    return SeparationSweep(coeff_bound, checked, tuple(ys), tuple(failures), closest, cy,
                           tilde_distance(model, closest.vector(model), embed_e(model, cy)))


def _row_to_element(row, idx: Sequence[Index]) -> LatticeElement:
    return LatticeElement({key: int(v) for key, v in zip(idx, row) if int(v)})


@dataclass(frozen=True)
class MinNormResult:
    value: Enclosure
    square: int
    minimizers: int  # counted once per sign pair
    examples: tuple[LatticeElement, ...]


def lattice_min_norm(model: AmbientModel, coeff_bound: int) -> MinNormResult:
    """Least l2 norm of the projection of a nonzero lattice element, by exhaustive enumeration."""
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be at least 1")
    idx = model.indices()
    if not idx:
        raise ValueError("empty index set")
    best, count, examples = None, 0, []
    for block in _lattice_chunks(len(idx), coeff_bound):
        s = (block * block).sum(axis=1)
        nz = s > 0
        block, s = block[nz], s[nz]
        if not len(block):
            continue
        low = int(s.min())
        # Canonical sign: first nonzero entry positive.
        first = block[np.arange(len(block)), np.argmax(block != 0, axis=1)]
        hits = np.nonzero((s == low) & (first > 0))[0]
        if best is None or low < best:
            best, count, examples = low, 0, []
        if low == best:
            count += len(hits)
            for h in hits[: max(0, 4 - len(examples))]:
                examples.append(_row_to_element(block[h], idx))
    return MinNormResult(Enclosure.sqrt(best), best, count, tuple(examples))


def density_witness(model: AmbientModel, m: int, n: int) -> Fraction:
    """``d~((1/n) xi_{m,n}, (x_m, 0))``, which must be exactly ``1/n``."""
    model.check_index(m, n)
    dist = tilde_distance(model, xi_vector(model, m, n) * Fraction(1, n),
                          embed_e(model, model.x_points[m - 1]))
    value = dist.exact
    if value != Fraction(1, n):
        raise AssertionError(f"density witness at ({m}, {n}) is {dist.value}, expected 1/{n}")
    return value


@dataclass(frozen=True)
class QuotientBounds:
    upper: Enclosure
    lower: Fraction
    certified: bool
    argmin: LatticeElement
    excluded_bound: Fraction
    coeff_bound: int

    @property
    def lower_status(self) -> str:
        return "certified" if self.certified else "upper bound only"

    @property
    def value(self) -> Enclosure | None:
        return self.upper if self.certified else None


def quotient_distance_bounds(model: AmbientModel, h1: AmbientVector, h2: AmbientVector,
                             coeff_bound: int) -> QuotientBounds:
    """Bounds on the distance between ``h1 + D`` and ``h2 + D``.

    ``upper`` encloses the minimum of ``d~(h1, h2 + k)`` over lattice elements
    with coefficients in ``[-B, B]``.  Any k outside that box has some
    ``|k_c| >= B + 1`` and hence an l2 term at least
    ``min_c (B + 1 - |y_c|)`` with ``y = l2(h1 - h2)``; when that bound reaches
    ``upper`` the minimum is global and the result is certified.
    """
    if coeff_bound < 0:
        raise ValueError("coefficient bound must be nonnegative")
    idx = model.indices()
    diff = h1 - h2
    for key, _ in diff.l2_part:
        model.check_index(*key)
    y = [diff.l2.get(key, Fraction(0)) for key in idx]
    base = list(diff.e_part)
    steps = [[n * c for c in model.x_points[m - 1]] for m, n in idx]
    B = coeff_bound
    zero = [Fraction(0)] * model.e_dim

    def evaluate(ks):
        e = list(base)
        for kc, step in zip(ks, steps):
            if kc:
                e = [a - kc * b for a, b in zip(e, step)]
        sq = sum(((yc - kc) ** 2 for yc, kc in zip(y, ks)), Fraction(0))
        return Enclosure.sqrt(sq) + model.d(e, zero)

    start = [max(-B, min(B, round(yc))) for yc in y]
    best_val = evaluate(start)
    best_k = list(start)
    lo = best_val.lo
    # Depth-first search over the box; the l2 term alone prunes branches.
    order = [sorted(range(-B, B + 1), key=lambda v, yc=yc: (abs(v - yc), v)) for yc in y]
    ks = [0] * len(y)

    # A branch whose l2 term alone reaches the incumbent cannot improve it.
    def dfs(c, partial):
        nonlocal best_val, best_k, lo
        if c == len(y):
            val = evaluate(ks)
            lo = min(lo, val.lo)
            if val.hi < best_val.hi:
                best_val, best_k = val, list(ks)
            return
        for v in order[c]:
            nxt = partial + (y[c] - v) ** 2
            if nxt >= best_val.hi ** 2:
                # Values are sorted by distance to y_c, so later ones are no better.
                break
            ks[c] = v
            dfs(c + 1, nxt)
        ks[c] = 0

    dfs(0, Fraction(0))
    upper = Enclosure(min(lo, best_val.lo), best_val.hi)
    excluded = min((max(Fraction(0), B + 1 - abs(yc)) for yc in y), default=Fraction(B + 1))
    certified = excluded >= upper.hi
    return QuotientBounds(upper, min(upper.lo, excluded), certified,
                          LatticeElement(dict(zip(idx, best_k))), excluded, B)


@dataclass(frozen=True)
class PeriodReport:
    m: int
    n: int
    samples: tuple[tuple[Fraction, QuotientBounds], ...]
    half_period: QuotientBounds

    @property
    def periodic(self) -> bool:
        return all(q.certified and q.upper.hi == 0 for _, q in self.samples)

    @property
    def nondegenerate(self) -> bool:
        return self.half_period.lower > 0

    @property
    def ok(self) -> bool:
        return self.periodic and self.nondegenerate


def circle_period_check(model: AmbientModel, m: int, n: int, samples: int) -> PeriodReport:
    """``t -> t * xi_{m,n} + D`` has period 1 and does not collapse at ``t = 1/2``."""
    if samples < 2:
        raise ValueError("need at least two samples")
    xi = xi_vector(model, m, n)
    rows = []
    for j in range(samples):
        t = Fraction(j, samples)
        rows.append((t, quotient_distance_bounds(model, xi * (t + 1), xi * t, 2)))
    half = quotient_distance_bounds(model, xi * Fraction(1, 2), AmbientVector.zero(model), 2)
    return PeriodReport(m, n, tuple(rows), half)


def random_e_point(rng: random.Random, model: AmbientModel, scale: int = 3, den: int = 8):
    return tuple(Fraction(rng.randint(-scale * den, scale * den), den) for _ in range(model.e_dim))


def random_close_pair(rng: random.Random, model: AmbientModel, den: int = 16):
    """Pair of E-points at distance strictly below 1."""
    while True:
        a = random_e_point(rng, model)
        step = tuple(Fraction(rng.randint(-den, den), den * model.e_dim) for _ in range(model.e_dim))
        b = tuple(x + s for x, s in zip(a, step))
        if model.d(a, b) < 1:
            return a, b


def random_lattice_element(rng: random.Random, model: AmbientModel, bound: int = 3) -> LatticeElement:
    while True:
        k = LatticeElement({key: rng.randint(-bound, bound) for key in model.indices()
                            if rng.random() < 0.5})
        if k:
            return k
