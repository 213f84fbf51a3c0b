"""Finite pointed pseudometric spaces, group words and rational combinations.

Points are addressed by their index in :attr:`PointedSpace.points`.  A
:class:`Word` is an element of the free abelian group on the non-basepoint
points (the basepoint is its zero); a :class:`LinComb` is an element of the
rational vector space with the same basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .numeric import as_fraction


class SpaceShapeError(ValueError):
    """The distance matrix does not match the point list."""


class SpaceMismatchError(ValueError):
    """A word or combination refers to points outside a space, or to its basepoint."""


@dataclass(frozen=True)
class PointedSpace:
    points: tuple[str, ...]
    basepoint_index: int
    dist: tuple[tuple[Fraction, ...], ...]

    def __init__(self, points: Sequence[str], basepoint_index: int, dist: Sequence[Sequence]):
        object.__setattr__(self, "points", tuple(points))
        object.__setattr__(self, "basepoint_index", basepoint_index)
        object.__setattr__(self, "dist", tuple(tuple(as_fraction(d) for d in row) for row in dist))

    @classmethod
    def from_names(cls, points: Sequence[str], basepoint: str, dist) -> "PointedSpace":
        return cls(points, list(points).index(basepoint), dist)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def basepoint(self) -> str:
        return self.points[self.basepoint_index]

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def index(self, name: str) -> int:
        try:
            return self.points.index(name)
        except ValueError:
            raise SpaceMismatchError(f"unknown point {name!r}") from None

    def non_basepoints(self) -> list[int]:
        return [i for i in range(self.size) if i != self.basepoint_index]

    def check_member(self, element: "_Combination") -> None:
        """Raise :class:`SpaceMismatchError` unless every key is a non-basepoint index."""
        for i in element.support():
            if not 0 <= i < self.size:
                raise SpaceMismatchError(f"point index {i} outside a {self.size}-point space")
            if i == self.basepoint_index:
                raise SpaceMismatchError("the basepoint is the zero element and cannot carry a coefficient")


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_space(space: PointedSpace) -> ValidationReport:
    """Check the pseudometric axioms, listing every violated pair or triple.

    Shape problems raise :class:`SpaceShapeError` instead of being reported,
    since no axiom can be evaluated on a malformed matrix.
    """
    n = space.size
    if n == 0:
        raise SpaceShapeError("a pointed space needs at least its basepoint")
    if len(space.dist) != n or any(len(row) != n for row in space.dist):
        raise SpaceShapeError(f"distance matrix must be {n}x{n}")
    if not 0 <= space.basepoint_index < n:
        raise SpaceShapeError(f"basepoint index {space.basepoint_index} out of range")
    if len(set(space.points)) != n:
        raise SpaceShapeError("point names must be distinct")

    d = space.dist
    found: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            found.append(Violation("zero-diagonal", (i,), f"d({i},{i}) = {d[i][i]}"))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                found.append(Violation("symmetry", (i, j), f"{d[i][j]} != {d[j][i]}"))
    for i in range(n):
        for j in range(n):
            if d[i][j] < 0:
                found.append(Violation("nonnegativity", (i, j), f"d = {d[i][j]}"))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    found.append(Violation(
                        "triangle", (i, j, k),
                        f"d({i},{k}) = {d[i][k]} > {d[i][j] + d[j][k]}"))
    return ValidationReport(tuple(found))


class _Combination:
    """Reduced sparse coefficient map keyed by point index."""

    __slots__ = ("_items",)
    _coerce = staticmethod(as_fraction)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        items = {}
        for key, value in (coeffs or {}).items():
            c = self._coerce(value)
            if c:
                items[int(key)] = c
        self._items = tuple(sorted(items.items()))

    @property
    def coeffs(self) -> dict:
        return dict(self._items)

    def support(self) -> list[int]:
        return [k for k, _ in self._items]

    def items(self) -> Iterator[tuple[int, object]]:
        return iter(self._items)

    def __getitem__(self, key: int):
        return dict(self._items).get(key, 0)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and other._items == self._items

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._items))

    def _combine(self, other, sign):
        if type(other) is not type(self):
            return NotImplemented
        out = dict(self._items)
        for k, v in other._items:
            out[k] = out.get(k, 0) + sign * v
        return type(self)(out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)({k: -v for k, v in self._items})

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._items)
        return f"{type(self).__name__}({{{body}}})"


def _as_int(value) -> int:
    q = as_fraction(value)
    if q.denominator != 1:
        raise ValueError(f"word coefficients must be integers, got {q}")
    return int(q)


class Word(_Combination):
    """Element of the free abelian group A(X, *)."""

    __slots__ = ()
    _coerce = staticmethod(_as_int)

    def __mul__(self, k: int) -> "Word":
        return Word({i: k * c for i, c in self._items})

    __rmul__ = __mul__

    def positive_letters(self) -> list[int]:
        """Point indices of the positive letters, with multiplicity."""
        return [i for i, c in self._items if c > 0 for _ in range(c)]

    def negative_letters(self) -> list[int]:
        return [i for i, c in self._items if c < 0 for _ in range(-c)]

    @property
    def letter_count(self) -> int:
        return sum(abs(c) for _, c in self._items)


class LinComb(_Combination):
    """Element of L(X, *) with exact rational coefficients."""

    __slots__ = ()

    def __mul__(self, q) -> "LinComb":
        q = as_fraction(q)
        return LinComb({i: q * c for i, c in self._items})

    __rmul__ = __mul__


def word_combine(u: Word, v: Word, sign: int = 1, space: PointedSpace | None = None) -> Word:
    """``u + sign*v``; when ``space`` is given both words are checked against it."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if space is not None:
        space.check_member(u)
        space.check_member(v)
    return u + v if sign == 1 else u - v


def word_to_lincomb(w: Word) -> LinComb:
    return LinComb({i: Fraction(c) for i, c in w.items()})


def letter(i: int, k: int = 1) -> Word:
    return Word({i: k})


def pair_word(i: int, j: int, basepoint: int) -> Word:
    """The word x_i - x_j, with the basepoint read as zero."""
    coeffs = {}
    if i != basepoint:
        coeffs[i] = 1
    if j != basepoint:
        coeffs[j] = coeffs.get(j, 0) - 1
    return Word(coeffs)
