"""Graev norm on A(X, *) as a min-cost perfect matching.

For a word with positive letters P and negative letters N (with multiplicity),
pad P with |N| copies of the basepoint and N with |P| copies.  The Graev norm
is the cheapest perfect matching between the two padded multisets, with
basepoint-to-basepoint pairs free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from sympy.utilities.iterables import multiset_permutations

from .assignment import min_cost_assignment
from .core import PointedSpace, Word
from .numeric import as_fraction

ORACLE_LETTER_BOUND = 10


class OracleBoundError(ValueError):
    """The brute-force oracle refuses instances above its letter bound."""


class LipschitzPreconditionError(ValueError):
    """The map handed to the extension check is not C-Lipschitz on the space."""

    def __init__(self, pair: tuple[int, int], lhs: Fraction, rhs: Fraction):
        self.pair = pair
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"f is not Lipschitz on pair {pair}: |f(x)-f(y)| = {lhs} > C*rho = {rhs}")


@dataclass(frozen=True)
class MatchingCertificate:
    pairs: tuple[tuple[int, int], ...]
    total_cost: Fraction

    def recompute(self, space: PointedSpace) -> Fraction:
        return sum((space.d(a, b) for a, b in self.pairs), Fraction(0))

    def is_valid_for(self, space: PointedSpace, w: Word) -> bool:
        """Each letter used once on its side, the rest basepoint, and the cost adds up."""
        base = space.basepoint_index
        pos, neg = w.positive_letters(), w.negative_letters()
        if len(self.pairs) != len(pos) + len(neg):
            return False
        left = sorted(a for a, _ in self.pairs)
        right = sorted(b for _, b in self.pairs)
        if left != sorted(pos + [base] * len(neg)):
            return False
        if right != sorted(neg + [base] * len(pos)):
            return False
        return self.recompute(space) == self.total_cost


def padded_sides(space: PointedSpace, w: Word) -> tuple[list[int], list[int]]:
    base = space.basepoint_index
    pos, neg = w.positive_letters(), w.negative_letters()
    return pos + [base] * len(neg), neg + [base] * len(pos)


def graev_norm(space: PointedSpace, w: Word) -> tuple[Fraction, MatchingCertificate]:
    """Graev norm of ``w`` with an optimal matching certificate."""
    space.check_member(w)
    left, right = padded_sides(space, w)
    if not left:
        return Fraction(0), MatchingCertificate((), Fraction(0))
    cost = [[space.d(a, b) for b in right] for a in left]
    total, cols = min_cost_assignment(cost)
    pairs = tuple(sorted((left[r], right[c]) for r, c in enumerate(cols)))
    return total, MatchingCertificate(pairs, total)


def graev_distance(space: PointedSpace, u: Word, v: Word) -> Fraction:
    space.check_member(u)
    space.check_member(v)
    return graev_norm(space, u - v)[0]


def graev_norm_family(spaces: Sequence[PointedSpace], w: Word) -> list[Fraction]:
    """Graev norms of one word under several pseudometrics on the same points."""
    return [graev_norm(space, w)[0] for space in spaces]


def brute_force_norm(space: PointedSpace, w: Word, bound: int = ORACLE_LETTER_BOUND) -> Fraction:
    """Minimum over every perfect matching of the padded instance, by enumeration."""
    space.check_member(w)
    if w.letter_count > bound:
        raise OracleBoundError(
            f"word has {w.letter_count} letters; the oracle enumerates at most {bound}")
    left, right = padded_sides(space, w)
    best = None
    # Distinct arrangements only: repeated letters would otherwise multiply the work.
    for perm in multiset_permutations(right):
        c = sum((space.d(a, b) for a, b in zip(left, perm)), Fraction(0))
        if best is None or c < best:
            best = c
    return best if best is not None else Fraction(0)


@dataclass(frozen=True)
class ExtensionCheck:
    word: Word
    image_norm: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.image_norm <= self.bound


@dataclass(frozen=True)
class ExtensionReport:
    lipschitz_constant: Fraction
    checks: tuple[ExtensionCheck, ...]

    @property
    def violations(self) -> list[ExtensionCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.violations


def _sup_norm(vec: Sequence[Fraction]) -> Fraction:
    return max((abs(x) for x in vec), default=Fraction(0))


def homomorphic_extension_check(
    space: PointedSpace,
    f: Mapping[int, Sequence],
    C,
    sample: Sequence[Word],
) -> ExtensionReport:
    """Check ``|f_bar(w)|_inf <= C * graev_norm(w)`` on each sampled word.

    ``f`` maps point indices to rational vectors and must send the basepoint
    to zero; points missing from ``f`` map to zero.  A failed bound means the
    implementation is wrong, since the inequality is a theorem.
    """
    C = as_fraction(C)
    if C < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    dims = {len(v) for v in f.values()}
    if len(dims) > 1:
        raise ValueError("all images must have the same dimension")
    dim = dims.pop() if dims else 0
    zero = (Fraction(0),) * dim
    image = {i: tuple(as_fraction(x) for x in f.get(i, zero)) for i in range(space.size)}
    if any(image[space.basepoint_index]):
        raise ValueError("f must send the basepoint to zero")

    for i in range(space.size):
        for j in range(i + 1, space.size):
            lhs = _sup_norm([a - b for a, b in zip(image[i], image[j])])
            rhs = C * space.d(i, j)
            if lhs > rhs:
                raise LipschitzPreconditionError((i, j), lhs, rhs)

    checks = []
    for w in sample:
        total = [Fraction(0)] * dim
        for i, k in w.items():
            for t in range(dim):
                total[t] += k * image[i][t]
        norm, _ = graev_norm(space, w)
        checks.append(ExtensionCheck(w, _sup_norm(total), C * norm))
    return ExtensionReport(C, tuple(checks))
