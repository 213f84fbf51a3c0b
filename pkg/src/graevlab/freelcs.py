"""Maximal seminorm on L(X, *) and the Graev/seminorm equality check.

The seminorm of ``v`` is the cheapest way to route the signed supply ``v``
through the complete graph on the points, with arc costs equal to distances
and the basepoint absorbing the residual mass.  Optimal node potentials,
shifted so the basepoint sits at zero, are a 1-Lipschitz function attaining
the dual optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import LinComb, PointedSpace, Word, word_to_lincomb
from .graev import graev_norm
from .transport import solve_transshipment


class DualityError(RuntimeError):
    """Primal and dual objectives disagree; signals a solver bug."""


@dataclass(frozen=True)
class FlowCertificate:
    flow: dict[tuple[int, int], Fraction]
    value: Fraction

    def recompute(self, space: PointedSpace) -> Fraction:
        return sum((amt * space.d(i, j) for (i, j), amt in self.flow.items()), Fraction(0))

    def net_outflow(self, space: PointedSpace) -> list[Fraction]:
        net = [Fraction(0)] * space.size
        for (i, j), amt in self.flow.items():
            net[i] += amt
            net[j] -= amt
        return net

    def is_valid_for(self, space: PointedSpace, v: LinComb) -> bool:
        if any(amt < 0 for amt in self.flow.values()):
            return False
        net = self.net_outflow(space)
        for x in space.non_basepoints():
            if net[x] != v[x]:
                return False
        return self.recompute(space) == self.value

    @property
    def is_integral(self) -> bool:
        return all(amt.denominator == 1 for amt in self.flow.values())


@dataclass(frozen=True)
class DualWitness:
    f: tuple[Fraction, ...]

    def objective(self, v: LinComb) -> Fraction:
        return sum((c * self.f[i] for i, c in v.items()), Fraction(0))

    def is_feasible(self, space: PointedSpace) -> bool:
        """f vanishes at the basepoint and is 1-Lipschitz."""
        if self.f[space.basepoint_index] != 0:
            return False
        n = space.size
        return all(abs(self.f[i] - self.f[j]) <= space.d(i, j)
                   for i in range(n) for j in range(i + 1, n))


@dataclass(frozen=True)
class SeminormResult:
    value: Fraction
    certificate: FlowCertificate
    dual: DualWitness


def _supply(space: PointedSpace, v: LinComb) -> list[Fraction]:
    space.check_member(v)
    b = [Fraction(0)] * space.size
    for i, c in v.items():
        b[i] = c
    b[space.basepoint_index] = -sum(b)
    return b


def solve_seminorm(space: PointedSpace, v: LinComb) -> SeminormResult:
    """Primal flow, dual witness and value, with strong duality checked exactly."""
    sol = solve_transshipment(space.dist, _supply(space, v), root=space.basepoint_index)
    cert = FlowCertificate(sol.flow, sol.cost)
    dual = DualWitness(sol.potential)
    if dual.objective(v) != sol.cost:
        raise DualityError(f"dual objective {dual.objective(v)} != primal {sol.cost}")
    if not dual.is_feasible(space):
        raise DualityError("optimal potentials are not 1-Lipschitz")
    return SeminormResult(sol.cost, cert, dual)


def free_seminorm(space: PointedSpace, v: LinComb) -> tuple[Fraction, FlowCertificate]:
    res = solve_seminorm(space, v)
    return res.value, res.certificate


def dual_witness(space: PointedSpace, v: LinComb) -> DualWitness:
    return solve_seminorm(space, v).dual


@dataclass(frozen=True)
class TUReport:
    word: Word
    graev: Fraction
    seminorm: Fraction
    one_sided_ok: bool

    @property
    def equal(self) -> bool:
        return self.graev == self.seminorm

    @property
    def ok(self) -> bool:
        return self.one_sided_ok and self.equal

    def to_json(self) -> dict:
        return {
            "graev": str(self.graev),
            "seminorm": str(self.seminorm),
            "one_sided_ok": self.one_sided_ok,
            "equal": self.equal,
        }


def tu_check(space: PointedSpace, w: Word) -> TUReport:
    """Compare the Graev norm of ``w`` with the seminorm of its image in L(X, *).

    The seminorm can never exceed the Graev norm (it induces a translation
    invariant pseudometric extending the same one), so that inequality is
    checked first; equality is the substantive claim.
    """
    g, _ = graev_norm(space, w)
    p, _ = free_seminorm(space, word_to_lincomb(w))
    return TUReport(w, g, p, p <= g)

