"""Seeded random instances for the property sweeps."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import LinComb, PointedSpace, Word


def random_space(rng: random.Random, n_points: int, max_den: int = 12,
                 max_weight: int = 24, zero_prob: float = 0.05) -> PointedSpace:
    """Shortest-path closure of random edge weights sharing one denominator.

    Path sums keep the common denominator, so every distance has denominator
    at most ``max_den`` and the triangle inequality holds by construction.
    Zero-weight edges occur with probability ``zero_prob`` to exercise
    genuine pseudometrics.
    """
    q = rng.randint(1, max_den)
    n = n_points
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            k = 0 if rng.random() < zero_prob else rng.randint(1, max_weight)
            d[i][j] = d[j][i] = Fraction(k, q)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    names = ["*"] + [chr(ord("a") + i) for i in range(n - 1)]
    return PointedSpace(names, 0, d)


def random_word(rng: random.Random, space: PointedSpace, max_letters: int = 6,
                coeff_bound: int = 3) -> Word:
    """Word with at most ``max_letters`` letters and coefficients in [-bound, bound]."""
    pts = space.non_basepoints()
    coeffs: dict[int, int] = {}
    budget = rng.randint(0, max_letters)
    for i in rng.sample(pts, len(pts)):
        if budget <= 0:
            break
        k = rng.randint(-coeff_bound, coeff_bound)
        k = max(-budget, min(budget, k))
        coeffs[i] = k
        budget -= abs(k)
    return Word(coeffs)


def random_lincomb(rng: random.Random, space: PointedSpace, max_den: int = 6,
                   bound: int = 4) -> LinComb:
    return LinComb({
        i: Fraction(rng.randint(-bound * max_den, bound * max_den), rng.randint(1, max_den))
        for i in space.non_basepoints() if rng.random() < 0.8
    })


def random_lipschitz_map(rng: random.Random, space: PointedSpace, dim: int = 2,
                         grid: int = 4) -> dict[int, tuple[Fraction, ...]]:
    """1-Lipschitz map into (Q^dim, sup-norm) with the basepoint sent to zero.

    Each coordinate is a McShane-style extension ``min_j (a_j + d(x, x_j))`` of
    random anchor values, shifted to vanish at the basepoint and scaled by a
    factor in (0, 1]; such functions are 1-Lipschitz coordinatewise.
    """
    n = space.size
    base = space.basepoint_index
    coords = []
    for _ in range(dim):
        anchors = {j: Fraction(rng.randint(-grid, grid), rng.randint(1, grid))
                   for j in rng.sample(range(n), rng.randint(1, n))}
        g = [min(a + space.d(x, j) for j, a in anchors.items()) for x in range(n)]
        scale = Fraction(rng.randint(0, grid), grid)
        coords.append([scale * (gx - g[base]) for gx in g])
    return {x: tuple(coords[t][x] for t in range(dim)) for x in range(n)}
