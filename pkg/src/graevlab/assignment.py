"""Exact min-cost assignment over rationals.

Shortest augmenting path (Hungarian) method with dual potentials, kept in
exact arithmetic so optimal values compare bit-for-bit with LP optima.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def min_cost_assignment(cost: Sequence[Sequence[Fraction]]) -> tuple[Fraction, list[int]]:
    """Return ``(total, col_of_row)`` minimising ``sum(cost[r][col_of_row[r]])``.

    Rows are inserted in index order and columns scanned in index order, so
    the returned optimum is deterministic for a given matrix.
    """
    n = len(cost)
    if n == 0:
        return Fraction(0), []
    if any(len(row) != n for row in cost):
        raise ValueError("assignment cost matrix must be square")

    inf = None  # sentinel for +infinity in exact arithmetic
    # 1-based arrays; index 0 is the virtual root column.
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    row_of_col = [0] * (n + 1)
    way = [0] * (n + 1)

    for r in range(1, n + 1):
        row_of_col[0] = r
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            delta = inf
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = Fraction(cost[i0 - 1][j - 1]) - u[i0] - v[j]
                if minv[j] is inf or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is inf or minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1

    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    total = sum((Fraction(cost[r][col_of_row[r]]) for r in range(n)), Fraction(0))
    return total, col_of_row
