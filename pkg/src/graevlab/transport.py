"""Exact network simplex for uncapacitated transshipment on a complete digraph.

Used by the free-seminorm module.  Bases are spanning trees rooted at a
designated node; Bland's rule (smallest eligible arc index for entering, and
for leaving among ratio-test ties) rules out cycling on degenerate pivots.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class TransshipmentSolution:
    cost: Fraction
    flow: dict[tuple[int, int], Fraction]
    potential: tuple[Fraction, ...]
    pivots: int


def _tree_structure(n: int, root: int, tree: set[tuple[int, int]]):
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in tree:
        adj[i].append(j)
        adj[j].append(i)
    parent = [-1] * n
    depth = [0] * n
    order = [root]
    seen = [False] * n
    seen[root] = True
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for b in sorted(adj[a]):
            if not seen[b]:
                seen[b] = True
                parent[b] = a
                depth[b] = depth[a] + 1
                order.append(b)
                queue.append(b)
    if len(order) != n:
        raise RuntimeError("basis is not a spanning tree")
    return parent, depth, order


def _tree_path(u: int, v: int, parent, depth) -> list[int]:
    """Node sequence of the tree path from u to v."""
    up, down = [u], [v]
    a, b = u, v
    while depth[a] > depth[b]:
        a = parent[a]
        up.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        down.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        up.append(a)
        down.append(b)
    down.pop()
    return up + down[::-1]


def solve_transshipment(
    cost: Sequence[Sequence[Fraction]],
    supply: Sequence[Fraction],
    root: int = 0,
) -> TransshipmentSolution:
    """Minimise ``sum c_ij x_ij`` subject to ``out(i) - in(i) = supply[i]``, ``x >= 0``.

    ``cost`` must be nonnegative, so the problem is bounded; supplies must sum
    to zero.  Potentials satisfy ``p_i - p_j <= c_ij`` for every ordered pair
    with equality on basic arcs, and ``p[root] == 0``.
    """
    n = len(supply)
    supply = [Fraction(s) for s in supply]
    if sum(supply) != 0:
        raise ValueError("supplies must balance")
    c = [[Fraction(x) for x in row] for row in cost]
    if any(c[i][j] < 0 for i in range(n) for j in range(n)):
        raise ValueError("arc costs must be nonnegative")

    arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
    arc_index = {a: k for k, a in enumerate(arcs)}

    tree: set[tuple[int, int]] = set()
    flow: dict[tuple[int, int], Fraction] = {}
    for i in range(n):
        if i == root:
            continue
        arc = (i, root) if supply[i] >= 0 else (root, i)
        tree.add(arc)
        flow[arc] = abs(supply[i])

    pivots = 0
    while True:
        parent, depth, order = _tree_structure(n, root, tree)
        pot = [Fraction(0)] * n
        for b in order[1:]:
            a = parent[b]
            if (a, b) in tree:
                pot[b] = pot[a] - c[a][b]
            else:
                pot[b] = pot[a] + c[b][a]

        entering = None
        for i, j in arcs:
            if (i, j) not in tree and c[i][j] - pot[i] + pot[j] < 0:
                entering = (i, j)
                break
        if entering is None:
            break

        i, j = entering
        path = _tree_path(j, i, parent, depth)
        forward, backward = [], []
        for a, b in zip(path, path[1:]):
            if (a, b) in tree:
                forward.append((a, b))
            else:
                backward.append((b, a))
        if not backward:
            raise RuntimeError("negative-cost cycle with nonnegative arc costs")
        theta = min(flow[arc] for arc in backward)
        leaving = min((arc for arc in backward if flow[arc] == theta), key=arc_index.__getitem__)

        flow[entering] = theta
        for arc in forward:
            flow[arc] += theta
        for arc in backward:
            flow[arc] -= theta
        tree.add(entering)
        tree.discard(leaving)
        del flow[leaving]
        pivots += 1

    total = sum((flow[a] * c[a[0]][a[1]] for a in tree), Fraction(0))
    nonzero = {a: f for a, f in sorted(flow.items()) if f}
    return TransshipmentSolution(total, nonzero, tuple(pot), pivots)
