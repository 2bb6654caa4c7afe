"""Independent reference computations used to cross-check the library.

Everything here deliberately avoids the code paths under test: rank via
fraction-free (Bareiss) elimination on integers, intersections via double
orthogonal complements in sympy, and path composites via an exhaustive
walk enumeration over (node, step-type-set) states.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import sympy as sp

from llschain.exactla import Matrix
from llschain.lattice import (
    Direction,
    Multidegree,
    PathClass,
    classify_steps,
)


def bareiss_rank(rows: list[list[Fraction]]) -> int:
    """Rank by fraction-free Gaussian elimination on integer-cleared rows."""
    cleared: list[list[int]] = []
    for row in rows:
        denom = 1
        for e in row:
            denom = denom * Fraction(e).denominator // _gcd(denom, Fraction(e).denominator)
        cleared.append([int(Fraction(e) * denom) for e in row])
    m = cleared
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    pr = 0
    for pc in range(n_cols):
        piv = None
        for k in range(pr, n_rows):
            if m[k][pc] != 0:
                piv = k
                break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        for k in range(pr + 1, n_rows):
            for c in range(pc + 1, n_cols):
                num = m[pr][pc] * m[k][c] - m[k][pc] * m[pr][c]
                assert num % prev == 0, "Bareiss division is exact"
                m[k][c] = num // prev
            m[k][pc] = 0
        prev = m[pr][pc]
        rank += 1
        pr += 1
        if pr == n_rows:
            break
    return rank


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) or 1


def sympy_intersection(a_rows, b_rows, ambient: int) -> list[tuple[Fraction, ...]]:
    """Canonical (RREF) basis of rowspace(A) n rowspace(B), computed by
    solving for the two orthogonal complements and taking the complement of
    their sum: A n B = perp(perp(A) + perp(B)) over the rationals."""
    def perp(rows):
        if not rows:
            return [sp.eye(ambient).row(k) for k in range(ambient)]
        mat = sp.Matrix([[sp.Rational(e) for e in row] for row in rows])
        return [v.T for v in mat.nullspace()]

    stacked = perp(a_rows) + perp(b_rows)
    if not stacked:
        basis = sp.eye(ambient)
    else:
        both = sp.Matrix([list(v) for v in stacked])
        cols = [v.T for v in both.nullspace()]
        if not cols:
            return []
        basis = sp.Matrix([list(v) for v in cols])
    reduced, pivots = basis.rref()
    out = []
    for k in range(len(pivots)):
        out.append(tuple(Fraction(sp.Rational(reduced[k, j])) for j in range(ambient)))
    return out


def all_walk_composites(maps: dict, start: Multidegree, end: Multidegree,
                        ambient: int) -> set[Matrix]:
    """Composite matrices of *all* canonical walks from start to end.

    States are (node, set of step types used so far); a step may be taken
    only while the accumulated type set stays canonical.  No canonical type
    set admits a closed loop, so the state graph is finite and acyclic and
    a worklist pass collects every reachable composite.
    """
    identity = Matrix.identity(ambient)
    state_matrices: dict[tuple[Multidegree, frozenset], set[Matrix]] = {
        (start, frozenset()): {identity}
    }
    queue = deque([(start, frozenset())])
    while queue:
        node, used = queue.popleft()
        current = set(state_matrices[(node, used)])
        for direction in Direction:
            target = node.step(direction)
            if target is None:
                continue
            new_used = used | {direction}
            if classify_steps(new_used) is not PathClass.VALID_CANONICAL:
                continue
            edge_matrix = maps[(node, target)]
            news = {m @ edge_matrix for m in current}
            key = (target, new_used)
            existing = state_matrices.setdefault(key, set())
            if not news <= existing:
                existing |= news
                queue.append(key)
    out: set[Matrix] = set()
    for (node, _), matrices in state_matrices.items():
        if node == end:
            out |= matrices
    return out


def random_walk(rng, start: Multidegree, length: int) -> list[Multidegree]:
    """A random lattice walk (any directions, so usually degenerate)."""
    nodes = [start]
    for _ in range(length):
        options = [t for _, t in nodes[-1].neighbours()]
        if not options:
            break
        nodes.append(rng.choice(options))
    return nodes
