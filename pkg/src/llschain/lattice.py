"""The lattice of nonnegative multidegrees of a fixed total degree.

A multidegree is an ordered triple ``(i, j, l)`` of nonnegative integers,
the degrees on the three components X1, X2, X3 of the chain; ``j`` is
determined by ``j = d - i - l``.  The grid layout used everywhere puts
multidegrees with equal ``l`` in one row and equal ``i`` in one column,
with ``i`` decreasing left to right and ``l`` increasing top to bottom::

    (d,0,0)  (d-1,1,0)  ...  (0,d,0)
             (d-1,0,1)  ...  (0,d-1,1)
                        ...
                             (0,0,d)

Each node has up to six neighbours, reached by adding or subtracting one
of the three twist displacements

    toward-X1: (-1, +1,  0)      toward-X2: (+1, -2, +1)
    toward-X3: ( 0, +1, -1)

("toward-Xq" twists degree towards the other components of Xq's node(s);
"from-Xq" is the opposite step).  A walk through the grid composes twist
maps; compositions degenerate to zero exactly when the walk uses one of
three forbidden step patterns, so a *canonical* walk avoids them all:

    (I)   steps toward all three components,
    (II)  a toward-Xq and a from-Xq step for the same q,
    (III) from-Xq1 and from-Xq2 steps for distinct q1, q2.

All canonical walks between two fixed endpoints produce the same composite
map, so :func:`canonical_path` may fix any deterministic recipe.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

__all__ = [
    "Direction",
    "Multidegree",
    "multidegree",
    "Edge",
    "edge_between",
    "Path",
    "PathError",
    "PathClass",
    "all_multidegrees",
    "classify_path",
    "classify_steps",
    "canonical_path",
    "component_regions",
    "edge_split_regions",
]


class Direction(enum.Enum):
    """One grid step; the value carries (label, component, displacement)."""

    TOWARD_X1 = ("toward-X1", 1, (-1, 1, 0))
    TOWARD_X2 = ("toward-X2", 2, (1, -2, 1))
    TOWARD_X3 = ("toward-X3", 3, (0, 1, -1))
    FROM_X1 = ("from-X1", 1, (1, -1, 0))
    FROM_X2 = ("from-X2", 2, (-1, 2, -1))
    FROM_X3 = ("from-X3", 3, (0, -1, 1))

    @property
    def label(self) -> str:
        return self.value[0]

    @property
    def component(self) -> int:
        return self.value[1]

    @property
    def delta(self) -> tuple[int, int, int]:
        return self.value[2]

    @property
    def is_toward(self) -> bool:
        return self.value[0].startswith("toward")

    @property
    def inverse(self) -> "Direction":
        return _INVERSE[self]

    @staticmethod
    def from_label(label: str) -> "Direction":
        for direction in Direction:
            if direction.label == label:
                return direction
        raise ValueError(f"unknown direction label {label!r}")


_INVERSE = {
    Direction.TOWARD_X1: Direction.FROM_X1,
    Direction.FROM_X1: Direction.TOWARD_X1,
    Direction.TOWARD_X2: Direction.FROM_X2,
    Direction.FROM_X2: Direction.TOWARD_X2,
    Direction.TOWARD_X3: Direction.FROM_X3,
    Direction.FROM_X3: Direction.TOWARD_X3,
}


class Multidegree(NamedTuple):
    i: int
    j: int
    l: int

    @property
    def degree(self) -> int:
        return self.i + self.j + self.l

    def step(self, direction: Direction) -> "Multidegree | None":
        """Neighbour in the given direction, or ``None`` outside the lattice."""
        di, dj, dl = direction.delta
        i, j, l = self.i + di, self.j + dj, self.l + dl
        if i < 0 or j < 0 or l < 0:
            return None
        return Multidegree(i, j, l)

    # Named neighbours, by grid geometry.  The right/up-right/down/left/up
    # neighbours are the companion multidegrees appearing in the dimension
    # identities; e.g. ``right`` is the target of the toward-X1 step and
    # ``down`` maps into this node by a toward-X3 step.
    def right(self) -> "Multidegree | None":
        return self.step(Direction.TOWARD_X1)

    def left(self) -> "Multidegree | None":
        return self.step(Direction.FROM_X1)

    def up(self) -> "Multidegree | None":
        return self.step(Direction.TOWARD_X3)

    def down(self) -> "Multidegree | None":
        return self.step(Direction.FROM_X3)

    def down_left(self) -> "Multidegree | None":
        return self.step(Direction.TOWARD_X2)

    def up_right(self) -> "Multidegree | None":
        return self.step(Direction.FROM_X2)

    def neighbours(self) -> list[tuple[Direction, "Multidegree"]]:
        out = []
        for direction in Direction:
            target = self.step(direction)
            if target is not None:
                out.append((direction, target))
        return out

    def to_json(self) -> list[int]:
        return [self.i, self.j, self.l]


def multidegree(i: int, j: int, l: int) -> Multidegree:
    if i < 0 or j < 0 or l < 0:
        raise ValueError(f"negative multidegree ({i},{j},{l})")
    return Multidegree(i, j, l)


@lru_cache(maxsize=None)
def all_multidegrees(d: int) -> tuple[Multidegree, ...]:
    """All nonnegative multidegrees of total degree ``d`` in grid order
    (rows by ``l`` ascending, ``i`` descending within a row); there are
    ``(d+1)(d+2)/2`` of them."""
    if d < 0:
        raise ValueError("total degree must be nonnegative")
    out = []
    for l in range(d + 1):
        for i in range(d - l, -1, -1):
            out.append(Multidegree(i, d - i - l, l))
    return tuple(out)


class Edge(NamedTuple):
    source: Multidegree
    target: Multidegree
    direction: Direction


def edge_between(source: Multidegree, target: Multidegree) -> Edge:
    for direction in Direction:
        if source.step(direction) == target:
            return Edge(source, target, direction)
    raise PathError(f"{source} and {target} are not adjacent")


class PathError(ValueError):
    """A node sequence that is not a lattice walk."""


class PathClass(enum.Enum):
    VALID_CANONICAL = "valid-canonical"
    VIOLATES_I = "violates (I)"
    VIOLATES_II = "violates (II)"
    VIOLATES_III = "violates (III)"


@dataclass(frozen=True)
class Path:
    nodes: tuple[Multidegree, ...]

    def __post_init__(self) -> None:
        if not self.nodes:
            raise PathError("a path needs at least one node")

    @property
    def start(self) -> Multidegree:
        return self.nodes[0]

    @property
    def end(self) -> Multidegree:
        return self.nodes[-1]

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    def steps(self) -> tuple[Direction, ...]:
        out = []
        for a, b in zip(self.nodes, self.nodes[1:]):
            out.append(edge_between(a, b).direction)
        return tuple(out)

    def edges(self) -> tuple[Edge, ...]:
        return tuple(edge_between(a, b) for a, b in zip(self.nodes, self.nodes[1:]))


def classify_steps(steps: Iterable[Direction]) -> PathClass:
    """Classify a step multiset against the degeneration patterns, reported
    in the order (I), (II), (III)."""
    toward = set()
    away = set()
    for s in steps:
        (toward if s.is_toward else away).add(s.component)
    if toward >= {1, 2, 3}:
        return PathClass.VIOLATES_I
    if toward & away:
        return PathClass.VIOLATES_II
    if len(away) >= 2:
        return PathClass.VIOLATES_III
    return PathClass.VALID_CANONICAL


def classify_path(path: Path) -> PathClass:
    return classify_steps(path.steps())


def canonical_path(start: Multidegree, end: Multidegree) -> Path:
    """A deterministic canonical walk from ``start`` to ``end``.

    With displacement ``(a, b) = (end.i - start.i, end.l - start.l)``:

    * ``a <= 0``: toward-X1 steps, then from-X3 (``b >= 0``) or toward-X3;
    * ``a > 0, b <= 0``: toward-X3 steps first, then from-X1;
    * ``0 < a <= b``: toward-X2 diagonal, then from-X3;
    * ``0 < b < a``: toward-X2 diagonal, then from-X1.

    Every intermediate node stays in the lattice and the step set avoids
    the three degeneration patterns (asserted).  A zero displacement gives
    the single-node path, whose composite is the identity.
    """
    if start.degree != end.degree:
        raise PathError(f"total degree mismatch: {start} vs {end}")
    a = end.i - start.i
    b = end.l - start.l
    steps: list[Direction] = []
    if a <= 0:
        steps += [Direction.TOWARD_X1] * (-a)
        if b >= 0:
            steps += [Direction.FROM_X3] * b
        else:
            steps += [Direction.TOWARD_X3] * (-b)
    elif b <= 0:
        steps += [Direction.TOWARD_X3] * (-b)
        steps += [Direction.FROM_X1] * a
    elif a <= b:
        steps += [Direction.TOWARD_X2] * a
        steps += [Direction.FROM_X3] * (b - a)
    else:
        steps += [Direction.TOWARD_X2] * b
        steps += [Direction.FROM_X1] * (a - b)
    nodes = [start]
    for s in steps:
        node = nodes[-1].step(s)
        if node is None:
            raise PathError(f"canonical recipe left the lattice at {nodes[-1]} via {s.label}")
        nodes.append(node)
    path = Path(tuple(nodes))
    assert classify_path(path) is PathClass.VALID_CANONICAL
    return path


def component_regions(md: Multidegree) -> tuple[tuple[Multidegree, ...], ...]:
    """The three source regions of ``md``: region ``q`` collects the
    multidegrees whose canonical maps into ``md`` feed the complement of
    the vanish-on-Xq subspace.  Their union is the whole grid; listed in
    grid order.  With ``(i, l)`` the coordinates of ``md``:

    * region 1: ``i~ <= i`` and ``i~ - i <= l~ - l``;
    * region 2: ``i~ >= i`` and ``l~ >= l``;
    * region 3: ``l~ <= l`` and ``l~ - l <= i~ - i``.
    """
    grid = all_multidegrees(md.degree)
    i, l = md.i, md.l
    r1 = tuple(m for m in grid if m.i <= i and m.i - i <= m.l - l)
    r2 = tuple(m for m in grid if m.i >= i and m.l >= l)
    r3 = tuple(m for m in grid if m.l <= l and m.l - l <= m.i - i)
    return r1, r2, r3


def edge_split_regions(md: Multidegree) -> tuple[tuple[Multidegree, ...], ...]:
    """Split the grid across the toward-X1 edge out of ``md``.

    Returns ``(D, E, F)`` in grid order: sources in ``D`` or ``E`` have
    their canonical map to ``md.right()`` factor through ``md``; sources
    in ``F`` have their canonical map to ``md`` factor through
    ``md.right()``.  ``(D u E)`` and ``F`` partition the grid.
    """
    grid = all_multidegrees(md.degree)
    i, l = md.i, md.l
    dd = tuple(m for m in grid if m.l <= l and m.i - i >= m.l - l)
    ee = tuple(m for m in grid if m.l >= l and m.i >= i)
    ff = tuple(m for m in grid if m.i <= i - 1 and m.i - (i - 1) <= m.l - l)
    return dd, ee, ff
