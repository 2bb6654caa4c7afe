"""Concrete section spaces and twist maps on a chain of three rational curves.

Component coordinates: X1 carries ``t`` with the X1-X2 node at ``t = 0``;
X2 carries ``s`` with nodes at ``s = 0`` (X1 side) and ``s = 1`` (X3 side);
X3 carries ``u`` with the X2-X3 node at ``u = 0``.  A section of the
multidegree-``(i, j, l)`` bundle is a polynomial triple ``(f1, f2, f3)`` of
degrees at most ``(i, j, l)`` whose values match across the nodes,
``f1(0) = f2(0)`` and ``f2(1) = f3(0)``; the glued space has dimension
``d + 1``.

The six twist maps restrict away one component and multiply by the linear
form vanishing at the node(s) it meets (one concrete choice of the gluing
trivialisation; all node constants are 1, so no correction factor appears
in any map):

    toward-X1: (f1, f2, f3) -> (0,      s.f2,       f3)
    from-X1:   (g1, g2, g3) -> (t.g1,   0,          0)
    toward-X2: (f1, f2, f3) -> (t.f1,   0,          u.f3)
    from-X2:   (g1, g2, g3) -> (0,      s(1-s).g2,  0)
    toward-X3: (f1, f2, f3) -> (f1,     (1-s).f2,   0)
    from-X3:   (g1, g2, g3) -> (0,      0,          u.g3)

``toward_scales`` rescales the three toward maps (the from maps pick up the
unique compatible factors); the default all-ones choice is the one
documented above.  Rescaling changes coordinates of images, never any
rank, kernel, or subspace comparison verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exactla import (
    LinearAlgebraError,
    Matrix,
    Subspace,
    Vector,
    as_vector,
    image,
    kernel,
    preimage,
    vec_matmul,
)
from .lattice import (
    Direction,
    Edge,
    Multidegree,
    Path,
    all_multidegrees,
    canonical_path,
    classify_steps,
    PathClass,
)

__all__ = [
    "ChainCurve",
    "SectionSpace",
    "h0_basis",
    "twist_matrix",
    "vanishing_subspace",
    "composite_matrix",
    "canonical_matrix",
    "SheafSkeleton",
    "skeleton",
    "LawViolation",
    "LawReport",
    "verify_sheaf_laws",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class ChainCurve:
    """Chain X1 - X2 - X3 of rational curves carrying degree-``d`` bundles."""

    d: int
    toward_scales: tuple[Fraction, Fraction, Fraction] = (_ONE, _ONE, _ONE)

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError("total degree must be nonnegative")
        scales = tuple(Fraction(c) for c in self.toward_scales)
        if any(c == 0 for c in scales):
            raise ValueError("twist scales must be nonzero")
        object.__setattr__(self, "toward_scales", scales)

    def scale(self, direction: Direction) -> Fraction:
        """Scalar multiplying one edge map as a whole.  A from-Xq step has
        the same displacement as the two complementary toward steps
        composed, so its factor must be their product; with that choice all
        canonical walks with equal endpoints keep agreeing."""
        c1, c2, c3 = self.toward_scales
        return {
            Direction.TOWARD_X1: c1,
            Direction.TOWARD_X2: c2,
            Direction.TOWARD_X3: c3,
            Direction.FROM_X1: c2 * c3,
            Direction.FROM_X2: c1 * c3,
            Direction.FROM_X3: c1 * c2,
        }[direction]


@dataclass(frozen=True)
class SectionSpace:
    """Glued global sections at one multidegree.

    ``basis`` rows live in the raw coordinate space of concatenated
    polynomial coefficients (``i+1`` for f1, then ``j+1`` for f2, then
    ``l+1`` for f3, each in ascending degree), and form the canonical RREF
    basis of the solution space of the two gluing equations.
    """

    multidegree: Multidegree
    basis: Matrix
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def blocks(self) -> tuple[int, int, int]:
        md = self.multidegree
        return (md.i + 1, md.j + 1, md.l + 1)

    def split(self, raw: Sequence) -> tuple[Vector, Vector, Vector]:
        """Split a raw coordinate vector into the three coefficient blocks."""
        b1, b2, b3 = self.blocks
        raw = as_vector(raw)
        return raw[:b1], raw[b1:b1 + b2], raw[b1 + b2:]

    def coords_of(self, raw: Sequence) -> Vector:
        """Coordinates of a raw vector in this basis (must lie in the span)."""
        raw = as_vector(raw)
        coords = tuple(raw[p] for p in self.pivots)
        if vec_matmul(coords, self.basis) != raw:
            raise LinearAlgebraError("raw vector is not a glued section")
        return coords

    def section(self, coords: Sequence) -> tuple[Vector, Vector, Vector]:
        """Polynomial coefficient triple of the section with given coordinates."""
        return self.split(vec_matmul(coords, self.basis))


@lru_cache(maxsize=None)
def h0_basis(chain: ChainCurve, md: Multidegree) -> SectionSpace:
    """Canonical basis of the glued section space at ``md``."""
    if md.degree != chain.d or min(md) < 0:
        raise ValueError(f"{md} is not a nonnegative multidegree of total degree {chain.d}")
    b1, b2, b3 = md.i + 1, md.j + 1, md.l + 1
    total = b1 + b2 + b3
    # Gluing columns: f1(0) - f2(0) and f2(1) - f3(0).
    rows = []
    for k in range(total):
        col_a = _ONE if k == 0 else (-_ONE if k == b1 else _ZERO)
        col_b = _ZERO
        if b1 <= k < b1 + b2:
            col_b = _ONE
        elif k == b1 + b2:
            col_b = -_ONE
        rows.append((col_a, col_b))
    glue = Matrix.from_rows(rows, cols=2)
    solutions = kernel(glue)
    return SectionSpace(md, solutions.basis, solutions.pivots())


def _shift(coeffs: Vector, size: int) -> list[Fraction]:
    """Coefficients of ``x * f`` in a block of the given size."""
    out = [_ZERO] * size
    for k, c in enumerate(coeffs):
        out[k + 1] += c
    return out


def _one_minus_shift(coeffs: Vector, size: int) -> list[Fraction]:
    """Coefficients of ``(1 - x) * f``."""
    out = [_ZERO] * size
    for k, c in enumerate(coeffs):
        out[k] += c
        out[k + 1] -= c
    return out


def _node_product_shift(coeffs: Vector, size: int) -> list[Fraction]:
    """Coefficients of ``x(1 - x) * f``."""
    out = [_ZERO] * size
    for k, c in enumerate(coeffs):
        out[k + 1] += c
        out[k + 2] -= c
    return out


def _apply_twist(chain: ChainCurve, edge: Edge, raw: Sequence) -> Vector:
    src = h0_basis(chain, edge.source)
    tgt = h0_basis(chain, edge.target)
    f1, f2, f3 = src.split(raw)
    t1, t2, t3 = tgt.blocks
    d = edge.direction
    if d is Direction.TOWARD_X1:
        g1, g2, g3 = [_ZERO] * t1, _shift(f2, t2), list(f3)
    elif d is Direction.FROM_X1:
        g1, g2, g3 = _shift(f1, t1), [_ZERO] * t2, [_ZERO] * t3
    elif d is Direction.TOWARD_X2:
        g1, g2, g3 = _shift(f1, t1), [_ZERO] * t2, _shift(f3, t3)
    elif d is Direction.FROM_X2:
        g1, g2, g3 = [_ZERO] * t1, _node_product_shift(f2, t2), [_ZERO] * t3
    elif d is Direction.TOWARD_X3:
        g1, g2, g3 = list(f1), _one_minus_shift(f2, t2), [_ZERO] * t3
    elif d is Direction.FROM_X3:
        g1, g2, g3 = [_ZERO] * t1, [_ZERO] * t2, _shift(f3, t3)
    else:  # pragma: no cover
        raise ValueError(d)
    scale = chain.scale(d)
    return tuple(scale * e for e in tuple(g1) + tuple(g2) + tuple(g3))


@lru_cache(maxsize=None)
def twist_matrix(chain: ChainCurve, edge: Edge) -> Matrix:
    """Matrix of the twist map along ``edge`` in the canonical bases.

    Rows are indexed by the source basis, columns by the target basis; the
    map acts on coordinate rows by right multiplication.  Every image is
    checked to satisfy the target gluing (it always does for this backend).
    """
    if edge.source.step(edge.direction) != edge.target:
        raise ValueError(f"{edge} is not a lattice edge")
    src = h0_basis(chain, edge.source)
    tgt = h0_basis(chain, edge.target)
    rows = []
    for k in range(src.dim):
        raw = _apply_twist(chain, edge, src.basis.row(k))
        rows.append(tgt.coords_of(raw))
    return Matrix.from_rows(rows, cols=tgt.dim)


@lru_cache(maxsize=None)
def vanishing_subspace(chain: ChainCurve, md: Multidegree,
                       components: tuple[int, ...]) -> Subspace:
    """Sections whose restriction to every listed component is identically
    zero, in the canonical coordinates at ``md``.  Vanishing on a union is
    the kernel of the combined coefficient blocks."""
    comps = tuple(sorted(set(components)))
    if not comps or any(q not in (1, 2, 3) for q in comps):
        raise ValueError("components must be a nonempty subset of {1, 2, 3}")
    space = h0_basis(chain, md)
    b1, b2, b3 = space.blocks
    offsets = {1: (0, b1), 2: (b1, b1 + b2), 3: (b1 + b2, b1 + b2 + b3)}
    cols: list[int] = []
    for q in comps:
        cols.extend(range(*offsets[q]))
    restricted = Matrix.from_rows(
        [[space.basis.entry(r, c) for c in cols] for r in range(space.dim)],
        cols=len(cols))
    return kernel(restricted)


def composite_matrix(chain: ChainCurve, path: Path) -> Matrix:
    """Product of the edge matrices along a walk (identity for length 0)."""
    out = Matrix.identity(h0_basis(chain, path.start).dim)
    for edge in path.edges():
        out = out @ twist_matrix(chain, edge)
    return out


@lru_cache(maxsize=None)
def canonical_matrix(chain: ChainCurve, start: Multidegree, end: Multidegree) -> Matrix:
    """Composite matrix of the canonical walk between two multidegrees."""
    return composite_matrix(chain, canonical_path(start, end))


@dataclass(frozen=True)
class SheafSkeleton:
    """Ambient data of one degree: dimensions, twist matrices, and the
    single-component vanishing subspaces at every multidegree."""

    d: int
    ambient_dim: dict[Multidegree, int]
    maps: dict[tuple[Multidegree, Multidegree], Matrix]
    vanishing: dict[Multidegree, dict[int, Subspace]]

    @property
    def multidegrees(self) -> tuple[Multidegree, ...]:
        return all_multidegrees(self.d)

    def directed_edges(self) -> list[Edge]:
        out = []
        for md in self.multidegrees:
            for direction in Direction:
                target = md.step(direction)
                if target is not None:
                    out.append(Edge(md, target, direction))
        return out


@lru_cache(maxsize=None)
def skeleton(chain: ChainCurve) -> SheafSkeleton:
    """Full ambient bundle of the chain at its degree."""
    grid = all_multidegrees(chain.d)
    ambient = {md: h0_basis(chain, md).dim for md in grid}
    maps: dict[tuple[Multidegree, Multidegree], Matrix] = {}
    vanishing: dict[Multidegree, dict[int, Subspace]] = {}
    for md in grid:
        vanishing[md] = {q: vanishing_subspace(chain, md, (q,)) for q in (1, 2, 3)}
        for direction in Direction:
            target = md.step(direction)
            if target is not None:
                maps[(md, target)] = twist_matrix(chain, Edge(md, target, direction))
    return SheafSkeleton(chain.d, ambient, maps, vanishing)


@dataclass(frozen=True)
class LawViolation:
    law: str
    location: str
    witness: Vector | None
    message: str


@dataclass(frozen=True)
class LawReport:
    violations: tuple[LawViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"law": v.law, "location": v.location, "message": v.message}
                for v in self.violations
            ],
        }


def _first_nonzero_row(m: Matrix) -> Vector | None:
    for k in range(m.rows):
        row = m.row(k)
        if any(e != 0 for e in row):
            return row
    return None


def verify_sheaf_laws(target: ChainCurve | SheafSkeleton) -> LawReport:
    """Check the ambient twist laws on a skeleton (or a chain's skeleton).

    Per adjacent pair: both round-trip compositions are zero.  Per node and
    unordered direction pair: if the two-step pattern is canonical, both
    step orders give equal composites; if it is degenerate, every defined
    order composes to zero.  Per toward edge: the kernel equals vanishing
    on the complementary two components; vanishing on each other single
    component is transported exactly (a section vanishes there if and only
    if its image does); and the image vanishes on the twisted component.
    Per from edge: the image vanishes on the two complementary components.
    """
    skel = skeleton(target) if isinstance(target, ChainCurve) else target
    violations: list[LawViolation] = []

    def record(law: str, location: str, witness: Vector | None, message: str) -> None:
        violations.append(LawViolation(law, location, witness, message))

    grid = skel.multidegrees
    for md in grid:
        for q in (1, 2, 3):
            toward = Direction(Direction[f"TOWARD_X{q}"])
            other = md.step(toward)
            if other is None:
                continue
            fwd = skel.maps[(md, other)]
            back = skel.maps[(other, md)]
            for name, product in (("there-and-back", fwd @ back),
                                  ("back-and-there", back @ fwd)):
                if not product.is_zero():
                    record("zero-composition", f"{md}<->{other} ({name})",
                           _first_nonzero_row(product),
                           "round trip across one node pair is not zero")

    directions = list(Direction)
    for md in grid:
        for a_idx in range(len(directions)):
            for b_idx in range(a_idx + 1, len(directions)):
                da, db = directions[a_idx], directions[b_idx]
                end_i = md.i + da.delta[0] + db.delta[0]
                end_j = md.j + da.delta[1] + db.delta[1]
                end_l = md.l + da.delta[2] + db.delta[2]
                if min(end_i, end_j, end_l) < 0:
                    continue
                end = Multidegree(end_i, end_j, end_l)
                orders = []
                for first, second in ((da, db), (db, da)):
                    mid = md.step(first)
                    if mid is not None and mid.step(second) == end:
                        orders.append(skel.maps[(md, mid)] @ skel.maps[(mid, end)])
                if not orders:
                    continue
                if classify_steps((da, db)) is PathClass.VALID_CANONICAL:
                    if len(orders) == 2 and orders[0] != orders[1]:
                        record("square-commutation",
                               f"{md} via {da.label}/{db.label}", None,
                               "the two step orders disagree")
                else:
                    for product in orders:
                        if not product.is_zero():
                            record("degenerate-composition",
                                   f"{md} via {da.label}/{db.label}",
                                   _first_nonzero_row(product),
                                   "degenerate two-step pattern is not zero")

    for md in grid:
        for q in (1, 2, 3):
            toward = Direction[f"TOWARD_X{q}"]
            target_md = md.step(toward)
            if target_md is None:
                continue
            fwd = skel.maps[(md, target_md)]
            complementary = tuple(p for p in (1, 2, 3) if p != q)
            expected_kernel = (skel.vanishing[md][complementary[0]]
                               & skel.vanishing[md][complementary[1]])
            actual_kernel = kernel(fwd)
            if actual_kernel != expected_kernel:
                record("kernel-vanishing", f"{md}->{target_md}",
                       _first_nonzero_row(actual_kernel.basis),
                       "kernel differs from vanishing on the complementary components")
            for p in complementary:
                transported = preimage(fwd, skel.vanishing[target_md][p])
                if transported != skel.vanishing[md][p]:
                    record("vanishing-transport", f"{md}->{target_md} (X{p})",
                           None,
                           "vanishing on an untwisted component is not transported exactly")
            if not image(fwd) <= skel.vanishing[target_md][q]:
                record("image-containment", f"{md}->{target_md}",
                       None, "toward image does not vanish on the twisted component")
            back = skel.maps[(target_md, md)]
            back_image = image(back)
            for p in complementary:
                if not back_image <= skel.vanishing[md][p]:
                    record("image-containment", f"{target_md}->{md}",
                           None, "from image does not vanish away from its component")

    return LawReport(tuple(violations))
