"""Limit linear series on the three-component chain: data model and checks.

An instance carries, for every multidegree of the fixed total degree, the
ambient section-space dimension, the twist matrix of every directed lattice
edge, the ambient single-component vanishing subspaces, and a chosen
``(r+1)``-dimensional subspace.  The ambient data is backend agnostic: it
may come from :mod:`llschain.chain_model` or be loaded from a file.

The validators here cover everything short of basis constructions:
linking, per-edge exactness, the dimension bookkeeping of the grid report,
the distributivity test, and the suite of conditional dimension identities
relating neighbouring multidegrees.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import chain_model
from .chain_model import ChainCurve, LawReport, SheafSkeleton, verify_sheaf_laws
from .exactla import (
    LinearAlgebraError,
    Matrix,
    Subspace,
    Vector,
    complement_in,
    parse_rational,
    vec_matmul,
)
from .lattice import (
    Direction,
    Edge,
    Multidegree,
    all_multidegrees,
    canonical_path,
)

__all__ = [
    "LlsInstance",
    "from_chain",
    "skeleton_of",
    "Violation",
    "ValidationReport",
    "validate",
    "vanishing_in_v",
    "vanishing_sum",
    "EdgeExactness",
    "ExactnessReport",
    "exactness",
    "distributive_at",
    "GridCell",
    "GridReport",
    "codim_report",
    "IdentityCheck",
    "IdentitySuiteReport",
    "identity_suite",
    "canonical_matrix",
    "InstanceFormatError",
    "instance_to_json",
    "instance_from_json",
    "save_instance",
    "load_instance",
    "skeleton_to_json",
    "skeleton_from_json",
    "save_skeleton",
    "load_skeleton",
]


def _thread_count() -> int:
    raw = os.environ.get("LSL_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def _pmap(fn: Callable, items: Iterable) -> list:
    """Map preserving input order; parallel when LSL_THREADS allows it."""
    items = list(items)
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _other_components(q: int) -> tuple[int, int]:
    return tuple(p for p in (1, 2, 3) if p != q)


@dataclass(eq=False)
class LlsInstance:
    """One series: ambient data plus the chosen subspaces.

    Treat instances as immutable once built; all operations are pure and
    the caches only memoise derived subspaces.
    """

    d: int
    r: int
    ambient_dim: Mapping[Multidegree, int]
    maps: Mapping[tuple[Multidegree, Multidegree], Matrix]
    vanishing: Mapping[Multidegree, Mapping[int, Subspace]]
    spaces: Mapping[Multidegree, Subspace]
    provenance: dict | None = None
    _van_cache: dict = field(default_factory=dict, repr=False)
    _canon_cache: dict = field(default_factory=dict, repr=False)

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

    def space(self, md: Multidegree) -> Subspace:
        try:
            return self.spaces[md]
        except KeyError:
            raise KeyError(f"no subspace stored at {md}") from None


def from_chain(chain: ChainCurve, r: int,
               spaces: Mapping[Multidegree, Subspace],
               provenance: dict | None = None) -> LlsInstance:
    """Instance over the chain backend; ambient data is shared and cached."""
    skel = chain_model.skeleton(chain)
    return LlsInstance(chain.d, r, skel.ambient_dim, skel.maps, skel.vanishing,
                       dict(spaces), provenance)


def skeleton_of(inst: LlsInstance) -> SheafSkeleton:
    return SheafSkeleton(inst.d, dict(inst.ambient_dim), dict(inst.maps),
                         {md: dict(v) for md, v in inst.vanishing.items()})


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    witness: Vector | None
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "location": self.location, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


# Ambient-law results keyed by the identity of the shared map table, so
# many instances over one cached backend do not re-run the law suite.
_AMBIENT_LAW_CACHE: dict[int, tuple[object, LawReport]] = {}


def _ambient_law_report(inst: "LlsInstance") -> LawReport:
    key = id(inst.maps)
    hit = _AMBIENT_LAW_CACHE.get(key)
    if hit is not None and hit[0] is inst.maps:
        return hit[1]
    report = verify_sheaf_laws(skeleton_of(inst))
    _AMBIENT_LAW_CACHE[key] = (inst.maps, report)
    return report


def validate(inst: LlsInstance, ambient_laws: bool = True) -> ValidationReport:
    """Dimension, linking, and (optionally) ambient-law consistency.

    Verdicts are reported, never raised; each violation carries a witness
    vector where one makes sense (the first canonical basis vector breaking
    the relation).
    """
    violations: list[Violation] = []
    expected = inst.r + 1
    for md in inst.multidegrees:
        space = inst.spaces.get(md)
        if space is None:
            violations.append(Violation("dimension", f"{md}", None,
                                        "no subspace stored at this multidegree"))
            continue
        if space.ambient_dim != inst.ambient_dim[md]:
            violations.append(Violation("dimension", f"{md}", None,
                                        "subspace lives in the wrong ambient space"))
        elif space.dim != expected:
            violations.append(Violation(
                "dimension", f"{md}", None,
                f"dim {space.dim} instead of r+1 = {expected}"))
    for edge in inst.directed_edges():
        src = inst.spaces.get(edge.source)
        tgt = inst.spaces.get(edge.target)
        if src is None or tgt is None:
            continue
        if src.ambient_dim != inst.ambient_dim[edge.source]:
            continue
        pushed = src.apply(inst.maps[(edge.source, edge.target)])
        if not pushed <= tgt:
            witness = next(row for row in pushed.basis.row_list() if row not in tgt)
            violations.append(Violation(
                "linking", f"{edge.source}->{edge.target}", witness,
                "image of the chosen subspace leaves the target subspace"))
    if ambient_laws:
        law_report = _ambient_law_report(inst)
        for v in law_report.violations:
            violations.append(Violation("ambient-law", v.location, v.witness,
                                        f"{v.law}: {v.message}"))
    return ValidationReport(tuple(violations))


def vanishing_in_v(inst: LlsInstance, md: Multidegree,
                   components: Sequence[int]) -> Subspace:
    """Sections of the chosen subspace vanishing on the listed components."""
    comps = tuple(sorted(set(components)))
    if not comps:
        raise ValueError("components must be nonempty")
    key = (md, comps)
    cached = inst._van_cache.get(key)
    if cached is not None:
        return cached
    out = inst.space(md)
    for q in comps:
        out = out & inst.vanishing[md][q]
    inst._van_cache[key] = out
    return out


def vanishing_sum(inst: LlsInstance, md: Multidegree,
                  components: Sequence[int] = (1, 2, 3)) -> Subspace:
    """Sum of the single-component vanishing subspaces of the chosen space."""
    comps = tuple(components)
    key = (md, "sum", comps)
    cached = inst._van_cache.get(key)
    if cached is not None:
        return cached
    out = Subspace.zero(inst.space(md).ambient_dim)
    for q in comps:
        out = out + vanishing_in_v(inst, md, (q,))
    inst._van_cache[key] = out
    return out


@dataclass(frozen=True)
class EdgeExactness:
    edge: Edge
    image: Subspace
    constraint: Subspace
    exact: bool

    def to_json(self) -> dict:
        return {
            "from": self.edge.source.to_json(),
            "to": self.edge.target.to_json(),
            "direction": self.edge.direction.label,
            "image_dim": self.image.dim,
            "constraint_dim": self.constraint.dim,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class ExactnessReport:
    edges: tuple[EdgeExactness, ...]

    @property
    def exact(self) -> bool:
        return all(e.exact for e in self.edges)

    def failing_edges(self) -> list[Edge]:
        return [e.edge for e in self.edges if not e.exact]

    def to_json(self) -> dict:
        return {"exact": self.exact, "edges": [e.to_json() for e in self.edges]}


def edge_constraint(inst: LlsInstance, edge: Edge) -> Subspace:
    """The subspace an exact series must hit along this edge: the target's
    vanish-on-Xq space for a toward-Xq step, vanish-on-both-others for a
    from-Xq step."""
    q = edge.direction.component
    if edge.direction.is_toward:
        return vanishing_in_v(inst, edge.target, (q,))
    return vanishing_in_v(inst, edge.target, _other_components(q))


def exactness(inst: LlsInstance) -> ExactnessReport:
    """Per-edge image-versus-constraint comparison (vacuous at degree 0)."""
    def check(edge: Edge) -> EdgeExactness:
        pushed = inst.space(edge.source).apply(inst.maps[(edge.source, edge.target)])
        constraint = edge_constraint(inst, edge)
        return EdgeExactness(edge, pushed, constraint, pushed == constraint)
    return ExactnessReport(tuple(_pmap(check, inst.directed_edges())))


def distributive_at(inst: LlsInstance, md: Multidegree) -> bool:
    """Whether each vanishing subspace distributes over the other two.

    The three permuted statements are equivalent for any triple of
    subspaces, so they are all evaluated and must agree.
    """
    v = {q: vanishing_in_v(inst, md, (q,)) for q in (1, 2, 3)}
    verdicts = []
    for a, b, c in ((1, 2, 3), (2, 1, 3), (3, 1, 2)):
        lhs = v[a] & (v[b] + v[c])
        rhs = (v[a] & v[b]) + (v[a] & v[c])
        verdicts.append(lhs == rhs)
    assert verdicts[0] == verdicts[1] == verdicts[2], \
        "distributivity must be symmetric in the three subspaces"
    return verdicts[0]


@dataclass(frozen=True)
class GridCell:
    multidegree: Multidegree
    dim_v: int
    dim_vanish: tuple[int, int, int]
    dim_pairwise: tuple[int, int, int]  # dims of v1+v2, v1+v3, v2+v3
    dim_triple: int
    codim: int
    distributive: bool

    def to_json(self) -> dict:
        return {
            "multidegree": self.multidegree.to_json(),
            "dim_v": self.dim_v,
            "dim_vanish_x1": self.dim_vanish[0],
            "dim_vanish_x2": self.dim_vanish[1],
            "dim_vanish_x3": self.dim_vanish[2],
            "dim_v1_plus_v2": self.dim_pairwise[0],
            "dim_v1_plus_v3": self.dim_pairwise[1],
            "dim_v2_plus_v3": self.dim_pairwise[2],
            "dim_triple_sum": self.dim_triple,
            "codim": self.codim,
            "distributive": self.distributive,
        }


@dataclass(frozen=True)
class GridReport:
    d: int
    r: int
    cells: tuple[GridCell, ...]
    codim_sum: int
    exact: bool
    all_distributive: bool
    simple_by_criterion: bool
    inequality_holds: bool
    equivalence_consistent: bool

    def cell(self, md: Multidegree) -> GridCell:
        return next(c for c in self.cells if c.multidegree == md)

    def codims(self) -> list[int]:
        return [c.codim for c in self.cells]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "cells": [c.to_json() for c in self.cells],
            "codim_sum": self.codim_sum,
            "exact": self.exact,
            "all_distributive": self.all_distributive,
            "simple_by_criterion": self.simple_by_criterion,
            "inequality_holds": self.inequality_holds,
            "equivalence_consistent": self.equivalence_consistent,
        }


def codim_report(inst: LlsInstance) -> GridReport:
    """Full grid report, in grid order.

    The codimension at a node is ``(r+1) - dim`` of the sum of the three
    vanishing subspaces.  The report records whether the grid sum meets the
    lower bound ``r+1`` expected of exact series, and whether equality
    agrees with distributivity holding everywhere; ``simple_by_criterion``
    is the dimension-count characterisation (exact and sum equal to
    ``r+1``), decided without constructing a basis.
    """
    def cell(md: Multidegree) -> GridCell:
        v = {q: vanishing_in_v(inst, md, (q,)) for q in (1, 2, 3)}
        pairwise = ((v[1] + v[2]).dim, (v[1] + v[3]).dim, (v[2] + v[3]).dim)
        triple = vanishing_sum(inst, md).dim
        return GridCell(md, inst.space(md).dim,
                        (v[1].dim, v[2].dim, v[3].dim), pairwise, triple,
                        inst.r + 1 - triple, distributive_at(inst, md))

    cells = tuple(_pmap(cell, inst.multidegrees))
    codim_sum = sum(c.codim for c in cells)
    exact = exactness(inst).exact
    all_distributive = all(c.distributive for c in cells)
    return GridReport(
        inst.d, inst.r, cells, codim_sum, exact, all_distributive,
        simple_by_criterion=exact and codim_sum == inst.r + 1,
        inequality_holds=(not exact) or codim_sum >= inst.r + 1,
        equivalence_consistent=(not exact) or ((codim_sum == inst.r + 1) == all_distributive),
    )


def canonical_matrix(inst: LlsInstance, start: Multidegree, end: Multidegree) -> Matrix:
    """Composite matrix of the canonical walk in this instance's maps."""
    key = (start, end)
    cached = inst._canon_cache.get(key)
    if cached is not None:
        return cached
    out = Matrix.identity(inst.ambient_dim[start])
    for edge in canonical_path(start, end).edges():
        out = out @ inst.maps[(edge.source, edge.target)]
    inst._canon_cache[key] = out
    return out


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    location: str
    status: str  # "pass" | "fail" | "hypothesis-not-met"
    detail: str

    def to_json(self) -> dict:
        return {"identity": self.identity, "location": self.location,
                "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class IdentitySuiteReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def passed(self, identity: str | None = None) -> list[IdentityCheck]:
        return [c for c in self.checks
                if c.status == "pass" and (identity is None or c.identity == identity)]

    def by_status(self, status: str) -> list[IdentityCheck]:
        return [c for c in self.checks if c.status == status]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


def identity_suite(inst: LlsInstance) -> IdentitySuiteReport:
    """Evaluate the conditional dimension identities at every applicable
    multidegree pair.

    Each identity assumes exactness of one specific edge (its hypothesis);
    when the hypothesis fails, the check is reported ``hypothesis-not-met``
    rather than failed.  The catalogue, per node ``(i, j, l)``:

    * ``dim-gap-*``: the codimension of a pairwise vanishing sum equals a
      dimension gap at the companion node (diagonal, horizontal, vertical
      companions);
    * ``pushed-complement-decomposition``: complements of the vanish-on-X2
      space below push to a complement of vanish-on-X2 inside the sum
      vanish-on-X2 + vanish-on-X3;
    * ``vanishing-dim-step``: the vertical drop of the vanish-on-X2
      dimension equals the codimension of vanish-on-X2 + vanish-on-X3;
    * ``quotient-splitting-*``: the codimension of a pairwise sum splits as
      a triple-sum quotient plus a distributivity defect at the companion;
    * ``distributivity-dim-test-*``: distributivity at the companion holds
      exactly when the corresponding dimension gap closes (checked as a
      biconditional, both directions).
    """
    checks: list[IdentityCheck] = []
    rp1 = inst.r + 1

    def dim_v(md: Multidegree, comps: tuple[int, ...]) -> int:
        return vanishing_in_v(inst, md, comps).dim

    def dim_sum(md: Multidegree, parts: tuple[int, ...]) -> int:
        return vanishing_sum(inst, md, parts).dim

    def emit(identity: str, location: str, ok: bool, detail: str) -> None:
        checks.append(IdentityCheck(identity, location, "pass" if ok else "fail", detail))

    def skip(identity: str, location: str, why: str) -> None:
        checks.append(IdentityCheck(identity, location, "hypothesis-not-met", why))

    for md in inst.multidegrees:
        # Diagonal companion (toward-X2 edge from up-right into md).
        diag = md.up_right()
        if diag is not None:
            loc = f"{diag}->{md}"
            pushed = inst.space(diag).apply(inst.maps[(diag, md)])
            if pushed != vanishing_in_v(inst, md, (2,)):
                skip("dim-gap-diagonal", loc, "diagonal edge into the node is not exact")
            else:
                lhs = rp1 - dim_sum(diag, (1, 3))
                rhs = dim_v(md, (2,)) - (vanishing_in_v(inst, md, (1, 2))
                                         + vanishing_in_v(inst, md, (2, 3))).dim
                emit("dim-gap-diagonal", loc, lhs == rhs, f"{lhs} == {rhs}")

        # Horizontal companion (toward-X1 edge from md into its right).
        right = md.right()
        if right is not None:
            loc = f"{md}->{right}"
            pushed = inst.space(md).apply(inst.maps[(md, right)])
            hyp = pushed == vanishing_in_v(inst, right, (1,))
            names = ("dim-gap-horizontal", "quotient-splitting-horizontal",
                     "distributivity-dim-test-horizontal")
            if not hyp:
                for name in names:
                    skip(name, loc, "horizontal edge out of the node is not exact")
            else:
                lhs = rp1 - dim_sum(md, (2, 3))
                rhs = dim_v(right, (1,)) - (vanishing_in_v(inst, right, (1, 2))
                                            + vanishing_in_v(inst, right, (1, 3))).dim
                emit("dim-gap-horizontal", loc, lhs == rhs, f"{lhs} == {rhs}")

                lhs_q = rp1 - dim_sum(md, (2, 3))
                part1 = dim_sum(right, (1, 2, 3)) - dim_sum(right, (2, 3))
                defect_num = (vanishing_in_v(inst, right, (1,))
                              & vanishing_sum(inst, right, (2, 3))).dim
                defect_den = (vanishing_in_v(inst, right, (1, 2))
                              + vanishing_in_v(inst, right, (1, 3))).dim
                emit("quotient-splitting-horizontal", loc,
                     lhs_q == part1 + (defect_num - defect_den),
                     f"{lhs_q} == {part1} + {defect_num - defect_den}")

                gap_closed = (dim_sum(md, (2, 3)) - dim_sum(right, (2, 3))
                              == rp1 - dim_sum(right, (1, 2, 3)))
                emit("distributivity-dim-test-horizontal", loc,
                     distributive_at(inst, right) == gap_closed,
                     f"distributive={distributive_at(inst, right)} gap_closed={gap_closed}")

        # Vertical companion (toward-X3 edge from down into md).
        down = md.down()
        if down is not None:
            loc = f"{down}->{md}"
            pushed = inst.space(down).apply(inst.maps[(down, md)])
            hyp = pushed == vanishing_in_v(inst, md, (3,))
            names = ("dim-gap-vertical", "pushed-complement-decomposition",
                     "vanishing-dim-step", "quotient-splitting-vertical",
                     "distributivity-dim-test-vertical")
            if not hyp:
                for name in names:
                    skip(name, loc, "vertical edge into the node is not exact")
            else:
                lhs = rp1 - dim_sum(down, (1, 2))
                rhs = dim_v(md, (3,)) - (vanishing_in_v(inst, md, (1, 3))
                                         + vanishing_in_v(inst, md, (2, 3))).dim
                emit("dim-gap-vertical", loc, lhs == rhs, f"{lhs} == {rhs}")

                v2_below = vanishing_in_v(inst, down, (2,))
                vectors = complement_in(v2_below, inst.space(down))
                matrix = inst.maps[(down, md)]
                pushes = [vec_matmul(vec, matrix) for vec in vectors]
                pushed_span = Subspace.span(pushes, inst.ambient_dim[md])
                v2_here = vanishing_in_v(inst, md, (2,))
                ok = (pushed_span.dim == len(vectors)
                      and (pushed_span & v2_here).dim == 0
                      and (v2_here + pushed_span) == vanishing_sum(inst, md, (2, 3)))
                emit("pushed-complement-decomposition", loc, ok,
                     f"{len(vectors)} complement vectors push to an independent complement")

                lhs_s = dim_v(down, (2,)) - dim_v(md, (2,))
                rhs_s = rp1 - dim_sum(md, (2, 3))
                emit("vanishing-dim-step", loc, lhs_s == rhs_s, f"{lhs_s} == {rhs_s}")

                lhs_q = rp1 - dim_sum(down, (1, 2))
                part1 = dim_sum(md, (1, 2, 3)) - dim_sum(md, (1, 2))
                defect_num = (vanishing_in_v(inst, md, (3,))
                              & vanishing_sum(inst, md, (1, 2))).dim
                defect_den = (vanishing_in_v(inst, md, (1, 3))
                              + vanishing_in_v(inst, md, (2, 3))).dim
                emit("quotient-splitting-vertical", loc,
                     lhs_q == part1 + (defect_num - defect_den),
                     f"{lhs_q} == {part1} + {defect_num - defect_den}")

                gap_closed = (dim_sum(down, (1, 2)) - dim_sum(md, (1, 2))
                              == rp1 - dim_sum(md, (1, 2, 3)))
                emit("distributivity-dim-test-vertical", loc,
                     distributive_at(inst, md) == gap_closed,
                     f"distributive={distributive_at(inst, md)} gap_closed={gap_closed}")

    return IdentitySuiteReport(tuple(checks))


# ---------------------------------------------------------------------------
# Instance files.
#
# Layout: {"d": int, "r": int, "multidegrees": [[i,j,l], ...] in grid order,
# "ambient_dim": {"i,l": n}, "maps": [{"from": [i,j,l], "to": [i,j,l],
# "matrix": [["p/q", ...], ...]}, ...], "vanishing": {"i,l": {"X1": rows,
# "X2": rows, "X3": rows}}, "V": {"i,l": rows}}.  Keys are "i,l" because j
# is determined; matrices are row major and act on row vectors from the
# right.  A skeleton file is the same with "r": null and "V": {}.
# ---------------------------------------------------------------------------


class InstanceFormatError(ValueError):
    """Malformed instance file; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _md_key(md: Multidegree) -> str:
    return f"{md.i},{md.l}"


def _parse_md_key(key: str, d: int, where: str) -> Multidegree:
    try:
        i_str, l_str = key.split(",")
        i, l = int(i_str), int(l_str)
    except ValueError:
        raise InstanceFormatError(where, f"bad multidegree key {key!r}") from None
    j = d - i - l
    if i < 0 or l < 0 or j < 0:
        raise InstanceFormatError(where, f"multidegree key {key!r} out of range")
    return Multidegree(i, j, l)


def _parse_md_triple(value, d: int, where: str) -> Multidegree:
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(x, int) for x in value)):
        raise InstanceFormatError(where, "expected an [i, j, l] integer triple")
    i, j, l = value
    if min(i, j, l) < 0 or i + j + l != d:
        raise InstanceFormatError(where, f"{value} is not a multidegree of degree {d}")
    return Multidegree(i, j, l)


def _rows_to_json(m: Matrix) -> list[list[str]]:
    return m.to_strings()


def _subspace_rows(sub: Subspace) -> list[list[str]]:
    return sub.to_strings()


def _parse_rows(value, where: str) -> list[list]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise InstanceFormatError(where, "expected a list of rows")
    out = []
    for r_idx, row in enumerate(value):
        parsed = []
        for c_idx, entry in enumerate(row):
            if not isinstance(entry, str):
                raise InstanceFormatError(f"{where}[{r_idx}][{c_idx}]",
                                          "matrix entries must be rational strings")
            try:
                parsed.append(parse_rational(entry))
            except LinearAlgebraError as exc:
                raise InstanceFormatError(f"{where}[{r_idx}][{c_idx}]", str(exc)) from None
        out.append(parsed)
    return out


def instance_to_json(inst: LlsInstance) -> dict:
    grid = inst.multidegrees
    data: dict = {
        "d": inst.d,
        "r": inst.r,
        "multidegrees": [md.to_json() for md in grid],
        "ambient_dim": {_md_key(md): inst.ambient_dim[md] for md in grid},
        "maps": [],
        "vanishing": {
            _md_key(md): {f"X{q}": _subspace_rows(inst.vanishing[md][q]) for q in (1, 2, 3)}
            for md in grid
        },
        "V": {_md_key(md): _subspace_rows(inst.spaces[md])
              for md in grid if md in inst.spaces},
    }
    for md in grid:
        for direction in Direction:
            target = md.step(direction)
            if target is not None:
                data["maps"].append({
                    "from": md.to_json(),
                    "to": target.to_json(),
                    "matrix": _rows_to_json(inst.maps[(md, target)]),
                })
    if inst.provenance:
        data["provenance"] = inst.provenance
    return data


def _parse_common(data: dict, need_r: bool):
    if not isinstance(data, dict):
        raise InstanceFormatError("$", "top level must be an object")
    d = data.get("d")
    if not isinstance(d, int) or d < 0:
        raise InstanceFormatError("d", "must be a nonnegative integer")
    r = data.get("r")
    if need_r and (not isinstance(r, int) or r < 0):
        raise InstanceFormatError("r", "must be a nonnegative integer")
    grid = all_multidegrees(d)
    mds = data.get("multidegrees")
    if mds is not None:
        parsed = [_parse_md_triple(v, d, f"multidegrees[{k}]") for k, v in enumerate(mds)]
        if tuple(parsed) != grid:
            raise InstanceFormatError("multidegrees", "not the grid order enumeration")
    ambient_field = data.get("ambient_dim")
    if not isinstance(ambient_field, dict):
        raise InstanceFormatError("ambient_dim", "must be an object")
    ambient: dict[Multidegree, int] = {}
    for key, value in ambient_field.items():
        md = _parse_md_key(key, d, f"ambient_dim.{key}")
        if not isinstance(value, int) or value < 0:
            raise InstanceFormatError(f"ambient_dim.{key}", "must be a nonnegative integer")
        ambient[md] = value
    for md in grid:
        if md not in ambient:
            raise InstanceFormatError("ambient_dim", f"missing entry for {md}")

    maps_field = data.get("maps")
    if not isinstance(maps_field, list):
        raise InstanceFormatError("maps", "must be a list")
    maps: dict[tuple[Multidegree, Multidegree], Matrix] = {}
    for idx, entry in enumerate(maps_field):
        where = f"maps[{idx}]"
        if not isinstance(entry, dict):
            raise InstanceFormatError(where, "must be an object")
        src = _parse_md_triple(entry.get("from"), d, f"{where}.from")
        tgt = _parse_md_triple(entry.get("to"), d, f"{where}.to")
        rows = _parse_rows(entry.get("matrix"), f"{where}.matrix")
        if len(rows) != ambient[src] or any(len(row) != ambient[tgt] for row in rows):
            raise InstanceFormatError(f"{where}.matrix",
                                      f"expected shape {ambient[src]}x{ambient[tgt]}")
        if (src, tgt) in maps:
            raise InstanceFormatError(where, "duplicate edge")
        maps[(src, tgt)] = Matrix.from_rows(rows, cols=ambient[tgt])
    for md in grid:
        for direction in Direction:
            target = md.step(direction)
            if target is not None and (md, target) not in maps:
                raise InstanceFormatError("maps", f"missing edge {md}->{target}")

    vanishing_field = data.get("vanishing")
    if not isinstance(vanishing_field, dict):
        raise InstanceFormatError("vanishing", "must be an object")
    vanishing: dict[Multidegree, dict[int, Subspace]] = {}
    for key, triple in vanishing_field.items():
        md = _parse_md_key(key, d, f"vanishing.{key}")
        if not isinstance(triple, dict):
            raise InstanceFormatError(f"vanishing.{key}", "must be an object")
        per = {}
        for q in (1, 2, 3):
            rows = _parse_rows(triple.get(f"X{q}", None) or [], f"vanishing.{key}.X{q}")
            if any(len(row) != ambient[md] for row in rows):
                raise InstanceFormatError(f"vanishing.{key}.X{q}",
                                          f"rows must have length {ambient[md]}")
            per[q] = Subspace.span(rows, ambient[md])
        vanishing[md] = per
    for md in grid:
        if md not in vanishing:
            raise InstanceFormatError("vanishing", f"missing entry for {md}")
    return d, r, ambient, maps, vanishing


def instance_from_json(data: dict) -> LlsInstance:
    d, r, ambient, maps, vanishing = _parse_common(data, need_r=True)
    v_field = data.get("V")
    if not isinstance(v_field, dict):
        raise InstanceFormatError("V", "must be an object")
    spaces: dict[Multidegree, Subspace] = {}
    for key, rows in v_field.items():
        md = _parse_md_key(key, d, f"V.{key}")
        parsed = _parse_rows(rows, f"V.{key}")
        if any(len(row) != ambient[md] for row in parsed):
            raise InstanceFormatError(f"V.{key}", f"rows must have length {ambient[md]}")
        spaces[md] = Subspace.span(parsed, ambient[md])
    provenance = data.get("provenance")
    return LlsInstance(d, r, ambient, maps, vanishing, spaces, provenance)


def skeleton_to_json(skel: SheafSkeleton) -> dict:
    inst = LlsInstance(skel.d, 0, skel.ambient_dim, skel.maps, skel.vanishing, {})
    data = instance_to_json(inst)
    data["r"] = None
    data["V"] = {}
    return data


def skeleton_from_json(data: dict) -> SheafSkeleton:
    d, _, ambient, maps, vanishing = _parse_common(data, need_r=False)
    return SheafSkeleton(d, ambient, maps, vanishing)


def _dump(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def save_instance(path, inst: LlsInstance) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(_dump(instance_to_json(inst)))


def load_instance(path) -> LlsInstance:
    with open(path, "r", encoding="utf-8") as handle:
        return instance_from_json(json.load(handle))


def save_skeleton(path, skel: SheafSkeleton) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(_dump(skeleton_to_json(skel)))


def load_skeleton(path) -> SheafSkeleton:
    with open(path, "r", encoding="utf-8") as handle:
        return skeleton_from_json(json.load(handle))
