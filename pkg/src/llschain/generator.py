"""Seeded instance synthesis: simple-by-construction series, a backtracking
search for exact series, and negative controls.

All randomness flows through one ``random.Random`` seeded from the spec, so
a given spec always produces the same instance (and byte-identical files).
Random rationals are integers in ``[-entry_bound, entry_bound]``; exact
elimination keeps entry growth tame at this scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from . import chain_model, lls_core, simple_basis
from .chain_model import ChainCurve
from .exactla import Matrix, Subspace, Vector, complement_in, vec_matmul
from .lattice import Direction, Edge, Multidegree, all_multidegrees
from .lls_core import LlsInstance, edge_constraint, exactness, from_chain, validate

__all__ = [
    "GenSpec",
    "GenerationError",
    "GenResult",
    "gen_simple",
    "SearchResult",
    "gen_exact_search",
    "DegradeResult",
    "degrade",
    "DEGRADE_MODES",
]

STRATEGIES = ("from-sections", "exact-search", "degrade")
DEGRADE_MODES = ("break-linking", "break-exactness", "shrink-V")


class GenerationError(RuntimeError):
    """Retry or search budget exhausted."""


@dataclass(frozen=True)
class GenSpec:
    d: int
    r: int
    strategy: str = "from-sections"
    seed: int = 0
    budget: int = 2000
    entry_bound: int = 9
    max_candidates: int = 8
    retry_limit: int = 200

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.r + 1 > self.d + 1:
            raise ValueError(f"r+1 = {self.r + 1} exceeds the ambient bound d+1 = {self.d + 1}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.entry_bound <= 0:
            raise ValueError("entry bound must be positive")

    def provenance(self, **extra) -> dict:
        out = {"d": self.d, "r": self.r, "strategy": self.strategy,
               "seed": self.seed, "budget": self.budget,
               "entry_bound": self.entry_bound}
        out.update(extra)
        return out


def _random_vector(rng: random.Random, length: int, bound: int) -> Vector:
    return tuple(Fraction(rng.randint(-bound, bound)) for _ in range(length))


def _random_subspace(rng: random.Random, ambient: int, dim: int, bound: int,
                     tries: int = 64) -> Subspace:
    for _ in range(tries):
        candidate = Subspace.span(
            [_random_vector(rng, ambient, bound) for _ in range(dim)], ambient)
        if candidate.dim == dim:
            return candidate
    raise GenerationError("could not draw a random subspace of the requested dimension")


@dataclass(frozen=True)
class GenResult:
    instance: LlsInstance
    certificate: simple_basis.SimpleCertificate
    attempts: int


def gen_simple(spec: GenSpec) -> GenResult:
    """Draw random support multidegrees and sections, then span the whole
    series by canonical pushes.

    The chosen spaces are the spans of all pushed sections; a draw is kept
    only when every space reaches dimension ``r+1`` (equivalently, the
    drawn data verifies as a certificate), otherwise the next seeded draw
    is tried.  There is no a-priori criterion for which support patterns
    force dependent pushes, so bad draws are simply retried.
    """
    if spec.strategy != "from-sections":
        raise ValueError("gen_simple needs the from-sections strategy")
    rng = random.Random(spec.seed)
    chain = ChainCurve(spec.d)
    grid = all_multidegrees(spec.d)
    rp1 = spec.r + 1
    for attempt in range(1, spec.retry_limit + 1):
        m = rng.randint(1, rp1)
        support = sorted(rng.sample(range(len(grid)), m))
        cuts = sorted(rng.sample(range(1, rp1), m - 1))
        counts = [b - a for a, b in zip([0] + cuts, cuts + [rp1])]
        sections: dict[Multidegree, tuple[Vector, ...]] = {}
        ok = True
        for idx, count in zip(support, counts):
            md = grid[idx]
            vecs = [_random_vector(rng, spec.d + 1, spec.entry_bound)
                    for _ in range(count)]
            if Subspace.span(vecs, spec.d + 1).dim != count:
                ok = False
                break
            normalised = Subspace.span(vecs, spec.d + 1).basis.row_list()
            sections[md] = tuple(normalised)
        if not ok:
            continue
        support_mds = tuple(grid[idx] for idx in support)
        spaces: dict[Multidegree, Subspace] = {}
        for md in grid:
            pushes = []
            for support_md in support_mds:
                matrix = chain_model.canonical_matrix(chain, support_md, md)
                pushes.extend(vec_matmul(s, matrix) for s in sections[support_md])
            span = Subspace.span(pushes, spec.d + 1)
            if span.dim != rp1:
                ok = False
                break
            spaces[md] = span
        if not ok:
            continue
        instance = from_chain(chain, spec.r, spaces,
                              provenance=spec.provenance(attempt=attempt))
        certificate = simple_basis.SimpleCertificate(support_mds, sections)
        check = simple_basis.verify_certificate(instance, certificate)
        if check.ok:
            return GenResult(instance, certificate, attempt)
    raise GenerationError(
        f"no simple draw found in {spec.retry_limit} attempts (seed {spec.seed})")


@dataclass(frozen=True)
class SearchResult:
    instance: LlsInstance | None
    expansions: int
    distributive: bool | None
    codim_sum: int | None
    note: str

    @property
    def found(self) -> bool:
        return self.instance is not None


def gen_exact_search(spec: GenSpec) -> SearchResult:
    """Backtracking search for an exact series over the chain backend.

    Nodes are filled in grid order.  At each node the admissible spaces
    sit between the sum of images forced by assigned neighbours and the
    intersection of preimage constraints; up to ``max_candidates`` random
    spaces are sampled inside that freedom, and a candidate is kept only
    if every edge into the assigned region is exact, so a completed
    assignment is exact by construction (and replayed through the full
    checker anyway).  The note records whether the found instance is
    distributive everywhere, flagging any exact-but-nondistributive find.
    """
    if spec.strategy != "exact-search":
        raise ValueError("gen_exact_search needs the exact-search strategy")
    rng = random.Random(spec.seed)
    chain = ChainCurve(spec.d)
    skel = chain_model.skeleton(chain)
    grid = all_multidegrees(spec.d)
    rp1 = spec.r + 1
    expansions = 0

    def assigned_neighbours(md: Multidegree, assigned: dict) -> list[Multidegree]:
        return [t for _, t in md.neighbours() if t in assigned]

    def ambient_vanishing(md: Multidegree, comps: Sequence[int]) -> Subspace:
        out = skel.vanishing[md][comps[0]]
        for q in comps[1:]:
            out = out & skel.vanishing[md][q]
        return out

    def edge_exact(source_md, source_space, target_md, target_space) -> bool:
        edge = next(Edge(source_md, t, dirn) for dirn, t in source_md.neighbours()
                    if t == target_md)
        pushed = source_space.apply(skel.maps[(source_md, target_md)])
        q = edge.direction.component
        if edge.direction.is_toward:
            constraint = target_space & skel.vanishing[target_md][q]
        else:
            others = tuple(p for p in (1, 2, 3) if p != q)
            constraint = target_space & ambient_vanishing(target_md, others)
        return pushed == constraint

    def candidates(md: Multidegree, assigned: dict) -> list[Subspace]:
        ambient = spec.d + 1
        lower = Subspace.zero(ambient)
        upper = Subspace.full(ambient)
        for n in assigned_neighbours(md, assigned):
            lower = lower + assigned[n].apply(skel.maps[(n, md)])
            upper = upper & _preimage(skel.maps[(md, n)], assigned[n])
        if lower.dim > rp1 or upper.dim < rp1 or not lower <= upper:
            return []
        found: list[Subspace] = []
        seen = set()
        if lower.dim == rp1:
            trial = [lower]
        else:
            free = complement_in(lower, upper)
            needed = rp1 - lower.dim
            trial = []
            for _ in range(spec.max_candidates * 6):
                if len(trial) >= spec.max_candidates:
                    break
                extra = []
                for _ in range(needed):
                    coeffs = [Fraction(rng.randint(-spec.entry_bound, spec.entry_bound))
                              for _ in free]
                    vec = tuple(sum(c * row[k] for c, row in zip(coeffs, free))
                                for k in range(ambient))
                    extra.append(vec)
                candidate = Subspace.span(list(lower.basis.row_list()) + extra, ambient)
                if candidate.dim == rp1 and candidate.basis not in seen:
                    seen.add(candidate.basis)
                    trial.append(candidate)
        for candidate in trial:
            if all(edge_exact(md, candidate, n, assigned[n])
                   and edge_exact(n, assigned[n], md, candidate)
                   for n in assigned_neighbours(md, assigned)):
                found.append(candidate)
        return found

    def dfs(position: int, assigned: dict) -> dict | None:
        nonlocal expansions
        if position == len(grid):
            return dict(assigned)
        md = grid[position]
        for candidate in candidates(md, assigned):
            expansions += 1
            if expansions > spec.budget:
                raise GenerationError("budget")
            assigned[md] = candidate
            result = dfs(position + 1, assigned)
            if result is not None:
                return result
            del assigned[md]
        return None

    try:
        assignment = dfs(0, {})
    except GenerationError:
        return SearchResult(None, expansions, None, None,
                            f"NotFound(budget={spec.budget})")
    if assignment is None:
        return SearchResult(None, expansions, None, None, "NotFound(exhausted)")
    instance = from_chain(chain, spec.r, assignment,
                          provenance=spec.provenance(expansions=expansions))
    replay = exactness(instance)
    if not replay.exact:
        raise GenerationError("search postcondition failed: found instance is not exact")
    report = lls_core.codim_report(instance)
    note = ("exact-distributive" if report.all_distributive
            else "exact-nondistributive")
    return SearchResult(instance, expansions, report.all_distributive,
                        report.codim_sum, note)


def _preimage(matrix: Matrix, target: Subspace) -> Subspace:
    from .exactla import preimage
    return preimage(matrix, target)


@dataclass(frozen=True)
class DegradeResult:
    instance: LlsInstance
    mode: str
    location: str
    detail: str


def degrade(inst: LlsInstance, mode: str, seed: int = 0) -> DegradeResult:
    """Minimally perturb a valid instance so that exactly the named check
    fails, and record the injected defect.

    * ``shrink-V``: drop one basis vector at the first multidegree, so
      validation reports a dimension violation there;
    * ``break-linking``: replace one space by a random same-dimension
      space violating a linking inclusion, so validation reports that
      edge (dimensions stay correct);
    * ``break-exactness``: replace one space within the linking freedom of
      its neighbours so validation still passes but some adjacent edge
      stops being exact; when the instance is rigid (every node pinned by
      its neighbours), fall back to redrawing the whole assignment under
      the linking constraints until exactness breaks.
    """
    if mode not in DEGRADE_MODES:
        raise ValueError(f"unknown degrade mode {mode!r}")
    rng = random.Random(seed)
    grid = inst.multidegrees
    rp1 = inst.r + 1

    def with_space(md: Multidegree, space: Subspace) -> LlsInstance:
        spaces = dict(inst.spaces)
        spaces[md] = space
        return LlsInstance(inst.d, inst.r, inst.ambient_dim, inst.maps,
                           inst.vanishing, spaces,
                           provenance={"degraded_from": inst.provenance,
                                       "mode": mode, "at": md.to_json()})

    if mode == "shrink-V":
        md = grid[0]
        shrunk = Subspace.span(inst.space(md).basis.row_list()[1:],
                               inst.ambient_dim[md])
        out = with_space(md, shrunk)
        return DegradeResult(out, mode, f"{md}",
                             f"dropped one basis vector at {md}")

    if mode == "break-linking":
        for md in grid:
            neighbours = [t for _, t in md.neighbours()]
            if not neighbours:
                continue
            for _ in range(200):
                candidate = _random_subspace(rng, inst.ambient_dim[md], rp1, 9)
                out = with_space(md, candidate)
                report = validate(out, ambient_laws=False)
                linking = [v for v in report.violations if v.kind == "linking"]
                if linking and not any(v.kind == "dimension" for v in report.violations):
                    return DegradeResult(out, mode, linking[0].location,
                                         f"replaced the space at {md}")
        raise GenerationError("break-linking found no perturbation")

    # break-exactness, phase 1: perturb one node inside its linking freedom.
    for md in grid:
        lower = Subspace.zero(inst.ambient_dim[md])
        upper = Subspace.full(inst.ambient_dim[md])
        for _, n in md.neighbours():
            lower = lower + inst.space(n).apply(inst.maps[(n, md)])
            upper = upper & _preimage(inst.maps[(md, n)], inst.space(n))
        if lower.dim > rp1 or upper.dim < rp1 or not lower <= upper:
            continue
        if upper.dim == lower.dim:
            continue
        free = complement_in(lower, upper)
        needed = rp1 - lower.dim
        if needed <= 0:
            continue
        for _ in range(200):
            extra = []
            for _ in range(needed):
                coeffs = [Fraction(rng.randint(-9, 9)) for _ in free]
                extra.append(tuple(sum(c * row[k] for c, row in zip(coeffs, free))
                                   for k in range(inst.ambient_dim[md])))
            candidate = Subspace.span(list(lower.basis.row_list()) + extra,
                                      inst.ambient_dim[md])
            if candidate.dim != rp1 or candidate == inst.space(md):
                continue
            out = with_space(md, candidate)
            if not validate(out, ambient_laws=False).ok:
                continue
            report = exactness(out)
            failing = report.failing_edges()
            if failing:
                touched = [e for e in failing
                           if e.source == md or e.target == md]
                if touched and len(touched) == len(failing):
                    first = touched[0]
                    return DegradeResult(
                        out, mode, f"{first.source}->{first.target}",
                        f"replaced the space at {md} within its linking freedom")

    # Phase 2: some exact instances are rigid (every node pinned by its
    # neighbours), so redraw the whole assignment under the linking
    # constraints alone, with a deliberately non-generic bias around one
    # edge: bury the source in the kernel of the edge map and soak the
    # target in the vanishing subspace defining the edge constraint.
    # Generic linked draws come out exact; this bias is what breaks it.
    from .exactla import kernel

    for a in grid:
        for direction, b in a.neighbours():
            q = direction.component
            if direction.is_toward:
                target_vanishing = inst.vanishing[b][q]
            else:
                others = tuple(p for p in (1, 2, 3) if p != q)
                target_vanishing = (inst.vanishing[b][others[0]]
                                    & inst.vanishing[b][others[1]])
            bias = {a: kernel(inst.maps[(a, b)]), b: target_vanishing}
            drawn = _biased_linked_draw(inst, bias)
            if drawn is None:
                continue
            out = LlsInstance(inst.d, inst.r, inst.ambient_dim, inst.maps,
                              inst.vanishing, drawn,
                              provenance={"degraded_from": inst.provenance,
                                          "mode": mode, "at": None})
            report = exactness(out)
            failing = report.failing_edges()
            if failing and validate(out, ambient_laws=False).ok:
                first = failing[0]
                return DegradeResult(out, mode, f"{first.source}->{first.target}",
                                     "redrew the assignment with a degenerate bias "
                                     f"around {a}->{b}")
    raise GenerationError("break-exactness found no perturbation")


def _biased_linked_draw(inst: LlsInstance,
                        bias: dict[Multidegree, Subspace]) -> dict | None:
    """One sequential linked assignment in grid order, extending each forced
    lower bound by preferred directions (the bias) before generic ones."""
    assigned: dict[Multidegree, Subspace] = {}
    rp1 = inst.r + 1
    for md in inst.multidegrees:
        ambient = inst.ambient_dim[md]
        lower = Subspace.zero(ambient)
        upper = Subspace.full(ambient)
        for _, n in md.neighbours():
            if n in assigned:
                lower = lower + assigned[n].apply(inst.maps[(n, md)])
                upper = upper & _preimage(inst.maps[(md, n)], assigned[n])
        if lower.dim > rp1 or upper.dim < rp1 or not lower <= upper:
            return None
        preferred = ()
        if md in bias:
            preferred = (bias[md] & upper).basis.row_list()
        extension = complement_in(lower, upper, preferred=preferred)
        vectors = list(lower.basis.row_list()) + extension[:rp1 - lower.dim]
        candidate = Subspace.span(vectors, ambient)
        if candidate.dim != rp1:
            return None
        assigned[md] = candidate
    return assigned
