"""Exact dense linear algebra over the rationals.

Conventions used by the whole package:

* vectors are rows, and a linear map acts by right multiplication, so the
  image of a subspace under a map is ``basis @ matrix``;
* a subspace is stored as the reduced row echelon basis of its row space,
  which is the unique canonical representative, so two subspaces are equal
  exactly when their basis matrices are equal;
* every coefficient is a :class:`fractions.Fraction` (arbitrary precision,
  lowest terms, positive denominator).  No floating point anywhere.

Rationals serialize as ``"p/q"``, or ``"p"`` when the denominator is one,
with the sign carried by the numerator; this is exactly ``str(Fraction)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
Vector = tuple[Fraction, ...]

__all__ = [
    "Rational",
    "Vector",
    "LinearAlgebraError",
    "parse_rational",
    "format_rational",
    "as_vector",
    "Matrix",
    "rref",
    "rref_with_transform",
    "kernel",
    "image",
    "preimage",
    "Subspace",
    "complement_in",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LinearAlgebraError(ValueError):
    """Structural misuse: mismatched ambient dimensions, bad containments."""


def parse_rational(text: str) -> Fraction:
    """Parse the canonical string form ``p`` or ``p/q``."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise LinearAlgebraError(f"invalid rational literal {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Canonical string form, lowest terms, sign on the numerator."""
    return str(Fraction(value))


def as_vector(entries: Iterable) -> Vector:
    return tuple(Fraction(e) for e in entries)


def _unit_vector(size: int, position: int) -> Vector:
    return tuple(_ONE if k == position else _ZERO for k in range(size))


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with row-major rational entries."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise LinearAlgebraError("negative matrix dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise LinearAlgebraError("entry count does not match dimensions")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = [as_vector(r) for r in rows]
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise LinearAlgebraError("ragged rows")
            if cols is not None and cols != width:
                raise LinearAlgebraError("rows do not match requested width")
        else:
            if cols is None:
                raise LinearAlgebraError("empty matrix needs an explicit width")
            width = cols
        return Matrix(len(data), width, tuple(itertools.chain.from_iterable(data)))

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(_ONE if i == j else _ZERO for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, (_ZERO,) * (rows * cols))

    def row(self, k: int) -> Vector:
        return self.entries[k * self.cols:(k + 1) * self.cols]

    def row_list(self) -> list[Vector]:
        return [self.row(k) for k in range(self.rows)]

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(self.entries[i * self.cols + j]
                            for j in range(self.cols) for i in range(self.rows)))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise LinearAlgebraError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out: list[Fraction] = []
        orows = other.row_list()
        for i in range(self.rows):
            acc = [_ZERO] * other.cols
            base = i * self.cols
            for k in range(self.cols):
                coeff = self.entries[base + k]
                if coeff == 0:
                    continue
                orow = orows[k]
                for j in range(other.cols):
                    if orow[j] != 0:
                        acc[j] += coeff * orow[j]
            out.extend(acc)
        return Matrix(self.rows, other.cols, tuple(out))

    def with_entry(self, i: int, j: int, value) -> "Matrix":
        """Copy with one entry replaced (handy for perturbation tests)."""
        entries = list(self.entries)
        entries[i * self.cols + j] = Fraction(value)
        return Matrix(self.rows, self.cols, tuple(entries))

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(e) for e in self.row(k)] for k in range(self.rows)]

    @staticmethod
    def from_strings(rows: Sequence[Sequence[str]], cols: int | None = None) -> "Matrix":
        return Matrix.from_rows([[parse_rational(e) for e in r] for r in rows], cols=cols)


def vec_matmul(v: Sequence, m: Matrix) -> Vector:
    """Row vector times matrix."""
    vv = as_vector(v)
    if len(vv) != m.rows:
        raise LinearAlgebraError(f"vector of length {len(vv)} times {m.rows}x{m.cols} matrix")
    acc = [_ZERO] * m.cols
    for k, coeff in enumerate(vv):
        if coeff == 0:
            continue
        row = m.row(k)
        for j in range(m.cols):
            if row[j] != 0:
                acc[j] += coeff * row[j]
    return tuple(acc)


def _rref_rows(rows: list[list[Fraction]], width: int, extra: int = 0) -> list[int]:
    """In-place Gauss-Jordan on ``rows``; pivots only in the first ``width``
    columns (the remaining ``extra`` columns ride along, e.g. a transform)."""
    pivots: list[int] = []
    pr = 0
    nrows = len(rows)
    for pc in range(width):
        pivot_row = None
        for k in range(pr, nrows):
            if rows[k][pc] != 0:
                pivot_row = k
                break
        if pivot_row is None:
            continue
        rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
        lead = rows[pr][pc]
        if lead != 1:
            rows[pr] = [e / lead for e in rows[pr]]
        prow = rows[pr]
        for k in range(nrows):
            if k == pr:
                continue
            factor = rows[k][pc]
            if factor == 0:
                continue
            rows[k] = [e - factor * p for e, p in zip(rows[k], prow)]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return pivots


def rref(matrix: Matrix) -> tuple[Matrix, tuple[int, ...], int]:
    """Reduced row echelon form, pivot columns, and rank."""
    rows = [list(matrix.row(k)) for k in range(matrix.rows)]
    pivots = _rref_rows(rows, matrix.cols)
    return (Matrix.from_rows(rows, cols=matrix.cols), tuple(pivots), len(pivots))


def rref_with_transform(matrix: Matrix) -> tuple[Matrix, Matrix, tuple[int, ...]]:
    """Return ``(R, T, pivots)`` with ``T @ matrix == R`` and ``T`` invertible."""
    n = matrix.rows
    rows = [list(matrix.row(k)) + [_ONE if t == k else _ZERO for t in range(n)]
            for k in range(n)]
    pivots = _rref_rows(rows, matrix.cols, extra=n)
    reduced = Matrix.from_rows([r[:matrix.cols] for r in rows], cols=matrix.cols)
    transform = Matrix.from_rows([r[matrix.cols:] for r in rows], cols=n)
    return reduced, transform, tuple(pivots)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n in canonical (RREF basis) form."""

    ambient_dim: int
    basis: Matrix

    @staticmethod
    def span(vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [as_vector(v) for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise LinearAlgebraError(
                    f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        reduced, _, rank = rref(Matrix.from_rows(rows, cols=ambient_dim))
        return Subspace(ambient_dim, Matrix.from_rows(reduced.row_list()[:rank],
                                                      cols=ambient_dim))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.zeros(0, ambient_dim))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def pivots(self) -> tuple[int, ...]:
        out = []
        for k in range(self.basis.rows):
            row = self.basis.row(k)
            out.append(next(j for j, e in enumerate(row) if e != 0))
        return tuple(out)

    def reduce(self, vector: Sequence) -> Vector:
        """Residual of ``vector`` after subtracting its projection onto the
        pivot coordinates; zero exactly when the vector lies in the space."""
        v = list(as_vector(vector))
        if len(v) != self.ambient_dim:
            raise LinearAlgebraError("ambient dimension mismatch")
        for k, p in enumerate(self.pivots()):
            coeff = v[p]
            if coeff == 0:
                continue
            row = self.basis.row(k)
            for j in range(self.ambient_dim):
                if row[j] != 0:
                    v[j] -= coeff * row[j]
        return tuple(v)

    def __contains__(self, vector: Sequence) -> bool:
        return all(e == 0 for e in self.reduce(vector))

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.span(self.basis.row_list() + other.basis.row_list(),
                             self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        """Intersection via the stacked-kernel construction: relations
        x·A = y·B are the left kernel of the stacked matrix [A; -B]."""
        self._check_ambient(other)
        p, q = self.dim, other.dim
        if p == 0 or q == 0:
            return Subspace.zero(self.ambient_dim)
        stacked = Matrix.from_rows(
            self.basis.row_list() + [tuple(-e for e in r) for r in other.basis.row_list()],
            cols=self.ambient_dim)
        relations = kernel(stacked)
        vectors = [vec_matmul(rel[:p], self.basis) for rel in relations.basis.row_list()]
        return Subspace.span(vectors, self.ambient_dim)

    def __le__(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(row in other for row in self.basis.row_list())

    def apply(self, matrix: Matrix) -> "Subspace":
        """Image of this subspace under the map ``v -> v @ matrix``."""
        if matrix.rows != self.ambient_dim:
            raise LinearAlgebraError("map domain does not match ambient dimension")
        return Subspace.span((self.basis @ matrix).row_list(), matrix.cols)

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise LinearAlgebraError(
                f"ambient mismatch: {self.ambient_dim} vs {other.ambient_dim}")

    def to_strings(self) -> list[list[str]]:
        return self.basis.to_strings()

    @staticmethod
    def from_strings(rows: Sequence[Sequence[str]], ambient_dim: int) -> "Subspace":
        return Subspace.span([[parse_rational(e) for e in r] for r in rows], ambient_dim)


def kernel(matrix: Matrix) -> Subspace:
    """Left kernel ``{v : v @ matrix = 0}`` as a subspace of Q^rows."""
    reduced, transform, pivots = rref_with_transform(matrix)
    rank = len(pivots)
    rows = [transform.row(k) for k in range(rank, matrix.rows)]
    return Subspace.span(rows, matrix.rows)


def image(matrix: Matrix) -> Subspace:
    """Row space of the matrix, i.e. the image of the full domain."""
    return Subspace.span(matrix.row_list(), matrix.cols)


def preimage(matrix: Matrix, target: Subspace) -> Subspace:
    """``{v : v @ matrix in target}`` as a subspace of Q^rows."""
    if matrix.cols != target.ambient_dim:
        raise LinearAlgebraError("map codomain does not match target ambient")
    n = target.ambient_dim
    rows = [list(_unit_vector(n, j)) for j in range(n)]
    for k, p in enumerate(target.pivots()):
        rows[p] = [a - b for a, b in zip(rows[p], target.basis.row(k))]
    reducer = Matrix.from_rows(rows, cols=n)
    return kernel(matrix @ reducer)


def complement_in(inner: Subspace, outer: Subspace,
                  preferred: Sequence[Sequence] = ()) -> list[Vector]:
    """Vectors extending a basis of ``inner`` to one of ``outer``.

    Candidates are scanned in a fixed order (any ``preferred`` vectors, then
    the RREF basis rows of ``outer``, then standard basis vectors) and taken
    greedily whenever they increase the span, so the result is reproducible.
    Candidates outside ``outer`` are skipped.
    """
    inner._check_ambient(outer)
    if not inner <= outer:
        raise LinearAlgebraError("inner subspace is not contained in outer")
    n = outer.ambient_dim
    extension: list[Vector] = []
    span = inner
    candidates = itertools.chain(
        (as_vector(v) for v in preferred),
        outer.basis.row_list(),
        (_unit_vector(n, j) for j in range(n)),
    )
    for cand in candidates:
        if span.dim == outer.dim:
            break
        if cand not in outer:
            continue
        if cand not in span:
            extension.append(cand)
            span = span + Subspace.span([cand], n)
    if span != outer:
        raise LinearAlgebraError("failed to complete the basis (candidate exhaustion)")
    return extension
