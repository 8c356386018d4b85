"""Projective geometry over finite fields: subspaces, point sets, spectra.

Subspaces of F_q^v are stored by their unique reduced row-echelon basis
matrix, so equal subspaces compare equal.  Points are normalized nonzero
vectors (first nonzero coordinate 1) representing 1-dimensional subspaces.
Point sets may carry multiplicities; all derived quantities (hyperplane
spectra, divisibility verdicts, standard-equation residuals) are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field
from math import comb

from .budget import check_point_count
from .errors import InconsistentInput, NotNested, RangeError
from .gf import gaussian_binomial

Vector = tuple[int, ...]


# ---------------------------------------------------------------------------
# elimination


def rref(field, rows, width: int) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(r) for r in rows]
    for r in mat:
        if len(r) != width:
            raise InconsistentInput(f"row of length {len(r)}, expected {width}")
    pivots: list[int] = []
    rank = 0
    for col in range(width):
        pivot_row = None
        for i in range(rank, len(mat)):
            if mat[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[rank], mat[pivot_row] = mat[pivot_row], mat[rank]
        inv = field.inv(mat[rank][col])
        if inv != 1:
            mat[rank] = [field.mul(inv, x) for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                c = mat[i][col]
                mat[i] = [
                    field.sub(x, field.mul(c, y)) for x, y in zip(mat[i], mat[rank])
                ]
        pivots.append(col)
        rank += 1
    return tuple(tuple(r) for r in mat[:rank]), tuple(pivots)


def matrix_rank(field, rows, width: int) -> int:
    return len(rref(field, rows, width)[0])


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^v in canonical (reduced row-echelon) form."""

    field: object = dataclass_field(compare=False, hash=False)
    v: int = 0
    matrix: tuple[Vector, ...] = ()
    pivots: tuple[int, ...] = ()

    @staticmethod
    def from_rows(field, v: int, rows) -> "Subspace":
        mat, piv = rref(field, rows, v)
        return Subspace(field, v, mat, piv)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def contains_vector(self, vec: Vector) -> bool:
        return not any(self.reduce_vector(vec))

    def reduce_vector(self, vec: Vector) -> Vector:
        """Eliminate the pivot coordinates of vec; zero iff vec is in the span."""
        f = self.field
        out = list(vec)
        for row, p in zip(self.matrix, self.pivots):
            c = out[p]
            if c != 0:
                out = [f.sub(x, f.mul(c, y)) for x, y in zip(out, row)]
        return tuple(out)

    def coordinates_of(self, vec: Vector) -> Vector:
        """Coefficients over the canonical basis rows (vec must lie in the span)."""
        coords = tuple(vec[p] for p in self.pivots)
        if not self.contains_vector(vec):
            raise NotNested("vector is not in the subspace")
        return coords

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.matrix)

    def points(self):
        """All normalized points of this subspace (first nonzero coefficient 1)."""
        f = self.field
        q = f.q
        k = self.dim
        for j in range(k):
            lead = self.matrix[j]
            for tail in itertools.product(range(q), repeat=k - j - 1):
                vec = list(lead)
                for offset, c in enumerate(tail):
                    if c:
                        row = self.matrix[j + 1 + offset]
                        vec = [f.add(x, f.mul(c, y)) for x, y in zip(vec, row)]
                yield tuple(vec)

    def point_count(self) -> int:
        return gaussian_binomial(self.dim, 1, self.field.q)


def span_sum(x: Subspace, y: Subspace) -> Subspace:
    _check_same_space(x, y)
    return Subspace.from_rows(x.field, x.v, x.matrix + y.matrix)


def intersection(x: Subspace, y: Subspace) -> Subspace:
    """Intersection via elimination on the doubled coordinate block."""
    _check_same_space(x, y)
    f, v = x.field, x.v
    doubled = [row + row for row in x.matrix] + [
        row + tuple(0 for _ in range(v)) for row in y.matrix
    ]
    reduced, _ = rref(f, doubled, 2 * v)
    inter_rows = [row[v:] for row in reduced if not any(row[:v])]
    return Subspace.from_rows(f, v, inter_rows)


def subspace_distance(x: Subspace, y: Subspace) -> int:
    """2 dim(X+Y) - dim X - dim Y."""
    return 2 * span_sum(x, y).dim - x.dim - y.dim


def injection_distance(x: Subspace, y: Subspace) -> int:
    """max(dim X, dim Y) - dim(X intersect Y)."""
    inter_dim = x.dim + y.dim - span_sum(x, y).dim
    return max(x.dim, y.dim) - inter_dim


def _check_same_space(x: Subspace, y: Subspace):
    if x.v != y.v or x.field.q != y.field.q:
        raise InconsistentInput("subspaces live in different ambient spaces")


# ---------------------------------------------------------------------------
# point enumeration


def normalize_point(field, vec: Vector) -> Vector:
    for c in vec:
        if c != 0:
            if c == 1:
                return tuple(vec)
            inv = field.inv(c)
            return tuple(field.mul(inv, x) for x in vec)
    raise RangeError("cannot normalize the zero vector")


def enumerate_points(field, v: int):
    """All points of PG(v-1, q) as normalized vectors, lexicographically."""
    check_point_count(gaussian_binomial(v, 1, field.q), "point enumeration")
    q = field.q
    for lead in range(v - 1, -1, -1):
        prefix = tuple(0 for _ in range(lead)) + (1,)
        for tail in itertools.product(range(q), repeat=v - lead - 1):
            yield prefix + tail


def enumerate_hyperplanes(field, v: int):
    """Normal vectors of all hyperplanes, in the same normalized order."""
    return enumerate_points(field, v)


def enumerate_subspaces(field, v: int, k: int):
    """All k-subspaces of F_q^v, one canonical matrix each.

    Iterates over pivot-column choices and all fillings of the free entries
    (entries right of a pivot and not in a pivot column), which enumerates
    exactly the reduced row-echelon matrices.
    """
    if k < 0 or k > v:
        return
    if k == 0:
        yield Subspace(field, v, (), ())
        return
    q = field.q
    count = gaussian_binomial(v, k, q)
    check_point_count(count, "subspace enumeration")
    for pivots in itertools.combinations(range(v), k):
        pivot_set = set(pivots)
        free_positions = [
            (i, col)
            for i in range(k)
            for col in range(pivots[i] + 1, v)
            if col not in pivot_set
        ]
        for values in itertools.product(range(q), repeat=len(free_positions)):
            rows = [[0] * v for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, col), val in zip(free_positions, values):
                rows[i][col] = val
            yield Subspace(field, v, tuple(tuple(r) for r in rows), tuple(pivots))


def dot(field, a: Vector, b: Vector) -> int:
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = field.add(acc, field.mul(x, y))
    return acc


def hyperplane_subspace(field, v: int, normal: Vector) -> Subspace:
    """The hyperplane with the given normal vector, as a subspace."""
    rows = []
    f = field
    pivot = next(i for i, c in enumerate(normal) if c != 0)
    for i in range(v):
        if i == pivot:
            continue
        vec = [0] * v
        vec[i] = 1
        vec[pivot] = f.neg(f.div(normal[i], normal[pivot]))
        rows.append(tuple(vec))
    return Subspace.from_rows(field, v, rows)


# ---------------------------------------------------------------------------
# point sets (with multiplicities)


@dataclass
class PointSet:
    """A multiset of points in PG(v-1, q); counts maps point -> multiplicity."""

    field: object
    v: int
    counts: dict

    @staticmethod
    def from_vectors(field, v: int, vectors, multiplicity: int = 1) -> "PointSet":
        counts: dict = {}
        for vec in vectors:
            p = normalize_point(field, tuple(vec))
            counts[p] = counts.get(p, 0) + multiplicity
        return PointSet(field, v, counts)

    @staticmethod
    def empty(field, v: int) -> "PointSet":
        return PointSet(field, v, {})

    @property
    def size(self) -> int:
        return sum(self.counts.values())

    @property
    def support_size(self) -> int:
        return len(self.counts)

    def is_set(self) -> bool:
        return all(m == 1 for m in self.counts.values())

    def copy(self) -> "PointSet":
        return PointSet(self.field, self.v, dict(self.counts))

    def add(self, other: "PointSet") -> "PointSet":
        self._check_compatible(other)
        counts = dict(self.counts)
        for p, m in other.counts.items():
            counts[p] = counts.get(p, 0) + m
        return PointSet(self.field, self.v, counts)

    def subtract(self, other: "PointSet", *, allow_negative: bool = False) -> "PointSet":
        self._check_compatible(other)
        counts = dict(self.counts)
        for p, m in other.counts.items():
            new = counts.get(p, 0) - m
            if new < 0 and not allow_negative:
                raise InconsistentInput("multiplicity would become negative")
            if new == 0:
                counts.pop(p, None)
            else:
                counts[p] = new
        return PointSet(self.field, self.v, counts)

    def _check_compatible(self, other: "PointSet"):
        if self.v != other.v or self.field.q != other.field.q:
            raise InconsistentInput("point sets live in different ambient spaces")

    def multiplicity_in(self, s: Subspace) -> int:
        """Total multiplicity of points lying in the subspace s."""
        return sum(m for p, m in self.counts.items() if s.contains_vector(p))

    def hyperplane_multiplicity(self, normal: Vector) -> int:
        f = self.field
        return sum(m for p, m in self.counts.items() if dot(f, normal, p) == 0)

    def span_dimension(self) -> int:
        return matrix_rank(self.field, list(self.counts), self.v)

    def restrict(self, s: Subspace) -> "PointSet":
        """Sub-multiset of points lying in s (same ambient space)."""
        return PointSet(
            self.field,
            self.v,
            {p: m for p, m in self.counts.items() if s.contains_vector(p)},
        )

    def restrict_coordinates(self, s: Subspace) -> "PointSet":
        """Points of self inside s, rewritten in coordinates over s's basis."""
        counts = {}
        for p, m in self.counts.items():
            if s.contains_vector(p):
                c = tuple(p[piv] for piv in s.pivots)
                counts[c] = counts.get(c, 0) + m
        return PointSet(self.field, s.dim, counts)

    def quotient(self, s: Subspace) -> "PointSet":
        """Image multiset modulo the subspace s (points of s disappear)."""
        f = self.field
        keep = [i for i in range(self.v) if i not in set(s.pivots)]
        counts: dict = {}
        for p, m in self.counts.items():
            reduced = s.reduce_vector(p)
            image = tuple(reduced[i] for i in keep)
            if any(image):
                image = normalize_point(f, image)
                counts[image] = counts.get(image, 0) + m
        return PointSet(f, self.v - s.dim, counts)

    def spectrum(self) -> "Spectrum":
        counts: dict = {}
        for normal in enumerate_hyperplanes(self.field, self.v):
            i = self.hyperplane_multiplicity(normal)
            counts[i] = counts.get(i, 0) + 1
        return Spectrum(self.field.q, self.v, self.size, counts, self)


def subspace_point_set(s: Subspace) -> PointSet:
    return PointSet(s.field, s.v, {p: 1 for p in s.points()})


# ---------------------------------------------------------------------------
# hyperplane spectra and divisibility


@dataclass
class Spectrum:
    """Hyperplane multiplicity distribution a_i of a point (multi)set."""

    q: int
    v: int
    n: int
    counts: dict  # multiplicity i -> number of hyperplanes a_i
    source: PointSet | None = None

    def a(self, i: int) -> int:
        return self.counts.get(i, 0)

    def standard_residuals(self) -> tuple[int, int, int]:
        """Residuals of the three incidence identities (all zero when valid).

        The pair-count identity needs a correction term when the source has
        repeated points; it is included automatically when the source is known.
        """
        q, v, n = self.q, self.v, self.n
        total = sum(self.counts.values())
        s1 = total - gaussian_binomial(v, 1, q)
        s2 = sum(i * a for i, a in self.counts.items()) - n * gaussian_binomial(
            v - 1, 1, q
        )
        pair_correction = 0
        if self.source is not None:
            pair_correction = q ** (v - 2) * sum(
                comb(m, 2) for m in self.source.counts.values()
            )
        s3 = (
            sum(comb(i, 2) * a for i, a in self.counts.items())
            - comb(n, 2) * gaussian_binomial(v - 2, 1, q)
            - pair_correction
        )
        return s1, s2, s3

    def weight_distribution(self) -> dict:
        """Map weight w = n - i to the number of hyperplanes with that weight."""
        return {self.n - i: a for i, a in self.counts.items()}


@dataclass
class DivisibilityVerdict:
    status: str  # "strong", "weak", or "none"
    divisor: int
    residue: int | None  # common hyperplane-multiplicity residue, if any
    size_residue: int
    witness: Vector | None = None  # hyperplane breaking the congruence, if any

    @property
    def ok(self) -> bool:
        return self.status == "strong"


def divisibility_verdict(ps: PointSet, delta: int) -> DivisibilityVerdict:
    """Check whether all hyperplane multiplicities agree modulo delta.

    "strong" additionally requires the common residue to equal |C| mod delta,
    which makes all associated codeword weights multiples of delta.
    """
    if delta <= 1:
        raise RangeError(f"divisor must exceed 1, got {delta}")
    residue = None
    size_res = ps.size % delta
    for normal in enumerate_hyperplanes(ps.field, ps.v):
        i = ps.hyperplane_multiplicity(normal) % delta
        if residue is None:
            residue = i
        elif i != residue:
            return DivisibilityVerdict("none", delta, None, size_res, normal)
    status = "strong" if residue == size_res else "weak"
    return DivisibilityVerdict(status, delta, residue, size_res)


def is_divisible(ps: PointSet, delta: int) -> bool:
    return divisibility_verdict(ps, delta).ok
