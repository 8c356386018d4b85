"""Partial spreads of k-subspaces: constructions, verification, holes.

The main construction assembles layers of lifted maximum-rank-distance
codes: layer s consists of row spaces of ``(0 | I_k | B)`` where ``B``
runs over the k-row truncations of the multiplication matrices of an
extension field.  Members of one layer pairwise intersect trivially
because differences of distinct multiplication matrices are invertible,
and pivot positions separate distinct layers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentInput, ParameterMismatch
from .gf import extension_field, field_new, gaussian_binomial, multiplication_matrix
from .geometry import (
    PointSet,
    Subspace,
    enumerate_points,
    span_sum,
    subspace_point_set,
)


@dataclass
class PartialSpread:
    """A collection of k-subspaces of F_q^v with pairwise trivial intersection."""

    field: object
    v: int
    k: int
    members: tuple[Subspace, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def covered_point_count(self) -> int:
        return self.size * gaussian_binomial(self.k, 1, self.field.q)


@dataclass
class SpreadReport:
    ok: bool
    size: int
    violations: list

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class VspReport:
    """Partition check: type_vector counts pieces by dimension (holes count
    as dimension-1 pieces); violations list points covered more than once."""

    ok: bool
    type_vector: dict
    violations: list


# ---------------------------------------------------------------------------
# lifted MRD layers


def lifted_mrd_matrices(q: int, k: int, m: int):
    """All k x m blocks B: top k rows of the multiplication matrices of the
    degree-m extension of F_q.  Distinct blocks differ by a matrix of full
    rank min(k, m), so the lifted subspaces intersect trivially."""
    if k > m:
        raise ParameterMismatch(
            f"lifted layer needs block height {k} <= extension degree {m}"
        )
    ext = extension_field(q, m)
    return [multiplication_matrix(ext, a)[:k] for a in range(ext.q)]


def lifted_mrd_layer(q: int, ambient: int, k: int, shift: int = 0, total_width: int | None = None):
    """Subspaces (0^shift | I_k | B) inside F_q^total_width; B is k x (ambient-k)."""
    m = ambient - k
    field = field_new(q)
    width = total_width if total_width is not None else shift + ambient
    members = []
    for block in lifted_mrd_matrices(q, k, m):
        rows = []
        for i in range(k):
            row = [0] * width
            row[shift + i] = 1
            for j, c in enumerate(block[i]):
                row[shift + k + j] = c
            rows.append(tuple(row))
        members.append(Subspace(field, width, tuple(rows), tuple(range(shift, shift + k))))
    return members


# ---------------------------------------------------------------------------
# constructions


def multicomponent(q: int, v: int, k: int) -> PartialSpread:
    """Layered partial k-spread of F_q^v for v = t*k + r with 0 < r < k, t >= 2.

    Layer s (s = 1 .. t-1) lifts the degree-(v - s*k) extension field and
    occupies pivot columns (s-1)k .. sk-1; one extra "moving" k-subspace
    inside the uncovered (k+r)-space is appended (the span of the last k
    unit vectors, which is the lexicographically smallest choice).
    Size: 1 + sum of q^(s*k + r) for s = 1 .. t-1.
    """
    if k < 2:
        raise ParameterMismatch(f"member dimension must be at least 2, got {k}")
    t, r = divmod(v, k)
    if r == 0:
        raise ParameterMismatch(
            f"ambient dimension {v} is a multiple of {k}; use a field-reduction spread"
        )
    if t < 2:
        raise ParameterMismatch(
            f"need v >= 2k + 1 for a layered spread, got v={v}, k={k}"
        )
    field = field_new(q)
    members = []
    for s in range(1, t):
        shift = (s - 1) * k
        members.extend(lifted_mrd_layer(q, v - shift, k, shift=shift, total_width=v))
    members.append(_last_coordinates_subspace(field, v, k))
    return PartialSpread(field, v, k, tuple(members))


def _last_coordinates_subspace(field, v: int, k: int) -> Subspace:
    rows = []
    for i in range(k):
        row = [0] * v
        row[v - k + i] = 1
        rows.append(tuple(row))
    return Subspace(field, v, tuple(rows), tuple(range(v - k, v)))


def extend_spread(spread: PartialSpread) -> PartialSpread:
    """Embed a partial k-spread of F_q^v into F_q^(v+k) and add a fresh
    lifted layer of q^v new members (prepending k zero coordinates to the
    old members keeps all intersections trivial)."""
    q = spread.field.q
    v, k = spread.v, spread.k
    new_width = v + k
    field = spread.field
    shifted = []
    for s in spread.members:
        rows = tuple(tuple(0 for _ in range(k)) + row for row in s.matrix)
        pivots = tuple(p + k for p in s.pivots)
        shifted.append(Subspace(field, new_width, rows, pivots))
    new_layer = lifted_mrd_layer(q, new_width, k, shift=0, total_width=new_width)
    return PartialSpread(field, new_width, k, tuple(new_layer) + tuple(shifted))


def spread_field_reduction(q: int, k: int, t: int) -> PartialSpread:
    """Perfect k-spread of F_q^(k*t) by expanding the points of a projective
    geometry over the degree-k extension field into k-subspaces.

    Each point of PG(t-1, q^k), written as a normalized t-vector over the
    extension, becomes the row space of the k vectors obtained by
    multiplying it with x^0 .. x^(k-1) and writing every component in
    coordinates over F_q (components concatenated left to right).
    """
    if k < 1 or t < 1:
        raise ParameterMismatch(f"need positive parameters, got k={k}, t={t}")
    if t < 2:
        raise ParameterMismatch("need at least two blocks for a spread")
    ext = extension_field(q, k) if k > 1 else field_new(q)
    field = field_new(q)
    v = k * t
    members = []
    for point in enumerate_points(ext, t):
        rows = []
        for j in range(k):
            xj = ext.from_coeffs(tuple(0 for _ in range(j)) + (1,)) if k > 1 else 1
            row: list[int] = []
            for component in point:
                prod = ext.mul(xj, component)
                row.extend(ext.coeffs(prod) if k > 1 else (prod,))
            rows.append(tuple(row))
        members.append(Subspace.from_rows(field, v, rows))
    return PartialSpread(field, v, k, tuple(members))


# ---------------------------------------------------------------------------
# verification and holes


def verify_partial_spread(spread: PartialSpread) -> SpreadReport:
    """Check dimensions and pairwise trivial intersections."""
    violations = []
    v, k = spread.v, spread.k
    for idx, s in enumerate(spread.members):
        if s.v != v:
            violations.append(("ambient", idx, s.v))
        if s.dim != k:
            violations.append(("dimension", idx, s.dim))
    members = spread.members
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            joint = span_sum(members[i], members[j]).dim
            inter = members[i].dim + members[j].dim - joint
            if inter != 0:
                violations.append(("intersection", i, j, inter))
    return SpreadReport(not violations, spread.size, violations)


def spread_holes(spread: PartialSpread) -> PointSet:
    """Points of the ambient space not covered by any member."""
    field = spread.field
    covered = set()
    for s in spread.members:
        covered.update(s.points())
    counts = {
        p: 1 for p in enumerate_points(field, spread.v) if p not in covered
    }
    return PointSet(field, spread.v, counts)


def verify_vsp(field, v: int, members) -> VspReport:
    """Check that the given subspaces tile the point set of PG(v-1, q).

    Uncovered points are admissible (they are 1-dimensional pieces of the
    partition and are tallied in the type vector); points covered more than
    once are violations.
    """
    cover: dict = {}
    type_vector: dict = {}
    for s in members:
        if s.v != v:
            raise InconsistentInput("member lives in a different ambient space")
        type_vector[s.dim] = type_vector.get(s.dim, 0) + 1
        for p in s.points():
            cover[p] = cover.get(p, 0) + 1
    violations = [(p, c) for p, c in cover.items() if c > 1]
    uncovered = sum(1 for p in enumerate_points(field, v) if p not in cover)
    if uncovered:
        type_vector[1] = type_vector.get(1, 0) + uncovered
    return VspReport(not violations, type_vector, sorted(violations))


def spread_union_point_set(spread: PartialSpread) -> PointSet:
    out = PointSet.empty(spread.field, spread.v)
    for s in spread.members:
        out = out.add(subspace_point_set(s))
    return out


# ---------------------------------------------------------------------------
# exact maximum search (small cases only)


def maximum_partial_spread_size(q: int, v: int, k: int) -> int:
    """Exact maximum size of a partial k-spread of F_q^v by backtracking.

    Decides "is there a spread of the target size" for descending targets.
    The decision search always extends at the uncovered point with the
    fewest viable members (fail-first) and may write off a point as a hole
    only while the hole budget for the target size lasts.
    Intended for tiny parameters; the search is exponential.
    """
    from .geometry import enumerate_subspaces

    field = field_new(q)
    points = list(enumerate_points(field, v))
    index = {p: i for i, p in enumerate(points)}
    per_member = gaussian_binomial(k, 1, q)
    total = len(points)

    masks = []
    for s in enumerate_subspaces(field, v, k):
        mask = 0
        for p in s.points():
            mask |= 1 << index[p]
        masks.append(mask)

    by_point = [[] for _ in points]
    for mask in masks:
        m = mask
        while m:
            low = m & -m
            by_point[low.bit_length() - 1].append(mask)
            m ^= low

    def exists(target: int) -> bool:
        hole_budget = total - per_member * target
        if hole_budget < 0:
            return False

        def search(covered: int, holes: int, size: int) -> bool:
            if size == target:
                return True
            blocked = covered | holes
            # fail-first: the unblocked point with fewest disjoint members
            best_point, best_cands = -1, None
            m = ((1 << total) - 1) & ~blocked
            while m:
                low = m & -m
                i = low.bit_length() - 1
                cands = [c for c in by_point[i] if c & covered == 0]
                if best_cands is None or len(cands) < len(best_cands):
                    best_point, best_cands = i, cands
                    if not cands:
                        break
                m ^= low
            if best_point < 0:
                return False  # everything blocked but target not reached
            if covered == 0 and holes == 0:
                # the linear group is transitive on members through a point,
                # so the first covering member may be fixed outright
                best_cands = best_cands[:1]
            for cand in best_cands:
                if search(covered | cand, holes, size + 1):
                    return True
            if holes.bit_count() < hole_budget:
                return search(covered, holes | (1 << best_point), size)
            return False

        return search(0, 0, 0)

    target = total // per_member
    while target > 0 and not exists(target):
        target -= 1
    return target
