"""Constructions of point sets with constant hyperplane residue.

A point (multi)set C in PG(v-1, q) is "divisible" by Delta when every
hyperplane meets it in the same residue class modulo Delta; throughout this
module Delta is a power of the field characteristic.  The functions below
build the standard families (subspaces, affine differences, sunflowers,
cones, spread-surgery sets, caps, concatenations), load the shipped witness
matrices, and provide the coin-problem arithmetic used by the existence
engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .budget import check_point_count
from .errors import (
    BadPetalCount,
    CongruenceViolated,
    DivisorMismatch,
    InconsistentInput,
    NotApplicable,
    NotNested,
    ParameterMismatch,
    RangeError,
)
from .geometry import (
    DivisibilityVerdict,
    PointSet,
    Subspace,
    divisibility_verdict,
    enumerate_points,
    enumerate_subspaces,
    subspace_point_set,
)
from .gf import extension_field, field_new, gaussian_binomial, prime_power_decomposition
from .spreads import spread_field_reduction


@dataclass
class DivisibleSet:
    """A point set together with its claimed divisor and build recipe."""

    points: PointSet
    divisor: int
    recipe: str = ""

    @property
    def field(self):
        return self.points.field

    @property
    def v(self) -> int:
        return self.points.v

    @property
    def size(self) -> int:
        return self.points.size

    def verify(self) -> DivisibilityVerdict:
        """Exhaustive hyperplane check of the claimed divisor."""
        if self.divisor <= 1:
            return DivisibilityVerdict("strong", self.divisor, 0, 0)
        return divisibility_verdict(self.points, self.divisor)


def _counts_to_point_set(field, v: int, counts: dict) -> PointSet:
    cleaned = {p: m for p, m in counts.items() if m}
    if any(m < 0 for m in cleaned.values()):
        raise InconsistentInput("indicator combination went negative")
    return PointSet(field, v, cleaned)


def _embed_rows(rows, width: int, shift: int = 0):
    """Pad coordinate rows with zeros to the given total width."""
    out = []
    for row in rows:
        out.append((0,) * shift + tuple(row) + (0,) * (width - shift - len(row)))
    return out


def _unit_row(width: int, position: int):
    return tuple(1 if i == position else 0 for i in range(width))


# ---------------------------------------------------------------------------
# elementary constructions


def construct_subspace_set(sub: Subspace) -> DivisibleSet:
    """The points of a k-subspace; divisor q^(k-1)."""
    k = sub.dim
    if k < 1:
        raise RangeError("need a subspace of dimension at least 1")
    q = sub.field.q
    return DivisibleSet(subspace_point_set(sub), q ** (k - 1), f"subspace(dim={k})")


def construct_affine(outer: Subspace, inner: Subspace) -> DivisibleSet:
    """Points of outer not in inner; divisor q^(dim(inner)-1)."""
    if outer.field.q != inner.field.q or outer.v != inner.v:
        raise ParameterMismatch("subspaces live in different ambient spaces")
    if not outer.contains_subspace(inner) or inner.dim >= outer.dim:
        raise NotNested("inner subspace must be properly contained in outer")
    s = inner.dim
    if s < 1:
        raise RangeError("inner subspace must have dimension at least 1")
    q = outer.field.q
    pts = subspace_point_set(outer).subtract(subspace_point_set(inner))
    return DivisibleSet(pts, q ** (s - 1), f"affine({outer.dim}\\{s})")


def disjoint_union(a: DivisibleSet, b: DivisibleSet) -> DivisibleSet:
    """Embed both sets in a direct-sum ambient space and take the union."""
    if a.field.q != b.field.q:
        raise ParameterMismatch("sets are defined over different fields")
    if a.divisor != b.divisor:
        raise DivisorMismatch(
            f"divisors differ: {a.divisor} versus {b.divisor}"
        )
    if b.size == 0:
        return DivisibleSet(a.points.copy(), a.divisor, a.recipe)
    if a.size == 0:
        return DivisibleSet(b.points.copy(), b.divisor, b.recipe)
    field = a.field
    width = a.v + b.v
    counts: dict = {}
    for p, m in a.points.counts.items():
        counts[p + (0,) * b.v] = m
    for p, m in b.points.counts.items():
        counts[(0,) * a.v + p] = counts.get((0,) * a.v + p, 0) + m
    pts = PointSet(field, width, counts)
    return DivisibleSet(pts, a.divisor, f"union({a.recipe},{b.recipe})")


# ---------------------------------------------------------------------------
# sunflowers


VARIANT_Q_PETALS = "q_petals"
VARIANT_Q_PLUS_1 = "q_plus_1_with_center"


def sunflower_union(q: int, center_dim: int, petal_dims, variant: str) -> DivisibleSet:
    """Union of subspaces meeting pairwise in a common center.

    With exactly q petals the center is removed from the union; with q+1
    petals it is kept.  Either way the result is q^center_dim-divisible.
    The petals are realized with fresh coordinates so that the pairwise
    intersections are exactly the center.
    """
    petal_dims = list(petal_dims)
    r = center_dim
    if r < 1:
        raise RangeError("center dimension must be at least 1")
    if variant == VARIANT_Q_PETALS:
        expected = q
    elif variant == VARIANT_Q_PLUS_1:
        expected = q + 1
    else:
        raise ParameterMismatch(f"unknown sunflower variant {variant!r}")
    if len(petal_dims) != expected:
        raise BadPetalCount(
            f"variant {variant} needs {expected} petals, got {len(petal_dims)}"
        )
    if any(d < r + 1 for d in petal_dims):
        raise RangeError("every petal must properly contain the center")
    field = field_new(q)
    width = r + sum(d - r for d in petal_dims)
    center_rows = [_unit_row(width, i) for i in range(r)]
    center = Subspace.from_rows(field, width, center_rows)

    counts: dict = {}
    offset = r
    for d in petal_dims:
        rows = center_rows + [_unit_row(width, offset + i) for i in range(d - r)]
        petal = Subspace.from_rows(field, width, rows)
        for p in petal.points():
            counts[p] = counts.get(p, 0) + 1
        offset += d - r
    for p in center.points():
        counts[p] = counts.get(p, 0) - q
    pts = _counts_to_point_set(field, width, counts)
    if not pts.is_set():
        raise InconsistentInput("sunflower indicator sum is not 0/1")
    return DivisibleSet(pts, q**r, f"sunflower({variant},{petal_dims})")


# ---------------------------------------------------------------------------
# spread surgery: replace i spread members by petal bundles


def construction1(q: int, r: int, i: int) -> DivisibleSet:
    """Remove i members of an r-spread of a 2r-space and glue q-1 fresh
    (r+1)-dimensional petals over each removed member.

    Step i = 0 is the bare 2r-space; each further step adds
    q^(r+1) - q^r - [r 1]_q points, so the reachable cardinalities are
    [2r 1]_q + i * (q^(r+1) - q^r - [r 1]_q) for 0 <= i <= q^r + 1.
    """
    if r < 1:
        raise RangeError("need r >= 1")
    if i < 0 or i > q**r + 1:
        raise RangeError(f"step count must lie in [0, {q ** r + 1}], got {i}")
    field = field_new(q)
    base_v = 2 * r
    width = base_v + i * (q - 1)
    counts: dict = {}
    for p in enumerate_points(field, base_v):
        counts[_embed_rows([p], width)[0]] = 1
    members = spread_field_reduction(q, r, 2).members if r >= 1 else ()
    fresh = base_v
    for j in range(i):
        member_rows = _embed_rows(members[j].matrix, width)
        member = Subspace.from_rows(field, width, member_rows)
        for p in member.points():
            counts[p] = counts.get(p, 0) - 1
        for _ in range(q - 1):
            petal_rows = member_rows + [_unit_row(width, fresh)]
            petal = Subspace.from_rows(field, width, petal_rows)
            for p in petal.points():
                if not member.contains_vector(p):
                    counts[p] = counts.get(p, 0) + 1
            fresh += 1
    pts = _counts_to_point_set(field, width, counts)
    if not pts.is_set():
        raise InconsistentInput("spread-surgery indicator sum is not 0/1")
    expected = gaussian_binomial(2 * r, 1, q) + i * (
        q ** (r + 1) - q**r - gaussian_binomial(r, 1, q)
    )
    if pts.size != expected:
        raise InconsistentInput(
            f"cardinality {pts.size} does not match the formula value {expected}"
        )
    return DivisibleSet(pts, q**r, f"construction1(q={q},r={r},i={i})")


# ---------------------------------------------------------------------------
# cones


CONE_REMOVE_VERTEX = "remove_vertex"
CONE_KEEP_VERTEX = "keep_vertex"


def cone(base: DivisibleSet, s: int, variant: str) -> DivisibleSet:
    """Join every base point to a fresh s-dimensional vertex space.

    remove_vertex keeps only the affine parts of the joining lines
    (m must be divisible by Delta*q); keep_vertex also keeps the vertex
    (m*(q-1) must be congruent to -1 modulo Delta*q).  The result is
    Delta*q^s-divisible with m*q^s resp. [s 1]_q + m*q^s points.
    """
    if s < 1:
        raise RangeError("vertex dimension must be at least 1")
    field = base.field
    q = field.q
    m = base.size
    modulus = base.divisor * q
    if variant == CONE_REMOVE_VERTEX:
        if m % modulus != 0:
            raise CongruenceViolated(
                f"cardinality {m} is not divisible by {modulus}"
            )
        keep_vertex = False
    elif variant == CONE_KEEP_VERTEX:
        if (m * (q - 1)) % modulus != modulus - 1:
            raise CongruenceViolated(
                f"{m}*(q-1) is not congruent to -1 modulo {modulus}"
            )
        keep_vertex = True
    else:
        raise ParameterMismatch(f"unknown cone variant {variant!r}")
    width = base.v + s
    counts: dict = {}
    vertex_vectors = [tuple(t) for t in _all_tuples(q, s)]
    for p, mult in base.points.counts.items():
        for w in vertex_vectors:
            counts[p + w] = counts.get(p + w, 0) + mult
    if keep_vertex:
        for w in enumerate_points(field, s):
            vec = (0,) * base.v + w
            counts[vec] = counts.get(vec, 0) + 1
    pts = _counts_to_point_set(field, width, counts)
    return DivisibleSet(
        pts, base.divisor * q**s, f"cone({variant},s={s},{base.recipe})"
    )


def _all_tuples(q: int, length: int):
    if length == 0:
        yield ()
        return
    for rest in _all_tuples(q, length - 1):
        for digit in range(q):
            yield rest + (digit,)


# ---------------------------------------------------------------------------
# spread surgery with petal bundles in several directions


def construction4(q: int, r: int, m: int, a: int, b_list) -> DivisibleSet:
    """Replace a pairwise-disjoint r-subspaces of a 2r-space by bundles of
    (r+1)-dimensional petals reaching into a distinct hyperplane direction
    per replaced subspace.

    Cardinality: [2r 1]_q + a*(q^(r+1) - [r+1 1]_q) + (sum b_i)*q^(r+1),
    dimension at most 2r + m; divisor q^r.
    """
    b_list = list(b_list)
    if r < 1:
        raise RangeError("need r >= 1")
    if m < 0 or m > r:
        raise RangeError(f"direction dimension must lie in [0, {r}], got {m}")
    if a < 0 or a > gaussian_binomial(m, 1, q):
        raise RangeError(
            f"number of replaced subspaces must lie in [0, {gaussian_binomial(m, 1, q)}]"
        )
    if len(b_list) != a:
        raise ParameterMismatch(f"need {a} petal-surplus entries, got {len(b_list)}")
    cap = q ** (r - 1) - 1
    if any(b < 0 or b > cap for b in b_list):
        raise RangeError(f"petal surpluses must lie in [0, {cap}]")
    field = field_new(q)
    width = 2 * r + m
    counts: dict = {}
    for p in enumerate_points(field, 2 * r):
        counts[_embed_rows([p], width)[0]] = 1
    members = spread_field_reduction(q, r, 2).members
    directions = list(enumerate_points(field, m)) if m else []
    for idx in range(a):
        line_rows = _embed_rows(members[idx].matrix, width)
        line = Subspace.from_rows(field, width, line_rows)
        for p in line.points():
            counts[p] = counts.get(p, 0) - 1
        w_vec = (0,) * (2 * r) + directions[idx]
        petal_count = (q - 1) + b_list[idx] * q
        for translate in _subspace_transversal(field, members[idx], petal_count):
            shifted = _embed_rows([translate], width)[0]
            top = tuple(
                field.add(w_vec[c], shifted[c]) for c in range(width)
            )
            petal = Subspace.from_rows(field, width, line_rows + [top])
            for p in petal.points():
                if not line.contains_vector(p):
                    counts[p] = counts.get(p, 0) + 1
    pts = _counts_to_point_set(field, width, counts)
    if not pts.is_set():
        raise InconsistentInput("petal-bundle indicator sum is not 0/1")
    expected = (
        gaussian_binomial(2 * r, 1, q)
        + a * (q ** (r + 1) - gaussian_binomial(r + 1, 1, q))
        + sum(b_list) * q ** (r + 1)
    )
    if pts.size != expected:
        raise InconsistentInput(
            f"cardinality {pts.size} does not match the formula value {expected}"
        )
    return DivisibleSet(pts, q**r, f"construction4(q={q},r={r},m={m},a={a},b={b_list})")


def _subspace_transversal(field, sub: Subspace, count: int):
    """Deterministic vectors of the 2r-space hitting distinct cosets of sub."""
    free = [c for c in range(sub.v) if c not in set(sub.pivots)]
    q = field.q
    produced = 0
    for index in range(q ** len(free)):
        digits = []
        rest = index
        for _ in free:
            digits.append(rest % q)
            rest //= q
        vec = [0] * sub.v
        for c, d in zip(free, digits):
            vec[c] = d
        yield tuple(vec)
        produced += 1
        if produced >= count:
            return
    if produced < count:
        raise RangeError("not enough cosets for the requested petal count")


# ---------------------------------------------------------------------------
# quadrics and concatenation


def ovoid(q: int) -> PointSet:
    """Elliptic quadric of PG(3, q): q^2 + 1 points, no three collinear.

    Zero set of x0*x1 + x2^2 + a*x2*x3 + b*x3^2 where t^2 + a*t + b is the
    lexicographically smallest irreducible quadratic over F_q.
    """
    field = field_new(q)
    quad = extension_field(q, 2)
    b_coeff, a_coeff = quad.modulus
    pts = []
    for p in enumerate_points(field, 4):
        x0, x1, x2, x3 = p
        value = field.add(
            field.mul(x0, x1),
            field.add(
                field.mul(x2, x2),
                field.add(
                    field.mul(a_coeff, field.mul(x2, x3)),
                    field.mul(b_coeff, field.mul(x3, x3)),
                ),
            ),
        )
        if value == 0:
            pts.append(p)
    if len(pts) != q * q + 1:
        raise InconsistentInput(
            f"quadric has {len(pts)} points, expected {q * q + 1}"
        )
    return PointSet.from_vectors(field, 4, pts)


def field_reduction_points(ps: PointSet) -> PointSet:
    """Expand each point over an extension field into the point set of the
    corresponding subspace over the base field."""
    ext = ps.field
    base = getattr(ext, "base", None)
    degree = getattr(ext, "degree", None)
    if base is None or degree is None:
        raise NotApplicable("point set is not defined over an extension field")
    e = degree
    width = e * ps.v
    check_point_count(ps.support_size * gaussian_binomial(e, 1, base.q), "image points")
    gen = ext.from_coeffs((0, 1)) if e > 1 else 1
    counts: dict = {}
    for p, mult in ps.counts.items():
        rows = []
        power = ext.from_coeffs((1,))
        for _ in range(e):
            row: list[int] = []
            for component in p:
                row.extend(ext.coeffs(ext.mul(power, component)))
            rows.append(tuple(row))
            power = ext.mul(power, gen)
        image = Subspace.from_rows(base, width, rows)
        if image.dim != e:
            raise InconsistentInput("expanded point did not give a full subspace")
        for pt in image.points():
            counts[pt] = counts.get(pt, 0) + mult
    return PointSet(base, width, counts)


def ovoid_concatenation(q: int = 4) -> DivisibleSet:
    """Field-reduced elliptic quadric; for q = 4 this is the 51-point
    8-divisible binary set."""
    ps = ovoid(q)
    p, e = prime_power_decomposition(q)
    if e == 1:
        raise NotApplicable("ovoid over a prime field cannot be reduced further")
    reduced = field_reduction_points(ps)
    divisor = q * p ** (e - 1)
    return DivisibleSet(reduced, divisor, f"ovoid_concatenation(q={q})")


# ---------------------------------------------------------------------------
# shipped witness matrices


def _load_matrix_columns(name: str, q: int) -> PointSet:
    text = resources.files("qspread").joinpath(f"data/{name}").read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if " " in line:
            rows.append(tuple(int(tok) for tok in line.split()))
        else:
            rows.append(tuple(int(ch) for ch in line))
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InconsistentInput(f"ragged matrix in {name}")
    field = field_new(q)
    columns = [tuple(row[c] for row in rows) for c in range(width)]
    return PointSet.from_vectors(field, len(rows), columns)


def hill_cap() -> DivisibleSet:
    """The 56-point cap in PG(5, 3); 9-divisible."""
    return DivisibleSet(_load_matrix_columns("hill_cap.txt", 3), 9, "hill_cap")


def seventeen_point_witness(dim: int) -> DivisibleSet:
    """Shipped 4-divisible 17-point binary sets spanning dimension 6, 7, 8."""
    if dim not in (6, 7, 8):
        raise ParameterMismatch(f"no 17-point witness of dimension {dim}")
    pts = _load_matrix_columns(f"seventeen_{dim}.txt", 2)
    return DivisibleSet(pts, 4, f"seventeen_points(dim={dim})")


def seventeen_point_dim7() -> DivisibleSet:
    """Explicit 17-point 4-divisible set spanning F_2^7.

    Start from the three-petal sunflower {E, S1, S2} over a common line L
    (dims 3, 4, 4), then remove a plane inside each solid meeting L in two
    different points; the remaining indicator is again 0/1.
    """
    field = field_new(2)
    width = 7

    def span(*cols):
        return Subspace.from_rows(field, width, [_unit_row(width, c) for c in cols])

    petal_e = span(0, 1, 2)
    solid1 = span(0, 1, 3, 4)
    solid2 = span(0, 1, 5, 6)
    line = span(0, 1)
    plane1 = span(0, 3, 4)
    plane2 = span(1, 5, 6)
    counts: dict = {}
    for sub, coef in (
        (petal_e, 1),
        (solid1, 1),
        (solid2, 1),
        (line, -2),
        (plane1, -1),
        (plane2, -1),
    ):
        for p in sub.points():
            counts[p] = counts.get(p, 0) + coef
    pts = _counts_to_point_set(field, width, counts)
    if not pts.is_set() or pts.size != 17:
        raise InconsistentInput("17-point recipe did not produce a set")
    return DivisibleSet(pts, 4, "seventeen_point_dim7")


# ---------------------------------------------------------------------------
# residual behavior


def residual_check(ds: DivisibleSet, j: int) -> bool:
    """Verify that every codimension-j restriction keeps divisor q^(r-j)."""
    q = ds.field.q
    if j < 1:
        raise RangeError("codimension must be at least 1")
    if ds.divisor % q**j != 0 or ds.divisor == q**j:
        raise RangeError(
            f"codimension {j} does not leave a nontrivial divisor of {ds.divisor}"
        )
    target = ds.divisor // q**j
    for sub in enumerate_subspaces(ds.field, ds.v, ds.v - j):
        restricted = ds.points.restrict_coordinates(sub)
        if not divisibility_verdict(restricted, target).ok:
            return False
    return True


# ---------------------------------------------------------------------------
# coin-problem arithmetic for the existence frontier


def frobenius_upper(q: int, r: int) -> int:
    """Largest integer not representable as a*[r+1 1]_q + b*q^(r+1)."""
    if r < 1:
        raise RangeError("need r >= 1")
    block = gaussian_binomial(r + 1, 1, q)
    power = q ** (r + 1)
    return block * power - block - power


def representable(q: int, r: int, n: int):
    """Smallest-a representation n = a*[r+1 1]_q + b*q^(r+1), if any."""
    if n < 0:
        raise RangeError("cardinality must be nonnegative")
    block = gaussian_binomial(r + 1, 1, q)
    power = q ** (r + 1)
    a = (n * pow(block, -1, power)) % power
    rest = n - a * block
    if rest >= 0 and rest % power == 0:
        return a, rest // power
    return None


# ---------------------------------------------------------------------------
# cited existence data


def cited_existence_table() -> dict:
    """Cardinality -> citation maps for parameter rows whose witnesses are
    published elsewhere; keys are 'q,r' strings."""
    text = resources.files("qspread").joinpath("data/cited_existence.json").read_text()
    raw = json.loads(text)
    return {
        key: {int(n): cite for n, cite in entries.items()}
        for key, entries in raw.items()
    }
