"""Exact feasibility analysis for divisible point sets.

Everything in this module works over the integers and exact rationals:
weight-distribution transforms, quadratic and cubic hyperplane-count tests,
averaging bounds over nested quotients, a small rational linear-programming
core with replayable infeasibility certificates, and the aggregated
existence pipeline that combines all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt

from .divisible import cited_existence_table, frobenius_upper, representable
from .errors import (
    CongruenceViolated,
    DepthExceeded,
    InconsistentInput,
    ParameterMismatch,
    RangeError,
)
from .gf import gaussian_binomial, prime_power_decomposition

STATUS_EXISTS = "exists"
STATUS_EXCLUDED = "excluded"
STATUS_FEASIBLE = "feasible"
STATUS_UNDECIDED = "undecided"

#: Skip the rational LP when the (filtered) weight support is larger than
#: this; elimination blow-up makes bigger instances unreliable to run blind.
SUPPORT_CAP = 14

#: Hard ceiling on candidate multipliers scanned by the quadratic test.
_TAU_SCAN_CAP = 4096

#: An averaging step whose candidate list is longer than this is skipped.
_AVERAGE_CANDIDATE_CAP = 64


@dataclass(frozen=True)
class Verdict:
    """Outcome of a feasibility question for an n-point q^r-divisible set."""

    q: int
    r: int
    n: int
    status: str
    stage: str | None
    certificate: dict | None

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "r": self.r,
            "n": self.n,
            "status": self.status,
            "stage": self.stage,
            "certificate": _jsonable(self.certificate),
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, frozenset):
        return sorted(_jsonable(v) for v in obj)
    return obj


# ---------------------------------------------------------------------------
# weight-distribution transform


def macwilliams_transform(weights, n: int, k: int, q: int) -> dict:
    """Dual weight distribution of a linear code from its primal one.

    ``weights`` maps weight -> number of codewords.  The dual distribution is
    the unique solution of the n+1 binomial-moment identities and is returned
    as ``{weight: Fraction}`` with every weight 0..n present.
    """
    dist = {int(w): Fraction(c) for w, c in weights.items() if c}
    if any(w < 0 or w > n for w in dist):
        raise InconsistentInput("weights out of range 0..n")
    if dist.get(0) != 1:
        raise InconsistentInput("a linear code has exactly one word of weight 0")
    total = sum(dist.values())
    if total != q**k:
        raise InconsistentInput(f"weight counts sum to {total}, expected {q}^{k}")
    dual: dict[int, Fraction] = {}
    for i in range(n + 1):
        moment = sum(comb(n - w, i) * c for w, c in dist.items() if n - w >= i)
        known = sum(comb(n - j, n - i) * dual[j] for j in range(i))
        dual[i] = moment / Fraction(q) ** (k - i) - known
    return dual


def code_weights_from_spectrum(spectrum) -> dict:
    """Weight distribution of the code generated by a point multiset.

    Hyperplanes meeting the set in ``a`` points give codewords of weight
    ``n - a``, each hit by q-1 scalar multiples; the zero word is alone.
    The correspondence requires the set to span the ambient space.
    """
    n = spectrum.n
    source = getattr(spectrum, "source", None)
    if source is not None and source.span_dimension() != spectrum.v:
        raise InconsistentInput("point set must span the ambient space")
    scale = spectrum.q - 1
    out = {0: 1}
    for a, count in spectrum.counts.items():
        w = n - a
        if w == 0:
            continue
        out[w] = out.get(w, 0) + scale * count
    return out


# ---------------------------------------------------------------------------
# quadratic counting test


def tau(q: int, c: int, delta: int, m: int) -> int:
    """Value whose negativity contradicts the second-moment hyperplane count."""
    return (
        m * (m - 1) * delta**2 * q**2
        - c * (2 * m - 1) * (q - 1) * delta * q
        + c * (q - 1) * (c * (q - 1) + 1)
    )


def _delta_exponent(q: int, delta: int) -> int:
    """delta as a positive power of q, or raise."""
    if delta < q:
        raise RangeError("divisor must be a positive power of the field size")
    r = 0
    value = 1
    while value < delta:
        value *= q
        r += 1
    if value != delta:
        raise RangeError("divisor must be a positive power of the field size")
    return r


def tau_exclude(q: int, n: int, delta: int):
    """Certificate {'m': m, 'tau': value} if the quadratic test bars n, else None.

    The quadratic is convex in m, so scanning a window around its vertex plus
    a short initial segment is exhaustive: a negative value (or a zero at
    m >= 2) anywhere implies one at an integer adjacent to the vertex.
    """
    _delta_exponent(q, delta)
    if n <= 0:
        return None
    window = isqrt((q - 1) * q * delta) + 2
    candidates = set(range(1, min(window, _TAU_SCAN_CAP) + 1))
    vertex = Fraction(1, 2) + Fraction(n * (q - 1), delta * q)
    floor_vertex = int(vertex)
    candidates.update(
        m for m in range(floor_vertex - 1, floor_vertex + 3) if m >= 1
    )
    for m in sorted(candidates):
        value = tau(q, n, delta, m)
        if value < 0 or (value == 0 and m >= 2):
            return {"m": m, "tau": value}
    return None


# ---------------------------------------------------------------------------
# first-moment identity and averaging bounds


def linear_identity(q: int, delta: int, u: int, m: int, spectrum) -> int:
    """Residual of the first-moment identity on a divisible spectrum.

    For an n-point delta-divisible set with n = u + m*delta, hyperplane
    counts a_i supported on i = u + h*delta satisfy
    (q-1) * sum_h h*a_{u+h*delta} = (u + m*delta - u*q) * q^(v-1)/delta - m.
    Returns left minus right; zero means the identity holds.
    """
    if spectrum.q != q:
        raise ParameterMismatch("spectrum is over a different field size")
    if u + m * delta != spectrum.n:
        raise ParameterMismatch("u + m*delta must equal the set size")
    lhs = (q - 1) * sum(h * spectrum.a(u + h * delta) for h in range(m + 1))
    rhs = Fraction((u + m * delta - u * q) * q ** (spectrum.v - 1), delta) - m
    residual = Fraction(lhs) - rhs
    if residual.denominator != 1:
        raise InconsistentInput("identity residual is not an integer")
    return residual.numerator


def average_exclude(q: int, n: int, delta: int, u: int, m: int) -> bool:
    """True when no delta-divisible n-set can have minimum hyperplane count u.

    With n = u + m*delta, some hyperplane must meet the set in at most the
    average n/q points, so q*u >= n (and n > 0) is contradictory.
    """
    if u < 0 or m < 0:
        raise RangeError("parameters must be nonnegative")
    if u + m * delta != n:
        raise ParameterMismatch("u + m*delta must equal n")
    return n > 0 and q * u >= n


def _canonical_split(q: int, r: int, n: int) -> tuple[int, int]:
    block = q ** (r + 1)
    return n // block, n % block


def average_bound(q: int, r: int, n: int, y: int) -> tuple[int, int]:
    """One averaging step: size bound and residue for a hyperplane section.

    A q^r-divisible set of size n = a*q^(r+1) + b admits a hyperplane whose
    section is q^(r-1)-divisible, has size at most (a-1)*q^r + (b+y)/q and
    size congruent to b mod q^r; y must be a nonnegative solution of
    y = (q-1)*b mod q^(r+1).
    """
    if r < 1:
        raise RangeError("need r >= 1")
    if y < 0:
        raise RangeError("section parameter must be nonnegative")
    a, b = _canonical_split(q, r, n)
    block = q ** (r + 1)
    if (y - (q - 1) * b) % block != 0:
        raise CongruenceViolated(
            f"need y = {(q - 1) * b % block} mod {block}, got {y}"
        )
    assert (b + y) % q == 0
    return (a - 1) * q**r + (b + y) // q, b % q**r


def iterated_average(q: int, r: int, n: int, y: int, j: int) -> tuple[int, int]:
    """j-fold averaging: size bound and residue for a codimension-j section.

    Needs y >= 1 with y = (q-1)*b mod q^(r+1); the admissible depth shrinks
    when y is divisible by the field characteristic.  j = 0 returns (n, b).
    """
    if r < 1:
        raise RangeError("need r >= 1")
    if j < 0:
        raise RangeError("depth must be nonnegative")
    if y < 1:
        raise RangeError("section parameter must be positive")
    a, b = _canonical_split(q, r, n)
    block = q ** (r + 1)
    if (y - (q - 1) * b) % block != 0:
        raise CongruenceViolated(
            f"need y = {(q - 1) * b % block} mod {block}, got {y}"
        )
    p, e = prime_power_decomposition(q)
    val = 0
    rest = y
    while rest % p == 0:
        rest //= p
        val += 1
    g = Fraction(val, e)
    if not (j < r + 1 - max(0, g - 1)):
        raise DepthExceeded(f"depth {j} inadmissible for this section parameter")
    return _iterated_formula(q, r, a, b, y, j)


def _iterated_formula(q, r, a, b, y, j):
    numerator = b + gaussian_binomial(j, 1, q) * y
    assert numerator % q**j == 0
    bound = (a - j) * q ** (r + 1 - j) + numerator // q**j
    return bound, b % q ** (r + 1 - j)


# ---------------------------------------------------------------------------
# cubic counting test


def cubic_form(q: int, n: int, delta: int, t: int) -> int:
    """Quadratic-in-t part of the third-moment hyperplane count."""
    return (
        delta**2 * q**2 * t**2
        + (delta**2 * q**2 - 2 * delta * n * q**2 + 2 * delta * n * q) * t
        + (
            -delta * n * q**2
            + n**2 * q**2
            + delta * n * q
            - 2 * n**2 * q
            + n**2
            + n * q
            - n
        )
    )


def cubic_slack(q: int, n: int, delta: int, t: int) -> int:
    """Companion value; nonnegative form with negative slack is contradictory."""
    return cubic_form(q, n, delta, t) - (
        2 * delta * q * t + delta * q - 2 * n * q + 2 * n + q - 2
    )


def cubic_exclude(q: int, n: int, delta: int, t: int):
    """Certificate {'t', 'h', 'g2'} if the cubic test bars n at window t."""
    _delta_exponent(q, delta)
    if t < 0:
        raise RangeError("window index must be nonnegative")
    if t * delta <= n <= (t + 1) * delta:
        return None
    h = cubic_form(q, n, delta, t)
    g2 = cubic_slack(q, n, delta, t)
    if h >= 0 and g2 < 0:
        return {"t": t, "h": h, "g2": g2}
    return None


def _cubic_scan(q: int, n: int, delta: int):
    for t in range(n // delta + 4):
        cert = cubic_exclude(q, n, delta, t)
        if cert is not None:
            return cert
    return None


# ---------------------------------------------------------------------------
# numerical-semigroup window


def exclusion_interval(q: int, r: int, n: int) -> bool:
    """True when n is small enough that divisible sets are forced to be
    nonnegative combinations of the two base block sizes, and n is not one."""
    if n <= 0:
        return False
    if n > r * q ** (r + 1):
        return False
    return representable(q, r, n) is None


# ---------------------------------------------------------------------------
# constructive existence pool


def _exact_sums(values, count, limit):
    """All sums of exactly ``count`` members of ``values`` (with repetition)
    that stay within ``limit``."""
    if limit < 0:
        return set()
    sums = {0}
    for _ in range(count):
        sums = {s + v for s in sums for v in values if s + v <= limit}
        if not sums:
            break
    return sums


def _construction_atoms(q: int, r: int, limit: int) -> set[int]:
    """Cardinalities realized by the shipped constructions, up to limit."""
    out: set[int] = set()
    if limit < 1:
        return out
    k = r + 1
    while True:
        c = gaussian_binomial(k, 1, q)
        if c > limit:
            break
        out.add(c)
        k += 1
    c = q ** (r + 1)
    while c <= limit:
        out.add(c)
        c *= q
    if r == 1 and q * q + 1 <= limit:
        out.add(q * q + 1)
    base = gaussian_binomial(2 * r, 1, q)
    if base <= limit:
        step = q ** (r + 1) - q**r - gaussian_binomial(r, 1, q)
        for i in range(q**r + 2):
            c = base + i * step
            if c > limit:
                break
            out.add(c)
    petal_excess = []
    d = r + 1
    while True:
        p = gaussian_binomial(d, 1, q) - gaussian_binomial(r, 1, q)
        if p > limit:
            break
        petal_excess.append(p)
        d += 1
    out |= _exact_sums(petal_excess, q, limit)
    center = gaussian_binomial(r, 1, q)
    out |= {center + s for s in _exact_sums(petal_excess, q + 1, limit - center)}
    if base <= limit:
        drop = q ** (r + 1) - gaussian_binomial(r + 1, 1, q)
        block = q ** (r + 1)
        extra_max = q ** (r - 1) - 1
        for m in range(r + 1):
            for a in range(gaussian_binomial(m, 1, q) + 1):
                c0 = base + a * drop
                if c0 > limit:
                    break
                top = min(a * extra_max, (limit - c0) // block)
                for extra in range(top + 1):
                    out.add(c0 + extra * block)
    out.discard(0)
    return out


#: Sporadic sizes realized by shipped constructions that are not part of the
#: parametric families above: the 56-point cap set and the 51-point
#: concatenation, both built and verified in qspread.divisible.
_SPORADIC_CONSTRUCTIVE = {(3, 2): (56,), (2, 3): (51,)}


def _reach_mask(atoms, limit: int, seed: int = 1) -> int:
    """Bitmask of sums of the atom sizes (any multiplicities) up to limit,
    on top of the sizes already present in ``seed``."""
    mask = (1 << (limit + 1)) - 1
    reach = seed & mask
    for a in sorted(set(atoms)):
        if a <= 0 or a > limit:
            continue
        while True:
            grown = reach | ((reach << a) & mask)
            if grown == reach:
                break
            reach = grown
    return reach


class _ExistencePool:
    """Per-(q, r) cache of constructively and citedly realizable sizes."""

    def __init__(self, q: int, r: int):
        self.q = q
        self.r = r
        self.limit = -1
        self.pure = 1
        self.full = 1
        self.atoms: set[int] = set()
        key = f"{q},{r}"
        self.cited = dict(cited_existence_table().get(key, {}))

    def ensure(self, limit: int) -> None:
        if limit <= self.limit:
            return
        limit = max(limit, 2 * self.limit, 64)
        q, r = self.q, self.r
        atoms = _construction_atoms(q, r, limit)
        atoms.update(
            c for c in _SPORADIC_CONSTRUCTIVE.get((q, r), ()) if c <= limit
        )
        pure = _reach_mask(atoms, limit)
        full = _reach_mask({c for c in self.cited if c <= limit}, limit, seed=pure)
        if r == 1:
            increment = q * q - q - 1
            mask = (1 << (limit + 1)) - 1
            while True:
                prev = full
                full |= ((full & ~1) << increment) & mask
                if full != prev:
                    members = {
                        i for i in range(1, limit + 1) if (full >> i) & 1
                    }
                    full = _reach_mask(members, limit, seed=full)
                if full == prev:
                    break
        self.atoms = atoms
        self.pure = pure
        self.full = full
        self.limit = limit

    def constructive(self, n: int) -> bool:
        self.ensure(n)
        return bool((self.pure >> n) & 1)

    def cited_reachable(self, n: int) -> bool:
        self.ensure(n)
        return bool((self.full >> n) & 1)

    def decompose(self, n: int):
        """Greedy split of a constructively realizable size into atom sizes."""
        self.ensure(n)
        parts = []
        cur = n
        ordered = sorted(self.atoms, reverse=True)
        while cur:
            for a in ordered:
                if a <= cur and (self.pure >> (cur - a)) & 1:
                    parts.append(a)
                    cur -= a
                    break
            else:
                return None
        return parts


_POOLS: dict[tuple[int, int], _ExistencePool] = {}


def _pool(q: int, r: int) -> _ExistencePool:
    key = (q, r)
    if key not in _POOLS:
        _POOLS[key] = _ExistencePool(q, r)
    return _POOLS[key]


# ---------------------------------------------------------------------------
# rational linear-programming core


@dataclass(frozen=True)
class Rule:
    """Extra linear constraint sum(coeffs[var] * var) op rhs."""

    coeffs: tuple[tuple[str, Fraction], ...]
    op: str
    rhs: Fraction

    @staticmethod
    def parse(raw: dict) -> "Rule":
        coeffs = tuple(
            (str(name), Fraction(value))
            for name, value in sorted(raw.get("coeffs", {}).items())
        )
        op = raw.get("op", ">=")
        if op not in (">=", "<=", "=="):
            raise InconsistentInput(f"unsupported relation {op!r}")
        return Rule(coeffs=coeffs, op=op, rhs=Fraction(raw.get("rhs", 0)))


@dataclass(frozen=True)
class FeasibilityProblem:
    """Moment-identity feasibility for an n-point q^r-divisible set.

    ``identities`` is how many binomial-moment identities to impose
    (i = 0 .. identities-1); each identity beyond the third brings in one
    more nonnegative dual-count variable.
    """

    q: int
    r: int
    n: int
    delta: int
    k_lo: int
    k_hi: int
    support: tuple[int, ...]
    identities: int = 4
    extra: tuple[Rule, ...] = ()


def _ceil_log(q: int, x: int) -> int:
    k = 0
    p = 1
    while p < x:
        p *= q
        k += 1
    return k


def build_problem(q, r, n, dims=None, identities=4, extra_rules=()) -> FeasibilityProblem:
    """Assemble the LP instance: weight support (pruned by smaller-divisor
    nonexistence of hyperplane sections) and the dimension range to scan."""
    if r < 1:
        raise RangeError("need r >= 1")
    if n < 1:
        raise RangeError("need n >= 1")
    delta = q**r
    support = []
    for w in range(delta, n + 1, delta):
        section = existence_status(q, r - 1, n - w)
        if section.status != STATUS_EXCLUDED:
            support.append(w)
    if dims is not None:
        k_lo, k_hi = dims
    else:
        k_lo = max(r + 2, _ceil_log(q, n * (q - 1) + 1))
        k_hi = r + 2 + _ceil_log(q, n)
    rules = tuple(Rule.parse(raw) if isinstance(raw, dict) else raw for raw in extra_rules)
    return FeasibilityProblem(
        q=q, r=r, n=n, delta=delta, k_lo=k_lo, k_hi=k_hi,
        support=tuple(support), identities=identities, extra=rules,
    )


class _LinearSystem:
    """Equalities and one-sided inequalities over named rational variables."""

    def __init__(self, names):
        self.names = list(names)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.equalities = []  # (coeff tuple, rhs)
        self.inequalities = []  # (coeff tuple, rhs, label): sum >= rhs

    def add_equality(self, coeffs: dict, rhs) -> None:
        row = [Fraction(0)] * len(self.names)
        for name, value in coeffs.items():
            row[self.index[name]] = Fraction(value)
        self.equalities.append((tuple(row), Fraction(rhs)))

    def add_inequality(self, coeffs: dict, rhs, label: str) -> None:
        row = [Fraction(0)] * len(self.names)
        for name, value in coeffs.items():
            row[self.index[name]] = Fraction(value)
        self.inequalities.append((tuple(row), Fraction(rhs), label))


def _gauss_parametrize(system: _LinearSystem):
    """Reduce the equalities, eliminating variables in declaration order.

    Returns (pivots, parametrization, conflict) where parametrization maps
    each pivot variable to (constant, {free var: coefficient}); conflict, if
    not None, is the multiplier combination of the original equalities that
    yields 0 == nonzero.
    """
    m = len(system.names)
    rows = []
    for i, (coeffs, rhs) in enumerate(system.equalities):
        trace = [Fraction(0)] * len(system.equalities)
        trace[i] = Fraction(1)
        rows.append((list(coeffs), rhs, trace))
    pivot_of: dict[int, int] = {}
    done_rows = set()
    for col in range(m):
        target = None
        for ri, (coeffs, _, _) in enumerate(rows):
            if ri in done_rows or coeffs[col] == 0:
                continue
            target = ri
            break
        if target is None:
            continue
        coeffs, rhs, trace = rows[target]
        inv = Fraction(1) / coeffs[col]
        coeffs = [c * inv for c in coeffs]
        rhs = rhs * inv
        trace = [t * inv for t in trace]
        rows[target] = (coeffs, rhs, trace)
        for ri, (oc, orhs, otr) in enumerate(rows):
            if ri == target or oc[col] == 0:
                continue
            factor = oc[col]
            rows[ri] = (
                [a - factor * b for a, b in zip(oc, coeffs)],
                orhs - factor * rhs,
                [a - factor * b for a, b in zip(otr, trace)],
            )
        pivot_of[col] = target
        done_rows.add(target)
    for ri, (coeffs, rhs, trace) in enumerate(rows):
        if ri not in done_rows and any(coeffs):
            continue
        if ri not in done_rows and rhs != 0:
            conflict = {
                f"eq_{i}": mult for i, mult in enumerate(trace) if mult != 0
            }
            return None, None, {"kind": "equalities", "multipliers": conflict}
    free = [c for c in range(m) if c not in pivot_of]
    parametrization = {}
    for col, ri in pivot_of.items():
        coeffs, rhs, _ = rows[ri]
        parametrization[col] = (
            rhs,
            {f: -coeffs[f] for f in free if coeffs[f] != 0},
        )
    return pivot_of, parametrization, None


def _substitute(system: _LinearSystem, parametrization, free):
    """Rewrite the inequalities over the free variables.

    Returns rows [(coeffs over free, constant, label)] meaning
    sum(coeffs * free) + constant >= 0.
    """
    fpos = {f: i for i, f in enumerate(free)}
    rows = []
    for coeffs, rhs, label in system.inequalities:
        out = [Fraction(0)] * len(free)
        const = -rhs
        for col, value in enumerate(coeffs):
            if value == 0:
                continue
            if col in parametrization:
                base, deps = parametrization[col]
                const += value * base
                for f, fc in deps.items():
                    out[fpos[f]] += value * fc
            else:
                out[fpos[col]] += value
        rows.append((out, const, label))
    return rows


def _normalize_row(coeffs, const):
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        return tuple(coeffs), const, Fraction(1)
    scale = Fraction(1) / abs(lead)
    return tuple(c * scale for c in coeffs), const * scale, scale


def _fourier_motzkin(rows, labels):
    """Eliminate all variables from {coeffs . t + const >= 0} left to right.

    Each working row carries a provenance map {original label: multiplier}.
    Returns (levels, contradiction): levels[i] is the system before
    eliminating variable i; contradiction, if found, holds the nonnegative
    multiplier combination of original rows summing to a negative constant.
    """
    work = [
        (list(coeffs), const, {labels[i]: Fraction(1)})
        for i, (coeffs, const, _) in enumerate(rows)
    ]
    nvars = len(rows[0][0]) if rows else 0
    levels = []

    def conflict_from(row):
        return {"kind": "inequalities", "multipliers": dict(row[2])}

    for row in work:
        if not any(row[0]) and row[1] < 0:
            return [work], conflict_from(row)
    for var in range(nvars):
        levels.append([(list(c), k, dict(p)) for c, k, p in work])
        pos, neg, rest = [], [], []
        for coeffs, const, prov in work:
            c = coeffs[var]
            if c > 0:
                pos.append((coeffs, const, prov))
            elif c < 0:
                neg.append((coeffs, const, prov))
            else:
                rest.append((coeffs, const, prov))
        derived = {}
        for pc, pk, pp in pos:
            for nc, nk, np_ in neg:
                mp = -nc[var]
                mn = pc[var]
                coeffs = [mp * a + mn * b for a, b in zip(pc, nc)]
                const = mp * pk + mn * nk
                prov: dict = {}
                for lbl, mult in pp.items():
                    prov[lbl] = prov.get(lbl, Fraction(0)) + mp * mult
                for lbl, mult in np_.items():
                    prov[lbl] = prov.get(lbl, Fraction(0)) + mn * mult
                if len(prov) > var + 2:
                    # Imbert's bound: a non-redundant row after eliminating
                    # var+1 variables combines at most var+2 originals.
                    continue
                key, nconst, scale = _normalize_row(coeffs, const)
                if not any(key) and nconst < 0:
                    return levels + [[(coeffs, const, prov)]], {
                        "kind": "inequalities",
                        "multipliers": prov,
                    }
                if key not in derived or derived[key][1] > nconst:
                    scaled = {lbl: mult * scale for lbl, mult in prov.items()}
                    derived[key] = (list(key), nconst, scaled)
        work = rest + list(derived.values())
    levels.append([(list(c), k, dict(p)) for c, k, p in work])
    for coeffs, const, prov in work:
        if const < 0:
            return levels, {"kind": "inequalities", "multipliers": dict(prov)}
    return levels, None


def _verify_multipliers(rows, labels, conflict) -> bool:
    """Re-add the original inequality rows with the certificate multipliers
    and confirm the variables cancel while the constant goes negative."""
    if conflict["kind"] != "inequalities":
        return True
    by_label = {labels[i]: rows[i] for i in range(len(rows))}
    nvars = len(rows[0][0]) if rows else 0
    total = [Fraction(0)] * nvars
    const = Fraction(0)
    for label, mult in conflict["multipliers"].items():
        if mult < 0:
            return False
        coeffs, k, _ = by_label[label]
        total = [a + mult * b for a, b in zip(total, coeffs)]
        const += mult * k
    return not any(total) and const < 0


def _back_substitute(levels, nvars):
    """Pick an exact feasible point, recording each variable's conditional
    interval; returns (values, intervals, unique)."""
    values = [Fraction(0)] * nvars
    intervals = []
    unique = True
    for var in range(nvars - 1, -1, -1):
        lo, hi = None, None
        for coeffs, const, _ in levels[var]:
            c = coeffs[var]
            if c == 0:
                continue
            rest = const + sum(
                coeffs[j] * values[j] for j in range(var + 1, nvars)
            )
            bound = -rest / c
            if c > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if lo is None and hi is None:
            choice = Fraction(0)
            unique = False
        elif lo is None:
            choice = min(hi, Fraction(0))
            unique = False
        elif hi is None:
            choice = lo
            unique = False
        else:
            choice = lo
            if lo != hi:
                unique = False
        values[var] = choice
        intervals.append((var, lo, hi))
    intervals.reverse()
    return values, intervals, unique


def _final_interval(levels, names):
    """Bounds forced on the last remaining variable, with provenance."""
    if len(levels) < 2:
        return None
    last = levels[-2]
    active = {
        j for coeffs, _, _ in last for j, c in enumerate(coeffs) if c != 0
    }
    if len(active) != 1:
        return None
    var = active.pop()
    lo, hi = None, None
    lo_prov, hi_prov = None, None
    for coeffs, const, prov in last:
        c = coeffs[var]
        if c == 0:
            continue
        bound = -const / c
        if c > 0 and (lo is None or bound > lo):
            lo, lo_prov = bound, prov
        if c < 0 and (hi is None or bound < hi):
            hi, hi_prov = bound, prov
    return {
        "variable": names[var],
        "lower": lo,
        "lower_from": sorted(lo_prov) if lo_prov else None,
        "upper": hi,
        "upper_from": sorted(hi_prov) if hi_prov else None,
    }


def _surplus_name(j: int) -> str:
    return "x" if j == 3 else f"x{j}"


def _moment_system(problem: FeasibilityProblem, k=None, y_min=None):
    """Binomial-moment equalities for the weight support.

    Identity i (i = 0 .. identities-1) relates the i-th binomial moment of
    the weight counts to the dual counts of weight <= i; duals of weight 1
    and 2 vanish for point sets, and each dual count of weight j >= 3 enters
    through a nonnegative surplus variable x_j (scaled by q^(k-j)).  With
    ``k`` fixed the system is over the weight counts and the surpluses;
    otherwise the size scale y = q^(k-3) stays a variable bounded below by
    ``y_min``.
    """
    q, n = problem.q, problem.n
    depth = problem.identities
    if depth < 4:
        raise RangeError("need at least the first four moment identities")
    surpluses = [_surplus_name(j) for j in range(3, depth)]
    names = [f"A_{w}" for w in problem.support] + surpluses
    parametric = k is None
    if parametric:
        names.append("y")
    system = _LinearSystem(names)
    for i in range(depth):
        row = {f"A_{w}": comb(n - w, i) for w in problem.support}
        for j in range(3, min(i, depth - 1) + 1):
            row[_surplus_name(j)] = -Fraction(comb(n - j, i - j), q ** (i - j))
        if parametric:
            row["y"] = -Fraction(comb(n, i) * q**3, q**i)
            system.add_equality(row, -comb(n, i))
        else:
            system.add_equality(row, comb(n, i) * (Fraction(q) ** (k - i) - 1))
    for w in problem.support:
        system.add_inequality({f"A_{w}": 1}, 0, f"A_{w}>=0")
    for name in surpluses:
        system.add_inequality({name: 1}, 0, f"{name}>=0")
    if parametric:
        system.add_inequality({"y": 1}, y_min, f"y>={y_min}")
    for idx, rule in enumerate(problem.extra):
        coeffs = {name: val for name, val in rule.coeffs if name in system.index}
        if rule.op == ">=":
            system.add_inequality(coeffs, rule.rhs, f"rule_{idx}")
        elif rule.op == "<=":
            system.add_inequality(
                {name: -val for name, val in coeffs.items()},
                -rule.rhs,
                f"rule_{idx}",
            )
        else:
            system.add_equality(coeffs, rule.rhs)
    return system


def _solve_case(problem: FeasibilityProblem, k=None, y_min=None):
    """Run one LP case to a feasible sample or an infeasibility certificate."""
    system = _moment_system(problem, k=k, y_min=y_min)
    names = system.names
    pivots, parametrization, conflict = _gauss_parametrize(system)
    record: dict = {"mode": "parametric" if k is None else "fixed", "k": k}
    if y_min is not None:
        record["y_min"] = y_min
    if conflict is not None:
        record.update(feasible=False, reason=conflict)
        return record
    free = [c for c in range(len(names)) if c not in pivots]
    record["parametrization"] = {
        names[col]: {
            "const": base,
            **{names[f]: fc for f, fc in deps.items()},
        }
        for col, (base, deps) in sorted(parametrization.items())
    }
    rows = _substitute(system, parametrization, free)
    labels = [label for _, _, label in system.inequalities]
    sub_rows = [(coeffs, const, labels[i]) for i, (coeffs, const, _) in enumerate(rows)]
    levels, contradiction = _fourier_motzkin(sub_rows, labels)
    free_names = [names[f] for f in free]
    if contradiction is not None:
        if not _verify_multipliers(sub_rows, labels, contradiction):
            raise InconsistentInput("certificate failed independent replay")
        record.update(
            feasible=False,
            reason=contradiction,
            final_interval=_final_interval(levels, free_names),
        )
        return record
    values, intervals, unique = _back_substitute(levels, len(free))
    point = {}
    for col, (base, deps) in parametrization.items():
        point[names[col]] = base + sum(
            fc * values[free.index(f)] for f, fc in deps.items()
        )
    for i, f in enumerate(free):
        point[names[f]] = values[i]
    _check_point(system, point)
    record.update(
        feasible=True,
        unique=unique,
        solution=point,
        intervals=[
            {"variable": free_names[i], "lower": lo, "upper": hi}
            for i, (var, lo, hi) in enumerate(intervals)
        ],
    )
    return record


def _check_point(system: _LinearSystem, point) -> None:
    for coeffs, rhs in system.equalities:
        total = sum(c * point[system.names[i]] for i, c in enumerate(coeffs) if c)
        if total != rhs:
            raise InconsistentInput("sample point violates an equality")
    for coeffs, rhs, label in system.inequalities:
        total = sum(c * point[system.names[i]] for i, c in enumerate(coeffs) if c)
        if total < rhs:
            raise InconsistentInput(f"sample point violates {label}")


def _case_summary(problem, record):
    """Trim a solved fixed-k record for the verdict certificate."""
    out = {"k": record.get("k"), "feasible": record["feasible"]}
    if record.get("y_min") is not None:
        out["y_min"] = record["y_min"]
        out["mode"] = record["mode"]
    if record["feasible"]:
        point = record["solution"]
        out["unique"] = record["unique"]
        out["solution"] = {w: point[f"A_{w}"] for w in problem.support}
        out["x"] = point["x"]
        if "y" in point:
            out["y"] = point["y"]
            y = point["y"]
        else:
            y = Fraction(problem.q) ** (record["k"] - 3)
        if y:
            out["dual_a3"] = point["x"] / y
        n = problem.n
        scale = problem.q - 1
        out["a_spectrum"] = {
            n - w: Fraction(point[f"A_{w}"], scale)
            for w in problem.support
            if point[f"A_{w}"] != 0
        }
    else:
        out["reason"] = record["reason"]
        if record.get("final_interval"):
            out["final_interval"] = record["final_interval"]
        if record.get("parametrization"):
            out["parametrization"] = record["parametrization"]
    return out


def lp_feasibility(problem: FeasibilityProblem) -> Verdict:
    """Decide the moment-identity LP over the whole dimension range.

    A parametric run with the dual scale bounded below covers every
    dimension at once; when it is infeasible the cardinality is excluded.
    Otherwise each dimension is checked exactly, plus a parametric tail.
    """
    q, r, n = problem.q, problem.r, problem.n
    y_lo = Fraction(q) ** (problem.k_lo - 3)
    relaxed = _solve_case(problem, y_min=y_lo)
    if not relaxed["feasible"]:
        cert = {
            "mode": "parametric",
            "support": list(problem.support),
            "k_range": [problem.k_lo, problem.k_hi],
            "y_min": y_lo,
            "reason": relaxed["reason"],
            "final_interval": relaxed.get("final_interval"),
            "parametrization": relaxed.get("parametrization"),
        }
        return Verdict(q, r, n, STATUS_EXCLUDED, "lp", cert)
    cases = []
    feasible_any = False
    for k in range(problem.k_lo, problem.k_hi + 1):
        record = _solve_case(problem, k=k)
        cases.append(_case_summary(problem, record))
        feasible_any = feasible_any or record["feasible"]
    tail = _solve_case(problem, y_min=Fraction(q) ** (problem.k_hi - 2))
    cases.append(_case_summary(problem, tail))
    feasible_any = feasible_any or tail["feasible"]
    cert = {
        "mode": "per_k",
        "support": list(problem.support),
        "k_range": [problem.k_lo, problem.k_hi],
        "cases": cases,
    }
    status = STATUS_FEASIBLE if feasible_any else STATUS_EXCLUDED
    return Verdict(q, r, n, status, "lp", cert)


# ---------------------------------------------------------------------------
# aggregated existence pipeline


_STATUS_CACHE: dict[tuple[int, int, int], Verdict] = {}


def clear_status_cache() -> None:
    _STATUS_CACHE.clear()
    _POOLS.clear()


def _average_chain(q: int, r: int, n: int):
    """Exclude n by averaging down j quotient levels and ruling out every
    admissible section size at divisor level r - j."""
    if r < 2:
        return None
    block = q ** (r + 1)
    b = n % block
    y = ((q - 1) * b) % block
    if y == 0:
        return None
    for j in range(r - 1, 0, -1):
        try:
            bound, rho = iterated_average(q, r, n, y, j)
        except DepthExceeded:
            continue
        if bound < 0:
            return {"y": y, "j": j, "bound": bound, "candidates": []}
        modulus = q ** (r + 1 - j)
        candidates = list(range(rho, bound + 1, modulus))
        if len(candidates) > _AVERAGE_CANDIDATE_CAP:
            continue
        verdicts = [existence_status(q, r - j, c) for c in candidates]
        if all(v.status == STATUS_EXCLUDED for v in verdicts):
            return {
                "y": y,
                "j": j,
                "bound": bound,
                "modulus": modulus,
                "candidates": [
                    {"n": c, "stage": v.stage}
                    for c, v in zip(candidates, verdicts)
                ],
            }
    return None


def existence_status(q: int, r: int, n: int) -> Verdict:
    """Aggregate verdict for an n-point q^r-divisible set.

    Stages, in order: trivial, constructive, cited, interval, tau, average,
    lp, cubic; the first conclusive stage wins and is recorded.
    """
    if r < 0:
        raise RangeError("need r >= 0")
    if n < 0:
        raise RangeError("cardinality must be nonnegative")
    key = (q, r, n)
    if key in _STATUS_CACHE:
        return _STATUS_CACHE[key]
    verdict = _decide_status(q, r, n)
    _STATUS_CACHE[key] = verdict
    return verdict


def _decide_status(q: int, r: int, n: int) -> Verdict:
    if n == 0:
        return Verdict(q, r, n, STATUS_EXISTS, "trivial", {"kind": "empty"})
    if r == 0:
        return Verdict(
            q, r, n, STATUS_EXISTS, "trivial", {"kind": "no divisibility"}
        )
    pool = _pool(q, r)
    if pool.constructive(n):
        return Verdict(
            q, r, n, STATUS_EXISTS, "constructive",
            {"parts": pool.decompose(n)},
        )
    if pool.cited_reachable(n):
        cert = {"citation": pool.cited.get(n, "closure of cited sizes")}
        return Verdict(q, r, n, STATUS_EXISTS, "cited", cert)
    if exclusion_interval(q, r, n):
        cert = {
            "blocks": [gaussian_binomial(r + 1, 1, q), q ** (r + 1)],
            "window": r * q ** (r + 1),
        }
        return Verdict(q, r, n, STATUS_EXCLUDED, "interval", cert)
    delta = q**r
    cert = tau_exclude(q, n, delta)
    if cert is not None:
        return Verdict(q, r, n, STATUS_EXCLUDED, "tau", cert)
    cert = _average_chain(q, r, n)
    if cert is not None:
        return Verdict(q, r, n, STATUS_EXCLUDED, "average", cert)
    lp_verdict = None
    problem = build_problem(q, r, n)
    if len(problem.support) <= SUPPORT_CAP:
        lp_verdict = lp_feasibility(problem)
        if lp_verdict.status == STATUS_EXCLUDED:
            return lp_verdict
    cert = _cubic_scan(q, n, delta)
    if cert is not None:
        return Verdict(q, r, n, STATUS_EXCLUDED, "cubic", cert)
    if lp_verdict is not None:
        return Verdict(
            q, r, n, STATUS_UNDECIDED, "lp", lp_verdict.certificate
        )
    return Verdict(
        q, r, n, STATUS_UNDECIDED, None,
        {"skipped_lp": len(problem.support)},
    )


def status_range(q: int, r: int, lo: int, hi: int) -> dict[int, Verdict]:
    return {n: existence_status(q, r, n) for n in range(lo, hi + 1)}


def frontier(q: int, r: int):
    """Largest excluded cardinality, certified complete: every size above the
    two-block representability bound is realizable, so it is enough to settle
    everything below it.  Returns None when some small size is undecided."""
    top = frobenius_upper(q, r)
    worst = 0
    for n in range(1, top + 1):
        verdict = existence_status(q, r, n)
        if verdict.status == STATUS_UNDECIDED:
            return None
        if verdict.status == STATUS_EXCLUDED:
            worst = n
    return worst


# ---------------------------------------------------------------------------
# certificate replay


def replay(verdict: Verdict) -> bool:
    """Re-check an exclusion certificate by independent exact arithmetic."""
    if verdict.status != STATUS_EXCLUDED:
        return True
    q, r, n = verdict.q, verdict.r, verdict.n
    stage = verdict.stage
    cert = verdict.certificate or {}
    if stage == "interval":
        return n <= r * q ** (r + 1) and representable(q, r, n) is None
    if stage == "tau":
        value = tau(q, n, q**r, cert["m"])
        return value == cert["tau"] and (
            value < 0 or (value == 0 and cert["m"] >= 2)
        )
    if stage == "average":
        bound, rho = iterated_average(q, r, n, cert["y"], cert["j"])
        if bound != cert["bound"]:
            return False
        if bound < 0:
            return True
        listed = [entry["n"] for entry in cert["candidates"]]
        if listed != list(range(rho, bound + 1, q ** (r + 1 - cert["j"]))):
            return False
        return all(
            existence_status(q, r - cert["j"], c).status == STATUS_EXCLUDED
            for c in listed
        )
    if stage == "cubic":
        got = cubic_exclude(q, n, q**r, cert["t"])
        return got == cert
    if stage == "lp":
        return _replay_lp(verdict)
    return False


def _replay_lp(verdict: Verdict) -> bool:
    cert = verdict.certificate or {}
    problem = build_problem(verdict.q, verdict.r, verdict.n)
    if list(problem.support) != list(cert.get("support", [])):
        return False
    if cert.get("mode") == "parametric":
        record = _solve_case(problem, y_min=cert["y_min"])
        return not record["feasible"]
    for case in cert.get("cases", []):
        if case["feasible"]:
            return False
        if case.get("mode") == "parametric":
            record = _solve_case(problem, y_min=case["y_min"])
        else:
            record = _solve_case(problem, k=case["k"])
        if record["feasible"]:
            return False
    return True
