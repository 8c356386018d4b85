"""Size bounds for maximum partial k-spreads of F_q^v.

All arithmetic is exact: ceilings of square-root expressions are decided by
comparing squares of integers, surd envelopes use explicit rational
brackets, and the hole-count sharpening step consults the divisible-set
existence engine.  Every formula checks its own applicability and raises
instead of returning a silently wrong value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import isqrt

from .errors import NotApplicable, RangeError, WrongResidue
from .gf import gaussian_binomial
from .macwilliams import STATUS_EXCLUDED, existence_status

#: Safety cap for the hole-count sharpening loop.
SHARPEN_CAP = 200

#: Hole counts above this are not sent to the existence engine (its
#: constructive stage allocates a bitset proportional to the cardinality).
SHARPEN_SIZE_CAP = 5_000_000

#: Rational surrogate for 1/(3+2*sqrt(2)); slightly larger, so substituting
#: it keeps strict upper bounds valid.
INV_SURD = Fraction(50, 291)


def _split(q: int, v: int, k: int) -> tuple[int, int]:
    if q < 2:
        raise RangeError("need a field size of at least 2")
    if k < 1 or v < k:
        raise RangeError("need 1 <= k <= v")
    return divmod(v, k)


# ---------------------------------------------------------------------------
# closed-form bounds


def trivial_upper(q: int, v: int, k: int) -> int:
    """Point-counting bound: no more members than ambient points per member."""
    _split(q, v, k)
    return (q**v - 1) // (q**k - 1)


def multicomponent_lower(q: int, v: int, k: int) -> int:
    """Layered lifted-matrix construction size: 1 + sum of layer sizes."""
    t, r = _split(q, v, k)
    if r < 1:
        raise WrongResidue("remainder of v modulo k must be positive")
    return 1 + sum(q ** (s * k + r) for s in range(1, t))


def residue_one_exact(q: int, v: int, k: int) -> int:
    """Exact maximum for v = tk + 1: the layered construction is optimal."""
    t, r = _split(q, v, k)
    if k < 2:
        raise RangeError("need k >= 2")
    if r != 1:
        raise WrongResidue("exact value requires v = 1 mod k")
    return (q**v - q ** (k + 1) + q**k - 1) // (q**k - 1)


# Established name of the residue-one exact value in the literature.
beutelspacher_exact = residue_one_exact


def _ceil_shifted_root(disc: int, shift: int) -> int:
    """ceil((sqrt(disc) - shift) / 2) by exact integer bracketing."""
    if disc < 0:
        raise RangeError("negative discriminant")
    root = isqrt(disc)
    m = (root - shift) // 2 - 1
    while True:
        c = 2 * m + shift
        if c >= 0 and c * c >= disc:
            return m
        m += 1


def _floor_shifted_root(disc: int, shift: int) -> int:
    """floor((sqrt(disc) - shift) / 2) by exact integer bracketing."""
    if disc < 0:
        raise RangeError("negative discriminant")
    root = isqrt(disc)
    m = (root - shift) // 2 + 1
    while True:
        c = 2 * m + shift
        if c <= 0 or c * c <= disc:
            return m
        m -= 1


def quadratic_counting_upper(q: int, v: int, k: int) -> int:
    """Upper bound from second-moment counting of holes per member.

    Subtracts ceil(theta) from the point-counting bound, where
    2*theta = sqrt(1 + 4q^k(q^k - q^r)) - (2q^k - 2q^r + 1).
    """
    _, r = _split(q, v, k)
    if r < 1:
        raise WrongResidue("bound requires a nonzero remainder")
    disc = 1 + 4 * q**k * (q**k - q**r)
    shift = 2 * q**k - 2 * q**r + 1
    return trivial_upper(q, v, k) - _ceil_shifted_root(disc, shift)


# Established names of these bounds in the partial-spread literature.
drake_freeman_upper = quadratic_counting_upper


def exact_value_q2_r2(v: int, k: int) -> int:
    """Exact binary maximum for v = tk + 2 with k >= 4."""
    t, r = _split(2, v, k)
    if k < 4:
        raise RangeError("need k >= 4")
    if r != 2:
        raise WrongResidue("exact value requires v = 2 mod k")
    if t < 2:
        raise RangeError("need at least two layers")
    numerator = 2**v - 3 * 2**k - 1
    assert numerator % (2**k - 1) == 0
    return numerator // (2**k - 1)


def upper_bound_q3_r2(v: int, k: int) -> int:
    """Ternary upper bound for v = tk + 2 with k >= 4: deficiency >= 5."""
    t, r = _split(3, v, k)
    if k < 4:
        raise RangeError("need k >= 4")
    if r != 2:
        raise WrongResidue("bound requires v = 2 mod k")
    if t < 2:
        raise RangeError("need at least two layers")
    numerator = 3**v - 9
    assert numerator % (3**k - 1) == 0
    return numerator // (3**k - 1) - 5


def _layer_scale(q: int, v: int, k: int, r: int) -> int:
    numerator = q ** (v - k) - q**r
    assert numerator % (q**k - 1) == 0
    return numerator // (q**k - 1)


def divisibility_upper_linear(q: int, v: int, k: int) -> int:
    """Upper bound from the first-moment identity on the hole set.

    The hole set of a large partial spread is q^(k-1)-divisible; the
    first-moment average argument caps the member count at
    l*q^k + 1 + z(q-1) with the smallest admissible slack z >= 0.
    """
    t, r = _split(q, v, k)
    if r < 1 or k <= r:
        raise NotApplicable("bound requires k > r >= 1")
    if t < 2:
        raise NotApplicable("bound requires at least two layers")
    z = max(0, gaussian_binomial(r, 1, q) + 1 - k)
    return _layer_scale(q, v, k, r) * q**k + 1 + z * (q - 1)


def divisibility_upper_quadratic(q: int, v: int, k: int, y: int | None = None) -> int:
    """Upper bound from the second-moment identity on the hole set.

    For each subspace codimension parameter y in [max(r,2), k] the
    second-moment inequality yields l*q^k + ceil(lam - 1/2 - sqrt(D)/2)
    with lam = q^y and D = 1 + 4*lam*(lam - (z+y-1)(q-1) - 1); the bound
    is minimized over y unless a specific y is requested.  Choosing y = k
    reproduces the quadratic counting bound.
    """
    t, r = _split(q, v, k)
    if r < 1 or k <= r:
        raise NotApplicable("bound requires k > r >= 1")
    if t < 2:
        raise NotApplicable("bound requires at least two layers")
    z = gaussian_binomial(r, 1, q) + 1 - k
    if z < 0:
        raise NotApplicable("dimension too large for the slack parameter")
    y_lo = max(r, 2)
    if y is not None:
        if not y_lo <= y <= k:
            raise RangeError(f"parameter y must lie in [{y_lo}, {k}]")
        choices = [y]
    else:
        choices = range(y_lo, k + 1)
    best = None
    for y_cur in choices:
        lam = q**y_cur
        disc = 1 + 4 * lam * (lam - (z + y_cur - 1) * (q - 1) - 1)
        if disc < 0:
            continue
        term = -_floor_shifted_root(disc, 2 * lam - 1)
        if best is None or term < best:
            best = term
    if best is None:
        raise NotApplicable("no admissible parameter choice")
    return _layer_scale(q, v, k, r) * q**k + best


@dataclass(frozen=True)
class SurdEnvelope:
    """Rational envelope of the quadratic counting bound."""

    q: int
    v: int
    k: int
    r: int
    layer_scale: int
    root_lower: Fraction
    root_upper: Fraction
    size_upper_strict: Fraction
    deficiency_lower_strict: Fraction


def drake_freeman_envelope(q: int, v: int, k: int) -> SurdEnvelope:
    """Rational brackets for sqrt(1+4q^k(q^k-q^r)) and what they imply.

    The root lies strictly above 2q^k - q^r - q^(2r-k)*(100/291) and at
    most at 2q^k - q^r - q^(2r-k)*(3/16); consequently the spread size is
    strictly below l*q^k + q^r/2 + 1/2 + q^(2r-k)*(50/291) and the
    deficiency strictly above (q^r-1)/2 - q^(2r-k)*(50/291).
    """
    _, r = _split(q, v, k)
    if r < 1 or k <= r:
        raise NotApplicable("envelope requires k > r >= 1")
    scale = _layer_scale(q, v, k, r)
    small = Fraction(q) ** (2 * r - k)
    base = 2 * q**k - q**r
    return SurdEnvelope(
        q=q,
        v=v,
        k=k,
        r=r,
        layer_scale=scale,
        root_lower=base - small * 2 * INV_SURD,
        root_upper=base - small * Fraction(3, 16),
        size_upper_strict=scale * q**k
        + Fraction(q**r, 2)
        + Fraction(1, 2)
        + small * INV_SURD,
        deficiency_lower_strict=Fraction(q**r - 1, 2) - small * INV_SURD,
    )


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class BoundReport:
    """Best known lower/upper bounds with provenance and deficiency range."""

    q: int
    v: int
    k: int
    lower: int
    lower_src: str
    upper: int
    upper_src: str
    sigma_min: int
    sigma_max: int
    per_formula: dict

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "v": self.v,
            "k": self.k,
            "lower": self.lower,
            "lower_src": self.lower_src,
            "upper": self.upper,
            "upper_src": self.upper_src,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "exact": self.exact,
            "per_formula": dict(self.per_formula),
        }


def sporadic_bounds() -> dict:
    """Cited sporadic values {(q,v,k): {"lower"|"upper": {value, citation}}}."""
    text = resources.files("qspread").joinpath("data/sporadic_bounds.json").read_text()
    raw = json.loads(text)
    table: dict = {}
    for direction, entries in raw.items():
        for key, payload in entries.items():
            q, v, k = (int(part) for part in key.split(","))
            table.setdefault((q, v, k), {})[direction] = payload
    return table


_REPORT_CACHE: dict[tuple[int, int, int], BoundReport] = {}


def clear_report_cache() -> None:
    _REPORT_CACHE.clear()


def best_bounds(q: int, v: int, k: int) -> BoundReport:
    key = (q, v, k)
    if key not in _REPORT_CACHE:
        _REPORT_CACHE[key] = _build_report(q, v, k)
    return _REPORT_CACHE[key]


def _try(per_formula: dict, name: str, func, *args):
    try:
        value = func(*args)
    except (NotApplicable, WrongResidue, RangeError):
        per_formula[name] = None
        return None
    per_formula[name] = value
    return value


def _build_report(q: int, v: int, k: int) -> BoundReport:
    t, r = _split(q, v, k)
    per_formula: dict = {}
    trivial = trivial_upper(q, v, k)
    per_formula["trivial"] = trivial

    if r == 0:
        size = trivial
        per_formula["spread"] = size
        return BoundReport(
            q=q, v=v, k=k,
            lower=size, lower_src="spread",
            upper=size, upper_src="spread",
            sigma_min=0, sigma_max=0,
            per_formula=per_formula,
        )

    lower_candidates: list[tuple[int, str]] = []
    upper_candidates: list[tuple[int, str]] = [(trivial, "trivial")]

    value = _try(per_formula, "multicomponent", multicomponent_lower, q, v, k)
    if value is not None:
        lower_candidates.append((value, "multicomponent"))
    value = _try(per_formula, "residue_one_exact", residue_one_exact, q, v, k)
    if value is not None:
        lower_candidates.append((value, "residue_one_exact"))
        upper_candidates.append((value, "residue_one_exact"))
    if q == 2:
        value = _try(per_formula, "q2_r2_exact", exact_value_q2_r2, v, k)
        if value is not None:
            lower_candidates.append((value, "q2_r2_exact"))
            upper_candidates.append((value, "q2_r2_exact"))
    if q == 3:
        value = _try(per_formula, "q3_r2_upper", upper_bound_q3_r2, v, k)
        if value is not None:
            upper_candidates.append((value, "q3_r2_upper"))
    value = _try(per_formula, "quadratic_counting", quadratic_counting_upper, q, v, k)
    if value is not None:
        upper_candidates.append((value, "quadratic_counting"))
    value = _try(per_formula, "linear_divisibility", divisibility_upper_linear, q, v, k)
    if value is not None:
        upper_candidates.append((value, "linear_divisibility"))
    value = _try(
        per_formula, "quadratic_divisibility", divisibility_upper_quadratic, q, v, k
    )
    if value is not None:
        upper_candidates.append((value, "quadratic_divisibility"))

    sporadic = sporadic_bounds().get((q, v, k), {})
    if "lower" in sporadic:
        lower_candidates.append((int(sporadic["lower"]["value"]), "sporadic"))
        per_formula["sporadic_lower"] = int(sporadic["lower"]["value"])
    if "upper" in sporadic:
        upper_candidates.append((int(sporadic["upper"]["value"]), "sporadic"))
        per_formula["sporadic_upper"] = int(sporadic["upper"]["value"])

    if v - k >= k:
        inner = best_bounds(q, v - k, k)
        lower_candidates.append((inner.lower + q ** (v - k), "extension"))
        per_formula["extension"] = inner.lower + q ** (v - k)

    lower_candidates.append((1, "single"))
    lower, lower_src = max(lower_candidates, key=lambda pair: pair[0])
    upper, upper_src = min(upper_candidates, key=lambda pair: pair[0])

    if k >= 2:
        sharpened = sharpen_upper(q, v, k, upper)
        if sharpened < upper:
            upper, upper_src = sharpened, "hole_exclusion"
            per_formula["hole_exclusion"] = sharpened

    scale = _layer_scale(q, v, k, r)
    base = scale * q**k + q**r
    return BoundReport(
        q=q, v=v, k=k,
        lower=lower, lower_src=lower_src,
        upper=upper, upper_src=upper_src,
        sigma_min=base - upper, sigma_max=base - lower,
        per_formula=per_formula,
    )


def sharpen_upper(q: int, v: int, k: int, upper: int) -> int:
    """Decrement the bound while the implied hole count cannot exist.

    A partial spread of size U leaves [v 1]_q - U*[k 1]_q holes, and the
    hole set of a maximum partial spread is q^(k-1)-divisible; if that
    cardinality is excluded, size U is impossible.
    """
    ambient = gaussian_binomial(v, 1, q)
    member = gaussian_binomial(k, 1, q)
    for _ in range(SHARPEN_CAP):
        holes = ambient - upper * member
        if holes < 0:
            upper -= 1
            continue
        if holes > SHARPEN_SIZE_CAP:
            break
        if existence_status(q, k - 1, holes).status != STATUS_EXCLUDED:
            break
        upper -= 1
    return upper
