"""Finite fields with integer-indexed elements, and counting helpers.

Elements of a field of order ``q = p**e`` are the integers ``0 .. q-1``.
The index encodes the coordinate vector over the base field: writing the
index in base ``|base|``, digit ``j`` is the coefficient of ``x**j`` in the
polynomial-basis expansion (constant digit least significant).  A prime
field is plain arithmetic modulo ``p``; extensions are constructed as
quotients by a deterministically chosen irreducible polynomial, so equal
orders always give identical tables.
"""

from __future__ import annotations

from functools import lru_cache

from .budget import check_field_order
from .errors import NotAPrimePower, RangeError

# ---------------------------------------------------------------------------
# integer helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power_decomposition(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e`` and ``p`` prime, or raise."""
    if q < 2:
        raise NotAPrimePower(f"{q} is not a prime power")
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise NotAPrimePower(f"{q} is not a prime power")
            return p, e
        p += 1
    return q, 1  # q itself is prime


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def gaussian_binomial(v: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of a v-dimensional space over F_q."""
    if q < 2:
        raise RangeError(f"field order must be at least 2, got {q}")
    if v < 0:
        raise RangeError(f"ambient dimension must be nonnegative, got {v}")
    if k < 0 or k > v:
        return 0
    result = 1
    for i in range(k):
        result = result * (q ** (v - i) - 1) // (q ** (i + 1) - 1)
    return result


def projective_point_count(v: int, q: int) -> int:
    return gaussian_binomial(v, 1, q)


# ---------------------------------------------------------------------------
# polynomial arithmetic over a field (tuples of element indices, little-endian)


def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_add(f, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(f.add(x, y))
    return _poly_trim(tuple(out))


def _poly_scale(f, a, s):
    if s == 0:
        return ()
    return _poly_trim(tuple(f.mul(c, s) for c in a))


def _poly_mul(f, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y == 0:
                continue
            out[i + j] = f.add(out[i + j], f.mul(x, y))
    return _poly_trim(tuple(out))


def _poly_mod(f, a, m):
    """Remainder of a modulo m (m monic)."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        for i in range(dm + 1):
            a[shift + i] = f.sub(a[shift + i], f.mul(lead, m[i]))
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


def _poly_powmod(f, base, exp, m):
    result = (1,)
    base = _poly_mod(f, base, m)
    while exp > 0:
        if exp & 1:
            result = _poly_mod(f, _poly_mul(f, result, base), m)
        base = _poly_mod(f, _poly_mul(f, base, base), m)
        exp >>= 1
    return result


def _poly_gcd(f, a, b):
    a, b = _poly_trim(tuple(a)), _poly_trim(tuple(b))
    while b:
        inv_lead = f.inv(b[-1])
        monic_b = tuple(f.mul(c, inv_lead) for c in b)
        a, b = b, _poly_mod(f, a, monic_b)
    return a


def _is_irreducible(f, g) -> bool:
    """Test a monic polynomial g of degree >= 1 over the field f."""
    n = len(g) - 1
    if n == 1:
        return True
    if g[0] == 0:  # divisible by x
        return False
    q = f.q
    x = (0, 1)
    t = x
    frob = {}
    for d in range(1, n + 1):
        t = _poly_powmod(f, t, q, g)
        frob[d] = t
    if frob[n] != _poly_mod(f, x, g):
        return False
    for ell in prime_factors(n):
        diff = _poly_add(f, frob[n // ell], _poly_scale(f, x, f.neg(1)))
        if len(_poly_gcd(f, diff, g)) > 1:  # a common factor of positive degree
            return False
    return True


# ---------------------------------------------------------------------------
# fields

_TABLE_CAP = 512  # build full add/mul tables for orders up to this


class PrimeField:
    """Arithmetic modulo a prime p; elements are 0..p-1."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise NotAPrimePower(f"{p} is not prime")
        self.p = p
        self.q = p
        self.e = 1
        self.degree = 1

    def elements(self):
        return range(self.q)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        if a == 0 and k == 0:
            return 1
        return pow(a, k, self.p)

    def coeffs(self, a):
        return (a,)

    def from_coeffs(self, cs):
        cs = tuple(cs)
        if len(cs) > 1 and any(cs[1:]):
            raise RangeError("too many coordinates for a prime field element")
        return cs[0] if cs else 0

    def __repr__(self):
        return f"GF({self.p})"


class ExtensionField:
    """Degree-n extension of a base field by a fixed irreducible polynomial.

    ``modulus`` holds the non-leading coefficients (base-field indices,
    constant first) of the monic defining polynomial.  If omitted, the
    deterministic choice is the irreducible monic polynomial whose
    non-leading coefficient vector has the smallest integer value
    ``sum(c_i * |base|**i)``.
    """

    def __init__(self, base, degree: int, modulus: tuple[int, ...] | None = None):
        if degree < 2:
            raise RangeError(f"extension degree must be >= 2, got {degree}")
        self.base = base
        self.degree = degree
        self.q = base.q**degree
        check_field_order(self.q)
        self.p = base.p
        self.e = base.e * degree
        if modulus is None:
            modulus = self._smallest_irreducible()
        else:
            modulus = tuple(modulus)
            if len(modulus) != degree:
                raise RangeError("modulus must list exactly `degree` coefficients")
            if not _is_irreducible(base, modulus + (1,)):
                raise RangeError("modulus polynomial is reducible")
        self.modulus = modulus
        self._xpow = self._reduction_table()
        self._mul_table = None
        self._inv_table = None
        if self.q <= _TABLE_CAP:
            self._build_tables()

    def _smallest_irreducible(self) -> tuple[int, ...]:
        base, n = self.base, self.degree
        for value in range(base.q**n):
            coeffs = _index_digits(value, base.q, n)
            if coeffs[0] == 0:
                continue  # constant term 0 means divisible by x
            if _is_irreducible(base, coeffs + (1,)):
                return coeffs
        raise NotAPrimePower("no irreducible polynomial found")  # unreachable

    def _reduction_table(self):
        """Coefficient vectors of x^i reduced mod the modulus, i = n .. 2n-2."""
        base, n = self.base, self.degree
        neg_mod = tuple(base.neg(c) for c in self.modulus)
        table = {n: neg_mod}
        cur = neg_mod
        for i in range(n + 1, 2 * n - 1):
            shifted = (0,) + cur
            head, overflow = shifted[:n], shifted[n] if len(shifted) > n else 0
            if overflow:
                head = tuple(base.add(h, base.mul(overflow, m)) for h, m in zip(head, neg_mod))
            table[i] = head
            cur = head
        return table

    def _build_tables(self):
        q = self.q
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                v = self._mul_poly(a, b)
                mul[a][b] = v
                mul[b][a] = v
        self._mul_table = mul
        inv = [0] * q
        for a in range(1, q):
            if inv[a]:
                continue
            row = mul[a]
            for b in range(1, q):
                if row[b] == 1:
                    inv[a] = b
                    inv[b] = a
                    break
        self._inv_table = inv

    def elements(self):
        return range(self.q)

    def coeffs(self, a) -> tuple[int, ...]:
        return _index_digits(a, self.base.q, self.degree)

    def from_coeffs(self, cs) -> int:
        cs = tuple(cs)
        if len(cs) > self.degree and any(cs[self.degree:]):
            raise RangeError("too many coordinates")
        value = 0
        for c in reversed(cs[: self.degree]):
            value = value * self.base.q + c
        return value

    def add(self, a, b):
        base, bq = self.base, self.base.q
        value, mult = 0, 1
        while a or b:
            value += base.add(a % bq, b % bq) * mult
            a //= bq
            b //= bq
            mult *= bq
        return value

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        base, bq = self.base, self.base.q
        value, mult = 0, 1
        while a:
            value += base.neg(a % bq) * mult
            a //= bq
            mult *= bq
        return value

    def _mul_poly(self, a, b):
        if a == 0 or b == 0:
            return 0
        base, n = self.base, self.degree
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(ca):
            if x == 0:
                continue
            for j, y in enumerate(cb):
                if y == 0:
                    continue
                prod[i + j] = base.add(prod[i + j], base.mul(x, y))
        out = list(prod[:n])
        for i in range(n, 2 * n - 1):
            c = prod[i]
            if c == 0:
                continue
            red = self._xpow[i]
            for j in range(n):
                if red[j]:
                    out[j] = base.add(out[j], base.mul(c, red[j]))
        return self.from_coeffs(out)

    def mul(self, a, b):
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._mul_poly(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._inv_table is not None:
            return self._inv_table[a]
        return self.pow(a, self.q - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = 1
        while k:
            if k & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            k >>= 1
        return result

    def __repr__(self):
        return f"GF({self.q})"


def _index_digits(value: int, radix: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        out.append(value % radix)
        value //= radix
    return tuple(out)


@lru_cache(maxsize=None)
def field_new(q: int):
    """The canonical field with q elements (deterministic tables)."""
    check_field_order(q)
    p, e = prime_power_decomposition(q)
    if e == 1:
        return PrimeField(p)
    return ExtensionField(PrimeField(p), e)


@lru_cache(maxsize=None)
def extension_field(q: int, degree: int):
    """The canonical degree-`degree` extension of the canonical field of order q."""
    if degree == 1:
        return field_new(q)
    return ExtensionField(field_new(q), degree)


# ---------------------------------------------------------------------------
# matrix representation of an extension field over its base


def multiplication_matrix(ext, alpha: int) -> tuple[tuple[int, ...], ...]:
    """Matrix of y -> alpha*y over the base field; row i is alpha * x**i."""
    n = ext.degree
    rows = []
    for i in range(n):
        xi = ext.from_coeffs(tuple(0 for _ in range(i)) + (1,))
        rows.append(ext.coeffs(ext.mul(alpha, xi)))
    return tuple(rows)


def matrix_representation(q: int, n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All q**n multiplication matrices of the degree-n extension of F_q.

    Indexed by element; the map is multiplicative and sends 0 and 1 to the
    zero and identity matrices.
    """
    if n < 1:
        raise RangeError(f"extension degree must be positive, got {n}")
    ext = extension_field(q, n)
    return [multiplication_matrix(ext, a) for a in range(ext.q)]
