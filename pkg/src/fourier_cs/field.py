"""Exact arithmetic in GF(p^(a*n)) using polynomial representatives.

GF(q^n) with q = p^a is modelled as a single extension of GF(p) of degree
a*n.  An element is a little-endian coefficient tuple of length a*n, every
entry reduced into [0, p).  The subfield GF(q) is recovered inside the big
field rather than built as a tower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_ORDER = 2**63
ENUMERATION_CAP = 2**24


class FieldError(ValueError):
    """Invalid field parameters or an illegal field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n`` by trial division, as (prime, exponent) pairs."""
    if n < 1:
        raise FieldError(f"cannot factor {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


# -- polynomials over GF(p): little-endian lists, no trailing zeros ----------

def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    while len(f) - 1 >= dg:
        c = f[-1] * inv_lead % p
        shift = len(f) - 1 - dg
        for i, gc in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gc) % p
        _trim(f)
    return f


def _poly_mulmod(f: list[int], g: list[int], mod: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    prod = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                prod[i + j] += x * y
    return _poly_mod(prod, mod, p)


def _poly_powmod(f: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(f, mod, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _poly_mod(f, g, p)
    return f


def _poly_sub(f: list[int], g: list[int], p: int) -> list[int]:
    size = max(len(f), len(g))
    f = f + [0] * (size - len(f))
    g = g + [0] * (size - len(g))
    return _trim([(x - y) % p for x, y in zip(f, g)])


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a polynomial over GF(p)."""
    f = _trim([int(c) % p for c in poly])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**d, f, p), x, p):
        return False
    for r, _ in factorize(d):
        h = _poly_sub(_poly_powmod(x, p ** (d // r), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


# -- text format ---------------------------------------------------------------

def parse_poly(text: str) -> tuple[int, ...]:
    """Parse ``"2,0,1"`` (constant term first) into a coefficient tuple."""
    parts = [s.strip() for s in text.split(",")]
    try:
        return tuple(int(s) for s in parts)
    except ValueError:
        raise FieldError(f"malformed coefficient list: {text!r}") from None


def format_poly(coeffs: Iterable[int]) -> str:
    return ",".join(str(int(c)) for c in coeffs)


# -- fields --------------------------------------------------------------------

@dataclass(frozen=True)
class FieldParams:
    p: int
    a: int
    n: int
    modulus: tuple[int, ...]
    order: int = field(init=False)
    group_order: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "order", self.p ** (self.a * self.n))
        object.__setattr__(self, "group_order", self.order - 1)

    @property
    def degree(self) -> int:
        return self.a * self.n

    @property
    def q(self) -> int:
        return self.p**self.a

    def element(self, coeffs: Sequence[int] | str) -> FieldElement:
        if isinstance(coeffs, str):
            coeffs = parse_poly(coeffs)
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.degree:
            raise FieldError(
                f"{len(coeffs)} coefficients given for a degree-{self.degree} field")
        coeffs += [0] * (self.degree - len(coeffs))
        return FieldElement(tuple(c % self.p for c in coeffs), self)

    def from_code(self, code: int) -> FieldElement:
        """Inverse of :meth:`FieldElement.code` (base-p digits, constant first)."""
        coeffs = []
        for _ in range(self.degree):
            code, c = divmod(code, self.p)
            coeffs.append(c)
        return FieldElement(tuple(coeffs), self)

    def constant(self, c: int) -> FieldElement:
        return self.element([c])

    @property
    def zero(self) -> FieldElement:
        return FieldElement((0,) * self.degree, self)

    @property
    def one(self) -> FieldElement:
        return self.constant(1)

    @property
    def x(self) -> FieldElement:
        """Residue class of the adjoined variable."""
        if self.degree == 1:
            return self.constant(-self.modulus[0])
        return self.element([0, 1])

    def elements(self) -> Iterable[FieldElement]:
        for code in range(self.order):
            yield self.from_code(code)

    def subfield(self, g: FieldElement) -> list[FieldElement]:
        """Elements of GF(q) inside GF(q^n), via the primitive element ``g``.

        For a = 1 these are the constants in ascending order; otherwise
        ``{0} | {g^(k (q^n-1)/(q-1))}``, sorted by encoding.
        """
        if self.a == 1:
            return [self.constant(t) for t in range(self.p)]
        step = g ** (self.group_order // (self.q - 1))
        out = [self.zero]
        h = self.one
        for _ in range(self.q - 1):
            out.append(h)
            h = h * step
        return sorted(out, key=lambda e: e.code)

    def mul_coeffs(self, f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
        p, d, mod = self.p, self.degree, self.modulus
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(f):
            if x:
                for j, y in enumerate(g):
                    prod[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % p
            if c:
                base = k - d
                for i in range(d):
                    prod[base + i] -= c * mod[i]
        return tuple(c % p for c in prod[:d])


def make_field(p: int, a: int = 1, n: int = 1,
               modulus: Sequence[int] | str | None = None) -> FieldParams:
    """Validate parameters and return GF(p^(a*n)).

    Without ``modulus`` the first irreducible monic polynomial of degree a*n is
    used, scanning the lower coefficients in base-p counting order (constant
    term fastest).
    """
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if a < 1 or n < 1:
        raise FieldError(f"degrees must be >= 1 (a={a}, n={n})")
    d = a * n
    if p**d >= MAX_ORDER:
        raise FieldError(f"field order {p}^{d} exceeds 2^63")
    if modulus is None:
        for code in range(p**d):
            low = []
            for _ in range(d):
                code, c = divmod(code, p)
                low.append(c)
            candidate = tuple(low) + (1,)
            if is_irreducible(candidate, p):
                return FieldParams(p, a, n, candidate)
        raise FieldError(f"no irreducible polynomial of degree {d} over GF({p})")
    if isinstance(modulus, str):
        modulus = parse_poly(modulus)
    mod = tuple(int(c) for c in modulus)
    if len(mod) != d + 1:
        raise FieldError(f"modulus must have degree {d}, got degree {len(mod) - 1}")
    if any(not 0 <= c < p for c in mod):
        raise FieldError(f"modulus coefficients must lie in [0, {p})")
    if mod[-1] != 1:
        raise FieldError("modulus must be monic")
    if not is_irreducible(mod, p):
        raise FieldError(f"modulus {format_poly(mod)} is reducible over GF({p})")
    return FieldParams(p, a, n, mod)


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]
    field: FieldParams = field(repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.field.modulus == other.field.modulus

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def code(self) -> int:
        """Coefficients packed base-p into one integer (constant term lowest)."""
        c = 0
        for x in reversed(self.coeffs):
            c = c * self.field.p + x
        return c

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, int):
            return self.field.constant(other)
        if other.field.p != self.field.p or other.field.modulus != self.field.modulus:
            raise FieldError("operands belong to different fields")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        p = self.field.p
        return FieldElement(tuple((x + y) % p for x, y in zip(self.coeffs, other.coeffs)),
                            self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(tuple(-x % p for x in self.coeffs), self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field.mul_coeffs(self.coeffs, other.coeffs), self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if self.is_zero():
            if k <= 0:
                raise FieldError("zero has no inverse")
            return self
        k %= self.field.group_order
        result = self.field.one.coeffs
        base = self.coeffs
        mul = self.field.mul_coeffs
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return FieldElement(result, self.field)

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise FieldError("zero has no inverse")
        return self ** (self.field.group_order - 1)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __str__(self):
        return format_poly(self.coeffs)


# functional spellings
def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return x - y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def neg(x: FieldElement) -> FieldElement:
    return -x


def inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def power(x: FieldElement, k: int) -> FieldElement:
    return x**k


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> list[int]:
        return [ell for ell, _ in self.factors]

    def value(self) -> int:
        return math.prod(ell**e for ell, e in self.factors)


def factor_group_order(params: FieldParams) -> Factorization:
    return Factorization(tuple(factorize(params.group_order)))


def is_primitive(g: FieldElement, params: FieldParams,
                 fact: Factorization | None = None) -> bool:
    """True iff ``g`` generates the multiplicative group of ``params``."""
    if g.is_zero():
        raise FieldError("zero is never primitive")
    if fact is None:
        fact = factor_group_order(params)
    one = params.one
    if params.group_order == 1:
        return g == one
    return all(g ** (params.group_order // ell) != one for ell in fact.primes)


def multiplicative_order(g: FieldElement) -> int:
    params = g.field
    order = params.group_order
    for ell, e in factorize(order):
        for _ in range(e):
            if g ** (order // ell) == params.one:
                order //= ell
            else:
                break
    return order


def find_primitive_root(params: FieldParams) -> FieldElement:
    """First primitive element in encoding order (exhaustive scan)."""
    if params.order > ENUMERATION_CAP:
        raise FieldError(f"field of order {params.order} too large to enumerate")
    fact = factor_group_order(params)
    for code in range(1, params.order):
        g = params.from_code(code)
        if is_primitive(g, params, fact):
            return g
    raise FieldError("no primitive root found")  # unreachable for a field


def frobenius_orbit_size(alpha: FieldElement, q: int) -> int:
    """Number of distinct conjugates of ``alpha`` under x -> x^q."""
    y = alpha
    for k in range(1, alpha.field.degree + 1):
        y = _pow_raw(y, q)
        if y == alpha:
            return k
    raise FieldError("Frobenius orbit did not close")  # unreachable


def _pow_raw(x: FieldElement, k: int) -> FieldElement:
    # exponent not reduced, so that 0^q = 0
    if x.is_zero():
        return x
    return x**k


def generates_over_subfield(alpha: FieldElement) -> bool:
    """True iff GF(q)(alpha) is the whole field GF(q^n)."""
    params = alpha.field
    return frobenius_orbit_size(alpha, params.q) == params.n
