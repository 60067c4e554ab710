"""Exact number domains: rationals, cyclotomic numbers, Bernoulli polynomials.

Rationals are plain :class:`fractions.Fraction` values (integral values may be
kept as ``int``; both interoperate).  Cyclotomic numbers are stored in the power
basis ``1, z, ..., z^(phi(M)-1)`` of ``Q(zeta_M)`` reduced modulo the M-th
cyclotomic polynomial.  The power basis is an integral basis of ``Z[zeta_M]``,
so divisibility by a rational integer is a coordinate-wise test.
"""

from __future__ import annotations

import enum
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rat = Union[int, Fraction]


class Verdict(str, enum.Enum):
    """Outcome of a divisibility test."""

    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"

    def __bool__(self) -> bool:
        return self is Verdict.PASS


# ---------------------------------------------------------------------------
# rationals


def rat(x) -> Rat:
    """Coerce to an exact rational, collapsing integral fractions to ``int``."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rat(Fraction(x.strip()))
    if isinstance(x, float):
        raise TypeError("refusing to build an exact rational from a float")
    return rat(Fraction(x))


def format_rational(x: Rat) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Rat:
    if isinstance(s, (int, Fraction)):
        return rat(s)
    return rat(Fraction(str(s)))


def to_mpf(x):
    """Exact rational to an mpmath float at the current working precision."""
    import mpmath

    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def is_integral(x: Rat) -> bool:
    return isinstance(x, int) or x.denominator == 1


def integer_divisibility(a: Rat, t: int) -> Verdict:
    """Does the integer ``t`` divide the rational ``a`` inside ``Z``?"""
    if t == 0:
        raise ZeroDivisionError("divisibility by zero is undefined")
    if not is_integral(a):
        return Verdict.INDETERMINATE
    return Verdict.PASS if int(a) % t == 0 else Verdict.FAIL


def divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        raise ValueError("0 has infinitely many divisors")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def factorint(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the small moduli used here."""
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation(n: int, p: int) -> int:
    if n == 0:
        return math.inf  # type: ignore[return-value]
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    r = n
    for p in factorint(n):
        r -= r // p
    return r


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for arbitrary integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a | n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# cyclotomic numbers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in divisors(m)[:-1]:
        num = _poly_exact_div(num, cyclotomic_polynomial(d))
    return tuple(num)


def _poly_exact_div(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            q[i - dn] = c  # den is monic
            for j, dj in enumerate(den):
                num[i - dn + j] -= c * dj
    assert not any(num[:dn]), "non-exact polynomial division"
    return q


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Reductions of x^j mod Phi_m for 0 <= j < m (integer coordinates)."""
    phi = cyclotomic_polynomial(m)
    n = len(phi) - 1
    table = []
    cur = [1] + [0] * (n - 1) if n else []
    for _ in range(m):
        table.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1] if n else 0
        cur = [0] + cur[:-1] if n else []
        if top:
            for i in range(n):
                cur[i] -= top * phi[i]
    return tuple(table)


def _integer_coords(coeffs: Sequence[Rat]) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        if isinstance(c, Fraction):
            den = math.lcm(den, c.denominator)
    if den == 1:
        return list(coeffs), 1
    return [int(c * den) for c in coeffs], den


def _reduce_int(poly: Sequence[int], m: int) -> list[int]:
    table = _power_table(m)
    out = [0] * euler_phi(m)
    for t, c in enumerate(poly):
        if c:
            for i, r in enumerate(table[t % m]):
                if r:
                    out[i] += c * r
    return out


def _reduce(poly: Sequence[Rat], m: int) -> tuple[Rat, ...]:
    table = _power_table(m)
    n = euler_phi(m)
    out: list[Rat] = [0] * n
    for t, c in enumerate(poly):
        if not c:
            continue
        row = table[t % m]
        for i, r in enumerate(row):
            if r:
                out[i] += c * r
    return tuple(rat(c) for c in out)


class CyclotomicNumber:
    """Exact element of the M-th cyclotomic field in the reduced power basis."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Rat] = ()):
        if order < 1:
            raise ValueError("order must be positive")
        coeffs = list(coeffs)
        self.order = order
        if len(coeffs) == euler_phi(order):
            self.coeffs = tuple(rat(c) for c in coeffs)
        else:
            self.coeffs = _reduce([rat(c) for c in coeffs], order)

    # constructors -------------------------------------------------------
    @classmethod
    def from_rational(cls, x: Rat, order: int = 1) -> "CyclotomicNumber":
        return cls(order, [x] + [0] * (euler_phi(order) - 1))

    @classmethod
    def zero(cls, order: int = 1) -> "CyclotomicNumber":
        return cls.from_rational(0, order)

    @classmethod
    def one(cls, order: int = 1) -> "CyclotomicNumber":
        return cls.from_rational(1, order)

    # structure ----------------------------------------------------------
    def embed(self, order: int) -> "CyclotomicNumber":
        """Image in Q(zeta_order); requires ``self.order | order``."""
        if order % self.order:
            raise ValueError(f"cannot embed order {self.order} into order {order}")
        if order == self.order:
            return self
        k = order // self.order
        poly: list[Rat] = [0] * (k * (len(self.coeffs) - 1) + 1)
        for i, c in enumerate(self.coeffs):
            poly[k * i] = c
        return CyclotomicNumber(order, _reduce(poly, order))

    def restrict(self, order: int) -> "CyclotomicNumber":
        """Inverse of :meth:`embed`; raises if the value is not in Q(zeta_order)."""
        if self.order % order:
            raise ValueError("target order must divide the current order")
        k = self.order // order
        table = _power_table(self.order)
        # solve coordinates in the subfield basis z^(k*i), i < phi(order)
        n = euler_phi(order)
        basis = [table[k * i] for i in range(n)]
        cand = _solve_in_span(basis, self.coeffs)
        if cand is None:
            raise ValueError("value does not lie in the requested subfield")
        return CyclotomicNumber(order, cand)

    def _align(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"]:
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.from_rational(rat(other), self.order)
        if other.order == self.order:
            return self, other
        m = math.lcm(self.order, other.order)
        return self.embed(m), other.embed(m)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        return CyclotomicNumber(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [x * other for x in self.coeffs])
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b = self._align(other)
        na, da = _integer_coords(a.coeffs)
        nb, db = _integer_coords(b.coeffs)
        prod = [0] * (len(na) + len(nb) - 1)
        for i, x in enumerate(na):
            if x:
                for j, y in enumerate(nb):
                    if y:
                        prod[i + j] += x * y
        red = _reduce_int(prod, a.order)
        den = da * db
        if den == 1:
            return CyclotomicNumber(a.order, red)
        return CyclotomicNumber(a.order, [Fraction(c, den) for c in red])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [Fraction(x) / other for x in self.coeffs])
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = CyclotomicNumber.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugate, i.e. zeta -> zeta^-1."""
        m = self.order
        poly: list[Rat] = [0] * m
        for i, c in enumerate(self.coeffs):
            poly[(-i) % m] += c
        return CyclotomicNumber(m, _reduce(poly, m))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber.from_rational(other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b = self._align(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_algebraic_integer(self) -> bool:
        return all(is_integral(c) for c in self.coeffs)

    def rational_value(self) -> Rat:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def to_complex(self, dps: int = 30):
        import mpmath

        with mpmath.workdps(dps):
            z = mpmath.exp(2j * mpmath.pi / self.order)
            return sum(to_mpf(c) * z**i for i, c in enumerate(self.coeffs))

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CyclotomicNumber":
        return cls(int(data["order"]), [parse_rational(c) for c in data["coeffs"]])

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z{self.order}^{i}")
        return " + ".join(terms) if terms else "0"


def _solve_in_span(basis: Sequence[Sequence[int]], target: Sequence[Rat]):
    """Rational coordinates of ``target`` in the span of ``basis`` rows, or None."""
    n = len(target)
    rows = [[Fraction(basis[i][j]) for i in range(len(basis))] + [Fraction(target[j])] for j in range(n)]
    ncols = len(basis)
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][-1] for i in range(r, n)):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol


def cyclo_root_of_unity(m: int, a: int) -> CyclotomicNumber:
    """zeta_m ** a as an element of Q(zeta_m)."""
    if m < 1:
        raise ValueError("order must be positive")
    return CyclotomicNumber(m, _power_table(m)[a % m])


def e_rational(x: Rat) -> CyclotomicNumber:
    """e(x) = exp(2 pi i x) for rational x, in the field of order denom(x)."""
    x = Fraction(x)
    return cyclo_root_of_unity(x.denominator, x.numerator)


def cyclo_divisible_by_int(x: CyclotomicNumber, t: int) -> Verdict:
    if t == 0:
        raise ZeroDivisionError("divisibility by zero is undefined")
    if not x.is_algebraic_integer():
        return Verdict.INDETERMINATE
    return Verdict.PASS if all(int(c) % t == 0 for c in x.coeffs) else Verdict.FAIL


def sqrt_of_integer(n: int) -> CyclotomicNumber:
    """Exact positive square root of a positive integer inside a cyclotomic field.

    Write n = s^2 r with r squarefree; sqrt(p) comes from the quadratic Gauss sum
    for odd p and from zeta_8 + zeta_8^-1 for p = 2.
    """
    if n < 1:
        raise ValueError("need a positive integer")
    s, r = 1, 1
    for p, e in factorint(n).items():
        s *= p ** (e // 2)
        if e % 2:
            r *= p
    root = CyclotomicNumber.from_rational(s)
    for p in factorint(r):
        root = root * _sqrt_prime(p)
    return root


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CyclotomicNumber:
    if p == 2:
        return cyclo_root_of_unity(8, 1) + cyclo_root_of_unity(8, -1)
    g = CyclotomicNumber.zero(p)
    for x in range(p):
        g = g + cyclo_root_of_unity(p, x * x)
    if p % 4 == 1:
        return g
    # g = i sqrt(p)
    return g * cyclo_root_of_unity(4, -1)


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials


class BernoulliContext:
    """Cache of Bernoulli numbers with the B_1 = -1/2 convention."""

    def __init__(self):
        self._cache: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def number(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("index must be nonnegative")
        cache = self._cache
        if n < len(cache):
            return cache[n]
        with self._lock:
            cache = list(self._cache)
            for m in range(len(cache), n + 1):
                acc = Fraction(0)
                binom = 1  # C(m+1, j)
                for j in range(m):
                    acc += binom * cache[j]
                    binom = binom * (m + 1 - j) // (j + 1)
                cache.append(-acc / (m + 1))
            self._cache = cache
        return cache[n]

    def polynomial(self, kappa: int, x: Rat) -> Rat:
        if kappa < 0:
            raise ValueError("degree must be nonnegative")
        x = Fraction(x)
        total = Fraction(0)
        binom = 1
        for j in range(kappa + 1):
            total += binom * self.number(j) * x ** (kappa - j)
            binom = binom * (kappa - j) // (j + 1)
        return rat(total)


_BERNOULLI = BernoulliContext()


def bernoulli_number(n: int) -> Fraction:
    return _BERNOULLI.number(n)


def bernoulli_polynomial(kappa: int, x: Rat) -> Rat:
    return _BERNOULLI.polynomial(kappa, x)
