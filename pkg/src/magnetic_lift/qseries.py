"""Truncated exact q-expansions with exponents on a grid (1/d)Z.

A :class:`FourierSeries` stores ``{n: c}`` meaning ``c * q^(n/d)`` together with
a precision ``P``: every coefficient with exponent ``< P`` is known, and absent
keys are zero.  Products use Kronecker substitution when all coefficients are
integers (one big-integer multiplication) and schoolbook convolution otherwise.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .arith import Rat, format_rational, is_integral, parse_rational, rat


class PrecisionError(ValueError):
    """Raised when an exponent at or beyond a series' precision is requested."""

    def __init__(self, message: str, required=None):
        super().__init__(message)
        self.required = required


@dataclass(frozen=True)
class PrecisionPolicy:
    """Target precision with a hard cut; products report their propagated bound."""

    target: Fraction

    def cut(self, f: "FourierSeries") -> "FourierSeries":
        return f.truncate(min(self.target, f.prec))


def _ceil_num(prec: Fraction, d: int) -> int:
    """Smallest numerator n with n/d >= prec."""
    return math.ceil(prec * d)


class FourierSeries:
    __slots__ = ("denom", "coeffs", "prec")

    def __init__(self, coeffs: Mapping[int, Rat], prec, denom: int = 1):
        if denom < 1:
            raise ValueError("denominator must be positive")
        self.denom = denom
        self.prec = Fraction(prec)
        limit = _ceil_num(self.prec, denom)
        self.coeffs = {int(n): rat(c) for n, c in coeffs.items() if c and n < limit}

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c: Rat, prec) -> "FourierSeries":
        return cls({0: c}, prec)

    @classmethod
    def monomial(cls, exponent, c: Rat = 1, prec=None) -> "FourierSeries":
        e = Fraction(exponent)
        return cls({e.numerator: c}, prec if prec is not None else e + 1, e.denominator)

    @classmethod
    def from_list(cls, values: Iterable[Rat], start: int = 0, prec=None) -> "FourierSeries":
        values = list(values)
        return cls({start + i: v for i, v in enumerate(values)}, prec if prec is not None else start + len(values))

    # access ---------------------------------------------------------------
    def __getitem__(self, exponent) -> Rat:
        e = Fraction(exponent)
        if e >= self.prec:
            raise PrecisionError(f"exponent {e} not below precision {self.prec}", required=e)
        n = e * self.denom
        if n.denominator != 1:
            return 0
        return self.coeffs.get(int(n), 0)

    def items(self):
        """(exponent, coefficient) pairs in increasing exponent order."""
        for n in sorted(self.coeffs):
            yield Fraction(n, self.denom), self.coeffs[n]

    def valuation(self) -> Fraction:
        """Smallest exponent with a nonzero coefficient (``prec`` for the zero series)."""
        if not self.coeffs:
            return self.prec
        return Fraction(min(self.coeffs), self.denom)

    def principal_part(self) -> dict[Fraction, Rat]:
        return {e: c for e, c in self.items() if e < 0}

    def is_integral(self) -> bool:
        return all(is_integral(c) for c in self.coeffs.values())

    def is_zero(self) -> bool:
        return not self.coeffs

    # grid handling ------------------------------------------------------
    def with_denom(self, d: int) -> "FourierSeries":
        if d % self.denom:
            raise ValueError("new grid must refine the old one")
        k = d // self.denom
        return FourierSeries({n * k: c for n, c in self.coeffs.items()}, self.prec, d)

    def reduced(self) -> "FourierSeries":
        """Same series on the coarsest grid that carries its support."""
        g = self.denom
        for n in self.coeffs:
            g = math.gcd(g, n)
            if g == 1:
                return self
        return FourierSeries({n // g: c for n, c in self.coeffs.items()}, self.prec, self.denom // g)

    def truncate(self, prec) -> "FourierSeries":
        prec = Fraction(prec)
        if prec > self.prec:
            raise PrecisionError(f"cannot raise precision from {self.prec} to {prec}", required=prec)
        return FourierSeries(self.coeffs, prec, self.denom)

    def _common(self, other: "FourierSeries"):
        d = math.lcm(self.denom, other.denom)
        return self.with_denom(d), other.with_denom(d), d

    # ring operations ----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FourierSeries.constant(other, self.prec)
        if not isinstance(other, FourierSeries):
            return NotImplemented
        a, b, d = self._common(other)
        out = dict(a.coeffs)
        for n, c in b.coeffs.items():
            out[n] = out.get(n, 0) + c
        return FourierSeries(out, min(a.prec, b.prec), d)

    __radd__ = __add__

    def __neg__(self):
        return FourierSeries({n: -c for n, c in self.coeffs.items()}, self.prec, self.denom)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rat) -> "FourierSeries":
        c = rat(c)
        return FourierSeries({n: v * c for n, v in self.coeffs.items()}, self.prec, self.denom)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, FourierSeries):
            return series_mul(self, series_invert(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return series_invert(self) ** (-n)
        result = FourierSeries.constant(1, self.prec - self.valuation() if self.coeffs else self.prec)
        if n == 0:
            return result
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else series_mul(result, base)
                first = False
            n >>= 1
            if n:
                base = series_mul(base, base)
        return result

    def shift(self, exponent) -> "FourierSeries":
        """Multiply by q^exponent."""
        e = Fraction(exponent)
        d = math.lcm(self.denom, e.denominator)
        s = self.with_denom(d)
        k = int(e * d)
        return FourierSeries({n + k: c for n, c in s.coeffs.items()}, self.prec + e, d)

    def __eq__(self, other):
        if not isinstance(other, FourierSeries):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.prec == b.prec and a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def agrees_with(self, other: "FourierSeries") -> bool:
        """Equal on all exponents below both precisions."""
        p = min(self.prec, other.prec)
        return self.truncate(p) == other.truncate(p)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "denom": self.denom,
            "prec": format_rational(self.prec),
            "coeffs": {str(n): format_rational(self.coeffs[n]) for n in sorted(self.coeffs)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FourierSeries":
        return cls(
            {int(n): parse_rational(c) for n, c in data["coeffs"].items()},
            parse_rational(data["prec"]),
            int(data.get("denom", 1)),
        )

    def pretty(self, terms: int = 8) -> str:
        parts = []
        for i, (e, c) in enumerate(self.items()):
            if i >= terms:
                break
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "q"
            else:
                mono = f"q^{e}" if e.denominator == 1 and e > 0 else f"q^({e})"
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(q^{self.prec})"

    def __repr__(self):
        return f"FourierSeries({self.pretty(5)})"


# ---------------------------------------------------------------------------
# multiplication and inversion


def _product_prec(a: FourierSeries, b: FourierSeries) -> Fraction:
    return min(a.prec + b.valuation(), b.prec + a.valuation())


def series_mul(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    a, b, d = a._common(b)
    prec = _product_prec(a, b)
    if not a.coeffs or not b.coeffs:
        return FourierSeries({}, prec, d)
    limit = _ceil_num(prec, d)
    va, vb = min(a.coeffs), min(b.coeffs)
    nterms = limit - va - vb
    if nterms <= 0:
        return FourierSeries({}, prec, d)
    la = min(max(a.coeffs) - va + 1, nterms)
    lb = min(max(b.coeffs) - vb + 1, nterms)
    if a.is_integral() and b.is_integral():
        da = [a.coeffs.get(va + i, 0) for i in range(la)]
        db = [b.coeffs.get(vb + i, 0) for i in range(lb)]
        prod = _kronecker_mul(da, db)[:nterms]
        return FourierSeries({va + vb + i: c for i, c in enumerate(prod) if c}, prec, d)
    out: dict[int, Rat] = {}
    bitems = sorted(b.coeffs.items())
    for n, x in a.coeffs.items():
        for m, y in bitems:
            t = n + m
            if t >= limit:
                break
            out[t] = out.get(t, 0) + x * y
    return FourierSeries(out, prec, d)


def _pack(values: list[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(v.to_bytes(nbytes, "little") for v in values), "little")


def _kronecker_mul(a: list[int], b: list[int]) -> list[int]:
    """Full convolution of two integer lists via one big-integer product."""
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    bits = 8 * nbytes

    def pack_signed(v):
        pos = _pack([x if x > 0 else 0 for x in v], nbytes)
        neg = _pack([-x if x < 0 else 0 for x in v], nbytes)
        return pos - neg

    c = pack_signed(a) * pack_signed(b)
    length = len(a) + len(b) - 1
    half = 1 << (bits - 1)
    offset_digit = half.to_bytes(nbytes, "little")
    offset = int.from_bytes(offset_digit * length, "little")
    raw = (c + offset).to_bytes(nbytes * length, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(length)]


def series_invert(a: FourierSeries) -> FourierSeries:
    """Multiplicative inverse, with precision prec - 2 * valuation."""
    if not a.coeffs:
        raise ZeroDivisionError("cannot invert the zero series")
    d = a.denom
    v = min(a.coeffs)
    lead = a.coeffs[v]
    rel_terms = _ceil_num(a.prec, d) - v  # known terms of the unit part
    prec = a.prec - 2 * Fraction(v, d)
    # unit part u = a * q^(-v/d) / lead, as integer-indexed list
    unit = FourierSeries({n - v: Fraction(c) / lead for n, c in a.coeffs.items()}, Fraction(rel_terms))
    if unit.is_integral():
        unit = FourierSeries(unit.coeffs, unit.prec)
    inv = _unit_inverse(unit, rel_terms)
    inv = inv.scale(Fraction(1) / Fraction(lead))
    return FourierSeries({n - v: c for n, c in inv.coeffs.items()}, prec, d)


def _unit_inverse(u: FourierSeries, nterms: int) -> FourierSeries:
    """Inverse of a series with constant term 1 on the integer grid, by Newton iteration."""
    b = FourierSeries({0: 1}, 1)
    n = 1
    while n < nterms:
        n = min(2 * n, nterms)
        un = FourierSeries(u.coeffs, n)
        bn = FourierSeries(b.coeffs, n)
        e = series_mul(un, bn)
        corr = FourierSeries({k: -c for k, c in e.coeffs.items() if k > 0}, n)
        b = FourierSeries(bn.coeffs, n) + series_mul(bn, corr)
        b = FourierSeries(b.coeffs, n)
    return FourierSeries(b.coeffs, nterms)


# ---------------------------------------------------------------------------
# Bol operator and classical generators


def bol_coefficients(f: FourierSeries, k: int) -> FourierSeries:
    """Multiply the coefficient at exponent l by l^(k-1)."""
    if k < 2:
        raise ValueError("the Bol operator needs k >= 2")
    d = f.denom
    out = {}
    for n, c in f.coeffs.items():
        if n:
            out[n] = c * Fraction(n, d) ** (k - 1)
    return FourierSeries(out, f.prec, d)


def _sigma_list(power: int, nmax: int) -> list[int]:
    sig = [0] * nmax
    for dv in range(1, nmax):
        p = dv**power
        for m in range(dv, nmax, dv):
            sig[m] += p
    return sig


@lru_cache(maxsize=32)
def _generator_cached(name: str, prec: int) -> FourierSeries:
    if name == "E4":
        s = _sigma_list(3, prec)
        return FourierSeries.from_list([1] + [240 * x for x in s[1:]], prec=prec)
    if name == "E6":
        s = _sigma_list(5, prec)
        return FourierSeries.from_list([1] + [-504 * x for x in s[1:]], prec=prec)
    if name == "Delta":
        e4, e6 = _generator_cached("E4", prec), _generator_cached("E6", prec)
        diff = e4 * e4 * e4 - e6 * e6
        assert all(c % 1728 == 0 for c in diff.coeffs.values())
        return FourierSeries({n: c // 1728 for n, c in diff.coeffs.items()}, prec)
    if name == "j":
        # Delta has valuation 1, so 1/Delta loses two terms; compute with headroom
        e4 = _generator_cached("E4", prec + 2)
        delta = _generator_cached("Delta", prec + 2)
        return (e4 * e4 * e4 * series_invert(delta)).truncate(prec)
    raise ValueError(f"unknown generator {name!r}")


def classical_generator(name: str, prec: int) -> FourierSeries:
    """E4, E6, Delta or j, exact through exponents < prec."""
    if prec < 1:
        raise ValueError("precision must be at least 1")
    return _generator_cached(name, int(prec))


_TOKEN = re.compile(r"\s*(E4|E6|Delta|j)\s*(?:\^\s*\(?\s*(-?\d+)\s*\)?)?\s*")
_GEN_WEIGHT = {"E4": 4, "E6": 6, "Delta": 12, "j": 0}
_GEN_VALUATION = {"E4": 0, "E6": 0, "Delta": 1, "j": -1}


def parse_monomial(expr: str) -> dict[str, int]:
    """Parse strings like ``"E4^2*Delta^-1"`` (``/`` also allowed) into exponents."""
    out: dict[str, int] = {}
    sign = 1
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            raise ValueError(f"cannot parse monomial at {expr[pos:]!r}")
        name, power = m.group(1), int(m.group(2) or 1)
        out[name] = out.get(name, 0) + sign * power
        pos = m.end()
        if pos < len(expr):
            if expr[pos] not in "*/":
                raise ValueError(f"expected '*' or '/' at {expr[pos:]!r}")
            sign = 1 if expr[pos] == "*" else -1
            pos += 1
    return out


def monomial_weight(exponents: Mapping[str, int]) -> int:
    return sum(_GEN_WEIGHT[g] * e for g, e in exponents.items())


def eval_monomial(exponents: Mapping[str, int], prec: int) -> FourierSeries:
    """Evaluate a product of generator powers exactly to precision ``prec``."""
    # each negative power of a generator of valuation v costs 2|v| terms of headroom
    shift = 0
    for g, e in exponents.items():
        v = _GEN_VALUATION[g]
        shift += abs(v) * abs(e) * 2 + abs(v) * abs(e)
    work = int(prec) + shift + 1
    result = FourierSeries.constant(1, work)
    for g, e in sorted(exponents.items()):
        if e:
            result = result * classical_generator(g, work) ** e
    return result.truncate(prec)
