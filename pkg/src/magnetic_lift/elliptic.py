"""Elliptic examples: classical magnetic forms, j-divisibility and f_{k,d,D}.

f_{k,d,D}(z) = sum_Q chi_D(Q) Q(z,1)^(-k) over positive definite forms of
discriminant dD (normalising constant set to 1).  Forms are grouped into
translation classes (a, b mod 2a); each class is expanded exactly through
partial fractions and the Lipschitz formula, then evaluated with mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath

from .arith import Verdict, factorint, kronecker_symbol, valuation
from .qseries import FourierSeries, classical_generator, eval_monomial
from .vvmf import DivisibilityEntry, DivisibilityReport


class EllipticError(ValueError):
    pass


# ---------------------------------------------------------------------------
# binary quadratic forms


@dataclass(frozen=True, order=True)
class BQF:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.disc < 0

    def __call__(self, x, y=1):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return math.gcd(self.a, self.b, self.c)


def reduce_form(Q: BQF) -> BQF:
    if not Q.is_positive_definite():
        raise EllipticError(f"{Q} is not positive definite")
    a, b, c = Q.a, Q.b, Q.c
    while True:
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        b, c = b + 2 * a * k, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return BQF(a, b, c)


def enumerate_forms(disc: int, a_max: int) -> list[BQF]:
    """One form per translation class (a, b mod 2a) with a <= a_max, b in (-a, a]."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise EllipticError(f"{disc} is not a negative discriminant")
    out = []
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a) == 0:
                out.append(BQF(a, b, (b * b - disc) // (4 * a)))
    return out


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


@dataclass(frozen=True)
class GenusCharData:
    """Discriminants d and D with dD < 0.

    ``strict`` demands that D is a fundamental discriminant, which is what makes
    chi_D a genus character.  With ``strict=False`` other D are accepted and chi
    is evaluated at the smallest admissible represented value, which is still a
    class invariant but no longer a character.
    """

    d: int
    D: int
    strict: bool = True

    def __post_init__(self):
        if self.d % 4 not in (0, 1):
            raise EllipticError(f"d = {self.d} is not congruent to 0 or 1 mod 4")
        if self.d * self.D >= 0:
            raise EllipticError(f"need dD < 0, got d = {self.d}, D = {self.D}")
        if self.strict and not is_fundamental_discriminant(self.D):
            raise EllipticError(f"D = {self.D} is not a fundamental discriminant")

    @property
    def disc(self) -> int:
        return self.d * self.D


def represented_values(Q: BQF, bound: int) -> list[int]:
    vals = set()
    for x in range(-bound, bound + 1):
        for y in range(0, bound + 1):
            if (x, y) != (0, 0) and math.gcd(x, y) == 1:
                vals.add(Q(x, y))
    return sorted(vals)


def genus_character(Q: BQF, D: int, *, check: bool = False, bound: int = 8) -> int:
    """chi_D(Q): Kronecker (D | r) for r represented by Q and coprime to D.

    With ``check`` every admissible r found in the search box must give the same
    value; a disagreement raises (it signals D not fundamental or bad input).
    """
    if math.gcd(Q.content(), D) > 1:
        return 0
    while True:
        rs = [r for r in represented_values(Q, bound) if math.gcd(r, D) == 1]
        if rs:
            break
        if bound > 512:
            raise EllipticError(f"no represented value coprime to {D} found for {Q}")
        bound *= 2
    value = kronecker_symbol(D, rs[0])
    if check:
        others = {kronecker_symbol(D, r) for r in rs}
        if others != {value}:
            raise EllipticError(f"chi_{D}({Q}) depends on the represented value: {sorted(others)}")
    return value


# ---------------------------------------------------------------------------
# f_{k,d,D}


@dataclass
class FkdDExpansion:
    """Fourier coefficients c(1..n_max) of f_{k,d,D} restricted to classes with a <= a_max.

    ``coefficients[m]`` is c(m); c(0) = 0.  Values are mpmath complex numbers
    computed at ``bits`` of precision (plus internal guard bits).
    """

    k: int
    data: GenusCharData
    n_max: int
    a_max: int
    bits: int
    classes: list[tuple[BQF, int]]
    coefficients: list = field(repr=False)
    guard_bits: int = 0

    @property
    def disc(self) -> int:
        return self.data.disc

    @cached_property
    def pole_height(self):
        """Largest imaginary part of a pole, sqrt|dD| / 2."""
        with mpmath.workprec(self.bits):
            return mpmath.sqrt(abs(self.disc)) / 2

    @cached_property
    def class_weight(self):
        """sum over nonzero-chi classes of a^(-k)."""
        with mpmath.workprec(self.bits):
            return mpmath.fsum(mpmath.mpf(Q.a) ** (-self.k) for Q, chi in self.classes if chi)

    def _check_height(self, y):
        if y <= self.pole_height:
            raise EllipticError(f"Im z = {y} is not above all poles (need > {self.pole_height})")

    def lipschitz_tail(self, y):
        """Bound for sum_{m > n_max} |c(m) e(mz)| at Im z = y."""
        self._check_height(y)
        with mpmath.workprec(self.bits):
            y = mpmath.mpf(y)
            eta = self.pole_height
            y0 = (y + eta) / 2
            k = self.k
            J = mpmath.sqrt(mpmath.pi) * mpmath.gamma(k - mpmath.mpf(1) / 2) / mpmath.gamma(k) * (y0 - eta) ** (1 - 2 * k)
            r = mpmath.exp(-2 * mpmath.pi * (y - y0))
            return self.class_weight * J * r ** (self.n_max + 1) / (1 - r)

    def class_tail(self, y):
        """Crude bound for the contribution of all classes with a > a_max at Im z = y.

        Uses rho(a) <= C * 2 sqrt(a) for the number of classes with leading
        coefficient a; decays like a_max^(3/2 - k).
        """
        self._check_height(y)
        with mpmath.workprec(self.bits):
            k, A = self.k, self.a_max
            s = mpmath.mpf(y) - mpmath.sqrt(abs(self.disc)) / (2 * A)
            per = s ** (-2 * k) + mpmath.sqrt(mpmath.pi) * mpmath.gamma(k - mpmath.mpf(1) / 2) / mpmath.gamma(k) * s ** (1 - 2 * k)
            C = 4
            for p, e in factorint(8 * abs(self.disc)).items():
                C *= p ** ((e + 1) // 2)
            return 2 * C * per * mpmath.mpf(A) ** (mpmath.mpf(3) / 2 - k) / (k - mpmath.mpf(3) / 2)

    def evaluate(self, z):
        """Truncated Fourier sum at z; returns (value, Lipschitz tail bound)."""
        with mpmath.workprec(self.bits):
            z = mpmath.mpc(z)
            tail = self.lipschitz_tail(z.imag)
            q = mpmath.exp(2j * mpmath.pi * z)
            acc, qm = mpmath.mpc(0), mpmath.mpc(1)
            for m in range(1, self.n_max + 1):
                qm *= q
                acc += self.coefficients[m] * qm
            return acc, tail

    def to_json(self, digits: int | None = None) -> dict:
        digits = digits or max(10, int(self.bits * 0.30103) - 5)
        return {
            "schema": 1,
            "k": self.k,
            "d": self.data.d,
            "D": self.data.D,
            "a_max": self.a_max,
            "bits": self.bits,
            "guard_bits": self.guard_bits,
            "classes": len(self.classes),
            "coefficients": [
                {"m": m, "re": mpmath.nstr(c.real, digits), "im": mpmath.nstr(c.imag, digits)}
                for m, c in enumerate(self.coefficients)
                if m
            ],
        }


def _binom_neg(k: int, t: int) -> int:
    """binomial(-k, t)."""
    return (-1) ** t * math.comb(k + t - 1, t)


def fkdD_classes(k: int, data: GenusCharData, a_max: int) -> list[tuple[BQF, int]]:
    return [(Q, genus_character(Q, data.D)) for Q in enumerate_forms(data.disc, a_max)]


def fkdD_coefficients(k: int, d: int, D: int, n_max: int, bits: int = 256, a_max: int = 50, strict: bool = True) -> FkdDExpansion:
    if k < 2:
        raise EllipticError("k >= 2 is needed for absolute convergence")
    data = GenusCharData(d, D, strict)
    disc = data.disc
    classes = fkdD_classes(k, data, a_max)
    # partial fractions in delta = w - conj(w) lose about (2k-1) log2(1/|delta|) bits
    guard = 32 + max(0, math.ceil((2 * k - 1) * math.log2(2 * a_max / math.sqrt(abs(disc))))) + math.ceil(k * math.log2(n_max + 1))
    coeffs = [mpmath.mpc(0)] * (n_max + 1)
    with mpmath.workprec(bits + guard):
        two_pi_i = 2j * mpmath.pi
        sq = mpmath.sqrt(abs(disc))
        lip = [None] + [(-two_pi_i) ** j / math.factorial(j - 1) for j in range(1, k + 1)]
        acc = [mpmath.mpc(0)] * (n_max + 1)
        for Q, chi in classes:
            if chi == 0:
                continue
            a, b = Q.a, Q.b
            w = mpmath.mpc(mpmath.mpf(-b) / (2 * a), sq / (2 * a))
            delta = mpmath.mpc(0, sq / a)
            A = [None] + [_binom_neg(k, k - j) * delta ** (-2 * k + j) for j in range(1, k + 1)]
            B = [None] + [_binom_neg(k, k - j) * (-delta) ** (-2 * k + j) for j in range(1, k + 1)]
            scale = chi * mpmath.mpf(a) ** (-k)
            ew = mpmath.exp(-two_pi_i * w)  # e(-w)
            ewb = mpmath.exp(-two_pi_i * mpmath.conj(w))
            pw, pwb = mpmath.mpc(1), mpmath.mpc(1)
            for m in range(1, n_max + 1):
                pw *= ew
                pwb *= ewb
                s = mpmath.mpc(0)
                for j in range(1, k + 1):
                    s += lip[j] * mpmath.mpf(m) ** (j - 1) * (A[j] * pw + B[j] * pwb)
                acc[m] += scale * s
    with mpmath.workprec(bits):
        coeffs = [+c for c in acc]
    return FkdDExpansion(k, data, n_max, a_max, bits, classes, coeffs, guard)


def fkdD_direct(expansion: FkdDExpansion, z):
    """Oracle: sum over the same classes of sum_n Q(z+n, 1)^(-k), with the n-sum done by mpmath.nsum."""
    k = expansion.k
    with mpmath.workprec(expansion.bits + 32):
        z = mpmath.mpc(z)
        total = mpmath.mpc(0)
        for Q, chi in expansion.classes:
            if chi == 0:
                continue
            a, b, c = Q.a, Q.b, Q.c

            def term(n, a=a, b=b, c=c):
                x = z + n
                return (a * x * x + b * x + c) ** (-k)

            total += chi * mpmath.nsum(term, [-mpmath.inf, mpmath.inf])
    with mpmath.workprec(expansion.bits):
        return +total


# ---------------------------------------------------------------------------
# classical magnetic forms and the j-function

CLASSICAL = {
    "E4D_over_E6sq": ({"E4": 1, "Delta": 1, "E6": -2}, 4),
    "E6D_over_E4cu": ({"E6": 1, "Delta": 1, "E4": -3}, 6),
}


def classical_magnetic(name: str, prec: int) -> FourierSeries:
    if name not in CLASSICAL:
        raise EllipticError(f"unknown form {name!r}; choose from {sorted(CLASSICAL)}")
    if prec < 1:
        raise EllipticError("precision must be at least 1")
    return eval_monomial(CLASSICAL[name][0], prec)


def classical_weight(name: str) -> int:
    return CLASSICAL[name][1]


def classical_magnetic_report(name: str, prec: int) -> DivisibilityReport:
    """n^(k/2 - 1) | c(n) for 1 <= n < prec."""
    f = classical_magnetic(name, prec)
    e = classical_weight(name) // 2 - 1
    entries = []
    for n in range(1, prec):
        c = f[n]
        t = n**e
        entries.append(DivisibilityEntry((), n, c, t, Verdict.PASS if c % t == 0 else Verdict.FAIL))
    return DivisibilityReport(N=1, s=e + 1, entries=entries)


@dataclass
class JEntry:
    m: int
    exponents: tuple[int, int, int, int]
    modulus: int
    coefficient: int
    verdict: Verdict
    shortfall: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "abcd": list(self.exponents),
            "modulus": self.modulus,
            "coefficient": str(self.coefficient),
            "verdict": self.verdict.value,
            "shortfall": {str(p): v for p, v in self.shortfall.items()},
        }


@dataclass
class JReport:
    bound: int
    entries: list[JEntry]

    @property
    def failures(self) -> list[JEntry]:
        return [e for e in self.entries if e.verdict is not Verdict.PASS]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "bound": self.bound,
            "claim": "2^(3a+8) 3^(2b+5) 5^(c+1) 7^d | a_j(2^a 3^b 5^c 7^d n)",
            "checked": len(self.entries),
            "failures": len(self.failures),
            "passed": self.passed,
            "failing": [e.to_json() for e in self.failures],
        }


def j_divisibility_report(bound: int) -> JReport:
    """Check the printed prime-power claim literally for every 1 <= m <= bound.

    ``shortfall`` records, per prime, how many powers the coefficient lacks.
    """
    if bound < 1:
        raise EllipticError("bound must be positive")
    j = classical_generator("j", bound + 1)
    entries = []
    for m in range(1, bound + 1):
        a, b, c, d = (valuation(m, p) for p in (2, 3, 5, 7))
        need = {2: 3 * a + 8, 3: 2 * b + 5, 5: c + 1, 7: d}
        modulus = math.prod(p**e for p, e in need.items())
        coeff = int(j[m])
        short = {}
        for p, e in need.items():
            have = valuation(coeff, p) if coeff else e
            if have < e:
                short[p] = e - have
        entries.append(JEntry(m, (a, b, c, d), modulus, coeff, Verdict.FAIL if short else Verdict.PASS, short))
    return JReport(bound, entries)
