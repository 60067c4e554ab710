"""Vector-valued weakly holomorphic modular forms for a Weil representation.

A form is a map from cosets gamma in L'/L to :class:`FourierSeries` whose
exponents lie in Z + q(gamma).  Nothing here constructs bases for general
discriminant forms; inputs are level-one scalar forms, tensor products with
invariant vectors, Bol images, or coefficient files.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .arith import (
    CyclotomicNumber,
    Rat,
    Verdict,
    e_rational,
    format_rational,
    is_integral,
    parse_rational,
    rat,
    to_mpf,
)
from .lattice import EvenLattice, direct_sum
from .qseries import (
    FourierSeries,
    PrecisionError,
    bol_coefficients,
    eval_monomial,
    monomial_weight,
)
from .weil import WeilRep

Coset = tuple[int, ...]


class FormError(ValueError):
    pass


class VVModularForm:
    """Coset-indexed family of Fourier series of a given weight."""

    def __init__(
        self,
        weight,
        rep: WeilRep,
        components: Mapping[Coset, FourierSeries],
        prec=None,
        check: bool = True,
    ):
        self.weight = Fraction(weight)
        self.rep = rep
        comps = {rep.disc.normalize(g): f for g, f in components.items()}
        if prec is None:
            prec = min((f.prec for f in comps.values()), default=Fraction(0))
        self.prec = Fraction(prec)
        self.components: dict[Coset, FourierSeries] = {}
        for g in rep.elements:
            f = comps.get(g)
            if f is None:
                f = FourierSeries({}, self.prec)
            elif f.prec > self.prec:
                f = f.truncate(self.prec)
            elif f.prec < self.prec:
                raise FormError(f"component {g} has precision {f.prec} < {self.prec}")
            self.components[g] = f
        if check:
            bad = self.grid_violations()
            if bad:
                raise FormError(f"exponents off the coset grid Z + q(gamma): {bad[:3]}")
            if not self.check_symmetry():
                raise FormError("coefficients violate the symmetry c(gamma, l) = sign * c(-gamma, l)")

    # access ---------------------------------------------------------------
    def component(self, gamma: Sequence[int]) -> FourierSeries:
        return self.components[self.rep.disc.normalize(gamma)]

    def coefficient(self, gamma: Sequence[int], exponent) -> Rat:
        """c(gamma, l); raises PrecisionError when l is at or beyond the precision."""
        e = Fraction(exponent)
        if e >= self.prec:
            raise PrecisionError(f"exponent {e} needs form precision > {e} (have {self.prec})", required=e)
        return self.component(gamma)[e]

    def coefficient_at_vector(self, x: Sequence[Rat], exponent) -> Rat:
        return self.coefficient(self.rep.disc.coset_of(x), exponent)

    def items(self):
        for g in self.rep.elements:
            for e, c in self.components[g].items():
                yield g, e, c

    def principal_part(self) -> dict[tuple[Coset, Fraction], Rat]:
        return {(g, e): c for g, e, c in self.items() if e < 0}

    def is_integral(self) -> bool:
        return all(f.is_integral() for f in self.components.values())

    # invariants -------------------------------------------------------------
    def grid_violations(self) -> list:
        out = []
        for g, e, _ in self.items():
            if (e - self.rep.q(g)) % 1:
                out.append((g, e))
        return out

    def symmetry_sign(self) -> CyclotomicNumber:
        """sign with c(gamma, l) = sign * c(-gamma, l), read off rho(S)^2."""
        S = self.rep.rho_S
        # rho(S)^2 e_0 = eps e_0
        eps = sum((S[0][t] * S[t][0] for t in range(self.rep.dim)), CyclotomicNumber.zero())
        # invariance under Z = (-I, i) gives f_gamma = i^(-2k) eps^(-1) f_(-gamma)
        return e_rational(-self.weight / 2) * eps.conjugate()

    def check_symmetry(self) -> bool:
        sign = self.symmetry_sign()
        if sign == 1 or sign == -1:
            s = 1 if sign == 1 else -1
            D = self.rep.disc
            return all(
                self.components[g].agrees_with(self.components[D.neg(g)].scale(s)) for g in self.rep.elements
            )
        # a non-real sign forces rational coefficients to vanish
        return all(f.is_zero() for f in self.components.values())

    # arithmetic -----------------------------------------------------------
    def _same_space(self, other: "VVModularForm"):
        if other.rep is not self.rep and other.rep.gram != self.rep.gram:
            raise FormError("forms live on different representations")
        if other.weight != self.weight:
            raise FormError("forms have different weights")

    def __add__(self, other: "VVModularForm") -> "VVModularForm":
        self._same_space(other)
        prec = min(self.prec, other.prec)
        comps = {g: self.components[g].truncate(prec) + other.components[g].truncate(prec) for g in self.rep.elements}
        return VVModularForm(self.weight, self.rep, comps, prec, check=False)

    def scale(self, c: Rat) -> "VVModularForm":
        return VVModularForm(self.weight, self.rep, {g: f.scale(c) for g, f in self.components.items()}, self.prec, check=False)

    def __eq__(self, other):
        if not isinstance(other, VVModularForm):
            return NotImplemented
        return (
            self.weight == other.weight
            and self.prec == other.prec
            and all(self.components[g] == other.components[g] for g in self.rep.elements)
        )

    __hash__ = None  # type: ignore[assignment]

    # serialization --------------------------------------------------------
    def to_json(self, lattice_ref=None) -> dict:
        comps = []
        for g in self.rep.elements:
            comps.append(
                {
                    "coset": list(g),
                    "coeffs": {format_rational(e): format_rational(c) for e, c in self.components[g].items()},
                }
            )
        return {
            "schema": 1,
            "weight": format_rational(self.weight),
            "lattice_ref": lattice_ref,
            "prec": format_rational(self.prec),
            "components": comps,
        }

    def __repr__(self):
        return f"VVModularForm(weight={self.weight}, |D|={self.rep.dim}, prec={self.prec})"


def load_form(data: Mapping, rep: WeilRep) -> VVModularForm:
    """Read the coefficient-file schema ``{weight, [prec], components: [{coset, coeffs}]}``.

    Without an explicit ``prec`` the precision is taken just past the largest
    listed exponent.
    """
    weight = parse_rational(data["weight"])
    raw: dict[Coset, dict[Fraction, Rat]] = {}
    for entry in data["components"]:
        g = rep.disc.normalize(entry["coset"])
        raw[g] = {Fraction(parse_rational(e)): parse_rational(c) for e, c in entry["coeffs"].items()}
    exponents = [e for co in raw.values() for e in co]
    if "prec" in data:
        prec = Fraction(parse_rational(data["prec"]))
    else:
        prec = max(exponents, default=Fraction(-1)) + Fraction(1, 10**6)
    if any(e >= prec for e in exponents):
        raise FormError(f"a listed exponent is not below the declared precision {prec}")
    series = {}
    for g, co in raw.items():
        d = math.lcm(rep.q(g).denominator, *(e.denominator for e in co))
        series[g] = FourierSeries({int(e * d): c for e, c in co.items()}, prec, d)
    return VVModularForm(weight, rep, series, prec)


def load_form_file(path, rep: WeilRep) -> VVModularForm:
    with open(path) as fh:
        return load_form(json.load(fh), rep)


# ---------------------------------------------------------------------------
# constructions


def from_scalar(f: FourierSeries, W: WeilRep, k) -> VVModularForm:
    if W.dim != 1:
        raise FormError("from_scalar needs a trivial discriminant group")
    if any(e.denominator != 1 for e, _ in f.items()):
        raise FormError("scalar input must be supported on integer exponents")
    return VVModularForm(k, W, {W.disc.zero(): f}, f.prec)


def scalar_monomial_form(expr: Mapping[str, int], W: WeilRep, prec: int) -> VVModularForm:
    return from_scalar(eval_monomial(expr, prec), W, monomial_weight(expr))


def tensor_with_invariant(
    v: Sequence[int], L2: EvenLattice, f: VVModularForm, L1: EvenLattice
) -> tuple[VVModularForm, EvenLattice]:
    """v (x) f on L1 + L2, where f is a form for rho_{L1} and v is rho_{L2}-invariant.

    ``v`` is indexed in the order of ``L2.disc.elements``.  Returns the new form
    together with the direct-sum lattice carrying its representation.
    """
    W2 = WeilRep.from_lattice(L2)
    if len(v) != W2.dim:
        raise FormError("invariant vector has the wrong length")
    if not W2.invariant_check(v):
        raise FormError("vector is not invariant under rho_{D2}(S) and rho_{D2}(T)")
    if L1.disc.order != f.rep.dim:
        raise FormError("L1 does not match the representation of f")
    L = direct_sum(L1, L2) if L1.rank else L2
    W = WeilRep.from_lattice(L)
    D1, D2 = L1.disc, W2.disc
    comps: dict[Coset, FourierSeries] = {}
    for g1 in D1.elements:
        x1 = D1.representative(g1)
        for idx, g2 in enumerate(D2.elements):
            if v[idx]:
                g = W.disc.coset_of(tuple(x1) + tuple(D2.representative(g2)))
                comps[g] = f.components[g1].scale(v[idx])
    return VVModularForm(f.weight, W, comps, f.prec), L


def bol(f: VVModularForm, k: int) -> VVModularForm:
    """D^(k-1) on weight 2-k input: coefficient c(gamma, l) becomes l^(k-1) c(gamma, l)."""
    if k < 2:
        raise FormError("the Bol operator needs k >= 2")
    if f.weight != 2 - k:
        raise FormError(f"Bol operator D^{k - 1} expects weight {2 - k}, got {f.weight}")
    comps = {g: bol_coefficients(s, k) for g, s in f.components.items()}
    return VVModularForm(k, f.rep, comps, f.prec, check=False)


def weakly_holomorphic_with_principal_part(
    weight: int, principal: Mapping[int, Rat], prec: int, constant=None
) -> FourierSeries:
    """Level-one scalar form of even weight with prescribed principal part.

    Searches Delta^(-h) * span{E4^a E6^b : 4a + 6b = weight + 12h}, where h is the
    pole order, and solves for the coefficients at q^-h .. q^-1 (and q^0 when
    ``constant`` is given) by Gaussian elimination over Q.  Free directions are
    set to zero.
    """
    if weight % 2:
        raise FormError("level-one scalar forms have even weight")
    h = max((-n for n in principal if n < 0), default=0)
    target_w = weight + 12 * h
    if target_w < 0:
        raise FormError("no forms: weight too negative for this pole order")
    basis = []
    for a in range(target_w // 4 + 1):
        rest = target_w - 4 * a
        if rest % 6 == 0:
            expr = {"E4": a, "E6": rest // 6, "Delta": -h}
            basis.append(eval_monomial(expr, prec))
    cond = list(range(-h, 0)) + ([0] if constant is not None else [])
    rhs = [Fraction(principal.get(n, 0)) for n in range(-h, 0)] + ([Fraction(constant)] if constant is not None else [])
    rows = [[Fraction(b[n]) for b in basis] + [r] for n, r in zip(cond, rhs)]
    sol = _solve(rows, len(basis))
    if sol is None:
        raise FormError("no weakly holomorphic form with this principal part")
    result = FourierSeries({}, prec)
    for c, b in zip(sol, basis):
        if c:
            result = result + b.scale(c)
    return result


def _solve(rows: list[list[Fraction]], n: int):
    rows = [list(r) for r in rows]
    piv = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv):
        sol[c] = rows[i][-1]
    return sol


# ---------------------------------------------------------------------------
# divisibility certificate


@dataclass
class DivisibilityEntry:
    coset: Coset
    exponent: Fraction
    value: Rat
    modulus: int
    verdict: Verdict

    def to_json(self) -> dict:
        return {
            "coset": list(self.coset),
            "exponent": format_rational(self.exponent),
            "value": format_rational(self.value),
            "modulus": str(self.modulus),
            "verdict": self.verdict.value,
        }


@dataclass
class DivisibilityReport:
    N: int
    s: int
    entries: list[DivisibilityEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.verdict is Verdict.PASS for e in self.entries)

    @property
    def failures(self) -> list[DivisibilityEntry]:
        return [e for e in self.entries if e.verdict is not Verdict.PASS]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "s": self.s,
            "passed": self.passed,
            "n_checked": len(self.entries),
            "failures": [e.to_json() for e in self.failures],
        }


def check_input_divisibility(f: VVModularForm, N: int, s: int) -> DivisibilityReport:
    """Test (N l)^(s-1) | b(gamma, l) for every stored coefficient with l != 0."""
    if s < 2:
        raise ValueError("s must be at least 2")
    report = DivisibilityReport(N, s)
    for g, e, c in f.items():
        if e == 0:
            continue
        base = N * e
        if base.denominator != 1:
            raise FormError(f"N * l = {base} is not integral; is N the level?")
        modulus = abs(int(base)) ** (s - 1)
        quotient = Fraction(c) / modulus
        verdict = Verdict.PASS if quotient.denominator == 1 else (
            Verdict.FAIL if is_integral(c) else Verdict.INDETERMINATE
        )
        report.entries.append(DivisibilityEntry(g, e, c, modulus, verdict))
    return report


# ---------------------------------------------------------------------------
# numeric modularity smoke test


@dataclass
class SpotCheckReport:
    max_deviation_S: float
    max_deviation_T: float
    truncation_bound: float
    tol: float
    samples: list

    @property
    def passed(self) -> bool:
        return self.max_deviation_S < self.tol and self.max_deviation_T < self.tol

    def to_json(self) -> dict:
        return {
            "max_deviation_S": self.max_deviation_S,
            "max_deviation_T": self.max_deviation_T,
            "truncation_bound": self.truncation_bound,
            "tol": self.tol,
            "passed": self.passed,
            "samples": [str(t) for t in self.samples],
        }


def default_growth_bound(f: VVModularForm) -> Callable[[Fraction], float]:
    """Heuristic |c(l)| <= A (l + 1)^(|k| + 1) exp(4 pi sqrt(h l)), h the pole order.

    A is fitted so the bound dominates every stored coefficient.
    """
    import mpmath

    h = max((-e for _, e, _ in f.items() if e < 0), default=Fraction(0))
    k = abs(f.weight)

    def shape(l):
        l = to_mpf(l)
        return (l + 1) ** (to_mpf(k) + 1) * mpmath.exp(4 * mpmath.pi * mpmath.sqrt(to_mpf(h) * l))

    A = max((abs(to_mpf(c)) / shape(e) for _, e, c in f.items() if e > 0), default=mpmath.mpf(1))
    return lambda l: A * shape(l)


def _evaluate(f: VVModularForm, tau, dps: int):
    import mpmath

    vals = []
    for g in f.rep.elements:
        acc = mpmath.mpc(0)
        for e, c in f.components[g].items():
            acc += to_mpf(c) * mpmath.exp(2j * mpmath.pi * to_mpf(e) * tau)
        vals.append(acc)
    return vals


def _tail_bound(f: VVModularForm, growth, y) -> float:
    """Sum of growth(l) exp(-2 pi l y) over grid exponents l >= prec, all cosets."""
    import mpmath

    step = Fraction(1, math.lcm(*(s.denom for s in f.components.values())))
    l = math.ceil(f.prec / step) * step
    total = mpmath.mpf(0)
    for _ in range(10**6):
        term = growth(l) * mpmath.exp(-2 * mpmath.pi * to_mpf(l) * y)
        total += term
        if l > f.prec + 1 and term <= total * mpmath.mpf(10) ** -30:
            break
        l += step
    return float(total * f.rep.dim)


def modularity_spot_check(
    f: VVModularForm,
    samples: Sequence[complex],
    tol: float = 1e-10,
    growth: Callable | None = None,
    dps: int = 40,
) -> SpotCheckReport:
    """Numerically compare f(-1/tau) with sqrt(tau)^(2k) rho(S) f(tau), and f(tau+1) with rho(T) f(tau)."""
    import mpmath

    if growth is None:
        growth = default_growth_bound(f)
    W = f.rep
    max_s = max_t = 0.0
    bound = 0.0
    with mpmath.workdps(dps):
        S = [[x.to_complex(dps) for x in row] for row in W.rho_S]
        T = [[x.to_complex(dps) for x in row] for row in W.rho_T]
        for tau in samples:
            tau = mpmath.mpc(tau)
            if tau.imag <= 0:
                raise ValueError("sample points must lie in the upper half-plane")
            stau = -1 / tau
            v = _evaluate(f, tau, dps)
            vs = _evaluate(f, stau, dps)
            vt = _evaluate(f, tau + 1, dps)
            factor = mpmath.sqrt(tau) ** (2 * to_mpf(f.weight))
            rhs_s = [factor * sum(S[i][j] * v[j] for j in range(W.dim)) for i in range(W.dim)]
            rhs_t = [sum(T[i][j] * v[j] for j in range(W.dim)) for i in range(W.dim)]
            scale = max(1, max(abs(x) for x in vs + v))
            max_s = max(max_s, float(max(abs(a - b) for a, b in zip(vs, rhs_s)) / scale))
            max_t = max(max_t, float(max(abs(a - b) for a, b in zip(vt, rhs_t)) / scale))
            y = min(tau.imag, stau.imag)
            tb = _tail_bound(f, growth, y)
            bound = max(bound, tb * float(abs(factor)) / float(scale))
    if bound > tol:
        warnings.warn(f"truncation error bound {bound:.3g} exceeds tolerance {tol:.3g}; increase precision")
    return SpotCheckReport(max_s, max_t, bound, tol, list(samples))
