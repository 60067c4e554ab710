"""Fourier expansion of the additive theta lift and the magneticity certifier.

Vectors of K' are passed around as integer K'-coordinates ``z = G_K y`` where
``y`` are the (rational) K-coordinates; this makes primitivity and the
condition ``m | lambda`` plain gcd questions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .arith import (
    CyclotomicNumber,
    Rat,
    Verdict,
    bernoulli_polynomial,
    cyclo_divisible_by_int,
    e_rational,
    format_rational,
    rat,
)
from .lattice import (
    CuspData,
    EvenLattice,
    LatticeError,
    _choose_zeta,
    content,
    integer_kernel,
    mat_vec,
    rational_inverse,
)
from .qseries import PrecisionError
from .vvmf import DivisibilityReport, VVModularForm, check_input_divisibility


class LiftError(ValueError):
    pass


@dataclass(frozen=True)
class LiftProblem:
    lattice: EvenLattice
    cusp: CuspData
    form: VVModularForm

    def __post_init__(self):
        L, f = self.lattice, self.form
        if L.signature[0] != 2:
            raise LiftError(f"the lattice must have signature (2, n), got {L.signature}")
        if self.cusp.lattice is not L and self.cusp.lattice != L:
            raise LiftError("cusp data belongs to a different lattice")
        rep = f.rep
        if rep.sign != 1 or tuple(rep.signature) != tuple(L.signature):
            raise LiftError("the form is not for the Weil representation of this lattice")
        if rep.gram is not None and [list(r) for r in rep.gram] != [list(r) for r in L.gram]:
            raise LiftError("the form is not for the Weil representation of this lattice")
        kappa = self.kappa_fraction
        if kappa.denominator != 1:
            raise LiftError(f"kappa = n/2 - 1 + k = {kappa} is not an integer")
        if kappa <= 1:
            raise LiftError(f"the lift needs kappa = n/2 - 1 + k > 1, got {kappa}")

    @property
    def n(self) -> int:
        return self.lattice.signature[1]

    @property
    def K(self) -> EvenLattice:
        return self.cusp.K

    @property
    def kappa_fraction(self) -> Fraction:
        return Fraction(self.n, 2) - 1 + self.form.weight

    @property
    def kappa(self) -> int:
        return int(self.kappa_fraction)

    def k_coordinates(self, z: Sequence[int]) -> tuple:
        """K'-coordinates to K-coordinates."""
        return mat_vec(self.K.gram_inverse, z)

    def q(self, z: Sequence[int]) -> Rat:
        return self.K.q(self.k_coordinates(z))


def _coset(P: LiftProblem, x: Sequence[Rat]):
    try:
        return P.lattice.disc.coset_of(x)
    except LatticeError as exc:
        raise AssertionError(f"coset argument {tuple(x)} is not in L' (inconsistent cusp data)") from exc


@dataclass(frozen=True)
class _Embedding:
    """Integer data for lambda in K' given by K'-coordinates z, all scaled by D.

    lambda = z E / D in L coordinates, G_L lambda = z GE / D, q(lambda) = z A z / (2D),
    (lambda, zeta) = z . gz / D.
    """

    D: int
    A: list
    GE: list
    gz: list
    Ge: list


def _embedding(P: LiftProblem) -> _Embedding:
    emb = P.__dict__.get("_embedding")
    if emb is None:
        K, cusp, G = P.K, P.cusp, P.lattice.gram
        Gi = K.gram_inverse
        D = math.lcm(1, *(x.denominator for row in Gi for x in row))
        A = [[int(x * D) for x in row] for row in Gi]
        E = [[sum(A[i][t] * cusp.K_basis[t][j] for t in range(K.rank)) for j in range(P.lattice.rank)]
             for i in range(K.rank)]
        GE = [list(mat_vec(G, row)) for row in E]  # G symmetric: (z E) G = z (E G)
        gz = [sum(r[j] * cusp.zeta[j] for j in range(len(r))) for r in GE]
        Ge = list(mat_vec(G, cusp.e))
        emb = _Embedding(D, A, GE, gz, Ge)
        object.__setattr__(P, "_embedding", emb)
    return emb


def constant_term(P: LiftProblem) -> CyclotomicNumber:
    cusp, f, kappa = P.cusp, P.form, P.kappa
    Ne = cusp.N_e
    total = CyclotomicNumber.zero(1)
    for m in range(1, Ne + 1):
        gamma = _coset(P, [Fraction(m * x, Ne) for x in cusp.e])
        c = f.coefficient(gamma, 0)
        if c == 0:
            continue
        for mp in range(1, Ne + 1):
            b = bernoulli_polynomial(kappa, Fraction(mp, Ne))
            total = total + e_rational(Fraction(m * mp, Ne)) * (Fraction(Ne) ** (kappa - 1) * c * b / (2 * kappa))
    return -total


def coefficient(P: LiftProblem, z: Sequence[int]) -> CyclotomicNumber:
    """Coefficient a(lambda) for lambda in K' given by integer K'-coordinates ``z``."""
    z = tuple(int(t) for t in z)
    g = content(z)
    if g == 0:
        raise LiftError("lambda = 0 is the constant term; use constant_term")
    f, kappa, Ne = P.form, P.kappa, P.cusp.N_e
    emb = _embedding(P)
    D = emb.D
    n = len(z)
    qv = Fraction(sum(z[i] * sum(emb.A[i][j] * z[j] for j in range(n)) for i in range(n)), 2 * D)
    if qv < 0:
        raise LiftError(f"q(lambda) = {qv} < 0: lambda is outside the closed cone")
    if qv >= f.prec:
        raise PrecisionError(f"lambda {list(z)} needs form precision > {qv} (have {f.prec})", required=qv)
    glam = [sum(z[i] * emb.GE[i][j] for i in range(n) if z[i]) for j in range(len(emb.Ge))]  # D * G lambda
    lzD = sum(a * b for a, b in zip(z, emb.gz))  # D * (lambda, zeta)
    disc = P.lattice.disc
    total = CyclotomicNumber.zero(1)
    for m in (d for d in range(1, g + 1) if g % d == 0):
        weight = m ** (kappa - 1)
        den = D * m * Ne
        for mp in range(1, Ne + 1):
            # G x * den for x = lambda/m - (lambda,zeta) e/(m N_e) + m' e/N_e
            num = [a * Ne - lzD * b + mp * m * D * b for a, b in zip(glam, emb.Ge)]
            if any(v % den for v in num):
                raise AssertionError(f"coset argument for lambda {list(z)}, m = {m} is not in L' (inconsistent cusp data)")
            gamma = disc.coset_of_dual_coordinates([v // den for v in num])
            c = f.coefficient(gamma, qv / m**2)
            if c == 0:
                continue
            total = total + e_rational(Fraction(m * mp * D - lzD, D * Ne)) * (weight * c)
    return total


# ---------------------------------------------------------------------------
# enumeration of K' inside the closed cone


def _completed_squares(Q: Sequence[Sequence[Fraction]]):
    """Q(z) = sum_i d_i (z_i + sum_{j>i} mu_ij z_j)^2 for positive definite Q."""
    n = len(Q)
    q = [[Fraction(x) for x in row] for row in Q]
    for i in range(n):
        if q[i][i] <= 0:
            raise LiftError("height form is not positive definite; is w0 inside the cone?")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return [q[i][i] for i in range(n)], [[q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]


_SLACK = 1e-7


def short_vectors(
    Q: Sequence[Sequence[Rat]], bound: Rat, center: Sequence[Rat] | None = None, exact: bool = True
) -> Iterator[tuple[int, ...]]:
    """Integer t with (t + c)^T Q (t + c) <= bound, by Fincke-Pohst.

    The completed-square decomposition is exact; the search itself runs in
    floating point with a small relative slack.  With ``exact`` every candidate
    is then checked in rational arithmetic, otherwise the caller gets a
    superset and must filter.
    """
    n = len(Q)
    if n == 0:
        if bound >= 0:
            yield ()
        return
    dq, muq = _completed_squares(Q)
    d = [float(x) for x in dq]
    mu = [[float(x) for x in row] for row in muq]
    c0q = [Fraction(x) for x in center] if center is not None else [Fraction(0)] * n
    c0 = [float(x) for x in c0q]
    bound = Fraction(bound)
    fbound = float(bound) * (1 + _SLACK) + _SLACK
    Qf = [[Fraction(x) for x in row] for row in Q]
    z = [0] * n

    def exact_ok() -> bool:
        v = [z[i] + c0q[i] for i in range(n)]
        return sum(v[i] * Qf[i][j] * v[j] for i in range(n) for j in range(n)) <= bound

    def rec(i: int, rest: float):
        c = c0[i]
        row = mu[i]
        for j in range(i + 1, n):
            c += row[j] * (z[j] + c0[j])
        if rest < 0:
            return
        r = math.sqrt(rest / d[i])
        for t in range(math.ceil(-c - r), math.floor(-c + r) + 1):
            z[i] = t
            if i == 0:
                if not exact or exact_ok():
                    yield tuple(z)
            else:
                yield from rec(i - 1, rest - d[i] * (t + c) ** 2)
        z[i] = 0

    yield from rec(n - 1, fbound)


def height_form(K: EvenLattice, w0: Sequence[Rat]):
    """Positive definite Q on K'-coordinates with Q(lambda) = (lambda,w0)^2/(2q(w0)) - q(lambda)."""
    qw = K.q(w0)
    if qw <= 0:
        raise LiftError(f"w0 must satisfy q(w0) > 0, got {qw}")
    Gi = K.gram_inverse
    n = K.rank
    w = [Fraction(x) for x in w0]
    return [[w[i] * w[j] / (2 * qw) - Gi[i][j] / 2 for j in range(n)] for i in range(n)]


def cone_vectors(K: EvenLattice, w0: Sequence[Rat], H: Rat) -> list[tuple[int, ...]]:
    """K'-coordinates of all nonzero lambda with q(lambda) >= 0 and 0 < (lambda, w0) <= H.

    The height (lambda, w0) = z . w0 takes finitely many values h.  On the slice
    z . w0 = h the condition q(lambda) >= 0 reads Q(z) <= h^2 / (2 q(w0)) for the
    positive definite height form Q, so each slice is an ellipsoid and is
    enumerated exactly.
    """
    H = Fraction(H)
    w = [Fraction(x) for x in w0]
    n = K.rank
    Q = height_form(K, w)
    qw = K.q(w)
    den = math.lcm(*(x.denominator for x in w))
    W = [int(x * den) for x in w]
    g = content(W)
    Wp = [x // g for x in W]
    kernel = integer_kernel([Wp], n)  # n - 1 rows
    unit = _choose_zeta(Wp, 1)
    # Q restricted to the kernel, in kernel coordinates t: z = h' * unit + t B
    QB = [[sum(kernel[a][i] * Q[i][j] * kernel[b][j] for i in range(n) for j in range(n)) for b in range(n - 1)]
          for a in range(n - 1)]
    QBi = rational_inverse(QB) if n > 1 else []
    Qu = [sum(Q[i][j] * unit[j] for j in range(n)) for i in range(n)]
    lin = [sum(kernel[a][i] * Qu[i] for i in range(n)) for a in range(n - 1)]  # B Q unit
    quu = sum(unit[i] * Qu[i] for i in range(n))
    c_unit = [sum(QBi[a][b] * lin[b] for b in range(n - 1)) for a in range(n - 1)]
    min_unit = quu - sum(c_unit[a] * lin[a] for a in range(n - 1))
    # q(lambda) >= 0  <=>  z^T adj z >= 0 with adj an integral positive multiple of G^-1
    Gi = K.gram_inverse
    D = math.lcm(*(x.denominator for row in Gi for x in row)) if n else 1
    adj = [[int(x * D) for x in row] for row in Gi]
    out = []
    hmax = math.floor(H * den / g)
    for hp in range(1, hmax + 1):
        h = Fraction(hp * g, den)
        # Q(hp*unit + tB) = (t + hp c)^T QB (t + hp c) + hp^2 min_unit
        bound = h**2 / (2 * qw) - hp**2 * min_unit
        base = [hp * u for u in unit]
        for t in short_vectors(QB, bound, [hp * c for c in c_unit], exact=False):
            z = list(base)
            for a, ta in enumerate(t):
                if ta:
                    row = kernel[a]
                    for i in range(n):
                        z[i] += ta * row[i]
            if sum(z[i] * sum(adj[i][j] * z[j] for j in range(n)) for i in range(n)) >= 0:
                out.append(tuple(z))
    out.sort(key=lambda z: (sum(a * b for a, b in zip(z, w)), z))
    return out


def default_w0(K: EvenLattice) -> tuple[int, ...]:
    """A short vector of positive norm in K, found by a small coordinate search."""
    n = K.rank
    best = None
    for r in range(1, 4):
        for z in _box(n, r):
            qv = K.q(z)
            if qv > 0 and (best is None or (qv, z) < best[0]):
                best = ((qv, z), z)
        if best is not None:
            z = best[1]
            return tuple(-x for x in z) if next(x for x in z if x) < 0 else z
    raise LiftError("no vector of positive norm found; pass w0 explicitly")


def _box(n: int, r: int):
    if n == 0:
        yield ()
        return
    for head in range(-r, r + 1):
        for tail in _box(n - 1, r) if n <= 6 else _sparse(n - 1, r):
            yield (head,) + tail


def _sparse(n: int, r: int):
    # at most two nonzero entries keeps the search polynomial in high rank
    yield (0,) * n
    for i in range(n):
        for a in range(-r, r + 1):
            if a == 0:
                continue
            v = [0] * n
            v[i] = a
            yield tuple(v)
            for j in range(i + 1, n):
                for b in range(-r, r + 1):
                    if b:
                        v2 = list(v)
                        v2[j] = b
                        yield tuple(v2)


@dataclass
class LiftExpansion:
    constant_term: CyclotomicNumber
    coefficients: dict[tuple[int, ...], CyclotomicNumber]
    w0: tuple
    height: Fraction

    def __getitem__(self, z) -> CyclotomicNumber:
        return self.coefficients[tuple(z)]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "w0": [format_rational(x) for x in self.w0],
            "height": format_rational(self.height),
            "constant_term": self.constant_term.to_json(),
            "coefficients": [{"lambda": list(z), "value": v.to_json()} for z, v in self.coefficients.items()],
        }


def expand(P: LiftProblem, w0: Sequence[Rat] | None = None, H: Rat = 1) -> LiftExpansion:
    H = Fraction(H)
    if H <= 0:
        raise LiftError("height bound must be positive")
    w = tuple(rat(x) for x in (w0 if w0 is not None else default_w0(P.K)))
    if len(w) != P.K.rank:
        raise LiftError(f"w0 has length {len(w)}, K has rank {P.K.rank}")
    coeffs = {}
    for z in cone_vectors(P.K, w, H):
        try:
            coeffs[z] = coefficient(P, z)
        except PrecisionError as exc:
            raise PrecisionError(f"lambda {list(z)}: {exc}", required=exc.required) from exc
    return LiftExpansion(constant_term(P), coeffs, w, H)


def ray_coefficients(P: LiftProblem, lam0: Sequence[int], lmax: int) -> list[CyclotomicNumber]:
    z = tuple(int(t) for t in lam0)
    if content(z) != 1:
        raise LiftError(f"lambda0 = {list(z)} is not primitive in K'")
    qv = P.q(z)
    if qv < 0:
        raise LiftError(f"q(lambda0) = {qv} < 0")
    need = qv * lmax**2
    if need >= P.form.prec:
        raise PrecisionError(
            f"ray up to l = {lmax} needs form precision > {need} (have {P.form.prec})", required=need
        )
    return [coefficient(P, [l * t for t in z]) for l in range(1, lmax + 1)]


# ---------------------------------------------------------------------------
# magneticity


@dataclass
class MagnetEntry:
    ell: int
    modulus: int
    verdict: Verdict
    value: CyclotomicNumber
    kind: str = "divisibility"

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "modulus": self.modulus,
            "kind": self.kind,
            "verdict": self.verdict.value,
            "value": self.value.to_json(),
        }


@dataclass
class MagnetReport:
    lambda0: tuple[int, ...]
    q_lambda0: Fraction
    N: int
    s: int
    modulus_base: int
    entries: list[MagnetEntry]
    hypotheses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(en.verdict is Verdict.PASS for en in self.entries)

    @property
    def failures(self) -> list[MagnetEntry]:
        return [en for en in self.entries if en.verdict is not Verdict.PASS]

    @property
    def hypotheses_certified(self) -> bool:
        return bool(self.hypotheses.get("input_divisibility_certified"))

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "lambda0": list(self.lambda0),
            "q_lambda0": format_rational(self.q_lambda0),
            "N": self.N,
            "s": self.s,
            "modulus_base": self.modulus_base,
            "passed": self.passed,
            "hypotheses": self.hypotheses,
            "entries": [en.to_json() for en in self.entries],
        }


def check_magnetic(
    P: LiftProblem,
    lam0: Sequence[int],
    lmax: int,
    s: int,
    *,
    N: int | None = None,
    input_report: DivisibilityReport | None = None,
    certify_input: bool = True,
    cusp_forms_trivial: bool | None = None,
) -> MagnetReport:
    """Per-l verdicts for (N l q(lambda0))^(s-1) | a(l lambda0).

    Input divisibility is certified with ``check_input_divisibility`` unless a
    report is supplied or ``certify_input`` is false; an uncertified run still
    produces verdicts but says so in ``hypotheses``.
    """
    if s < 2:
        raise LiftError("the exponent parameter s must be at least 2")
    slack = Fraction(P.n, 2) + P.form.weight - s - 1
    if slack < 0:
        raise LiftError(f"precondition n/2 + k - s - 1 >= 0 fails ({slack})")
    N = P.lattice.level() if N is None else N
    z = tuple(int(t) for t in lam0)
    qv = P.q(z)
    base = N * qv
    if Fraction(base).denominator != 1:
        raise LiftError(f"N q(lambda0) = {base} is not an integer")
    base = int(base)
    values = ray_coefficients(P, z, lmax)
    if input_report is None and certify_input:
        input_report = check_input_divisibility(P.form, N, s)
    entries = []
    for l, a in enumerate(values, start=1):
        if base == 0:
            entries.append(MagnetEntry(l, 0, Verdict.PASS if a.is_zero() else Verdict.FAIL, a, "modulus-zero"))
        else:
            t = (N * l * qv) ** (s - 1)
            t = int(t)
            entries.append(MagnetEntry(l, t, cyclo_divisible_by_int(a, t), a))
    hyp = {
        "kappa": P.kappa,
        "weight": format_rational(P.form.weight),
        "n": P.n,
        "n/2+k-s-1": format_rational(slack),
        "input_divisibility_certified": None if input_report is None else input_report.passed,
        "cusp_forms_trivial_asserted": cusp_forms_trivial,
    }
    return MagnetReport(z, qv, N, s, base, entries, hyp)
