"""The Weil representation of Mp2(Z) on C[L'/L], with exact cyclotomic matrices."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .arith import CyclotomicNumber, cyclo_root_of_unity, e_rational, factorint, sqrt_of_integer
from .lattice import DiscriminantGroup, EvenLattice

CMatrix = list[list[CyclotomicNumber]]


# ---------------------------------------------------------------------------
# small matrix helpers over cyclotomic numbers


def identity_matrix(n: int, order: int = 1) -> CMatrix:
    one, zero = CyclotomicNumber.one(order), CyclotomicNumber.zero(order)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for t in range(m):
                x, y = a[i][t], b[t][j]
                if x.is_zero() or y.is_zero():
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else CyclotomicNumber.zero(a[i][0].order if m else 1))
        out.append(row)
    return out


def matvec(a: CMatrix, v: Sequence) -> list[CyclotomicNumber]:
    out = []
    for row in a:
        acc = CyclotomicNumber.zero(row[0].order if row else 1)
        for x, y in zip(row, v):
            if y:
                acc = acc + x * y
        out.append(acc)
    return out


def conj_transpose(a: CMatrix) -> CMatrix:
    return [[a[j][i].conjugate() for j in range(len(a))] for i in range(len(a[0]))]


def conjugate(a: CMatrix) -> CMatrix:
    return [[x.conjugate() for x in row] for row in a]


def matrices_equal(a: CMatrix, b: CMatrix) -> bool:
    return len(a) == len(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    n, m = len(a), len(b)
    return [[a[i // m][j // m] * b[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def permute(a: CMatrix, perm: Sequence[int]) -> CMatrix:
    """Reindex rows and columns: result[i][j] = a[perm[i]][perm[j]]."""
    return [[a[pi][pj] for pj in perm] for pi in perm]


# ---------------------------------------------------------------------------


class WeilRep:
    """Weil representation attached to a discriminant form and signature.

    ``sign = -1`` gives the representation of ``(L, -q)``, i.e. the dual one,
    on the same labelled set of cosets.
    """

    def __init__(self, disc: DiscriminantGroup, signature: tuple[int, int], sign: int = 1, gram=None):
        self.disc = disc
        self.signature = tuple(signature)
        self.sign = sign
        self.gram = gram

    @classmethod
    def from_lattice(cls, L: EvenLattice) -> "WeilRep":
        return cls(L.disc, L.signature, 1, gram=L.gram)

    @property
    def dim(self) -> int:
        return self.disc.order

    @property
    def elements(self):
        return self.disc.elements

    def q(self, gamma) -> Fraction:
        return (self.sign * self.disc.q(gamma)) % 1

    def b(self, gamma, delta) -> Fraction:
        return (self.sign * self.disc.b(gamma, delta)) % 1

    @cached_property
    def level(self) -> int:
        return self.disc.level()

    @cached_property
    def cyclo_order(self) -> int:
        r = 1
        for p, e in factorint(self.dim).items():
            if e % 2:
                r *= p
        return math.lcm(8, self.level, 4 * r)

    @cached_property
    def rho_T(self) -> CMatrix:
        M = self.cyclo_order
        n = self.dim
        zero = CyclotomicNumber.zero(M)
        out = [[zero] * n for _ in range(n)]
        for i, g in enumerate(self.elements):
            out[i][i] = e_rational(self.q(g)).embed(M)
        return out

    @cached_property
    def rho_S(self) -> CMatrix:
        M = self.cyclo_order
        bp, bm = self.signature
        n = self.dim
        sqrt_d = sqrt_of_integer(n)
        # (sqrt i)^(b- - b+) / sqrt|D| = zeta_8^(b- - b+) * sqrt|D| / |D|
        const = (cyclo_root_of_unity(8, bm - bp) * sqrt_d / n).embed(M)
        out = []
        for g in self.elements:  # row gamma
            row = []
            for b in self.elements:  # column beta
                row.append(const * e_rational(-self.b(b, g)).embed(M))
            out.append(row)
        return out

    def generator(self, token: str) -> CMatrix:
        if token == "S":
            return self.rho_S
        if token == "T":
            return self.rho_T
        if token in ("T^-1", "Ti", "t"):
            return conj_transpose(self.rho_T)
        if token in ("S^-1", "Si", "s"):
            return conj_transpose(self.rho_S)
        raise ValueError(f"unknown generator {token!r}")

    def rho_word(self, word: Iterable[str]) -> CMatrix:
        """Matrix of the product of generators, leftmost factor first."""
        result = identity_matrix(self.dim, self.cyclo_order)
        for tok in word:
            result = matmul(result, self.generator(tok))
        return result

    def rho_sl2(self, m: Sequence[Sequence[int]]) -> CMatrix:
        """Image of one metaplectic lift of ``m``, via the word from :func:`sl2_word`."""
        return self.rho_word(sl2_word(m))

    def dual(self) -> "WeilRep":
        bp, bm = self.signature
        return WeilRep(self.disc, (bm, bp), -self.sign, gram=None if self.gram is None else [[-x for x in r] for r in self.gram])

    def invariant_check(self, v: Sequence[int]) -> bool:
        vv = [CyclotomicNumber.from_rational(x) for x in v]
        for mat in (self.rho_S, self.rho_T):
            if any(a != b for a, b in zip(matvec(mat, v), vv)):
                return False
        return True

    def matrix_to_json(self, mat: CMatrix) -> list:
        return [[x.to_json() for x in row] for row in mat]

    def __repr__(self):
        return f"WeilRep(|D|={self.dim}, signature={self.signature}, sign={self.sign})"


def rho_T(W: WeilRep) -> CMatrix:
    return W.rho_T


def rho_S(W: WeilRep) -> CMatrix:
    return W.rho_S


def rho_word(W: WeilRep, word: Iterable[str]) -> CMatrix:
    return W.rho_word(word)


def dual_rep(W: WeilRep) -> WeilRep:
    return W.dual()


# ---------------------------------------------------------------------------
# SL2(Z) words

_S = ((0, -1), (1, 0))
_T = ((1, 1), (0, 1))


def _mul2(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def sl2_word(m: Sequence[Sequence[int]]) -> list[str]:
    """Word in S, T, T^-1 whose product equals ``m`` in SL2(Z)."""
    (a, b), (c, d) = m
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL2(Z)")
    word: list[str] = []
    while c != 0:
        q = a // c
        word += ["T"] * q if q >= 0 else ["T^-1"] * (-q)
        word.append("S")
        # M = T^q S M'  with  M' = S^-1 T^-q M
        a, b, c, d = c, d, -(a - q * c), -(b - q * d)
    if a == 1:
        word += ["T"] * b if b >= 0 else ["T^-1"] * (-b)
    else:  # a = d = -1: M = S^2 T^-b
        word += ["S", "S"]
        word += ["T"] * (-b) if -b >= 0 else ["T^-1"] * b
    return word


def word_to_sl2(word: Iterable[str]):
    m = ((1, 0), (0, 1))
    gens = {"S": _S, "T": _T, "T^-1": ((1, -1), (0, 1)), "S^-1": ((0, 1), (-1, 0))}
    for tok in word:
        m = _mul2(m, gens[tok])
    return m
