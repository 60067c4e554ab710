"""Even lattices given by Gram matrices, their discriminant groups, and cusp data.

Vectors are tuples of exact rationals in the distinguished basis of the lattice.
The discriminant group L'/L comes from a Smith normal form ``U G V = D``: a dual
vector ``x`` has coset coordinates ``(U G x)_i mod d_i``, and the i-th generator
is ``V e_i / d_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .arith import Rat, e_rational, rat

Matrix = list[list[int]]
Vector = tuple  # tuple of int/Fraction


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer and rational linear algebra


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_vec(m: Sequence[Sequence[Rat]], v: Sequence[Rat]) -> tuple:
    return tuple(rat(sum(a * b for a, b in zip(row, v))) for row in m)


def mat_mul(a: Sequence[Sequence[Rat]], b: Sequence[Sequence[Rat]]) -> list[list]:
    bt = list(zip(*b))
    return [[rat(sum(x * y for x, y in zip(row, col))) for col in bt] for row in a]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(r) for r in zip(*m)]


def bilinear(gram: Sequence[Sequence[int]], x: Sequence[Rat], y: Sequence[Rat]) -> Rat:
    return rat(sum(x[i] * sum(g * yj for g, yj in zip(gram[i], y)) for i in range(len(x)) if x[i]))


def rational_inverse(m: Sequence[Sequence[Rat]]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            raise LatticeError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [[rat(x) for x in row[n:]] for row in a]


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((r for r in range(k + 1, n) if a[r][k]), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U a V = D diagonal, d_i | d_{i+1}, d_i >= 0."""
    n, m = len(a), len(a[0]) if a else 0
    d = [list(map(int, row)) for row in a]
    u = identity(n)
    v = identity(m)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        d[dst] = [x + f * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in d:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(n, m)):
        while True:
            nz = [(abs(d[i][j]), i, j) for i in range(t, n) for j in range(t, m) if d[i][j]]
            if not nz:
                break
            _, pi, pj = min(nz)
            swap_rows(t, pi)
            swap_cols(t, pj)
            done = True
            for i in range(t + 1, n):
                q = d[i][t] // d[t][t]
                if q:
                    add_row(i, t, -q)
                if d[i][t]:
                    done = False
            for j in range(t + 1, m):
                q = d[t][j] // d[t][t]
                if q:
                    add_col(j, t, -q)
                if d[t][j]:
                    done = False
            if not done:
                continue
            # divisibility condition on the remaining block
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m) if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style HNF of the lattice spanned by integer rows (zero rows dropped)."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    n, m = len(a), len(a[0])
    r = 0
    for c in range(m):
        if r >= n:
            break
        while True:
            nz = [(abs(a[i][c]), i) for i in range(r, n) if a[i][c]]
            if not nz:
                break
            _, p = min(nz)
            a[r], a[p] = a[p], a[r]
            others = False
            for i in range(r + 1, n):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        others = True
            if not others:
                break
        if not any(a[i][c] for i in range(r, n)):
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return [row for row in a[:r] if any(row)]


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis (as rows, in HNF) of {x in Z^ncols : A x = 0} for the integer matrix A."""
    if not rows:
        return identity(ncols)
    u, d, v = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    basis = [[v[i][j] for i in range(ncols)] for j in range(rank, ncols)]
    return hermite_normal_form(basis)


def congruence_signature(gram: Sequence[Sequence[Rat]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts via exact symmetric elimination."""
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    pos = neg = 0
    k = 0
    while k < n:
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j]), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j]), None)
                if j is None:
                    k += 1
                    continue
                # replace basis vector k by b_k + b_j
                a[k] = [x + y for x, y in zip(a[k], a[j])]
                for row in a:
                    row[k] += row[j]
        p = a[k][k]
        if p == 0:
            continue
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        for i in range(k + 1, n):
            a[i][k] = Fraction(0)
        for j in range(k + 1, n):
            a[k][j] = Fraction(0)
        k += 1
    return pos, neg, n - pos - neg


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g


# ---------------------------------------------------------------------------
# discriminant groups


class DiscriminantGroup:
    """The finite quadratic module L'/L of an even lattice."""

    def __init__(self, gram: Sequence[Sequence[int]]):
        if determinant(gram) == 0:
            raise LatticeError("Gram matrix is singular")
        self.gram = [list(map(int, r)) for r in gram]
        u, d, v = smith_normal_form(self.gram)
        n = len(gram)
        keep = [i for i in range(n) if d[i][i] != 1]
        self._u_rows = [u[i] for i in keep]
        self.elementary_divisors: tuple[int, ...] = tuple(d[i][i] for i in keep)
        self.generators: tuple[Vector, ...] = tuple(
            tuple(rat(Fraction(v[r][i], d[i][i])) for r in range(n)) for i in keep
        )
        self.order = math.prod(self.elementary_divisors)
        self.elements: tuple[tuple[int, ...], ...] = tuple(
            itertools.product(*(range(di) for di in self.elementary_divisors))
        )
        self._index = {g: i for i, g in enumerate(self.elements)}

    def __len__(self):
        return self.order

    def index(self, gamma: Sequence[int]) -> int:
        return self._index[self.normalize(gamma)]

    def normalize(self, gamma: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(g) % d for g, d in zip(gamma, self.elementary_divisors))

    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.elementary_divisors)

    def coset_of(self, x: Sequence[Rat]) -> tuple[int, ...]:
        """Coset coordinates of a dual vector given in lattice coordinates."""
        gx = mat_vec(self.gram, x)
        if any(not isinstance(c, int) for c in gx):
            raise LatticeError(f"vector {tuple(map(str, x))} is not in the dual lattice")
        return self.coset_of_dual_coordinates(gx)

    def coset_of_dual_coordinates(self, gx: Sequence[int]) -> tuple[int, ...]:
        """Coset of the dual vector x from its integral dual coordinates G x."""
        return tuple(sum(a * b for a, b in zip(row, gx)) % d for row, d in zip(self._u_rows, self.elementary_divisors))

    def representative(self, gamma: Sequence[int]) -> Vector:
        n = len(self.gram)
        out = [Fraction(0)] * n
        for c, g in zip(gamma, self.generators):
            if c:
                for i in range(n):
                    out[i] += c * g[i]
        return tuple(rat(x) for x in out)

    def q(self, gamma: Sequence[int]) -> Fraction:
        x = self.representative(gamma)
        return Fraction(bilinear(self.gram, x, x)) / 2 % 1

    def b(self, gamma: Sequence[int], delta: Sequence[int]) -> Fraction:
        return Fraction(bilinear(self.gram, self.representative(gamma), self.representative(delta))) % 1

    def neg(self, gamma: Sequence[int]) -> tuple[int, ...]:
        return self.normalize(tuple(-g for g in gamma))

    def add(self, gamma: Sequence[int], delta: Sequence[int]) -> tuple[int, ...]:
        return self.normalize(tuple(a + b for a, b in zip(gamma, delta)))

    @cached_property
    def q_values(self) -> tuple[Fraction, ...]:
        return tuple(self.q(g) for g in self.elements)

    def level(self) -> int:
        n = 1
        for g in self.generators:
            x = Fraction(bilinear(self.gram, g, g)) / 2
            n = math.lcm(n, x.denominator)
        # b(g_i, g_j) denominators also divide the level
        for g, h in itertools.combinations(self.generators, 2):
            n = math.lcm(n, Fraction(bilinear(self.gram, g, h)).denominator)
        return n


def discriminant_group(L: "EvenLattice") -> DiscriminantGroup:
    return L.disc


def coset_q_value(D: DiscriminantGroup, gamma: Sequence[int]) -> Fraction:
    return D.q(gamma)


# ---------------------------------------------------------------------------
# lattices


class EvenLattice:
    """An even lattice with a distinguished basis, given by its Gram matrix."""

    def __init__(self, gram: Sequence[Sequence[int]], name: str | None = None, signature=None):
        g = [list(map(int, r)) for r in gram]
        n = len(g)
        if any(len(r) != n for r in g):
            raise LatticeError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise LatticeError("Gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(n)):
            raise LatticeError("lattice is not even")
        pos, neg, zero = congruence_signature(g)
        if zero:
            raise LatticeError("Gram matrix is degenerate")
        if signature is not None and tuple(signature) != (pos, neg):
            raise LatticeError(f"declared signature {tuple(signature)} but Gram matrix has {(pos, neg)}")
        self.gram = g
        self.signature = (pos, neg)
        self.name = name

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def disc(self) -> DiscriminantGroup:
        return DiscriminantGroup(self.gram)

    @cached_property
    def gram_inverse(self) -> list[list[Fraction]]:
        return rational_inverse(self.gram)

    @cached_property
    def det(self) -> int:
        return determinant(self.gram)

    def q(self, x: Sequence[Rat]) -> Rat:
        return rat(Fraction(bilinear(self.gram, x, x)) / 2)

    def b(self, x: Sequence[Rat], y: Sequence[Rat]) -> Rat:
        return bilinear(self.gram, x, y)

    def is_dual(self, x: Sequence[Rat]) -> bool:
        return all(isinstance(c, int) for c in mat_vec(self.gram, x))

    def dual_coordinates(self, x: Sequence[Rat]) -> tuple[int, ...]:
        """Coordinates of x in the dual basis (columns of the inverse Gram matrix)."""
        z = mat_vec(self.gram, x)
        if any(not isinstance(c, int) for c in z):
            raise LatticeError("vector is not in the dual lattice")
        return z

    def from_dual_coordinates(self, z: Sequence[int]) -> Vector:
        return mat_vec(self.gram_inverse, z)

    def level(self) -> int:
        return level(self)

    def __eq__(self, other):
        return isinstance(other, EvenLattice) and self.gram == other.gram

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        label = self.name or f"rank {self.rank}"
        return f"EvenLattice({label}, signature={self.signature})"

    def to_json(self) -> dict:
        return {"gram": self.gram, "name": self.name}


def level(L: EvenLattice) -> int:
    """Smallest N with N q(x) integral on the dual lattice."""
    return L.disc.level()


def direct_sum(*lattices: EvenLattice) -> EvenLattice:
    n = sum(L.rank for L in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                g[off + i][off + j] = L.gram[i][j]
        off += L.rank
    name = " + ".join(L.name or "?" for L in lattices)
    return EvenLattice(g, name=name)


def rescale(L: EvenLattice, c: int) -> EvenLattice:
    name = f"{L.name}({c})" if L.name else None
    return EvenLattice([[c * x for x in row] for row in L.gram], name=name)


_E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]


def U(scale: int = 1) -> EvenLattice:
    return EvenLattice([[0, scale], [scale, 0]], name="U" if scale == 1 else f"U({scale})")


def A1(scale: int = 1) -> EvenLattice:
    return EvenLattice([[2 * scale]], name="A1" if scale == 1 else f"A1({scale})")


def E8(scale: int = 1) -> EvenLattice:
    return EvenLattice([[scale * x for x in r] for r in _E8], name="E8" if scale == 1 else f"E8({scale})")


def trivial_lattice() -> EvenLattice:
    """The zero lattice: trivial discriminant group, signature (0, 0)."""
    return EvenLattice([], name="0")


BUILTINS = {
    "U": lambda: U(),
    "A1": lambda: A1(),
    "A1(-1)": lambda: A1(-1),
    "E8": lambda: E8(),
    "E8(-1)": lambda: E8(-1),
}


def builtin(spec: str) -> EvenLattice:
    """Parse names like ``"U+U+E8(-1)"`` or ``"U(2)+A1(-1)"`` into a lattice."""
    parts = [p.strip() for p in spec.replace("⊕", "+").split("+") if p.strip()]
    out = []
    for p in parts:
        base, scale = p, 1
        if "(" in p and p.endswith(")"):
            base, arg = p[:-1].split("(", 1)
            scale = int(arg)
        ctor = {"U": U, "A1": A1, "E8": E8}.get(base)
        if ctor is None:
            raise LatticeError(f"unknown built-in lattice {p!r}")
        out.append(ctor(scale))
    if not out:
        raise LatticeError("empty lattice description")
    L = out[0] if len(out) == 1 else direct_sum(*out)
    L.name = "+".join(parts)
    return L


# ---------------------------------------------------------------------------
# cusp data


@dataclass
class CuspData:
    """Primitive isotropic e, dual e', zeta and the sublattice K = L ∩ e⊥ ∩ e'⊥.

    ``K_basis`` rows are the basis vectors of K written in L coordinates.
    """

    lattice: EvenLattice
    e: tuple[int, ...]
    eprime: Vector
    zeta: tuple[int, ...]
    N_e: int
    K_basis: list[list[int]]
    K: EvenLattice = field(repr=False)

    def embed(self, y: Sequence[Rat]) -> Vector:
        """K-coordinates (rational) to L-coordinates."""
        n = self.lattice.rank
        return tuple(rat(sum(y[i] * self.K_basis[i][j] for i in range(len(y)))) for j in range(n))


def cusp_data(L: EvenLattice, e: Sequence[int], eprime: Sequence[Rat]) -> CuspData:
    e = tuple(int(x) for x in e)
    eprime = tuple(rat(x) for x in eprime)
    if len(e) != L.rank or len(eprime) != L.rank:
        raise LatticeError("e and e' must have the lattice rank")
    if L.q(e) != 0:
        raise LatticeError("e is not isotropic")
    if content(e) != 1:
        raise LatticeError("e is not primitive")
    if not L.is_dual(eprime):
        raise LatticeError("e' is not in the dual lattice")
    if L.b(e, eprime) != 1:
        raise LatticeError("(e, e') must equal 1")
    row_e = mat_vec(L.gram, e)
    N_e = content(row_e)
    zeta = _choose_zeta(row_e, N_e)
    row_ep = mat_vec(L.gram, eprime)  # integral since e' is dual
    basis = integer_kernel([list(row_e), list(row_ep)], L.rank)
    k_gram = [[L.b(x, y) for y in basis] for x in basis]
    K = EvenLattice(k_gram, name="K")
    bp, bm = L.signature
    if K.signature != (bp - 1, bm - 1):
        raise LatticeError(f"K has signature {K.signature}, expected {(bp - 1, bm - 1)}")
    return CuspData(L, e, eprime, zeta, N_e, basis, K)


def _choose_zeta(row: Sequence[int], target: int) -> tuple[int, ...]:
    """Integral zeta with row . zeta = target; a unit vector when one exists."""
    n = len(row)
    for sign in (1, -1):
        for i in range(n):
            if row[i] == sign * target:
                return tuple(sign * int(j == i) for j in range(n))
    # extended gcd over the row, then size-reduce against the kernel of the row
    g, coeffs = 0, [0] * n
    for i, r in enumerate(row):
        if r == 0:
            continue
        if g == 0:
            g, coeffs = r, [int(j == i) for j in range(n)]
            continue
        d, s, t = _xgcd(g, r)
        coeffs = [s * c for c in coeffs]
        coeffs[i] += t
        g = d
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    sol = [c * (target // g) for c in coeffs]
    kernel = integer_kernel([list(row)], n)
    for _ in range(4):
        for k in kernel:
            kk = sum(x * x for x in k)
            f = round(Fraction(sum(a * b for a, b in zip(sol, k)), kk))
            if f:
                sol = [a - f * b for a, b in zip(sol, k)]
    return tuple(sol)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def divisibility_in_dual(K: EvenLattice, lam: Sequence[Rat], m: int) -> bool:
    """Is lam / m again in K'?  ``lam`` is given in K coordinates."""
    return all(z % m == 0 for z in K.dual_coordinates(lam))


def dual_divisors(K: EvenLattice, lam: Sequence[Rat]) -> list[int]:
    """All m >= 1 with lam / m in K' (the divisors of the K'-content)."""
    from .arith import divisors

    g = content(K.dual_coordinates(lam))
    if g == 0:
        raise LatticeError("the zero vector has no finite set of divisors")
    return divisors(g)


def milgram_sum(L: EvenLattice):
    """Sum of e(q(gamma)) over L'/L as an exact cyclotomic number."""
    D = L.disc
    total = None
    for qv in D.q_values:
        t = e_rational(qv)
        total = t if total is None else total + t
    return total
