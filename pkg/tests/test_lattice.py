import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from magnetic_lift.arith import CyclotomicNumber, cyclo_root_of_unity, sqrt_of_integer
from magnetic_lift.lattice import (
    A1,
    E8,
    U,
    EvenLattice,
    LatticeError,
    builtin,
    congruence_signature,
    cusp_data,
    determinant,
    direct_sum,
    dual_divisors,
    hermite_normal_form,
    integer_kernel,
    mat_mul,
    milgram_sum,
    smith_normal_form,
    trivial_lattice,
)


@st.composite
def int_matrix(draw, rows=None, cols=None):
    n = rows or draw(st.integers(1, 4))
    m = cols or draw(st.integers(1, 4))
    return [draw(st.lists(st.integers(-9, 9), min_size=m, max_size=m)) for _ in range(n)]


@st.composite
def even_gram(draw):
    n = draw(st.integers(1, 4))
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2 * draw(st.integers(-4, 4))
        for j in range(i + 1, n):
            g[i][j] = g[j][i] = draw(st.integers(-3, 3))
    assume(determinant(g) != 0)
    return g


@given(int_matrix())
def test_smith_normal_form(a):
    u, d, v = smith_normal_form(a)
    assert mat_mul(mat_mul(u, a), v) == d
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(b % a_ == 0 for a_, b in zip(nz, nz[1:]))
    assert sympy.Matrix(a).rank() == len(nz)


@given(int_matrix())
def test_hermite_normal_form_spans_same_lattice(a):
    h = hermite_normal_form(a)
    assert hermite_normal_form(h + a) == h
    assert hermite_normal_form(h) == h
    assert len(h) == sympy.Matrix(a).rank()


@given(int_matrix())
def test_integer_kernel(a):
    m = len(a[0])
    k = integer_kernel(a, m)
    assert all(sum(r[j] * x for j, x in enumerate(row)) == 0 for r in a for row in k)
    assert len(k) == m - sympy.Matrix(a).rank()
    # saturation: the kernel basis has trivial elementary divisors
    if k:
        _, d, _ = smith_normal_form(k)
        assert all(d[i][i] == 1 for i in range(len(k)))


@given(even_gram())
def test_determinant_and_signature_against_sympy(g):
    assert determinant(g) == sympy.Matrix(g).det()
    ev = mpmath.eigsy(mpmath.matrix(g))[0]
    pos = sum(1 for x in ev if x > 0)
    neg = sum(1 for x in ev if x < 0)
    assert congruence_signature(g)[:2] == (pos, neg)


@given(even_gram())
def test_discriminant_group_order_and_q(g):
    L = EvenLattice(g)
    D = L.disc
    assert D.order == abs(determinant(g))
    for gamma in D.elements[:20]:
        x = D.representative(gamma)
        assert D.coset_of(x) == gamma
        # shifting by a lattice vector keeps coset and q mod 1
        y = tuple(a + 1 for a in x)
        assert D.coset_of(y) == gamma
        assert (L.q(y) - L.q(x)) % 1 == 0
    level = D.level()
    assert all((level * D.q(gm)).denominator == 1 for gm in D.elements)


def test_small_discriminant_forms():
    assert A1().disc.q_values == (0, Fraction(1, 4))
    assert A1().level() == 4
    assert A1(-1).disc.q_values == (0, Fraction(3, 4))
    assert E8().disc.order == 1 and E8().level() == 1
    assert sorted(U(2).disc.q_values) == [0, 0, 0, Fraction(1, 2)]
    assert U(2).level() == 2
    assert A1(3).level() == 12


def test_builtin_parser_and_validation():
    L = builtin("U+U+E8(-1)")
    assert L.rank == 12 and L.signature == (2, 10)
    assert builtin("U(2)+A1(-1)").gram == [[0, 2, 0], [2, 0, 0], [0, 0, -2]]
    with pytest.raises(LatticeError):
        builtin("D4")
    with pytest.raises(LatticeError):
        EvenLattice([[1]])  # odd
    with pytest.raises(LatticeError):
        EvenLattice([[2, 1], [1, 2]], signature=(1, 1))


@pytest.mark.parametrize(
    "spec",
    ["U", "A1", "A1(-1)", "E8", "E8(-1)", "U(2)", "A1(3)", "U+A1(-1)", "U+U+E8(-1)", "A1+A1(-1)", "A1(-1)+A1(-1)+U"],
)
def test_milgram_formula(spec):
    L = builtin(spec)
    bp, bm = L.signature
    expected = sqrt_of_integer(L.disc.order) * cyclo_root_of_unity(8, bp - bm)
    assert milgram_sum(L) == expected


def test_milgram_trivial_lattice():
    assert milgram_sum(trivial_lattice()) == CyclotomicNumber.one()


def test_cusp_data_unimodular_split():
    L = builtin("U+U+E8(-1)")
    c = cusp_data(L, (1,) + (0,) * 11, (0, 1) + (0,) * 10)
    assert c.N_e == 1
    assert c.K.signature == (1, 9) and c.K.disc.order == 1
    assert L.b(c.e, c.zeta) == c.N_e


def test_cusp_data_level_two():
    L = builtin("U(2)+U")
    c = cusp_data(L, (1, 0, 0, 0), (0, Fraction(1, 2), 0, 0))
    assert c.N_e == 2
    assert L.b(c.e, c.zeta) == 2
    assert c.K.gram == [[0, 1], [1, 0]]


def test_cusp_data_rejects_bad_input():
    L = builtin("U+A1(-1)")
    with pytest.raises(LatticeError):
        cusp_data(L, (1, 0, 1), (0, 1, 0))  # not isotropic
    with pytest.raises(LatticeError):
        cusp_data(L, (2, 0, 0), (0, Fraction(1, 2), 0))  # not primitive
    with pytest.raises(LatticeError):
        cusp_data(L, (1, 0, 0), (0, 2, 0))  # (e, e') != 1


def test_dual_divisors():
    K = A1(-1)
    # lambda = 3/2 in A1(-1)': dual coordinate -3
    assert dual_divisors(K, (Fraction(3, 2),)) == [1, 3]
    assert dual_divisors(U(), (4, 6)) == [1, 2]
    with pytest.raises(LatticeError):
        dual_divisors(U(), (0, 0))


def test_direct_sum_disc_order():
    L = direct_sum(A1(), A1(-1), U(2))
    assert L.disc.order == 2 * 2 * 4
    assert L.level() == math.lcm(4, 4, 2)
