import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from conftest import split_cusp
from oracles import box_cone, brute_coefficient, cone_count_u_e8, random_form, random_rays


from magnetic_lift.arith import CyclotomicNumber, Verdict, bernoulli_polynomial
from magnetic_lift.lattice import builtin
from magnetic_lift.lift import (
    LiftError,
    LiftProblem,
    check_magnetic,
    coefficient,
    cone_vectors,
    constant_term,
    default_w0,
    expand,
    ray_coefficients,
)
from magnetic_lift.qseries import FourierSeries, PrecisionError, eval_monomial, parse_monomial
from magnetic_lift.vvmf import VVModularForm, bol, from_scalar
from magnetic_lift.weil import WeilRep


def problem(spec, form):
    L = builtin(spec)
    return LiftProblem(L, split_cusp(L), form)


def scalar_problem(spec, expr, prec, weight, k_bol=None):
    L = builtin(spec)
    W = WeilRep.from_lattice(L)
    f = from_scalar(eval_monomial(parse_monomial(expr), prec), W, weight)
    if k_bol:
        f = bol(f, k_bol)
    return LiftProblem(L, split_cusp(L), f)


# constant term -------------------------------------------------------------


def test_constant_term_holomorphic_e6():
    P = scalar_problem("U+U+E8(-1)", "E6", 5, 6)
    assert P.kappa == 10
    assert constant_term(P) == Fraction(-1, 264)


def test_constant_term_vanishes_for_bol_image(magnetic_problem):
    assert constant_term(magnetic_problem).is_zero()


def test_constant_term_level_two_hand_sum():
    L = builtin("U(2)+U")
    P0 = problem("U(2)+U", random_form(WeilRep.from_lattice(L), 2, 3, seed=5))
    cusp, f = P0.cusp, P0.form
    assert cusp.N_e == 2 and P0.kappa == 2
    c_half = f.coefficient(L.disc.coset_of([Fraction(x, 2) for x in cusp.e]), 0)
    c_zero = f.coefficient(L.disc.zero(), 0)
    k = 2
    hand = Fraction(0)
    for m, c in ((1, c_half), (2, c_zero)):
        for mp in (1, 2):
            sign = (-1) ** (m * mp)
            hand += 2 ** (k - 1) * c * sign * bernoulli_polynomial(k, Fraction(mp, 2)) / (2 * k)
    assert constant_term(P0) == -hand


# coefficients -------------------------------------------------------------


def test_primitive_collapse(magnetic_problem):
    P = magnetic_problem
    for z in random_rays(P, 25, seed=1, lmax=1):
        if math.gcd(*z) == 1:
            assert coefficient(P, z) == P.form.coefficient((), P.q(z))


def test_ray_hand_formula(magnetic_problem, g_series):
    P = magnetic_problem
    lam0 = (1, 1) + (0,) * 8
    assert P.q(lam0) == 1
    c = lambda n: n**5 * g_series[n]
    a = ray_coefficients(P, lam0, 6)
    assert a[0] == c(1)
    assert a[1] == 2**9 * c(1) + c(4)
    for l in range(1, 7):
        assert a[l - 1] == sum(m**9 * c(l * l // (m * m)) for m in range(1, l + 1) if l % m == 0)


def test_isotropic_coefficient_of_bol_image(magnetic_problem):
    assert coefficient(magnetic_problem, (3, 0) + (0,) * 8).is_zero()


@pytest.mark.parametrize(
    "spec,weight,seed",
    [
        ("U+U", 2, 11),
        ("U+U+A1(-1)+A1(-1)", 3, 12),
        ("U(2)+U", 2, 13),
        ("U(3)+U", 2, 14),
        ("U(2)+U+A1(-1)", Fraction(5, 2), 15),
        ("U+U+A1(-1)", Fraction(5, 2), 16),
    ],
)
def test_divisor_sum_oracle_synthetic(spec, weight, seed):
    L = builtin(spec)
    f = random_form(WeilRep.from_lattice(L), weight, 40, seed=seed, check=False)
    P = LiftProblem(L, split_cusp(L), f)
    for z in random_rays(P, 12, seed=seed):
        assert coefficient(P, z) == brute_coefficient(P, z), z


def test_divisor_sum_oracle_unimodular(magnetic_problem):
    for z in random_rays(magnetic_problem, 10, seed=3):
        assert coefficient(magnetic_problem, z) == brute_coefficient(magnetic_problem, z)


def test_coefficient_errors(magnetic_problem):
    P = magnetic_problem
    with pytest.raises(LiftError):
        coefficient(P, (0,) * 10)
    with pytest.raises(LiftError):
        coefficient(P, (0, 0, 1) + (0,) * 7)  # q < 0
    with pytest.raises(PrecisionError) as exc:
        coefficient(P, (60, 60) + (0,) * 8)
    assert exc.value.required == 3600


def test_additivity():
    L = builtin("U+U")
    W = WeilRep.from_lattice(L)
    f1 = bol(from_scalar(eval_monomial(parse_monomial("E4^2/Delta"), 30), W, -4), 6)
    f2 = from_scalar(eval_monomial(parse_monomial("E6"), 30), W, 6)
    P1, P2, P12 = (LiftProblem(L, split_cusp(L), f) for f in (f1, f2, f1 + f2))
    e1, e2, e12 = (expand(P, (1, 1), 6) for P in (P1, P2, P12))
    assert e12.constant_term == e1.constant_term + e2.constant_term
    assert e12.coefficients.keys() == e1.coefficients.keys()
    for z, v in e12.coefficients.items():
        assert v == e1[z] + e2[z]


# enumeration -------------------------------------------------------------


@pytest.mark.parametrize("w,H", [((1, 1), 1), ((1, 1), 2), ((1, 1), 3), ((1, 2), 4), ((2, 3), 6), ((3, 2), 5)])
def test_cone_count_theta_oracle(w, H):
    K = builtin("U+E8(-1)")
    assert len(cone_vectors(K, w + (0,) * 8, H)) == cone_count_u_e8(w, H)


@pytest.mark.parametrize("spec,w0,H", [("U", (1, 1), 7), ("U", (1, 3), 9), ("U+A1(-1)", (1, 1, 0), 4), ("U(2)+A1(-1)", (1, 2, 1), 5)])
def test_cone_box_oracle(spec, w0, H):
    K = builtin(spec)
    got = sorted(cone_vectors(K, w0, H))
    r = 4 * H
    want = box_cone(K, w0, H, r)
    assert got == want
    assert all(max(abs(t) for t in z) < r for z in got)


def test_cone_rejects_outside_w0():
    with pytest.raises(LiftError):
        cone_vectors(builtin("U"), (1, -1), 3)


def test_default_w0():
    assert default_w0(builtin("U+E8(-1)")) == (1, 1) + (0,) * 8
    K = builtin("U+A1(-1)")
    w = default_w0(K)
    assert K.q(w) > 0


def test_expand_small_height_is_constant_only():
    P = scalar_problem("U+U", "E6", 5, 6)
    ex = expand(P, (1, 1), Fraction(1, 2))
    assert ex.coefficients == {} and ex.constant_term == constant_term(P)


def test_expand_extends_without_changing(magnetic_problem):
    w0 = (1, 1) + (0,) * 8
    small = expand(magnetic_problem, w0, 2)
    big = expand(magnetic_problem, w0, 3)
    assert len(small.coefficients) == 245
    assert all(big[z] == v for z, v in small.coefficients.items())
    assert len(big.coefficients) > len(small.coefficients)
    assert all(magnetic_problem.q(z) >= 0 and 0 < sum(a * b for a, b in zip(z, w0)) <= 3 for z in big.coefficients)
    assert small.to_json() == expand(magnetic_problem, w0, 2).to_json()


def test_expansion_cyclotomic_integrality_level_five():
    # real cyclotomic values in Q(zeta_5) need not be rational
    L = builtin("U(5)+U")
    P = LiftProblem(L, split_cusp(L), random_form(WeilRep.from_lattice(L), 2, 30, seed=8))
    ex = expand(P, (1, 1), 8)
    assert ex.coefficients
    assert all(v.is_algebraic_integer() for v in ex.coefficients.values())
    assert any(v.order > 1 and not v.is_rational() for v in ex.coefficients.values())


# magneticity -------------------------------------------------------------


def test_check_magnetic_passes(magnetic_problem):
    for lam0 in [(1, 1) + (0,) * 8, (1, 2) + (0,) * 8, (1, 3) + (0,) * 8, (2, 3, 1) + (0,) * 7]:
        rep = check_magnetic(magnetic_problem, lam0, 12, 6)
        assert rep.passed and rep.hypotheses_certified
        assert [e.ell for e in rep.entries] == list(range(1, 13))


@given(st.integers(0, 10**6))
def test_certified_hypotheses_imply_pass_on_random_rays(seed):
    # property: certified hypotheses imply every verdict passes
    L = builtin("U+U")
    P = LiftProblem(L, split_cusp(L), _bol_uu())
    rng = random.Random(seed)
    a, b = rng.randint(1, 6), rng.randint(1, 6)
    g = math.gcd(a, b)
    rep = check_magnetic(P, (a // g, b // g), 4, 6)
    assert rep.passed


_BOL = {}


def _bol_uu():
    if "f" not in _BOL:
        W = WeilRep.from_lattice(builtin("U+U"))
        _BOL["f"] = bol(from_scalar(eval_monomial(parse_monomial("E4^2/Delta"), 600), W, -4), 6)
    return _BOL["f"]


def test_check_magnetic_detects_corruption(magnetic_problem):
    P = magnetic_problem
    f = P.form
    comp = f.components[()]
    bad = dict(comp.coeffs)
    bad[4] += 1
    g = VVModularForm(f.weight, f.rep, {(): FourierSeries(bad, comp.prec)}, f.prec)
    rep = check_magnetic(LiftProblem(P.lattice, P.cusp, g), (1, 1) + (0,) * 8, 4, 6)
    assert not rep.passed
    assert [e.ell for e in rep.failures] == [2, 4]
    assert rep.hypotheses["input_divisibility_certified"] is False


def test_check_magnetic_gates(magnetic_problem):
    P = magnetic_problem
    with pytest.raises(LiftError):
        check_magnetic(P, (1, 1) + (0,) * 8, 3, 11)
    with pytest.raises(LiftError):
        check_magnetic(P, (1, 1) + (0,) * 8, 3, 1)
    with pytest.raises(LiftError):
        check_magnetic(P, (2, 2) + (0,) * 8, 3, 6)  # not primitive
    with pytest.raises(PrecisionError) as exc:
        check_magnetic(P, (1, 3) + (0,) * 8, 31, 6)
    assert exc.value.required == 3 * 31**2
    L = builtin("U+U+A1(-1)")
    Q = LiftProblem(L, split_cusp(L), random_form(WeilRep.from_lattice(L), Fraction(5, 2), 10, seed=2, check=False))
    assert Q.q((1, 1, 1)) == Fraction(3, 4)
    with pytest.raises(LiftError):
        check_magnetic(Q, (1, 1, 1), 2, 2, N=1)
    assert check_magnetic(Q, (1, 1, 1), 2, 2, certify_input=False).N == 4


def test_check_magnetic_uncertified_flag():
    P = scalar_problem("U+U+E8(-1)", "E6", 40, 6)
    rep = check_magnetic(P, (1, 1) + (0,) * 8, 3, 6, certify_input=False, cusp_forms_trivial=True)
    assert rep.hypotheses["input_divisibility_certified"] is None
    assert rep.hypotheses["cusp_forms_trivial_asserted"] is True
    assert not rep.hypotheses_certified
    rep2 = check_magnetic(P, (1, 1) + (0,) * 8, 3, 6)
    assert rep2.hypotheses["input_divisibility_certified"] is False


def test_check_magnetic_modulus_zero(magnetic_problem):
    rep = check_magnetic(magnetic_problem, (1, 0) + (0,) * 8, 5, 6)
    assert rep.modulus_base == 0
    assert all(e.kind == "modulus-zero" and e.verdict is Verdict.PASS for e in rep.entries)
    P = scalar_problem("U+U+E8(-1)", "E6", 40, 6)
    rep = check_magnetic(P, (1, 0) + (0,) * 8, 2, 6, certify_input=False)
    assert not rep.passed  # isotropic coefficients of E6 are sums of its constant term


def test_problem_validation(ii_2_10):
    W = WeilRep.from_lattice(ii_2_10)
    g = from_scalar(eval_monomial(parse_monomial("E4^2/Delta"), 5), W, -4)
    with pytest.raises(LiftError):  # kappa = 0
        LiftProblem(ii_2_10, split_cusp(ii_2_10), g)
    L = builtin("U+U")
    with pytest.raises(LiftError):  # wrong representation
        LiftProblem(L, split_cusp(L), bol(g, 6))


def test_report_json(magnetic_problem):
    rep = check_magnetic(magnetic_problem, (1, 1) + (0,) * 8, 3, 6)
    js = rep.to_json()
    assert js["passed"] is True and js["modulus_base"] == 1
    assert [e["modulus"] for e in js["entries"]] == [1, 32, 243]
    assert isinstance(CyclotomicNumber.from_json(js["entries"][0]["value"]), CyclotomicNumber)
