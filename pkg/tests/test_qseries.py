from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from magnetic_lift.qseries import (
    FourierSeries,
    PrecisionError,
    bol_coefficients,
    classical_generator,
    eval_monomial,
    monomial_weight,
    parse_monomial,
    series_invert,
    series_mul,
)


def sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def euler_delta(nmax):
    """q prod (1 - q^n)^24 by repeated naive multiplication."""
    c = [0] * (nmax + 1)
    c[1] = 1
    for n in range(1, nmax + 1):
        for _ in range(24):
            for i in range(nmax, n - 1, -1):
                c[i] -= c[i - n]
    return c


def naive_divide(num, den, nmax):
    """Power series num/den with den[0] = 1, both starting at q^0."""
    out = []
    for i in range(nmax + 1):
        out.append(num[i] - sum(den[j] * out[i - j] for j in range(1, i + 1)))
    return out


def test_delta_against_euler_product():
    prec = 120
    delta = classical_generator("Delta", prec)
    ref = euler_delta(prec - 1)
    assert [delta[n] for n in range(prec)] == ref
    assert [delta[n] for n in range(1, 5)] == [1, -24, 252, -1472]


def test_eisenstein_against_divisor_sums():
    E4 = classical_generator("E4", 80)
    E6 = classical_generator("E6", 80)
    assert all(E4[n] == 240 * sigma(3, n) for n in range(1, 80))
    assert all(E6[n] == -504 * sigma(5, n) for n in range(1, 80))
    assert E4[0] == E6[0] == 1


def test_j_known_values():
    j = classical_generator("j", 6)
    assert [j[n] for n in range(-1, 5)] == [1, 744, 196884, 21493760, 864299970, 20245856256]


def test_e8_over_delta_against_naive_division():
    nmax = 60
    g = eval_monomial(parse_monomial("E4^2/Delta"), nmax)
    E8 = [1] + [480 * sigma(7, n) for n in range(1, nmax + 2)]
    # E8 / Delta = q^-1 * E8 / (Delta / q)
    dq = euler_delta(nmax + 2)[1:]
    quotient = naive_divide(E8, dq, nmax + 1)
    assert [g[n] for n in range(-1, nmax)] == quotient[: nmax + 1]
    assert [g[n] for n in range(-1, 2)] == [1, 504, 73764]


def test_parse_monomial_forms():
    assert parse_monomial("E4^2/Delta") == {"E4": 2, "Delta": -1}
    assert parse_monomial("E4^2*Delta^-1") == {"E4": 2, "Delta": -1}
    assert monomial_weight({"E4": 2, "Delta": -1}) == -4
    with pytest.raises(ValueError):
        parse_monomial("E5")


ints = st.integers(-50, 50)


@st.composite
def series(draw, denom=1, allow_negative=True):
    lo = draw(st.integers(-3 if allow_negative else 0, 2))
    coeffs = draw(st.lists(ints, min_size=1, max_size=12))
    prec = lo + len(coeffs) + draw(st.integers(0, 3))
    return FourierSeries({lo + i: c for i, c in enumerate(coeffs)}, prec)


def schoolbook(a, b):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return out


@given(series(), series())
def test_kronecker_product_matches_schoolbook(a, b):
    p = series_mul(a, b)
    expected = {e: c for e, c in schoolbook(a, b).items() if e < p.prec and c}
    assert {e: c for e, c in p.items()} == expected


@given(series(), series())
def test_product_precision_rule(a, b):
    # precision of a product is min(Pa + vb, Pb + va)
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).prec == min(a.prec + b.valuation(), b.prec + a.valuation())


@given(series(allow_negative=True))
def test_inverse(a):
    if a.is_zero():
        return
    v = a.valuation()
    if a.prec - v < 2:
        return
    inv = series_invert(a)
    one = a * inv
    assert one.agrees_with(FourierSeries.constant(1, one.prec))


def test_small_product_example():
    a = FourierSeries({-1: 1, 0: 1}, 3)
    b = FourierSeries({1: 1, 0: -1}, 3)
    assert dict((a * b).items()) == {-1: -1, 1: 1}
    assert (a * b).prec == 2
    # a coarser factor cuts the q term
    assert dict((a * b.truncate(2)).items()) == {-1: -1}


def test_precision_errors():
    f = FourierSeries({0: 1}, 5)
    with pytest.raises(PrecisionError) as err:
        f[5]
    assert err.value.required == 5
    with pytest.raises(PrecisionError):
        f.truncate(6)


def test_fractional_grid():
    f = FourierSeries({1: 2, 3: 5}, Fraction(2), denom=4)  # 2 q^(1/4) + 5 q^(3/4)
    assert f[Fraction(1, 4)] == 2 and f[Fraction(1, 2)] == 0
    g = f.with_denom(8)
    assert g == f
    assert (f * f)[Fraction(1, 2)] == 4


@given(series())
def test_json_roundtrip(a):
    assert FourierSeries.from_json(a.to_json()) == a


def test_bol_multiplies_by_powers():
    g = eval_monomial(parse_monomial("E4^2/Delta"), 10)
    b = bol_coefficients(g, 6)
    assert b[-1] == -1 and b[0] == 0
    assert all(b[n] == n**5 * g[n] for n in range(1, 10))
