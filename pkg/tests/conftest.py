import pytest
from hypothesis import settings

from magnetic_lift.lattice import builtin, cusp_data
from magnetic_lift.lift import LiftProblem
from magnetic_lift.qseries import eval_monomial, parse_monomial
from magnetic_lift.vvmf import bol, from_scalar
from magnetic_lift.weil import WeilRep

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def split_cusp(L):
    """e, e' spanning the leading U(c) summand."""
    n = L.rank
    c = L.gram[0][1]
    from fractions import Fraction

    return cusp_data(L, (1,) + (0,) * (n - 1), (0, Fraction(1, c)) + (0,) * (n - 2))


@pytest.fixture(scope="session")
def ii_2_10():
    return builtin("U+U+E8(-1)")


@pytest.fixture(scope="session")
def g_series():
    """E4^2/Delta to precision 2701 (needed for q(lambda0) = 3, l = 30)."""
    return eval_monomial(parse_monomial("E4^2/Delta"), 2701)


@pytest.fixture(scope="session")
def magnetic_problem(ii_2_10, g_series):
    f = bol(from_scalar(g_series, WeilRep.from_lattice(ii_2_10), -4), 6)
    return LiftProblem(ii_2_10, split_cusp(ii_2_10), f)


_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = mark.args
    detail = ""
    if rep.failed:
        detail = str(getattr(rep.longrepr, "reprcrash", None) and rep.longrepr.reprcrash.message or "").splitlines()[0][:160]
    _ACCEPTANCE[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        line = f"criterion {number}: {status}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
