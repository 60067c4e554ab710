"""Lift D^(k-1) of a scalar weakly holomorphic form and certify magneticity along rays.

    python scripts/run_magnetic_lift.py --lmax 30 --height 6
"""

import argparse
import time
from dataclasses import dataclass, field

from magnetic_lift.lattice import builtin, cusp_data
from magnetic_lift.lift import LiftProblem, check_magnetic, expand
from magnetic_lift.qseries import eval_monomial, monomial_weight, parse_monomial
from magnetic_lift.vvmf import bol, from_scalar
from magnetic_lift.weil import WeilRep


@dataclass
class LiftRunConfig:
    lattice: str = "U+U+E8(-1)"
    expr: str = "E4^2/Delta"
    bol_k: int = 6
    s: int = 6
    lmax: int = 30
    norms: list[int] = field(default_factory=lambda: [1, 2, 3])
    w0: tuple[int, ...] = (2, 3, 0, 0, 0, 0, 0, 0, 0, 0)
    height: int = 10


def run(cfg: LiftRunConfig) -> None:
    L = builtin(cfg.lattice)
    n = L.rank
    cusp = cusp_data(L, (1,) + (0,) * (n - 1), (0, 1) + (0,) * (n - 2))
    prec = max(cfg.norms) * cfg.lmax**2 + 1
    mono = parse_monomial(cfg.expr)
    t = time.perf_counter()
    g = eval_monomial(mono, prec)
    f = bol(from_scalar(g, WeilRep.from_lattice(L), monomial_weight(mono)), cfg.bol_k)
    P = LiftProblem(L, cusp, f)
    print(f"{cfg.expr} to precision {prec} in {time.perf_counter() - t:.1f}s; kappa = {P.kappa}")
    for q in cfg.norms:
        lam0 = (1, q) + (0,) * (P.K.rank - 2)
        t = time.perf_counter()
        rep = check_magnetic(P, lam0, cfg.lmax, cfg.s)
        worst = min((e.ell for e in rep.failures), default=None)
        print(f"q(lambda0) = {q}: {'pass' if rep.passed else f'FAIL from l = {worst}'}"
              f"  ({len(rep.entries)} rays, {time.perf_counter() - t:.2f}s)")
    if cfg.height:
        t = time.perf_counter()
        ex = expand(P, cfg.w0, cfg.height)
        bad = [z for z, v in ex.coefficients.items() if not v.is_algebraic_integer()]
        print(f"height {cfg.height}: {len(ex.coefficients)} coefficients, {len(bad)} non-integral"
              f"  ({time.perf_counter() - t:.1f}s)")


def main() -> None:
    cfg = LiftRunConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lattice", default=cfg.lattice)
    p.add_argument("--expr", default=cfg.expr)
    p.add_argument("--bol-k", type=int, default=cfg.bol_k)
    p.add_argument("--s", type=int, default=cfg.s)
    p.add_argument("--lmax", type=int, default=cfg.lmax)
    p.add_argument("--height", type=int, default=cfg.height)
    a = p.parse_args()
    run(LiftRunConfig(a.lattice, a.expr, a.bol_k, a.s, a.lmax, cfg.norms, cfg.w0, a.height))


if __name__ == "__main__":
    main()
