"""Compare the Fourier expansion of f_{k,d,D} with direct summation over the same classes."""

import argparse
import time
from dataclasses import dataclass, field

import mpmath

from magnetic_lift.elliptic import fkdD_coefficients, fkdD_direct


@dataclass
class FkdDConfig:
    tuples: list[tuple[int, int, int]] = field(default_factory=lambda: [(2, 4, -3), (3, -4, 3), (2, -3, 4)])
    points: list[str] = field(default_factory=lambda: ["0.1+3j", "-0.37+3.5j", "0.45+4.2j"])
    bits: int = 256
    a_max: int = 30
    n_max: int = 40


def main() -> None:
    cfg = FkdDConfig()
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--bits", type=int, default=cfg.bits)
    p.add_argument("--amax", type=int, default=cfg.a_max)
    p.add_argument("--nmax", type=int, default=cfg.n_max)
    a = p.parse_args()
    cfg.bits, cfg.a_max, cfg.n_max = a.bits, a.amax, a.nmax
    for k, d, D in cfg.tuples:
        t = time.perf_counter()
        ex = fkdD_coefficients(k, d, D, cfg.n_max, cfg.bits, a_max=cfg.a_max, strict=False)
        print(f"(k, d, D) = ({k}, {d}, {D}): {len(ex.classes)} classes, {ex.guard_bits} guard bits")
        with mpmath.workprec(cfg.bits):
            for s in cfg.points:
                z = mpmath.mpc(complex(s))
                value, tail = ex.evaluate(z)
                diff = abs(value - fkdD_direct(ex, z))
                print(f"  z = {s}: |fourier - direct| = {mpmath.nstr(diff, 3)}, "
                      f"m-tail <= {mpmath.nstr(tail, 3)}, a-tail <= {mpmath.nstr(ex.class_tail(z.imag), 3)}")
        print(f"  {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
