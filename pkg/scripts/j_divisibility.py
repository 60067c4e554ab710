"""Tabulate how the j-coefficients fail the printed prime-power divisibility claim.

Also searches, per prime p, for the largest offset t such that
p^(slope * v_p(m) + t) | a_j(m) holds for every m up to the bound with p | m.
"""

import argparse
from collections import Counter
from dataclasses import dataclass

from magnetic_lift.arith import valuation
from magnetic_lift.elliptic import j_divisibility_report
from magnetic_lift.qseries import classical_generator


@dataclass
class JConfig:
    bound: int = 1000
    slopes: tuple = ((2, 3), (3, 2), (5, 1), (7, 1))


def best_offsets(cfg: JConfig) -> dict[int, int]:
    j = classical_generator("j", cfg.bound + 1)
    out = {}
    for p, slope in cfg.slopes:
        out[p] = min(valuation(int(j[m]), p) - slope * valuation(m, p) for m in range(p, cfg.bound + 1, p))
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--bound", type=int, default=JConfig.bound)
    cfg = JConfig(p.parse_args().bound)
    rep = j_divisibility_report(cfg.bound)
    print(f"{len(rep.failures)} of {cfg.bound} indices fail the claim as printed")
    pattern = Counter(tuple(sorted(e.shortfall)) for e in rep.failures)
    for primes, count in pattern.most_common():
        print(f"  short at {primes}: {count}")
    for e in rep.failures[:5]:
        print(f"  m = {e.m}: a_j = {e.coefficient}, short by {e.shortfall}")
    print("largest offsets t with p^(slope*v_p(m) + t) | a_j(m) for all m divisible by p:")
    for prime, t in best_offsets(cfg).items():
        slope = dict(cfg.slopes)[prime]
        print(f"  p = {prime}: {slope}*v + {t}")


if __name__ == "__main__":
    main()
