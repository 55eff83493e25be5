"""Table of closed-form channel parameters against the golden-section oracles.

    python scripts/oracle_grid.py
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from gaussfrontier.region import a_lambda_case2, a_lambda_case3
from gaussfrontier.verify import maximize_f_lambda, minimize_case2_objective


@dataclass
class GridConfig:
    rhos: list[float] = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    lams: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0, 10.0, 100.0])


def rows(cfg: GridConfig):
    for rho in cfg.rhos:
        for lam in cfg.lams:
            a3 = a_lambda_case3(rho, lam)
            e3 = abs(maximize_f_lambda(rho, lam)[0] - a3)
            a2 = a_lambda_case2(rho, lam)
            e2 = abs(minimize_case2_objective(rho, lam)[0] - a2) if lam > 0 else float("nan")
            yield rho, lam, a3, e3, a2, e2


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rho", type=float, nargs="+")
    p.add_argument("--lam", type=float, nargs="+")
    args = p.parse_args()
    cfg = GridConfig()
    if args.rho:
        cfg.rhos = args.rho
    if args.lam:
        cfg.lams = args.lam
    print(f"{'rho':>5} {'lambda':>8} {'a_case3':>12} {'err3':>9} {'a_case2':>12} {'err2':>9}")
    worst = 0.0
    for rho, lam, a3, e3, a2, e2 in rows(cfg):
        print(f"{rho:5.2f} {lam:8.3g} {a3:12.9f} {e3:9.1e} {a2:12.9f} {e2:9.1e}")
        worst = max(worst, e3, 0.0 if e2 != e2 else e2)
    print(f"worst oracle disagreement: {worst:.2e}")


if __name__ == "__main__":
    main()
