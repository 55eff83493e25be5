"""Write plot-ready frontier CSVs for scalar pairs over a range of correlations.

    python scripts/frontier_curves.py --out results/curves
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gaussfrontier.cli import SweepConfig, frontier_csv
from gaussfrontier.region import Case, wyner_ci
from gaussfrontier.spectrum import GaussianModel


@dataclass
class CurvesConfig:
    out: Path = Path("results/curves")
    rhos: list[float] = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    cases: list[str] = field(default_factory=lambda: ["case2", "case3"])
    lambda_min: float = 1e-3
    lambda_max: float = 1e3
    steps: int = 61
    unit: str = "nats"


def scalar(rho: float) -> GaussianModel:
    return GaussianModel(1, 1, 0, np.array([[1.0, rho], [rho, 1.0]]))


def run(cfg: CurvesConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    written = []
    for rho in cfg.rhos:
        model = scalar(rho)
        for case in cfg.cases:
            sweep = SweepConfig(Case(case), cfg.lambda_min, cfg.lambda_max, cfg.steps, "log", cfg.unit)
            path = cfg.out / f"{case}_rho{rho:g}.csv"
            path.write_text(frontier_csv(model, sweep))
            written.append(path)
        print(f"rho={rho:g}  wyner_ci={wyner_ci([[1.0]], [[1.0]], [[rho]]):.6f} nats")
    return written


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=CurvesConfig.out)
    p.add_argument("--rho", type=float, nargs="+")
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--unit", choices=["nats", "bits"], default="nats")
    args = p.parse_args()
    cfg = CurvesConfig(out=args.out, steps=args.steps, unit=args.unit)
    if args.rho:
        cfg.rhos = args.rho
    for path in run(cfg):
        print(path)


if __name__ == "__main__":
    main()
