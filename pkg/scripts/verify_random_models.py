"""Run the full verification suite on seeded random models and summarize failures.

    python scripts/verify_random_models.py --models 20 --samples 20000
"""
from __future__ import annotations

import argparse
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from gaussfrontier.spectrum import GaussianModel
from gaussfrontier.verify import verify_model


@dataclass
class RunConfig:
    models: int = 20
    max_block: int = 3
    seed: int = 0
    samples: int = 20_000
    steps: int = 7


def random_model(rng: np.random.Generator, max_block: int) -> GaussianModel:
    dx, dy = (int(d) for d in rng.integers(1, max_block + 1, size=2))
    du = int(rng.integers(0, max_block))
    n = dx + dy + du
    f = rng.normal(size=(n, n))
    return GaussianModel(dx, dy, du, f @ f.T)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(RunConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = RunConfig(**vars(p.parse_args()))

    rng = np.random.default_rng(cfg.seed)
    grid = np.geomspace(1e-3, 1e3, cfg.steps)
    failures: Counter[str] = Counter()
    t0 = time.perf_counter()
    for k in range(cfg.models):
        model = random_model(rng, cfg.max_block)
        report = verify_model(model, grid, seed=k, n_samples=cfg.samples)
        bad = [c.check.split("[")[0] for c in report.checks if not c.passed]
        failures.update(bad)
        status = "ok" if not bad else f"{len(bad)} failed"
        print(f"model {k:3d}  dims=({model.dim_x},{model.dim_y},{model.dim_u})  "
              f"{len(report.checks)} checks  {status}")
    print(f"{cfg.models} models in {time.perf_counter() - t0:.1f}s")
    for name, count in failures.most_common():
        print(f"  {name}: {count}")


if __name__ == "__main__":
    main()
