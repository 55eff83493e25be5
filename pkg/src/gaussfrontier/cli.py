"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericalError
from .region import Case, frontier_sweep, wyner_ci_from_rho
from .spectrum import (
    DisclosureChannel,
    GaussianModel,
    conditional_spectrum,
    correlation_spectrum,
)
from .verify import build_construction, verify_model

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
LN2 = math.log(2.0)


class InputError(Exception):
    pass


@dataclass(frozen=True)
class SweepConfig:
    case: Case = Case.THREE
    lambda_min: float = 1e-3
    lambda_max: float = 1e3
    steps: int = 61
    spacing: str = "log"
    unit: str = "nats"

    def __post_init__(self):
        if self.steps < 1:
            raise InputError("--steps must be at least 1")
        if self.lambda_min < 0 or self.lambda_max < self.lambda_min:
            raise InputError("need 0 <= lambda-min <= lambda-max")
        if self.spacing not in ("log", "linear"):
            raise InputError("--spacing must be 'log' or 'linear'")
        if self.spacing == "log" and self.lambda_min <= 0:
            raise InputError("log spacing requires lambda-min > 0")
        if self.unit not in ("nats", "bits"):
            raise InputError("--unit must be 'nats' or 'bits'")

    def grid(self) -> list[float]:
        if self.steps == 1:
            return [float(self.lambda_min)]
        if self.spacing == "log":
            g = np.geomspace(self.lambda_min, self.lambda_max, self.steps)
        else:
            g = np.linspace(self.lambda_min, self.lambda_max, self.steps)
        return [float(x) for x in g]


def load_model(path: str) -> GaussianModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    return parse_model(doc)


def parse_model(doc: dict) -> GaussianModel:
    try:
        dims = doc["dims"]
        dx, dy, du = int(dims["x"]), int(dims["y"]), int(dims.get("u", 0))
        cov = np.array(doc["covariance"], dtype=float)
        channel = None
        if doc.get("disclosure_channel") is not None:
            ch = doc["disclosure_channel"]
            gain = np.array(ch["gain"], dtype=float).reshape(-1, dx)
            noise = np.array(ch["noise"], dtype=float).reshape(gain.shape[0], gain.shape[0])
            channel = DisclosureChannel(gain, noise)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model file: {exc}") from exc
    if cov.ndim != 2:
        raise InputError("covariance must be a 2-D array")
    return GaussianModel(dx, dy, du, cov, channel)


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _scale(unit: str) -> float:
    return LN2 if unit == "bits" else 1.0


def _json_value(x: float):
    return "inf" if math.isinf(x) else float(x)


def frontier_csv(model: GaussianModel, config: SweepConfig) -> str:
    points = frontier_sweep(model, config.case, config.grid())
    s = _scale(config.unit)
    r = points[0].a.size if points else 0
    lines = [",".join(["lambda", "R", "R0"] + [f"a_{i + 1}" for i in range(r)])]
    for p in points:
        row = [fmt(p.lam), fmt(p.R / s), fmt(p.R0 / s)] + [fmt(float(x)) for x in p.a]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_frontier(args) -> int:
    config = _sweep_config(args)
    model = load_model(args.model)
    _emit(args.out, frontier_csv(model, config))
    return EXIT_OK


def cmd_wyner(args) -> int:
    model = load_model(args.model)
    rho = correlation_spectrum(model.sigma_x, model.sigma_y, model.sigma_xy).rho
    value = wyner_ci_from_rho(rho) / _scale(args.unit)
    doc = {"wyner_ci": _json_value(value), "unit": args.unit, "rho": [float(x) for x in rho]}
    _emit(args.out, json.dumps(doc) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _sweep_config(args)
    model = load_model(args.model)
    report = verify_model(model, config.grid(), seed=args.seed, n_samples=args.samples)
    _emit(args.out, report.to_json(indent=1) + "\n")
    failed = [c.check for c in report.checks if not c.passed]
    for name in failed:
        print(f"FAILED {name}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def cmd_construct(args) -> int:
    model = load_model(args.model)
    case = Case(args.case)
    if case is Case.ONE:
        raise InputError("construct needs --case case2 or case3")
    if args.lam < 0:
        raise InputError("--lambda must be nonnegative")
    rho = conditional_spectrum(model).rho
    c = build_construction(rho, args.lam, case)
    doc = {
        "case": case.value,
        "lambda": args.lam,
        "rho": c.rho.tolist(),
        "a": c.a.tolist(),
        "b": c.b.tolist(),
        "joint_order": ["x_tilde", "y_tilde", "v"],
        "joint": c.joint.tolist(),
        "degenerate": c.degenerate,
    }
    _emit(args.out, json.dumps(doc) + "\n")
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    return SweepConfig(
        case=Case(getattr(args, "case", Case.THREE.value)),
        lambda_min=args.lambda_min,
        lambda_max=args.lambda_max,
        steps=args.steps,
        spacing=args.spacing,
        unit=getattr(args, "unit", "nats"),
    )


def _emit(out: str | None, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(out, "w", newline="\n") as fh:
        fh.write(text)


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda-min", type=float, default=1e-3)
    p.add_argument("--lambda-max", type=float, default=1e3)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--spacing", choices=["log", "linear"], default="log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussfrontier",
        description="Rate/key frontiers and Wyner common information for Gaussian models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    cases = [c.value for c in Case]

    p = sub.add_parser("frontier", help="sweep the rate/key frontier to CSV")
    p.add_argument("model")
    p.add_argument("--case", choices=cases, default="case3")
    _add_grid(p)
    p.add_argument("--unit", choices=["nats", "bits"], default="nats")
    p.add_argument("--out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("wyner", help="Wyner common information of (X, Y) as JSON")
    p.add_argument("model")
    p.add_argument("--unit", choices=["nats", "bits"], default="nats")
    p.add_argument("--out")
    p.set_defaults(func=cmd_wyner)

    p = sub.add_parser("verify", help="run the verification suite, JSON report")
    p.add_argument("model")
    _add_grid(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="emit the auxiliary construction as JSON")
    p.add_argument("model")
    p.add_argument("--case", choices=["case2", "case3"], default="case3")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
