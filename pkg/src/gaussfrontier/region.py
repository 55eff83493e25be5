"""
Closed-form rate/key frontiers for Gaussian secure source coding.

Three disclosure settings are supported:

* ``Case.ONE``:   arbitrary linear-Gaussian disclosure of X, nothing of Y.
  The frontier is a single corner point, ``R = I(X; U, Y)``,
  ``R0 = I(D_x; Y | U)``.
* ``Case.TWO``:   nothing of X disclosed, Y disclosed.
* ``Case.THREE``: both X and Y disclosed.

Cases two and three are traced by minimizing ``lam * R + R0``; each conditional
canonical component ``i`` gets a channel parameter ``a_i`` between
``rho_i**2`` and 1 (``a_i = E[E[X_i|V]^2]``), and ``b_i = rho_i**2 / a_i``.

Rates are in nats. ``math.inf`` marks unbounded rates.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union

import numpy as np

from . import matgauss as mg
from .spectrum import (
    DisclosureChannel,
    GaussianModel,
    conditional_spectra,
    correlation_spectrum,
)

INF = math.inf


class Case(str, Enum):
    ONE = "case1"
    TWO = "case2"
    THREE = "case3"


# Case one disclosure of X: "none", "x", or an explicit linear channel.
Disclosure = Union[str, DisclosureChannel, None]


@dataclass(frozen=True)
class FrontierPoint:
    lam: float
    R: float
    R0: float
    a: np.ndarray


def a_lambda_case3(rho: float, lam: float) -> float:
    """Optimal ``a`` when both X and Y are disclosed."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if rho == 0.0 or rho == 1.0:
        return float(rho)
    if lam == 0.0:
        return float(rho)
    a = (lam * rho**2 + rho * math.sqrt(lam**2 * rho**2 + 4.0 * (lam + 1.0))) / (2.0 * (lam + 1.0))
    return min(max(a, rho**2), 1.0)


def a_lambda_case2(rho: float, lam: float) -> float:
    """Optimal ``a`` when only Y is disclosed. ``lam == 0`` returns the limit 1."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    r2 = rho * rho
    if r2 == 0.0:
        return 0.0
    if rho == 1.0 or lam == 0.0:
        return 1.0
    root = math.sqrt(4.0 * lam * r2 + (1.0 - lam) ** 2 * r2 * r2)
    if lam < 1.0:
        # Same root of lam*a^2 + (1-lam)*rho^2*a - rho^2, without cancellation.
        a = 2.0 * r2 / ((1.0 - lam) * r2 + root)
    else:
        a = ((lam - 1.0) * r2 + root) / (2.0 * lam)
    return min(max(a, r2), 1.0)


def neg_half_log1m(x: float) -> float:
    """``-0.5 * log(1 - x)`` with ``x -> 1`` mapped to infinity."""
    if x >= 1.0:
        return INF
    return -0.5 * math.log1p(-x)


def _component_terms(rho: float, a: float, case: Case) -> tuple[float, float]:
    """(rate, key) contributions of one conditional component given ``a``."""
    if rho * rho == 0.0:
        return 0.0, 0.0
    b = rho * rho / a
    rate = neg_half_log1m(a)
    if case is Case.TWO:
        return rate, neg_half_log1m(b)
    if rho >= 1.0 or a >= 1.0 or b >= 1.0:
        return rate, INF
    key = 0.5 * (math.log1p(-rho * rho) - math.log1p(-a) - math.log1p(-b))
    return rate, max(key, 0.0)


def frontier_from_spectra(rho_xu, rho_xy_u, case: Case, lam: float) -> FrontierPoint:
    """Frontier point for cases two and three from precomputed spectra."""
    case = Case(case)
    if case is Case.ONE:
        raise ValueError("case one needs the full model; use frontier_point")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    a_fn = a_lambda_case3 if case is Case.THREE else a_lambda_case2
    base = sum(neg_half_log1m(float(r) ** 2) for r in np.asarray(rho_xu).ravel())
    a = np.array([a_fn(float(r), lam) for r in np.asarray(rho_xy_u).ravel()])
    rate, key = base, 0.0
    for r, ai in zip(np.asarray(rho_xy_u).ravel(), a):
        dr, dk = _component_terms(float(r), float(ai), case)
        rate += dr
        key += dk
    return FrontierPoint(float(lam), rate, key, a)


def _case_one(model: GaussianModel, lam: float, dx: Disclosure) -> FrontierPoint:
    rate = mg.gaussian_mi_det(model.joint, model.ix, np.concatenate([model.iu, model.iy]))
    _, rho_xy_u = conditional_spectra(model)
    a = rho_xy_u**2
    if dx is None:
        dx = model.disclosure_channel if model.disclosure_channel is not None else "x"
    if isinstance(dx, str):
        if dx == "none":
            return FrontierPoint(float(lam), rate, 0.0, a)
        if dx != "x":
            raise ValueError(f"unknown disclosure {dx!r}; expected 'none', 'x' or a channel")
        key = mg.gaussian_mi_det(model.joint, model.ix, model.iy, given=model.iu)
    else:
        aug, idx = model.with_disclosure(dx)
        key = mg.gaussian_mi_det(aug, idx, model.iy, given=model.iu)
    return FrontierPoint(float(lam), rate, key, a)


def frontier_point(model: GaussianModel, case: Case, lam: float,
                   dx: Disclosure = None) -> FrontierPoint:
    """Minimal (R, R0) on the supporting line of weight ``lam``.

    ``dx`` only matters for case one: ``"none"``, ``"x"`` or a
    ``DisclosureChannel``; it defaults to the model's channel, else X itself.
    In case one ``lam`` is ignored and ``a`` reports ``rho**2`` (V = Y).
    """
    case = Case(case)
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if case is Case.ONE:
        return _case_one(model, lam, dx)
    rho_xu, rho_xy_u = conditional_spectra(model)
    return frontier_from_spectra(rho_xu, rho_xy_u, case, lam)


def frontier_sweep(model: GaussianModel, case: Case, lambda_grid: Iterable[float],
                   dx: Disclosure = None, workers: Optional[int] = None) -> list[FrontierPoint]:
    """One frontier point per grid value, in grid order."""
    grid = [float(x) for x in lambda_grid]
    if any(x < 0 for x in grid):
        raise ValueError("lambda grid must be nonnegative")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be sorted ascending")
    if not grid:
        return []
    case = Case(case)
    if case is Case.ONE:
        point = _case_one(model, grid[0], dx)
        return [FrontierPoint(x, point.R, point.R0, point.a) for x in grid]
    rho_xu, rho_xy_u = conditional_spectra(model)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda x: frontier_from_spectra(rho_xu, rho_xy_u, case, x), grid))
    return [frontier_from_spectra(rho_xu, rho_xy_u, case, x) for x in grid]


def wyner_ci_from_rho(rho) -> float:
    total = 0.0
    for r in np.asarray(rho, dtype=float).ravel():
        if r >= 1.0:
            return INF
        total += 0.5 * (math.log1p(r) - math.log1p(-r))
    return total


def wyner_ci(sigma_x, sigma_y, sigma_xy) -> float:
    """Wyner's common information of a Gaussian pair, in nats."""
    return wyner_ci_from_rho(correlation_spectrum(sigma_x, sigma_y, sigma_xy).rho)


def objective_value(rho: float, a: float, lam: float) -> float:
    """Per-component ``lam * I(X;V) + I(X,Y;V)`` for channel parameter ``a``.

    Infinite for ``a <= rho**2`` (except the independent case ``rho == 0``)
    and for ``a == 1``.
    """
    if a > 1.0:
        raise ValueError(f"a must not exceed 1, got {a}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    r2 = rho * rho
    if rho == 0.0:
        return (lam + 1.0) * neg_half_log1m(a) if a >= 0 else INF
    if a <= r2 or a >= 1.0:
        return INF
    return 0.5 * (math.log(a) - (lam + 1.0) * math.log1p(-a) - math.log(a - r2)) \
        + 0.5 * math.log1p(-r2)
