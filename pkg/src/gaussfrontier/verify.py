"""
Independent numerical checks of the closed-form frontier.

The oracles here never call the closed-form ``a_lambda_*`` functions to
produce their answers; they only compare against them:

* golden-section search over the converse objective ``f_lam`` (both
  disclosed) and over the case-two objective,
* an explicit Gaussian auxiliary ``V`` realizing the achievability scheme,
  with Markov, Cauchy-Schwarz and rate-distortion chain checks,
* determinant mutual information on the full (X, Y, U, V) covariance,
* Monte Carlo sampling of the construction.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import matgauss as mg
from .errors import NumericalError
from .region import (
    Case,
    a_lambda_case2,
    a_lambda_case3,
    frontier_point,
    neg_half_log1m,
    objective_value,
)
from .spectrum import (
    GaussianModel,
    conditional_spectrum,
    correlation_spectrum,
    mmse_estimate,
)

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
SCAN_POINTS = 1000


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-9, maximize: bool = False, max_iter: int = 200):
    """Golden-section search for the extremum of a unimodal ``f`` on ``[lo, hi]``.

    Only interior points are evaluated. Returns ``(x, f(x))``.
    """
    sign = -1.0 if maximize else 1.0

    def g(x):
        return sign * f(x)

    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - INVPHI * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + INVPHI * (hi - lo)
            g2 = g(x2)
    else:
        raise NumericalError("golden-section search hit its iteration cap")
    x = x1 if g1 <= g2 else x2
    return x, sign * min(g1, g2)


def _bracket(values: np.ndarray, grid: np.ndarray, what: str) -> tuple[float, float]:
    """Bracket around the grid maximum; fail if the scan is not unimodal."""
    d = np.sign(np.diff(values))
    d = d[d != 0]
    if d.size and np.count_nonzero(np.diff(d) != 0) > 1:
        raise NumericalError(f"{what} is not unimodal on the scan grid")
    k = int(np.argmax(values))
    return grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]


def f_lambda(x: float, rho: float, lam: float) -> float:
    """``(1 - x)^(lam+1) (x - rho^2) / x``; ``x = 1 - D_x`` is the explained variance."""
    return (1.0 - x) ** (lam + 1.0) * (x - rho * rho) / x


def log_f_lambda(x: float, rho: float, lam: float) -> float:
    """``log f_lambda``; same maximizer, but no underflow of ``(1 - x)^(lam+1)``."""
    if not rho * rho < x < 1.0:
        return -math.inf
    return (lam + 1.0) * math.log1p(-x) + math.log(x - rho * rho) - math.log(x)


def maximize_f_lambda(rho: float, lam: float, tol: float = 1e-9) -> tuple[float, float]:
    """Golden-section argmax of ``f_lambda`` over ``[rho^2, 1]``; returns ``(x, f(x))``."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    lo, hi = rho * rho, 1.0
    grid = np.linspace(lo, hi, SCAN_POINTS)[1:-1]
    vals = np.array([log_f_lambda(x, rho, lam) for x in grid])
    blo, bhi = _bracket(vals, grid, "f_lambda")
    blo, bhi = (lo if blo == grid[0] else blo), (hi if bhi == grid[-1] else bhi)
    x, _ = golden_section(lambda t: log_f_lambda(t, rho, lam), blo, bhi, tol, maximize=True)
    return x, f_lambda(x, rho, lam)


def case2_objective(a: float, rho: float, lam: float) -> float:
    """``lam * I(X;V) + I(Y;V)`` for one component, as a function of ``a``."""
    b = rho * rho / a
    if a >= 1.0 or b >= 1.0:
        return math.inf
    return -0.5 * lam * math.log1p(-a) - 0.5 * math.log1p(-b)


def minimize_case2_objective(rho: float, lam: float, tol: float = 1e-9) -> tuple[float, float]:
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    lo, hi = rho * rho, 1.0
    grid = np.linspace(lo, hi, SCAN_POINTS)
    vals = np.array([-case2_objective(x, rho, lam) if lo < x < hi else -math.inf for x in grid])
    blo, bhi = _bracket(vals, grid, "case-two objective")
    return golden_section(lambda x: case2_objective(x, rho, lam), blo, bhi, tol)


@dataclass(frozen=True)
class AuxConstruction:
    """Explicit ``X~ = sqrt(A) V + sqrt(I-A) Z1``, ``Y~ = sqrt(B) V + sqrt(I-B) Z2``.

    ``joint`` is the covariance over (X~, Y~, V), each block of size ``r``;
    ``mixing`` maps the standard normal (V, Z1, Z2) to (X~, Y~, V).
    """

    rho: np.ndarray
    a: np.ndarray
    b: np.ndarray
    joint: np.ndarray
    mixing: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.rho.size

    @property
    def degenerate(self) -> bool:
        return bool(np.any(self.rho >= 1.0))

    @property
    def ix(self):
        return np.arange(self.r)

    @property
    def iy(self):
        return np.arange(self.r, 2 * self.r)

    @property
    def iv(self):
        return np.arange(2 * self.r, 3 * self.r)


def construction_from_params(rho, a, b) -> AuxConstruction:
    """Construction from explicit channel parameters (need not be optimal)."""
    rho = np.asarray(rho, dtype=float).ravel()
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if np.any((a < 0) | (a > 1) | (b < 0) | (b > 1)):
        raise ValueError("channel parameters must lie in [0, 1]")
    r = rho.size
    eye = np.eye(r)
    zero = np.zeros((r, r))
    mixing = np.block([
        [np.diag(np.sqrt(a)), np.diag(np.sqrt(1.0 - a)), zero],
        [np.diag(np.sqrt(b)), zero, np.diag(np.sqrt(1.0 - b))],
        [eye, zero, zero],
    ])
    joint = mixing @ mixing.T
    return AuxConstruction(rho, a, b, 0.5 * (joint + joint.T), mixing)


def build_construction(rho, lam: float, case: Case = Case.THREE) -> AuxConstruction:
    """Achievability construction at weight ``lam`` for case two or three."""
    case = Case(case)
    if case is Case.ONE:
        raise ValueError("case one has no auxiliary construction")
    rho = np.asarray(rho, dtype=float).ravel()
    a_fn = a_lambda_case3 if case is Case.THREE else a_lambda_case2
    a = np.array([a_fn(float(r), lam) for r in rho])
    b = np.array([r * r / ai if ai > 0 else 0.0 for r, ai in zip(rho, a)])
    return construction_from_params(rho, a, np.minimum(b, 1.0))


def markov_residual(c: AuxConstruction) -> float:
    """``max |S_xy - S_xv S_v^+ S_vy|`` for the construction."""
    j = c.joint
    s_xv = j[np.ix_(c.ix, c.iv)]
    s_vy = j[np.ix_(c.iv, c.iy)]
    pred = s_xv @ mg.pinv_sym(j[np.ix_(c.iv, c.iv)]) @ s_vy
    return float(np.abs(j[np.ix_(c.ix, c.iy)] - pred).max(initial=0.0))


def mmse_distortions(c: AuxConstruction) -> tuple[np.ndarray, np.ndarray]:
    """Per-component ``E[(X_i - E[X_i|V])^2]`` and the same for Y, from the joint."""
    d_x = np.diag(mg.schur_conditional(c.joint, c.ix, c.iv))
    d_y = np.diag(mg.schur_conditional(c.joint, c.iy, c.iv))
    return d_x.copy(), d_y.copy()


def converse_bound(rho, d_x, d_y, lam: float) -> float:
    """Lower bound ``0.5 * sum log((1 - rho^2) / (D_x^(lam+1) D_y))``."""
    total = 0.0
    for r, dx, dy in zip(np.ravel(rho), np.ravel(d_x), np.ravel(d_y)):
        if dx <= 0.0 or dy <= 0.0:
            return math.inf
        total += 0.5 * (math.log1p(-r * r) - (lam + 1.0) * math.log(dx) - math.log(dy))
    return total


def construction_objective(c: AuxConstruction, lam: float, case: Case = Case.THREE) -> float:
    """``lam * I(X~;V) + I(X~,Y~;V)`` (case three) or ``+ I(Y~;V)`` (case two) by determinants."""
    case = Case(case)
    i_xv = mg.gaussian_mi_det(c.joint, c.ix, c.iv)
    if case is Case.THREE:
        second = mg.gaussian_mi_det(c.joint, np.concatenate([c.ix, c.iy]), c.iv)
    else:
        second = mg.gaussian_mi_det(c.joint, c.iy, c.iv)
    if lam == 0.0:
        return second
    return lam * i_xv + second


@dataclass(frozen=True)
class Check:
    check: str
    residual: float
    tolerance: float
    flags: tuple = ()

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "residual": _json_float(self.residual),
            "tolerance": _json_float(self.tolerance),
            "pass": self.passed,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(x)


@dataclass
class VerificationReport:
    fingerprint: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def extend(self, checks: Iterable[Check]) -> None:
        self.checks.extend(checks)

    def to_json(self, **kwargs) -> str:
        return json.dumps([c.to_dict() for c in self.checks], **kwargs)


def value_residual(x: float, y: float) -> float:
    """``|x - y|`` scaled by ``max(1, |x|)``; matched infinities give 0."""
    if math.isinf(x) or math.isinf(y):
        return 0.0 if x == y else math.inf
    return abs(x - y) / max(1.0, abs(x))


def check_lemma1(c: AuxConstruction, tol: float = 1e-10) -> list[Check]:
    """Cauchy-Schwarz bound ``rho^2 <= (1 - D_x)(1 - D_y)`` and its tightness.

    ``lemma1_bound`` passes when the bound holds; ``lemma1_equality`` passes
    when it holds with equality, as it must for the optimal construction.
    """
    d_x, d_y = mmse_distortions(c)
    prod = (1.0 - d_x) * (1.0 - d_y)
    gap = prod - c.rho**2
    violation = float(np.maximum(-gap, 0.0).max(initial=0.0))
    return [
        Check("lemma1_bound", violation, tol),
        Check("lemma1_equality", float(np.abs(gap).max(initial=0.0)), tol),
    ]


def oracle_checks(rho, lam: float, case: Case, tol: float = 1e-6) -> list[Check]:
    """Closed-form ``a`` against the golden-section optimizers, per component."""
    case = Case(case)
    worst = 0.0
    for r in np.ravel(rho):
        r = float(r)
        if not 0.0 < r < 1.0:
            continue
        if case is Case.THREE:
            x, _ = maximize_f_lambda(r, lam)
            worst = max(worst, abs(x - a_lambda_case3(r, lam)))
        elif lam > 0:
            x, _ = minimize_case2_objective(r, lam)
            worst = max(worst, abs(x - a_lambda_case2(r, lam)))
    return [Check(f"oracle_a[{case.value},lambda={lam:g}]", worst, tol)]


def construction_checks(rho, lam: float, case: Case) -> list[Check]:
    case = Case(case)
    c = build_construction(rho, lam, case)
    tag = f"[{case.value},lambda={lam:g}]"
    flags = ("degenerate",) if c.degenerate else ()
    out = [Check(f"markov{tag}", markov_residual(c), 1e-10, flags)]
    out += [Check(ch.check + tag, ch.residual, ch.tolerance, flags) for ch in check_lemma1(c)]
    det = construction_objective(c, lam, case)
    if case is Case.THREE:
        closed = sum(objective_value(float(r), float(ai), lam) for r, ai in zip(c.rho, c.a))
        d_x, d_y = mmse_distortions(c)
        conv = converse_bound(c.rho, d_x, d_y, lam)
        out.append(Check(f"achievability{tag}", value_residual(det, closed), 1e-9, flags))
        out.append(Check(f"converse{tag}", value_residual(conv, closed), 1e-9, flags))
    else:
        closed = 0.0
        for r, ai in zip(c.rho, c.a):
            if ai > 0:
                closed += case2_objective(float(ai), float(r), lam) if lam > 0 else \
                    neg_half_log1m(float(r) ** 2)
        out.append(Check(f"achievability{tag}", value_residual(det, closed), 1e-9, flags))
    return out


def embed_construction(model: GaussianModel, lam: float, case: Case = Case.THREE):
    """Covariance over (X, Y, U, V) realizing the construction in model coordinates.

    V has one coordinate per conditional canonical component and is
    independent of U. Returns ``(joint, iv, construction)``.
    """
    canon = conditional_spectrum(model)
    c = build_construction(canon.rho, lam, case)
    r = c.r
    n = model.joint.shape[0]
    s_xv = canon.color_x[:, :r] * np.sqrt(c.a)
    s_yv = canon.color_y[:, :r] * np.sqrt(c.b)
    full = np.zeros((n + r, n + r))
    full[:n, :n] = model.joint
    full[model.ix, n:] = s_xv
    full[model.iy, n:] = s_yv
    full[n:, :n] = full[:n, n:].T
    full[n:, n:] = np.eye(r)
    return full, np.arange(n, n + r), c


def _cmi_by_difference(joint, a, b, given) -> float:
    """``I(A;B|C) = I(A; B,C) - I(A; C)``, deferring to Schur conditioning near infinity."""
    if len(given) == 0:
        return mg.gaussian_mi_det(joint, a, b)
    full = mg.gaussian_mi_det(joint, a, np.concatenate([b, given]))
    part = mg.gaussian_mi_det(joint, a, given)
    if math.isinf(full) or math.isinf(part):
        return mg.gaussian_mi_det(joint, a, b, given=given)
    return full - part


def mi_crosscheck(model: GaussianModel, lam: float, case: Case, tol: float = 1e-8) -> list[Check]:
    """Frontier rates against determinant MI of the embedded construction."""
    case = Case(case)
    tag = f"[{case.value},lambda={lam:g}]"
    point = frontier_point(model, case, lam)
    full, iv, c = embed_construction(model, lam, case)
    flags = ("degenerate",) if c.degenerate else ()
    ix, iy, iu = model.ix, model.iy, model.iu
    rate = mg.gaussian_mi_det(full, ix, np.concatenate([iu, iv]))
    if case is Case.THREE:
        key = _cmi_by_difference(full, iv, np.concatenate([ix, iy]), iu)
    else:
        key = _cmi_by_difference(full, iv, iy, iu)
    markov = mg.gaussian_mi_det(full, ix, iy, given=np.concatenate([iu, iv]))
    return [
        Check(f"mi_rate{tag}", value_residual(rate, point.R), tol, flags),
        Check(f"mi_key{tag}", value_residual(key, point.R0), tol, flags),
        Check(f"mi_markov{tag}", abs(markov), tol, flags),
    ]


def case_one_checks(model: GaussianModel, tol: float = 1e-8) -> list[Check]:
    """Case one corner against spectral and chain-rule evaluations."""
    spec_xu = correlation_spectrum(model.sigma_x, model.sigma_u, model.sigma_xu).rho \
        if model.dim_u else np.zeros(0)
    rho_c = conditional_spectrum(model).rho
    spectral_rate = sum(neg_half_log1m(r * r) for r in np.concatenate([spec_xu, rho_c]))
    point = frontier_point(model, Case.ONE, 0.0)
    out = [Check("case1_rate", value_residual(spectral_rate, point.R), tol)]
    if model.disclosure_channel is None:
        spectral_key = sum(neg_half_log1m(r * r) for r in rho_c)
        out.append(Check("case1_key", value_residual(spectral_key, point.R0), tol))
    else:
        aug, idd = model.with_disclosure()
        key = _cmi_by_difference(aug, idd, model.iy, model.iu)
        out.append(Check("case1_key", value_residual(key, point.R0), tol))
    return out


def structure_checks(model: GaussianModel, tol: float = 1e-8) -> list[Check]:
    """Whitened block forms, spectral MI and MMSE orthogonality of the (X, Y) pair."""
    sx, sy, sxy = model.sigma_x, model.sigma_y, model.sigma_xy
    canon = correlation_spectrum(sx, sy, sxy)
    out = [Check("whitening_structure", whitening_residual(canon, sx, sy, sxy), tol)]
    det = mg.gaussian_mi_det(model.joint, model.ix, model.iy)
    spectral = sum(neg_half_log1m(r * r) for r in canon.rho)
    out.append(Check("spectrum_mi", value_residual(det, spectral), tol))
    m = mmse_estimate(sx, sy, sxy)
    orth = sxy - m @ sy
    scale = max(1.0, np.abs(model.joint).max())
    out.append(Check("mmse_orthogonality", float(np.abs(orth).max(initial=0.0)) / scale, 1e-9))
    return out


def whitening_residual(canon, sigma_a, sigma_b, sigma_ab) -> float:
    """Largest deviation of the whitened covariances from the target block forms."""
    wa, wb = canon.whiten_x, canon.whiten_y
    ea = np.zeros_like(wa)
    ea[np.arange(canon.r_x), np.arange(canon.r_x)] = 1.0
    eb = np.zeros_like(wb)
    eb[np.arange(canon.r_y), np.arange(canon.r_y)] = 1.0
    res = [
        np.abs(wa @ sigma_a @ wa.T - ea).max(initial=0.0),
        np.abs(wb @ sigma_b @ wb.T - eb).max(initial=0.0),
        np.abs(wa @ sigma_ab @ wb.T - canon.cross()).max(initial=0.0),
    ]
    return float(max(res))


def monte_carlo_check(c: AuxConstruction, n_samples: int, seed: int,
                      n_se: float = 5.0) -> Check:
    """Empirical covariance of sampled (X~, Y~, V) against ``c.joint``.

    The residual is the largest entrywise deviation in units of
    ``sqrt((1 + |sigma_ij|) / n)``; the check passes within ``n_se`` of them.
    """
    if n_samples < 1000:
        raise ValueError("monte_carlo_check needs at least 1000 samples")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, c.mixing.shape[1]))
    s = z @ c.mixing.T
    emp = s.T @ s / n_samples
    se = np.sqrt((1.0 + np.abs(c.joint)) / n_samples)
    resid = float((np.abs(emp - c.joint) / se).max(initial=0.0))
    if not math.isfinite(resid):
        raise NumericalError("Monte Carlo sampling produced non-finite values")
    flags = ("degenerate",) if c.degenerate else ()
    return Check(f"monte_carlo[n={n_samples},seed={seed}]", resid, n_se, flags)


def verify_model(model: GaussianModel, lambda_grid: Sequence[float], seed: int = 0,
                 n_samples: int = 100_000, cases: Sequence[Case] = (Case.TWO, Case.THREE)
                 ) -> VerificationReport:
    """Run the full check suite for a model over a grid of weights."""
    report = VerificationReport(model.fingerprint())
    report.extend(structure_checks(model))
    report.extend(case_one_checks(model))
    rho = conditional_spectrum(model).rho
    for case in cases:
        for lam in lambda_grid:
            report.extend(oracle_checks(rho, lam, case))
            report.extend(construction_checks(rho, lam, case))
            report.extend(mi_crosscheck(model, lam, case))
            if rho.size and n_samples:
                mc = monte_carlo_check(build_construction(rho, lam, case), n_samples, seed)
                tag = f"[{Case(case).value},lambda={lam:g}]"
                report.checks.append(Check(mc.check + tag, mc.residual, mc.tolerance, mc.flags))
    return report
