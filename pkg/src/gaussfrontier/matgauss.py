"""
Dense symmetric linear algebra for rank-deficient Gaussian covariances.

Everything here works on small dense ``numpy`` arrays. Eigendecompositions use
a cyclic Jacobi method with a fixed round-robin pivot order, so results are
deterministic for identical inputs. Eigenvalues below ``RANK_TOL`` times the
largest eigenvalue are treated as exactly zero throughout.

All information quantities are in nats.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateModelError, NotPSDError, NumericalError

RANK_TOL = 1e-10
ASYMMETRY_TOL = 1e-8
MAX_SWEEPS = 60

Block = Union[Sequence[int], slice, np.ndarray]


@dataclass(frozen=True)
class EigenDecomp:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int

    def reconstruct(self) -> np.ndarray:
        b = self.eigenvectors
        return (b * self.eigenvalues) @ b.T


@dataclass(frozen=True)
class SvdDecomp:
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.singular_values.size
        return (self.left[:, :k] * self.singular_values) @ self.right[:, :k].T


def as_sym(a, name: str = "matrix") -> np.ndarray:
    """Validate a square matrix and return its symmetric part.

    Raises ``ValueError`` if ``a`` is not square or not finite, and if its
    asymmetry exceeds ``ASYMMETRY_TOL`` relative to its largest entry.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    scale = np.abs(a).max() if a.size else 0.0
    if a.size and np.abs(a - a.T).max() > ASYMMETRY_TOL * max(scale, 1e-300):
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (a + a.T)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple:
    # Circle-method tournament: every (p, q) pair appears once per sweep and
    # pairs within a round are disjoint, so a round can be applied at once.
    m = n + (n % 2)
    idx = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(idx[i], idx[m - 1 - i]) for i in range(m // 2)]
        pairs = sorted((min(p, q), max(p, q)) for p, q in pairs if p < n and q < n)
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return tuple(rounds)


def _rotation(alpha, beta, gamma):
    """Jacobi rotation (c, s) zeroing the off-diagonal of [[alpha, gamma], [gamma, beta]]."""
    nz = gamma != 0.0
    g = np.where(nz, gamma, 1.0)
    with np.errstate(over="ignore"):
        # An infinite theta gives t = 0, the correct limit.
        theta = (beta - alpha) / (2.0 * g)
        sgn = np.where(theta >= 0.0, 1.0, -1.0)
        t = np.where(nz, sgn / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def _rotate_columns(m, p, q, c, s):
    mp = m[:, p]
    mq = m[:, q]
    m[:, p] = mp * c - mq * s
    m[:, q] = mp * s + mq * c


def eig_sym(a, name: str = "matrix", rank_tol: float = RANK_TOL) -> EigenDecomp:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in descending order. Each eigenvector is signed so
    that its largest-magnitude entry is positive.
    """
    a = as_sym(a, name).copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 0:
        return EigenDecomp(np.zeros(0), v, 0)
    rounds = _round_robin(n)
    norm = np.linalg.norm(a)
    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * norm or off == 0.0:
            break
        for p, q in rounds:
            c, s = _rotation(a[p, p], a[q, q], a[p, q])
            _rotate_columns(a, p, q, c, s)
            ap = a[p, :]
            aq = a[q, :]
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            _rotate_columns(v, p, q, c, s)
    else:
        raise NumericalError(f"Jacobi eigensolver did not converge for {name}")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    pivot = np.abs(v).argmax(axis=0)
    v = v * np.where(v[pivot, np.arange(n)] < 0, -1.0, 1.0)
    return EigenDecomp(w, v, _rank(w, rank_tol))


def _rank(w: np.ndarray, rank_tol: float, scale: float | None = None) -> int:
    top = w.max() if scale is None else scale
    if w.size == 0 or top <= 0.0:
        return 0
    return int(np.count_nonzero(w > rank_tol * top))


def _psd_eig(a, name: str, rank_tol: float) -> EigenDecomp:
    e = eig_sym(a, name, rank_tol)
    top = max(e.eigenvalues.max(initial=0.0), 0.0)
    if e.eigenvalues.size and e.eigenvalues.min() < -rank_tol * top:
        raise NotPSDError(
            f"{name} is not positive semi-definite "
            f"(min eigenvalue {e.eigenvalues.min():.3e}, max {top:.3e})"
        )
    return e


def _positive_part(e: EigenDecomp, rank_tol: float) -> np.ndarray:
    top = e.eigenvalues.max(initial=0.0)
    return np.where(e.eigenvalues > rank_tol * max(top, 0.0), e.eigenvalues, 0.0)


def check_psd(a, name: str = "matrix", rank_tol: float = RANK_TOL) -> EigenDecomp:
    """Return the eigendecomposition of ``a``; raise ``NotPSDError`` if it is not PSD."""
    return _psd_eig(a, name, rank_tol)


def pseudo_sqrt(a, name: str = "matrix", rank_tol: float = RANK_TOL) -> np.ndarray:
    """Symmetric PSD square root with sub-threshold eigenvalues set to 0."""
    e = _psd_eig(a, name, rank_tol)
    lam = _positive_part(e, rank_tol)
    b = e.eigenvectors
    return (b * np.sqrt(lam)) @ b.T


def pseudo_inv_sqrt(a, name: str = "matrix", rank_tol: float = RANK_TOL) -> np.ndarray:
    """Symmetric inverse square root inverting only the positive eigenvalues.

    ``T = pseudo_inv_sqrt(a)`` satisfies ``T @ a @ T = P``, the orthogonal
    projector onto the range of ``a``; in the eigenbasis of ``a`` this is
    ``diag(I_r, 0)``.
    """
    e = _psd_eig(a, name, rank_tol)
    lam = _positive_part(e, rank_tol)
    inv = np.zeros_like(lam)
    inv[lam > 0] = 1.0 / np.sqrt(lam[lam > 0])
    b = e.eigenvectors
    return (b * inv) @ b.T


def pinv_sym(a, name: str = "matrix", rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a PSD matrix."""
    e = _psd_eig(a, name, rank_tol)
    lam = _positive_part(e, rank_tol)
    inv = np.zeros_like(lam)
    inv[lam > 0] = 1.0 / lam[lam > 0]
    b = e.eigenvectors
    return (b * inv) @ b.T


def clean_psd(a, scale: float | None = None, name: str = "matrix",
              rank_tol: float = RANK_TOL) -> np.ndarray:
    """Project ``a`` onto the PSD cone, zeroing eigenvalues below ``rank_tol * scale``.

    ``scale`` defaults to the largest eigenvalue of ``a``. Passing the scale of
    the matrix ``a`` was derived from (e.g. the unconditional block of a Schur
    complement) lets cancellation noise collapse to an exact zero matrix.
    """
    e = eig_sym(a, name, rank_tol)
    top = e.eigenvalues.max(initial=0.0) if scale is None else scale
    top = max(top, 0.0)
    if e.eigenvalues.size and e.eigenvalues.min() < -rank_tol * max(top, 1e-300):
        raise NotPSDError(f"{name} is not positive semi-definite")
    lam = np.where(e.eigenvalues > rank_tol * top, e.eigenvalues, 0.0)
    if not np.any(lam):
        return np.zeros_like(e.eigenvectors)
    b = e.eigenvectors
    out = (b * lam) @ b.T
    return 0.5 * (out + out.T)


def _complement(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the orthogonal complement of the columns of ``u``."""
    m, k = u.shape
    if k >= m:
        return np.zeros((m, 0))
    proj = np.eye(m) - u @ u.T
    e = eig_sym(0.5 * (proj + proj.T), "complement projector")
    return e.eigenvectors[:, : m - k]


def svd(a, name: str = "matrix") -> SvdDecomp:
    """Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

    Returns square orthogonal ``left`` (m x m) and ``right`` (n x n) factors
    and ``min(m, n)`` singular values in descending order.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    m, n = a.shape
    if m < n:
        t = svd(a.T, name)
        return SvdDecomp(t.right, t.singular_values, t.left)
    g = a.copy()
    v = np.eye(n)
    if n == 0:
        return SvdDecomp(np.eye(m), np.zeros(0), v)
    eps = np.finfo(float).eps
    # Columns below this squared norm are null; rotating them never converges.
    floor = (eps * np.linalg.norm(a)) ** 2
    for _ in range(MAX_SWEEPS):
        converged = True
        for p, q in _round_robin(n):
            gp = g[:, p]
            gq = g[:, q]
            alpha = np.einsum("ij,ij->j", gp, gp)
            beta = np.einsum("ij,ij->j", gq, gq)
            gamma = np.einsum("ij,ij->j", gp, gq)
            active = (np.abs(gamma) > eps * np.sqrt(alpha * beta)) & (np.minimum(alpha, beta) > floor)
            if not np.any(active):
                continue
            converged = False
            gamma = np.where(active, gamma, 0.0)
            c, s = _rotation(alpha, beta, gamma)
            _rotate_columns(g, p, q, c, s)
            _rotate_columns(v, p, q, c, s)
        if converged:
            break
    else:
        raise NumericalError(f"Jacobi SVD did not converge for {name}")

    sv = np.linalg.norm(g, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    g = g[:, order]
    v = v[:, order]
    top = sv[0] if sv.size else 0.0
    nonzero = sv > max(m, n) * eps * top if top > 0 else np.zeros(n, bool)
    k = int(np.count_nonzero(nonzero))
    u_r = g[:, :k] / sv[:k]
    left = np.hstack([u_r, _complement(u_r)])
    sv = np.where(nonzero, sv, 0.0)
    return SvdDecomp(left, sv, v)


def _index(block: Block, n: int) -> np.ndarray:
    if isinstance(block, slice):
        return np.arange(n)[block]
    idx = np.asarray(block, dtype=int).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(f"block index out of range for dimension {n}")
    return idx


def _disjoint(*blocks: np.ndarray) -> None:
    seen: set[int] = set()
    for b in blocks:
        s = set(b.tolist())
        if len(s) != b.size or seen & s:
            raise ValueError("blocks must be disjoint and free of duplicates")
        seen |= s


def schur_conditional(joint, target_block: Block, given_block: Block,
                      rank_tol: float = RANK_TOL) -> np.ndarray:
    """Conditional covariance of ``target`` given ``given``.

    Computes ``S_tt - S_tg pinv(S_gg) S_gt``. Eigenvalues of the result below
    ``rank_tol`` times the largest eigenvalue of ``S_tt`` are set to zero.
    """
    joint = as_sym(joint, "joint covariance")
    n = joint.shape[0]
    t = _index(target_block, n)
    g = _index(given_block, n)
    _disjoint(t, g)
    s_tt = joint[np.ix_(t, t)]
    if t.size == 0:
        return s_tt
    scale = max(eig_sym(s_tt, "target block").eigenvalues.max(initial=0.0), 0.0)
    if g.size == 0:
        cond = s_tt
    else:
        s_tg = joint[np.ix_(t, g)]
        cond = s_tt - s_tg @ pinv_sym(joint[np.ix_(g, g)], "conditioning block", rank_tol) @ s_tg.T
    return clean_psd(0.5 * (cond + cond.T), scale, "conditional covariance", rank_tol)


def _logpdet(a: np.ndarray, scale: float, rank_tol: float) -> tuple[float, int]:
    w = eig_sym(a, "block").eigenvalues
    pos = w[w > rank_tol * scale] if scale > 0 else w[:0]
    return float(np.sum(np.log(pos))), int(pos.size)


def _block_scale(a: np.ndarray) -> float:
    return max(eig_sym(a, "block").eigenvalues.max(initial=0.0), 0.0)


def gaussian_mi_det(joint, block_a: Block, block_b: Block, given: Block = (),
                    rank_tol: float = RANK_TOL) -> float:
    """Mutual information ``I(A; B | given)`` in nats from log pseudo-determinants.

    Returns ``math.inf`` when the joint rank of ``(A, B)`` falls short of the
    sum of the marginal ranks, i.e. when some linear combination of ``A`` is
    determined by ``B``. Conditioning goes through ``schur_conditional``; the
    rank thresholds keep the scale of the unconditional blocks so that
    variables fully determined by ``given`` drop out exactly.
    """
    joint = as_sym(joint, "joint covariance")
    n = joint.shape[0]
    a = _index(block_a, n)
    b = _index(block_b, n)
    g = _index(given, n)
    _disjoint(a, b, g)
    if a.size == 0 or b.size == 0:
        return 0.0
    ab = np.concatenate([a, b])
    scale_a = _block_scale(joint[np.ix_(a, a)])
    scale_b = _block_scale(joint[np.ix_(b, b)])
    scale_ab = _block_scale(joint[np.ix_(ab, ab)])
    if g.size:
        cov = schur_conditional(joint, ab, g, rank_tol)
    else:
        cov = joint[np.ix_(ab, ab)]
        check_psd(cov, "joint block", rank_tol)
    na = a.size
    la, ra = _logpdet(cov[:na, :na], scale_a, rank_tol)
    lb, rb = _logpdet(cov[na:, na:], scale_b, rank_tol)
    lab, rab = _logpdet(cov, scale_ab, rank_tol)
    if rab > ra + rb or rab < max(ra, rb):
        raise DegenerateModelError(
            f"joint rank {rab} inconsistent with marginal ranks {ra}, {rb}"
        )
    if rab < ra + rb:
        return float("inf")
    mi = 0.5 * (la + lb - lab)
    if -1e-10 < mi < 0.0:
        mi = 0.0
    return float(mi)
