"""
Whitening and simultaneous diagonalization of Gaussian pairs.

For a pair (A, B) with covariances ``Sa``, ``Sb`` and cross-covariance ``Sab``
we build linear maps ``Wa``, ``Wb`` such that ``Wa A`` and ``Wb B`` have
covariances ``diag(I_ra, 0)``, ``diag(I_rb, 0)`` and a diagonal cross
covariance whose leading entries are the canonical correlations ``rho``.
Unequal dimensions are handled by the rectangular cross block directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matgauss as mg
from .errors import ModelError, NotPSDError

RHO_EXCESS_TOL = 1e-8


@dataclass(frozen=True)
class DisclosureChannel:
    """Linear-Gaussian disclosure ``D = H X + N`` with ``N`` independent of (X, Y, U)."""

    gain: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        gain = np.atleast_2d(np.asarray(self.gain, dtype=float))
        try:
            noise = mg.as_sym(self.noise, "disclosure noise covariance")
        except ValueError as exc:
            raise ModelError(str(exc)) from exc
        if noise.shape[0] != gain.shape[0]:
            raise ModelError("disclosure gain rows must match noise dimension")
        try:
            mg.check_psd(noise, "disclosure noise covariance")
        except NotPSDError as exc:
            raise ModelError(str(exc)) from exc
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "noise", noise)


@dataclass(frozen=True)
class GaussianModel:
    """Zero-mean jointly Gaussian (X, Y, U) with optional disclosure channel on X.

    ``joint`` is the covariance over the concatenation X, Y, U in that order.
    """

    dim_x: int
    dim_y: int
    dim_u: int
    joint: np.ndarray
    disclosure_channel: Optional[DisclosureChannel] = None

    def __post_init__(self):
        if min(self.dim_x, self.dim_y, self.dim_u) < 0:
            raise ModelError("block dimensions must be nonnegative")
        try:
            joint = mg.as_sym(self.joint, "joint covariance")
        except ValueError as exc:
            raise ModelError(str(exc)) from exc
        if joint.shape[0] != self.dim_x + self.dim_y + self.dim_u:
            raise ModelError(
                f"covariance is {joint.shape[0]}x{joint.shape[0]} but block dims "
                f"sum to {self.dim_x + self.dim_y + self.dim_u}"
            )
        mg.check_psd(joint, "joint covariance")
        ch = self.disclosure_channel
        if ch is not None and ch.gain.shape[1] != self.dim_x:
            raise ModelError("disclosure gain columns must match dim_x")
        object.__setattr__(self, "joint", joint)

    @property
    def ix(self) -> np.ndarray:
        return np.arange(self.dim_x)

    @property
    def iy(self) -> np.ndarray:
        return np.arange(self.dim_x, self.dim_x + self.dim_y)

    @property
    def iu(self) -> np.ndarray:
        n = self.dim_x + self.dim_y
        return np.arange(n, n + self.dim_u)

    def block(self, i, j) -> np.ndarray:
        return self.joint[np.ix_(i, j)]

    @property
    def sigma_x(self):
        return self.block(self.ix, self.ix)

    @property
    def sigma_y(self):
        return self.block(self.iy, self.iy)

    @property
    def sigma_u(self):
        return self.block(self.iu, self.iu)

    @property
    def sigma_xy(self):
        return self.block(self.ix, self.iy)

    @property
    def sigma_xu(self):
        return self.block(self.ix, self.iu)

    def with_disclosure(self, channel: Optional[DisclosureChannel] = None):
        """Covariance over (X, Y, U, D) and the index array of D.

        ``channel`` defaults to the model's own; with neither present D = X.
        """
        ch = channel or self.disclosure_channel
        if ch is None:
            ch = DisclosureChannel(np.eye(self.dim_x), np.zeros((self.dim_x, self.dim_x)))
        h = ch.gain
        cross = h @ self.joint[self.ix, :]
        n = self.joint.shape[0]
        m = h.shape[0]
        aug = np.zeros((n + m, n + m))
        aug[:n, :n] = self.joint
        aug[n:, :n] = cross
        aug[:n, n:] = cross.T
        aug[n:, n:] = h @ self.sigma_x @ h.T + ch.noise
        return 0.5 * (aug + aug.T), np.arange(n, n + m)

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(np.array([self.dim_x, self.dim_y, self.dim_u], dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.joint).tobytes())
        if self.disclosure_channel is not None:
            h.update(np.ascontiguousarray(self.disclosure_channel.gain).tobytes())
            h.update(np.ascontiguousarray(self.disclosure_channel.noise).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class CorrelationSpectrum:
    """Canonical correlations of a pair plus the maps that expose them.

    ``whiten_x`` maps X to coordinates with covariance ``diag(I_rx, 0)``;
    ``color_x`` maps back, so ``color_x @ whiten_x @ X = X`` almost surely.
    Likewise for Y.
    """

    rho: np.ndarray
    r_x: int
    r_y: int
    whiten_x: np.ndarray
    whiten_y: np.ndarray
    color_x: np.ndarray = field(repr=False)
    color_y: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.rho.size

    def cross(self) -> np.ndarray:
        """Cross covariance of the whitened pair: ``diag(rho)`` padded with zeros."""
        out = np.zeros((self.whiten_x.shape[0], self.whiten_y.shape[0]))
        out[np.arange(self.r), np.arange(self.r)] = self.rho
        return out


def clamp_rho(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.size and s.max() > 1.0 + RHO_EXCESS_TOL:
        raise ModelError(
            f"correlation {s.max():.12g} exceeds 1; covariance is not a valid joint"
        )
    # Within rank tolerance of 1 is a deterministic relation.
    s = np.where(s > 1.0 - mg.RANK_TOL, 1.0, s)
    return np.clip(s, 0.0, 1.0)


def _range_basis(sigma: np.ndarray, name: str):
    e = mg.check_psd(sigma, name)
    q = e.eigenvectors[:, : e.rank]
    lam = e.eigenvalues[: e.rank]
    return q, lam


def correlation_spectrum(sigma_a, sigma_b, sigma_ab) -> CorrelationSpectrum:
    """Canonical correlations of (A, B) and the whitening maps that diagonalize them.

    The returned ``rho`` are the singular values of
    ``pseudo_inv_sqrt(Sa) @ Sab @ pseudo_inv_sqrt(Sb)``, of which there are
    ``min(rank Sa, rank Sb)``.
    """
    sa = mg.as_sym(sigma_a, "sigma_a")
    sb = mg.as_sym(sigma_b, "sigma_b")
    sab = np.asarray(sigma_ab, dtype=float).reshape(sa.shape[0], sb.shape[0])
    joint = np.block([[sa, sab], [sab.T, sb]])
    mg.check_psd(joint, "joint covariance of pair")

    qa, la = _range_basis(sa, "sigma_a")
    qb, lb = _range_basis(sb, "sigma_b")
    ra, rb = la.size, lb.size
    c = (qa / np.sqrt(la)).T @ sab @ (qb / np.sqrt(lb))
    dec = mg.svd(c, "whitened cross covariance")
    r = min(ra, rb)
    rho = clamp_rho(dec.singular_values[:r])

    na, nb = sa.shape[0], sb.shape[0]
    whiten_a = np.zeros((na, na))
    whiten_b = np.zeros((nb, nb))
    color_a = np.zeros((na, na))
    color_b = np.zeros((nb, nb))
    whiten_a[:ra] = dec.left.T @ (qa / np.sqrt(la)).T
    whiten_b[:rb] = dec.right.T @ (qb / np.sqrt(lb)).T
    color_a[:, :ra] = (qa * np.sqrt(la)) @ dec.left
    color_b[:, :rb] = (qb * np.sqrt(lb)) @ dec.right
    return CorrelationSpectrum(rho, ra, rb, whiten_a, whiten_b, color_a, color_b)


def conditional_covariance(model: GaussianModel) -> np.ndarray:
    """Covariance of (X, Y) given U, cleaned relative to the unconditional scales."""
    ixy = np.concatenate([model.ix, model.iy])
    cond = mg.schur_conditional(model.joint, ixy, model.iu)
    nx = model.dim_x
    sx = mg.schur_conditional(model.joint, model.ix, model.iu)
    sy = mg.schur_conditional(model.joint, model.iy, model.iu)
    # Re-use the separately cleaned marginals so that directions of X or Y
    # fixed by U are exactly zero.
    cond[:nx, :nx] = sx
    cond[nx:, nx:] = sy
    return cond


def conditional_spectrum(model: GaussianModel) -> CorrelationSpectrum:
    """Correlation spectrum of X and Y given U."""
    cond = conditional_covariance(model)
    nx = model.dim_x
    return correlation_spectrum(cond[:nx, :nx], cond[nx:, nx:], cond[:nx, nx:])


def conditional_spectra(model: GaussianModel) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rho_xu, rho_xy_given_u)``.

    ``rho_xu`` is empty when the model has no U block.
    """
    if model.dim_u == 0:
        rho_xu = np.zeros(0)
    else:
        rho_xu = correlation_spectrum(model.sigma_x, model.sigma_u, model.sigma_xu).rho
    return rho_xu, conditional_spectrum(model).rho


def mmse_estimate(sigma_x, sigma_y, sigma_xy) -> np.ndarray:
    """Coefficient matrix ``M`` of the linear MMSE estimator ``E[X|Y] = M Y``.

    Built through the whitening maps: ``M = color_x @ diag(rho) @ whiten_y``,
    which equals ``Sx^{1/2} rho_xy Sy^{-1/2}``.
    """
    canon = correlation_spectrum(sigma_x, sigma_y, sigma_xy)
    return canon.color_x @ canon.cross() @ canon.whiten_y
