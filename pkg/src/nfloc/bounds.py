"""Fisher information and position error bounds for beam-swept observations.

The observation mean is mu(eta) = sqrt(P) F^H h(eta) with parameters
eta = (d, az, el, gain magnitude, gain phase). Gain derivatives are analytic;
geometric derivatives use central finite differences. The position bound
marginalises the two gain nuisances by Schur complement and maps the
spherical covariance to Cartesian through the coordinate Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularModel, ZeroDistance
from .geometry import ArrayConfig, SphericalCoord, cart_to_sph, direction, sph_to_cart
from .channel import (
    t_vector,
    ff_steering,
    nf_steering,
)
from .codebooks import Codebook
from .airlink import LinkBudget, noise_power_mw

_REL_STEP_D = 1e-6    # relative step for the range derivative
_ABS_STEP_ANG = 1e-6  # rad, absolute step for angle derivatives


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """5x5 information matrix over (d, az, el, gain_mag, gain_phase)."""

    matrix: np.ndarray
    model: str  # "NF" or "FF"


def _mean_grid(cfg, book, lb, model, d, az, el, mag, phase) -> np.ndarray:
    """Noise-free observation grid for one parameter vector, shape (J, Q)."""
    gain = mag * np.exp(-1j * phase)
    if model == "NF":
        p = sph_to_cart(SphericalCoord(d, az, el), cfg.center_arr)
        h = np.stack(
            [nf_steering(cfg, p, q) for q in range(1, cfg.n_subcarriers + 1)],
            axis=1,
        )
    elif model == "FF":
        h = np.outer(ff_steering(cfg, az, el), t_vector(cfg, d))
    else:
        raise SingularModel(f"unknown model tag {model!r}")
    return np.sqrt(lb.tx_power_mw) * gain * (book.matrix.conj().T @ h)


def fisher_info(
    p_ue,
    book: Codebook,
    cfg: ArrayConfig,
    lb: LinkBudget,
    model: str,
    fd_scale: float = 1.0,
) -> FisherMatrix:
    """Information matrix at the true position under the given channel model.

    fd_scale multiplies the finite-difference steps (used by convergence
    checks); the defaults are relative 1e-6 in range and 1e-6 rad in angle.
    """
    sph = cart_to_sph(p_ue, cfg.center_arr)
    if sph.d <= 0:
        raise ZeroDistance("user must be away from the panel centre")
    mag = cfg.wavelength / (4.0 * np.pi * sph.d)
    phase = 0.0  # the bound is invariant to the true sync phase
    theta = (sph.d, sph.az, sph.el)
    steps = (
        _REL_STEP_D * sph.d * fd_scale,
        _ABS_STEP_ANG * fd_scale,
        _ABS_STEP_ANG * fd_scale,
    )

    def mean_at(d, az, el):
        return _mean_grid(cfg, book, lb, model, d, az, el, mag, phase)

    mu = mean_at(*theta)
    derivs = []
    for i in range(3):
        hi = list(theta)
        lo = list(theta)
        hi[i] += steps[i]
        lo[i] -= steps[i]
        derivs.append((mean_at(*hi) - mean_at(*lo)) / (2.0 * steps[i]))
    derivs.append(mu / mag)    # d mu / d |gain|
    derivs.append(-1j * mu)    # d mu / d phase
    jac = np.stack([d.ravel() for d in derivs], axis=1)  # (J*Q, 5)
    fim = 2.0 / noise_power_mw(lb) * np.real(jac.conj().T @ jac)
    return FisherMatrix(matrix=fim, model=model)


def position_error_bound(
    p_ue, book: Codebook, cfg: ArrayConfig, lb: LinkBudget, model: str
) -> float:
    """Root-trace Cartesian position bound with gain nuisances marginalised."""
    fim = fisher_info(p_ue, book, cfg, lb, model).matrix
    geo = fim[:3, :3]
    cross = fim[:3, 3:]
    nuis = fim[3:, 3:]
    try:
        schur = geo - cross @ np.linalg.solve(nuis, cross.T)
        cov_sph = np.linalg.inv(schur)
    except np.linalg.LinAlgError as exc:
        raise SingularModel("information matrix is rank deficient") from exc
    if not np.all(np.isfinite(cov_sph)) or np.trace(cov_sph) < 0:
        raise SingularModel("information matrix is numerically singular")
    sph = cart_to_sph(p_ue, cfg.center_arr)
    jac = _sph_jacobian(sph)
    cov_xyz = jac @ cov_sph @ jac.T
    return float(np.sqrt(np.trace(cov_xyz)))


def _sph_jacobian(sph: SphericalCoord) -> np.ndarray:
    """d position / d (d, az, el), columns in that order."""
    sa, ca = np.sin(sph.az), np.cos(sph.az)
    se, ce = np.sin(sph.el), np.cos(sph.el)
    col_d = direction(sph.az, sph.el)
    col_az = sph.d * np.array([ce * ca, -ce * sa, 0.0])
    col_el = sph.d * np.array([-se * sa, -se * ca, ce])
    return np.stack([col_d, col_az, col_el], axis=1)
