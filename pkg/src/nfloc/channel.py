"""Downlink channel models for a planar array serving a single-antenna user.

Two models are provided: an exact spherical-wavefront ("near-field") model
whose per-element phase and amplitude follow the true element-to-user
distances, and a planar-wavefront ("far-field") approximation that factors
into an angle-only steering vector and a range-only subcarrier phase ramp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroDistance
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    SphericalCoord,
    antenna_positions,
    direction,
    sph_to_cart,
    subcarrier_wavelength,
)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Frequency-domain channel, one column per pilot subcarrier."""

    entries: np.ndarray  # (n_elements, n_subcarriers) complex
    model: str           # "NF" or "FF"

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise DimensionMismatch("channel entries must be a 2-D array")
        if self.model not in ("NF", "FF"):
            raise DimensionMismatch(f"unknown channel model tag {self.model!r}")


def path_scalar(d: float, phase_offset: float, wavelength: float) -> complex:
    """Free-space line-of-sight gain lambda/(4 pi d) with a sync phase offset."""
    if d <= 0:
        raise ZeroDistance("path length must be positive")
    return wavelength / (4.0 * np.pi * d) * np.exp(-1j * phase_offset)


def nf_steering_many(cfg: ArrayConfig, points: np.ndarray, q: int = 1) -> np.ndarray:
    """Spherical-wavefront steering vectors for a batch of points, shape (G, N).

    Element n carries amplitude lam_q*d/(lam_o*r_n) and phase -2 pi r_n/lam_q,
    where r_n is the exact element-to-point distance and d the distance from
    the panel centre.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    pos = antenna_positions(cfg)
    r = np.linalg.norm(points[:, None, :] - pos[None, :, :], axis=2)
    if np.any(r == 0.0):
        raise ZeroDistance("point coincides with an antenna element")
    d = np.linalg.norm(points - cfg.center_arr, axis=1)
    if np.any(d == 0.0):
        raise ZeroDistance("point coincides with the panel centre")
    lam_q = subcarrier_wavelength(cfg, q)
    amp = (lam_q / cfg.wavelength) * d[:, None] / r
    return amp * np.exp(-2j * np.pi / lam_q * r)


def nf_steering(cfg: ArrayConfig, p, q: int = 1) -> np.ndarray:
    """Spherical-wavefront steering vector at point p for subcarrier q (1-based)."""
    return nf_steering_many(cfg, np.asarray(p, dtype=float)[None, :], q)[0]


def ff_steering_many(cfg: ArrayConfig, az, el) -> np.ndarray:
    """Planar-wavefront steering vectors for angle batches, shape (G, N).

    Element phases are +2 pi/lam_o * u(az, el) . (p_n - center): the planar
    limit of nf_steering once the common centre-path phase is removed.
    """
    offsets = antenna_positions(cfg) - cfg.center_arr
    u = np.atleast_2d(direction(az, el))
    return np.exp(2j * np.pi / cfg.wavelength * (u @ offsets.T))


def ff_steering(cfg: ArrayConfig, az: float, el: float) -> np.ndarray:
    """Planar-wavefront steering vector for one departure direction."""
    return ff_steering_many(cfg, az, el)[0]


def t_vector(cfg: ArrayConfig, d: float) -> np.ndarray:
    """Per-subcarrier phase ramp exp(-j 2 pi (q-1) step/c * d), length Q.

    Periodic in d with period c/step; the first entry is always 1+0j.
    """
    k = np.arange(cfg.n_subcarriers)
    return np.exp(-2j * np.pi * k * cfg.subcarrier_step_hz / SPEED_OF_LIGHT * d)


def delay_ramp_period(cfg: ArrayConfig) -> float:
    """Unambiguous range of the subcarrier phase ramp, c/step in metres."""
    return SPEED_OF_LIGHT / cfg.subcarrier_step_hz


def nf_channel(cfg: ArrayConfig, p_ue, phase_offset: float) -> ChannelMatrix:
    """Exact spherical-wavefront channel: column q is path_scalar * steering_q."""
    p_ue = np.asarray(p_ue, dtype=float)
    d = float(np.linalg.norm(p_ue - cfg.center_arr))
    if d == 0.0:
        raise ZeroDistance("user coincides with the panel centre")
    beta = path_scalar(d, phase_offset, cfg.wavelength)
    cols = [
        beta * nf_steering(cfg, p_ue, q)
        for q in range(1, cfg.n_subcarriers + 1)
    ]
    return ChannelMatrix(entries=np.stack(cols, axis=1), model="NF")


def ff_channel(cfg: ArrayConfig, sph: SphericalCoord, phase_offset: float) -> ChannelMatrix:
    """Planar-wavefront channel: rank-one outer product steering x delay ramp."""
    if sph.d <= 0:
        raise ZeroDistance("range must be positive")
    beta = path_scalar(sph.d, phase_offset, cfg.wavelength)
    a = ff_steering(cfg, sph.az, sph.el)
    t = t_vector(cfg, sph.d)
    return ChannelMatrix(entries=beta * np.outer(a, t), model="FF")


def model_gap(reference: ChannelMatrix, approx: ChannelMatrix) -> float:
    """Relative Frobenius distance after aligning the best global phase.

    The planar model absorbs the carrier phase of the centre path into the
    sync offset, so the informative distance between the two models is taken
    modulo one global unit-magnitude factor.
    """
    a = reference.entries
    b = approx.entries
    if a.shape != b.shape:
        raise DimensionMismatch("channel matrices differ in shape")
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if inner != 0 else 1.0
    return float(np.linalg.norm(a - phase * b) / np.linalg.norm(a))


def ff_equivalent(cfg: ArrayConfig, p_ue, phase_offset: float) -> ChannelMatrix:
    """Planar-wavefront channel at the spherical coordinates of point p_ue."""
    sph = _sph_of(cfg, p_ue)
    return ff_channel(cfg, sph, phase_offset)


def _sph_of(cfg: ArrayConfig, p) -> SphericalCoord:
    from .geometry import cart_to_sph

    return cart_to_sph(p, cfg.center_arr)
