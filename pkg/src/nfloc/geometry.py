"""Array geometry, angular coordinates, and carrier bookkeeping.

Conventions used throughout the package:
  * the base-station panel lies in the x-z plane and radiates toward +y,
  * azimuth is measured from broadside (+y) toward +x,
  * elevation is measured from the x-y plane toward +z,
  * element index runs row-major with the x axis fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, ValidationError, ZeroDistance

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class SphericalCoord:
    """Range plus departure angles relative to the panel centre."""

    d: float   # m
    az: float  # rad, from broadside toward +x
    el: float  # rad, from the horizontal plane toward +z


@dataclass(frozen=True, eq=False)
class ArrayConfig:
    """Planar-array and pilot-comb parameters.

    spacing=None resolves to half the carrier wavelength.
    """

    n_x: int = 24
    n_z: int = 24
    spacing: float | None = None          # m
    center: tuple = (0.0, 0.0, 2.0)       # m, panel reference point
    carrier_hz: float = 24e9
    n_subcarriers: int = 12
    subcarrier_step_hz: float = 750e3     # spacing between occupied pilots
    subcarrier_bw_hz: float = 15e3        # bandwidth of one pilot subcarrier

    def __post_init__(self):
        problems = []
        if self.n_x < 1 or self.n_z < 1:
            problems.append("n_x and n_z must be >= 1")
        if self.carrier_hz <= 0:
            problems.append("carrier_hz must be > 0")
        if self.n_subcarriers < 1:
            problems.append("n_subcarriers must be >= 1")
        if self.subcarrier_step_hz <= 0:
            problems.append("subcarrier_step_hz must be > 0")
        if self.subcarrier_bw_hz <= 0:
            problems.append("subcarrier_bw_hz must be > 0")
        if self.spacing is not None and self.spacing <= 0:
            problems.append("spacing must be > 0 when given")
        if len(tuple(self.center)) != 3:
            problems.append("center must have three components")
        if problems:
            raise ValidationError("; ".join(problems))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.spacing is None:
            object.__setattr__(self, "spacing", self.wavelength / 2.0)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_z

    @property
    def center_arr(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    @property
    def pilot_bandwidth_hz(self) -> float:
        """Span of the occupied pilot comb."""
        return (self.n_subcarriers - 1) * self.subcarrier_step_hz + self.subcarrier_bw_hz


def direction(az, el) -> np.ndarray:
    """Unit departure vector(s) for azimuth/elevation pairs.

    Accepts scalars or equal-length arrays; returns shape (3,) or (G, 3).
    """
    az = np.asarray(az, dtype=float)
    el = np.asarray(el, dtype=float)
    u = np.stack(
        [np.cos(el) * np.sin(az), np.cos(el) * np.cos(az), np.sin(el)], axis=-1
    )
    return u


def sph_to_cart(sph, origin) -> np.ndarray:
    """Cartesian point at range sph.d along direction (sph.az, sph.el) from origin.

    sph may be a SphericalCoord or any (d, az, el) triple.
    """
    if not isinstance(sph, SphericalCoord):
        sph = SphericalCoord(*sph)
    origin = np.asarray(origin, dtype=float)
    return origin + sph.d * direction(sph.az, sph.el)


def cart_to_sph(p, origin) -> SphericalCoord:
    """Inverse of sph_to_cart; raises ZeroDistance when p coincides with origin."""
    delta = np.asarray(p, dtype=float) - np.asarray(origin, dtype=float)
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        raise ZeroDistance("point coincides with the reference origin")
    el = float(np.arcsin(np.clip(delta[2] / d, -1.0, 1.0)))
    az = float(np.arctan2(delta[0], delta[1]))
    return SphericalCoord(d=d, az=az, el=el)


def antenna_positions(cfg: ArrayConfig) -> np.ndarray:
    """Element coordinates, shape (n_elements, 3), centred on cfg.center.

    Row-major ordering with the x index running fastest.
    """
    ix = np.arange(cfg.n_x) - (cfg.n_x - 1) / 2.0
    iz = np.arange(cfg.n_z) - (cfg.n_z - 1) / 2.0
    gz, gx = np.meshgrid(iz, ix, indexing="ij")
    offsets = np.zeros((cfg.n_elements, 3))
    offsets[:, 0] = cfg.spacing * gx.ravel()
    offsets[:, 2] = cfg.spacing * gz.ravel()
    return cfg.center_arr + offsets


def subcarrier_frequency(cfg: ArrayConfig, q: int) -> float:
    """Frequency of pilot subcarrier q (1-based)."""
    if not 1 <= q <= cfg.n_subcarriers:
        raise IndexOutOfRange(
            f"subcarrier index {q} outside [1, {cfg.n_subcarriers}]"
        )
    return cfg.carrier_hz + (q - 1) * cfg.subcarrier_step_hz


def subcarrier_wavelength(cfg: ArrayConfig, q: int) -> float:
    """Wavelength of pilot subcarrier q (1-based)."""
    return SPEED_OF_LIGHT / subcarrier_frequency(cfg, q)


def aperture_diagonal(cfg: ArrayConfig) -> float:
    """Corner-to-corner size of the panel."""
    return cfg.spacing * float(np.hypot(cfg.n_x - 1, cfg.n_z - 1))


def fraunhofer_distance(cfg: ArrayConfig) -> float:
    """Boundary 2*D^2/lambda between spherical- and planar-wavefront regimes."""
    diag = aperture_diagonal(cfg)
    return 2.0 * diag * diag / cfg.wavelength
