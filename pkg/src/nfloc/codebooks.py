"""Beam codebooks: angle-steered beams and range-focused beams.

The steered codebook lays unit-norm planar-wavefront beams on an
azimuth x elevation grid covering the service region. The focused
codebook places spherical-wavefront beams on range rings; each ring
carries a few height rows swept in azimuth, so the focus lattice
conforms to the user height band instead of fanning out along fixed
elevation cones (which would overshoot the band at long range and
undersample it close in).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidRegion
from .geometry import ArrayConfig, SphericalCoord, direction, sph_to_cart
from .channel import ff_steering_many, nf_steering_many

# Log-range positions of the default focus rings, as fractions of the
# region's log-range span. Tuned so rings sit where focused beams hand
# over: one ring pinned to the near edge, one dense near ring, one mid,
# one far.
_FOCUS_RING_FRACTIONS = (0.0, 0.292, 0.580, 0.866)
_FOCUS_Z_ROWS = 3


@dataclass(frozen=True)
class Region:
    """Service volume: azimuth sector, user height band, range interval."""

    az_range: tuple = (-np.pi / 4, np.pi / 4)  # rad
    z_range: tuple = (1.0, 1.5)                # m
    d_range: tuple = (1.0, 30.0)               # m

    def __post_init__(self):
        problems = []
        if not self.az_range[0] < self.az_range[1]:
            problems.append("empty azimuth interval")
        if not self.z_range[0] < self.z_range[1]:
            problems.append("empty height interval")
        if not self.d_range[0] < self.d_range[1]:
            problems.append("empty range interval")
        if self.d_range[0] <= 0:
            problems.append("range interval must be positive")
        if problems:
            raise InvalidRegion("; ".join(problems))

    def elevation_interval(self, center_z: float) -> tuple:
        """Elevation span subtended by the height band over the range interval."""
        ratios = [
            np.clip((z - center_z) / d, -1.0, 1.0)
            for z in self.z_range
            for d in self.d_range
        ]
        return (float(np.arcsin(min(ratios))), float(np.arcsin(max(ratios))))

    def sample(self, rng: np.random.Generator, d: float, center_z: float) -> SphericalCoord:
        """Random spherical coordinate at range d inside the region."""
        az = rng.uniform(*self.az_range)
        z = rng.uniform(*self.z_range)
        el = float(np.arcsin(np.clip((z - center_z) / d, -1.0, 1.0)))
        return SphericalCoord(d=float(d), az=float(az), el=el)


@dataclass(frozen=True, eq=False)
class Codebook:
    """Unit-norm beamformers, one per column."""

    matrix: np.ndarray            # (n_elements, n_beams) complex
    scheme_tag: str               # "FF" or "NF"
    angles: np.ndarray | None = None  # (n_beams, 2) az/el for steered beams
    points: np.ndarray | None = None  # (n_beams, 3) focus points for focused beams

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise DimensionMismatch("codebook matrix must be 2-D")
        if self.scheme_tag not in ("FF", "NF"):
            raise DimensionMismatch(f"unknown codebook scheme {self.scheme_tag!r}")

    @property
    def n_beams(self) -> int:
        return self.matrix.shape[1]

    @property
    def beam_meta(self) -> np.ndarray:
        """Per-beam pointing metadata: az/el rows or focus-point rows."""
        meta = self.angles if self.scheme_tag == "FF" else self.points
        if meta is None:
            raise DimensionMismatch("codebook carries no beam metadata")
        return meta


def _linspace_or_mid(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([(lo + hi) / 2.0])
    return np.linspace(lo, hi, n)


def angular_grid(cfg: ArrayConfig, region: Region, n_beams: int) -> np.ndarray:
    """(n_beams, 2) az/el grid over the region; 3 elevation rows when divisible."""
    if n_beams < 1:
        raise InvalidRegion("codebook needs at least one beam")
    n_el = 3 if (n_beams % 3 == 0 and n_beams >= 9) else 1
    n_az = n_beams // n_el
    if n_az * n_el != n_beams:
        raise InvalidRegion(f"cannot lay out {n_beams} beams on an angular grid")
    el_lo, el_hi = region.elevation_interval(cfg.center[2])
    azs = _linspace_or_mid(region.az_range[0], region.az_range[1], n_az)
    els = _linspace_or_mid(el_lo, el_hi, n_el)
    return np.array([(az, el) for el in els for az in azs])


def ring_radii(region: Region, n_rings: int) -> np.ndarray:
    """Focus-ring ranges, geometrically placed across the region's range span."""
    if n_rings < 1:
        raise InvalidRegion("focused codebook needs at least one ring")
    lo, hi = region.d_range
    if n_rings == len(_FOCUS_RING_FRACTIONS):
        t = np.asarray(_FOCUS_RING_FRACTIONS)
    else:
        t = (2.0 * np.arange(n_rings) + 1.0) / (2.0 * n_rings)
    return lo * (hi / lo) ** t


def make_ff_codebook(cfg: ArrayConfig, region: Region, n_beams: int = 21) -> Codebook:
    """Angle-steered beams: matched planar-wavefront columns, norm 1/sqrt(N) each entry."""
    angles = angular_grid(cfg, region, n_beams)
    cols = ff_steering_many(cfg, angles[:, 0], angles[:, 1])
    matrix = cols.T / np.sqrt(cfg.n_elements)
    return Codebook(matrix=matrix, scheme_tag="FF", angles=angles)


def make_nf_codebook(
    cfg: ArrayConfig, region: Region, n_beams: int = 84, n_rings: int | None = None
) -> Codebook:
    """Range-focused beams on conformal rings.

    Outer rings carry height rows spanning the user band; a row's
    elevation is the one that reaches its height at range r, so every
    focus point sits inside the region. The innermost ring spends its
    whole budget on a single mid-band azimuth fan: focal spots there are
    barely a beamwidth wide, so a sparse fan would leave gaps between
    azimuths that the defocus blur of outer rings cannot backfill, while
    no affordable number of height rows can tile the band that close in.
    """
    if n_beams < 1:
        raise InvalidRegion("codebook needs at least one beam")
    if n_rings is None:
        n_rings = 4 if n_beams % 4 == 0 else (2 if n_beams % 2 == 0 else 1)
    if n_beams % n_rings != 0:
        raise InvalidRegion(f"{n_beams} beams do not split into {n_rings} rings")
    per_ring = n_beams // n_rings

    def z_rows_for(i_ring: int) -> int:
        if n_rings >= 2 and i_ring == 0:
            return 1
        return _FOCUS_Z_ROWS if (per_ring % _FOCUS_Z_ROWS == 0 and per_ring >= 9) else 1

    cz = cfg.center[2]
    blocks = []
    for i, r in enumerate(ring_radii(region, n_rings)):
        n_z = z_rows_for(i)
        azs = _linspace_or_mid(region.az_range[0], region.az_range[1], per_ring // n_z)
        for z in _linspace_or_mid(region.z_range[0], region.z_range[1], n_z):
            el = float(np.arcsin(np.clip((z - cz) / r, -1.0, 1.0)))
            blocks.append(cfg.center_arr + r * direction(azs, np.full_like(azs, el)))
    points = np.concatenate(blocks, axis=0)
    cols = nf_steering_many(cfg, points, q=1)
    matrix = (cols / np.linalg.norm(cols, axis=1, keepdims=True)).T
    return Codebook(matrix=matrix, scheme_tag="NF", points=points)


def min_coverage_gain(
    book: Codebook,
    cfg: ArrayConfig,
    region: Region,
    n_az: int = 9,
    n_z: int = 5,
    n_d: int = 12,
) -> float:
    """Worst-case beamforming gain over a region lattice.

    For each lattice point the best beam's |f^H a|^2 is normalised by the
    single-element-equivalent gain ||a||^2 / N; the minimum over the lattice
    is returned. Values >= 0.25 mean no coverage hole worse than -6 dB below
    that reference anywhere on the lattice.
    """
    azs = np.linspace(*region.az_range, n_az)
    zs = np.linspace(*region.z_range, n_z)
    ds = np.geomspace(*region.d_range, n_d)
    pts = []
    cz = cfg.center[2]
    for d in ds:
        for z in zs:
            el = float(np.arcsin(np.clip((z - cz) / d, -1.0, 1.0)))
            for az in azs:
                pts.append(sph_to_cart(SphericalCoord(d, az, el), cfg.center_arr))
    a = nf_steering_many(cfg, np.array(pts), q=1)
    gains = np.abs(a.conj() @ book.matrix) ** 2
    ref = (np.linalg.norm(a, axis=1) ** 2) / cfg.n_elements
    return float(np.min(gains.max(axis=1) / ref))


def codebook_to_csv(book: Codebook, path) -> None:
    """Write one row per beam: index, beam metadata, interleaved re/im weights."""
    n = book.matrix.shape[0]
    if book.scheme_tag == "FF":
        meta_cols = ["az_rad", "el_rad"]
    else:
        meta_cols = ["focus_x_m", "focus_y_m", "focus_z_m"]
    meta = book.beam_meta
    header = ["beam"] + meta_cols
    for i in range(n):
        header += [f"re_{i:04d}", f"im_{i:04d}"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for j in range(book.n_beams):
            col = book.matrix[:, j]
            row = [j] + [repr(float(v)) for v in meta[j]]
            weights = np.empty(2 * n)
            weights[0::2] = col.real
            weights[1::2] = col.imag
            row += [repr(float(v)) for v in weights]
            writer.writerow(row)
