"""Grid-search localization from beam-swept observations.

Both estimators start from per-beam RSSI weights and a matched-filter range
estimate taken from the per-beam subcarrier phase ramp, then refine angles
against the beam-space signature of candidate positions. The far-field
estimator scans a coarse azimuth/height lattice with a coherent correlation
score, refines the few strongest separated peaks with shrinking trust
regions, and keeps the refined candidate with the best score; multi-start is
what makes the scan robust to the sidelobe aliases of a sparse steered
codebook. The near-field estimator seeds at the focus point of the strongest
beam (or a joint angle/height scan at very short range, where single-beam
seeds are unreliable), alternates range/azimuth/height sweeps with windows
that shrink around the iterate, and finally arbitrates the azimuth sign
mirror by beam-energy profile. Range sweep windows stay anchored to the ramp
estimate: the correlation objective carries a small range bias at mid range,
and the anchor clips it while the phase curvature sharpens the estimate
inside the window.

Sweep scores divide the magnitude of the masked beam-space correlation by
the square root of the masked signature energy, so the noiseless score peaks
where the candidate's compressed response is proportional to the observation
(weighted Cauchy-Schwarz) instead of rewarding inflated steering norms. The
mask keeps beams that pass the RSSI floor and admits the rest at a small
ridge weight, which preserves the pattern-gain preference when thresholding
leaves a single active beam. Range sweeps correlate coherently across
subcarriers against the candidate's own phase ramp; angle sweeps strip the
ramp of the current range iterate first. All scores are magnitudes, so a
common phase rotation of the observation never changes an estimate.

A strict mode runs the plain alternating maximization on fixed
full-interval grids with the same score and no refinement stages, so an
exhaustive maximization of the score over the full 3-D grid is a drop-in
oracle; the oracle-equivalence tests run against that mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AllBeamsSuppressed,
    DimensionMismatch,
    InvalidThreshold,
)
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    SphericalCoord,
    cart_to_sph,
    direction,
    sph_to_cart,
)
from .channel import (
    ff_steering_many,
    nf_channel,
    nf_steering_many,
)
from .codebooks import Codebook, Region
from .airlink import LinkBudget, RxGrid, synthesize_rx

# Scan-stage geometry shared by both refined pipelines. The ramp window is
# the half-width of the range sweep around the matched-filter estimate; the
# fine ramp stage resolves the coarse grid cell left by the first pass.
_MASK_RIDGE = 0.1
_RAMP_COARSE_STEPS = 256
_RAMP_FINE_HALF_M = 0.12
_RAMP_FINE_STEPS = 97
_RAMP_WINDOW_M = 0.2

# Far-field global scan and multi-start refinement.
_FF_SCAN_AZ = 181
_FF_SCAN_Z = 11
_FF_STARTS = 3
_FF_START_SEP = np.radians(2.5)
_FF_TRUST_AZ = np.radians(2.0)
_FF_TRUST_Z = 0.25
_FF_TRUST_SHRINK = 2.0

# Near-field seeding, window schedule, and mirror arbitration.
_NF_SHRINK = 2.0
_NF_JOINT_BELOW_M = 3.6
_NF_JOINT_AZ = 60
_NF_JOINT_Z = 24
_NF_MIRROR_MIN_AZ = np.radians(1.5)
_NF_LOCK_ITERS = 3
_NF_LOCK_STEPS = 32
_NF_LOCK_D_HALF_M = 0.05
_NF_LOCK_Z_HALF_M = 0.08


@dataclass(frozen=True)
class EstimatorConfig:
    """Search grids and iteration policy shared by both estimators."""

    eps_w: float = 0.002           # weights below this fraction of the max drop to 0
    iters_outer: int = 5           # refinement iterations per estimator pass
    steps_d: int = 64              # grid points per range sweep
    steps_theta: int = 48          # grid points per angle/height sweep
    d_search: tuple = (1.0, 30.0)  # m
    az_search: tuple = (-np.pi / 4, np.pi / 4)
    el_search: tuple = (-np.pi / 2, 0.0)
    z_search: tuple = (1.0, 1.5)   # user height band swept by the refined mode
    strict: bool = False           # fixed full grids, raw metric, no refinement
    shrink: float = 4.0            # reserved for strict-mode window studies

    def __post_init__(self):
        if self.eps_w > 1.0 or self.eps_w < 0.0:
            raise InvalidThreshold(f"eps_w {self.eps_w} outside [0, 1]")
        problems = []
        if self.iters_outer < 1:
            problems.append("iters_outer must be >= 1")
        if self.steps_d < 2 or self.steps_theta < 2:
            problems.append("search grids need at least 2 points")
        if not 0.0 < self.d_search[0] < self.d_search[1]:
            problems.append("d_search must be a positive interval")
        if not self.az_search[0] < self.az_search[1]:
            problems.append("az_search must be a non-empty interval")
        if not self.el_search[0] < self.el_search[1]:
            problems.append("el_search must be a non-empty interval")
        if not self.z_search[0] < self.z_search[1]:
            problems.append("z_search must be a non-empty interval")
        if self.shrink <= 1.0:
            problems.append("shrink must exceed 1")
        if problems:
            raise DimensionMismatch("; ".join(problems))

    @classmethod
    def for_region(cls, region: Region, cfg: ArrayConfig, **overrides) -> "EstimatorConfig":
        """Search ranges matched to a service region."""
        defaults = dict(
            d_search=tuple(region.d_range),
            az_search=tuple(region.az_range),
            el_search=region.elevation_interval(cfg.center[2]),
            z_search=tuple(region.z_range),
        )
        defaults.update(overrides)
        return cls(**defaults)

    @classmethod
    def strict_paper(cls, region: Region, cfg: ArrayConfig, **overrides) -> "EstimatorConfig":
        """Fixed-grid alternating maximization with the raw metric."""
        defaults = dict(
            eps_w=0.4, iters_outer=3, steps_d=200, steps_theta=180, strict=True
        )
        defaults.update(overrides)
        return cls.for_region(region, cfg, **defaults)

    def cell_diagonal(self, d: float, el: float = 0.0) -> float:
        """Euclidean size of one full-range search cell at range d."""
        dd = (self.d_search[1] - self.d_search[0]) / (self.steps_d - 1)
        daz = (self.az_search[1] - self.az_search[0]) / (self.steps_theta - 1)
        dele = (self.el_search[1] - self.el_search[0]) / (self.steps_theta - 1)
        return float(np.sqrt(dd**2 + (d * daz * np.cos(el)) ** 2 + (d * dele) ** 2))


@dataclass(frozen=True, eq=False)
class BeamWeights:
    """Normalized per-beam RSSI weights after thresholding."""

    w: np.ndarray
    eps_w: float

    @property
    def active(self) -> np.ndarray:
        return self.w > 0.0

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.w))


@dataclass(frozen=True, eq=False)
class PositionEstimate:
    """Output of one localization pass."""

    p_hat: np.ndarray            # (3,) m
    sph_hat: SphericalCoord
    scheme_used: str             # "FF", "NF", or "FF_then_NF"
    weights: BeamWeights
    iterations_run: int
    objective_trace: tuple = ()  # per-iteration sweep score at the iterate


def rssi_weights(y, eps_w: float) -> BeamWeights:
    """Per-beam row norms normalized by the strongest, floored to zero.

    The strongest beam keeps weight exactly 1 unless every row is zero.
    """
    if eps_w > 1.0 or eps_w < 0.0:
        raise InvalidThreshold(f"eps_w {eps_w} outside [0, 1]")
    y = np.asarray(getattr(y, "y", y))
    norms = np.linalg.norm(y, axis=1)
    peak = norms.max() if norms.size else 0.0
    if peak == 0.0:
        return BeamWeights(w=np.zeros_like(norms), eps_w=eps_w)
    w = norms / peak
    w[w < eps_w] = 0.0
    return BeamWeights(w=w, eps_w=eps_w)


def _rx_array(rx) -> tuple:
    """Observation matrix plus the noise floor carried by synthesis."""
    if isinstance(rx, RxGrid):
        return rx.y, rx.noise_power_mw
    return np.asarray(rx), 0.0


def _check_rx(y: np.ndarray, book: Codebook, cfg: ArrayConfig) -> None:
    if y.shape != (book.n_beams, cfg.n_subcarriers):
        raise DimensionMismatch(
            f"observations {y.shape} do not match "
            f"{book.n_beams} beams x {cfg.n_subcarriers} subcarriers"
        )


def _subcarrier_ramp(cfg: ArrayConfig, d) -> np.ndarray:
    """exp(-j 2 pi q W_sub d / c) per subcarrier; rows follow d's shape."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    r = np.exp(
        -2j * np.pi * np.arange(cfg.n_subcarriers)[None, :]
        * cfg.subcarrier_step_hz / SPEED_OF_LIGHT * d[:, None]
    )
    return r[0] if r.shape[0] == 1 else r


def _ramp_scores(y: np.ndarray, cfg: ArrayConfig, grid: np.ndarray) -> np.ndarray:
    """(n_beams, n_grid) matched-filter magnitudes of the range ramp."""
    return np.abs(y @ _subcarrier_ramp(cfg, grid).conj().T)


def _fused_ramp_distance(y, w, ec: EstimatorConfig, cfg: ArrayConfig) -> float:
    """Two-stage range estimate fusing matched-filter scores across beams."""
    coarse = np.linspace(*ec.d_search, _RAMP_COARSE_STEPS)
    d0 = coarse[int(np.argmax(w @ _ramp_scores(y, cfg, coarse)))]
    fine = np.linspace(
        max(ec.d_search[0], d0 - _RAMP_FINE_HALF_M),
        min(ec.d_search[1], d0 + _RAMP_FINE_HALF_M),
        _RAMP_FINE_STEPS,
    )
    return float(fine[int(np.argmax(w @ _ramp_scores(y, cfg, fine)))])


def _el_at_height(z: float, d: float, cfg: ArrayConfig) -> float:
    return float(np.arcsin(np.clip((z - cfg.center[2]) / d, -1.0, 1.0)))


def _window(lo0: float, hi0: float, center: float, half: float) -> tuple:
    lo = max(lo0, center - half)
    return lo, min(hi0, center + half)


def _span_window(lo0: float, hi0: float, center: float, factor: float) -> tuple:
    width = (hi0 - lo0) / factor
    lo = float(np.clip(center - width / 2.0, lo0, hi0 - width))
    return lo, lo + width


def _masked_corr(steer: np.ndarray, book: Codebook, m: np.ndarray, y: np.ndarray):
    """Beam-space correlations per candidate and subcarrier, plus the norm."""
    sig = steer.conj() @ book.matrix
    den = np.sqrt(np.maximum((np.abs(sig) ** 2) @ m, 1e-300))
    return (sig * m) @ y, den


def _sweep_coherent(steer, book, m, y, grid, tq) -> float:
    """Argmax of the subcarrier-coherent correlation score along a grid.

    tq holds the conjugated-away ramp: one row per candidate for range
    sweeps, a single vector of the current range iterate for angle sweeps.
    """
    per_q, den = _masked_corr(steer, book, m, y)
    if tq.ndim == 1:
        coh = per_q @ tq.conj()
    else:
        coh = (per_q * tq.conj()).sum(axis=1)
    return float(grid[int(np.argmax(np.abs(coh) / den))])


def _point_score(steer_row, book, m, y, tq) -> float:
    per_q, den = _masked_corr(steer_row[None, :], book, m, y)
    return float(np.abs(per_q[0] @ tq.conj()) / den[0])


def _nf_steer_at(cfg, center, d_vals, az_vals, el_vals) -> np.ndarray:
    pts = center + np.atleast_1d(d_vals)[:, None] * direction(az_vals, el_vals)
    return nf_steering_many(cfg, pts, q=1)


# ---------------------------------------------------------------------------
# far-field pipeline


def _ff_scan_peaks(d, y, m, ec, cfg, book) -> list:
    """Separated top peaks of the coherent score on a global az/height grid."""
    azg = np.linspace(*ec.az_search, _FF_SCAN_AZ)
    zg = np.linspace(*ec.z_search, _FF_SCAN_Z)
    A2, Z2 = np.meshgrid(azg, zg, indexing="ij")
    els = np.arcsin(np.clip((Z2.ravel() - cfg.center[2]) / d, -1.0, 1.0))
    per_q, den = _masked_corr(ff_steering_many(cfg, A2.ravel(), els), book, m, y)
    sc = (np.abs(per_q @ _subcarrier_ramp(cfg, d).conj()) / den).reshape(
        _FF_SCAN_AZ, _FF_SCAN_Z
    )
    envelope = sc.max(axis=1)
    z_at = zg[np.argmax(sc, axis=1)]
    order = np.argsort(envelope)[::-1]
    picks = []
    for i in order:
        if all(abs(azg[i] - azg[j]) >= _FF_START_SEP for j in picks):
            picks.append(i)
            if len(picks) == _FF_STARTS:
                break
    return [(float(azg[i]), float(z_at[i])) for i in picks]


def _ff_refine(d, az, z, m, y, ec, cfg, book, tq):
    """Alternating azimuth/height sweeps inside a halving trust region."""
    half_a, half_z = _FF_TRUST_AZ, _FF_TRUST_Z
    for _ in range(ec.iters_outer):
        el = _el_at_height(z, d, cfg)
        g = np.linspace(*_window(*ec.az_search, az, half_a), ec.steps_theta)
        az = _sweep_coherent(
            ff_steering_many(cfg, g, np.full_like(g, el)), book, m, y, g, tq
        )
        g = np.linspace(*_window(*ec.z_search, z, half_z), ec.steps_theta)
        els = np.arcsin(np.clip((g - cfg.center[2]) / d, -1.0, 1.0))
        z = _sweep_coherent(
            ff_steering_many(cfg, np.full_like(els, az), els), book, m, y, g, tq
        )
        half_a /= _FF_TRUST_SHRINK
        half_z /= _FF_TRUST_SHRINK
    return az, z


def _estimate_ff_refined(y, noise_mw, book, ec, cfg, bw) -> PositionEstimate:
    m = np.where(bw.w > 0.0, 1.0, 0.0) + _MASK_RIDGE
    d_hat = _fused_ramp_distance(y, bw.w, ec, cfg)
    tq = _subcarrier_ramp(cfg, d_hat)
    best, best_score, trace = None, -1.0, []
    for az0, z0 in _ff_scan_peaks(d_hat, y, m, ec, cfg, book):
        az, z = _ff_refine(d_hat, az0, z0, m, y, ec, cfg, book, tq)
        el = _el_at_height(z, d_hat, cfg)
        score = _point_score(
            ff_steering_many(cfg, az, el)[0], book, m, y, tq
        )
        trace.append(score)
        if score > best_score:
            best_score, best = score, (az, el)
    sph = SphericalCoord(d=d_hat, az=best[0], el=best[1])
    return PositionEstimate(
        p_hat=sph_to_cart(sph, cfg.center_arr),
        sph_hat=sph,
        scheme_used="FF",
        weights=bw,
        iterations_run=ec.iters_outer,
        objective_trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# strict mode: alternating maximization on fixed full-interval grids
#
# Every scan takes the argmax of the same scalar score the refined mode
# uses, so an exhaustive maximization of that score over the full 3-D grid
# is a drop-in oracle for these pipelines.


def _strict_score(steer_row, book, m, y, d: float, cfg) -> float:
    return _point_score(steer_row, book, m, y, _subcarrier_ramp(cfg, d))


def _estimate_ff_strict(y, book, ec, cfg, bw) -> PositionEstimate:
    m = np.where(bw.w > 0.0, 1.0, 0.0) + _MASK_RIDGE
    az_hat, el_hat = (float(v) for v in book.angles[int(np.argmax(bw.w))])
    d_hat = None
    d_grid = np.linspace(*ec.d_search, ec.steps_d)
    ramps = _subcarrier_ramp(cfg, d_grid)
    az_grid = np.linspace(*ec.az_search, ec.steps_theta)
    el_grid = np.linspace(*ec.el_search, ec.steps_theta)
    trace = []
    for _ in range(ec.iters_outer):
        # steering is angle-only, so the range scan reuses one correlation row
        per_q, den = _masked_corr(
            ff_steering_many(cfg, az_hat, el_hat), book, m, y
        )
        d_hat = float(d_grid[int(np.argmax(np.abs(ramps.conj() @ per_q[0]) / den[0]))])
        tq = _subcarrier_ramp(cfg, d_hat)
        az_hat = _sweep_coherent(
            ff_steering_many(cfg, az_grid, np.full_like(az_grid, el_hat)),
            book, m, y, az_grid, tq,
        )
        el_hat = _sweep_coherent(
            ff_steering_many(cfg, np.full_like(el_grid, az_hat), el_grid),
            book, m, y, el_grid, tq,
        )
        trace.append(
            _strict_score(ff_steering_many(cfg, az_hat, el_hat)[0], book, m, y, d_hat, cfg)
        )
    sph = SphericalCoord(d=d_hat, az=az_hat, el=el_hat)
    return PositionEstimate(
        p_hat=sph_to_cart(sph, cfg.center_arr),
        sph_hat=sph,
        scheme_used="FF",
        weights=bw,
        iterations_run=ec.iters_outer,
        objective_trace=tuple(trace),
    )


def _estimate_nf_strict(y, book, ec, cfg, bw) -> PositionEstimate:
    m = np.where(bw.w > 0.0, 1.0, 0.0) + _MASK_RIDGE
    center = cfg.center_arr
    seed = cart_to_sph(book.points[int(np.argmax(bw.w))], center)
    d_hat, az_hat, el_hat = seed.d, seed.az, seed.el
    d_grid = np.linspace(*ec.d_search, ec.steps_d)
    ramps = _subcarrier_ramp(cfg, d_grid)
    az_grid = np.linspace(*ec.az_search, ec.steps_theta)
    el_grid = np.linspace(*ec.el_search, ec.steps_theta)
    trace = []
    for _ in range(ec.iters_outer):
        steer = _nf_steer_at(
            cfg, center, d_grid, np.full_like(d_grid, az_hat), np.full_like(d_grid, el_hat)
        )
        d_hat = _sweep_coherent(steer, book, m, y, d_grid, ramps)
        tq = _subcarrier_ramp(cfg, d_hat)
        steer = _nf_steer_at(
            cfg, center, np.full_like(az_grid, d_hat), az_grid, np.full_like(az_grid, el_hat)
        )
        az_hat = _sweep_coherent(steer, book, m, y, az_grid, tq)
        steer = _nf_steer_at(
            cfg, center, np.full_like(el_grid, d_hat), np.full_like(el_grid, az_hat), el_grid
        )
        el_hat = _sweep_coherent(steer, book, m, y, el_grid, tq)
        p_it = center + d_hat * direction(az_hat, el_hat)
        trace.append(
            _strict_score(nf_steering_many(cfg, p_it[None, :], q=1)[0], book, m, y, d_hat, cfg)
        )
    sph = SphericalCoord(d=d_hat, az=az_hat, el=el_hat)
    return PositionEstimate(
        p_hat=sph_to_cart(sph, center),
        sph_hat=sph,
        scheme_used="NF",
        weights=bw,
        iterations_run=ec.iters_outer,
        objective_trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# near-field pipeline


def _nf_joint_seed(r, m, y, ec, cfg, book, tq) -> tuple:
    """Joint azimuth/height scan at the ramp range; short-range seeding."""
    azs = np.linspace(*ec.az_search, _NF_JOINT_AZ)
    zs = np.linspace(*ec.z_search, _NF_JOINT_Z)
    A2, Z2 = np.meshgrid(azs, zs, indexing="ij")
    els = np.arcsin(np.clip((Z2.ravel() - cfg.center[2]) / r, -1.0, 1.0))
    steer = _nf_steer_at(cfg, cfg.center_arr, np.full(A2.size, r), A2.ravel(), els)
    per_q, den = _masked_corr(steer, book, m, y)
    sc = np.abs(per_q @ tq.conj()) / den
    k = int(np.argmax(sc))
    return float(A2.ravel()[k]), float(Z2.ravel()[k])


def _nf_core(y, m, r, az, z, ec, cfg, book, lock=False):
    """Alternating range/azimuth/height sweeps with shrinking windows.

    Range windows are anchored at the ramp estimate r; azimuth and height
    open at the full intervals on the first pass (seeded runs skip that).
    """
    center = cfg.center_arr
    d = r
    base = 1 if lock else 0
    trace = []
    for it in range(1, ec.iters_outer + 1):
        half = _RAMP_WINDOW_M / _NF_SHRINK ** (it - 1)
        dw = _window(*ec.d_search, r, half)
        if it == 1 and not lock:
            aw, zw = ec.az_search, ec.z_search
        else:
            f = _NF_SHRINK ** (it - 1 + base)
            aw = _span_window(*ec.az_search, az, f)
            zw = _span_window(*ec.z_search, z, f)
        g = np.linspace(*dw, ec.steps_d)
        els = np.arcsin(np.clip((z - cfg.center[2]) / g, -1.0, 1.0))
        steer = _nf_steer_at(cfg, center, g, np.full_like(g, az), els)
        d = _sweep_coherent(steer, book, m, y, g, _subcarrier_ramp(cfg, g))
        tq = _subcarrier_ramp(cfg, d)
        el = _el_at_height(z, d, cfg)
        g = np.linspace(*aw, ec.steps_theta)
        steer = _nf_steer_at(cfg, center, np.full_like(g, d), g, np.full_like(g, el))
        az = _sweep_coherent(steer, book, m, y, g, tq)
        g = np.linspace(*zw, ec.steps_theta)
        els = np.arcsin(np.clip((g - cfg.center[2]) / d, -1.0, 1.0))
        steer = _nf_steer_at(cfg, center, np.full_like(g, d), np.full_like(els, az), els)
        z = _sweep_coherent(steer, book, m, y, g, tq)
        p_it = center + d * direction(az, _el_at_height(z, d, cfg))
        trace.append(
            _point_score(nf_steering_many(cfg, p_it[None, :], q=1)[0], book, m, y, tq)
        )
    return d, az, z, trace


def _nf_lock(y, m, r, az, z, ec, cfg, book):
    """Short local descent around a candidate basin; used for the mirror."""
    center = cfg.center_arr
    wl = float(np.clip(abs(az) - np.radians(1.0), np.radians(2.5), np.radians(8.0)))
    d = r
    for _ in range(_NF_LOCK_ITERS):
        g = np.linspace(*_window(*ec.d_search, r, _NF_LOCK_D_HALF_M), _NF_LOCK_STEPS)
        els = np.arcsin(np.clip((z - cfg.center[2]) / g, -1.0, 1.0))
        steer = _nf_steer_at(cfg, center, g, np.full_like(g, az), els)
        d = _sweep_coherent(steer, book, m, y, g, _subcarrier_ramp(cfg, g))
        tq = _subcarrier_ramp(cfg, d)
        g = np.linspace(*_window(*ec.az_search, az, wl), _NF_LOCK_STEPS)
        el = _el_at_height(z, d, cfg)
        steer = _nf_steer_at(cfg, center, np.full_like(g, d), g, np.full_like(g, el))
        az = _sweep_coherent(steer, book, m, y, g, tq)
        g = np.linspace(*_window(*ec.z_search, z, _NF_LOCK_Z_HALF_M), _NF_LOCK_STEPS)
        els = np.arcsin(np.clip((g - cfg.center[2]) / d, -1.0, 1.0))
        steer = _nf_steer_at(cfg, center, np.full_like(g, d), np.full_like(els, az), els)
        z = _sweep_coherent(steer, book, m, y, g, tq)
    return d, az, z


def _energy_profile_score(d, az, z, y, noise_mw, cfg, book) -> float:
    """Cosine between observed beam energies and the candidate's profile."""
    p = cfg.center_arr + d * direction(az, _el_at_height(z, d, cfg))
    a = nf_steering_many(cfg, p[None, :], q=1)[0]
    e = np.abs(a.conj() @ book.matrix) ** 2
    e /= max(float((np.abs(a) ** 2).sum()), 1e-300)
    o = np.maximum((np.abs(y) ** 2).sum(axis=1) - y.shape[1] * noise_mw, 0.0)
    return float((e @ o) / (np.linalg.norm(e) * np.linalg.norm(o) + 1e-300))


def _estimate_nf_refined(y, noise_mw, book, ec, cfg, bw) -> PositionEstimate:
    m = np.where(bw.w > 0.0, 1.0, 0.0) + _MASK_RIDGE
    r = _fused_ramp_distance(y, bw.w, ec, cfg)
    seed = cart_to_sph(book.points[int(np.argmax(bw.w))], cfg.center_arr)
    az0 = seed.az
    z0 = float(np.clip(cfg.center[2] + seed.d * np.sin(seed.el), *ec.z_search))
    if r < _NF_JOINT_BELOW_M:
        az0, z0 = _nf_joint_seed(r, m, y, ec, cfg, book, _subcarrier_ramp(cfg, r))
    d, az, z, trace = _nf_core(y, m, r, az0, z0, ec, cfg, book)
    if abs(az) > _NF_MIRROR_MIN_AZ:
        cands = [
            _nf_lock(y, m, r, az, z, ec, cfg, book),
            _nf_lock(y, m, r, -az, z, ec, cfg, book),
            (d, az, z),
        ]
        d, az, z = max(
            cands, key=lambda c: _energy_profile_score(c[0], c[1], c[2], y, noise_mw, cfg, book)
        )
    sph = SphericalCoord(d=d, az=az, el=_el_at_height(z, d, cfg))
    return PositionEstimate(
        p_hat=sph_to_cart(sph, cfg.center_arr),
        sph_hat=sph,
        scheme_used="NF",
        weights=bw,
        iterations_run=ec.iters_outer,
        objective_trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# public entry points


def estimate_ff(rx, book: Codebook, ec: EstimatorConfig, cfg: ArrayConfig) -> PositionEstimate:
    """Planar-wavefront localization from a steered-codebook sweep."""
    y, noise_mw = _rx_array(rx)
    _check_rx(y, book, cfg)
    bw = rssi_weights(y, ec.eps_w)
    if bw.n_active == 0:
        raise AllBeamsSuppressed("no beam weight above the floor")
    if ec.strict:
        return _estimate_ff_strict(y, book, ec, cfg, bw)
    return _estimate_ff_refined(y, noise_mw, book, ec, cfg, bw)


def estimate_nf(rx, book: Codebook, ec: EstimatorConfig, cfg: ArrayConfig) -> PositionEstimate:
    """Spherical-wavefront localization from a focused-codebook sweep."""
    y, noise_mw = _rx_array(rx)
    _check_rx(y, book, cfg)
    if book.points is None:
        raise DimensionMismatch("codebook lacks focus points")
    bw = rssi_weights(y, ec.eps_w)
    if bw.n_active == 0:
        raise AllBeamsSuppressed("no beam weight above the floor")
    if ec.strict:
        return _estimate_nf_strict(y, book, ec, cfg, bw)
    return _estimate_nf_refined(y, noise_mw, book, ec, cfg, bw)


def localize_adaptive(
    true_p,
    steer_book: Codebook,
    focus_book: Codebook,
    ec: EstimatorConfig,
    cfg: ArrayConfig,
    lb: LinkBudget,
    d_nf: float,
    seed: int,
    ec_nf: EstimatorConfig | None = None,
) -> PositionEstimate:
    """One-shot adaptive localization against the exact propagation model.

    Signals first with the steered codebook and localizes under the planar
    assumption; if the range estimate exceeds d_nf that result stands,
    otherwise the user is re-signalled with the focused codebook and
    relocalized under the spherical model (scheme tag FF_then_NF).
    """
    rng = np.random.default_rng(seed)
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    seed_ff = int(rng.integers(2**63))
    seed_nf = int(rng.integers(2**63))
    channel = nf_channel(cfg, true_p, phase)
    first = estimate_ff(
        synthesize_rx(channel, steer_book, lb, seed_ff), steer_book, ec, cfg
    )
    if first.sph_hat.d > d_nf:
        return first
    second = estimate_nf(
        synthesize_rx(channel, focus_book, lb, seed_nf),
        focus_book,
        ec_nf if ec_nf is not None else ec,
        cfg,
    )
    return replace(second, scheme_used="FF_then_NF")
