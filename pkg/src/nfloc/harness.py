"""Experiment harness: Monte Carlo sweeps, tracking, coverage maps, benchmark.

Every experiment consumes a resolved ExperimentConfig and returns a
ResultTable whose rows map one-to-one onto CSV lines.  Trial seeds are
spawned from numpy SeedSequence entropy [base, experiment, point, trial]
so any row can be reproduced in isolation.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .geometry import ArrayConfig, fraunhofer_distance, sph_to_cart
from .channel import nf_channel
from .codebooks import make_ff_codebook, make_nf_codebook
from .airlink import noise_power, snr_at, synthesize_rx
from .estimators import EstimatorConfig, estimate_ff, estimate_nf, localize_adaptive
from .bounds import position_error_bound
from .config import ExperimentConfig, config_echo

_EXP_CODE = {"rmse_sweep": 1, "snr_map": 2, "tracking": 3, "complexity": 4}

# spherical steering rebuild touches the element grid ~8 times per entry
# (three squared differences, accumulate, root, divide, trig pair)
_DIST_OPS = 8


@dataclass
class ResultTable:
    """Column-major-labelled row store with a metadata side channel."""

    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(",".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _cell(v) -> str:
    # numpy scalars subclass float, and their repr carries the dtype name
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def trial_seed(base: int, *tags: int) -> int:
    """Deterministic 63-bit seed from the base seed and integer tags."""
    state = np.random.SeedSequence([int(base)] + [int(t) for t in tags]).generate_state(2)
    return int((int(state[0]) << 31) ^ int(state[1]))


def _step_draws(seed: int):
    """Per-snapshot randomness: sync phase plus one noise seed per scheme.

    Matches the draw order inside localize_adaptive, so a direct estimator
    call sees exactly the channel and noise the adaptive pass would have.
    """
    rng = np.random.default_rng(seed)
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    return phase, int(rng.integers(2**63)), int(rng.integers(2**63))


def _rmse_and_se(errors: np.ndarray):
    """RMSE with a delta-method standard error from the squared errors."""
    sq = np.square(np.asarray(errors, dtype=float))
    rmse = float(np.sqrt(sq.mean()))
    if rmse == 0.0 or sq.size < 2:
        return rmse, 0.0
    se_mean_sq = float(sq.std(ddof=1) / np.sqrt(sq.size))
    return rmse, se_mean_sq / (2.0 * rmse)


def _books(xc: ExperimentConfig):
    f1 = make_ff_codebook(xc.array, xc.region, xc.n_steering)
    f2 = make_nf_codebook(xc.array, xc.region, xc.n_focusing)
    return f1, f2


def run_rmse_sweep(xc: ExperimentConfig) -> ResultTable:
    """Localization RMSE of both schemes over the range ladder.

    Each trial draws an independent user position at the ladder range,
    a sync phase, and fresh noise; both estimators see the exact
    spherical-wave channel.  Error bounds are averaged over the same
    trial positions, one bound per channel model with its own codebook.
    """
    cfg, region, lb = xc.array, xc.region, xc.budget
    f1, f2 = _books(xc)
    est = xc.estimator()
    d_f = fraunhofer_distance(cfg)
    code = _EXP_CODE["rmse_sweep"]
    table = ResultTable(
        columns=[
            "experiment", "d_m", "scheme", "rmse_m", "stderr_m", "trials",
            "seed", "peb_nf_m", "peb_ff_m", "d_f_m",
        ],
        meta={"experiment": "rmse_sweep", "seed": xc.seed, "trials": xc.trials,
              "d_f_m": d_f, "ladder_m": list(xc.ladder)},
    )
    for i_d, d in enumerate(xc.ladder):
        errs = {"FF": [], "NF": []}
        pebs = {"FF": [], "NF": []}
        for t in range(xc.trials):
            seed_t = trial_seed(xc.seed, code, i_d, t)
            rng = np.random.default_rng(seed_t)
            sph = region.sample(rng, d, cfg.center[2])
            p = sph_to_cart(sph, cfg.center_arr)
            phase = float(rng.uniform(0.0, 2.0 * np.pi))
            s_ff = int(rng.integers(2**63))
            s_nf = int(rng.integers(2**63))
            h = nf_channel(cfg, p, phase)
            e_ff = estimate_ff(synthesize_rx(h, f1, lb, s_ff), f1, est, cfg)
            e_nf = estimate_nf(synthesize_rx(h, f2, lb, s_nf), f2, est, cfg)
            errs["FF"].append(np.linalg.norm(e_ff.p_hat - p))
            errs["NF"].append(np.linalg.norm(e_nf.p_hat - p))
            pebs["FF"].append(position_error_bound(p, f1, cfg, lb, "FF"))
            pebs["NF"].append(position_error_bound(p, f2, cfg, lb, "NF"))
        peb_nf = float(np.mean(pebs["NF"]))
        peb_ff = float(np.mean(pebs["FF"]))
        for scheme in ("FF", "NF"):
            rmse, se = _rmse_and_se(np.array(errs[scheme]))
            table.rows.append([
                "rmse_sweep", float(d), scheme, rmse, se, xc.trials,
                trial_seed(xc.seed, code, i_d), peb_nf, peb_ff, d_f,
            ])
    return table


def run_snr_map(xc: ExperimentConfig) -> ResultTable:
    """Best-beam post-combining SNR of both codebooks over the region."""
    cfg, region, lb = xc.array, xc.region, xc.budget
    f1, f2 = _books(xc)
    d_f = fraunhofer_distance(cfg)
    az_vals = np.linspace(region.az_range[0], region.az_range[1], xc.snr_map.n_az)
    d_vals = np.linspace(region.d_range[0], region.d_range[1], xc.snr_map.n_d)
    z = xc.snr_map.z_m
    table = ResultTable(
        columns=["az_rad", "d_m", "x_m", "y_m", "z_m", "snr_ff_db", "snr_nf_db"],
        meta={"experiment": "snr_map", "d_f_m": d_f, "z_m": z,
              "noise_dbm": noise_power(lb)},
    )
    dz = z - cfg.center[2]
    for d in d_vals:
        el = float(np.arcsin(np.clip(dz / d, -1.0, 1.0)))
        for az in az_vals:
            p = sph_to_cart((float(d), float(az), el), cfg.center_arr)
            h = nf_channel(cfg, p, 0.0)
            table.rows.append([
                float(az), float(d), float(p[0]), float(p[1]), float(p[2]),
                snr_at(h, f1, lb), snr_at(h, f2, lb),
            ])
    near = [r for r in table.rows if r[1] < d_f]
    far_edge = [r for r in table.rows if r[1] == d_vals[-1]]
    if near:
        table.meta["min_near_gain_db"] = min(r[6] - r[5] for r in near)
    if far_edge:
        table.meta["max_far_edge_abs_diff_db"] = max(abs(r[6] - r[5]) for r in far_edge)
    return table


def run_tracking(xc: ExperimentConfig) -> ResultTable:
    """Inward radial walk under fixed, adaptive, and single-scheme policies.

    All strategies share per-(trial, step) seeds, so they face identical
    user draws and noise; differences in the rows are purely algorithmic.
    The adaptive policy stays with steered beams while the range estimate
    sits above the handover range, then commits to focused beams for the
    rest of the walk.
    """
    cfg, region, lb = xc.array, xc.region, xc.budget
    f1, f2 = _books(xc)
    track = xc.tracking
    est = xc.estimator()
    code = _EXP_CODE["tracking"]
    path_d = np.linspace(track.d_start_m, track.d_stop_m, track.steps)

    # each trial walks radially inward along its own bearing and height so
    # the fleet of walks covers the region instead of one privileged cut
    walks = []
    for t in range(xc.trials):
        rng = np.random.default_rng(trial_seed(xc.seed, code, t))
        az_t = float(rng.uniform(*region.az_range))
        z_t = float(rng.uniform(*region.z_range))
        dz = z_t - cfg.center[2]
        walks.append([
            sph_to_cart((float(d), az_t, float(np.arcsin(np.clip(dz / d, -1.0, 1.0)))),
                        cfg.center_arr)
            for d in path_d
        ])

    strategies = [("ff_only", None), ("nf_only", None)]
    strategies += [(f"adaptive_{d_nf:g}", float(d_nf)) for d_nf in xc.d_nf_list]

    table = ResultTable(
        columns=["strategy", "d_nf_m", "step", "d_m", "rmse_m", "stderr_m",
                 "trials", "seed", "ff_usage_pct"],
        meta={"experiment": "tracking", "seed": xc.seed, "trials": xc.trials,
              "steps": track.steps, "d_f_m": fraunhofer_distance(cfg),
              "reference_ff_usage_pct": {"10": 25.82, "12.5": 31.0, "15": 37.32},
              "strategies": {}},
    )
    for i_s, (name, d_nf) in enumerate(strategies):
        step_err = np.zeros((xc.trials, track.steps))
        step_ff = np.zeros((xc.trials, track.steps), dtype=bool)
        for t in range(xc.trials):
            on_ff = True
            for k, p in enumerate(walks[t]):
                seed_k = trial_seed(xc.seed, code, t, k)
                if name == "ff_only":
                    e = localize_adaptive(p, f1, f2, est, cfg, lb, 0.0, seed_k)
                elif name == "nf_only" or not on_ff:
                    phase, _s1, s2 = _step_draws(seed_k)
                    h = nf_channel(cfg, p, phase)
                    e = estimate_nf(synthesize_rx(h, f2, lb, s2), f2, est, cfg)
                else:
                    e = localize_adaptive(p, f1, f2, est, cfg, lb, d_nf, seed_k)
                    if e.scheme_used != "FF":
                        on_ff = False
                step_err[t, k] = np.linalg.norm(e.p_hat - p)
                step_ff[t, k] = e.scheme_used == "FF"
        ff_pct = 100.0 * float(step_ff.mean())
        for k, d in enumerate(path_d):
            rmse, se = _rmse_and_se(step_err[:, k])
            table.rows.append([
                name, -1.0 if d_nf is None else d_nf, k, float(d), rmse, se,
                xc.trials, trial_seed(xc.seed, code, i_s, k), ff_pct,
            ])
        path_rmse = np.sqrt(np.square(step_err).mean(axis=1))
        table.meta["strategies"][name] = {
            "d_nf_m": d_nf,
            "ff_usage_pct": ff_pct,
            "mean_path_rmse_m": float(path_rmse.mean()),
            "se_path_rmse_m": float(path_rmse.std(ddof=1) / np.sqrt(xc.trials))
            if xc.trials > 1 else 0.0,
        }
    return table


def algorithm_cost_model(j1: int, j2: int, est: EstimatorConfig, cfg: ArrayConfig) -> dict:
    """Leading-order operation counts for one run of each search.

    The steered search splits into a per-beam range scan over the pilot
    ramp and two angle scans that rebuild the steering vector and the
    weighted codebook product at every step and subcarrier.  The focused
    search prices three spatial scans whose steering rebuild needs an
    exact distance per element on top of the codebook product.
    """
    n = cfg.n_elements
    q = cfg.n_subcarriers
    i_d = est.steps_d
    i_th = est.steps_theta
    iters = est.iters_outer
    range_scan = iters * i_d * j1 * 2 * q
    angle_scan = 2 * iters * i_th * q * (n + n * n * j1)
    alg1 = range_scan + angle_scan
    alg2 = iters * q * (i_d + 2 * i_th) * (_DIST_OPS * n + n * n * j2)
    return {
        "alg1_range_scan": float(range_scan),
        "alg1_angle_scan": float(angle_scan),
        "alg1_total": float(alg1),
        "alg2_total": float(alg2),
        "predicted_ratio": float(alg2 / alg1),
    }


def _median_time(fn, runs: int, warmup: int) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def run_complexity_bench(xc: ExperimentConfig) -> ResultTable:
    """Wall-clock cost of both searches as the focused codebook grows.

    Times the fixed-grid mode, whose alternating scans are what the
    operation-count model prices; both schemes run the identical
    estimator config.  BLAS pools are pinned to one thread so ratios
    reflect serial work.
    """
    cfg, region, lb = xc.array, xc.region, xc.budget
    bench = xc.bench
    est = xc.estimator(
        steps_d=bench.steps_d,
        steps_theta=bench.steps_theta,
        eps_w=0.0,
        iters_outer=3,
        strict=True,
    )
    code = _EXP_CODE["complexity"]
    j1 = xc.n_steering
    f1 = make_ff_codebook(cfg, region, j1)
    el = float(np.arcsin(np.clip((bench.z_m - cfg.center[2]) / bench.d_m, -1.0, 1.0)))
    p = sph_to_cart((bench.d_m, bench.az_rad, el), cfg.center_arr)
    h = nf_channel(cfg, p, 0.7)
    rx1 = synthesize_rx(h, f1, lb, trial_seed(xc.seed, code, 0))
    table = ResultTable(
        columns=["j1", "j2", "algorithm", "median_s", "norm_time",
                 "predicted_ops", "norm_predicted", "runs", "seed"],
        meta={"experiment": "complexity", "seed": xc.seed, "runs": bench.runs,
              "steps_d": bench.steps_d, "steps_theta": bench.steps_theta,
              "ratios": {}},
    )
    raw = []
    with threadpool_limits(limits=1):
        for factor in bench.j2_factors:
            j2 = j1 * factor
            f2 = make_nf_codebook(cfg, region, j2)
            rx2 = synthesize_rx(h, f2, lb, trial_seed(xc.seed, code, factor))
            t_ff = _median_time(lambda: estimate_ff(rx1, f1, est, cfg),
                                bench.runs, bench.warmup)
            t_nf = _median_time(lambda: estimate_nf(rx2, f2, est, cfg),
                                bench.runs, bench.warmup)
            counts = algorithm_cost_model(j1, j2, est, cfg)
            raw.append((j1, j2, "far_field", t_ff, counts["alg1_total"]))
            raw.append((j1, j2, "near_field", t_nf, counts["alg2_total"]))
            table.meta["ratios"][f"{j2}:{j1}"] = {
                "measured": t_nf / t_ff,
                "predicted": counts["predicted_ratio"],
            }
    t_max = max(r[3] for r in raw)
    ops_max = max(r[4] for r in raw)
    for j1_, j2_, alg, t, ops in raw:
        table.rows.append([
            j1_, j2_, alg, t, t / t_max, ops, ops / ops_max,
            bench.runs, trial_seed(xc.seed, code),
        ])
    return table


def run_bound_curve(xc: ExperimentConfig) -> ResultTable:
    """Position error bound of each model along the range ladder."""
    cfg, region, lb = xc.array, xc.region, xc.budget
    f1, f2 = _books(xc)
    z_mid = 0.5 * (region.z_range[0] + region.z_range[1])
    table = ResultTable(
        columns=["d_m", "peb_nf_m", "peb_ff_m"],
        meta={"experiment": "peb", "d_f_m": fraunhofer_distance(cfg)},
    )
    for d in xc.ladder:
        el = float(np.arcsin(np.clip((z_mid - cfg.center[2]) / d, -1.0, 1.0)))
        p = sph_to_cart((float(d), 0.0, el), cfg.center_arr)
        table.rows.append([
            float(d),
            position_error_bound(p, f2, cfg, lb, "NF"),
            position_error_bound(p, f1, cfg, lb, "FF"),
        ])
    return table


def write_manifest(path, xc: ExperimentConfig, experiment: str, outputs: list,
                   extra: dict | None = None) -> None:
    """Drop a JSON manifest describing one harness run."""
    from . import __version__

    payload = {
        "experiment": experiment,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": xc.seed,
        "d_f_m": fraunhofer_distance(xc.array),
        "outputs": [str(o) for o in outputs],
        "config": config_echo(xc),
    }
    if extra:
        payload["extra"] = extra
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
