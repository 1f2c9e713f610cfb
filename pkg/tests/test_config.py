"""Configuration resolution, validation, and echo round-trips."""

import json

import numpy as np
import pytest

from nfloc import (
    ParseError,
    ValidationError,
    build_experiment,
    config_echo,
    fraunhofer_distance,
    parse_config,
)


def test_empty_config_resolves_full_defaults():
    xc = build_experiment({})
    assert xc.seed == 1 and xc.trials == 100
    assert (xc.array.n_x, xc.array.n_z) == (24, 24)
    assert xc.array.carrier_hz == 24e9
    assert (xc.n_steering, xc.n_focusing) == (21, 84)
    assert xc.budget.noise_bw == 15e3  # null resolves to one pilot subcarrier
    assert xc.region.d_range == (1.0, 30.0)
    assert xc.region.z_range == (1.0, 1.5)
    np.testing.assert_allclose(xc.region.az_range, (-np.pi / 4, np.pi / 4))
    assert xc.d_nf_list == (10.0, 12.5, 15.0)
    assert xc.tracking.steps == 13
    assert xc.snr_map.n_az == 25 and xc.snr_map.z_m == 1.25
    assert xc.bench.j2_factors == (1, 2, 4)


def test_default_ladder_contains_regime_boundary_and_triple():
    xc = build_experiment({})
    d_f = fraunhofer_distance(xc.array)
    assert any(abs(v - d_f) < 1e-9 for v in xc.ladder)
    assert any(abs(v - 3.0 * d_f) < 1e-9 for v in xc.ladder)
    assert list(xc.ladder) == sorted(xc.ladder)
    lo, hi = xc.region.d_range
    assert all(lo <= v <= hi for v in xc.ladder)
    assert xc.ladder[0] == 1.0 and xc.ladder[-1] == 30.0


def test_ladder_respects_shrunk_region():
    xc = build_experiment({"region": {"d_m": [5.0, 20.0]}})
    assert xc.ladder[0] >= 5.0 and xc.ladder[-1] <= 20.0
    d_f = fraunhofer_distance(xc.array)
    assert any(abs(v - d_f) < 1e-9 for v in xc.ladder)
    assert any(abs(v - 3.0 * d_f) < 1e-9 for v in xc.ladder)


def test_explicit_ladder_kept_verbatim():
    xc = build_experiment({"ladder_m": [2.0, 7.5, 28.0]})
    assert xc.ladder == (2.0, 7.5, 28.0)


def test_unknown_keys_rejected_with_paths():
    with pytest.raises(ValidationError) as err:
        build_experiment({"tpyo": 1, "array": {"n_y": 4}})
    msg = str(err.value)
    assert "tpyo" in msg and "array.n_y" in msg


def test_violations_aggregate_into_one_error():
    with pytest.raises(ValidationError) as err:
        build_experiment({"trials": 0, "estimator": {"eps_w": 2.0}})
    msg = str(err.value)
    assert "trials" in msg and "eps_w" in msg


def test_cli_overrides_apply_and_none_is_skipped():
    xc = build_experiment({"trials": 50}, seed=9, trials=None, strict_paper=True)
    assert xc.seed == 9
    assert xc.trials == 50  # None override leaves the file value alone
    assert xc.strict_paper is True
    with pytest.raises(ValidationError):
        build_experiment({}, bogus=1)


def test_parse_error_reports_line_and_column(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"seed": 1,\n  "trials": }\n')
    with pytest.raises(ParseError) as err:
        parse_config(bad)
    msg = str(err.value)
    assert "line 2" in msg and "column" in msg and "bad.json" in msg


def test_parse_rejects_non_object_top_level(tmp_path):
    f = tmp_path / "arr.json"
    f.write_text("[1, 2, 3]\n")
    with pytest.raises(ParseError):
        parse_config(f)


def test_parse_config_reads_valid_file(tmp_path):
    f = tmp_path / "ok.json"
    f.write_text(json.dumps({"seed": 3, "codebooks": {"n_focusing": 36}}))
    xc = parse_config(f)
    assert xc.seed == 3 and xc.n_focusing == 36


def test_echo_is_serialisable_fixed_point():
    xc = build_experiment({"seed": 4, "region": {"d_m": [2.0, 12.0]}})
    echo = config_echo(xc)
    json.dumps(echo)  # must not choke on numpy scalars
    again = config_echo(build_experiment(echo))
    assert again == echo


def test_estimator_dispatch_refined_vs_strict():
    xc = build_experiment({})
    ec = xc.estimator()
    assert ec.strict is False
    assert ec.d_search == xc.region.d_range
    assert ec.z_search == xc.region.z_range
    assert (ec.steps_d, ec.steps_theta, ec.iters_outer) == (64, 48, 5)
    strict = build_experiment({"strict_paper": True}).estimator()
    assert strict.strict is True
    assert (strict.steps_d, strict.steps_theta) == (200, 180)
    assert strict.eps_w == 0.4
    bumped = xc.estimator(steps_d=10)
    assert bumped.steps_d == 10 and bumped.strict is False


def test_budget_noise_bw_override():
    xc = build_experiment({"budget": {"noise_bw_hz": 30e3}})
    assert xc.budget.noise_bw == 30e3


def test_tracking_path_must_run_inward():
    with pytest.raises(ValidationError):
        build_experiment({"tracking": {"d_start_m": 2.0, "d_stop_m": 9.0}})
