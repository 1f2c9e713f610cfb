import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfloc import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    ChannelMatrix,
    DimensionMismatch,
    ZeroDistance,
    antenna_positions,
    delay_ramp_period,
    ff_channel,
    ff_equivalent,
    ff_steering,
    ff_steering_many,
    model_gap,
    nf_channel,
    nf_steering,
    nf_steering_many,
    path_scalar,
    sph_to_cart,
    subcarrier_wavelength,
    t_vector,
)
from nfloc.geometry import SphericalCoord


def test_path_scalar_oracle():
    lam = 0.0125
    val = path_scalar(10.0, 0.0, lam)
    assert val == pytest.approx(lam / (4.0 * np.pi * 10.0))
    rot = path_scalar(10.0, np.pi / 2, lam)
    assert rot == pytest.approx(val * np.exp(-1j * np.pi / 2))
    with pytest.raises(ZeroDistance):
        path_scalar(0.0, 0.0, lam)


def test_nf_steering_matches_elementwise_formula(small_cfg):
    p = np.array([1.2, 4.0, 1.4])
    q = 3
    a = nf_steering(small_cfg, p, q)
    pos = antenna_positions(small_cfg)
    lam_q = subcarrier_wavelength(small_cfg, q)
    d = np.linalg.norm(p - small_cfg.center_arr)
    for n in (0, 7, 31, 63):
        r = np.linalg.norm(p - pos[n])
        expect = (lam_q / small_cfg.wavelength) * (d / r) * np.exp(-2j * np.pi * r / lam_q)
        assert a[n] == pytest.approx(expect, rel=1e-12)


def test_nf_steering_many_consistent(small_cfg, rng):
    pts = np.column_stack([
        rng.uniform(-3, 3, 5), rng.uniform(2, 20, 5), rng.uniform(1, 1.5, 5)
    ])
    batch = nf_steering_many(small_cfg, pts, q=2)
    for g in range(5):
        assert np.allclose(batch[g], nf_steering(small_cfg, pts[g], q=2))


def test_nf_steering_rejects_element_hit(small_cfg):
    pos = antenna_positions(small_cfg)
    with pytest.raises(ZeroDistance):
        nf_steering(small_cfg, pos[5])


def test_ff_steering_unit_modulus_and_broadside(small_cfg):
    a = ff_steering(small_cfg, 0.3, -0.2)
    assert np.allclose(np.abs(a), 1.0)
    # broadside direction is orthogonal to every element offset
    assert np.allclose(ff_steering(small_cfg, 0.0, 0.0), 1.0)


def test_ff_steering_matches_elementwise_formula(small_cfg):
    az, el = 0.4, -0.25
    a = ff_steering(small_cfg, az, el)
    pos = antenna_positions(small_cfg) - small_cfg.center_arr
    u = np.array([np.cos(el) * np.sin(az), np.cos(el) * np.cos(az), np.sin(el)])
    expect = np.exp(2j * np.pi / small_cfg.wavelength * pos @ u)
    assert np.allclose(a, expect)


def test_ff_steering_many_consistent(small_cfg):
    az = np.array([-0.5, 0.0, 0.4])
    el = np.array([-0.3, -0.1, 0.0])
    batch = ff_steering_many(small_cfg, az, el)
    for g in range(3):
        assert np.allclose(batch[g], ff_steering(small_cfg, az[g], el[g]))


def test_t_vector_oracle(cfg):
    t = t_vector(cfg, 17.0)
    assert t[0] == 1.0 + 0.0j
    k = 5
    expect = np.exp(-2j * np.pi * k * 750e3 / SPEED_OF_LIGHT * 17.0)
    assert t[k] == pytest.approx(expect, rel=1e-12)
    assert np.allclose(np.abs(t), 1.0)


@given(d=st.floats(0.5, 300.0), m=st.integers(-2, 2))
@settings(max_examples=40, deadline=None)
def test_t_vector_periodicity(d, m):
    cfg = ArrayConfig(n_x=2, n_z=2, n_subcarriers=6)
    period = delay_ramp_period(cfg)
    assert period == pytest.approx(SPEED_OF_LIGHT / cfg.subcarrier_step_hz)
    base = t_vector(cfg, d)
    shifted = t_vector(cfg, d + m * period)
    assert np.allclose(base, shifted, atol=1e-9)


def test_nf_channel_columns(small_cfg):
    p = np.array([0.5, 6.0, 1.1])
    h = nf_channel(small_cfg, p, 0.8)
    assert h.model == "NF"
    assert h.entries.shape == (small_cfg.n_elements, small_cfg.n_subcarriers)
    d = np.linalg.norm(p - small_cfg.center_arr)
    beta = path_scalar(d, 0.8, small_cfg.wavelength)
    assert np.allclose(h.entries[:, 2], beta * nf_steering(small_cfg, p, 3))


def test_ff_channel_rank_one(small_cfg):
    sph = SphericalCoord(9.0, 0.2, -0.1)
    h = ff_channel(small_cfg, sph, 0.0)
    assert h.model == "FF"
    assert np.linalg.matrix_rank(h.entries) == 1
    beta = path_scalar(9.0, 0.0, small_cfg.wavelength)
    expect = beta * np.outer(ff_steering(small_cfg, 0.2, -0.1), t_vector(small_cfg, 9.0))
    assert np.allclose(h.entries, expect)


def test_channel_matrix_validation():
    with pytest.raises(DimensionMismatch):
        ChannelMatrix(entries=np.zeros(4, dtype=complex), model="NF")
    with pytest.raises(DimensionMismatch):
        ChannelMatrix(entries=np.zeros((2, 2), dtype=complex), model="XX")


def test_model_gap_zero_on_identical(small_cfg):
    h = nf_channel(small_cfg, [1.0, 5.0, 1.3], 0.3)
    assert model_gap(h, h) == pytest.approx(0.0, abs=1e-12)


def test_model_gap_phase_invariant(small_cfg):
    h = nf_channel(small_cfg, [1.0, 5.0, 1.3], 0.3)
    g = ff_equivalent(small_cfg, [1.0, 5.0, 1.3], 0.3)
    base = model_gap(h, g)
    rot = ChannelMatrix(entries=g.entries * np.exp(1j * 1.234), model="FF")
    assert model_gap(h, rot) == pytest.approx(base, abs=1e-10)


def test_model_gap_shape_check(small_cfg):
    h = nf_channel(small_cfg, [1.0, 5.0, 1.3], 0.0)
    other = ChannelMatrix(entries=h.entries[:, :2], model="NF")
    with pytest.raises(DimensionMismatch):
        model_gap(h, other)


def test_ff_to_nf_convergence_ladder(cfg):
    """Planar approximation error decays monotonically along a range ladder."""
    gaps = []
    for d in (2.0, 5.0, 10.0, 20.0, 40.0, 80.0):
        p = sph_to_cart((d, 0.3, -0.05), cfg.center_arr)
        gaps.append(model_gap(nf_channel(cfg, p, 0.0), ff_equivalent(cfg, p, 0.0)))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05
    assert gaps[0] > 0.2
