"""Fisher-information and position-bound invariants."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfloc import (
    LinkBudget,
    SingularModel,
    ZeroDistance,
    fisher_info,
    fraunhofer_distance,
    position_error_bound,
    sph_to_cart,
)


def _point(cfg, d, az=0.3, z=1.25):
    el = float(np.arcsin((z - cfg.center[2]) / d))
    return sph_to_cart((d, az, el), cfg.center_arr)


@pytest.mark.parametrize("model", ["NF", "FF"])
def test_fim_symmetric_psd(cfg, books, budget, model):
    book = books[1] if model == "NF" else books[0]
    fim = fisher_info(_point(cfg, 5.0), book, cfg, budget, model).matrix
    assert fim.shape == (5, 5)
    np.testing.assert_allclose(fim, fim.T, rtol=0, atol=1e-9 * np.abs(fim).max())
    eig = np.linalg.eigvalsh(fim)
    assert eig.min() >= -1e-12 * eig.max()


@pytest.mark.parametrize("model", ["NF", "FF"])
def test_fim_linear_in_tx_power_mw(cfg, books, budget, model):
    # +3.0103 dB doubles the transmit power in mW and must double the FIM
    book = books[1] if model == "NF" else books[0]
    p = _point(cfg, 8.0)
    double = LinkBudget(
        tx_power=budget.tx_power + 10.0 * np.log10(2.0),
        noise_figure=budget.noise_figure,
        noise_density=budget.noise_density,
        noise_bw=budget.noise_bw,
    )
    f1 = fisher_info(p, book, cfg, budget, model).matrix
    f2 = fisher_info(p, book, cfg, double, model).matrix
    # the mag/phase cross entry is analytically zero, so anchor atol to scale
    np.testing.assert_allclose(
        f2, 2.0 * f1, rtol=1e-9, atol=1e-12 * np.abs(f1).max()
    )
    r = position_error_bound(p, book, cfg, double, model)
    r0 = position_error_bound(p, book, cfg, budget, model)
    np.testing.assert_allclose(r / r0, 1.0 / np.sqrt(2.0), rtol=1e-6)


@pytest.mark.parametrize("model,which", [("NF", 1), ("FF", 0), ("NF", 0), ("FF", 1)])
def test_peb_positive_finite_any_book(cfg, books, budget, model, which):
    for d in (1.5, 6.6, 20.0):
        r = position_error_bound(_point(cfg, d), books[which], cfg, budget, model)
        assert np.isfinite(r) and r > 0.0


def test_unknown_model_rejected(cfg, books, budget):
    with pytest.raises(SingularModel):
        fisher_info(_point(cfg, 5.0), books[0], cfg, budget, "XX")


def test_zero_distance_rejected(cfg, books, budget):
    with pytest.raises(ZeroDistance):
        fisher_info(cfg.center_arr, books[0], cfg, budget, "FF")


def test_finite_difference_step_stability(cfg, books, budget):
    p = _point(cfg, 4.0)
    r1 = position_error_bound(p, books[1], cfg, budget, "NF")
    coarse = fisher_info(p, books[1], cfg, budget, "NF", fd_scale=8.0).matrix
    fine = fisher_info(p, books[1], cfg, budget, "NF").matrix
    # central differences: eightfold step moves the entries only at O(h^2)
    np.testing.assert_allclose(coarse, fine, rtol=1e-4, atol=1e-4 * np.abs(fine).max())
    assert r1 > 0.0


def test_models_agree_deep_in_far_field(cfg, books, budget):
    # same codebook, both propagation models, ten Fraunhofer distances out:
    # the curvature information is gone, so the bounds must coincide
    d = 10.0 * fraunhofer_distance(cfg)
    p = _point(cfg, d, az=0.2, z=1.25)
    for book in books:
        r_nf = position_error_bound(p, book, cfg, budget, "NF")
        r_ff = position_error_bound(p, book, cfg, budget, "FF")
        assert abs(r_nf / r_ff - 1.0) < 0.02


def test_gain_nuisance_never_helps(cfg, books, budget):
    # marginalising the unknown gain can only lose information
    p = _point(cfg, 3.0)
    fim = fisher_info(p, books[1], cfg, budget, "NF").matrix
    geo = fim[:3, :3]
    cross = fim[:3, 3:]
    nuis = fim[3:, 3:]
    schur = geo - cross @ np.linalg.solve(nuis, cross.T)
    known = np.trace(np.linalg.inv(geo))
    marginal = np.trace(np.linalg.inv(schur))
    assert marginal >= known - 1e-12


@settings(max_examples=10, deadline=None)
@given(
    d=st.floats(2.0, 25.0),
    az=st.floats(0.05, 0.7),
    model=st.sampled_from(["NF", "FF"]),
)
def test_peb_mirror_symmetric_in_azimuth(cfg, books, budget, d, az, model):
    # both codebooks are laid out symmetrically about broadside
    book = books[1] if model == "NF" else books[0]
    lhs = position_error_bound(_point(cfg, d, az=az), book, cfg, budget, model)
    rhs = position_error_bound(_point(cfg, d, az=-az), book, cfg, budget, model)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-5)
