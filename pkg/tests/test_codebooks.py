import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfloc import (
    ArrayConfig,
    Codebook,
    DimensionMismatch,
    InvalidRegion,
    Region,
    angular_grid,
    codebook_to_csv,
    make_ff_codebook,
    make_nf_codebook,
    min_coverage_gain,
    nf_steering,
    ring_radii,
)


def test_region_defaults_and_validation():
    r = Region()
    assert r.az_range == (-np.pi / 4, np.pi / 4)
    assert r.z_range == (1.0, 1.5)
    assert r.d_range == (1.0, 30.0)
    with pytest.raises(InvalidRegion):
        Region(az_range=(0.5, -0.5))
    with pytest.raises(InvalidRegion):
        Region(d_range=(0.0, 30.0))
    with pytest.raises(InvalidRegion):
        Region(z_range=(2.0, 2.0))


def test_region_elevation_interval():
    r = Region()
    lo, hi = r.elevation_interval(2.0)
    # deepest look-down happens at the closest range and the lowest height
    assert lo == pytest.approx(np.arcsin(-1.0))
    assert hi == pytest.approx(np.arcsin(-0.5 / 30.0))
    assert lo < hi < 0.0


def test_region_sample_within_bounds(rng):
    r = Region()
    for _ in range(50):
        sph = r.sample(rng, 7.0, 2.0)
        assert sph.d == 7.0
        assert r.az_range[0] <= sph.az <= r.az_range[1]
        z = 2.0 + sph.d * np.sin(sph.el)
        assert r.z_range[0] - 1e-9 <= z <= r.z_range[1] + 1e-9


def test_angular_grid_layout(cfg, region):
    grid = angular_grid(cfg, region, 21)
    assert grid.shape == (21, 2)
    # three elevation rows of seven azimuths, azimuth fastest
    assert np.allclose(grid[:7, 1], grid[0, 1])
    az_row = grid[:7, 0]
    assert az_row[0] == pytest.approx(region.az_range[0])
    assert az_row[-1] == pytest.approx(region.az_range[1])
    assert np.allclose(np.diff(az_row), az_row[1] - az_row[0])
    lo, hi = region.elevation_interval(cfg.center[2])
    assert grid[0, 1] == pytest.approx(lo)
    assert grid[-1, 1] == pytest.approx(hi)


def test_angular_grid_single_row(cfg, region):
    grid = angular_grid(cfg, region, 5)
    assert grid.shape == (5, 2)
    lo, hi = region.elevation_interval(cfg.center[2])
    assert np.allclose(grid[:, 1], (lo + hi) / 2.0)


def test_ring_radii_default_four(region):
    radii = ring_radii(region, 4)
    lo, hi = region.d_range
    expect = lo * (hi / lo) ** np.array([0.0, 0.292, 0.580, 0.866])
    assert np.allclose(radii, expect)
    assert lo <= radii[0] < radii[-1] < hi  # innermost ring pins the near edge


def test_ring_radii_quantiles(region):
    radii = ring_radii(region, 3)
    lo, hi = region.d_range
    expect = lo * (hi / lo) ** ((2 * np.arange(3) + 1) / 6.0)
    assert np.allclose(radii, expect)
    with pytest.raises(InvalidRegion):
        ring_radii(region, 0)


@pytest.mark.parametrize("n_beams", [1, 3, 7, 21])
def test_ff_codebook_unit_norm(cfg, region, n_beams):
    book = make_ff_codebook(cfg, region, n_beams)
    assert book.scheme_tag == "FF"
    assert book.matrix.shape == (cfg.n_elements, n_beams)
    assert np.allclose(np.linalg.norm(book.matrix, axis=0), 1.0)
    assert book.beam_meta.shape == (n_beams, 2)


@pytest.mark.parametrize("n_beams", [4, 12, 36, 84])
def test_nf_codebook_unit_norm(cfg, region, n_beams):
    book = make_nf_codebook(cfg, region, n_beams)
    assert book.scheme_tag == "NF"
    assert book.matrix.shape == (cfg.n_elements, n_beams)
    assert np.allclose(np.linalg.norm(book.matrix, axis=0), 1.0)
    assert book.beam_meta.shape == (n_beams, 3)


def test_nf_codebook_focus_points_inside_region(cfg, region):
    book = make_nf_codebook(cfg, region, 84)
    pts = book.points
    d = np.linalg.norm(pts - cfg.center_arr, axis=1)
    assert np.all(d >= region.d_range[0] - 1e-9)
    assert np.all(d <= region.d_range[1] + 1e-9)
    assert np.all(pts[:, 2] >= region.z_range[0] - 1e-9)
    assert np.all(pts[:, 2] <= region.z_range[1] + 1e-9)
    # 4 rings x 3 height rows x 7 azimuths
    assert len(np.unique(np.round(d, 9))) == pytest.approx(4, abs=0)


def test_nf_codebook_matched_filter_peak(cfg, region):
    """Each focused beam maximises gain at its own focus point."""
    book = make_nf_codebook(cfg, region, 84)
    for j in (0, 41, 83):
        a = nf_steering(cfg, book.points[j])
        gains = np.abs(book.matrix.conj().T @ a)
        assert int(np.argmax(gains)) == j


def test_codebook_metadata_guard():
    mat = np.ones((4, 2), dtype=complex) / 2.0
    with pytest.raises(DimensionMismatch):
        _ = Codebook(matrix=mat, scheme_tag="FF").beam_meta
    with pytest.raises(DimensionMismatch):
        Codebook(matrix=np.ones(3, dtype=complex), scheme_tag="FF")
    with pytest.raises(DimensionMismatch):
        Codebook(matrix=mat, scheme_tag="steered")


def test_nf_codebook_ring_split_validation(cfg, region):
    with pytest.raises(InvalidRegion):
        make_nf_codebook(cfg, region, 10, n_rings=4)
    book = make_nf_codebook(cfg, region, 10, n_rings=2)
    assert book.n_beams == 10


def test_coverage_no_deep_holes(books, cfg, region):
    f1, f2 = books
    assert min_coverage_gain(f2, cfg, region) >= 0.25
    # steered beams keep full-array gain deep in the far region
    assert min_coverage_gain(f1, cfg, region, n_d=4, n_z=3) > 0.0


@settings(max_examples=10, deadline=None)
@given(n_beams=st.sampled_from([2, 6, 12, 24]))
def test_nf_codebook_unit_norm_property(n_beams):
    cfg = ArrayConfig(n_x=4, n_z=4, n_subcarriers=2)
    book = make_nf_codebook(cfg, Region(), n_beams)
    assert np.allclose(np.linalg.norm(book.matrix, axis=0), 1.0)


def test_codebook_csv_round_trip(tmp_path, small_cfg, region):
    book = make_nf_codebook(small_cfg, region, 12)
    path = tmp_path / "book.csv"
    codebook_to_csv(book, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    assert header[:4] == ["beam", "focus_x_m", "focus_y_m", "focus_z_m"]
    assert len(data) == 12
    n = small_cfg.n_elements
    assert len(header) == 4 + 2 * n
    j = 5
    got = np.array([float(v) for v in data[j][4:]])
    col = got[0::2] + 1j * got[1::2]
    # repr round-trips every IEEE-754 double exactly
    assert np.array_equal(col, book.matrix[:, j])
    assert np.array_equal(
        np.array([float(v) for v in data[j][1:4]]), book.points[j]
    )


def test_ff_codebook_csv_header(tmp_path, small_cfg, region):
    book = make_ff_codebook(small_cfg, region, 3)
    path = tmp_path / "ff.csv"
    codebook_to_csv(book, path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    assert header[:3] == ["beam", "az_rad", "el_rad"]
