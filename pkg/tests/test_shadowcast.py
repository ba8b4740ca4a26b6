import numpy as np
import pytest

from geoshadow import Raster, cast_shadows, cast_shadows_oracle, compute_paths, sun_direction
from geoshadow.solar import SunGeometry


def make_sun(p, q, a):
    """Hand-built geometry for exact-arithmetic corner cases."""
    return SunGeometry(azimuth_deg=float("nan"), elevation_deg=45.0, p=p, q=q, a=a)


def coverage(width, height, paths):
    cov = np.zeros((height, width), dtype=int)
    for path in paths:
        cov[path.rows, path.cols] += 1
    return cov


class TestComputePaths:
    def test_direction_down_gives_columns(self):
        paths = compute_paths(4, 4, make_sun(0.0, 1.0, 1.0))
        assert len(paths) == 4
        for path in paths:
            assert len(path) == 4
            assert np.all(path.cols == path.cols[0])
            assert np.array_equal(path.rows, np.arange(4))

    def test_direction_right_gives_rows(self):
        paths = compute_paths(4, 4, make_sun(1.0, 0.0, 1.0))
        assert len(paths) == 4
        for path in paths:
            assert np.all(path.rows == path.rows[0])
            assert np.array_equal(path.cols, np.arange(4))

    def test_oblique_direction_covers_every_pixel_once(self):
        paths = compute_paths(16, 16, make_sun(0.6, 0.8, 1.0))
        assert np.all(coverage(16, 16, paths) == 1)

    def test_random_directions_cover_once(self, rng):
        for _ in range(25):
            sun = sun_direction(rng.uniform(0, 360), rng.uniform(5, 85))
            assert np.all(coverage(32, 32, compute_paths(32, 32, sun)) == 1)

    def test_steps_and_subpixel_stay_tight(self, rng):
        sun = sun_direction(rng.uniform(0, 360), 25.0)
        for path in compute_paths(24, 24, sun):
            assert np.all(np.abs(np.diff(path.cols)) <= 1)
            assert np.all(np.abs(np.diff(path.rows)) <= 1)
            assert np.all(np.abs(path.xs - path.cols) <= 0.5)
            assert np.all(np.abs(path.ys - path.rows) <= 0.5)

    def test_degenerate_direction_rejected(self):
        with pytest.raises(ValueError):
            compute_paths(4, 4, make_sun(0.0, 0.0, float("inf")))


def pillar_strip(height_m=10.0):
    strip = np.zeros((1, 64))
    strip[0, 0] = height_m
    return Raster(strip, (0.0, 0.0, 1.0, -1.0))


class TestCastShadows:
    def test_flat_terrain_casts_nothing(self):
        flat = Raster(np.full((16, 16), 42.0), (0, 0, 1, -1))
        out = cast_shadows(flat, sun_direction(210.0, 35.0), upscale=1)
        assert not out.values.any()

    def test_pillar_shadow_length(self):
        # Sun in the west, shadows march east along the strip; at 45 deg the
        # closed-form shadow length is (10 m - 0 m) / tan(45) = 10 px.
        sun = sun_direction(270.0, 45.0)
        out = cast_shadows(pillar_strip(), sun, upscale=1).values[0]
        expected = np.zeros(64)
        for col in range(1, 64):
            expected[col] = 1.0 if float(col) < 10.0 / sun.a else 0.0
        assert np.array_equal(out, expected)

    def test_boundary_pixel_at_exact_shadow_length_is_lit(self):
        # Exact ray slope 1: the pixel at d = l = 10 must stay illuminated.
        out = cast_shadows(pillar_strip(), make_sun(1.0, 0.0, 1.0), upscale=1).values[0]
        assert np.array_equal(np.flatnonzero(out), np.arange(1, 10))

    def test_zenith_gives_empty_mask(self, rng):
        dsm = Raster(rng.rand(8, 8) * 30, (0, 0, 1, -1))
        out = cast_shadows(dsm, sun_direction(0.0, 90.0), upscale=1)
        assert not out.values.any()

    def test_upscale_output_resolution(self, rng):
        dsm = Raster(rng.rand(8, 8) * 30, (0, 0, 1, -1))
        out = cast_shadows(dsm, sun_direction(37.0, 30.0), upscale=4)
        assert out.values.shape == (32, 32)
        assert out.geotransform == (0.0, 0.0, 0.25, -0.25)

    def test_matches_oracle_on_random_terrain(self, rng):
        sun = sun_direction(37.0, 30.0)
        dsm = Raster(rng.rand(64, 64) * 30, (0, 0, 1, -1))
        sweep = cast_shadows(dsm, sun, upscale=1)
        oracle = cast_shadows_oracle(dsm, sun)
        assert np.array_equal(sweep.values, oracle.values)

    def test_vertical_translation_invariance(self, rng):
        sun = sun_direction(290.0, 40.0)
        vals = rng.rand(24, 24) * 20
        a = cast_shadows(Raster(vals, (0, 0, 1, -1)), sun, upscale=1)
        b = cast_shadows(Raster(vals + 137.0, (0, 0, 1, -1)), sun, upscale=1)
        assert np.array_equal(a.values, b.values)

    def test_first_pixel_of_every_path_is_lit(self, rng):
        sun = sun_direction(rng.uniform(0, 360), 20.0)
        dsm = Raster(rng.rand(32, 32) * 40, (0, 0, 1, -1))
        mask = cast_shadows(dsm, sun, upscale=1).values
        for path in compute_paths(32, 32, sun):
            assert mask[path.rows[0], path.cols[0]] == 0

    def test_nodata_pixels_not_shadow_and_flagged(self):
        vals = np.zeros((1, 16))
        vals[0, 0] = 20.0
        vals[0, 5] = -9999.0
        dsm = Raster(vals, (0, 0, 1, -1), nodata=-9999.0)
        shadow, valid = cast_shadows(dsm, sun_direction(270.0, 45.0), upscale=1,
                                     with_validity=True)
        # Bilinear sampling at integer centers only poisons the hole itself.
        assert shadow.values[0, 5] == 0
        assert valid.values[0, 5] == 0
        assert valid.values[0, 6] == 1

    def test_anisotropic_pixels_rejected(self):
        dsm = Raster(np.zeros((4, 4)), (0, 0, 1.0, -2.0))
        with pytest.raises(ValueError):
            cast_shadows(dsm, sun_direction(0.0, 45.0), upscale=1)

    def test_all_nodata_rejected(self):
        dsm = Raster(np.full((4, 4), -9999.0), nodata=-9999.0)
        with pytest.raises(ValueError):
            cast_shadows(dsm, sun_direction(0.0, 45.0), upscale=1)


class TestOracle:
    def test_flat_is_empty(self):
        flat = Raster(np.zeros((8, 8)), (0, 0, 1, -1))
        assert not cast_shadows_oracle(flat, sun_direction(10.0, 40.0)).values.any()

    def test_pillar_matches_hand_computation(self):
        sun = sun_direction(270.0, 45.0)
        out = cast_shadows_oracle(pillar_strip(), sun).values[0]
        expected = np.zeros(64)
        for col in range(1, 64):
            expected[col] = 1.0 if float(col) < 10.0 / sun.a else 0.0
        assert np.array_equal(out, expected)

    def test_sweep_equivalence_many_random_instances(self, rng):
        for _ in range(100):
            dsm = Raster(rng.rand(32, 32) * 30, (0, 0, 1, -1))
            sun = sun_direction(rng.uniform(0, 360), rng.uniform(10, 80))
            sweep = cast_shadows(dsm, sun, upscale=1)
            oracle = cast_shadows_oracle(dsm, sun)
            assert np.array_equal(sweep.values, oracle.values)

    def test_raising_a_lit_pixel_never_unshadows_later_pixels(self, rng):
        sun = sun_direction(315.0, 35.0)
        vals = rng.rand(16, 16) * 10
        dsm = Raster(vals, (0, 0, 1, -1))
        before = cast_shadows_oracle(dsm, sun).values
        lit = np.argwhere(before == 0)
        row, col = lit[rng.randint(len(lit))]
        raised = vals.copy()
        raised[row, col] += 15.0
        after = cast_shadows_oracle(Raster(raised, (0, 0, 1, -1)), sun).values
        for path in compute_paths(16, 16, sun):
            on_path = np.flatnonzero((path.rows == row) & (path.cols == col))
            if on_path.size:
                j = int(on_path[0])
                later = slice(j + 1, None)
                was = before[path.rows[later], path.cols[later]]
                now = after[path.rows[later], path.cols[later]]
                assert np.all(now >= was)
