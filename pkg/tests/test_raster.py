import numpy as np
import pytest

from geoshadow import Point3, Raster, RasterBoundsError, bilinear_sample, grid_points, upsample


class TestBilinearSample:
    def test_center_of_2x2_is_mean(self):
        r = Raster(np.array([[0.0, 1.0], [2.0, 3.0]]))
        assert bilinear_sample(r, 0.5, 0.5) == 1.5

    def test_exact_pixel_center_returns_stored_value(self, rng):
        vals = rng.rand(5, 7) * 100
        r = Raster(vals)
        for row in range(5):
            for col in range(7):
                assert bilinear_sample(r, col, row) == vals[row, col]

    def test_matches_two_stage_linear_interpolation(self, rng):
        # Independent oracle: interpolate along x on both rows, then along y.
        vals = rng.rand(3, 3) * 10
        r = Raster(vals)
        x, y = 1.25, 0.75
        top = vals[0, 1] * (1 - 0.25) + vals[0, 2] * 0.25
        bottom = vals[1, 1] * (1 - 0.25) + vals[1, 2] * 0.25
        expected = top * (1 - 0.75) + bottom * 0.75
        assert bilinear_sample(r, x, y) == pytest.approx(expected, rel=1e-13)

    def test_out_of_bounds_raises(self):
        r = Raster(np.zeros((3, 3)))
        with pytest.raises(RasterBoundsError):
            bilinear_sample(r, -0.1, 1.0)
        with pytest.raises(RasterBoundsError):
            bilinear_sample(r, 1.0, 2.5)

    def test_nodata_neighbor_poisons_sample(self):
        vals = np.array([[1.0, -9999.0], [2.0, 3.0]])
        r = Raster(vals, nodata=-9999.0)
        assert bilinear_sample(r, 0.5, 0.5) == -9999.0
        # Exact center away from the hole is untouched.
        assert bilinear_sample(r, 0.0, 1.0) == 2.0

    def test_continuity(self, rng):
        vals = rng.rand(8, 8)
        r = Raster(vals)
        eps = 1e-6
        for _ in range(200):
            x = rng.uniform(0, 6.9)
            y = rng.uniform(0, 6.9)
            v0 = bilinear_sample(r, x, y)
            v1 = bilinear_sample(r, x + eps, y + eps)
            assert abs(v1 - v0) < 10 * eps


class TestUpsample:
    def test_factor_one_is_identity(self, rng):
        r = Raster(rng.rand(4, 5), (3.0, 9.0, 0.5, -0.5))
        out = upsample(r, 1)
        assert np.array_equal(out.values, r.values)
        assert out.geotransform == r.geotransform

    def test_constant_raster_stays_constant(self):
        r = Raster(np.full((3, 3), 7.0))
        out = upsample(r, 4)
        assert out.values.shape == (12, 12)
        assert np.all(out.values == 7.0)

    def test_each_pixel_matches_bilinear_sample(self):
        r = Raster(np.array([[0.0, 1.0], [2.0, 3.0]]))
        out = upsample(r, 2)
        for row in range(4):
            for col in range(4):
                x = min(col / 2.0, 1.0)
                y = min(row / 2.0, 1.0)
                assert out.values[row, col] == bilinear_sample(r, x, y)

    def test_pixel_centers_keep_world_position(self):
        r = Raster(np.zeros((2, 2)), (100.0, 200.0, 2.0, -2.0))
        out = upsample(r, 4)
        assert out.geotransform == (100.0, 200.0, 0.5, -0.5)
        # input center (1, 1) coincides with output center (4, 4)
        assert out.pixel_to_world(4, 4) == r.pixel_to_world(1, 1)

    def test_factor_zero_rejected(self):
        with pytest.raises(ValueError):
            upsample(Raster(np.zeros((2, 2))), 0)

    @pytest.mark.parametrize("a,b", [(2, 2), (2, 3), (3, 2)])
    def test_composition_on_bilinear_representable_inputs(self, a, b):
        for vals in (np.full((3, 4), 2.5), np.outer(np.arange(3.0), np.ones(4)) * 1.5):
            r = Raster(vals)
            once = upsample(r, a * b)
            twice = upsample(upsample(r, a), b)
            assert np.allclose(once.values, twice.values, atol=1e-9)


class TestGridPoints:
    BBOX = (0.0, 0.0, 10.0, 10.0)

    def test_min_of_two_points_in_one_cell(self):
        pts = [Point3(0.5, 9.5, 3.0), Point3(0.6, 9.6, 9.0)]
        out = grid_points(pts, self.BBOX, 1.0, agg="min")
        assert out.values[0, 0] == 3.0

    def test_max_of_two_points_in_one_cell(self):
        pts = [Point3(0.5, 9.5, 3.0), Point3(0.6, 9.6, 9.0)]
        out = grid_points(pts, self.BBOX, 1.0, agg="max")
        assert out.values[0, 0] == 9.0

    def test_empty_point_list_gives_all_nodata(self):
        out = grid_points([], self.BBOX, 1.0, agg="min")
        assert np.isnan(out.values).all()

    def test_matches_brute_force_scan(self, rng):
        pts = [Point3(*p) for p in np.column_stack([
            rng.uniform(0, 10, 1000), rng.uniform(0, 10, 1000), rng.uniform(-5, 50, 1000),
        ])]
        for agg, reduce_fn in (("min", min), ("max", max)):
            out = grid_points(pts, self.BBOX, 1.0, agg=agg)
            for row in range(10):
                for col in range(10):
                    members = [
                        p.z for p in pts
                        if col <= p.x - 0.0 < col + 1 and (9 - row) <= p.y < (10 - row)
                    ]
                    if members:
                        assert out.values[row, col] == reduce_fn(members)
                    else:
                        assert np.isnan(out.values[row, col])

    def test_min_below_max_everywhere(self, rng):
        pts = [Point3(*p) for p in np.column_stack([
            rng.uniform(0, 10, 300), rng.uniform(0, 10, 300), rng.uniform(0, 30, 300),
        ])]
        lo = grid_points(pts, self.BBOX, 2.0, agg="min").values
        hi = grid_points(pts, self.BBOX, 2.0, agg="max").values
        both = ~np.isnan(lo) & ~np.isnan(hi)
        assert np.all(lo[both] <= hi[both])

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            grid_points([], self.BBOX, 0.0)
        with pytest.raises(ValueError):
            grid_points([], (0, 0, 0, 10), 1.0)
