import json

import numpy as np
import pytest

from geoshadow import (
    RunConfig,
    cast_shadows,
    read_geotiff,
    sun_direction,
    write_geotiff,
    write_rpc_json,
    write_rpc_text,
)
from geoshadow.cli import main, parse_manifest

from conftest import geo_raster, grid_rpc


def pillar_dsm(rng, size=16):
    vals = rng.rand(size, size) * 0.5
    vals[5:8, 5:8] += 30.0
    return geo_raster(vals)


def write_tile(root, tile_id, rng, dsm=None, with_max=False):
    """Materialize one tile (DSM tif + RPC + run config) and return the
    config path plus a dict of expected output paths."""
    tdir = root / tile_id
    tdir.mkdir()
    dsm = pillar_dsm(rng) if dsm is None else dsm
    write_geotiff(dsm, tdir / "dsm.tif")
    write_rpc_json(grid_rpc(-117.1, 32.7, 1e-5, dsm.height), tdir / "camera.json")
    outs = {
        "out_shadow_dsm": str(tdir / "s_dsm.tif"),
        "out_shadow_image": str(tdir / "s_img.tif"),
        "out_uncertainty": str(tdir / "unc.tif"),
    }
    extra = {}
    if with_max:
        bumped = dsm.with_values(dsm.values + rng.rand(*dsm.values.shape))
        write_geotiff(bumped, tdir / "dsm_max.tif")
        extra = {
            "dsm_max_path": str(tdir / "dsm_max.tif"),
            "out_supervision": str(tdir / "sup.tif"),
            "out_ignore": str(tdir / "ign.tif"),
        }
    config = RunConfig(
        dsm_path=str(tdir / "dsm.tif"),
        rpc_path=str(tdir / "camera.json"),
        image_width=dsm.width, image_height=dsm.height,
        azimuth_deg=270.0, elevation_deg=45.0,
        crs="geographic", upscale=1, min_region_px=0,
        **outs, **extra,
    )
    config.to_json_file(tdir / "run.json")
    if with_max:
        outs.update(out_supervision=extra["out_supervision"],
                    out_ignore=extra["out_ignore"])
    return tdir / "run.json", outs


class TestCastCommand:
    def test_flat_dsm_yields_empty_mask(self, tmp_path):
        write_geotiff(geo_raster(np.zeros((8, 8))), tmp_path / "dsm.tif")
        out = tmp_path / "mask.tif"
        code = main(["cast", "--dsm", str(tmp_path / "dsm.tif"),
                     "--azimuth", "135", "--elevation", "40",
                     "--upscale", "1", "--out", str(out)])
        assert code == 0
        assert not read_geotiff(out).values.any()

    def test_matches_library_call(self, tmp_path, rng):
        dsm = pillar_dsm(rng)
        write_geotiff(dsm, tmp_path / "dsm.tif")
        out = tmp_path / "mask.tif"
        code = main(["cast", "--dsm", str(tmp_path / "dsm.tif"),
                     "--azimuth", "270", "--elevation", "45",
                     "--upscale", "1", "--crs", "geographic",
                     "--out", str(out)])
        assert code == 0
        want = cast_shadows(dsm, sun_direction(270.0, 45.0), upscale=1)
        assert np.array_equal(read_geotiff(out).values, want.values)

    def test_missing_required_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["cast", "--azimuth", "135", "--elevation", "40", "--out", "x.tif"])
        assert exc.value.code == 2

    def test_missing_dsm_file_exits_2(self, tmp_path):
        code = main(["cast", "--dsm", str(tmp_path / "nope.tif"),
                     "--azimuth", "135", "--elevation", "40",
                     "--out", str(tmp_path / "o.tif")])
        assert code == 2

    def test_invalid_elevation_exits_2(self, tmp_path):
        write_geotiff(geo_raster(np.zeros((4, 4))), tmp_path / "dsm.tif")
        code = main(["cast", "--dsm", str(tmp_path / "dsm.tif"),
                     "--azimuth", "135", "--elevation", "95",
                     "--out", str(tmp_path / "o.tif")])
        assert code == 2

    def test_bad_crs_string_exits_2(self, tmp_path):
        write_geotiff(geo_raster(np.zeros((4, 4))), tmp_path / "dsm.tif")
        code = main(["cast", "--dsm", str(tmp_path / "dsm.tif"),
                     "--azimuth", "135", "--elevation", "40",
                     "--crs", "mars", "--out", str(tmp_path / "o.tif")])
        assert code == 2


class TestProjectCommand:
    def setup_scene(self, tmp_path, rng):
        dsm = pillar_dsm(rng)
        shadows = cast_shadows(dsm, sun_direction(270.0, 45.0), upscale=1)
        write_geotiff(dsm, tmp_path / "dsm.tif")
        write_geotiff(shadows, tmp_path / "shadows.tif", bit_depth="uint8")
        write_rpc_text(grid_rpc(-117.1, 32.7, 1e-5, dsm.height), tmp_path / "camera.rpb")
        return shadows

    def test_grid_aligned_camera_reproduces_mask(self, tmp_path, rng):
        shadows = self.setup_scene(tmp_path, rng)
        code = main(["project", "--dsm", str(tmp_path / "dsm.tif"),
                     "--shadows", str(tmp_path / "shadows.tif"),
                     "--rpc", str(tmp_path / "camera.rpb"),
                     "--width", "16", "--height", "16",
                     "--min-region", "0", "--crs", "geographic",
                     "--out", str(tmp_path / "s_img.tif"),
                     "--out-uncertainty", str(tmp_path / "unc.tif")])
        assert code == 0
        assert np.array_equal(read_geotiff(tmp_path / "s_img.tif").values, shadows.values)
        assert not read_geotiff(tmp_path / "unc.tif").values.any()

    def test_corrupt_rpc_exits_2_naming_key(self, tmp_path, rng, capsys):
        self.setup_scene(tmp_path, rng)
        text = (tmp_path / "camera.rpb").read_text()
        (tmp_path / "camera.rpb").write_text(
            "\n".join(l for l in text.splitlines()
                      if not l.startswith("SAMP_DEN_COEFF_7:")) + "\n")
        code = main(["project", "--dsm", str(tmp_path / "dsm.tif"),
                     "--shadows", str(tmp_path / "shadows.tif"),
                     "--rpc", str(tmp_path / "camera.rpb"),
                     "--width", "16", "--height", "16",
                     "--out", str(tmp_path / "s.tif"),
                     "--out-uncertainty", str(tmp_path / "u.tif")])
        assert code == 2
        assert "SAMP_DEN_COEFF_7" in capsys.readouterr().err


class TestManifest:
    def test_comments_and_relative_paths(self, tmp_path):
        mf = tmp_path / "tiles.txt"
        mf.write_text("# header\n t1  cfg/a.json # trailing\n\nt2 cfg/b.json\n")
        jobs = parse_manifest(mf)
        assert [j.tile_id for j in jobs] == ["t1", "t2"]
        assert jobs[0].config_path == str(tmp_path / "cfg/a.json")

    def test_duplicate_tile_id_rejected(self, tmp_path):
        mf = tmp_path / "tiles.txt"
        mf.write_text("t1 a.json\nt1 b.json\n")
        with pytest.raises(Exception, match="duplicate"):
            parse_manifest(mf)

    def test_empty_manifest_rejected(self, tmp_path):
        mf = tmp_path / "tiles.txt"
        mf.write_text("# nothing here\n")
        with pytest.raises(Exception, match="no tiles"):
            parse_manifest(mf)


class TestPipelineCommand:
    def build_batch(self, tmp_path, rng, n=3):
        lines = []
        outs = []
        for i in range(n):
            cfg, out = write_tile(tmp_path, f"tile{i}", rng, with_max=(i == 0))
            lines.append(f"tile{i} {cfg.relative_to(tmp_path)}")
            outs.append(out)
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("\n".join(lines) + "\n")
        return manifest, outs

    def test_three_tiles_succeed(self, tmp_path, rng, capsys):
        manifest, outs = self.build_batch(tmp_path, rng)
        summary = tmp_path / "summary.jsonl"
        code = main(["pipeline", "--manifest", str(manifest),
                     "--summary", str(summary)])
        assert code == 0
        for out in outs:
            for path in out.values():
                assert read_geotiff(path).values.shape == (16, 16)
        records = [json.loads(l) for l in summary.read_text().splitlines()]
        assert all(r["status"] == "done" for r in records)
        assert len(records) == 3

    def test_failing_tile_gives_partial_exit(self, tmp_path, rng, capsys):
        manifest, _ = self.build_batch(tmp_path, rng)
        cfg_path = tmp_path / "tile1" / "run.json"
        doc = json.loads(cfg_path.read_text())
        doc["dsm_path"] = str(tmp_path / "tile1" / "missing.tif")
        cfg_path.write_text(json.dumps(doc))
        summary = tmp_path / "summary.jsonl"
        code = main(["pipeline", "--manifest", str(manifest),
                     "--summary", str(summary)])
        assert code == 4
        by_tile = {r["tile"]: r for r in
                   (json.loads(l) for l in summary.read_text().splitlines())}
        assert by_tile["tile1"]["status"] == "failed"
        assert "missing.tif" in by_tile["tile1"]["reason"]
        assert by_tile["tile0"]["status"] == "done"
        assert by_tile["tile2"]["status"] == "done"

    def test_bad_config_reported_not_crashed(self, tmp_path, rng, capsys):
        manifest, _ = self.build_batch(tmp_path, rng, n=1)
        cfg_path = tmp_path / "tile0" / "run.json"
        doc = json.loads(cfg_path.read_text())
        doc["surprise"] = 1
        cfg_path.write_text(json.dumps(doc))
        code = main(["pipeline", "--manifest", str(manifest)])
        assert code == 4
        assert "surprise" in capsys.readouterr().out

    def test_parallel_jobs_byte_identical(self, tmp_path, rng, capsys):
        a = tmp_path / "a"
        a.mkdir()
        m1, outs1 = self.build_batch(a, rng)
        assert main(["pipeline", "--manifest", str(m1), "--jobs", "1"]) == 0
        # Same inputs in a second directory, run with 8 workers.
        b = tmp_path / "b"
        b.mkdir()
        rngb = np.random.RandomState(20260824)
        m2, outs2 = self.build_batch(b, rngb)
        assert main(["pipeline", "--manifest", str(m2), "--jobs", "8"]) == 0
        for o1, o2 in zip(outs1, outs2):
            for key in o1:
                assert open(o1[key], "rb").read() == open(o2[key], "rb").read()

    def test_missing_manifest_exits_2(self, tmp_path, capsys):
        assert main(["pipeline", "--manifest", str(tmp_path / "nope.txt")]) == 2
