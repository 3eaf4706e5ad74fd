from __future__ import annotations

import json

import numpy as np
import pytest

from reebrecon import geo
from reebrecon.cli import main

GEO_ARGS = ["--slice-start", "90", "--slice-width", "20", "--slice-end", "110",
            "--eta", "80", "--alpha", "1000", "--sigma", "200", "--seed", "7"]


def test_synth_writes_points(tmp_path):
    out, graph = tmp_path / "pts.txt", tmp_path / "g.txt"
    code = main(["synth", "--fixture", "segment", "--rho", "0", "--spacing", "0.1",
                 "--output", str(out), "--graph-output", str(graph)])
    assert code == 0
    pts = np.loadtxt(out)
    assert pts.shape == (11, 2)
    assert graph.read_text().strip()


def test_synth_to_stdout(capsys):
    assert main(["synth", "--fixture", "circle", "--rho", "0.01", "--spacing", "0.1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# circle sample")
    assert "np.float64" not in lines[0]


def test_sigma_bound_is_a_usage_error(tmp_path, capsys):
    code = main(["reconstruct", "--eta", "80", "--alpha", "1000", "--sigma", "250",
                 "--output", str(tmp_path / "x.geojson")])
    assert code == 2
    assert "alpha/4" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["verify", "nonsense"]) == 2
    assert main(["synth", "--fixture", "circle", "--rho", "-1", "--spacing", "1"]) == 2


def test_missing_input_is_an_io_error(tmp_path):
    code = main(["reconstruct", "--input", str(tmp_path / "none.csv"), "--eta", "80",
                 "--alpha", "1000", "--sigma", "200", "--output", str(tmp_path / "x.geojson")])
    assert code == 3


def test_empty_contour_is_an_io_error(tmp_path):
    recon = tmp_path / "r.geojson"
    assert main(["reconstruct", *GEO_ARGS, "--output", str(recon),
                 "--diagnostics", str(tmp_path / "d.csv")]) == 0
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert main(["compare", "--recon", str(recon), "--slab", str(empty), "--depth", "100"]) == 3


def test_sparse_data_is_degenerate(tmp_path):
    code = main(["reconstruct", "--slice-start", "90", "--slice-end", "110", "--eta", "0.001",
                 "--alpha", "1000", "--sigma", "200", "--output", str(tmp_path / "x.geojson")])
    assert code == 4


def test_reconstruct_and_compare_bundled(tmp_path, capsys):
    recon, diag = tmp_path / "r.geojson", tmp_path / "d.csv"
    assert main(["reconstruct", *GEO_ARGS, "--slab", str(geo.BUNDLED_CONTOURS),
                 "--output", str(recon), "--diagnostics", str(diag)]) == 0
    rows = diag.read_text().splitlines()
    assert rows[0].split(",") == list(geo.DIAGNOSTIC_COLUMNS)
    assert len(rows) == 2 and rows[1].endswith(",ok")
    capsys.readouterr()
    assert main(["compare", "--recon", str(recon), "--depth", "100"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["depth_km"] == 100
    assert np.isfinite(report["hausdorff_km"])


def test_diagnostics_default_to_stdout(tmp_path, capsys):
    assert main(["reconstruct", *GEO_ARGS, "--output", str(tmp_path / "r.geojson")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("slice_lo,slice_hi")


def test_compare_unknown_depth(tmp_path):
    recon = tmp_path / "r.geojson"
    assert main(["reconstruct", *GEO_ARGS, "--output", str(recon),
                 "--diagnostics", str(tmp_path / "d.csv")]) == 0
    assert main(["compare", "--recon", str(recon), "--depth", "105"]) == 3


def test_verify_topology_table(capsys):
    assert main(["verify", "topology"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[:2] == ["case", "result"]
    assert len(lines) == 6
    assert all(" PASS " in line for line in lines[1:])
