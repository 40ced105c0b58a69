import json

import numpy as np

from monogamy_lab import analytic
from monogamy_lab.cli import main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_fig2_output_schema_and_exit(tmp_path):
    out = tmp_path / "fig2.csv"
    assert main(["fig2", "--samples", "40", "--seed", "3", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["c_ab", "c_a1a2", "bound", "violation"]
    assert len(rows) == 40
    for row in rows:
        c_ab, c_a1a2, bound, violation = map(float, row)
        assert abs(bound - analytic.cmax_boundary(c_ab)) < 1e-12
        assert violation == 0.0
    manifest = json.loads((tmp_path / "fig2.csv.manifest.json").read_text())
    assert manifest["command"] == "fig2"
    assert manifest["violations"] == 0
    assert manifest["outputs"][0]["rows"] == 40
    assert len(manifest["outputs"][0]["sha256"]) == 64


def test_fig2_determinism_across_runs_and_threads(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    main(["fig2", "--samples", "60", "--seed", "5", "--out", str(a), "--threads", "1"])
    main(["fig2", "--samples", "60", "--seed", "5", "--out", str(b), "--threads", "1"])
    main(["fig2", "--samples", "60", "--seed", "5", "--out", str(c), "--threads", "4"])
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_fig2_corrupted_bound_hook_flags_violations(tmp_path):
    out = tmp_path / "bad.csv"
    code = main(["fig2", "--samples", "40", "--seed", "3", "--out", str(out), "--test-corrupt-bound"])
    assert code == 1
    _, rows = read_csv(out)
    assert any(row[3] == "1" for row in rows)


def test_fig3_output_and_markers(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["fig3", "--samples", "90", "--seed", "4", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["l1", "l2", "l3", "l4", "n_ab", "n_max", "class"]
    assert len(rows) == 94
    markers = [r for r in rows if r[6] == "marker"]
    assert len(markers) == 4
    flat = markers[-1]
    assert [float(v) for v in flat[:4]] == [0.25, 0.25, 0.25, 0.25]
    assert float(flat[4]) == 1.0 and float(flat[5]) == 0.0
    th = analytic.threshold_negativity(verify=False)
    for r in rows:
        if float(r[4]) > th + 1e-9:
            assert float(r[5]) <= 1e-12
        if r[6] == "two_nonzero":
            assert abs(float(r[5]) - analytic.nmax_boundary_rank2(float(r[4]))) < 1e-9


def test_fig3_thread_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["fig3", "--samples", "120", "--seed", "8", "--out", str(a), "--threads", "1"])
    main(["fig3", "--samples", "120", "--seed", "8", "--out", str(b), "--threads", "3"])
    assert a.read_bytes() == b.read_bytes()


def test_protocol_ghz_rows_satisfy_inversion_relation(tmp_path):
    out = tmp_path / "ghz.csv"
    code = main([
        "protocol", "--na", "2", "--nb", "2", "--hab", "ghz", "--ha", "ghz",
        "--t-steps", "41", "--tp-steps", "300", "--out", str(out),
    ])
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["t", "s_l_ab", "xi2_ab", "min_xi2_a", "argmin_tp", "nonmonotone_flag"]
    for row in rows:
        s_l, xi2_ab, min_xi2 = float(row[1]), float(row[2]), float(row[3])
        assert abs(xi2_ab - 1.0) < 1e-9
        assert abs(analytic.ghz_s_l_from_min_xi2(min_xi2) - s_l) < 1e-9
    manifest = json.loads((tmp_path / "ghz.csv.manifest.json").read_text())
    assert set(manifest["monotonicity_scores"]) == {"ghz", "oat", "tat", "tf"}
    assert manifest["max_negativity_drift"] < 1e-9


def test_protocol_oat_ghz_point_for_each_local_kind(tmp_path):
    for ha in ("oat", "tat", "tf"):
        out = tmp_path / f"oat_{ha}.csv"
        code = main([
            "protocol", "--na", "2", "--nb", "2", "--hab", "oat", "--ha", ha,
            "--t-steps", "81", "--tp-steps", "400", "--out", str(out),
        ])
        assert code == 0
        _, rows = read_csv(out)
        ts = np.array([float(r[0]) for r in rows])
        i = int(np.argmin(np.abs(ts - np.pi / 2)))
        assert abs(float(rows[i][3]) - 1.0) < 1e-6


def test_protocol_resource_cap(tmp_path):
    code = main(["protocol", "--na", "6", "--nb", "2", "--out", str(tmp_path / "x.csv")])
    assert code == 3


def test_invert_ghz_curve(tmp_path):
    out = tmp_path / "curve.csv"
    main([
        "protocol", "--na", "2", "--nb", "2", "--hab", "ghz", "--ha", "ghz",
        "--t-steps", "41", "--tp-steps", "300", "--out", str(out),
    ])
    code = main(["invert", "--curve", str(out), "--xi2", "1.0"])
    assert code == 0
    result = tmp_path / "res.json"
    main(["invert", "--curve", str(out), "--xi2", "1.0", "--out", str(result)])
    payload = json.loads(result.read_text())
    assert payload["ghz_exact"] is True
    assert abs(payload["candidates"][0] - 0.6667) < 1e-4
    assert payload["ambiguous"] is False


def test_invert_ambiguous_curve(tmp_path):
    curve = tmp_path / "fold.csv"
    lines = ["t,s_l_ab,xi2_ab,min_xi2_a,argmin_tp,nonmonotone_flag"]
    xs = [0.0, 0.5, 1.0, 0.6, 0.2]
    ys = [0.0, 0.2, 0.4, 0.55, 0.7]
    for i, (x, y) in enumerate(zip(xs, ys)):
        lines.append(f"{float(i)},{y},{1.0},{x},{0.0},0")
    curve.write_text("\n".join(lines) + "\n")
    code = main(["invert", "--curve", str(curve), "--xi2", "0.4"])
    assert code == 4


def test_invert_parse_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["invert", "--curve", str(bad), "--xi2", "0.5"]) == 2
    missing = tmp_path / "missing.csv"
    assert main(["invert", "--curve", str(missing), "--xi2", "0.5"]) == 2


def test_invert_extrapolation_error(tmp_path):
    out = tmp_path / "curve.csv"
    main([
        "protocol", "--na", "2", "--nb", "2", "--hab", "ghz", "--ha", "ghz",
        "--t-steps", "21", "--tp-steps", "200", "--out", str(out),
    ])
    assert main(["invert", "--curve", str(out), "--xi2", "3.0"]) == 2


def test_explore_subcommand(tmp_path):
    out = tmp_path / "explore.csv"
    code = main([
        "explore", "--na", "2", "--nb", "2", "--hab", "oat", "--prep-t", "0.4",
        "--ha", "tf", "--t-max", "10", "--steps", "101", "--out", str(out),
    ])
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["tp", "xi2_a", "n_a"]
    assert len(rows) == 101
    manifest = json.loads((tmp_path / "explore.csv.manifest.json").read_text())
    assert "min_xi2" in manifest and "n_a_at_min_xi2" in manifest


def test_appendix_b_subcommand(tmp_path):
    prefix = tmp_path / "appb"
    code = main([
        "appendix-b", "--sizes", "2,4", "--ha-kinds", "oat,tf",
        "--t-max", "20", "--steps", "101", "--out", str(prefix),
    ])
    assert code == 0
    for size in (2, 4):
        for kind in ("oat", "tf"):
            path = tmp_path / f"appb_size{size}_{kind}.csv"
            header, rows = read_csv(path)
            assert header == ["t", "s_l_a", "xi2_a"]
            assert len(rows) == 101
    manifest = json.loads((tmp_path / "appb.csv.manifest.json").read_text())
    assert len(manifest["outputs"]) == 4


def test_config_file_and_env_threads(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("samples=25\nseed=9\n# comment\n")
    out1 = tmp_path / "one.csv"
    assert main(["fig2", "--config", str(cfg), "--out", str(out1)]) == 0
    _, rows = read_csv(out1)
    assert len(rows) == 25
    # explicit flag wins over the config file
    out2 = tmp_path / "two.csv"
    main(["fig2", "--config", str(cfg), "--samples", "10", "--out", str(out2)])
    assert len(read_csv(out2)[1]) == 10
    # env fallback for threads must not change bytes
    monkeypatch.setenv("MONOGAMY_LAB_THREADS", "3")
    out3 = tmp_path / "three.csv"
    main(["fig2", "--config", str(cfg), "--out", str(out3)])
    assert out1.read_bytes() == out3.read_bytes()


def test_unwritable_output_is_io_error(tmp_path):
    target = tmp_path / "not_a_dir"
    target.write_text("file")
    out = target / "fig2.csv"  # parent is a file
    assert main(["fig2", "--samples", "5", "--seed", "1", "--out", str(out)]) == 2
