import json
from pathlib import Path

import numpy as np
import pytest

from noisykerr.cli import main

GOLDEN = Path(__file__).parent / "golden"


def _cell(value):
    if value == "true":
        return 1.0
    if value == "false":
        return 0.0
    return float(value)


def read_csv(path):
    lines = [l for l in Path(path).read_text().splitlines()
             if not l.startswith("#")]
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for line in lines[1:]:
        for h, v in zip(header, line.split(",")):
            cols[h].append(v)
    return {h: (np.array([_cell(x) for x in v])
                if h not in ("status",) else v)
            for h, v in cols.items()}


def read_json(path):
    return json.loads(Path(path).read_text())


def test_requires_config_or_preset(tmp_path):
    assert main(["ness", "--out", str(tmp_path)]) == 2


def test_noise_show_benchmark(tmp_path):
    assert main(["noise-show", "--preset", "paper_fig1", "--out",
                 str(tmp_path), "--plot", "--seedless"]) == 0
    report = read_json(tmp_path / "memory_time.json")
    assert 1.0 <= report["tau_memory"] <= 4.0
    assert report["threshold"] == pytest.approx(np.sqrt(1e-3))
    spectra = read_csv(tmp_path / "noise_spectra.csv")
    ratio = spectra["w_a_tot"] / spectra["w_s_tot"]
    crossings = np.nonzero(np.diff(np.sign(ratio - 0.9)))[0]
    omega_cross = spectra["omega"][crossings]
    assert ((omega_cross > 5.0) & (omega_cross < 10.0)).any()
    assert (tmp_path / "noise_spectra.svg").exists()
    assert (tmp_path / "noise_correlation.svg").exists()


def test_noise_show_classical_only(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("""
[noise]
omega_min = 0.01
omega_max = 50.0
[[noise.components]]
kind = "classical_1f"
gamma = 1e-3
[oscillator]
omega = 5.0
""")
    assert main(["noise-show", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    spectra = read_csv(tmp_path / "noise_spectra.csv")
    assert np.all(spectra["w_a_tot"] == 0.0)
    assert read_json(tmp_path / "memory_time.json")["tau_memory"] is None


def test_ness_matches_golden(tmp_path):
    assert main(["ness", "--preset", "paper_fig1", "--out", str(tmp_path)]) == 0
    got = read_json(tmp_path / "ness_summary.json")
    want = read_json(GOLDEN / "ness_omega5_chi3.json")
    for key, ref in (("mean_n", want["mean_n"]), ("g2_0", want["g2_0"]),
                     ("i_cl", want["i_cl"]), ("i_q", want["i_q"]),
                     ("i_d", want["i_d"])):
        assert got[key] == pytest.approx(ref, rel=1e-9)
    assert got["n_max"] == want["n_max"]
    assert got["g2_0"] < 1.0
    assert got["chi_over_omega"] == pytest.approx(0.6)
    pops = read_csv(tmp_path / "populations.csv")
    assert pops["rho"].sum() == pytest.approx(1.0, abs=1e-12)


def test_ness_linear_oscillator_gives_thermal_statistics(tmp_path):
    cfg = tmp_path / "chi0.toml"
    cfg.write_text("[oscillator]\nomega = 5.0\nchi = 0.0\n")
    assert main(["ness", "--preset", "paper_fig1", "--config", str(cfg),
                 "--out", str(tmp_path)]) == 0
    got = read_json(tmp_path / "ness_summary.json")
    assert got["g2_0"] == pytest.approx(2.0, abs=1e-6)


def test_ness_classical_only_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("""
[noise]
omega_min = 0.01
omega_max = 50.0
[[noise.components]]
kind = "classical_1f"
gamma = 1e-3
[oscillator]
omega = 5.0
chi = 3.0
""")
    assert main(["ness", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert "non-normalizable" in capsys.readouterr().err


def test_unknown_key_is_named(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[oscillator]\nomega = 5.0\nwobble = 1\n")
    assert main(["ness", "--preset", "paper_fig1", "--config", str(cfg),
                 "--out", str(tmp_path)]) == 2
    assert "oscillator.wobble" in capsys.readouterr().err


def test_sweep_is_deterministic_across_workers(tmp_path):
    args = ["sweep", "--preset", "paper_fig1", "--chi", "0.5", "5", "5",
            "--omega", "0.8", "12", "6"]
    assert main(args + ["--out", str(tmp_path / "serial"), "--threads", "1"]) == 0
    assert main(args + ["--out", str(tmp_path / "pool"), "--threads", "8"]) == 0
    serial = (tmp_path / "serial" / "sweep.csv").read_bytes()
    pool = (tmp_path / "pool" / "sweep.csv").read_bytes()
    assert serial == pool


def test_sweep_columns_behave_physically(tmp_path):
    # along χ = 3 the detector current falls with Ω while the phonon current
    # is non-monotonic, and g2(0) crosses 1 exactly once on a wide Ω range
    assert main(["sweep", "--preset", "paper_fig1", "--chi", "3", "3", "1",
                 "--omega", "1", "40", "40", "--out", str(tmp_path)]) == 0
    data = read_csv(tmp_path / "sweep.csv")
    assert all(s.startswith("ok") for s in data["status"])
    i_d = data["i_d"]
    assert np.all(np.diff(i_d) < 0)
    i_q = data["i_q"]
    assert np.any(np.diff(i_q) > 0) and np.any(np.diff(i_q) < 0)
    signs = np.sign(data["g2_0"] - 1.0)
    assert signs[0] < 0 < signs[-1]
    assert np.count_nonzero(np.diff(signs)) == 1
    # golden guard on a few cells
    want = read_json(GOLDEN / "g2_line_chi3.json")
    by_omega = dict(zip(data["omega"], data["g2_0"]))
    for row in want["rows"]:
        if row["omega"] in by_omega:
            assert by_omega[row["omega"]] == pytest.approx(row["g2_0"], rel=1e-9)


def test_sweep_records_cell_errors(tmp_path):
    cfg = tmp_path / "cl.toml"
    cfg.write_text("""
[noise]
omega_min = 0.01
omega_max = 50.0
[[noise.components]]
kind = "classical_1f"
gamma = 1e-3
[oscillator]
omega = 5.0
""")
    assert main(["sweep", "--config", str(cfg), "--chi", "1", "2", "2",
                 "--omega", "1", "2", "2", "--out", str(tmp_path)]) == 0
    data = read_csv(tmp_path / "sweep.csv")
    assert all(s.startswith("error:") for s in data["status"])
    assert np.all(np.isnan(data["g2_0"]))


def test_g2tau_grid_and_limit(tmp_path):
    assert main(["g2tau", "--preset", "paper_fig1", "--tau-max", "8000",
                 "--steps", "161", "--out", str(tmp_path), "--plot"]) == 0
    data = read_csv(tmp_path / "g2tau.csv")
    np.testing.assert_allclose(data["tau"], np.linspace(0.0, 8000.0, 161))
    assert abs(data["g2"][-1] - 1.0) < 1e-3
    assert np.all(np.diff(data["g2"]) > -1e-12)  # monotone within rounding
    assert data["valid"][0] == 0.0 and data["valid"][-1] == 1.0
    assert (tmp_path / "g2tau.svg").exists()


def test_spectrum_outputs(tmp_path):
    assert main(["spectrum", "--preset", "paper_fig1", "--wmin", "3",
                 "--wmax", "30", "--points", "501", "--out", str(tmp_path),
                 "--plot"]) == 0
    summary = read_json(tmp_path / "spectrum_summary.json")
    assert summary["sum_rule_ratio"] == pytest.approx(1.0, abs=0.01)
    assert summary["method"] == "eigendecomposition"
    positions = [p["position"] for p in summary["peaks"]]
    heights = [p["height"] for p in summary["peaks"]]
    assert len(positions) >= 4
    assert all(a > b for a, b in zip(heights, heights[1:]))
    # peaks sit near the Kerr ladder, displaced by the principal-value shifts
    for n, pos in enumerate(positions[:4]):
        assert abs(pos - (5.0 + 6.0 * n)) < 0.1
    data = read_csv(tmp_path / "spectrum.csv")
    assert len(data["omega"]) == 501
    assert (tmp_path / "spectrum.svg").exists()


def test_spectrum_empty_noise_rejected(tmp_path, capsys):
    cfg = tmp_path / "empty.toml"
    cfg.write_text("""
[noise]
omega_min = 0.01
omega_max = 50.0
components = []
[oscillator]
omega = 5.0
chi = 3.0
n_max = 4
""")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert "couple" in capsys.readouterr().err


def test_spectrum_cutoff_singularity_exit(tmp_path):
    cfg = tmp_path / "edge.toml"
    cfg.write_text("[oscillator]\nomega = 50.0\nchi = 0.0\nn_max = 2\n")
    assert main(["spectrum", "--preset", "paper_fig1", "--config", str(cfg),
                 "--out", str(tmp_path)]) == 4


def test_oracle_check_passes(tmp_path):
    assert main(["oracle-check", "--preset", "paper_fig1", "--n-max", "6",
                 "--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "oracle_check.json")
    assert report["all_passed"] is True
    assert len(report["checks"]) >= 7


def test_oracle_check_guard(tmp_path):
    assert main(["oracle-check", "--preset", "paper_fig1", "--n-max", "40",
                 "--out", str(tmp_path)]) == 2


def test_outputs_embed_config_hash(tmp_path):
    assert main(["ness", "--preset", "paper_fig1", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "populations.csv").read_text()
    assert "config_sha256=" in text
    meta = read_json(tmp_path / "ness_summary.json")["meta"]
    assert len(meta["config_sha256"]) == 16
    assert meta["generator"].startswith("noisykerr")
