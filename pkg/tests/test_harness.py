import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dmnls.analysis import NormSeries
from dmnls.harness import io
from dmnls.harness.cli import main
from dmnls.harness.config import RunConfig, config_from_dict, load_config
from dmnls.harness.experiments import (compare_solvers, dyadic_times, initial_data,
                                       run_simulation, verify_identities)
from dmnls.harness.fitting import fit_log_phase, fit_power_law
from dmnls.analysis import sigma_norm
from dmnls.scattering import ScatteringProfile, profile_grid
from dmnls.solver import SolverAbort
from dmnls.spectral import Field, Grid

SMALL = dict(half_width=256.0, size=2048, dt=0.05, t_max=40.0, window_start=24.0,
             window_end=40.0, fit_t_min=20.0, xi_max=4.0, xi_points=64)


def small_config(tmp_path, **kw):
    return RunConfig(**{**SMALL, "output_dir": str(tmp_path / "run"), **kw})


def write_toml(path, entries):
    lines = []
    for k, v in entries.items():
        if isinstance(v, bool):
            lines.append(f"{k} = {'true' if v else 'false'}")
        elif isinstance(v, str):
            lines.append(f'{k} = "{v}"')
        else:
            lines.append(f"{k} = {v!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


# configuration ----------------------------------------------------------

def test_default_config_values():
    c = RunConfig()
    assert (c.gamma_plus, c.gamma_minus, c.epsilon, c.delta) == (2.0, 1.0, 0.1, 0.01)
    assert c.window == (200.0, 400.0)
    assert c.dispersion_map.T0 == 16.0


def test_load_config_round_trip(tmp_path):
    p = write_toml(tmp_path / "c.toml", {"epsilon": 0.3, "size": 4096, "family": "double_bump",
                                         "dealias": True, "t_max": 100})
    c = load_config(p)
    assert c.epsilon == 0.3 and c.size == 4096 and c.family == "double_bump"
    assert c.dealias is True and c.t_max == 100.0


@pytest.mark.parametrize("bad", [
    {"epsilonn": 0.1},
    {"epsilon": "0.1"},
    {"size": 1000},
    {"size": 2.0},
    {"dt": 0.5},
    {"family": "sech"},
    {"solver": "rk4"},
    {"t_max": 10.0},
    {"epsilon": -0.1},
    {"gt_nodes": 3},
    {"dealias": 1},
    {"dispersion": "constant"},
])
def test_config_rejects_bad_values(bad):
    with pytest.raises(ValueError):
        config_from_dict(bad)


def test_load_config_rejects_tables(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[grid]\nsize = 1024\n")
    with pytest.raises(ValueError):
        load_config(p)


def test_replace_ignores_none():
    c = RunConfig().replace(epsilon=None, t_max=50.0)
    assert c.epsilon == 0.1 and c.t_max == 50.0


# initial data ------------------------------------------------------------

@pytest.mark.parametrize("family", ["gaussian", "chirped_gaussian", "double_bump", "random_bumps"])
def test_initial_data_has_requested_sigma_norm(family):
    c = RunConfig(family=family, epsilon=0.2, half_width=64.0, size=2048)
    assert sigma_norm(initial_data(c)) == pytest.approx(0.2, rel=1e-12)


def test_initial_data_zero_epsilon():
    c = RunConfig(epsilon=0.0, half_width=64.0, size=2048)
    assert not np.any(initial_data(c).values)


def test_dyadic_times():
    assert dyadic_times(16.0, 400.0) == [16.0, 32.0, 64.0, 128.0, 256.0]
    assert dyadic_times(16.0, 10.0) == []


# fitting ---------------------------------------------------------------

def test_fit_power_law_exact():
    t = np.linspace(1, 100, 50)
    fit = fit_power_law(t, 3.0 * t**-0.5)
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert np.exp(fit.intercept) == pytest.approx(3.0, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0)


def test_fit_power_law_noise():
    rng = np.random.default_rng(11)
    t = np.linspace(50, 400, 200)
    y = t**-0.5 * np.exp(0.02 * rng.normal(size=t.size))
    fit = fit_power_law(t, y)
    assert -0.52 <= fit.slope <= -0.48


@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 10.0))
def test_fit_power_law_recovers_any_exponent(p, c):
    t = np.geomspace(1, 1000, 20)
    fit = fit_power_law(t, c * t**p)
    assert fit.slope == pytest.approx(p, abs=1e-9)


def test_fit_power_law_errors():
    t = np.arange(1.0, 20.0)
    with pytest.raises(ValueError):
        fit_power_law(t, t, t_min=15.0)
    with pytest.raises(ValueError):
        fit_power_law(t, t - 5.0)
    assert fit_power_law(t[:4], t[:4] ** 2, min_samples=4).slope == pytest.approx(2.0)


def test_fit_log_phase_exact():
    t = np.linspace(20, 400, 100)
    gam = 0.5 * t + 0.3 * np.sin(2 * np.pi * t)
    phase = 0.7 + 0.03 * np.log(t) - 2.0 / gam
    a, b, c = fit_log_phase(t, phase, gam)
    assert (a, b, c) == pytest.approx((0.7, 0.03, -2.0), rel=1e-9)


# file formats ------------------------------------------------------------

def test_norms_csv_round_trip(tmp_path):
    s = NormSeries(times=[0.0, 0.5, 1.0], mass=[1.0, 1.0, 1.0], grad=[0.1, 0.2, 1 / 3],
                   jnorm=[0.5, 0.6, 0.7], sup=[0.9, 0.8, np.pi / 10])
    p = tmp_path / "norms.csv"
    io.write_norms_csv(p, s)
    header = p.read_text().splitlines()[0]
    assert header == "t,mass,grad_l2,j_l2,sup,x_norm_partial,s_norm_partial"
    back = io.read_norms_csv(p)
    for k in ("times", "mass", "grad", "jnorm", "sup"):
        assert getattr(back, k) == getattr(s, k)


def test_norms_csv_rejects_wrong_header(tmp_path):
    p = tmp_path / "n.csv"
    p.write_text("t,mass\n0,1\n")
    with pytest.raises(ValueError):
        io.read_norms_csv(p)


def test_field_binary_round_trip(tmp_path):
    g = Grid(12.5, 64)
    rng = np.random.default_rng(0)
    f = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64), 3.25)
    p = tmp_path / "u.bin"
    io.write_field(p, f)
    raw = p.read_bytes()
    assert raw[:8] == b"DMNLS1\x00\x00" and len(raw) == 32 + 16 * 64
    back = io.read_field(p)
    assert back.grid == g and back.time == 3.25
    assert np.array_equal(back.values, f.values)
    p.write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ValueError):
        io.read_field(p)
    p.write_bytes(raw[:-16])
    with pytest.raises(ValueError):
        io.read_field(p)


def test_profile_json_round_trip(tmp_path):
    pg = profile_grid(4.0, 32)
    W0 = np.exp(-pg.x**2) * (1 + 0.1j)
    prof = ScatteringProfile(pg, W0, 0.1 * pg.x, W0 * 1j, 16.0, 0.5, (200.0, 400.0),
                             {"drift": 1e-3})
    p = tmp_path / "profile.json"
    io.write_profile_json(p, prof, {"epsilon": 0.1})
    data = json.loads(p.read_text())
    assert list(data) == ["xi", "W0_re", "W0_im", "Phi", "W_re", "W_im", "meta"]
    back = io.read_profile_json(p)
    assert np.array_equal(back.W, prof.W) and np.array_equal(back.Phi, prof.Phi)
    assert back.window == (200.0, 400.0) and back.diagnostics["epsilon"] == 0.1
    data["W_re"] = data["W_re"][:-1]
    with pytest.raises(ValueError):
        io.validate_profile_dict(data)


# end-to-end runs ---------------------------------------------------------

def test_small_run_writes_artifacts(tmp_path):
    c = small_config(tmp_path)
    res = run_simulation(c)
    out = tmp_path / "run"
    for name in ("norms.csv", "profile.json", "history.npz", "run.json", "u_final.bin",
                 "u_t16.bin", "w_t16.bin", "u_t32.bin", "w_t32.bin"):
        assert (out / name).exists(), name
    assert res.log.mass_drift < 1e-10
    summary = json.loads((out / "run.json").read_text())
    assert summary["truncated"] is False
    assert -0.55 < summary["decay_fit"]["slope"] < -0.45
    w = io.read_field(out / "w_t32.bin")
    assert w.grid == profile_grid(4.0, 64) and w.time == 32.0


def test_runs_are_byte_identical(tmp_path):
    a = small_config(tmp_path / "a", t_max=24.0, window_start=17.0, window_end=24.0,
                     fit_t_min=17.0)
    b = a.replace(output_dir=str(tmp_path / "b" / "run"))
    run_simulation(a)
    run_simulation(b)
    for name in ("norms.csv", "profile.json", "history.npz", "u_final.bin", "u_t16.bin"):
        pa = tmp_path / "a" / "run" / name
        pb = tmp_path / "b" / "run" / name
        assert pa.read_bytes() == pb.read_bytes(), name


def test_zero_data_stays_zero(tmp_path):
    res = run_simulation(small_config(tmp_path, epsilon=0.0), write=False)
    assert not np.any(res.final.values)
    assert max(res.norms.sup) == 0.0
    assert not np.any(res.profile.W)


def test_linear_mode_matches_gaussian_oracle(tmp_path):
    c = small_config(tmp_path, nonlinear_coeff=0.0, epsilon=0.1)
    res = run_simulation(c, write=False)
    u0 = initial_data(c)
    scale = u0.values[c.size // 2].real / np.pi**-0.25
    a = c.dispersion_map.total(c.t_max)
    x = c.grid.x
    exact = scale * np.pi**-0.25 * (1 + 2j * a) ** -0.5 * np.exp(-x**2 / (2 * (1 + 2j * a)))
    assert np.max(np.abs(res.final.values - exact)) < 1e-6


def test_abort_writes_truncated_record(tmp_path):
    c = small_config(tmp_path, half_width=16.0, size=256, t_max=20.0, window_start=16.0,
                     window_end=20.0)
    with pytest.raises(SolverAbort):
        run_simulation(c)
    summary = json.loads((tmp_path / "run" / "run.json").read_text())
    assert summary["truncated"] is True
    assert summary["error"]["error"]
    assert (tmp_path / "run" / "norms.csv").exists()


def test_verify_identities_small():
    res = verify_identities(5, seed=3)
    assert all(len(v) == 5 for v in res.values())
    assert max(max(v) for v in res.values()) < 1e-6


def test_compare_constant_mode_agrees_to_splitting_order(tmp_path):
    c = small_config(tmp_path, dispersion="constant", solver="standard", epsilon=0.3)
    rep = compare_solvers(c, write=False)
    assert set(rep["models"]) == {"standard", "gt"}
    # the two models solve the same equation; only their time integrators differ
    half = compare_solvers(c.replace(dt=0.025), write=False)
    ratio = rep["standard_vs_gt_sup"] / half["standard_vs_gt_sup"]
    assert 3.6 < ratio < 4.4


@pytest.mark.slow
def test_compare_map_all_models_decay(tmp_path):
    c = RunConfig(half_width=1024.0, size=4096, dt=0.05, t_max=100.0, window_start=50.0,
                  window_end=100.0, fit_t_min=20.0, xi_max=4.0, xi_points=128,
                  output_dir=str(tmp_path / "cmp"))
    rep = compare_solvers(c)
    assert set(rep["models"]) == {"dmnls", "standard", "gt"}
    for name, m in rep["models"].items():
        assert -0.55 <= m["decay_fit"]["slope"] <= -0.45, name
    saved = json.loads((tmp_path / "cmp" / "compare.json").read_text())
    assert "_results" not in saved and set(saved["models"]) == set(rep["models"])


# command line ------------------------------------------------------------

def test_cli_pipeline(tmp_path, capsys):
    cfg = write_toml(tmp_path / "run.toml", {**SMALL, "output_dir": str(tmp_path / "out")})
    assert main(["simulate", "--config", str(cfg)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["mass_drift"] < 1e-10

    assert main(["fit-decay", "--config", str(cfg), "--t-min", "20"]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert -0.55 < fit["slope"] < -0.45
    assert (tmp_path / "out" / "decay_fit.json").exists()

    before = io.read_profile_json(tmp_path / "out" / "profile.json")
    assert main(["extract-profile", "--config", str(cfg)]) == 0
    capsys.readouterr()
    after = io.read_profile_json(tmp_path / "out" / "profile.json")
    np.testing.assert_allclose(after.W, before.W, rtol=0, atol=1e-15)

    assert main(["extract-profile", "--config", str(cfg), "--window", "30", "40"]) == 0
    diag = json.loads(capsys.readouterr().out)
    assert diag["window"] == [30.0, 40.0]


def test_cli_verify_identities(capsys):
    assert main(["verify-identities", "--count", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["tolerance"] == 1e-6


def test_cli_compare(tmp_path, capsys):
    cfg = write_toml(tmp_path / "run.toml", {**SMALL, "dispersion": "constant",
                                             "solver": "standard"})
    assert main(["compare", "--config", str(cfg), "--output", str(tmp_path / "cmp")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"standard", "gt"}
    assert (tmp_path / "cmp" / "compare.json").exists()


def test_cli_error_exit(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("epsilonn = 0.1\n")
    code = main(["simulate", "--config", str(cfg), "--output", str(tmp_path / "err")])
    assert code == 2
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "ValueError"
    assert json.loads((tmp_path / "err" / "error.json").read_text()) == record


def test_cli_abort_exit(tmp_path, capsys):
    cfg = write_toml(tmp_path / "run.toml", {**SMALL, "half_width": 16.0, "size": 256,
                                             "t_max": 20.0, "window_start": 16.0,
                                             "window_end": 20.0,
                                             "output_dir": str(tmp_path / "out")})
    assert main(["simulate", "--config", str(cfg)]) == 2
    record = json.loads(capsys.readouterr().err)
    assert "time" in record
    assert (tmp_path / "out" / "error.json").exists()
