import csv
import math

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from measfridge import config as cfgmod
from measfridge.cli import main
from measfridge.config import ConfigError, RunConfig
from measfridge.scan import Table, expected_rows, run

STATIC = """
name: small
model: dots_fermionic
mode: diagonal
baths:
  left: {temperature: 1.2, strength: 0.05}
  right: {temperature: 0.8, strength: 0.05}
system: {e_left: 1.0, e_right: 2.0, coupling: 0.2}
measurement: {gamma_m: 0.05}
sweep: {parameter: measurement.gamma_m, start: 0.0, stop: 0.2, points: 5}
"""


@pytest.fixture
def static_file(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(STATIC)
    return p


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# config


@pytest.mark.parametrize("name", cfgmod.PRESETS)
def test_presets_round_trip(name):
    cfg = cfgmod.preset(name)
    assert cfgmod.loads(cfg.dump()) == cfg


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.01, 1), st.floats(0, 1),
    st.sampled_from(["diagonal", "coherent"]), st.integers(0, 2**31),
)
def test_random_config_round_trip(t_l, e_l, g, gm, mode, seed):
    cfg = cfgmod.loads(STATIC)
    data = cfg.to_dict()
    data["baths"]["left"]["temperature"] = t_l
    data["system"].update(e_left=e_l, coupling=g)
    data["measurement"]["gamma_m"] = gm
    data["mode"] = mode
    data["solver"]["base_seed"] = seed
    cfg = cfgmod.from_dict(data)
    assert cfgmod.loads(cfg.dump()) == cfg


def test_preset_captions():
    f3 = cfgmod.preset("fig3").params()
    assert (f3.e_left, f3.e_right, f3.coupling) == (4.0, 0.15, 0.5)
    d = cfgmod.preset("fig4_top").drive
    assert (d.e_left.offset, d.e_left.amplitude, d.e_left.phase) == (1.5, 0.2, 0.0)
    assert (d.e_right.offset, d.e_right.amplitude, d.e_right.phase) == (0.3, 1.0, math.pi / 2)
    assert d.omega == 0.005
    b = cfgmod.preset("fig4_top").baths
    assert b.left.temperature - b.right.temperature == pytest.approx(0.05)
    assert (b.left.temperature + b.right.temperature) / 2 == pytest.approx(1.0)
    f7 = cfgmod.preset("fig7")
    assert f7.measurement.gamma_m == 0.2
    assert (f7.system.e_right, f7.system.coupling) == (3.0, 2.0)
    assert f7.baths.left.cutoff == f7.baths.right.cutoff == 100.0
    f5 = cfgmod.preset("fig5")
    assert f5.baths.left.temperature == f5.baths.right.temperature == 1.0
    f8 = cfgmod.preset("fig8")
    assert (f8.baths.left.strength, f8.baths.left.cutoff, f8.measurement.gamma_m) == (0.05, 10.0, 0.05)
    f2 = cfgmod.preset("fig2")
    assert f2.solver.dt == 0.005 and f2.solver.initial_state == [0.5, 0.2, 0.3]


def test_unknown_preset_lists_names():
    with pytest.raises(ConfigError) as info:
        cfgmod.preset("fig9")
    for name in cfgmod.PRESETS:
        assert name in str(info.value)


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match="baths.left.temprature"):
        cfgmod.loads(STATIC.replace("temperature: 1.2", "temprature: 1.2"))


def test_sweep_of_missing_field_is_named():
    with pytest.raises(ConfigError, match="system.detuning"):
        cfgmod.loads(STATIC.replace("measurement.gamma_m, start", "system.detuning, start"))


def test_system_and_drive_are_exclusive():
    data = yaml.safe_load(STATIC)
    data["drive"] = cfgmod.preset("fig4_top").to_dict()["drive"]
    with pytest.raises(ConfigError, match="exactly one"):
        cfgmod.from_dict(data)
    del data["drive"], data["system"]
    with pytest.raises(ConfigError):
        cfgmod.from_dict(data)


@pytest.mark.parametrize(
    "old, new",
    [
        ("temperature: 1.2", "temperature: -1.2"),
        ("coupling: 0.2", "coupling: -0.2"),
        ("mode: diagonal", "mode: sideways"),
        ("points: 5", "points: 0"),
        ("strength: 0.05}\n  right", "strength: 0.05, nonlinearity: quadratic}\n  right"),
    ],
)
def test_invalid_values_rejected(old, new):
    assert old in STATIC
    with pytest.raises(ConfigError):
        cfgmod.loads(STATIC.replace(old, new))


def test_sweep_point_out_of_range_rejected():
    text = STATIC.replace("measurement.gamma_m, start: 0.0, stop: 0.2", "system.coupling, start: 0.2, stop: -0.2")
    with pytest.raises(ConfigError):
        run(cfgmod.loads(text))


# tables and regime flags


def test_rows_match_declared_grid():
    cfg = cfgmod.loads(STATIC)
    table = run(cfg)
    assert len(table.rows) == expected_rows(cfg) == 5
    assert all(len(r) == len(table.header) for r in table.rows)
    cfg = cfgmod.preset("fig2")
    assert len(run(cfg).rows) == expected_rows(cfg) == 501


def test_regime_flag():
    ok = run(cfgmod.loads(STATIC))
    assert all(r[-1] == "" for r in ok.rows)
    strong = run(cfgmod.loads(STATIC.replace("strength: 0.05", "strength: 0.5")))
    assert all("bath_strength_exceeds_coupling" in r[-1] for r in strong.rows)
    close = run(cfgmod.loads(STATIC.replace("e_right: 2.0", "e_right: 1.1")))
    assert all("detuning_not_large_vs_coupling" in r[-1] for r in close.rows)


def test_csv_full_precision():
    t = Table(["x", "y", "flag"], [[0.1, 1 / 3, ""], [math.nan, 2, "w"]])
    lines = t.to_csv().splitlines()
    assert lines[0] == "x,y,flag"
    assert lines[1] == "0.10000000000000001,0.33333333333333331,"
    assert float(lines[1].split(",")[1]) == 1 / 3
    assert lines[2] == "nan,2,w"


def test_parallel_rows_identical(static_file):
    cfg = cfgmod.load(static_file)
    assert run(cfg, jobs=2).to_csv() == run(cfg, jobs=1).to_csv()


# command line


def test_run_writes_csv_and_summary(static_file, tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert main(["run", str(static_file), "--out", str(out)]) == 0
    rows = _read(out)
    assert rows[0][0] == "measurement.gamma_m" and rows[0][-1] == "regime_warning"
    assert len(rows) == 6
    line = capsys.readouterr().out.strip()
    assert line.startswith("small: steady") and "5 rows" in line


def test_same_seed_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["preset", "fig2", "--seed", "5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    assert main(["preset", "fig2", "--seed", "6", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_fig2_columns(tmp_path):
    out = tmp_path / "f2.csv"
    assert main(["preset", "fig2", "--out", str(out)]) == 0
    header = _read(out)[0]
    assert header[:5] == ["t", "J_R_avg", "J_R_traj_1", "J_R_traj_2", "J_R_traj_3"]


def test_emit_config(capsys):
    assert main(["preset", "fig3", "--emit-config"]) == 0
    text = capsys.readouterr().out
    assert cfgmod.loads(text) == cfgmod.preset("fig3")


def test_sweep_subcommand(static_file, tmp_path):
    out = tmp_path / "s.csv"
    code = main(["sweep", str(static_file), "--parameter", "system.e_left", "--range", "0.5", "1.0",
                 "--points", "3", "--out", str(out)])
    assert code == 0
    rows = _read(out)
    assert rows[0][0] == "system.e_left"
    assert [float(r[0]) for r in rows[1:]] == [0.5, 0.75, 1.0]


def test_trajectory_subcommand(static_file, tmp_path):
    out = tmp_path / "t.csv"
    code = main(["trajectory", str(static_file), "--trajectories", "2", "--ensemble", "20", "--out", str(out)])
    assert code == 0
    header = _read(out)[0]
    assert header == ["t", "J_R_avg", "J_R_traj_1", "J_R_traj_2", "J_R_ens_mean", "J_R_ens_se", "regime_warning"]


def test_grid_flag(tmp_path):
    from measfridge.cli import build_parser, resolve_config

    args = build_parser().parse_args(["preset", "fig5", "--grid", "48", "--seed", "9"])
    cfg = resolve_config(args)
    assert cfg.solver.n_grid == 48 and cfg.solver.base_seed == 9
    assert main(["preset", "fig5", "--grid", "8", "--out", str(tmp_path / "x.csv")]) == 2


def test_exit_code_config_error(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(STATIC.replace("measurement.gamma_m, start", "nowhere.field, start"))
    assert main(["run", str(p)]) == 2
    assert "nowhere.field" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert main(["preset", "fig99"]) == 2


def test_exit_code_numerical_failure(tmp_path, capsys):
    data = cfgmod.preset("fig2").to_dict()
    data["solver"]["dt"] = 50.0
    data["solver"]["t_end"] = 500.0
    data["solver"]["every"] = 1
    p = tmp_path / "coarse.yaml"
    p.write_text(yaml.safe_dump(data))
    assert main(["run", str(p), "--out", str(tmp_path / "x.csv")]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_config_defaults_are_valid():
    baths = cfgmod.BathsBlock(cfgmod.BathBlock(1.0, 0.05), cfgmod.BathBlock(1.0, 0.05))
    cfg = RunConfig(baths=baths, system=cfgmod.StaticBlock(1.0, 2.0, 0.1))
    assert cfg.resolved_task == "steady"
    assert np.isfinite(run(cfg).column("J_R")).all()
