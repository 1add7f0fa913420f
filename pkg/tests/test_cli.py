import csv
import io
import math

import pytest

from euqoe import cli
from euqoe.cli import ConfigError, load_config, main

SWEEP_INI = """\
[engine]
omega1 = 1.0
omega2 = 2.0
aH2 = 1.0
tau_a = 1.0

[sweep]
axis = alpha_aH
lo = 0.55
hi = 0.95
count = 9
"""


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv("EUQOE_CACHE_DIR", raising=False)


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _rows(text):
    return list(csv.DictReader(io.StringIO("\n".join(
        l for l in text.splitlines() if not l.startswith("#")))))


def test_efficiency_row(capsys):
    assert main(["efficiency", "--set", "engine.alpha_aH=0.6"]) == 0
    out = capsys.readouterr().out
    row = _rows(out)[0]
    assert float(row["eta_E"]) == pytest.approx(0.625, rel=1e-12)
    assert row["valid"] == "true"
    assert "# eta_E numeric" in out


def test_efficiency_inertial_limit(capsys):
    args = ["efficiency", "--set", "engine.alpha_aH=0", "--set", "engine.omega1=0.9",
            "--set", "engine.omega2=1.0", "--set", "engine.aH2=1.5"]
    assert main(args) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert float(row["eta_E"]) == pytest.approx(0.2, rel=1e-12)


@pytest.mark.parametrize("text, line", [
    ("[engine]\nomega1 = 1\nomega2 = abc\n", 3),
    ("[engine]\nomega1 = 1\nbogus = 2\n", 3),
    ("[engine\nomega1 = 1\n", 1),
])
def test_malformed_config_is_line_anchored(tmp_path, capsys, text, line):
    path = _write(tmp_path, text)
    assert main(["efficiency", "--config", path]) == 2
    assert f"{path}:{line}" in capsys.readouterr().err


def test_physical_constraints_checked_at_load(tmp_path):
    with pytest.raises(ConfigError, match="omega2"):
        load_config(overrides=["engine.omega1=3"])
    with pytest.raises(ConfigError):
        load_config(overrides=["engine.dimension=1p3", "engine.alpha_aH=0"])
    with pytest.raises(ConfigError, match="section.key"):
        load_config(overrides=["alpha_aH=0.5"])


def test_sweep_is_deterministic_and_cached(tmp_path, capsys):
    path = _write(tmp_path, SWEEP_INI + f"\n[cache]\ndir = {tmp_path / 'cache'}\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", path, "--out", str(a), "--workers", "1"]) == 0
    first = capsys.readouterr().out
    assert "engine evaluations 9, cache hits 0" in first
    assert main(["sweep", "--config", path, "--out", str(b), "--workers", "1"]) == 0
    assert "engine evaluations 0, cache hits 9" in capsys.readouterr().out
    assert a.read_bytes() == b.read_bytes()
    etas = [float(r["eta_E"]) for r in _rows(a.read_text())]
    assert len(etas) == 9
    assert all(x > y for x, y in zip(etas, etas[1:]))
    assert (tmp_path / "a.gp").exists()


def test_sweep_without_cache_is_still_byte_identical(tmp_path, capsys):
    path = _write(tmp_path, SWEEP_INI)
    outs = []
    for name, workers in (("x.csv", "1"), ("y.csv", "2")):
        out = tmp_path / name
        assert main(["sweep", "--config", path, "--out", str(out), "--workers", workers]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_empty_sweep_writes_header_only(tmp_path, capsys):
    path = _write(tmp_path, SWEEP_INI.replace("count = 9", "count = 0"))
    out = tmp_path / "empty.csv"
    assert main(["sweep", "--config", path, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("alpha_aH,I1,")


def test_sweep_needs_an_axis(capsys):
    assert main(["sweep"]) == 2


def test_environment_overrides_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("EUQOE_CACHE_DIR", str(tmp_path / "env"))
    assert load_config().cache_dir == str(tmp_path / "env")


def test_protocol_exit_codes(capsys):
    assert main(["protocol", "--set", "engine.alpha_aH=0.8"]) == 0
    text = capsys.readouterr().out
    assert text.count("= pass") == 6
    assert main(["protocol", "--set", "engine.alpha_aH=0.4"]) == 4
    text = capsys.readouterr().out
    assert "constraint_chain = fail" in text and "eta_E" in text


def test_cache_key_ignores_output_settings():
    a = load_config(overrides=["run.out=a.csv"])
    b = load_config(overrides=["run.out=b.csv", "run.workers=3"])
    assert cli.cache_key(a.point()) == cli.cache_key(b.point())
    c = load_config(overrides=["engine.tau_a=2"])
    assert cli.cache_key(a.point()) != cli.cache_key(c.point())


def test_log_axis_and_grid_order():
    cfg = load_config(overrides=["sweep.axis=tau_a", "sweep.lo=0.1", "sweep.hi=10",
                                 "sweep.count=3", "sweep.spacing=log",
                                 "sweep.2.axis=alpha_aH", "sweep.2.lo=0.6",
                                 "sweep.2.hi=0.8", "sweep.2.count=2"])
    grid = cfg.grid()
    assert [(round(g["tau_a"], 12), g["alpha_aH"]) for g in grid] == [
        (0.1, 0.6), (0.1, 0.8), (1.0, 0.6), (1.0, 0.8), (10.0, 0.6), (10.0, 0.8)]


def test_format_value():
    assert cli.format_value(True) == "true"
    assert cli.format_value(0.1) == "0.1"
    assert cli.format_value(math.nan) == "nan"


def test_verify_default_passes(capsys):
    assert main(["verify"]) == 0
    assert capsys.readouterr().out.count("PASS") == 7


def test_verify_reports_loosened_grid(capsys):
    assert main(["verify", "--set", "verify.k_max=6"]) == 5
    out = capsys.readouterr().out
    assert "failed suites: oracle" in out
    oracle_line = next(l for l in out.splitlines() if l.startswith("oracle"))
    assert float(oracle_line.split()[3]) > 1e-4
