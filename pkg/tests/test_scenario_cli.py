import subprocess
import sys

import numpy as np
import pytest

from poincare_gravity import cli
from poincare_gravity.scenario import (ParseError, RunError, ValidationError, _to_geometrized, load_scenario,
                                       parse_scenario, read_manifest, run, template_path)

MINIMAL = """
schema = 1
duration = 1.0
[integrator]
dt = 0.1
[[particles]]
mass = 1.0
position = [0.0, 0.0, 0.0]
"""

ORBIT = """
schema = 1
name = "orbit"
duration = 2.0
origin = [0.0, 0.0, 0.0]
[integrator]
dt = 0.05
[[particles]]
name = "a"
mass = 1.0
position = [0.0, 0.0, 0.0]
role = "source"
[[particles]]
name = "b"
mass = 1e-3
position = [10.0, 0.0, 0.0]
velocity = [0.0, 0.3, 0.0]
role = "test"
[[outputs]]
kind = "trajectory"
path = "traj.csv"
[[outputs]]
kind = "radiation"
particle = "b"
n_theta = 8
n_phi = 16
path = "rad.csv"
[[outputs]]
kind = "fields-on-grid"
n = 3
extent = 5.0
path = "fields.csv"
"""


def test_minimal_defaults_echoed():
    scn = parse_scenario(MINIMAL)
    assert len(scn.particles) == 1 and scn.particles[0].role == "both"
    echo = scn.echo()
    # every defaulted key has its value in the echo (two keys are renamed there)
    alias = {"units": "unit_system"}
    for key in scn.defaults_used:
        key = alias.get(key, key.replace(".identification", ".identification_mode"))
        assert key in echo, key
    assert "name" in scn.defaults_used and "units" in scn.defaults_used
    assert echo["unit_system"] == "geometrized"


def test_superluminal_si_input_rejected():
    text = 'units = "SI"\n' + MINIMAL.replace("position = [0.0, 0.0, 0.0]",
                                               'position = [0.0, 0.0, 0.0]\nvelocity = [3.0e8, 0.0, 0.0]')
    with pytest.raises(ValidationError) as exc:
        parse_scenario(text)
    assert exc.value.invariant == "all speeds < 1 after conversion"


@pytest.mark.parametrize("text,field", [
    (MINIMAL.replace("duration = 1.0\n", ""), "duration"),
    (MINIMAL.replace("mass = 1.0\n", ""), "particles.0.mass"),
    (MINIMAL + "bogus = 1\n", "particles.0"),
    (MINIMAL.replace("schema = 1", "schema = 2"), "schema"),
])
def test_parse_errors_name_field(text, field):
    with pytest.raises(ParseError) as exc:
        parse_scenario(text)
    assert exc.value.field == field


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_scenario("schema = 1\nduration = = 2\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("edit,invariant", [
    (("duration = 1.0", "duration = -1.0"), "duration > 0"),
    (("mass = 1.0", "mass = 0.0"), "mass > 0"),
    (("dt = 0.1", "dt = 0.0"), "dt > 0"),
])
def test_validation_errors(edit, invariant):
    with pytest.raises(ValidationError) as exc:
        parse_scenario(MINIMAL.replace(*edit))
    assert exc.value.invariant == invariant


def test_earth_sun_template_numbers():
    scn = load_scenario(template_path("earth_sun"))
    bodies, dt, duration, origin = _to_geometrized(scn)
    sun, earth = bodies
    assert sun.mass == pytest.approx(1476.6, rel=1e-4)
    assert earth.position[0] == 1.496e11
    assert earth.velocity[1] == pytest.approx(2.978e4 / 299792458.0)
    assert earth.spec.mass == 5.972e24
    assert duration == pytest.approx(30 * 86400 * 299792458.0)


def test_run_outputs_and_determinism(tmp_path):
    scn = parse_scenario(ORBIT, "orbit.toml")
    m1 = run(scn, tmp_path / "a", timestamp="T")
    m2 = run(scn, tmp_path / "b", timestamp="T")
    assert m1 == m2 and m1["status"] == "ok"
    for name in ("traj.csv", "rad.csv", "fields.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        assert b"\r\n" not in a
    assert (tmp_path / "a" / "manifest.txt").read_bytes() == (tmp_path / "b" / "manifest.txt").read_bytes()
    man = read_manifest(tmp_path / "a" / "manifest.txt")
    for key in scn.defaults_used:
        assert key in man["defaults_used"]
    assert "config_sha256" in man and "version.numpy" in man
    header = (tmp_path / "a" / "traj.csv").read_text().splitlines()[0]
    assert header.startswith("particle,t,tau,y1")
    rad = (tmp_path / "a" / "rad.csv").read_text().splitlines()
    assert rad[0] == "theta,phi,dP_dOmega" and rad[-1].startswith("# quadrature_total=")


def test_run_failure_writes_manifest(tmp_path):
    bad = ORBIT.replace('particle = "b"', 'particle = "nobody"')
    with pytest.raises(RunError):
        run(parse_scenario(bad), tmp_path)
    assert read_manifest(tmp_path / "manifest.txt")["status"] == "failed"


def test_trajectory_stays_on_orbit(tmp_path):
    run(parse_scenario(ORBIT), tmp_path)
    rows = np.genfromtxt(tmp_path / "traj.csv", delimiter=",", skip_header=1, usecols=range(1, 11))
    b = rows[rows[:, 0] >= 0]
    assert np.all(b[:, -1] < 1e-12)


def test_cli_commands(capsys, tmp_path):
    assert cli.main(["earth-power"]) == 0
    out = capsys.readouterr().out
    assert "|P| = 5.17" in out and "W" in out
    assert cli.main(["newton-check"]) == 0
    assert cli.main(["geometry", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "geometry.csv").exists()
    assert cli.main(["algebra-check", "--trials", "20", "--seed", "3"]) == 0
    assert "closure: PASS" in capsys.readouterr().out
    assert cli.main(["radiation", "--n-theta", "32", "--n-phi", "64"]) == 0
    assert cli.main(["checks", "kinetic"]) == 0


def test_cli_simulate_template(tmp_path, capsys):
    assert cli.main(["simulate", "--scenario", "static_source", "--out", str(tmp_path)]) == 0
    assert read_manifest(tmp_path / "manifest.txt")["status"] == "ok"


def test_cli_failure_exit_code(tmp_path, capsys):
    (tmp_path / "bad.toml").write_text(MINIMAL.replace("mass = 1.0", "mass = -1.0"))
    assert cli.main(["simulate", "--scenario", str(tmp_path / "bad.toml"), "--out", str(tmp_path)]) != 0
    assert "mass > 0" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "poincare_gravity", "earth-power"], capture_output=True, text=True)
    assert res.returncode == 0 and "|P|" in res.stdout
