import numpy as np
import pytest

from legbench.config import (
    ConfigError,
    ParseError,
    RangeError,
    UnknownKey,
    default_manifest,
    load_config,
    parse_config,
)
from legbench.sim import Scenario, SmcSpec


def test_defaults_build_default_scenarios():
    m = default_manifest()
    assert m.controllers == ("SMC", "TJ", "ATJ")
    sc = m.scenario("SMC")
    ref = Scenario(controller=SmcSpec())
    np.testing.assert_allclose(sc.start, ref.start, atol=1e-15)
    np.testing.assert_allclose(sc.path.center, ref.path.center, atol=1e-15)
    assert sc.plant == ref.plant
    assert m.sim.n_ticks == 3000
    np.testing.assert_array_equal(m.controller("TJ").params.Kp, [700.0] * 3)
    assert m.controller("ATJ").params.ref_model.omega_n == 100.0


def test_empty_text_equals_defaults():
    assert parse_config("").values == default_manifest().values
    assert load_config(None).values == default_manifest().values


@pytest.mark.parametrize("text", ["tj.Kp = 900", "tj.Kp = 900 900 900", "tj.Kp = diag(900, 900, 900)"])
def test_gain_syntaxes(text):
    np.testing.assert_array_equal(parse_config(text).controller("TJ").params.Kp, [900.0] * 3)


def test_comments_and_blank_lines():
    m = parse_config("# header\n\nsim.t_end = 0.5   # shorter\nrun.controllers = tj, atj\n")
    assert m.sim.t_end == 0.5
    assert m.controllers == ("TJ", "ATJ")


def test_range_error_names_key():
    with pytest.raises(RangeError) as exc:
        parse_config("leg.m2 = -1")
    assert exc.value.key == "leg.m2"
    assert "leg.m2" in str(exc.value)


@pytest.mark.parametrize(
    "text,key",
    [
        ("path.branch = 2", "path.branch"),
        ("run.uncertainty_pct = -3", "run.uncertainty_pct"),
        ("sim.dt_control = 0", "sim"),
        ("smc.phi = 0", "smc"),
        ("path.S = 1.5", "path"),
    ],
)
def test_range_errors(text, key):
    with pytest.raises(RangeError) as exc:
        parse_config(text)
    assert exc.value.key == key


def test_unknown_key_rejected():
    with pytest.raises(UnknownKey) as exc:
        parse_config("sim.t_end = 1\ntj.Ki = 3\n")
    assert exc.value.key == "tj.Ki"
    assert exc.value.line == 2


@pytest.mark.parametrize(
    "text,line",
    [
        ("sim.t_end = 1\nnot a line\n", 2),
        ("tj.Kp = 1 2\n", 1),
        ("sim.substeps = 2.5", 1),
        ("atj.per_axis = maybe", 1),
        ("run.controllers = PID", 1),
        ("sim.t_end = 1\nsim.t_end = 2", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert isinstance(exc.value, ConfigError)


def test_round_trip():
    m = parse_config("tj.Kp = 1 2 3\nsmc.K = 20\natj.per_axis = yes\nsweep.pcts = 0 50\noutput.dir = out dir\n")
    again = parse_config(m.dump())
    assert again.values == m.values
    assert default_manifest().dump() == parse_config(default_manifest().dump()).dump()


def test_load_config_file(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("sim.t_end = 0.25\n")
    assert load_config(p).sim.t_end == 0.25
