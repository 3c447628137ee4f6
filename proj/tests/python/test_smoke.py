import math

import pytest

import wsattack


def test_gain_table():
    assert wsattack.per_station_gain(30) == 0.0435
    assert wsattack.system_gain_factor(30, 30) == 1.087
    with pytest.raises(IndexError):
        wsattack.per_station_gain(31)


def test_numerics():
    assert wsattack.binary_entropy(0.5) == 1.0
    assert wsattack.phase_slice_error(16) == pytest.approx(0.5 - math.sin(math.pi / 8) / (math.pi / 4), abs=1e-15)
    with pytest.raises(ValueError):
        wsattack.binary_entropy(1.5)


def test_tf_overestimation():
    r = wsattack.tf_key_rate(400, 1.087)
    assert r["r_estimated"] > r["r_true"] > 0
    honest = wsattack.tf_key_rate(400)
    assert honest["r_estimated"] == honest["r_true"]


def test_sns_with_config_patch():
    r = wsattack.sns_key_rate(300, 1.087, config={"sns": {"send_probability": 0.05}})
    assert r["r_estimated"] > r["r_true"] > 0


def test_invalid_config():
    with pytest.raises(wsattack.InvalidParameter):
        wsattack.tf_key_rate(100, config={"intensities": {"mu1": 1e-4}})
    problems = wsattack.validate_config({"attack": {"f_aom2_mhz": 150}})
    assert any("lock limit" in p for p in problems)
    assert wsattack.validate_config(wsattack.default_config()) == []


def test_opll_two_peaks():
    out = wsattack.simulate_opll(30, 100, 500, seed=3)
    freqs = [p[0] for p in out["spectrum"]]
    assert freqs == [112.0, 142.0]
    assert len(out["t_us"]) == len(out["power_mw"]) == 10000


def test_reproduce_fig4():
    tables = wsattack.reproduce("fig4")
    lines = tables["fig4"].strip().splitlines()
    assert lines[0].startswith("f_delta_mhz,station_gain")
    assert len(lines) == 7
