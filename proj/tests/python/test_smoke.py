import math

import pytest

import ogcflow

ELLIPSE = {
    "domain": {"kind": "ellipse", "semi_axes": [2.0, 1.0]},
    "sweep": {"grid": 8, "segments": 60},
    "oracle": {"grid": 16},
}
OSCILLATOR = {
    "well": {"lambda": [1.0, math.sqrt(2.0)], "energy": 1.0},
    "domain": {"kind": "jacobi", "delta": 0.05},
    "sweep": {"grid": 8, "segments": 100},
}


def test_commands():
    assert ogcflow.commands() == ["check-domain", "solve-ogc", "solve-brake", "oracle", "compare"]


def test_ellipse_levels():
    results, files = ogcflow.run("solve-ogc", ELLIPSE)
    assert results["status"] == "ok"
    assert results["sweep"]["levels"] == pytest.approx([4.0, 16.0], rel=1e-8)
    assert files["levels.csv"].startswith(b"index,class,energy")
    assert files["ogcs.svg"].startswith(b"<svg")


def test_brake_orbits_match_closed_forms():
    results, _ = ogcflow.run("solve-brake", OSCILLATOR)
    periods = sorted(o["half_period"] for o in results["orbits"])
    reference = sorted(o["half_period"] for o in ogcflow.axis_orbits([1.0, math.sqrt(2.0)], 1.0))
    assert periods == pytest.approx(reference, abs=1e-3)
    assert reference == pytest.approx([math.pi / 2, math.pi / math.sqrt(2.0)], abs=1e-12)


def test_results_are_deterministic():
    a, fa = ogcflow.run("oracle", ELLIPSE)
    b, fb = ogcflow.run("oracle", ELLIPSE, threads=2)
    assert a == b
    assert fa == fb


def test_config_error_carries_pointer():
    with pytest.raises(ogcflow.ConfigError) as err:
        ogcflow.run("solve-ogc", {"domain": {"kind": "ellipse", "semi_axes": [2.0, -1.0]}})
    assert err.value.pointer == "/domain/semi_axes/1"
    assert err.value.document["status"] == "config-error"


def test_unsupported_combination():
    with pytest.raises(ogcflow.RunError):
        ogcflow.run("oracle", {"domain": {"kind": "ellipse", "semi_axes": [2.0, 1.5, 1.0]}})
