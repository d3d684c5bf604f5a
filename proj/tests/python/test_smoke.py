import math

import pytest

import delaylab


def test_builtin_registry():
    assert set(delaylab.builtin_model_names()) >= {"linear", "scaled", "quadratic"}
    m = delaylab.builtin_model("linear")
    assert m.window == (-1.5, 1.5)
    assert m.g(0.25) == 0.25
    with pytest.raises(delaylab.UnknownModel, match="quadratic"):
        delaylab.builtin_model("cubic")


def test_solve_exit():
    s = delaylab.solve_exit(delaylab.builtin_model("linear"), -1.0)
    assert abs(s.x1 - 1.0) < 1e-10
    assert abs(s.zeta0 - 0.5) < 1e-12
    assert abs(s.tau1 - 2.0) < 1e-10
    q = delaylab.solve_exit(delaylab.model_from_text("1", "x + x^2", (-0.8, 0.8)), -0.5)
    assert abs(q.x1 - (math.sqrt(3) - 1) / 2) < 1e-12


def test_errors_map_to_exceptions():
    lin = delaylab.builtin_model("linear")
    with pytest.raises(delaylab.PreconditionError):
        delaylab.solve_exit(lin, 0.5)
    with pytest.raises(delaylab.NoExitInWindow):
        delaylab.solve_exit(delaylab.model_from_text("1", "x", (-1, 0.5)), -0.9)
    with pytest.raises(delaylab.ParseError, match="offset 1"):
        delaylab.model_from_text("1", "2x", (-1, 1))
    with pytest.raises(delaylab.IntegrationError, match="zeta chart"):
        delaylab.simulate(lin, -1, 0.1, 1e-4, chart="xz")
    assert issubclass(delaylab.NoExitInWindow, delaylab.DelaylabError)


def test_hypotheses():
    checks = delaylab.check_hypotheses(delaylab.model_from_text("-1", "x", (-1, 1)), 64)
    assert not checks[0]["passed"]
    assert checks[0]["first_violation"] == -1.0


def test_simulate_and_max_zeta():
    lin = delaylab.builtin_model("linear")
    traj = delaylab.simulate(lin, -1, 0.1, 0.05)
    assert traj["reached_section"]
    assert abs(traj["x"][-1] - 1.0) < 0.1
    assert traj["events"] == [len(traj["t"]) - 1]
    assert 0.49 < delaylab.max_zeta(lin, -1, 0.1, 1e-4) < 0.51


def test_geometry_helpers():
    assert delaylab.transversality_det(delaylab.builtin_model("scaled"), 0.3, 1.0) == -2.0
    assert delaylab.hausdorff_distance([(0, 0)], [(3, 4)]) == 5.0
    curves = delaylab.slow_curves(delaylab.builtin_model("linear"), -1, 1, 5)
    assert curves["zeta_minus"][2] == pytest.approx(0.5, abs=1e-14)


def test_sweep_report():
    report = delaylab.sweep(delaylab.builtin_model("linear"), -1, 0.1, [0.2, 0.1, 0.05], jobs=2)
    assert [r["eps"] for r in report["records"]] == [0.2, 0.1, 0.05]
    errors = [abs(r["minz_exponent"] - 0.5) for r in report["records"]]
    assert errors == sorted(errors, reverse=True)
    assert report["reference"]["zeta0"] == 0.5
    value, uncertainty = delaylab.derivative_probe(delaylab.builtin_model("linear"), -1, 0.1, 0.01, 1e-4)
    assert abs(value + 1) < 0.05 and uncertainty > 0
