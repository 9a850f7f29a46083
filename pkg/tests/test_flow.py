import json

import numpy as np
import pytest

from hydrotorus import flow
from hydrotorus.integral import IntegralCoeffs
from hydrotorus.metric import ConformalMetric, SemiGeodesicMetric, constant_field, expr_field
from hydrotorus.reducibility import conformal_metric_of, liouville_quadratic_integral, simple_wave
from hydrotorus.metric import LiouvilleSpec

SPEC = LiouvilleSpec.from_strings("2+cos(2*pi*xi)", "2+sin(2*pi*xi)", (1, 0, 0, 1))
START = flow.PhaseState((0.1, 0.2), (0.6, 0.8))


def test_flat_metric_gives_straight_lines():
    metric = SemiGeodesicMetric(constant_field(1.0))
    traj = flow.integrate(metric, START, 2.0, 0.01, stride=50)
    for st in traj.states:
        assert st.position.u1 == pytest.approx(0.1 + 0.6 * st.time, abs=1e-12)
        assert st.position.u2 == pytest.approx(0.2 + 0.8 * st.time, abs=1e-12)
        assert st.momentum == (0.6, 0.8)


def test_momentum_conserved_when_metric_depends_on_one_coordinate():
    metric = SemiGeodesicMetric(expr_field("1.5 + 0.4*sin(2*pi*x)"))
    traj = flow.integrate(metric, START, 5.0, 0.01, stride=10)
    p1 = np.array([s.momentum[0] for s in traj.states])
    assert np.max(np.abs(p1 - p1[0])) <= 1e-14


def test_liouville_quadratic_integral_conserved():
    metric = conformal_metric_of(SPEC)
    F2 = liouville_quadratic_integral(SPEC)
    traj = flow.integrate(metric, START, 10.0, 0.004, [F2], stride=250, order=4)
    drift = {d.name: d for d in flow.conservation_report(traj, ["F2"])}
    assert drift["H"].relative_drift <= 1e-10
    assert drift["F2"].max_drift <= 1e-9


def test_energy_drift_second_vs_fourth_order():
    sol = simple_wave(2.0, "1 + 0.3*sin(2*pi*xi)")
    metric = sol.metric()
    h2 = flow.conservation_report(flow.integrate(metric, START, 5.0, 0.002, stride=100))[0]
    h4 = flow.conservation_report(flow.integrate(metric, START, 5.0, 0.002, stride=100, order=4))[0]
    assert h4.relative_drift <= 1e-10
    assert h2.relative_drift > h4.relative_drift


def test_simple_wave_integrals_conserved():
    sol = simple_wave(2.0, "1 + 0.3*sin(2*pi*xi)")
    metric = sol.metric()
    traj = flow.integrate(metric, START, 5.0, 0.002, [sol.linear_integral(), sol.integral()],
                          stride=50, order=4)
    rep = flow.conservation_report(traj, ["F1", "F3"])
    assert [d.name for d in rep] == ["H", "F1", "F3"]
    assert rep[1].max_drift <= 1e-12
    assert rep[2].max_drift <= 1e-9


def test_non_integral_monitor_drifts():
    metric = conformal_metric_of(SPEC)
    bogus = IntegralCoeffs.from_strings(("1", "0", "0"), "conformal")  # p1^2
    traj = flow.integrate(metric, START, 5.0, 0.01, [bogus], stride=10)
    assert flow.conservation_report(traj)[1].relative_drift > 1e-2


@pytest.mark.parametrize("order", [2, 4])
def test_reversibility(order):
    metric = conformal_metric_of(SPEC)
    assert flow.reversibility_error(metric, START, 5.0, 0.01, order) <= 1e-10


@pytest.mark.parametrize("order", [2, 4])
def test_convergence_order(order):
    metric = conformal_metric_of(SPEC)
    f = flow.convergence_factor(metric, START, 1.0, 0.02, order)
    assert f == pytest.approx(2.0**order, rel=0.05)


def test_validation():
    metric = SemiGeodesicMetric(constant_field(1.0))
    with pytest.raises(ValueError):
        flow.integrate(metric, START, 1.0, 0.3)
    with pytest.raises(ValueError):
        flow.integrate(metric, START, 1.0, 0.1, order=3)
    with pytest.raises(ValueError):
        flow.integrate(metric, flow.PhaseState((0, 0), (0, 0)), 1.0, 0.1)
    with pytest.raises(ValueError):
        flow.PhaseState((float("nan"), 0), (1, 0))


def test_positivity_loss_is_reported():
    metric = ConformalMetric(expr_field("0.5 + sin(2*pi*t)"))
    with pytest.raises(flow.FlowError, match="positivity"):
        flow.integrate(metric, flow.PhaseState((0.2, 0.0), (1.0, 0.0)), 2.0, 0.01)


def test_ndjson_output(tmp_path):
    metric = conformal_metric_of(SPEC)
    traj = flow.integrate(metric, START, 1.0, 0.01, stride=25)
    path = tmp_path / "t.ndjson"
    flow.write_ndjson(traj, path, {"tool": "hydrotorus", "seed": None})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert json.loads(lines[0][2:])["tool"] == "hydrotorus"
    recs = [json.loads(x) for x in lines[1:]]
    assert [r["time"] for r in recs] == pytest.approx([0, 0.25, 0.5, 0.75, 1.0])
    assert set(recs[0]) == {"time", "u1", "u2", "p1", "p2", "H", "monitors"}
