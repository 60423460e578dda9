import numpy as np
import pytest

from harnack_lab import flows, geometry


def test_catalog_labels_roundtrip():
    labels = [m.label for m in flows.catalog()]
    assert labels == ["flat(2)", "sphere(3,1)", "hyperbolic(2)", "cigar"]
    for lab in labels:
        assert flows.get_model(lab).label == lab
    with pytest.raises(KeyError):
        flows.get_model("torus")


def test_shrinking_sphere_closed_forms():
    s = flows.sphere(3, 1.0)
    x = np.array([0.2, -0.1, 0.3])
    assert s.T == 0.25
    assert np.isclose(s.scalar(x, 0.1), 10.0)
    # R(t) = 6 / (1 - 4t), so dR/dt = 24 / (1 - 4t)^2
    assert np.isclose(s.dt_scalar(x, 0.1), 24 / 0.36)
    assert np.isclose(s.scalar(x, 0.2), 30.0)


def test_validity_interval_is_enforced():
    s = flows.sphere(3, 1.0)
    for t in (0.3, 0.5, -0.1):
        with pytest.raises(flows.ModelRangeError):
            s.metric(np.zeros(3), t)
    h = flows.hyperbolic(2)
    with pytest.raises(flows.ModelRangeError):
        h.metric(np.array([0.9, 0.5]), 0.5)


def test_cigar_scalar_curvature():
    c = flows.cigar()
    assert np.isclose(c.scalar(np.zeros(2), 0.0), 4.0)
    x = np.array([0.5, 0.3])
    assert np.isclose(c.scalar(x, 0.0), 4 / (1 + x @ x))
    # the closed form agrees with the engine on the time slice
    G = c.spatial_field(0.4)
    assert abs(geometry.scalar(G, x) - c.scalar(x, 0.4)) < 1e-7


@pytest.mark.parametrize("model", flows.catalog(), ids=lambda m: m.label)
def test_metric_evolves_by_ricci_flow(model):
    rng = np.random.default_rng(7)
    xs, ts = model.sample_points(rng, 3)
    for x, t in zip(xs, ts):
        dg = geometry.richardson_derivative(lambda s: model.metric(x, s), t, 1e-3 * t, 2)
        assert np.allclose(dg, -2 * model.ricci(x, t), atol=1e-8 * max(1.0, np.abs(dg).max()))


@pytest.mark.parametrize("model", flows.catalog(), ids=lambda m: m.label)
def test_validate_evolution(model):
    report = flows.validate_evolution(model, seed=1, points=6)
    assert report["passed"], report["worst"]
