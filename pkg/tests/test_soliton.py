import numpy as np
import pytest

from harnack_lab import flows, geometry, soliton, tensors
from harnack_lab.soliton import SolitonMetric

MODELS = flows.catalog()
POINTS = {
    "flat(2)": (np.array([0.3, -0.2]), 0.5),
    "sphere(3,1:1)": (np.array([0.2, 0.1, -0.3]), 0.2),
    "hyperbolic(2)": (np.array([0.1, 0.4]), 0.5),
    "cigar": (np.array([0.4, -0.3]), 0.5),
}


def _point(model):
    for key, val in POINTS.items():
        if model.label.startswith(key.split("(")[0]):
            return val
    raise KeyError(model.label)


def _rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


def test_flat_metric_components():
    S = SolitonMetric(flows.flat(2), 100)
    g = S.components(np.zeros(2), 0.5)
    assert np.isclose(g[0, 0], 404.0)
    assert np.allclose(g[1:, 1:], 2 * np.eye(2))
    assert np.all(g[0, 1:] == 0)


def test_flat_christoffels_by_hand():
    N, t = 100.0, 0.5
    S = SolitonMetric(flows.flat(2), N)
    G = soliton.closed_christoffel(S, np.zeros(2), t)
    u = 1 / (N / (2 * t**3) + 1 / t**2)
    assert np.allclose(G[1:, 1:, 0], -np.eye(2) / (2 * t))
    assert np.allclose(G[0, 1:, 1:], u * np.eye(2) / (2 * t**2))
    assert np.isclose(G[0, 0, 0], -3 / (2 * t) + u / (2 * t) * (2 / (2 * t**2)))
    assert np.allclose(G[1:, 1:, 1:], 0)


def test_flat_spatial_curvature_is_order_one_over_N():
    # g_N restricted to the spatial slice has sectional curvature -u / (4 t^4)
    t = 0.5
    vals = []
    for N in (1e3, 1e5, 1e7):
        S = SolitonMetric(flows.flat(2), N)
        vals.append(N * soliton.closed_curvature(S, np.zeros(2), t)[1, 2, 1, 2])
    assert abs(vals[-1] + 1.0) < 1e-6
    assert abs(vals[0] + 1.0) > abs(vals[-1] + 1.0)


def test_flat_defect_only_spatial():
    S = SolitonMetric(flows.flat(2), 1e4)
    E = soliton.soliton_defect(S, np.zeros(2), 0.5)
    assert np.all(E[0, :] == 0) and np.all(E[:, 0] == 0)
    assert np.abs(E[1:, 1:]).max() > 0


def test_positivity_threshold():
    # R / t + n / 2t^2 > 0 for every catalog model, so any N > 0 is admissible
    for model in MODELS:
        x, t = _point(model)
        assert soliton.positivity_threshold(model, x, t) == 0.0
        assert SolitonMetric(model, 1e-6).components(x, t)[0, 0] > 0
    with pytest.raises(soliton.SolitonRangeError):
        SolitonMetric(MODELS[0], 0)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_defect_methods_agree(model):
    x, t = _point(model)
    for N in (1e2, 1e4):
        S = SolitonMetric(model, N)
        a = soliton.soliton_defect(S, x, t, "combined")
        b = soliton.soliton_defect(S, x, t, "sum")
        assert np.max(np.abs(a - b)) < 1e-9 * max(1.0, np.abs(S.components(x, t)).max())
    with pytest.raises(ValueError):
        soliton.soliton_defect(S, x, t, "other")


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_closed_forms_match_engine(model):
    x, t = _point(model)
    S = SolitonMetric(model, 10.0)
    G = S.field()
    p = soliton.spacetime_point(x, t)
    assert _rel(geometry.christoffel(G, p), soliton.closed_christoffel(S, x, t)) < 1e-6
    Rm = geometry.riemann(G, p)
    assert _rel(Rm, soliton.closed_curvature(S, x, t)) < 1e-6
    assert _rel(geometry.ricci(G, p, Rm), soliton.closed_ricci(S, x, t)) < 1e-6
    H = geometry.hessian(G, lambda q: -S.N / (2 * q[0]), p)
    assert _rel(H, soliton.closed_hessian(S, x, t)) < 1e-6


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_defect_and_limit_decay_like_one_over_N(model):
    x, t = _point(model)
    Ns = [1e3, 1e4, 1e5, 1e6]
    seq = soliton.defect_sequence(model, x, t, Ns)
    lead, scale = soliton.defect_leading_norm(model, x, t)
    assert abs(Ns[-1] * seq[-1] - lead) < 1e-4 * scale
    if lead > 1e-8 * scale:
        assert abs(soliton.loglog_slope(Ns, seq) + 1) < 0.05
    else:
        assert soliton.loglog_slope(Ns, seq) < -1.5
    dist = soliton.limit_sequence(model, x, t, Ns)
    if max(dist) > 0:
        assert abs(soliton.loglog_slope(Ns, dist) + 1) < 0.05


def test_hyperbolic_leading_defect_vanishes_at_half():
    # K(t) = -1/(1+2t): 2 Rm*Ric + 3 Ric/2t + g/4t^2 = (K^2 + 3K/2t + 1/4t^2) g vanishes at t = 1/2
    h = flows.hyperbolic(2)
    assert soliton.defect_leading_norm(h, np.array([0.1, 0.2]), 0.5)[0] < 1e-14
    assert soliton.defect_leading_norm(h, np.array([0.1, 0.2]), 0.2)[0] > 1e-2


def test_loglog_slope_exact():
    assert np.isclose(soliton.loglog_slope([1, 10, 100], [3, 0.3, 0.03]), -1.0)


def test_sphere_limit_ricci_tt():
    pkg = soliton.limit_package(flows.sphere(3, 1.0), np.zeros(3), 0.1)
    # R = 10 and R_t = 200/3 at t = 0.1, so (R_t + R / t) / 2 = 250/3
    assert abs(pkg.Ric_inf[0, 0] - 250 / 3) < 1e-9
    assert np.allclose(pkg.Ric_inf[0, 1:], 0)
    assert np.allclose(pkg.Ric_inf, pkg.Ric_inf.T)
    assert np.allclose(pkg.h, np.diag([100.0, *np.diag(flows.sphere(3, 1.0).metric(np.zeros(3), 0.1))]))
    assert np.allclose(pkg.ginv_inf[0], 0)
    doc = pkg.to_json()
    assert abs(doc["Ric_inf_tt"] - 250 / 3) < 1e-9


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_limit_curvature_symmetries(model):
    x, t = _point(model)
    R = soliton.limit_curvature(model, x, t)
    sym = tensors.symmetry_residual(R)
    scale = max(np.abs(R).max(), 1.0)
    assert max(sym.values()) < 1e-10 * scale


def test_limit_laplacian_of_spatial_scalar_is_metric_laplacian():
    model = flows.cigar()
    x, t = np.array([0.3, 0.2]), 0.5
    f = lambda p: np.sin(p[1]) * np.cos(2 * p[2]) + p[0] ** 2
    lap = soliton.limit_laplacian(model, f, x, t)
    G = model.spatial_field(t)
    direct = geometry.laplacian(G, lambda y: f(np.concatenate([[t], y])), x)
    assert abs(lap - direct) < 1e-6 * max(1.0, abs(direct))


def test_lie_derivative_counts_time_indices():
    T = np.ones((2, 2))
    L = soliton.lie_derivative_time(T, np.zeros((2, 2)), 0.5)
    assert np.array_equal(L, np.array([[2.0, 1.0], [1.0, 0.0]]))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_mainformula(model):
    x, t = _point(model)
    assert soliton.mainformula_residual(model, x, t) < 1e-4


def test_mainformula_stencil_domain():
    with pytest.raises(soliton.SolitonRangeError):
        soliton.mainformula_residual(flows.sphere(3, 1.0), np.zeros(3), 0.2499)


def test_rescaled_metric_converges_to_cone():
    model = flows.cigar()
    x, alpha, N = np.array([0.2, 0.1]), 0.0, 50.0
    cone = soliton.cone_limit_metric(model, N, x, alpha)
    dists = [np.abs(soliton.rescaled_metric(model, N, s, x, alpha) - cone).max() for s in (1e-2, 1e-3, 1e-4)]
    assert dists[0] / dists[1] > 5 and dists[1] / dists[2] > 5
    flat = flows.flat(2)
    assert np.allclose(soliton.rescaled_metric(flat, N, 1.0, x, 0.0)[1:, 1:], np.eye(2))
    with pytest.raises(soliton.SolitonRangeError):
        soliton.rescaled_metric(model, N, 0.0, x, alpha)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_alpha_coordinates_are_a_pullback(model):
    x, t = _point(model)
    alpha = np.log(t)
    J = soliton.alpha_jacobian(t, model.n)
    expected = tensors.pullback(soliton.limit_curvature(model, x, t), J)
    assert _rel(soliton.r_infinity_alpha(model, x, alpha), expected) < 1e-10 or np.abs(expected).max() == 0


def test_appendix_framed_is_stable_in_N():
    for model in MODELS:
        for N in (1e3, 1e4, 1e5):
            doc = soliton.appendix_a_check(model, N, points=3, seed=1)
            assert doc["max_framed"] < 1e-5, (model.label, N, doc["framed"])
