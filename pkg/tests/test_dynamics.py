import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harnack_lab import dynamics, flows, tensors
from harnack_lab.constants import HAMILTON_3D_FACTOR, Q_SO_NORMALIZATION

dims = st.integers(min_value=3, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_zero_and_quadratic(rng):
    m = 4
    assert np.all(dynamics.Q(np.zeros((m,) * 4), np.eye(m)) == 0)
    assert np.all(dynamics.F(np.zeros((m,) * 4), np.eye(m)) == 0)
    T = tensors.tensor_from_form(tensors.random_form(m, rng))
    assert np.allclose(dynamics.Q(3 * T, np.eye(m)), 9 * dynamics.Q(T, np.eye(m)))
    assert np.allclose(dynamics.F(2 * T, np.eye(m)), 4 * dynamics.F(T, np.eye(m)))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dynamics.Q(np.zeros((3,) * 4), np.eye(4))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_constant_curvature(m):
    K = 1.5
    T = tensors.constant_curvature_tensor(np.eye(m), K)
    assert np.allclose(dynamics.F(T, np.eye(m)), -4 * (m - 1) * K * T)
    assert np.allclose(dynamics.Q(T, np.eye(m)), 2 * (m - 1) * K * T)


def test_F_dim3_unit_sphere_component():
    T = tensors.constant_curvature_tensor(np.eye(3), 1.0)
    assert np.isclose(dynamics.F(T, np.eye(3))[0, 1, 0, 1], -8.0)


def test_three_dimensional_pattern():
    a, b, c = 0.7, -1.3, 2.1
    Qd = dynamics.Q_form(np.diag([a, b, c]))
    expected = HAMILTON_3D_FACTOR * np.array([a * a + b * c, b * b + a * c, c * c + a * b])
    assert np.allclose(np.diag(Qd), expected)
    assert np.allclose(Qd - np.diag(np.diag(Qd)), 0)


@given(dims, seeds)
@settings(max_examples=30, deadline=None)
def test_outputs_are_curvature_tensors(m, seed):
    rng = np.random.default_rng(seed)
    T = tensors.tensor_from_form(tensors.random_form(m, rng))
    for out in (dynamics.Q(T, np.eye(m)), dynamics.F(T, np.eye(m))):
        tensors.check_curvature_tensor(out, tol=1e-12)


@given(dims, seeds)
@settings(max_examples=30, deadline=None)
def test_orthogonal_equivariance(m, seed):
    rng = np.random.default_rng(seed)
    T = tensors.tensor_from_form(tensors.random_form(m, rng))
    A, _ = np.linalg.qr(rng.standard_normal((m, m)))
    g = np.eye(m)
    for op in (dynamics.Q, dynamics.F):
        lhs = op(tensors.pullback(T, A), g)
        rhs = tensors.pullback(op(T, g), A)
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.abs(rhs).max())


def test_ad_structure_constants():
    e12, e13, e23 = np.eye(3)
    assert np.allclose(dynamics.bracket(e12, e23), e13)
    assert np.allclose(dynamics.bracket(e12, e12), 0)


@given(dims, seeds)
@settings(max_examples=30, deadline=None)
def test_ad_is_antisymmetric(m, seed):
    rng = np.random.default_rng(seed)
    N = tensors.form_dim(m)
    X, Y, Z = (rng.standard_normal(N) + 1j * rng.standard_normal(N) for _ in range(3))
    A = dynamics.ad_matrix(X)
    # <ad_X Y, Z> + <Y, ad_X Z> = 0 for the bilinear pairing
    assert abs((A @ Y) @ Z + Y @ (A @ Z)) < 1e-13 * max(1.0, np.abs(Y).max() * np.abs(Z).max() * np.abs(X).max() * 10)


def _sharp_oracle(M):
    """-tr(ad_X R ad_Y R) by explicit matrix commutators on so(m)."""
    N = M.shape[0]
    E = tensors.two_vector_matrix(np.eye(N)) / np.sqrt(2)  # tr(A^T B)-orthonormal
    coeff = lambda A: np.einsum("pij,ij->p", E, A)
    R = lambda A: np.einsum("p,pq,qij->ij", coeff(A), M / 2, E)
    comm = lambda A, B: A @ B - B @ A
    out = np.zeros_like(M)
    for p in range(N):
        for q in range(N):
            tr = sum(np.sum(E[r] * comm(E[p], R(comm(E[q], R(E[r]))))) for r in range(N))
            out[p, q] = -2 * tr
    return out


def test_sharp_matches_direct_trace(rng):
    for M in (tensors.identity_form(3), tensors.random_form(4, rng)):
        assert np.allclose(dynamics.sharp(M), _sharp_oracle(M), atol=1e-12)


def test_square_is_psd_and_sharp_symmetric(rng):
    for m in (3, 4, 5, 6):
        M = tensors.random_form(m, rng)
        assert np.linalg.eigvalsh(dynamics.square(M))[0] >= -1e-12
        S = dynamics.sharp(M)
        assert np.allclose(S, S.T)
    assert np.all(dynamics.square(np.zeros((3, 3))) == 0)
    assert np.all(dynamics.sharp(np.zeros((3, 3))) == 0)


def test_q_decomposition_constant():
    c, worst = dynamics.measure_q_normalization(samples=20)
    assert abs(c - Q_SO_NORMALIZATION) < 1e-12
    assert worst < 1e-10


def test_ode_zero_and_riccati_blowup():
    m = 3
    traj = dynamics.integrate_ode(np.zeros((3, 3)), np.eye(m), 1.0, 0.1)
    assert np.all(traj.forms == 0) and not traj.diverged
    # lambda' = 4 lambda^2 for the identity form in dim 3: lambda = 1 / (1 - 4t)
    traj = dynamics.integrate_ode(tensors.identity_form(m), np.eye(m), 0.2, 1e-3)
    assert abs(traj.forms[-1][0, 0] - 5.0) < 1e-6
    assert np.allclose(traj.forms[-1], traj.forms[-1][0, 0] * np.eye(3))
    traj = dynamics.integrate_ode(tensors.identity_form(m), np.eye(m), 0.3, 1e-3)
    assert traj.diverged and 0.24 < traj.blowup_time < 0.26


def test_ode_preserves_bianchi(rng):
    traj = dynamics.integrate_ode(tensors.random_form(5, rng) * 0.1, np.eye(5), 0.5, 0.01)
    assert traj.bianchi_drift.max() < 1e-10
    for M in traj.forms[::10]:
        tensors.check_curvature_tensor(tensors.tensor_from_form(M), tol=1e-10)


def test_rmeq_residual_examples():
    f = flows.flat(2)
    assert dynamics.ricci_flow_curvature_residual(f, np.array([0.1, 0.2]), 0.5) == 0.0
    s = flows.sphere(3, 1.0)
    assert dynamics.ricci_flow_curvature_residual(s, np.array([0.1, 0.2, -0.3]), 0.2) < 1e-6
    c = flows.cigar()
    assert dynamics.ricci_flow_curvature_residual(c, np.array([0.4, -0.2]), 0.5) < 1e-6
    with pytest.raises(flows.ModelRangeError):
        dynamics.ricci_flow_curvature_residual(s, np.zeros(3), 0.2499)
