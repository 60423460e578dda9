import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harnack_lab import tensors

dims = st.integers(min_value=3, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_pairs_are_lexicographic():
    assert list(tensors.pairs(4)) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert tensors.form_dim(5) == 10
    assert tensors.dim_from_form_size(15) == 6
    with pytest.raises(ValueError):
        tensors.dim_from_form_size(7)


@given(dims, seeds)
@settings(max_examples=25, deadline=None)
def test_form_roundtrip(m, seed):
    M = tensors.random_form(m, np.random.default_rng(seed))
    T = tensors.tensor_from_form(M)
    assert max(tensors.symmetry_residual(T).values()) < 1e-12
    assert np.allclose(tensors.form_from_tensor(T), M)


@given(dims, seeds)
@settings(max_examples=25, deadline=None)
def test_bianchi_projection_is_idempotent(m, seed):
    X = np.random.default_rng(seed).standard_normal((tensors.form_dim(m),) * 2)
    P = tensors.bianchi_project(X + X.T)
    assert np.allclose(tensors.bianchi_project(P), P, atol=1e-13)
    assert np.max(np.abs(tensors.bianchi_defect(tensors.tensor_from_form(P)))) < 1e-12


@pytest.mark.parametrize("m", [3, 4, 5])
def test_bianchi_constraint_count(m):
    # the removed subspace is Lambda^4, of dimension C(m, 4)
    N = tensors.form_dim(m)
    basis = []
    for a in range(N):
        for b in range(a, N):
            E = np.zeros((N, N))
            E[a, b] = E[b, a] = 1.0
            basis.append(E - tensors.bianchi_project(E))
    rank = np.linalg.matrix_rank(np.array([B.ravel() for B in basis]), tol=1e-10)
    assert rank == comb(m, 4)


def test_form_from_tensor_rejects_bad_symmetry(rng):
    T = rng.standard_normal((3, 3, 3, 3))
    with pytest.raises(tensors.CurvatureSymmetryError):
        tensors.form_from_tensor(T)


def test_identity_form_is_unit_constant_curvature():
    m = 4
    T = tensors.constant_curvature_tensor(np.eye(m), 1.0)
    assert np.allclose(tensors.form_from_tensor(T), tensors.identity_form(m))
    assert T[0, 1, 0, 1] == 1.0


def test_kulkarni_nomizu(rng):
    m = 4
    g = np.eye(m)
    assert np.allclose(tensors.kulkarni_nomizu(g, g), 2 * tensors.constant_curvature_tensor(g, 1.0))
    A, B = tensors.random_symmetric(m, rng), tensors.random_symmetric(m, rng)
    K = tensors.kulkarni_nomizu(A, B)
    assert max(tensors.symmetry_residual(K).values()) < 1e-12
    assert np.max(np.abs(tensors.bianchi_defect(K))) < 1e-12
    assert np.allclose(K, tensors.kulkarni_nomizu(B, A))


def test_pullback_composes(rng):
    T = tensors.tensor_from_form(tensors.random_form(4, rng))
    A, B = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
    assert np.allclose(tensors.pullback(tensors.pullback(T, A), B), tensors.pullback(T, A @ B))


def test_rank_of_wedges(rng):
    m = 6
    u, v, w, z, a, b = (rng.standard_normal(m) + 1j * rng.standard_normal(m) for _ in range(6))
    assert tensors.rank(np.zeros(tensors.form_dim(m))) == 0
    assert tensors.rank(tensors.wedge(u, v)) == 1
    assert tensors.rank(tensors.wedge(u, v) + tensors.wedge(w, z)) == 2
    assert tensors.rank(tensors.wedge(u, v) + tensors.wedge(w, z) + tensors.wedge(a, b)) == 3
    # two wedges sharing a vector stay simple
    assert tensors.rank(tensors.wedge(u, v) + tensors.wedge(u, w)) == 1


def test_evaluate_is_real_and_identity_gives_norm(rng):
    m = 5
    w = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    val = tensors.evaluate(tensors.identity_form(m), w)
    assert np.isrealobj(val)
    assert np.isclose(val, np.vdot(w, w).real)


def test_json_roundtrip(rng):
    M = tensors.random_form(4, rng)
    doc = json.loads(json.dumps(tensors.form_to_json(M)))
    assert doc["basis"] == "lex"
    assert np.array_equal(tensors.form_from_json(doc), M)
    w = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    assert np.array_equal(tensors.two_vector_from_json(tensors.two_vector_to_json(w)), w)


def test_json_rejects_non_bianchi(rng):
    X = rng.standard_normal((6, 6))
    S = X + X.T
    with pytest.raises(tensors.CurvatureSymmetryError):
        tensors.form_from_json({"dim": 4, "basis": "lex", "matrix": S.tolist()})
