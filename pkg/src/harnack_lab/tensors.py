"""Algebraic curvature tensors, curvature forms on Lambda^2 and complex 2-vectors.

Conventions used throughout the package:

* A curvature tensor is a real array ``T[a, b, c, d]`` with the symmetries of
  the Riemann tensor, sign fixed so that ``T[0, 1, 0, 1] > 0`` on a round
  sphere.
* Lambda^2 V uses the lexicographic basis ``e_i ^ e_j`` (``i < j``).  Under the
  identification ``e_i ^ e_j <-> E_ij = e_i e_j^T - e_j e_i^T`` the inner
  product ``<X, Y> = tr(X^T Y) / 2`` makes this basis orthonormal.
* The form matrix of ``T`` is ``M[(i, j), (k, l)] = T[i, j, k, l]``.
* A complex 2-vector is the coefficient vector of ``omega`` on that basis.
"""

import json
from functools import lru_cache

import numpy as np

__all__ = [
    "pairs",
    "pair_index",
    "form_dim",
    "dim_from_form_size",
    "form_from_tensor",
    "tensor_from_form",
    "bianchi_defect",
    "bianchi_project",
    "bianchi_project_tensor",
    "symmetry_residual",
    "check_curvature_tensor",
    "kulkarni_nomizu",
    "constant_curvature_tensor",
    "identity_form",
    "random_form",
    "random_symmetric",
    "pullback",
    "wedge",
    "two_vector_matrix",
    "two_vector_from_matrix",
    "rank",
    "evaluate",
    "inner",
    "norm",
    "form_to_json",
    "form_from_json",
    "two_vector_to_json",
    "two_vector_from_json",
    "CurvatureSymmetryError",
]

RANK_CUTOFF = 1e-10


class CurvatureSymmetryError(ValueError):
    """Raised when an input violates the curvature tensor symmetries."""


@lru_cache(maxsize=None)
def pairs(m):
    """Lexicographic list of index pairs ``(i, j)`` with ``i < j``."""
    return tuple((i, j) for i in range(m) for j in range(i + 1, m))


@lru_cache(maxsize=None)
def _pair_arrays(m):
    p = np.array(pairs(m), dtype=int).reshape(-1, 2)
    return p[:, 0], p[:, 1]


def pair_index(m):
    """Return an ``m x m`` integer table mapping ``(i, j)`` to its Lambda^2 slot.

    Entries with ``i >= j`` are -1.
    """
    table = -np.ones((m, m), dtype=int)
    for n, (i, j) in enumerate(pairs(m)):
        table[i, j] = n
    return table


def form_dim(m):
    return m * (m - 1) // 2


def dim_from_form_size(size):
    m = int(round((1 + np.sqrt(1 + 8 * size)) / 2))
    if form_dim(m) != size:
        raise ValueError(f"{size} is not the dimension of any Lambda^2 R^m")
    return m


def _scale(T):
    s = np.max(np.abs(T)) if T.size else 0.0
    return s if s > 0 else 1.0


def symmetry_residual(T):
    """Largest violation of the curvature symmetries, relative to ``max|T|``.

    Returns a dict with keys ``antisym12``, ``antisym34``, ``pair`` and
    ``bianchi``.
    """
    T = np.asarray(T)
    s = _scale(T)
    return {
        "antisym12": np.max(np.abs(T + T.transpose(1, 0, 2, 3))) / s,
        "antisym34": np.max(np.abs(T + T.transpose(0, 1, 3, 2))) / s,
        "pair": np.max(np.abs(T - T.transpose(2, 3, 0, 1))) / s,
        "bianchi": np.max(np.abs(bianchi_defect(T))) / s,
    }


def check_curvature_tensor(T, tol=1e-12):
    res = symmetry_residual(T)
    worst = max(res.values())
    if worst > tol:
        raise CurvatureSymmetryError(
            f"curvature symmetries violated (worst residual {worst:.3e}): {res}"
        )
    return res


def bianchi_defect(T):
    """``T_abcd + T_acdb + T_adbc`` for every index quadruple."""
    T = np.asarray(T)
    return T + T.transpose(0, 2, 3, 1) + T.transpose(0, 3, 1, 2)


def form_from_tensor(T, tol=1e-12, check=True):
    """Form matrix of a curvature tensor on the lexicographic Lambda^2 basis."""
    T = np.asarray(T, dtype=float)
    m = T.shape[0]
    if T.shape != (m, m, m, m):
        raise ValueError(f"expected an (m, m, m, m) array, got {T.shape}")
    if check:
        check_curvature_tensor(T, tol)
    i, j = _pair_arrays(m)
    return T[i[:, None], j[:, None], i[None, :], j[None, :]].copy()


def tensor_from_form(M):
    """Inverse of :func:`form_from_tensor` (no Bianchi check)."""
    M = np.asarray(M)
    m = dim_from_form_size(M.shape[0])
    i, j = _pair_arrays(m)
    T = np.zeros((m,) * 4, dtype=M.dtype)
    I, K = np.meshgrid(np.arange(len(i)), np.arange(len(i)), indexing="ij")
    a, b, c, d = i[I], j[I], i[K], j[K]
    T[a, b, c, d] = M
    T[b, a, c, d] = -M
    T[a, b, d, c] = -M
    T[b, a, d, c] = M
    return T


def bianchi_project_tensor(T):
    """Remove the totally antisymmetric part of a pair-symmetric tensor.

    For tensors with the pair and skew symmetries of a curvature tensor, the
    Bianchi defect divided by 3 is the full antisymmetrization, so this is the
    orthogonal projection onto the algebraic curvature tensors.
    """
    T = np.asarray(T)
    return T - bianchi_defect(T) / 3.0


def bianchi_project(M):
    """Orthogonal projection of a symmetric Lambda^2 matrix onto curvature forms."""
    M = np.asarray(M, dtype=float)
    M = 0.5 * (M + M.T)
    return form_from_tensor(bianchi_project_tensor(tensor_from_form(M)), check=False)


def kulkarni_nomizu(A, B):
    """Kulkarni-Nomizu product of two symmetric 2-tensors.

    ``(A o B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il``, so that
    ``(g o g) / 2`` is the unit constant-curvature tensor.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return (
        np.einsum("ik,jl->ijkl", A, B)
        + np.einsum("jl,ik->ijkl", A, B)
        - np.einsum("il,jk->ijkl", A, B)
        - np.einsum("jk,il->ijkl", A, B)
    )


def constant_curvature_tensor(g, K=1.0):
    """``K (g_ik g_jl - g_il g_jk)``."""
    g = np.asarray(g, dtype=float)
    return 0.5 * K * kulkarni_nomizu(g, g)


def identity_form(m):
    return np.eye(form_dim(m))


def random_symmetric(m, rng):
    X = rng.standard_normal((m, m))
    return 0.5 * (X + X.T)


def random_form(m, rng):
    """Bianchi projection of a Gaussian symmetric Lambda^2 matrix."""
    n = form_dim(m)
    X = rng.standard_normal((n, n))
    return bianchi_project(0.5 * (X + X.T))


def pullback(T, A):
    """``T_A(v1, v2, v3, v4) = T(A v1, A v2, A v3, A v4)``."""
    return np.einsum("ea,fb,gc,hd,efgh->abcd", A, A, A, A, T)


def wedge(u, v):
    """Coefficients of ``u ^ v`` on the lexicographic basis."""
    u = np.asarray(u)
    v = np.asarray(v)
    i, j = _pair_arrays(len(u))
    return u[i] * v[j] - u[j] * v[i]


def two_vector_matrix(omega):
    """Antisymmetric ``m x m`` matrix ``A`` with ``A[i, j] = omega_(ij)``."""
    omega = np.asarray(omega)
    m = dim_from_form_size(omega.shape[-1])
    i, j = _pair_arrays(m)
    A = np.zeros(omega.shape[:-1] + (m, m), dtype=np.result_type(omega, float))
    A[..., i, j] = omega
    A[..., j, i] = -omega
    return A


def two_vector_from_matrix(A):
    A = np.asarray(A)
    i, j = _pair_arrays(A.shape[-1])
    return A[..., i, j]


def rank(omega, cutoff=RANK_CUTOFF):
    """Least number of simple wedges summing to ``omega``.

    Half the numerical rank of the antisymmetric matrix of ``omega``, with
    singular values below ``cutoff * s_max`` counted as zero.
    """
    s = np.linalg.svd(two_vector_matrix(omega), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    r = int(np.sum(s > cutoff * s[0]))
    # complex antisymmetric matrices have even rank; round the numerical rank
    return (r + 1) // 2


def evaluate(M, omega):
    """``R(omega, conj(omega))`` for a real form matrix ``M``; always real."""
    M = np.asarray(M)
    omega = np.asarray(omega)
    if M.shape[0] != omega.shape[-1]:
        raise ValueError(f"form of size {M.shape[0]} vs 2-vector of size {omega.shape[-1]}")
    return np.real(np.einsum("...p,pq,...q->...", omega, M, omega.conj()))


def inner(omega, eta):
    """Hermitian inner product ``<omega, conj(eta)>`` on Lambda^2 C^m."""
    return np.vdot(eta, omega)


def norm(M):
    """Frobenius norm of a form matrix."""
    return float(np.linalg.norm(M))


def form_to_json(M):
    M = np.asarray(M, dtype=float)
    return {"dim": dim_from_form_size(M.shape[0]), "basis": "lex", "matrix": M.tolist()}


def form_from_json(doc, tol=1e-10):
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("basis", "lex") != "lex":
        raise ValueError(f"unsupported basis {doc.get('basis')!r}")
    M = np.asarray(doc["matrix"], dtype=float)
    m = int(doc["dim"])
    if M.shape != (form_dim(m), form_dim(m)):
        raise ValueError(f"matrix shape {M.shape} does not match dim {m}")
    s = max(np.max(np.abs(M)), 1.0) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > tol * s:
        raise CurvatureSymmetryError("form matrix is not symmetric")
    T = tensor_from_form(M)
    if np.max(np.abs(bianchi_defect(T)), initial=0.0) > tol * s:
        raise CurvatureSymmetryError("form matrix violates the first Bianchi identity")
    return M


def two_vector_to_json(omega):
    omega = np.asarray(omega, dtype=complex)
    return {
        "dim": dim_from_form_size(omega.shape[0]),
        "re": omega.real.tolist(),
        "im": omega.imag.tolist(),
    }


def two_vector_from_json(doc):
    if isinstance(doc, str):
        doc = json.loads(doc)
    omega = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if omega.shape != (form_dim(int(doc["dim"])),):
        raise ValueError("2-vector length does not match dim")
    return omega
