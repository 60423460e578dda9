"""Reaction terms of the curvature evolution and their so(m) description.

``Q`` and ``F`` take the *inverse-role* tensor ``ginv`` (the contravariant
metric ``g^{ab}``) rather than ``g`` itself, so that degenerate limits whose
inverse exists only on the cotangent side can be used directly.
"""

from functools import lru_cache

import numpy as np

from . import tensors
from .constants import Q_SO_NORMALIZATION

__all__ = [
    "Q",
    "F",
    "ricci_contraction",
    "Q_form",
    "ad_basis",
    "ad_matrix",
    "bracket",
    "square",
    "sharp",
    "so_inner_scale",
    "ricci_flow_curvature_residual",
    "measure_q_normalization",
    "q_normalization_residual",
    "q_from_so",
    "integrate_ode",
    "OdeTrajectory",
]


def _check(T, ginv):
    T = np.asarray(T)
    ginv = np.asarray(ginv)
    m = T.shape[0]
    if T.shape != (m,) * 4 or ginv.shape != (m, m):
        raise ValueError(f"dimension mismatch: tensor {T.shape}, metric {ginv.shape}")
    return T, ginv


def Q(T, ginv):
    """Quadratic reaction term ``Q(T, g)`` of the curvature evolution.

    ``Q_abcd = 2 g^{xz} g^{yw} [T_axby T_czdw - T_axby T_dzcw
    + T_axcy T_bzdw - T_axdy T_bzcw]``.
    """
    T, ginv = _check(T, ginv)
    # B[a, b, c, d] = g^{xz} g^{yw} T_axby T_czdw
    Traised = np.einsum("xz,yw,czdw->cxdy", ginv, ginv, T)
    B = np.einsum("axby,cxdy->abcd", T, Traised)
    return 2.0 * (
        B
        - np.einsum("abdc->abcd", B)
        + np.einsum("acbd->abcd", B)
        - np.einsum("adbc->abcd", B)
    )


def ricci_contraction(T, ginv):
    """``T_ab = g^{cd} T_acbd``."""
    T, ginv = _check(T, ginv)
    return np.einsum("cd,acbd->ab", ginv, T)


def F(T, ginv):
    """Linear-in-Ricci reaction term ``F(T, g)``.

    ``F_abcd = -g^{xy} [T_xbcd T_ay + T_axcd T_by + T_abxd T_cy + T_abcx T_dy]``.
    Equals ``-D_A T`` for the endomorphism ``A = g^{-1} T_..``.
    """
    T, ginv = _check(T, ginv)
    A = ginv @ ricci_contraction(T, ginv)  # A[x, a] = g^{xy} T_ya
    return -(
        np.einsum("xa,xbcd->abcd", A, T)
        + np.einsum("xb,axcd->abcd", A, T)
        + np.einsum("xc,abxd->abcd", A, T)
        + np.einsum("xd,abcx->abcd", A, T)
    )


def Q_form(M, ginv=None):
    m = tensors.dim_from_form_size(np.shape(M)[0])
    if ginv is None:
        ginv = np.eye(m)
    return tensors.form_from_tensor(Q(tensors.tensor_from_form(M), ginv), check=False)


@lru_cache(maxsize=None)
def _ad_basis(m):
    P = tensors.pairs(m)
    E = tensors.two_vector_matrix(np.eye(len(P)))  # E[p] is the matrix of e_p
    ads = np.zeros((len(P), len(P), len(P)))
    for p in range(len(P)):
        comm = E[p] @ E - E @ E[p]
        ads[p] = tensors.two_vector_from_matrix(comm).T
    ads.setflags(write=False)
    return ads


def ad_basis(m):
    """Matrices of ``ad_{e_p}`` on the lexicographic Lambda^2 basis, shape (N, N, N)."""
    return _ad_basis(m)


def ad_matrix(X):
    """Matrix of ``ad_X Y = [X, Y]`` for ``X`` given by Lambda^2 coefficients.

    Complex-linear in ``X``; antisymmetric in the orthonormal basis.
    """
    X = np.asarray(X)
    m = tensors.dim_from_form_size(X.shape[0])
    return np.tensordot(X, ad_basis(m), axes=1)


def bracket(X, Y):
    return ad_matrix(X) @ np.asarray(Y)


def so_inner_scale():
    """Ratio of the so(m) inner product used by :func:`square`/:func:`sharp` to ``tr(X^T Y)/2``."""
    return 2.0


def square(M):
    """``R^2`` as a bilinear form, ``R^2(X, Y) = <R X, R Y>``.

    Operators are raised with the so(m) inner product ``tr(X^T Y)``, under
    which ``e_i ^ e_j`` has squared length 2.
    """
    M = np.asarray(M)
    lam = so_inner_scale()
    return M @ M / lam


def sharp(M):
    """``R^#(X, Y) = -tr(ad_X o R o ad_Y o R)``, same normalization as :func:`square`."""
    M = np.asarray(M)
    m = tensors.dim_from_form_size(M.shape[0])
    ads = ad_basis(m)
    lam = so_inner_scale()
    # tr(ad_p R ad_q R) with R = M / lam as an operator
    AM = np.einsum("pij,jk->pik", ads, M)
    return -np.einsum("pij,qji->pq", AM, AM) / lam**2


def q_from_so(M):
    """``Q`` reconstructed from ``R^2 + R^#`` with the pinned constant."""
    return Q_SO_NORMALIZATION * (square(M) + sharp(M))


def measure_q_normalization(dims=(3, 4, 5, 6), samples=50, seed=0):
    """Least-squares constant ``c`` in ``Q = c (R^2 + R^#)`` over random forms.

    Returns ``(c, worst relative residual after fixing c)``.
    """
    num = den = 0.0
    pairs = []
    for m in dims:
        rng = np.random.default_rng([seed, m, 0x51])
        for _ in range(samples):
            M = tensors.random_form(m, rng)
            A, B = Q_form(M), square(M) + sharp(M)
            num += np.sum(A * B)
            den += np.sum(B * B)
            pairs.append((A, B))
    c = num / den
    worst = max(np.linalg.norm(A - c * B) / np.linalg.norm(A) for A, B in pairs)
    return float(c), float(worst)


def q_normalization_residual(M, c=None):
    """``|Q - c (R^2 + R^#)| / |Q|`` for one form, with the pinned ``c`` by default."""
    c = Q_SO_NORMALIZATION if c is None else c
    A = Q_form(M)
    nrm = np.linalg.norm(A)
    res = np.linalg.norm(A - c * (square(M) + sharp(M)))
    return float(res / nrm) if nrm > 0 else float(res)


class OdeTrajectory:
    """Result of :func:`integrate_ode`.

    ``times`` and ``forms`` are the accepted steps; ``diverged`` is set when the
    Frobenius norm passed ``blowup`` and ``blowup_time`` records when.
    """

    def __init__(self, times, forms, bianchi_drift, diverged, blowup_time):
        self.times = np.asarray(times)
        self.forms = np.asarray(forms)
        self.bianchi_drift = np.asarray(bianchi_drift)
        self.diverged = diverged
        self.blowup_time = blowup_time

    def to_json(self):
        return {
            "times": self.times.tolist(),
            "norms": [float(np.linalg.norm(f)) for f in self.forms],
            "final": tensors.form_to_json(self.forms[-1]),
            "max_bianchi_drift": float(np.max(self.bianchi_drift, initial=0.0)),
            "diverged": self.diverged,
            "blowup_time": self.blowup_time,
        }


def _bianchi_distance(M):
    return float(np.linalg.norm(M - tensors.bianchi_project(M)))


def integrate_ode(M0, ginv, duration, step, blowup=1e12):
    """Classical RK4 for ``dR/dt = Q(R, g)`` on curvature forms."""
    if step <= 0:
        raise ValueError("step must be positive")
    M = np.array(M0, dtype=float)
    f = lambda X: Q_form(X, ginv)
    times, forms, drift = [0.0], [M.copy()], [_bianchi_distance(M)]
    nsteps = int(np.ceil(duration / step - 1e-12))
    t = 0.0
    for n in range(nsteps):
        h = min(step, duration - t)
        k1 = f(M)
        k2 = f(M + 0.5 * h * k1)
        k3 = f(M + 0.5 * h * k2)
        k4 = f(M + h * k3)
        M = M + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (n + 1) * step if n + 1 < nsteps else duration
        nrm = np.linalg.norm(M)
        if not np.isfinite(nrm) or nrm > blowup:
            return OdeTrajectory(times, forms, drift, True, t)
        times.append(t)
        forms.append(M.copy())
        drift.append(_bianchi_distance(M) / max(nrm, 1.0))
    return OdeTrajectory(times, forms, drift, False, None)


def ricci_flow_curvature_residual(model, x, t, dt=None, config=None):
    """Relative residual of ``dR/dt = Delta R + F(R, g) + Q(R, g)`` for a flow model.

    ``dR/dt`` comes from a Richardson-extrapolated difference in ``t`` of the
    model's closed-form curvature, ``Delta R`` from the geometry engine on the
    spatial metric ``g(t)``.
    """
    from . import geometry

    x = np.asarray(x, dtype=float)
    config = config or geometry.DiffConfig()
    if dt is None:
        dt = config.step * max(t, 1e-2)
    model.check_time(t - 2 * dt)
    model.check_time(t + 2 * dt)
    dRdt = geometry.richardson_derivative(lambda s: model.riemann(x, s), t, dt, config.levels)
    G = model.spatial_field(t, config)
    lap = geometry.laplacian(G, lambda q: model.riemann(q, t), x)
    Rm = model.riemann(x, t)
    ginv = np.linalg.inv(model.metric(x, t))
    rhs = lap + F(Rm, ginv) + Q(Rm, ginv)
    res = dRdt - rhs
    scale = max(np.max(np.abs(dRdt)), np.max(np.abs(lap)), np.max(np.abs(Rm)) ** 2, 1e-300)
    if np.max(np.abs(Rm)) == 0 and np.max(np.abs(dRdt)) == 0:
        return 0.0
    return float(np.max(np.abs(res)) / scale)
