"""Harnack inequalities of a Ricci flow read off from the soliton limits.

Hamilton's trace inequality is nonnegativity of ``Ric_inf``; the matrix
inequality and its ``C_k`` relatives are cone conditions on ``R_inf``.  All
forms are taken in an ``h``-orthonormal frame, ``e_0 = t d/dt`` and a
``g(t)``-orthonormal spatial frame.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import cones, soliton, tensors

__all__ = [
    "orthonormal_frame",
    "spatial_form",
    "product_form",
    "limit_form",
    "TraceVerdict",
    "trace_harnack",
    "matrix_harnack",
    "ck_harnack",
    "brendle_harnack",
    "HarnackVerdict",
]


def orthonormal_frame(model, x, t):
    """Columns form an ``h``-orthonormal frame in ``(t, x)`` coordinates."""
    n = model.n
    g = model.metric(x, t)
    E = np.zeros((n + 1, n + 1))
    E[0, 0] = t
    # g = L L^T, so the columns of L^-T are g-orthonormal
    L = np.linalg.cholesky(g)
    E[1:, 1:] = np.linalg.inv(L).T
    return E


def spatial_form(model, x, t):
    """Curvature form of ``g(t)`` at ``x`` in a ``g``-orthonormal frame."""
    L = np.linalg.cholesky(model.metric(x, t))
    T = tensors.pullback(model.riemann(x, t), np.linalg.inv(L).T)
    return tensors.form_from_tensor(T, tol=1e-9)


def product_form(model, x, t):
    """Curvature form of ``(M, g(t)) x R``: the spatial form with a flat extra slot."""
    n = model.n
    L = np.linalg.cholesky(model.metric(x, t))
    T = np.zeros((n + 1,) * 4)
    T[:n, :n, :n, :n] = tensors.pullback(model.riemann(x, t), np.linalg.inv(L).T)
    return tensors.form_from_tensor(T, tol=1e-9)


def limit_form(model, x, t):
    """``R_inf`` at ``(x, t)`` as a form in the ``h``-orthonormal frame."""
    E = orthonormal_frame(model, x, t)
    return tensors.form_from_tensor(tensors.pullback(soliton.limit_curvature(model, x, t), E), tol=1e-9)


@dataclass
class TraceVerdict:
    margin: float
    ric_tt: float
    eigenvalues: np.ndarray
    tol: float

    @property
    def status(self):
        return cones.classify(self.margin, self.tol)

    def to_json(self):
        return {
            "margin": float(self.margin),
            "ric_tt": float(self.ric_tt),
            "eigenvalues": self.eigenvalues.tolist(),
            "status": self.status,
        }


def trace_harnack(model, x, t, tol=None):
    """Smallest eigenvalue of ``Ric_inf`` relative to ``h``.

    ``ric_tt`` is the raw component ``Ric_inf(d/dt, d/dt)``.
    """
    ric = soliton.limit_ricci(model, x, t)
    h = soliton.reference_metric(model, x, t)
    lam = scipy.linalg.eigh(ric, h, eigvals_only=True)
    if tol is None:
        tol = cones.TOL_FACTOR * max(np.max(np.abs(lam)), np.finfo(float).tiny)
    return TraceVerdict(float(lam[0]), float(ric[0, 0]), lam, tol)


def matrix_harnack(model, x, t, tol=None):
    """Positivity of the full ``R_inf`` form (largest rank bound, exact eigen test)."""
    m = model.n + 1
    return cones.min_over_Sk(limit_form(model, x, t), cones.ConeSpec(m, m // 2), tol=tol)


@dataclass
class HarnackVerdict:
    """Conclusion on ``R_inf`` together with both readings of the hypothesis.

    ``hypothesis_flow`` tests the curvature of ``g(t)`` in ``C_k`` of the
    ``n``-dimensional space (``k`` capped at ``n // 2``) and
    ``hypothesis_product`` tests ``(M, g(t)) x R`` in ``C_k`` of dimension
    ``n + 1``.  The conclusion is asserted only when a hypothesis holds.
    """

    k: int
    conclusion: cones.MembershipVerdict
    hypothesis_flow: cones.MembershipVerdict
    hypothesis_product: cones.MembershipVerdict

    @staticmethod
    def _holds(v):
        return v is not None and v.status != "outside"

    @property
    def applicable(self):
        return self._holds(self.hypothesis_flow) or self._holds(self.hypothesis_product)

    @property
    def label(self):
        if not self.applicable:
            return "vacuous"
        return "holds" if self.conclusion.status != "outside" else "violated"

    def to_json(self):
        return {
            "k": self.k,
            "label": self.label,
            "conclusion": self.conclusion.to_json(),
            "hypothesis_flow": None if self.hypothesis_flow is None else self.hypothesis_flow.to_json(),
            "hypothesis_product": self.hypothesis_product.to_json(),
        }


def _verdict(form, dim, k, tol, seed, restarts):
    return cones.min_over_Sk(form, cones.ConeSpec(dim, k), tol=tol, seed=seed, restarts=restarts)


def ck_harnack(model, x, t, k, tol=None, seed=0, restarts=64):
    n = model.n
    m = n + 1
    if not 1 <= k <= m // 2:
        raise ValueError(f"k={k} outside 1..{m // 2}")
    conclusion = _verdict(limit_form(model, x, t), m, k, tol, seed, restarts)
    flow = None
    if n >= 2:
        flow = _verdict(spatial_form(model, x, t), n, min(k, n // 2), tol, seed, restarts)
    product = _verdict(product_form(model, x, t), m, k, tol, seed, restarts)
    return HarnackVerdict(k, conclusion, flow, product)


def brendle_harnack(model, x, t, tol=None, seed=0, restarts=64):
    return ck_harnack(model, x, t, 1, tol=tol, seed=seed, restarts=restarts)
