"""The canonical expanding soliton metric of a Ricci flow and its N -> infinity limits.

Space-time points are ``p = (t, x_1, ..., x_n)``: index 0 is the time
coordinate.  All closed forms here take the model's curvature data at
``(x, t)`` and return arrays on ``n + 1`` indices.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .dynamics import F, Q
from .flows import ModelRangeError
from .tensors import kulkarni_nomizu

__all__ = [
    "SolitonMetric",
    "SolitonRangeError",
    "soliton_metric",
    "positivity_threshold",
    "closed_christoffel",
    "closed_curvature",
    "closed_ricci",
    "closed_hessian",
    "soliton_defect",
    "defect_norm",
    "LimitPackage",
    "limit_package",
    "limit_curvature",
    "limit_ricci",
    "limit_christoffel",
    "reference_metric",
    "reference_inverse",
    "h_norm",
    "limit_laplacian",
    "lie_derivative_time",
    "mainformula_residual",
    "rescaled_metric",
    "cone_limit_metric",
    "r_infinity_alpha",
    "alpha_jacobian",
    "assemble_spacetime",
    "spacetime_point",
]


class SolitonRangeError(ValueError):
    pass


def spacetime_point(x, t):
    return np.concatenate([[float(t)], np.asarray(x, dtype=float)])


class _Data:
    """Curvature data of ``g(t)`` at one point, computed once."""

    def __init__(self, model, x, t):
        model.check_time(t, allow_zero=False)
        x = model.check_point(x)
        self.n = model.n
        self.t = t
        self.g = model.metric(x, t)
        self.ginv = np.linalg.inv(self.g)
        self.Gamma = model.christoffel(x, t)
        self.Rm = model.riemann(x, t)
        self.Ric = model.ricci(x, t)
        self.R = model.scalar(x, t)
        self.dR = model.grad_scalar(x, t)
        self.ddR = model.hess_scalar(x, t)
        self.dRic = model.grad_ricci(x, t)
        self.lapRic = model.lap_ricci(x, t)
        self.Rt = model.dt_scalar(x, t)
        self.Ric_mixed = self.ginv @ self.Ric  # R^i_j
        self.Ric_up = self.ginv @ self.Ric @ self.ginv
        # P = Ric + g / 2t, the combination appearing everywhere below
        self.P = self.Ric + self.g / (2 * t)
        # Q_t = 2R/t + R_t + n / 2t^2
        self.Qt = 2 * self.R / t + self.Rt + self.n / (2 * t**2)

    @property
    def M(self):
        """``Delta R_ij + 2 R_ikjl R^kl - R_i^k R_jk + R_ij / 2t - 1/2 nabla_i nabla_j R``."""
        t = self.t
        return (
            self.lapRic
            + 2 * np.einsum("ikjl,kl->ij", self.Rm, self.Ric_up)
            - self.Ric @ self.ginv @ self.Ric
            + self.Ric / (2 * t)
            - 0.5 * self.ddR
        )


def assemble_spacetime(spatial, mixed, cross):
    """Curvature tensor on ``n + 1`` indices from its three component families.

    ``spatial[i,j,k,l]`` fills ``T_ijkl``, ``mixed[i,j]`` fills ``T_i0j0`` and
    ``cross[i,j,k]`` fills ``T_ij0k``; the rest follows from the symmetries.
    """
    n = spatial.shape[0]
    T = np.zeros((n + 1,) * 4)
    s = slice(1, None)
    T[s, s, s, s] = spatial
    T[s, 0, s, 0] = mixed
    T[0, s, 0, s] = mixed
    T[s, 0, 0, s] = -mixed
    T[0, s, s, 0] = -mixed
    T[s, s, 0, s] = cross
    T[s, s, s, 0] = -cross
    T[0, s, s, s] = np.einsum("ijk->kij", cross)
    T[s, 0, s, s] = -np.einsum("ijk->kij", cross)
    return T


def _blocks(spatial, mixed, time):
    n = spatial.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[1:, 1:] = spatial
    out[0, 1:] = mixed
    out[1:, 0] = mixed
    out[0, 0] = time
    return out


def positivity_threshold(model, x, t):
    """Smallest ``N`` for which ``g_00 > 0`` at ``(x, t)``."""
    R = model.scalar(x, t)
    return max(0.0, -2 * t**3 * (R / t + model.n / (2 * t**2)))


class SolitonMetric:
    """The soliton metric ``g_N`` on ``M x (0, T]`` built from a flow model.

    ``g_ij = g_ij(t) / t``, ``g_00 = N / 2t^3 + R / t + n / 2t^2``, ``g_0i = 0``.
    """

    def __init__(self, model, N, config=None):
        if not N > 0:
            raise SolitonRangeError("N must be positive")
        self.model = model
        self.N = float(N)
        self.n = model.n
        self.config = config or geometry.DiffConfig()

    def g00(self, x, t):
        R = self.model.scalar(x, t)
        val = self.N / (2 * t**3) + R / t + self.n / (2 * t**2)
        if val <= 0:
            raise SolitonRangeError(
                f"N={self.N} too small at t={t}: g_00={val} (threshold "
                f"{positivity_threshold(self.model, x, t)})"
            )
        return val

    def g00_inv(self, x, t):
        return 1.0 / self.g00(x, t)

    def components(self, x, t):
        self.model.check_time(t, allow_zero=False)
        out = np.zeros((self.n + 1, self.n + 1))
        out[0, 0] = self.g00(x, t)
        out[1:, 1:] = self.model.metric(x, t) / t
        return out

    def at(self, p):
        p = np.asarray(p, dtype=float)
        return self.components(p[1:], p[0])

    def field(self, config=None):
        """The metric as a :class:`~harnack_lab.geometry.MetricField` on ``(t, x)``."""
        scale = lambda p: np.concatenate([[p[0]], np.ones(self.n)])
        return geometry.MetricField(self.at, self.n + 1, config or self.config, scale=scale)

    def check_sample_domain(self, xs, ts):
        thr = max(positivity_threshold(self.model, x, t) for x, t in zip(xs, ts))
        if self.N <= thr:
            raise SolitonRangeError(f"N={self.N} below positivity threshold {thr}")
        return thr


def soliton_metric(model, N, config=None):
    return SolitonMetric(model, N, config)


def closed_christoffel(S, x, t):
    """Christoffel symbols of ``g_N`` from the flow's closed-form data."""
    d = _Data(S.model, x, t)
    u = S.g00_inv(x, t)
    n = d.n
    G = np.zeros((n + 1,) * 3)
    G[1:, 1:, 1:] = d.Gamma
    G[1:, 1:, 0] = -(d.Ric_mixed + np.eye(n) / (2 * t))
    G[1:, 0, 1:] = G[1:, 1:, 0]
    G[1:, 0, 0] = -0.5 * d.ginv @ d.dR
    G[0, 1:, 1:] = u * (d.Ric / t + d.g / (2 * t**2))
    G[0, 1:, 0] = u * d.dR / (2 * t)
    G[0, 0, 1:] = G[0, 1:, 0]
    G[0, 0, 0] = -3 / (2 * t) + u / (2 * t) * d.Qt
    return G


def closed_curvature(S, x, t):
    d = _Data(S.model, x, t)
    u = S.g00_inv(x, t)
    spatial = d.Rm / t - u / (2 * t**2) * kulkarni_nomizu(d.P, d.P)
    mixed = d.M / t + u / (2 * t**2) * (0.5 * np.outer(d.dR, d.dR) - d.Qt * d.P)
    skew = d.dRic - np.einsum("jik->ijk", d.dRic)
    cross = skew / t + u / (2 * t**2) * (
        np.einsum("ik,j->ijk", d.P, d.dR) - np.einsum("jk,i->ijk", d.P, d.dR)
    )
    return assemble_spacetime(spatial, mixed, cross)


def closed_ricci(S, x, t):
    d = _Data(S.model, x, t)
    u = S.g00_inv(x, t)
    n = d.n
    Rn = d.R + n / (2 * t)
    Pmix = d.Ric_mixed + np.eye(n) / (2 * t)  # (R_i^k + delta/2t), index [k, i]
    Rij = (
        d.Ric
        + u / t * (d.M - d.P * Rn + Pmix.T @ d.P)
        + u**2 / (2 * t**2) * (0.5 * np.outer(d.dR, d.dR) - d.Qt * d.P)
    )
    Ri0 = d.dR / 2 + u / (2 * t) * (Pmix.T @ d.dR - Rn * d.dR)
    R00 = d.Rt / 2 + d.R / (2 * t) + u / (2 * t) * (0.5 * d.dR @ d.ginv @ d.dR - d.Qt * Rn)
    return _blocks(Rij, Ri0, R00)


def closed_hessian(S, x, t):
    """Hessian of ``f = -N / 2t`` with respect to ``g_N``."""
    d = _Data(S.model, x, t)
    u = S.g00_inv(x, t)
    g00 = 1.0 / u
    n = d.n
    w = d.R / t + n / (2 * t**2)
    Hij = -d.P + u * w * d.P
    Hi0 = -d.dR / 2 + 0.5 * u * d.dR * w
    H00 = -0.5 * g00 - d.Rt / 2 - d.R / (2 * t) + u / (2 * t) * (d.R + n / (2 * t)) * d.Qt
    return _blocks(Hij, Hi0, H00)


def _defect_inner(d, t):
    return (
        d.lapRic
        + 2 * np.einsum("ikjl,kl->ij", d.Rm, d.Ric_up)
        + 3 * d.Ric / (2 * t)
        - 0.5 * d.ddR
        + d.g / (4 * t**2)
    )


def defect_leading_norm(model, x, t):
    """``lim N |E_N|`` as ``N -> infinity``, with the size of its largest term.

    Returns ``(value, scale)``.  Only the spatial block survives the limit.
    ``value`` can vanish at isolated times (space forms), and then ``|E_N|``
    decays faster than ``1/N``.
    """
    d = _Data(model, x, t)
    ginv = d.ginv
    gnorm = lambda A: float(np.sqrt(abs(np.einsum("ac,bd,ab,cd->", ginv, ginv, A, A))))
    terms = [d.lapRic, 2 * np.einsum("ikjl,kl->ij", d.Rm, d.Ric_up), 3 * d.Ric / (2 * t), 0.5 * d.ddR, d.g / (4 * t**2)]
    return 2 * t**3 * gnorm(_defect_inner(d, t)), 2 * t**3 * max(gnorm(T) for T in terms)


def soliton_defect(S, x, t, method="combined"):
    """``E_N = Ric + Hess(-N/2t) + g_N / 2`` at ``(x, t)``.

    ``method="sum"`` adds the Ricci and Hessian closed forms (cancellation of
    O(1) terms); ``"combined"`` uses the simplified expressions directly.
    """
    if method == "sum":
        return closed_ricci(S, x, t) + closed_hessian(S, x, t) + 0.5 * S.components(x, t)
    if method != "combined":
        raise ValueError(f"unknown method {method!r}")
    d = _Data(S.model, x, t)
    u = S.g00_inv(x, t)
    n = d.n
    inner = _defect_inner(d, t)
    Eij = u / t * inner + u**2 / (2 * t**2) * (0.5 * np.outer(d.dR, d.dR) - d.Qt * d.P)
    Ei0 = u / (2 * t) * (d.Ric_mixed + np.eye(n) / (2 * t)).T @ d.dR
    E00 = u / (4 * t) * (d.dR @ d.ginv @ d.dR)
    return _blocks(Eij, Ei0, E00)


def defect_norm(S, x, t, E=None):
    """``|E_N|`` measured with ``g_N``."""
    if E is None:
        E = soliton_defect(S, x, t)
    ginv = np.linalg.inv(S.components(x, t))
    return float(np.sqrt(abs(np.einsum("ac,bd,ab,cd->", ginv, ginv, E, E))))


# -- N -> infinity limits ------------------------------------------------------


def limit_curvature(model, x, t):
    """The limit curvature tensor ``R_inf`` at ``(x, t)``."""
    d = _Data(model, x, t)
    skew = d.dRic - np.einsum("jik->ijk", d.dRic)
    return assemble_spacetime(d.Rm / t, d.M / t, skew / t)


def limit_ricci(model, x, t):
    """Component matrix of ``Ric_inf`` obtained by polarizing its quadratic form."""
    d = _Data(model, x, t)
    return _blocks(d.Ric, 0.5 * d.dR, 0.5 * (d.Rt + d.R / t))


def limit_christoffel(model, x, t):
    d = _Data(model, x, t)
    n = d.n
    G = np.zeros((n + 1,) * 3)
    G[1:, 1:, 1:] = d.Gamma
    G[1:, 1:, 0] = -(d.Ric_mixed + np.eye(n) / (2 * t))
    G[1:, 0, 1:] = G[1:, 1:, 0]
    G[1:, 0, 0] = -0.5 * d.ginv @ d.dR
    G[0, 0, 0] = -3 / (2 * t)
    return G


def reference_metric(model, x, t):
    """``h = g(t) + d(alpha)^2`` written in ``(t, x)`` coordinates (``alpha = ln t``)."""
    out = np.zeros((model.n + 1, model.n + 1))
    out[0, 0] = 1.0 / t**2
    out[1:, 1:] = model.metric(x, t)
    return out


def reference_inverse(model, x, t):
    return np.linalg.inv(reference_metric(model, x, t))


def limit_inverse_metric(model, x, t):
    """The degenerate cotangent limit: only ``(g_inf)^ij = t g^ij`` is nonzero."""
    out = np.zeros((model.n + 1, model.n + 1))
    out[1:, 1:] = t * model.inverse_metric(x, t)
    return out


def h_norm(T, hinv):
    """Norm of a covariant tensor of any order with respect to ``h``."""
    T = np.asarray(T)
    X = T
    for axis in range(T.ndim):
        X = np.moveaxis(np.tensordot(hinv, X, axes=([1], [axis])), 0, axis)
    return float(np.sqrt(abs(np.sum(X * T))))


def _reference_field(model, config):
    scale = lambda p: np.concatenate([[p[0]], np.ones(model.n)])
    return geometry.MetricField(
        lambda p: reference_metric(model, p[1:], p[0]), model.n + 1, config, scale=scale
    )


def limit_laplacian(model, tensor_field, x, t, config=None):
    """``Delta_t T = g^ij nabla_inf_i nabla_inf_j T`` for a space-time tensor field.

    ``tensor_field`` takes a space-time point ``(t, x)``.
    """
    config = config or geometry.DiffConfig()
    H = _reference_field(model, config)
    trace = np.zeros((model.n + 1, model.n + 1))
    trace[1:, 1:] = model.inverse_metric(x, t)
    conn = lambda p: limit_christoffel(model, p[1:], p[0])
    return geometry.laplacian(H, tensor_field, spacetime_point(x, t), connection=conn, trace=trace)


@dataclass
class LimitPackage:
    """Limit objects at one space-time point."""

    model: object
    x: np.ndarray
    t: float
    R_inf: np.ndarray
    Ric_inf: np.ndarray
    connection: np.ndarray
    h: np.ndarray
    ginv_inf: np.ndarray
    config: geometry.DiffConfig = field(default_factory=geometry.DiffConfig)

    def laplacian(self, tensor_field):
        return limit_laplacian(self.model, tensor_field, self.x, self.t, self.config)

    @property
    def hinv(self):
        return np.linalg.inv(self.h)

    def to_json(self):
        return {
            "model": self.model.params(),
            "x": self.x.tolist(),
            "t": self.t,
            "R_inf_norm_h": h_norm(self.R_inf, self.hinv),
            "Ric_inf": self.Ric_inf.tolist(),
            "Ric_inf_tt": float(self.Ric_inf[0, 0]),
        }


def limit_package(model, x, t, config=None):
    x = np.asarray(x, dtype=float)
    return LimitPackage(
        model=model,
        x=x,
        t=float(t),
        R_inf=limit_curvature(model, x, t),
        Ric_inf=limit_ricci(model, x, t),
        connection=limit_christoffel(model, x, t),
        h=reference_metric(model, x, t),
        ginv_inf=limit_inverse_metric(model, x, t),
        config=config or geometry.DiffConfig(),
    )


def lie_derivative_time(T, dTdt, t):
    """``L_X T`` for ``X = t d/dt``: ``t dT/dt`` plus ``T`` once per index equal to 0."""
    T = np.asarray(T)
    zeros = np.zeros(T.shape)
    for axis in range(T.ndim):
        idx = [None] * T.ndim
        idx[axis] = slice(None)
        zeros = zeros + (np.arange(T.shape[axis]) == 0)[tuple(idx)]
    return t * np.asarray(dTdt) + zeros * T


def mainformula_residual(model, x, t, config=None, relative=True):
    """h-norm of ``L_X R_inf - (t Delta_t R_inf + F + Q - R_inf)`` at ``(x, t)``.

    ``F`` and ``Q`` are contracted with the degenerate limit ``(g_inf)^ij = t g^ij``.
    Returned relative to ``|R_inf|_h`` unless ``relative=False``.
    """
    config = config or geometry.DiffConfig()
    x = np.asarray(x, dtype=float)
    dt = config.step * t
    try:
        model.check_time(t - 2 * dt, allow_zero=False)
        model.check_time(t + 2 * dt, allow_zero=False)
    except ModelRangeError as exc:
        raise SolitonRangeError(f"finite-difference stencil leaves the domain: {exc}") from exc
    Rinf = limit_curvature(model, x, t)
    dRdt = geometry.richardson_derivative(lambda s: limit_curvature(model, x, s), t, dt, config.levels)
    lhs = lie_derivative_time(Rinf, dRdt, t)
    field_ = lambda p: limit_curvature(model, p[1:], p[0])
    lap = limit_laplacian(model, field_, x, t, config)
    ginv_inf = limit_inverse_metric(model, x, t)
    rhs = t * lap + F(Rinf, ginv_inf) + Q(Rinf, ginv_inf) - Rinf
    hinv = reference_inverse(model, x, t)
    res = h_norm(lhs - rhs, hinv)
    if not relative:
        return res
    scale = h_norm(Rinf, hinv)
    if scale == 0.0:
        return res
    return res / scale


# -- alpha = ln t coordinates --------------------------------------------------


def alpha_jacobian(t, n):
    """``d(t, x) / d(alpha, x)`` at ``alpha = ln t``."""
    J = np.eye(n + 1)
    J[0, 0] = t
    return J


def rescaled_metric(model, N, s, x, alpha):
    """``s (psi_s)^* g_N`` in ``(alpha, x)`` coordinates for the straight time dilation.

    ``e^-alpha (g(s e^alpha) + N/2 d alpha^2) + (R s^2 e^alpha + s n / 2) d alpha^2``.
    """
    if not 0 < s <= 1:
        raise SolitonRangeError(f"s={s} outside (0, 1]")
    t = s * np.exp(alpha)
    try:
        model.check_time(t, allow_zero=False)
    except ModelRangeError as exc:
        raise SolitonRangeError(str(exc)) from exc
    ea = np.exp(alpha)
    out = np.zeros((model.n + 1, model.n + 1))
    out[1:, 1:] = model.metric(x, t) / ea
    out[0, 0] = N / (2 * ea) + model.scalar(x, t) * s**2 * ea + s * model.n / 2
    return out


def cone_limit_metric(model, N, x, alpha):
    """The ``s -> 0`` limit ``e^-alpha (g(0) + N/2 d alpha^2)``."""
    ea = np.exp(alpha)
    out = np.zeros((model.n + 1, model.n + 1))
    out[1:, 1:] = model.metric(x, 0.0) / ea
    out[0, 0] = N / (2 * ea)
    return out


def r_infinity_alpha(model, x, alpha):
    """``R_inf`` in ``(alpha, x)`` coordinates, from the flow data at ``t = e^alpha``."""
    t = float(np.exp(alpha))
    d = _Data(model, x, t)
    skew = d.dRic - np.einsum("jik->ijk", d.dRic)
    return assemble_spacetime(np.exp(-alpha) * d.Rm, np.exp(alpha) * d.M, skew)


# -- verification against the finite-difference engine -------------------------

#: Coarser step with one more Richardson level: the O(1/N) families are
#: differences of O(1) terms, so roundoff dominates at the default step.
APPENDIX_CONFIG = geometry.DiffConfig(step=1e-2, levels=3)


def _christoffel_families(G):
    s = slice(1, None)
    return {
        "Gamma^i_jk": G[s, s, s],
        "Gamma^i_j0": G[s, s, 0],
        "Gamma^i_00": G[s, 0, 0],
        "Gamma^0_jk": G[0, s, s],
        "Gamma^0_i0": G[0, s, 0],
        "Gamma^0_00": G[0, 0, 0],
    }


def _curvature_families(R):
    s = slice(1, None)
    return {"Rm_ijkl": R[s, s, s, s], "Rm_i0j0": R[s, 0, s, 0], "Rm_ij0k": R[s, s, 0, s]}


def _two_tensor_families(T, name):
    s = slice(1, None)
    return {f"{name}_ij": T[s, s], f"{name}_i0": T[s, 0], f"{name}_00": T[0, 0]}


def _family_errors(fd, closed):
    top = max(np.max(np.abs(v)) for v in closed.values())
    out = {}
    for key in closed:
        own = np.max(np.abs(closed[key]))
        # families that vanish identically are measured against the whole object
        scale = own if own > 1e-8 * top else top
        err = np.max(np.abs(np.asarray(fd[key]) - closed[key]))
        out[key] = float(err / scale) if scale > 0 else float(err)
    return out


def soliton_frame(S, x, t):
    """Columns form a ``g_N``-orthonormal frame."""
    E = np.zeros((S.n + 1, S.n + 1))
    E[0, 0] = 1.0 / np.sqrt(S.g00(x, t))
    L = np.linalg.cholesky(S.model.metric(x, t) / t)
    E[1:, 1:] = np.linalg.inv(L).T
    return E


def _framed(T, E):
    T = np.asarray(T)
    for axis in range(T.ndim):
        T = np.moveaxis(np.tensordot(E, T, axes=([0], [axis])), 0, axis)
    return T


def appendix_a_point(S, x, t, config=None):
    """Closed forms against the engine at one point.

    Returns ``{family: (strict, framed)}``.  ``strict`` is the largest
    component deviation over the largest closed-form component of the same
    family; ``framed`` compares components in a ``g_N``-orthonormal frame
    against the largest framed component of the whole tensor (Christoffel
    symbols are not tensors and only get the strict measure).
    """
    config = config or APPENDIX_CONFIG
    G = S.field(config)
    p = spacetime_point(x, t)
    E = soliton_frame(S, x, t)
    Rfd = geometry.riemann(G, p)
    tensors_ = [
        (Rfd, closed_curvature(S, x, t), _curvature_families),
        (geometry.ricci(G, p, Rfd), closed_ricci(S, x, t), lambda T: _two_tensor_families(T, "Ric")),
        (
            geometry.hessian(G, lambda q: -S.N / (2 * q[0]), p),
            closed_hessian(S, x, t),
            lambda T: _two_tensor_families(T, "Hess"),
        ),
    ]
    strict = _family_errors(
        _christoffel_families(geometry.christoffel(G, p)),
        _christoffel_families(closed_christoffel(S, x, t)),
    )
    out = {k: (v, v) for k, v in strict.items()}
    for fd, closed, fam in tensors_:
        s_err = _family_errors(fam(fd), fam(closed))
        fd_f, cl_f = fam(_framed(fd, E)), fam(_framed(closed, E))
        top = max(np.max(np.abs(v)) for v in cl_f.values())
        for key in s_err:
            f_err = float(np.max(np.abs(np.asarray(fd_f[key]) - cl_f[key])) / top) if top > 0 else 0.0
            out[key] = (s_err[key], f_err)
    return out


def appendix_a_check(model, N, points=20, seed=0, config=None):
    """Worst family errors of the closed forms over seeded sample points."""
    S = SolitonMetric(model, N)
    rng = np.random.default_rng([seed, 0xA])
    xs, ts = model.sample_points(rng, points)
    S.check_sample_domain(xs, ts)
    strict, framed = {}, {}
    for x, t in zip(xs, ts):
        for key, (a, b) in appendix_a_point(S, x, t, config).items():
            strict[key] = max(strict.get(key, 0.0), a)
            framed[key] = max(framed.get(key, 0.0), b)
    return {
        "model": model.label,
        "N": float(N),
        "points": points,
        "strict": strict,
        "framed": framed,
        "max_strict": max(strict.values()),
        "max_framed": max(framed.values()),
    }


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def defect_sequence(model, x, t, Ns):
    """``|E_N|`` (in ``g_N``) for each ``N``."""
    return [defect_norm(SolitonMetric(model, N), x, t) for N in Ns]


def limit_sequence(model, x, t, Ns):
    """``|R(g_N) - R_inf|_h`` for each ``N``."""
    Rinf = limit_curvature(model, x, t)
    hinv = reference_inverse(model, x, t)
    return [h_norm(closed_curvature(SolitonMetric(model, N), x, t) - Rinf, hinv) for N in Ns]
