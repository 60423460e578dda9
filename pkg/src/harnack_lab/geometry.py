"""Pointwise coordinate differential geometry with Richardson-extrapolated differences.

Tensor fields are plain callables ``point -> ndarray`` with all indices
covariant.  Derivative arrays put the differentiation index first, e.g.
``dg[a, b, c] = d_a g_bc`` and ``nabla T[e, ...] = nabla_e T[...]``.
Christoffel symbols are stored as ``Gamma[a, b, c] = Gamma^a_{bc}``.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiffConfig",
    "MetricField",
    "SingularMetricError",
    "StepUnderflowError",
    "richardson_derivative",
    "partials",
    "christoffel_from_derivatives",
    "christoffel",
    "riemann",
    "riemann_from_connection",
    "ricci",
    "scalar",
    "hessian",
    "covariant_derivative",
    "second_covariant_derivative",
    "laplacian",
    "conformal_christoffel",
]


class SingularMetricError(ValueError):
    pass


class StepUnderflowError(ValueError):
    pass


@dataclass(frozen=True)
class DiffConfig:
    """Central-difference step (relative to the coordinate scale) and Richardson levels."""

    step: float = 1e-3
    levels: int = 2

    def __post_init__(self):
        if not self.step > 0:
            raise StepUnderflowError(f"finite-difference step must be positive, got {self.step}")
        if self.levels < 1:
            raise ValueError("need at least one Richardson level")


class MetricField:
    """A metric given by a component function on a coordinate chart.

    ``scale`` sets the coordinate scale per axis, either an array or a
    callable of the point; finite-difference steps are ``config.step * scale``.
    """

    def __init__(self, func, dim, config=None, scale=None, check=True):
        self.func = func
        self.dim = dim
        self.config = config or DiffConfig()
        self._scale = scale
        self.check = check

    def __call__(self, p):
        g = np.asarray(self.func(np.asarray(p, dtype=float)), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"metric has shape {g.shape}, expected {(self.dim, self.dim)}")
        if self.check:
            s = np.max(np.abs(g))
            if np.max(np.abs(g - g.T)) > 1e-12 * max(s, 1.0):
                raise ValueError("metric component function returned a non-symmetric matrix")
        return g

    def inverse(self, p):
        g = self(p)
        try:
            ginv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetricError(f"metric is singular at {p}") from exc
        if not np.all(np.isfinite(ginv)) or np.linalg.cond(g) > 1e14:
            raise SingularMetricError(f"metric is numerically singular at {p}")
        return ginv

    def steps(self, p):
        if self._scale is None:
            scale = np.ones(self.dim)
        elif callable(self._scale):
            scale = np.asarray(self._scale(np.asarray(p, dtype=float)), dtype=float)
        else:
            scale = np.broadcast_to(np.asarray(self._scale, dtype=float), (self.dim,))
        h = self.config.step * scale
        p = np.asarray(p, dtype=float)
        if np.any(h <= 0) or np.any(h < 1e-12 * np.maximum(np.abs(p), 1.0)):
            raise StepUnderflowError(f"finite-difference step underflow: {h}")
        return h


def richardson_derivative(f, x0, h, levels=2):
    """Derivative of ``f`` (scalar argument, array values) at ``x0``.

    Central differences at ``h, h/2, ..., h/2^(levels-1)`` combined by
    Richardson extrapolation; error ``O(h^(2 * levels))``.
    """
    table = []
    for k in range(levels):
        hk = h / 2**k
        table.append((np.asarray(f(x0 + hk)) - np.asarray(f(x0 - hk))) / (2 * hk))
    for j in range(1, levels):
        fac = 4.0**j
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
    return table[0]


def partials(f, p, h, levels=2):
    """All first partials of an array-valued field; result index 0 is the direction."""
    p = np.asarray(p, dtype=float)
    out = []
    for a in range(len(p)):
        e = np.zeros_like(p)
        e[a] = 1.0
        out.append(richardson_derivative(lambda s: f(p + s * e), 0.0, h[a], levels))
    return np.array(out)


def christoffel_from_derivatives(ginv, dg):
    """``Gamma^a_bc = 1/2 g^ad (d_b g_cd + d_c g_bd - d_d g_bc)``."""
    lower = 0.5 * (dg + np.einsum("cbd->bcd", dg) - np.einsum("dbc->bcd", dg))
    return np.einsum("ad,bcd->abc", ginv, lower)


def _christoffel(G, p, h):
    dg = partials(G, p, h, G.config.levels)
    Gam = christoffel_from_derivatives(G.inverse(p), dg)
    return 0.5 * (Gam + Gam.transpose(0, 2, 1))


def christoffel(G, p):
    """Christoffel symbols of the Levi-Civita connection of ``G`` at ``p``."""
    p = np.asarray(p, dtype=float)
    return _christoffel(G, p, G.steps(p))


def riemann_from_connection(Gam, dGam, g):
    """Lowered curvature from a connection and its partials.

    ``R_abc^d = d_b Gamma^d_ac - d_a Gamma^d_bc + Gamma^e_ac Gamma^d_be
    - Gamma^e_bc Gamma^d_ae``, then ``R_abcd = R_abc^e g_ed``; positive
    ``R_0101`` on round spheres.
    """
    # dGam[e, d, a, c] = d_e Gamma^d_ac
    Rup = (
        np.einsum("bdac->abcd", dGam)
        - np.einsum("adbc->abcd", dGam)
        + np.einsum("eac,dbe->abcd", Gam, Gam)
        - np.einsum("ebc,dae->abcd", Gam, Gam)
    )
    return np.einsum("abce,ed->abcd", Rup, g)


def riemann(G, p):
    """Lowered Riemann tensor of ``G`` at ``p``."""
    p = np.asarray(p, dtype=float)
    h = G.steps(p)
    Gam = _christoffel(G, p, h)
    dGam = partials(lambda q: _christoffel(G, q, h), p, h, G.config.levels)
    return riemann_from_connection(Gam, dGam, G(p))


def ricci(G, p, Rm=None):
    """``Ric_bd = g^ac R_abcd``; the unit round sphere has ``Ric = (n - 1) g``."""
    if Rm is None:
        Rm = riemann(G, p)
    Ric = np.einsum("ac,abcd->bd", G.inverse(p), Rm)
    return 0.5 * (Ric + Ric.T)


def scalar(G, p, Ric=None):
    if Ric is None:
        Ric = ricci(G, p)
    return float(np.einsum("ab,ab->", G.inverse(p), Ric))


def hessian(G, f, p):
    """``nabla^2_ab f = d_a d_b f - d_c f Gamma^c_ab`` for a scalar function ``f``."""
    p = np.asarray(p, dtype=float)
    h = G.steps(p)
    lv = G.config.levels
    df = lambda q: partials(lambda r: np.asarray(f(r), dtype=float), q, h, lv)
    ddf = partials(df, p, h, lv)
    H = ddf - np.einsum("c,cab->ab", df(p), _christoffel(G, p, h))
    return 0.5 * (H + H.T)


def _covariant(field, p, conn, h, levels):
    T = np.asarray(field(p), dtype=float)
    dT = partials(field, p, h, levels)
    Gam = conn(p)
    out = dT.copy()
    for slot in range(T.ndim):
        # - Gamma^c_{e a_slot} T_{... c ...}
        moved = np.moveaxis(T, slot, 0)
        term = np.einsum("cea,c...->ea...", Gam, moved)
        out -= np.moveaxis(term, 1, slot + 1)
    return out


def _connection(G, connection, h):
    if connection is not None:
        return connection
    return lambda q: _christoffel(G, np.asarray(q, dtype=float), h)


def covariant_derivative(G, field, p, connection=None):
    """``(nabla T)[e, a1, ..., ak] = nabla_e T_{a1...ak}``.

    ``connection`` (a callable returning ``Gamma^a_bc``) overrides the
    Levi-Civita connection of ``G``; ``G`` still supplies the step sizes.
    """
    p = np.asarray(p, dtype=float)
    h = G.steps(p)
    conn = _connection(G, connection, h)
    return _covariant(field, p, conn, h, G.config.levels)


def second_covariant_derivative(G, field, p, connection=None):
    """``(nabla nabla T)[a, b, ...] = nabla_a nabla_b T_...``."""
    p = np.asarray(p, dtype=float)
    h = G.steps(p)
    lv = G.config.levels
    conn = _connection(G, connection, h)
    inner = lambda q: _covariant(field, np.asarray(q, dtype=float), conn, h, lv)
    return _covariant(inner, p, conn, h, lv)


def laplacian(G, field, p, connection=None, trace=None):
    """``trace^{ab} nabla_a nabla_b T``; ``trace`` defaults to the inverse of ``G``."""
    p = np.asarray(p, dtype=float)
    if trace is None:
        trace = G.inverse(p)
    return np.einsum("ab,ab...->...", trace, second_covariant_derivative(G, field, p, connection))


def conformal_christoffel(dphi):
    """Christoffel symbols of ``e^(2 phi) delta`` from the gradient of ``phi``."""
    dphi = np.asarray(dphi, dtype=float)
    n = len(dphi)
    I = np.eye(n)
    return (
        np.einsum("ki,j->kij", I, dphi)
        + np.einsum("kj,i->kij", I, dphi)
        - np.einsum("ij,k->kij", I, dphi)
    )
