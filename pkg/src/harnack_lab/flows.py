"""Exact Ricci flows with closed-form curvature data.

Every model is conformally flat on its chart, ``g(t) = e^(2 phi(x, t)) delta``,
so Christoffel symbols and curvature are available in closed form.  Index
conventions follow :mod:`harnack_lab.geometry`: ``grad_ricci[i, j, k]`` is
``nabla_i R_jk`` and ``hess_scalar[i, j]`` is ``nabla_i nabla_j R``.
"""

import numpy as np

from . import geometry
from .dynamics import F, Q
from .tensors import constant_curvature_tensor

__all__ = [
    "FlowModel",
    "FlatFlow",
    "SpaceFormFlow",
    "CigarFlow",
    "ModelRangeError",
    "catalog",
    "get_model",
    "sphere",
    "hyperbolic",
    "flat",
    "cigar",
    "validate_evolution",
    "SAMPLE_RADIUS",
]

SAMPLE_RADIUS = 0.8


class ModelRangeError(ValueError):
    pass


class FlowModel:
    """Base class: a Ricci flow ``g(t)`` on an ``n``-dimensional chart.

    Subclasses provide ``conformal_factor``/``dphi`` and the curvature
    suppliers.  ``T`` bounds the validity interval ``(0, T]``;
    ``sample_times`` is the range sampled by validation sweeps.
    """

    name = "model"
    n = 2
    T = np.inf
    chart_radius = np.inf
    sample_times = (0.05, 1.0)

    # -- domain -----------------------------------------------------------
    def check_time(self, t, allow_zero=True):
        if not np.isfinite(t) or t < 0 or (t == 0 and not allow_zero) or t >= self._t_end():
            raise ModelRangeError(f"{self.name}: t={t} outside the validity interval (0, {self.T}]")

    def _t_end(self):
        return self.T if np.isinf(self.T) else self.T * (1 + 1e-12) + 1e-300

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ModelRangeError(f"{self.name}: expected a point in R^{self.n}, got shape {x.shape}")
        if x @ x >= self.chart_radius**2:
            raise ModelRangeError(f"{self.name}: point {x} outside the chart")
        return x

    def sample_points(self, rng, count, radius=SAMPLE_RADIUS):
        """Uniform points of the ball of the given chart radius, with sample times."""
        radius = min(radius, 0.8 * self.chart_radius)
        d = rng.standard_normal((count, self.n))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        r = radius * rng.random(count) ** (1.0 / self.n)
        lo, hi = self.sample_times
        return d * r[:, None], lo + (hi - lo) * rng.random(count)

    # -- metric -------------------------------------------------------------
    def conformal_factor(self, x, t):
        raise NotImplementedError

    def dphi(self, x, t):
        raise NotImplementedError

    def metric(self, x, t):
        x = self.check_point(x)
        self.check_time(t)
        return self.conformal_factor(x, t) * np.eye(self.n)

    def inverse_metric(self, x, t):
        return np.linalg.inv(self.metric(x, t))

    def christoffel(self, x, t):
        return geometry.conformal_christoffel(self.dphi(self.check_point(x), t))

    def spatial_field(self, t, config=None):
        """The time-``t`` slice as a :class:`~harnack_lab.geometry.MetricField`."""
        return geometry.MetricField(lambda x: self.metric(x, t), self.n, config)

    # -- curvature suppliers ------------------------------------------------
    def riemann(self, x, t):
        raise NotImplementedError

    def ricci(self, x, t):
        raise NotImplementedError

    def scalar(self, x, t):
        raise NotImplementedError

    def grad_scalar(self, x, t):
        return np.zeros(self.n)

    def hess_scalar(self, x, t):
        return np.zeros((self.n, self.n))

    def grad_ricci(self, x, t):
        return np.zeros((self.n,) * 3)

    def lap_ricci(self, x, t):
        return np.zeros((self.n, self.n))

    def dt_scalar(self, x, t):
        raise NotImplementedError

    @property
    def label(self):
        """Canonical name accepted by :func:`get_model`."""
        return self.name

    def params(self):
        return {"name": self.name, "label": self.label, "n": self.n, "T": None if np.isinf(self.T) else self.T}

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class FlatFlow(FlowModel):
    sample_times = (0.05, 1.0)

    def __init__(self, n=2):
        self.n = n
        self.name = "flat"

    @property
    def label(self):
        return f"flat({self.n})"

    def conformal_factor(self, x, t):
        return 1.0

    def dphi(self, x, t):
        return np.zeros(self.n)

    def riemann(self, x, t):
        self.check_point(x)
        return np.zeros((self.n,) * 4)

    def ricci(self, x, t):
        self.check_point(x)
        return np.zeros((self.n, self.n))

    def scalar(self, x, t):
        self.check_point(x)
        return 0.0

    def dt_scalar(self, x, t):
        return 0.0


class SpaceFormFlow(FlowModel):
    """``g(t) = (1 - 2(n-1) K0 t) * 4 delta / (1 + K0 |x|^2)^2``.

    ``K0 > 0`` is the shrinking round sphere (stereographic chart), ``K0 < 0``
    the expanding hyperbolic space (Poincare ball chart).
    """

    def __init__(self, n, K0, name=None):
        if n < 2:
            raise ModelRangeError("space forms need n >= 2")
        if K0 == 0:
            raise ModelRangeError("use FlatFlow for K0 = 0")
        self.n = n
        self.K0 = float(K0)
        if K0 > 0:
            self.name = name or "sphere"
            self.T = 1.0 / (2 * (n - 1) * K0)
            self.sample_times = (0.02 * self.T, 0.8 * self.T)
        else:
            self.name = name or "hyperbolic"
            self.chart_radius = 1.0 / np.sqrt(-K0)
            self.sample_times = (0.05, 1.0)

    @property
    def label(self):
        if self.K0 > 0:
            return f"sphere({self.n},{self.K0:g})"
        return f"hyperbolic({self.n})" if self.K0 == -1 else f"{self.name}({self.n})"

    def params(self):
        d = super().params()
        d["K0"] = self.K0
        return d

    def scale(self, t):
        return 1.0 - 2.0 * (self.n - 1) * self.K0 * t

    def K(self, t):
        """Sectional curvature at time ``t``."""
        self.check_time(t)
        return self.K0 / self.scale(t)

    def conformal_factor(self, x, t):
        return self.scale(t) * 4.0 / (1.0 + self.K0 * (x @ x)) ** 2

    def dphi(self, x, t):
        return -2.0 * self.K0 * x / (1.0 + self.K0 * (x @ x))

    def riemann(self, x, t):
        return constant_curvature_tensor(self.metric(x, t), self.K(t))

    def ricci(self, x, t):
        return (self.n - 1) * self.K(t) * self.metric(x, t)

    def scalar(self, x, t):
        self.check_point(x)
        return self.n * (self.n - 1) * self.K(t)

    def dt_scalar(self, x, t):
        self.check_point(x)
        return 2.0 * self.n * (self.n - 1) ** 2 * self.K(t) ** 2


class CigarFlow(FlowModel):
    """Hamilton's cigar as a Ricci flow: ``g(t) = delta / (e^(4t) + |x|^2)`` on R^2.

    With ``c = e^(4t)`` and ``rho = c + |x|^2``: ``R = 4c / rho``, ``Ric = (R/2) g``.
    """

    name = "cigar"
    n = 2
    sample_times = (0.05, 1.0)

    def _c_rho(self, x, t):
        x = self.check_point(x)
        self.check_time(t)
        c = np.exp(4.0 * t)
        return x, c, c + x @ x

    def conformal_factor(self, x, t):
        return 1.0 / (np.exp(4.0 * t) + x @ x)

    def dphi(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return -x / rho

    def scalar(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return 4.0 * c / rho

    def riemann(self, x, t):
        return constant_curvature_tensor(self.metric(x, t), 0.5 * self.scalar(x, t))

    def ricci(self, x, t):
        return 0.5 * self.scalar(x, t) * self.metric(x, t)

    def grad_scalar(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return -8.0 * c * x / rho**2

    def hess_scalar(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return (16.0 * c * np.outer(x, x) - 8.0 * c**2 * np.eye(2)) / rho**3

    def lap_scalar(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return 16.0 * c * (x @ x - c) / rho**2

    def grad_ricci(self, x, t):
        return 0.5 * np.einsum("i,jk->ijk", self.grad_scalar(x, t), self.metric(x, t))

    def lap_ricci(self, x, t):
        return 0.5 * self.lap_scalar(x, t) * self.metric(x, t)

    def dt_scalar(self, x, t):
        x, c, rho = self._c_rho(x, t)
        return 16.0 * c * (x @ x) / rho**2


def flat(n=2):
    return FlatFlow(n)


def sphere(n=3, K0=1.0):
    if K0 <= 0:
        raise ModelRangeError("sphere needs K0 > 0")
    return SpaceFormFlow(n, K0)


def hyperbolic(n=2):
    return SpaceFormFlow(n, -1.0)


def cigar():
    return CigarFlow()


def catalog():
    """The default model list: flat, shrinking sphere, expanding hyperbolic space, cigar."""
    return [flat(2), sphere(3, 1.0), hyperbolic(2), cigar()]


_FACTORIES = {"flat": flat, "sphere": sphere, "hyperbolic": hyperbolic, "cigar": cigar}


def get_model(spec):
    """Build a model from a name such as ``"sphere"``, ``"sphere(3,1)"`` or ``"flat(3)"``."""
    spec = spec.strip()
    name, _, rest = spec.partition("(")
    if name not in _FACTORIES:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(_FACTORIES)}")
    args = []
    if rest:
        if not rest.endswith(")"):
            raise ValueError(f"malformed model spec {spec!r}")
        args = [float(a) if "." in a or "e" in a else int(a) for a in rest[:-1].split(",") if a.strip()]
    return _FACTORIES[name](*args)


# -- validation ---------------------------------------------------------------


def _rel(res, *terms):
    scale = max([np.max(np.abs(np.asarray(t))) for t in terms] + [0.0])
    r = np.max(np.abs(res))
    if scale == 0.0:
        return float(r)
    return float(r / scale)


def _dt(model, f, t, config):
    h = config.step * max(t, 1e-2)
    return geometry.richardson_derivative(f, t, h, config.levels)


def point_residuals(model, x, t, config=None):
    """All per-point validation residuals for one ``(x, t)``."""
    config = config or geometry.DiffConfig()
    G = model.spatial_field(t, config)
    g = model.metric(x, t)
    ginv = np.linalg.inv(g)
    Ric = model.ricci(x, t)
    Rm = model.riemann(x, t)
    R = model.scalar(x, t)

    dg = _dt(model, lambda s: model.metric(x, s), t, config)
    rf = _rel(dg + 2 * Ric, dg, Ric)

    Rm_fd = geometry.riemann(G, x)
    curv = _rel(Rm_fd - Rm, Rm, g)

    # Ricci evolution on the mixed tensor R_i^j
    mixed = lambda s: model.ricci(x, s) @ np.linalg.inv(model.metric(x, s))
    dmixed = _dt(model, mixed, t, config)
    lapRic = geometry.laplacian(G, lambda q: model.ricci(q, t), x)
    Ric_up = ginv @ Ric @ ginv
    quad = 2.0 * np.einsum("jp,pnim,mn->ij", ginv, Rm, Ric_up)
    ric_res = _rel(dmixed - lapRic @ ginv - quad, dmixed, lapRic @ ginv, quad)
    lap_supplier = _rel(lapRic - model.lap_ricci(x, t), lapRic, Ric)

    # scalar evolution, with the time derivative taken by differences in t
    Rt_fd = float(_dt(model, lambda s: model.scalar(x, s), t, config))
    lapR = float(geometry.laplacian(G, lambda q: np.asarray(model.scalar(q, t)), x))
    normRic2 = float(np.einsum("ij,ij->", Ric_up, Ric))
    scal_res = _rel(Rt_fd - lapR - 2 * normRic2, Rt_fd, lapR, 2 * normRic2)
    dt_supplier = _rel(Rt_fd - model.dt_scalar(x, t), Rt_fd, R)

    # contracted second Bianchi: nabla_i R^i_j = 1/2 nabla_j R
    dRic = geometry.covariant_derivative(G, lambda q: model.ricci(q, t), x)
    divRic = np.einsum("ik,ikj->j", ginv, dRic)
    dR = geometry.partials(lambda q: np.asarray(model.scalar(q, t)), x, G.steps(x), config.levels)
    bianchi2 = _rel(divRic - 0.5 * dR, divRic, dR, Ric)
    grad_supplier = _rel(dR - model.grad_scalar(x, t), dR, R)
    nabla_ric_supplier = _rel(dRic - model.grad_ricci(x, t), dRic, Ric)
    hessR = geometry.hessian(G, lambda q: model.scalar(q, t), x)
    hess_supplier = _rel(hessR - model.hess_scalar(x, t), hessR, Ric)

    return {
        "x": [float(v) for v in x],
        "t": float(t),
        "scalar": float(R),
        "ricci_flow": rf,
        "curvature_vs_engine": curv,
        "ricci_evolution": ric_res,
        "scalar_evolution": scal_res,
        "contracted_bianchi": bianchi2,
        "lap_ricci_supplier": lap_supplier,
        "dt_scalar_supplier": dt_supplier,
        "grad_scalar_supplier": grad_supplier,
        "grad_ricci_supplier": nabla_ric_supplier,
        "hess_scalar_supplier": hess_supplier,
    }


EVOLUTION_TOL = 1e-6
RICCI_FLOW_TOL = 1e-8
CURVATURE_TOL = 1e-6


def validate_evolution(model, seed=0, points=20, config=None):
    """Residual report for the flow equation, curvature suppliers and evolution equations."""
    rng = np.random.default_rng([seed, 0x5EED])
    xs, ts = model.sample_points(rng, points)
    rows = [point_residuals(model, x, t, config) for x, t in zip(xs, ts)]
    keys = [k for k in rows[0] if k not in ("x", "t", "scalar")]
    worst = {k: max(r[k] for r in rows) for k in keys}
    tols = {k: EVOLUTION_TOL for k in keys}
    tols["ricci_flow"] = RICCI_FLOW_TOL
    tols["curvature_vs_engine"] = CURVATURE_TOL
    return {
        "model": model.params(),
        "seed": seed,
        "points": rows,
        "worst": worst,
        "tolerances": tols,
        "max_scalar": max(r["scalar"] for r in rows),
        "passed": all(worst[k] < tols[k] for k in keys),
    }
