"""Rank-bounded cones ``C(S_k)`` of curvature forms.

``R`` lies in ``C(S_k)`` when ``R(w, conj w) >= 0`` for every complex
2-vector ``w`` of rank at most ``k``.  Membership is decided by minimizing the
Rayleigh quotient over ``w = sum_p u_p ^ v_p`` with alternating exact
eigen-solves; for ``k >= m // 2`` every 2-vector qualifies and the minimum is
the smallest eigenvalue of the form.
"""

from dataclasses import dataclass, field

import numpy as np

from . import tensors
from .dynamics import F, Q_form, ad_matrix

__all__ = [
    "ConeSpec",
    "MembershipVerdict",
    "BoundarySample",
    "BoundaryPreconditionError",
    "BoundarySampleError",
    "default_tol",
    "min_over_Sk",
    "membership",
    "nested_membership",
    "boundary_sample",
    "ode_invariance_check",
    "mainstep_operator",
    "mainstep_check",
    "derivative_action",
    "gl_boundary_tangency",
    "wilking_suite",
]

TOL_FACTOR = 1e-8
NULL_FACTOR = 1e-10


class BoundaryPreconditionError(ValueError):
    pass


class BoundarySampleError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConeSpec:
    dim: int
    k: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("need dim >= 2")
        if not 1 <= self.k <= self.dim // 2:
            raise ValueError(f"k={self.k} outside 1..{self.dim // 2} for dim {self.dim}")

    @property
    def maximal(self):
        return self.k == self.dim // 2


def default_tol(M):
    return TOL_FACTOR * max(tensors.norm(M), np.finfo(float).tiny)


@dataclass
class MembershipVerdict:
    """Outcome of a cone test.

    ``margin`` is the smallest ``R(w, conj w) / |w|^2`` found and ``witness`` a
    unit 2-vector attaining it, given by ``factors = (U, V)`` with
    ``w = sum_p U[p] ^ V[p]``.  ``outside`` verdicts are certified by the
    witness; the other statuses are only as good as the search.
    """

    dim: int
    k: int
    margin: float
    witness: np.ndarray
    factors: tuple
    tol: float
    status: str = ""
    method: str = "alternating"
    restarts: int = 0
    sweeps: int = 0
    converged: bool = True
    low_confidence: bool = False
    mc_min: float = float("nan")
    history: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.status:
            self.status = classify(self.margin, self.tol)

    @property
    def witness_rank(self):
        return tensors.rank(self.witness)

    def to_json(self):
        return {
            "dim": self.dim,
            "k": self.k,
            "status": self.status,
            "margin": float(self.margin),
            "tol": float(self.tol),
            "witness": tensors.two_vector_to_json(self.witness),
            "witness_rank": self.witness_rank,
            "method": self.method,
            "restarts": self.restarts,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "low_confidence": self.low_confidence,
            "mc_min": None if np.isnan(self.mc_min) else float(self.mc_min),
        }


def classify(margin, tol):
    if margin < -tol:
        return "outside"
    if margin <= tol:
        return "boundary"
    return "interior"


def _check_form(M, spec):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("form must be a square matrix")
    if M.shape[0] != tensors.form_dim(spec.dim):
        raise ValueError(f"form of size {M.shape[0]} does not match dim {spec.dim}")
    return 0.5 * (M + M.T)


def _batched_wedge(U, V, I, J):
    # U, V: (R, k, m) -> (R, N)
    return np.sum(U[..., I] * V[..., J] - U[..., J] * V[..., I], axis=1)


def _wedge_matrix(w, I, J, m):
    """``W`` with ``W @ x = x ^ w`` for each batch row of ``w``."""
    R, N = w.shape[0], len(I)
    W = np.zeros((R, N, m), dtype=complex)
    ar = np.arange(N)
    W[:, ar, I] = w[:, J]
    W[:, ar, J] = -w[:, I]
    return W


def _eigen_min(M):
    lam, vec = np.linalg.eigh(M)
    return float(lam[0]), vec[:, 0].astype(complex)


def _factor_eigvec(omega, m, k):
    """Split a 2-vector of rank <= k into ``k`` wedge pairs."""
    A = tensors.two_vector_matrix(omega)
    # real-antisymmetric normal form via the real Schur decomposition
    from scipy.linalg import schur

    if np.allclose(A.imag, 0):
        T, Z = schur(A.real, output="real")
        pairs = []
        i = 0
        while i < m - 1:
            if abs(T[i + 1, i]) > 0 or abs(T[i, i + 1]) > 0:
                pairs.append((T[i, i + 1] * Z[:, i], Z[:, i + 1]))
                i += 2
            else:
                i += 1
        pairs = sorted(pairs, key=lambda p: -np.linalg.norm(p[0]))[:k]
    else:
        pairs = []
    U = np.zeros((k, m), dtype=complex)
    V = np.zeros((k, m), dtype=complex)
    for p, (u, v) in enumerate(pairs):
        U[p], V[p] = u, v
    return U, V


class _Search:
    """Batched alternating minimization over ``k`` wedge pairs."""

    def __init__(self, M, m, k):
        self.M = M
        self.m, self.k = m, k
        I, J = np.array(tensors.pairs(m)).T
        self.I, self.J = I, J
        self.penalty = 10.0 * (np.abs(np.linalg.eigvalsh(M)).max() + 1.0)

    def omega(self, U, V):
        return _batched_wedge(U, V, self.I, self.J)

    def values(self, omega):
        num = tensors.evaluate(self.M, omega)
        den = np.real(np.sum(omega * omega.conj(), axis=-1))
        return num / np.where(den > 0, den, np.inf)

    def update(self, U, V, p, side):
        m = self.m
        omega = self.omega(U, V)
        term = U[:, p, self.I] * V[:, p, self.J] - U[:, p, self.J] * V[:, p, self.I]
        rest = omega - term
        if side == 0:
            Wm = _wedge_matrix(V[:, p], self.I, self.J, m)
        else:
            Wm = -_wedge_matrix(U[:, p], self.I, self.J, m)
        L = np.concatenate([Wm, rest[..., None]], axis=-1)
        LH = np.conj(np.swapaxes(L, 1, 2))
        A = LH @ self.M @ L
        B = LH @ L
        b, Vb = np.linalg.eigh(B)
        mask = b > 1e-12 * np.maximum(b[:, -1:], np.finfo(float).tiny)
        D = np.where(mask, 1.0 / np.sqrt(np.where(mask, b, 1.0)), 0.0)
        VbH = np.conj(np.swapaxes(Vb, 1, 2))
        C = D[:, :, None] * (VbH @ A @ Vb) * D[:, None, :]
        C = 0.5 * (C + np.conj(np.swapaxes(C, 1, 2)))
        idx = np.arange(m + 1)
        C[:, idx, idx] += np.where(mask, 0.0, self.penalty)
        lam, Y = np.linalg.eigh(C)
        z = Vb @ (D * Y[:, :, 0])[..., None]
        z = z[..., 0]
        x, s = z[:, :m], z[:, m]
        others = np.arange(self.k) != p
        U = U.copy()
        V = V.copy()
        U[:, others] *= s[:, None, None]
        if side == 0:
            U[:, p] = x
        else:
            V[:, p] = x
        return U, V

    def sweep(self, U, V):
        for p in range(self.k):
            for side in (0, 1):
                U, V = self.update(U, V, p, side)
        return _balance(U, V)


def _balance(U, V):
    nu = np.linalg.norm(U, axis=-1, keepdims=True)
    nv = np.linalg.norm(V, axis=-1, keepdims=True)
    ok = (nu > 0) & (nv > 0)
    r = np.sqrt(np.where(ok, nv, 1.0) / np.where(ok, nu, 1.0))
    return U * r, V / r


def _aligned_change(a, b):
    ip = np.sum(a.conj() * b, axis=-1)
    phase = np.where(np.abs(ip) > 0, ip / np.maximum(np.abs(ip), 1e-300), 1.0)
    return np.linalg.norm(b - phase[:, None] * a, axis=-1)


def _random_factors(rng, count, k, m):
    shape = (count, k, m)
    U = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    V = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return U, V


def _pad(U, V, k, m, rng):
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    j = U.shape[0]
    if j > k:
        raise ValueError(f"initial witness has {j} terms, more than k={k}")
    Up = np.zeros((k, m), dtype=complex)
    Vp = rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))
    Up[:j], Vp[:j] = U, V
    return Up, Vp


def min_over_Sk(
    M,
    spec,
    seed=0,
    restarts=64,
    initial=None,
    method="auto",
    tol=None,
    explore_sweeps=40,
    polish=4,
    max_sweeps=2000,
    step_tol=1e-12,
    mc_samples=512,
):
    """Smallest ``R(w, conj w) / |w|^2`` over complex 2-vectors of rank ``<= k``.

    ``method`` is ``"eigen"`` (exact, only for ``k = dim // 2``),
    ``"alternating"`` or ``"auto"``.  ``initial`` is an optional list of
    ``(U, V)`` factor pairs used as extra starting points.  Every restart runs
    ``explore_sweeps`` sweeps; the ``polish`` best are then iterated until the
    witness moves less than ``step_tol`` per sweep.
    """
    M = _check_form(M, spec)
    m, k = spec.dim, spec.k
    if tol is None:
        tol = default_tol(M)
    if method == "auto":
        method = "eigen" if spec.maximal else "alternating"
    if method == "eigen":
        if not spec.maximal:
            raise ValueError("the eigenvalue method is exact only for k = dim // 2")
        margin, w = _eigen_min(M)
        U, V = _factor_eigvec(w, m, k)
        return MembershipVerdict(m, k, margin, w, (U, V), tol, method="eigen")
    if method != "alternating":
        raise ValueError(f"unknown method {method!r}")

    rng = np.random.default_rng([seed, m, k, 0xC0DE])
    U, V = _random_factors(rng, restarts, k, m)
    if initial:
        extra = [_pad(u, v, k, m, rng) for u, v in initial]
        U = np.concatenate([np.array([e[0] for e in extra]), U])
        V = np.concatenate([np.array([e[1] for e in extra]), V])
    search = _Search(M, m, k)

    def normalized(U, V):
        w = search.omega(U, V)
        n = np.linalg.norm(w, axis=-1)
        n = np.where(n > 0, n, 1.0)
        return U / np.sqrt(n)[:, None, None], V / np.sqrt(n)[:, None, None], w / n[:, None]

    U, V, w = normalized(U, V)
    vals = search.values(w)
    history = [float(vals.min())]
    monotone = True
    for _ in range(explore_sweeps):
        U, V = search.sweep(U, V)
        U, V, w = normalized(U, V)
        new = search.values(w)
        monotone &= bool(np.all(new <= vals + 1e-12 * search.penalty))
        vals = new
        history.append(float(vals.min()))

    order = np.argsort(vals, kind="stable")[: max(1, polish)]
    U, V, w = U[order], V[order], w[order]
    vals = vals[order]
    sweeps = explore_sweeps
    converged = False
    while sweeps < max_sweeps:
        U2, V2 = search.sweep(U, V)
        U2, V2, w2 = normalized(U2, V2)
        new = search.values(w2)
        monotone &= bool(np.all(new <= vals + 1e-12 * search.penalty))
        step = _aligned_change(w, w2)
        U, V, w, vals = U2, V2, w2, new
        sweeps += 1
        history.append(float(vals.min()))
        if np.all(step < step_tol):
            converged = True
            break
        if sweeps % 50 == 0:
            # drop restarts that are clearly behind the leader
            keep = vals <= vals.min() + 1e-6 * search.penalty
            U, V, w, vals = U[keep], V[keep], w[keep], vals[keep]
    best = int(np.argmin(vals))
    margin = float(vals[best])
    witness = w[best]
    factors = (U[best], V[best])

    mc_min = float("nan")
    low = not converged or not monotone
    if mc_samples:
        Ur, Vr = _random_factors(rng, mc_samples, k, m)
        wr = search.omega(Ur, Vr)
        mv = search.values(wr)
        j = int(np.argmin(mv))
        mc_min = float(mv[j])
        if mc_min < margin - tol:
            low = True
            margin = mc_min
            witness = wr[j] / np.linalg.norm(wr[j])
            factors = (Ur[j], Vr[j])
    return MembershipVerdict(
        m,
        k,
        margin,
        witness,
        factors,
        tol,
        method="alternating",
        restarts=int(restarts + (len(initial) if initial else 0)),
        sweeps=sweeps,
        converged=converged,
        low_confidence=low,
        mc_min=mc_min,
        history=history,
    )


def membership(M, spec, tol=None, **kwargs):
    """Cone verdict: ``outside`` below ``-tol``, ``boundary`` within ``tol``, else ``interior``."""
    return min_over_Sk(M, spec, tol=tol, **kwargs)


def nested_membership(M, dim, ks=None, tol=None, **kwargs):
    """Verdicts for increasing ``k``, each search seeded with the previous witness.

    Seeding makes ``margin(k2) <= margin(k1)`` hold by construction.
    """
    if ks is None:
        ks = range(1, dim // 2 + 1)
    out = []
    initial = list(kwargs.pop("initial", None) or [])
    for k in sorted(ks):
        spec = ConeSpec(dim, k)
        v = min_over_Sk(M, spec, tol=tol, initial=initial or None, **kwargs)
        if out and v.margin > out[-1].margin:
            # the eigen method is exact; alternating is monotone from the seed
            v.margin = out[-1].margin
            v.witness = out[-1].witness
            v.factors = out[-1].factors
            v.status = classify(v.margin, v.tol)
        out.append(v)
        if v.factors[0].shape[0] == k and np.any(v.factors[0]):
            initial = initial + [v.factors]
    return out


@dataclass
class BoundarySample:
    form: np.ndarray
    witness: np.ndarray
    shift: float
    spec: ConeSpec
    factors: tuple = None

    def to_json(self):
        return {
            "dim": self.spec.dim,
            "k": self.spec.k,
            "form": tensors.form_to_json(self.form),
            "witness": tensors.two_vector_to_json(self.witness),
            "shift": float(self.shift),
        }


def boundary_sample(spec, seed=0, R0=None, restarts=16, max_rounds=5, **kwargs):
    """A form on the boundary of ``C(S_k)`` together with a null witness.

    Starts from a random curvature form ``R0`` (or the given one) and adds a
    multiple ``mu`` of the identity form.  Since ``I(w, conj w) = |w|^2``, the
    margin shifts by exactly ``mu``, so ``mu = -margin(R0)`` lands on the
    boundary; the result is re-searched and shifted again if a lower value
    appears.
    """
    rng = np.random.default_rng([seed, spec.dim, spec.k, 0xB0D])
    if R0 is None:
        R0 = tensors.random_form(spec.dim, rng)
    R = np.array(R0, dtype=float)
    I = tensors.identity_form(spec.dim)
    v = min_over_Sk(R, spec, seed=seed, restarts=restarts, **kwargs)
    R = R - v.margin * I
    shift = -v.margin
    witness, factors = v.witness, v.factors
    for _ in range(max_rounds):
        # re-search the shifted form, starting from the current witness
        v = min_over_Sk(R, spec, seed=seed + 1, restarts=restarts, initial=[factors], **kwargs)
        if v.margin >= -NULL_FACTOR * tensors.norm(R):
            break
        R = R - v.margin * I
        shift -= v.margin
        witness, factors = v.witness, v.factors
    else:
        raise BoundarySampleError(f"no boundary point after {max_rounds} rounds")
    if abs(tensors.evaluate(R, witness)) > NULL_FACTOR * tensors.norm(R):
        raise BoundarySampleError("witness is not null on the returned form")
    return BoundarySample(R, witness, shift, spec, factors)


def _require_null(M, omega, tol):
    val = tensors.evaluate(M, omega)
    scale = tensors.norm(M) * np.vdot(omega, omega).real
    if abs(val) > tol * max(scale, np.finfo(float).tiny):
        raise BoundaryPreconditionError(
            f"R(w, conj w) = {val:.3e} is not null (tolerance {tol:.1e} relative)"
        )


def ode_invariance_check(M, omega, ginv=None, null_tol=1e-8):
    """``Q(R)(w, conj w) / |w|^2`` at a null direction ``w`` of a boundary form."""
    M = np.asarray(M, dtype=float)
    omega = np.asarray(omega, dtype=complex)
    _require_null(M, omega, null_tol)
    return float(tensors.evaluate(Q_form(M, ginv), omega) / np.vdot(omega, omega).real)


def mainstep_operator(M, v):
    """``-ad_v o R o ad_conj(v)``, Hermitian on complex 2-vectors."""
    Av = ad_matrix(np.asarray(v, dtype=complex))
    H = -Av @ np.asarray(M, dtype=float) @ np.conj(Av)
    return 0.5 * (H + np.conj(H.T))


@dataclass
class MainstepReport:
    min_eigenvalue: float
    min_sampled: float
    tol: float
    samples: int

    @property
    def passed(self):
        return self.min_eigenvalue >= -self.tol and self.min_sampled >= -self.tol

    def to_json(self):
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "min_sampled": self.min_sampled,
            "tol": self.tol,
            "samples": self.samples,
            "passed": self.passed,
        }


def mainstep_check(M, v, samples=64, seed=0, tol=None, null_tol=1e-8, require_null=True):
    """Positivity of ``R`` on the image of ``ad_v`` at a null direction ``v``.

    Checks ``R(ad_v x, ad_conj(v) conj(x)) >= -tol`` for random ``x`` and the
    smallest eigenvalue of :func:`mainstep_operator`.  ``require_null=False``
    skips the precondition, e.g. to exhibit a failing operator.
    """
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=complex)
    nv = np.vdot(v, v).real
    if tol is None:
        tol = TOL_FACTOR * tensors.norm(M) * nv
    if nv == 0:
        return MainstepReport(0.0, 0.0, tol, 0)
    if require_null:
        _require_null(M, v, null_tol)
    H = mainstep_operator(M, v)
    emin = float(np.linalg.eigvalsh(H)[0])
    rng = np.random.default_rng([seed, 0xAD])
    N = M.shape[0]
    X = rng.standard_normal((samples, N)) + 1j * rng.standard_normal((samples, N))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Av = ad_matrix(v)
    vals = tensors.evaluate(M, X @ Av.T) if samples else np.zeros(1)
    return MainstepReport(emin, float(np.min(vals)), float(tol), samples)


def derivative_action(T, A):
    """``(D_A T)_abcd = A_xa T_xbcd + A_xb T_axcd + A_xc T_abxd + A_xd T_abcx``.

    The derivative at ``s = 0`` of the pullback of ``T`` by ``exp(s A)``.
    """
    return (
        np.einsum("xa,xbcd->abcd", A, T)
        + np.einsum("xb,axcd->abcd", A, T)
        + np.einsum("xc,abxd->abcd", A, T)
        + np.einsum("xd,abcx->abcd", A, T)
    )


def gl_boundary_tangency(M, omega, A, ginv=None, null_tol=1e-8):
    """``((D_A R)(w, conj w), F(R)(w, conj w))`` at a null direction, per unit ``|w|^2``."""
    M = np.asarray(M, dtype=float)
    omega = np.asarray(omega, dtype=complex)
    _require_null(M, omega, null_tol)
    m = tensors.dim_from_form_size(M.shape[0])
    if ginv is None:
        ginv = np.eye(m)
    T = tensors.tensor_from_form(M)
    nw = np.vdot(omega, omega).real
    DA = tensors.form_from_tensor(derivative_action(T, np.asarray(A, dtype=float)), check=False)
    Fm = tensors.form_from_tensor(F(T, ginv), check=False)
    return float(tensors.evaluate(DA, omega) / nw), float(tensors.evaluate(Fm, omega) / nw)


def _suite_plan(dims, ks, samples):
    combos = []
    for m in dims:
        wanted = {m // 2 if k is None else k for k in ks}
        for k in sorted(k for k in wanted if 1 <= k <= m // 2):
            combos.append((m, k))
    return [combos[i % len(combos)] for i in range(samples)]


def wilking_suite(dims=(3, 4, 5, 6), ks=(1, 2, None), samples=200, seed=0, f_samples=100, restarts=16):
    """Boundary statistics for the ODE invariance of the cones.

    ``samples`` boundary forms are drawn round-robin over the ``(dim, k)``
    combinations (``None`` in ``ks`` stands for ``dim // 2``).  Each gets the
    sign of ``Q`` at its null witness, the mainstep positivity check and, for
    the first ``f_samples`` samples with ``k = 1``, the vanishing of ``F`` and
    of ``D_A R`` for a random ``A``.
    """
    rows = []
    f_done = 0
    rng = np.random.default_rng([seed, 0x5017E])
    for i, (m, k) in enumerate(_suite_plan(dims, ks, samples)):
        spec = ConeSpec(m, k)
        b = boundary_sample(spec, seed=seed * 100003 + i, restarts=restarts)
        Rn = tensors.norm(b.form)
        q = ode_invariance_check(b.form, b.witness)
        ms = mainstep_check(b.form, b.witness, seed=seed * 100003 + i)
        row = {
            "index": i,
            "dim": m,
            "k": k,
            "norm": Rn,
            "null_value": float(tensors.evaluate(b.form, b.witness)),
            "q_value": q,
            "q_scaled": q / Rn**2,
            "q_ok": bool(q >= -TOL_FACTOR * Rn**2),
            "mainstep_min_eig": ms.min_eigenvalue,
            "mainstep_min_sampled": ms.min_sampled,
            "mainstep_ok": ms.passed,
        }
        A = rng.standard_normal((m, m))
        if k == 1 and f_done < f_samples:
            da, fv = gl_boundary_tangency(b.form, b.witness, A)
            row["DA_scaled"] = float(abs(da) / (Rn * np.linalg.norm(A)))
            row["F_scaled"] = abs(fv) / Rn**2
            row["F_ok"] = bool(row["F_scaled"] < TOL_FACTOR)
            row["DA_ok"] = bool(row["DA_scaled"] < TOL_FACTOR)
            f_done += 1
        rows.append(row)
    return rows


def summarize_suite(rows):
    f_rows = [r for r in rows if "F_ok" in r]
    return {
        "samples": len(rows),
        "q_all_ok": all(r["q_ok"] for r in rows),
        "q_min_scaled": min((r["q_scaled"] for r in rows), default=0.0),
        "mainstep_all_ok": all(r["mainstep_ok"] for r in rows),
        "f_samples": len(f_rows),
        "f_all_ok": all(r["F_ok"] for r in f_rows),
        "f_max_scaled": max((r["F_scaled"] for r in f_rows), default=0.0),
        "da_max_scaled": max((r["DA_scaled"] for r in f_rows), default=0.0),
    }
