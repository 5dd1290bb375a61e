"""Dense conic solver for linear programs with second-order cone constraints.

Solves
    minimize    c'v
    subject to  G v + s = h,  s in K,
                A v = b,
with K a product of a nonnegative orthant (dim l) and second-order cones
Q^q = {(u0, u1) : u0 >= ||u1||_2}, via a homogeneous self-dual embedding with
Nesterov-Todd scaling and Mehrotra predictor-corrector steps. Every iteration
factorizes the (dense) reduced matrix G' W^-2 G once and reuses it for the
three right-hand sides; one pass of iterative refinement keeps the end-game
accurate. The embedding also certifies primal/dual infeasibility (tau -> 0).

This is a from-scratch implementation tuned for the mid-size dense problems
produced by the worst-case dual builder (a few thousand variables); it is not
a sparse general-purpose solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

try:
    from scipy.linalg.blas import dsyrk as _dsyrk
except ImportError:  # pragma: no cover
    _dsyrk = None


@dataclass(frozen=True)
class ConeDims:
    """Cone layout of the slack vector: orthant size then SOC sizes in order."""

    nonneg: int = 0
    soc: tuple[int, ...] = ()

    def __post_init__(self):
        if self.nonneg < 0 or any(q < 2 for q in self.soc):
            raise ValueError("invalid cone dimensions")
        object.__setattr__(self, "soc", tuple(int(q) for q in self.soc))

    @property
    def total(self) -> int:
        return self.nonneg + sum(self.soc)

    @property
    def degree(self) -> int:
        return self.nonneg + len(self.soc)

    def soc_slices(self):
        start = self.nonneg
        for q in self.soc:
            yield slice(start, start + q)
            start += q


@dataclass
class ConicSolution:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    status: str
    iterations: int
    pobj: float
    dobj: float
    residuals: dict = field(default_factory=dict)


def _cone_e(dims: ConeDims) -> np.ndarray:
    e = np.zeros(dims.total)
    e[: dims.nonneg] = 1.0
    for sl in dims.soc_slices():
        e[sl.start] = 1.0
    return e


def _min_eig(u: np.ndarray, dims: ConeDims) -> float:
    """Smallest cone 'eigenvalue': entries on the orthant, u0 - ||u1|| per SOC."""
    vals = []
    if dims.nonneg:
        vals.append(u[: dims.nonneg].min())
    for sl in dims.soc_slices():
        blk = u[sl]
        vals.append(blk[0] - np.linalg.norm(blk[1:]))
    return min(vals) if vals else np.inf


def _step_to_boundary(u: np.ndarray, du: np.ndarray, dims: ConeDims) -> float:
    """Largest alpha with u + alpha du in K, for u strictly inside K."""
    alpha = np.inf
    if dims.nonneg:
        ub, dub = u[: dims.nonneg], du[: dims.nonneg]
        neg = dub < 0
        if np.any(neg):
            alpha = min(alpha, float(np.min(-ub[neg] / dub[neg])))
    for sl in dims.soc_slices():
        s0, s1 = u[sl.start], u[sl.start + 1 : sl.stop]
        d0, d1 = du[sl.start], du[sl.start + 1 : sl.stop]
        aa = d0 * d0 - d1 @ d1
        bb = s0 * d0 - s1 @ d1
        cc = max(s0 * s0 - s1 @ s1, 0.0)
        disc = bb * bb - aa * cc
        if aa < 0:
            # concave quadratic: feasible up to its larger root
            a_quad = (bb + np.sqrt(max(disc, 0.0))) / (-aa)
        elif bb < 0 and disc > 0:
            # convex, decreasing at 0, real roots: first crossing (stable form)
            a_quad = cc / (-bb + np.sqrt(disc))
        else:
            a_quad = np.inf
        a_lin = -s0 / d0 if d0 < 0 else np.inf
        alpha = min(alpha, a_quad, a_lin)
    return alpha


def _soc_rot(wbar: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """Hyperbolic Householder map [[w0, w1'], [w1, I + w1 w1'/(1+w0)]] @ v.

    This is the positive-definite square root of 2 wbar wbar' - J for a
    J-unit wbar (wbar0^2 - ||wbar1||^2 = 1).
    """
    t = wbar[1:] @ vb[1:]
    out = np.empty_like(vb)
    out[0] = wbar[0] * vb[0] + t
    out[1:] = vb[1:] + (vb[0] + t / (1.0 + wbar[0])) * wbar[1:]
    return out


class _Scaling:
    """Nesterov-Todd scaling point: W z = W^-1 s = lambda per cone block."""

    @classmethod
    def identity(cls, dims: ConeDims) -> "_Scaling":
        obj = cls.__new__(cls)
        obj.dims = dims
        obj.w_orth = np.ones(dims.nonneg)
        obj.soc = []
        for q in dims.soc:
            wbar = np.zeros(q)
            wbar[0] = 1.0
            obj.soc.append((1.0, wbar))
        return obj

    def __init__(self, s: np.ndarray, z: np.ndarray, dims: ConeDims):
        self.dims = dims
        l = dims.nonneg
        self.w_orth = np.sqrt(s[:l] / z[:l]) if l else np.zeros(0)
        self.soc = []
        for sl in dims.soc_slices():
            sb, zb = s[sl], z[sl]
            det_s = sb[0] ** 2 - sb[1:] @ sb[1:]
            det_z = zb[0] ** 2 - zb[1:] @ zb[1:]
            if det_s <= 0 or det_z <= 0:
                raise FloatingPointError("iterate left the cone interior")
            sbar = sb / np.sqrt(det_s)
            zbar = zb / np.sqrt(det_z)
            gamma = np.sqrt((1.0 + sbar @ zbar) / 2.0)
            wbar = sbar.copy()
            wbar[0] += zbar[0]
            wbar[1:] -= zbar[1:]
            wbar /= 2.0 * gamma
            eta = (det_s / det_z) ** 0.25
            self.soc.append((eta, wbar))

    def _apply(self, v: np.ndarray, inverse: bool) -> np.ndarray:
        out = np.empty_like(v)
        l = self.dims.nonneg
        out[:l] = v[:l] / self.w_orth if inverse else v[:l] * self.w_orth
        for (eta, wbar), sl in zip(self.soc, self.dims.soc_slices()):
            if inverse:
                # W^-1 = (1/eta) * rot(J wbar)
                jw = wbar.copy()
                jw[1:] *= -1.0
                out[sl] = _soc_rot(jw, v[sl]) / eta
            else:
                out[sl] = eta * _soc_rot(wbar, v[sl])
        return out

    def apply_w(self, v: np.ndarray) -> np.ndarray:
        return self._apply(v, inverse=False)

    def apply_winv(self, v: np.ndarray) -> np.ndarray:
        return self._apply(v, inverse=True)

    def apply_w2(self, v: np.ndarray) -> np.ndarray:
        """W^2 v: diag(w^2) on the orthant, eta^2 (2 wbar wbar' - J) per SOC."""
        out = np.empty_like(v)
        l = self.dims.nonneg
        out[:l] = v[:l] * self.w_orth**2
        for (eta, wbar), sl in zip(self.soc, self.dims.soc_slices()):
            vb = v[sl]
            jv = vb.copy()
            jv[1:] *= -1.0
            out[sl] = eta**2 * (2.0 * (wbar @ vb) * wbar - jv)
        return out

    def apply_winv2(self, v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        l = self.dims.nonneg
        out[:l] = v[:l] / self.w_orth**2
        for (eta, wbar), sl in zip(self.soc, self.dims.soc_slices()):
            vb = v[sl]
            jv = vb.copy()
            jv[1:] *= -1.0
            jw = wbar.copy()
            jw[1:] *= -1.0
            out[sl] = (2.0 * (jw @ vb) * jw - jv) / eta**2
        return out

    def lmbda(self, z: np.ndarray) -> np.ndarray:
        return self.apply_w(z)


def _centrality(s, z, tau, kappa, dims: ConeDims, deg: int):
    """Per-block complementarity proxies and their common measure mu.

    On the central path every proxy equals mu: orthant products s_i z_i,
    sqrt(det s_b * det z_b) per SOC block, and tau*kappa. The ratio
    min(proxy)/mu measures distance from the path.
    """
    mu = (float(s @ z) + tau * kappa) / deg
    worst = tau * kappa
    l = dims.nonneg
    if l:
        worst = min(worst, float(np.min(s[:l] * z[:l])))
    for sl in dims.soc_slices():
        sb, zb = s[sl], z[sl]
        det_s = sb[0] ** 2 - sb[1:] @ sb[1:]
        det_z = zb[0] ** 2 - zb[1:] @ zb[1:]
        if det_s <= 0 or det_z <= 0:
            return mu, -np.inf
        worst = min(worst, float(np.sqrt(det_s * det_z)))
    return mu, worst


def _jordan_prod(u: np.ndarray, v: np.ndarray, dims: ConeDims) -> np.ndarray:
    out = np.empty_like(u)
    l = dims.nonneg
    out[:l] = u[:l] * v[:l]
    for sl in dims.soc_slices():
        ub, vb = u[sl], v[sl]
        out[sl.start] = ub @ vb
        out[sl.start + 1 : sl.stop] = ub[0] * vb[1:] + vb[0] * ub[1:]
    return out


def _jordan_div(lmbda: np.ndarray, d: np.ndarray, dims: ConeDims) -> np.ndarray:
    """Solve lmbda o x = d per cone block."""
    out = np.empty_like(d)
    l = dims.nonneg
    out[:l] = d[:l] / lmbda[:l]
    for sl in dims.soc_slices():
        a = lmbda[sl.start]
        bvec = lmbda[sl.start + 1 : sl.stop]
        d0 = d[sl.start]
        d1 = d[sl.start + 1 : sl.stop]
        det = a * a - bvec @ bvec
        bd = bvec @ d1
        out[sl.start] = (a * d0 - bd) / det
        out[sl.start + 1 : sl.stop] = (-d0 * bvec + (det * d1 + bd * bvec) / a) / det
    return out


def _syrk(mat: np.ndarray) -> np.ndarray:
    """mat' mat using the symmetric rank-k BLAS kernel when available."""
    if _dsyrk is not None and mat.flags.f_contiguous:
        upper = _dsyrk(1.0, mat, trans=1, lower=0)
        return np.triu(upper) + np.triu(upper, 1).T
    if _dsyrk is not None:
        lower = _dsyrk(1.0, np.asfortranarray(mat.T), trans=0, lower=1)
        return np.tril(lower) + np.tril(lower, -1).T
    return mat.T @ mat


class _KKT:
    """Factorization of [H A'; A 0], H = G' W^-2 G + reg I, refreshed per iteration."""

    def __init__(self, G, A, dims: ConeDims, soc_base):
        self.G = G
        self.A = A
        self.dims = dims
        self.soc_base = soc_base  # precomputed Gs' Gs per SOC block
        self.reg = 0.0

    def refresh(self, scaling: _Scaling):
        G, dims = self.G, self.dims
        n = G.shape[1]
        l = dims.nonneg
        h_mat = np.zeros((n, n))
        if l:
            b_mat = G[:l] * (1.0 / scaling.w_orth)[:, None]
            h_mat += _syrk(b_mat)
        # per SOC: Gs' W^-2 Gs = (2 (Gs' Jwbar)(Gs' Jwbar)' - Gs' J Gs) / eta^2
        for (eta, wbar), sl, base_j in zip(scaling.soc, dims.soc_slices(), self.soc_base):
            gs = G[sl]
            jw = wbar.copy()
            jw[1:] *= -1.0
            a1 = gs.T @ jw
            h_mat += (2.0 * np.outer(a1, a1) - base_j) / eta**2
        scale = 1.0 + np.trace(h_mat) / n
        reg = 1e-12 * scale
        for _ in range(6):
            try:
                self.chol = cho_factor(
                    h_mat + reg * np.eye(n), lower=True, check_finite=False
                )
                self.reg = reg
                break
            except np.linalg.LinAlgError:
                reg *= 100.0
        else:
            raise FloatingPointError("KKT matrix not factorizable")
        if self.A is not None:
            self.h_inv_at = cho_solve(self.chol, self.A.T, check_finite=False)
            schur = self.A @ self.h_inv_at
            self.schur_chol = cho_factor(schur, lower=True, check_finite=False)
        self.scaling = scaling

    def _solve_raw(self, bx, by, bz):
        v = bx + self.G.T @ self.scaling.apply_winv2(bz)
        if self.A is not None:
            hv = cho_solve(self.chol, v, check_finite=False)
            dy = cho_solve(self.schur_chol, self.A @ hv - by, check_finite=False)
            dx = hv - self.h_inv_at @ dy
        else:
            dy = np.zeros(0)
            dx = cho_solve(self.chol, v, check_finite=False)
        dz = self.scaling.apply_winv2(self.G @ dx - bz)
        return dx, dy, dz

    def solve3(self, bx, by, bz):
        dx, dy, dz = self._solve_raw(bx, by, bz)
        # one refinement pass; factorization error and static reg are tiny but
        # the end-game complementarity targets are tinier still
        rx = bx - (self.G.T @ dz + (self.A.T @ dy if self.A is not None else 0.0))
        ry = by - (self.A @ dx) if self.A is not None else by
        rz = bz - (self.G @ dx - self.scaling.apply_w2(dz))
        ex, ey, ez = self._solve_raw(rx, ry if self.A is not None else np.zeros(0), rz)
        return dx + ex, dy + ey, dz + ez


def _equilibrate(G, dims: ConeDims, A, iters: int = 10):
    """Blockwise Ruiz scaling: row/column norms driven toward 1.

    Rows belonging to one second-order cone share a single scalar so the
    scaled slack stays in the same cone.
    """
    m, n = G.shape
    d_row = np.ones(m)
    d_col = np.ones(n)
    d_eq = np.ones(A.shape[0]) if A is not None else None
    for _ in range(iters):
        gs = G * d_row[:, None] * d_col[None, :]
        rn = np.max(np.abs(gs), axis=1)
        for sl in dims.soc_slices():
            rn[sl] = rn[sl].max()
        d_row /= np.sqrt(np.maximum(rn, 1e-12))
        if A is not None:
            as_ = A * d_eq[:, None] * d_col[None, :]
            d_eq /= np.sqrt(np.maximum(np.max(np.abs(as_), axis=1), 1e-12))
        gs = G * d_row[:, None] * d_col[None, :]
        cn = np.max(np.abs(gs), axis=0)
        if A is not None:
            as_ = A * d_eq[:, None] * d_col[None, :]
            cn = np.maximum(cn, np.max(np.abs(as_), axis=0))
        d_col /= np.sqrt(np.maximum(cn, 1e-12))
    return d_row, d_col, d_eq


def solve_conic(
    c: np.ndarray,
    G: np.ndarray,
    h: np.ndarray,
    dims: ConeDims,
    A: np.ndarray | None = None,
    b: np.ndarray | None = None,
    tol: float = 1e-8,
    accept_tol: float = 1e-6,
    max_iter: int = 200,
) -> ConicSolution:
    """Solve the conic program after Ruiz equilibration of the data.

    The interior-point core runs on the scaled problem; the returned solution
    and residuals are reported in the original data units.
    """
    c = np.asarray(c, dtype=float)
    G = np.ascontiguousarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    if A is not None:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
    d_row, d_col, d_eq = _equilibrate(G, dims, A)
    g_s = G * d_row[:, None] * d_col[None, :]
    h_s = h * d_row
    c_s = c * d_col
    a_s = A * d_eq[:, None] * d_col[None, :] if A is not None else None
    b_s = b * d_eq if A is not None else None
    sol = _solve_core(c_s, g_s, h_s, dims, a_s, b_s, tol, accept_tol, max_iter)
    if sol.status == "infeasible":
        return sol
    x = sol.x * d_col
    s = sol.s / d_row
    z = sol.z * d_row
    y = sol.y * d_eq if A is not None else sol.y
    pres_rows = [np.linalg.norm(G @ x + s - h) / (1.0 + np.linalg.norm(h))]
    if A is not None:
        pres_rows.append(np.linalg.norm(A @ x - b) / (1.0 + np.linalg.norm(b)))
    pres = float(max(pres_rows))
    dvec = G.T @ z + c + (A.T @ y if A is not None else 0.0)
    dres = float(np.linalg.norm(dvec) / (1.0 + np.linalg.norm(c)))
    pobj = float(c @ x)
    dobj = float(-(h @ z) - (b @ y if A is not None else 0.0))
    rgap = float(abs(s @ z)) / max(1.0, abs(pobj), abs(dobj))
    metric = max(pres, dres, rgap)
    status = "optimal" if metric <= tol else (
        "inaccurate" if metric <= accept_tol else "failed"
    )
    return ConicSolution(
        x, y, z, s, status, sol.iterations, pobj, dobj,
        {"pres": pres, "dres": dres, "relgap": rgap},
    )


def _solve_core(
    c: np.ndarray,
    G: np.ndarray,
    h: np.ndarray,
    dims: ConeDims,
    A: np.ndarray | None = None,
    b: np.ndarray | None = None,
    tol: float = 1e-8,
    accept_tol: float = 1e-6,
    max_iter: int = 200,
) -> ConicSolution:
    """Homogeneous self-dual interior-point iteration on pre-scaled data.

    Iterates until primal/dual feasibility and relative gap fall below tol
    (best iterate is kept, so a stall still returns the most accurate point
    seen; callers decide whether accept_tol suffices).
    """
    n = c.shape[0]
    if G.shape != (dims.total, n):
        raise ValueError(f"G shape {G.shape} inconsistent with cones/variables")
    G = np.ascontiguousarray(G)

    soc_base = []
    for sl in dims.soc_slices():
        gs_j = G[sl].copy()
        gs_j[1:] *= -1.0
        soc_base.append(G[sl].T @ gs_j)  # Gs' J Gs
    kkt = _KKT(G, A, dims, soc_base)
    e = _cone_e(dims)
    deg = dims.degree + 1
    norm_b = 1.0 + (np.linalg.norm(b) if A is not None else 0.0)
    norm_h = 1.0 + np.linalg.norm(h)
    norm_c = 1.0 + np.linalg.norm(c)

    # initial point: least-squares primal/dual shifted strictly inside the cone
    kkt.refresh(_Scaling.identity(dims))
    x0, _, z0 = kkt.solve3(np.zeros(n), b if A is not None else np.zeros(0), h)
    s_init = -z0  # since G x - z = h under identity scaling
    shift = -_min_eig(s_init, dims)
    if shift >= 0:
        s_init = s_init + (1.0 + shift) * e
    _, y0, z_init = kkt.solve3(
        -c, np.zeros(A.shape[0]) if A is not None else np.zeros(0), np.zeros(dims.total)
    )
    shift = -_min_eig(z_init, dims)
    if shift >= 0:
        z_init = z_init + (1.0 + shift) * e

    x, y, z, s = x0, y0, z_init, s_init
    tau, kappa = 1.0, 1.0

    best = None
    best_metric = np.inf
    status = "max_iterations"
    stall_count = 0
    it = 0

    def _scaled_residuals(x, y, z, s, tau):
        xh, zh, sh = x / tau, z / tau, s / tau
        yh = y / tau if A is not None else y
        pres_rows = [np.linalg.norm(G @ xh + sh - h) / norm_h]
        if A is not None:
            pres_rows.append(np.linalg.norm(A @ xh - b) / norm_b)
        pres = max(pres_rows)
        dvec = G.T @ zh + c + (A.T @ yh if A is not None else 0.0)
        dres = np.linalg.norm(dvec) / norm_c
        pobj = float(c @ xh)
        dobj = float(-(h @ zh) - (b @ yh if A is not None else 0.0))
        gap = float(sh @ zh) / max(1.0, abs(pobj), abs(dobj))
        return pres, dres, gap, pobj, dobj

    for it in range(1, max_iter + 1):
        r1 = G.T @ z + c * tau + (A.T @ y if A is not None else 0.0)
        r2 = (A @ x - b * tau) if A is not None else np.zeros(0)
        r3 = G @ x + s - h * tau
        r4 = float(c @ x + (b @ y if A is not None else 0.0) + h @ z + kappa)
        gap = float(s @ z)
        mu = (gap + tau * kappa) / deg

        pres, dres, rgap, pobj, dobj = _scaled_residuals(x, y, z, s, tau)
        metric = max(pres, dres, rgap)
        if metric < 0.9 * best_metric:
            stall_count = 0
        else:
            stall_count += 1
        if metric < best_metric:
            best_metric = metric
            best = (x.copy(), y.copy(), z.copy(), s.copy(), tau, pobj, dobj, pres, dres, rgap)
        if metric <= tol:
            status = "optimal"
            break
        if stall_count >= 20:
            status = "stalled"
            break
        # infeasibility certificate: the homogeneous iterate collapses tau
        if tau < 1e-10 * max(1.0, kappa) and mu < 1e-12:
            status = "infeasible"
            break

        try:
            with np.errstate(divide="raise", invalid="raise"):
                scaling = _Scaling(s, z, dims)
                kkt.refresh(scaling)
                lam = scaling.lmbda(z)
                u2 = kkt.solve3(-c, b if A is not None else np.zeros(0), h)
        except FloatingPointError:
            status = "stalled"
            break

        denom = float(c @ u2[0] + (b @ u2[1] if A is not None else 0.0) + h @ u2[2]) - kappa / tau
        if not np.isfinite(denom) or denom >= 0:
            status = "stalled"
            break

        def _direction(xi1, xi2, xi3, xi4, d_s, d_kappa):
            xi3_tilde = xi3 - scaling.apply_w(_jordan_div(lam, d_s, dims))
            u1 = kkt.solve3(xi1, xi2, xi3_tilde)
            num = xi4 - d_kappa / tau - float(
                c @ u1[0] + (b @ u1[1] if A is not None else 0.0) + h @ u1[2]
            )
            dtau = num / denom
            dx = u1[0] + dtau * u2[0]
            dy = u1[1] + dtau * u2[1]
            dz = u1[2] + dtau * u2[2]
            ds = xi3 - G @ dx + h * dtau
            dkappa = (d_kappa - kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkappa

        def _max_step(d):
            return min(
                _step_to_boundary(s, d[3], dims),
                _step_to_boundary(z, d[2], dims),
                -tau / d[4] if d[4] < 0 else np.inf,
                -kappa / d[5] if d[5] < 0 else np.inf,
            )

        # wide neighborhood while far from the solution; nearly unrestricted in
        # the end-game so the final sharp steps are not blocked
        beta = 1e-3 if metric > 1e-4 else 1e-7

        def _guarded_step(d):
            """Largest damped step keeping the iterate near the central path."""
            alpha = min(1.0, 0.99 * _max_step(d))
            for _ in range(30):
                if alpha <= 1e-12:
                    return 0.0
                mu_new, worst = _centrality(
                    s + alpha * d[3], z + alpha * d[2],
                    tau + alpha * d[4], kappa + alpha * d[5], dims, deg,
                )
                if worst >= beta * mu_new and mu_new > 0:
                    return alpha
                alpha *= 0.8
            return 0.0

        try:
            with np.errstate(divide="raise", invalid="raise"):
                # predictor
                lam2 = _jordan_prod(lam, lam, dims)
                d_aff = _direction(-r1, -r2, -r3, -r4, -lam2, -tau * kappa)
                alpha_aff = min(1.0, _max_step(d_aff))
                gap_aff = float(
                    (s + alpha_aff * d_aff[3]) @ (z + alpha_aff * d_aff[2])
                    + (tau + alpha_aff * d_aff[4]) * (kappa + alpha_aff * d_aff[5])
                )
                sigma = min(1.0 - 1e-8, max(0.0, gap_aff / (gap + tau * kappa))) ** 3

                # Mehrotra corrector; its second-order term assumes a unit
                # step, so it is weighted down when the affine step is short
                corr_weight = min(1.0, alpha_aff**2)
                corr = _jordan_prod(
                    scaling.apply_winv(d_aff[3]), scaling.apply_w(d_aff[2]), dims
                )
                d_s = -lam2 - corr_weight * corr + sigma * mu * e
                d_kappa = -tau * kappa - corr_weight * d_aff[4] * d_aff[5] + sigma * mu
                rsc = 1.0 - sigma
                d = _direction(-rsc * r1, -rsc * r2, -rsc * r3, -rsc * r4, d_s, d_kappa)
                alpha = _guarded_step(d)
                if alpha <= 0.0:
                    # recentering rescue: drop the corrector, aim for the path
                    d_s = -lam2 + mu * e
                    d = _direction(
                        np.zeros(n), np.zeros(r2.shape), np.zeros(dims.total),
                        0.0, d_s, -tau * kappa + mu,
                    )
                    alpha = _guarded_step(d)
        except FloatingPointError:
            status = "stalled"
            break
        if alpha <= 0.0 or not all(np.all(np.isfinite(v)) for v in d):
            status = "stalled"
            break

        x = x + alpha * d[0]
        if A is not None:
            y = y + alpha * d[1]
        z = z + alpha * d[2]
        s = s + alpha * d[3]
        tau = tau + alpha * d[4]
        kappa = kappa + alpha * d[5]

    if best is None:
        raise FloatingPointError("conic solver produced no iterate")
    bx, by, bz, bs, btau, pobj, dobj, pres, dres, rgap = best
    if status == "infeasible":
        sol_x = np.full(n, np.nan)
        return ConicSolution(
            sol_x, by, bz, bs, "infeasible", it, np.nan, np.nan,
            {"pres": pres, "dres": dres, "relgap": rgap},
        )
    if status != "optimal":
        status = "optimal" if best_metric <= tol else (
            "inaccurate" if best_metric <= accept_tol else "failed"
        )
    return ConicSolution(
        bx / btau,
        by / btau if A is not None else by,
        bz / btau,
        bs / btau,
        status,
        it,
        pobj,
        dobj,
        {"pres": pres, "dres": dres, "relgap": rgap},
    )
