"""Deeper probe: centrality, direction norms, H conditioning."""
import numpy as np
from robas.socp import (
    ConeDims, _Scaling, _KKT, _jordan_prod, _jordan_div, _cone_e, _step_to_boundary,
)

rng = np.random.default_rng(5)
n, l = 8, 6
socs = (4, 3)
dims = ConeDims(l, socs)
m = dims.total
G = rng.standard_normal((m, n))
x0 = rng.standard_normal(n)
s0 = np.empty(m)
s0[:l] = rng.uniform(0.5, 2.0, l)
start = l
for q in socs:
    blk = rng.standard_normal(q)
    blk[0] = np.linalg.norm(blk[1:]) + rng.uniform(0.5, 2.0)
    s0[start:start+q] = blk
    start += q
h = G @ x0 + s0
z0 = np.empty(m)
z0[:l] = rng.uniform(0.5, 2.0, l)
start = l
for q in socs:
    blk = rng.standard_normal(q)
    blk[0] = np.linalg.norm(blk[1:]) + rng.uniform(0.5, 2.0)
    z0[start:start+q] = blk
    start += q
c = -(G.T @ z0)

soc_base = [G[sl].T @ G[sl] for sl in dims.soc_slices()]
kkt = _KKT(G, None, dims, soc_base)
e = _cone_e(dims)
x = np.zeros(n); s = e.copy(); z = e.copy(); tau = 1.0; kappa = 1.0
deg = dims.degree + 1

def lam_eigs(u):
    out = []
    if dims.nonneg:
        out += [u[:dims.nonneg].min(), u[:dims.nonneg].max()]
    for sl in dims.soc_slices():
        blk = u[sl]
        nrm = np.linalg.norm(blk[1:])
        out += [blk[0] - nrm, blk[0] + nrm]
    return min(out), max(out)

for it in range(12):
    r1 = G.T @ z + c * tau
    r3 = G @ x + s - h * tau
    r4 = float(c @ x + h @ z + kappa)
    gap = float(s @ z)
    mu = (gap + tau * kappa) / deg
    scaling = _Scaling(s, z, dims)
    kkt.refresh(scaling)
    lam = scaling.lmbda(z)
    lo, hi = lam_eigs(lam)
    u2 = kkt.solve3(-c, np.zeros(0), h)
    denom = float(c @ u2[0] + h @ u2[2]) - kappa / tau

    def direction(xi1, xi3, xi4, d_s, d_kappa):
        xi3t = xi3 - scaling.apply_w(_jordan_div(lam, d_s, dims))
        u1 = kkt.solve3(xi1, np.zeros(0), xi3t)
        num = xi4 - d_kappa / tau - float(c @ u1[0] + h @ u1[2])
        dtau = num / denom
        dx = u1[0] + dtau * u2[0]
        dz = u1[2] + dtau * u2[2]
        ds = xi3 - G @ dx + h * dtau
        dkappa = (d_kappa - kappa * dtau) / tau
        return dx, dz, ds, dtau, dkappa

    d_s_aff = -_jordan_prod(lam, lam, dims)
    dxa, dza, dsa, dta, dka = direction(-r1, -r3, -r4, d_s_aff, -tau * kappa)
    a_aff = min(1.0, _step_to_boundary(s, dsa, dims), _step_to_boundary(z, dza, dims),
                -tau / dta if dta < 0 else np.inf,
                -kappa / dka if dka < 0 else np.inf)
    cross = float(dsa @ dza + dta * dka)
    gap_aff = float((s + a_aff * dsa) @ (z + a_aff * dza) + (tau + a_aff * dta) * (kappa + a_aff * dka))
    sigma = min(1.0, max(0.0, gap_aff / (gap + tau * kappa))) ** 3

    corr = _jordan_prod(scaling.apply_winv(dsa), scaling.apply_w(dza), dims)
    d_s = -_jordan_prod(lam, lam, dims) - corr + sigma * mu * e
    d_kappa = -tau * kappa - dta * dka + sigma * mu
    rsc = 1.0 - sigma
    dx, dz, ds, dtau, dkappa = direction(-rsc * r1, -rsc * r3, -rsc * r4, d_s, d_kappa)
    amax = min(_step_to_boundary(s, ds, dims), _step_to_boundary(z, dz, dims),
               -tau / dtau if dtau < 0 else np.inf,
               -kappa / dkappa if dkappa < 0 else np.inf)
    which = np.argmin([_step_to_boundary(s, ds, dims), _step_to_boundary(z, dz, dims),
                       -tau / dtau if dtau < 0 else np.inf,
                       -kappa / dkappa if dkappa < 0 else np.inf])
    alpha = min(1.0, 0.99 * amax)
    print(f"it={it:2d} mu={mu:8.2e} lam_eig=[{lo:8.2e},{hi:8.2e}] a_aff={a_aff:6.4f} "
          f"cross={cross:9.2e} sigma={sigma:5.3f} |ds|={np.linalg.norm(dsa):8.2e} "
          f"|dz|={np.linalg.norm(dza):8.2e} alpha={alpha:6.4f} lim={['s','z','tau','kap'][which]} "
          f"tau={tau:7.2e} kap={kappa:7.2e}")
    x += alpha * dx; z += alpha * dz; s += alpha * ds; tau += alpha * dtau; kappa += alpha * dkappa
