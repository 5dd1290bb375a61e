"""Verify Newton directions satisfy the linearized HSDE equations."""
import numpy as np
from robas.socp import (
    ConeDims, _Scaling, _KKT, _jordan_prod, _jordan_div, _cone_e, _step_to_boundary,
)

rng = np.random.default_rng(5)  # trial-5-like geometry
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

# start from the e-init for clarity
x = np.zeros(n); y = np.zeros(0); s = e.copy(); z = e.copy(); tau = 1.0; kappa = 1.0
deg = dims.degree + 1

for it in range(40):
    r1 = G.T @ z + c * tau
    r3 = G @ x + s - h * tau
    r4 = float(c @ x + h @ z + kappa)
    gap = float(s @ z)
    mu = (gap + tau * kappa) / deg

    xh, zh, sh = x / tau, z / tau, s / tau
    pres = np.linalg.norm(G @ xh + sh - h) / (1 + np.linalg.norm(h))
    dres = np.linalg.norm(G.T @ zh + c) / (1 + np.linalg.norm(c))
    pobj = float(c @ xh)
    dobj = float(-h @ zh)
    rgap = float(sh @ zh) / max(1, abs(pobj), abs(dobj))

    scaling = _Scaling(s, z, dims)
    kkt.refresh(scaling)
    lam = scaling.lmbda(z)
    lam2 = scaling.apply_winv(s)
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
    dx, dz, ds, dtau, dkappa = direction(-r1, -r3, -r4, d_s_aff, -tau * kappa)

    if it == 0:
        # verify the linearized equations
        print("lambda consistency:", np.linalg.norm(lam - lam2))
        print("eq1:", np.linalg.norm(G.T @ dz + c * dtau + r1))
        print("eq3:", np.linalg.norm(G @ dx + ds - h * dtau + r3))
        print("eq4:", abs(float(c @ dx + h @ dz) + dkappa + r4))
        print("eq5:", np.linalg.norm(_jordan_prod(lam, scaling.apply_w(dz) + scaling.apply_winv(ds), dims) - d_s_aff))
        print("eq6:", abs(tau * dkappa + kappa * dtau + tau * kappa))

    a_aff = min(1.0, _step_to_boundary(s, ds, dims), _step_to_boundary(z, dz, dims),
                -tau / dtau if dtau < 0 else np.inf,
                -kappa / dkappa if dkappa < 0 else np.inf)
    gap_aff = float((s + a_aff * ds) @ (z + a_aff * dz) + (tau + a_aff * dtau) * (kappa + a_aff * dkappa))
    sigma = min(1.0, max(0.0, gap_aff / (gap + tau * kappa))) ** 3

    corr = _jordan_prod(scaling.apply_winv(ds), scaling.apply_w(dz), dims)
    d_s = -_jordan_prod(lam, lam, dims) - corr + sigma * mu * e
    d_kappa = -tau * kappa - dtau * dkappa + sigma * mu
    rsc = 1.0 - sigma
    dx, dz, ds, dtau, dkappa = direction(-rsc * r1, -rsc * r3, -rsc * r4, d_s, d_kappa)
    amax = min(_step_to_boundary(s, ds, dims), _step_to_boundary(z, dz, dims),
               -tau / dtau if dtau < 0 else np.inf,
               -kappa / dkappa if dkappa < 0 else np.inf)
    alpha = min(1.0, 0.99 * amax)
    print(f"it={it:2d} mu={mu:9.2e} pres={pres:9.2e} dres={dres:9.2e} rgap={rgap:9.2e} "
          f"a_aff={a_aff:6.4f} sigma={sigma:6.4f} alpha={alpha:6.4f} tau={tau:8.3e} kap={kappa:8.3e}")
    if alpha <= 1e-13:
        print("STALL")
        break
    x += alpha * dx; z += alpha * dz; s += alpha * ds; tau += alpha * dtau; kappa += alpha * dkappa
    if max(pres, dres, rgap) < 1e-9:
        print("CONVERGED")
        break
