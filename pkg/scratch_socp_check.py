"""Scratch cross-check of the conic solver against cvxpy on random programs."""
import numpy as np
import cvxpy as cp

from robas.socp import ConeDims, solve_conic

rng = np.random.default_rng(7)
fails = 0
for trial in range(30):
    n = rng.integers(3, 12)
    l = int(rng.integers(1, 15))
    socs = []
    if trial % 3 != 0:
        socs = [int(rng.integers(2, 6)) for _ in range(rng.integers(1, 3))]
    m = l + sum(socs)
    G = rng.standard_normal((m, n))
    # make the primal feasible: pick interior s0, x0
    x0 = rng.standard_normal(n)
    s0 = np.empty(m)
    s0[:l] = rng.uniform(0.5, 2.0, l)
    start = l
    for q in socs:
        blk = rng.standard_normal(q)
        blk[0] = np.linalg.norm(blk[1:]) + rng.uniform(0.5, 2.0)
        s0[start:start + q] = blk
        start += q
    h = G @ x0 + s0
    # bounded objective: c = -G' z0 for interior dual z0 (+ A' y piece)
    z0 = np.empty(m)
    z0[:l] = rng.uniform(0.5, 2.0, l)
    start = l
    for q in socs:
        blk = rng.standard_normal(q)
        blk[0] = np.linalg.norm(blk[1:]) + rng.uniform(0.5, 2.0)
        z0[start:start + q] = blk
        start += q
    use_eq = trial % 2 == 0
    if use_eq:
        p = int(rng.integers(1, 3))
        A = rng.standard_normal((p, n))
        b = A @ x0
        y0 = rng.standard_normal(p)
        c = -(G.T @ z0 + A.T @ y0)
    else:
        A = b = None
        c = -(G.T @ z0)

    sol = solve_conic(c, G, h, ConeDims(l, tuple(socs)), A=A, b=b)

    xv = cp.Variable(n)
    cons = [G[:l] @ xv <= h[:l]]
    start = l
    for q in socs:
        cons.append(cp.SOC(h[start] - G[start] @ xv, G[start + 1:start + q] @ xv - h[start + 1:start + q]))
        start += q
    if use_eq:
        cons.append(A @ xv == b)
    prob = cp.Problem(cp.Minimize(c @ xv), cons)
    prob.solve(solver=cp.CLARABEL)
    ref = prob.value
    ok = sol.status == "optimal" and abs(sol.pobj - ref) <= 1e-6 * (1 + abs(ref))
    if not ok:
        fails += 1
        print(f"trial {trial}: status={sol.status} iters={sol.iterations} "
              f"pobj={sol.pobj:.10f} ref={ref:.10f} res={sol.residuals}")
print("fails:", fails, "/ 30")
