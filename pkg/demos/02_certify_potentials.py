"""
Watching the potential functions decrease
=========================================

Each accelerated method has a potential (Lyapunov) function whose
nonincrease is the whole content of its convergence proof. A certified
run evaluates it along the iterates, together with the residual bound.
"""

from acceg import RunConfig, certify_trace, get_problem, run

# a nonmonotone problem: <F x, x> = -mu |x|^2 < 0
entry = get_problem("shifted-0.05-2")
p = entry.spec
print(f"{entry.name}: L={p.L:.6f} rho={p.rho:.6f}")

for method in ("AEG", "APEG", "EAG", "PEAG"):
    tr = run(method, p, RunConfig(max_iters=500, certify=True), entry.default_x0)
    rep = certify_trace(tr)
    lyap = tr.column("lyapunov")
    print(f"\n{method}: step={tr.meta['step']:.6g}")
    print("  potential at k = 0, 10, 100, 500:", [f"{lyap[k]:.4g}" for k in (0, 10, 100, 500)])
    print("  " + "  ".join(rep.summary()))

# %%
# Forcing an inadmissible step shows what a failed certificate looks like.
rot = get_problem("rotation-2")
tr = run("AEG", rot.spec, RunConfig(max_iters=300, certify=True, step_override=1.8, force=True),
         rot.default_x0)
print("\nforced AEG with gamma = 1.8 on rotation-2:")
print(certify_trace(tr).render())
