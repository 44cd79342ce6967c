"""
Last-iterate rates: accelerated methods against FBFS
====================================================

Fit the slope of log|w^k| against log k on the tail of a 10^4-step run.
"""

import numpy as np

from acceg import RunConfig, get_problem, run
from acceg.harness import fit_log_slope

entry = get_problem("rotation-2")
cfg = RunConfig(max_iters=10_000)

for method in ("AEG", "EAG", "APEG", "PEAG"):
    tr = run(method, entry.spec, cfg, entry.default_x0)
    fit = fit_log_slope(tr, tail_fraction=0.5)
    best = fit_log_slope(tr, tail_fraction=0.5, best_iterate=True)
    print(f"{method:5s} last-iterate slope {fit.slope:+.4f}   best-iterate slope {best.slope:+.4f}")

# %%
# FBFS on this instance is not a sublinear method at all. Its iteration
# matrix is (1 - eta^2) I - eta M, with modulus sqrt(1 - eta^2 + eta^4) < 1,
# so the residual decays geometrically and eventually underflows to 0.
tr = run("FBFS", entry.spec, RunConfig(max_iters=10_000, target_residual=np.inf), entry.default_x0)
eta = tr.meta["step"]
print("\nFBFS contraction factor:", np.sqrt(1 - eta**2 + eta**4))
for k in (10, 100, 1000, 5000):
    print(f"  k={k:5d} |w|={tr.rows[k].res_w:.3e}")
print("  best-iterate slope:", fit_log_slope(tr, best_iterate=True).slope)
