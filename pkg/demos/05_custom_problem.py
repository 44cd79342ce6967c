"""
Bringing your own operator
==========================

A bilinear game min_u max_v u^T A v over the box [-1, 1]^{2n}, plus a
nonlinear monotone term, written directly against the operator interface.
T is used only through its resolvent (here the clamp).
"""

import numpy as np

from acceg import (
    MultivaluedOperator,
    ProblemSpec,
    RunConfig,
    SingleValuedOperator,
    run,
    with_counters,
)
from acceg.core import natural_residual

rng = np.random.default_rng(0)
n = 5
A = rng.standard_normal((n, n)) / np.sqrt(n)
M = np.block([[np.zeros((n, n)), A], [-A.T, np.zeros((n, n))]])
c = 0.2


def F(x):
    # skew part plus the gradient of the convex c * sum(log cosh(x))
    return M @ x + c * np.tanh(x)


L = np.linalg.norm(M, 2) + c  # crude but valid Lipschitz constant
T = MultivaluedOperator.box_normal_cone(-np.ones(2 * n), np.ones(2 * n))
problem = ProblemSpec(SingleValuedOperator(F, L), T, rho=0.0, dimension=2 * n, name="custom-game")

x0 = np.full(2 * n, 0.5)
counted, counts = with_counters(problem)
tr = run("APEG", counted, RunConfig(max_iters=2000, lazy_diagnostics=True), x0)
print("APEG with lazy diagnostics: oracle calls", counts)
# initialization costs one F (for w^0) and one resolvent (checking that
# xi^0 = 0 is a valid element of T x^0); every step after that costs one of each
print("per iteration after init: F", (counts.f_evals - 1) / 2001, " J", (counts.resolvent_calls - 1) / 2001)

tr = run("AEG", problem, RunConfig(max_iters=2000, natural_residual=True), x0)
last = tr.rows[-1]
print(f"AEG: k={last.k} |w|={last.res_w:.3e} |G x|={last.res_nat:.3e}")
x = tr.meta["final_state"].x
print("solution estimate:", np.round(x, 6))
print("check |G_1 x| =", np.linalg.norm(natural_residual(problem, 1.0, x)))
