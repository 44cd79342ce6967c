"""
Which method accepts which problem
==================================

The four convergence results need different smallness conditions on L rho.
The shifted rotation with mu = 0.1 sits between them.
"""

import math

from acceg import AdmissibilityError, admissibility_check, default_step, get_problem

for name in ("shifted-0.05-2", "shifted-0.1-2"):
    p = get_problem(name).spec
    Lr = p.L * p.rho
    print(f"\n{name}: 2Lρ={2 * Lr:.3f}  8√3·Lρ={8 * math.sqrt(3) * Lr:.3f}  2√34·Lρ={2 * math.sqrt(34) * Lr:.3f}")
    for m in ("AEG", "EAG", "APEG", "PEAG"):
        try:
            step = default_step(m, p.L, p.rho)
        except AdmissibilityError as exc:
            print(f"  {m:5s} rejected: {exc}")
            continue
        print(f"  {m:5s} step={step:.6g}  {admissibility_check(m, p.L, p.rho, step)}")

# %%
# Violations are data: a step that is too long is reported with its margin.
print("\nAEG, L=1, rho=0, gamma=1.5 ->", admissibility_check("AEG", 1.0, 0.0, 1.5))
