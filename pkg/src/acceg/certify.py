"""
Potential (Lyapunov) functions and residual bounds, turned into checks.

The AEG/APEG potentials use the coefficient choice ``b_0 = 2 gamma``; the
EAG/PEAG ones use ``b_0 = 1``. Monotonicity and the bounds do not depend on
``b_0`` for the anchored methods since every term scales with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .core import MissingSolutionError
from .schedules import Admissibility, AdmissibilityError, Method

# omega in the PEAG analysis, giving M = 2 (1 + omega) L^2
PEAG_OMEGA = 13.0 / 4.0


def _dot(a, b):
    return float(np.dot(a, b))


def _sq(a):
    return float(np.dot(a, a))


def _x_star(problem):
    if problem.known_solution is None:
        raise MissingSolutionError("potential needs problem.known_solution")
    return problem.known_solution


@dataclass(frozen=True)
class LyapunovCoeffs:
    a: float
    b: float
    c: float
    t: float
    b0: float
    omega: Optional[float] = None
    M: Optional[float] = None


def aeg_coeffs(k, gamma, rho):
    b0 = 2 * gamma
    return LyapunovCoeffs(
        a=b0 * (k + 1) * (gamma * k + 3 * gamma + 2 * rho) / 4,
        b=b0 * (k + 1) * (k + 2) / 2,
        c=0.0,
        t=k + 2,
        b0=b0,
    )


def apeg_coeffs(k, gamma, rho):
    b0 = 2 * gamma
    return LyapunovCoeffs(
        a=b0 * (k + 1) * (gamma * k + 5 * gamma + 2 * rho) / 4,
        b=b0 * (k + 1) * (k + 2) / 2,
        c=b0 * (k + 1) * ((31 * gamma + 20 * rho) * (k + 1) + gamma) / 4,
        t=k + 2,
        b0=b0,
    )


def eag_coeffs(k, eta, rho):
    b = k + 1.0
    return LyapunovCoeffs(
        a=((eta - 2 * rho) * (k + 1) + 2 * rho) * (k + 1) / 2,
        b=b, c=0.0, t=k + 2, b0=1.0,
    )


def peag_coeffs(k, eta, rho, L):
    M = 2 * (1 + PEAG_OMEGA) * L**2
    b = k + 1.0
    return LyapunovCoeffs(
        a=b / 2 * (eta * (k + 1) - 4 * rho * k + 2 * rho * (k - 1) / (k + 3)),
        b=b,
        c=b / 2 * (M * eta**3 * (k + 1) + 8 * rho * (k + 2) ** 2 / (k + 3)),
        t=k + 2, b0=1.0, omega=PEAG_OMEGA, M=M,
    )


def potential_aeg(k, state, problem, gamma, rho):
    """``P_k`` from the state entering AEG iteration ``k``."""
    x_star = _x_star(problem)
    cf = aeg_coeffs(k, gamma, rho)
    w, z, y = state.w_prev, state.z, state.y
    return cf.a * _sq(w) + cf.b * _dot(w, z - y) + _sq(z + cf.t * (y - z) - x_star)


def potential_apeg(k, state, problem, gamma, rho):
    """``P̂_k``; needs the diagnostic ``w^{k-1}`` as well as ``ŵ^{k-1}``."""
    x_star = _x_star(problem)
    if state.w_prev is None:
        raise ValueError("APEG potential needs the diagnostic residual (lazy_diagnostics off)")
    cf = apeg_coeffs(k, gamma, rho)
    w, w_hat, z, y = state.w_prev, state.w_hat, state.z, state.y
    return (
        cf.a * _sq(w)
        + cf.b * _dot(w, z - y)
        + _sq(z + cf.t * (y - z) - x_star)
        + cf.c * _sq(w - w_hat)
    )


def lyapunov_eag(k, state, problem, eta, rho):
    cf = eag_coeffs(k, eta, rho)
    w = state.w
    return cf.a * _sq(w) + cf.b * _dot(w, state.x - state.x0)


def lyapunov_peag(k, state, problem, eta, rho, L):
    if state.w is None:
        raise ValueError("PEAG Lyapunov function needs the diagnostic residual")
    cf = peag_coeffs(k, eta, rho, L)
    w = state.w
    return (
        cf.a * _sq(w)
        + cf.b * _dot(w, state.x - state.x0)
        + cf.c * _sq(w - state.w_hat)
    )


def potential(method, k, state, problem, step, L=None):
    """Dispatch to the potential of ``method``; ``step`` is gamma or eta."""
    method = Method.parse(method)
    rho = problem.rho
    if method is Method.AEG:
        return potential_aeg(k, state, problem, step, rho)
    if method is Method.APEG:
        return potential_apeg(k, state, problem, step, rho)
    if method is Method.EAG:
        return lyapunov_eag(k, state, problem, step, rho)
    if method is Method.PEAG:
        return lyapunov_peag(k, state, problem, step, rho, problem.L if L is None else L)
    raise ValueError(f"no potential function for {method.value}")


def theoretical_bound(method, k, x0_dist, w0_norm, gamma=None, eta=None, rho=0.0):
    """Upper bound on ``||F x^k + xi^k||^2`` after ``k`` iterations.

    ``gamma`` is required for AEG/APEG and ``eta`` for EAG/PEAG.
    """
    method = Method.parse(method)
    d2, r2 = x0_dist**2, w0_norm**2
    if method in (Method.AEG, Method.APEG):
        if gamma is None or not gamma > 0:
            raise AdmissibilityError("bound needs gamma > 0")
        if method is Method.AEG:
            num = 4 * d2 + 8 * gamma * (3 * gamma + 2 * rho) * r2
            return num / (gamma**2 * (k + 2) ** 2)
        num = 4 * d2 + 8 * gamma * (5 * gamma + 2 * rho) * r2
        return num / (gamma**2 * (k + 2) * (k + 4))
    if method is Method.EAG:
        if eta is None or not eta > 2 * rho:
            raise AdmissibilityError("EAG bound needs eta > 2 rho")
        gap = eta - 2 * rho
        return (4 * d2 + 2 * eta * gap * r2) / (gap**2 * (k + 1) ** 2)
    if method is Method.PEAG:
        if eta is None or not eta > 4 * rho:
            raise AdmissibilityError("PEAG bound needs eta > 4 rho")
        gap = eta - 4 * rho
        return (4 * d2 / gap**2 + 2 * (3 * eta - 2 * rho) * r2 / (3 * gap)) / (k + 1) ** 2
    raise ValueError(f"no last-iterate bound for {method.value}")


class MonotoneCheck(NamedTuple):
    ok: bool
    index: Optional[int]
    margin: float


def check_monotone_decrease(series, rel_tol=0.0):
    """Check ``s[i+1] <= s[i] + rel_tol (1 + |s[i]|)`` for every ``i``.

    ``index`` is the first ``i`` that fails; ``margin`` is the smallest
    slack seen (negative on failure).
    """
    s = np.asarray(list(series), dtype=float)
    if s.size == 0:
        raise ValueError("series must be nonempty")
    if s.size == 1:
        return MonotoneCheck(True, None, math.inf)
    slack = s[:-1] + rel_tol * (1 + np.abs(s[:-1])) - s[1:]
    bad = np.flatnonzero(~(slack >= 0))
    first = int(bad[0]) if bad.size else None
    return MonotoneCheck(first is None, first, float(slack.min()))


@dataclass
class CertReport:
    lyapunov_nonincreasing: bool
    lyapunov_first_violation: Optional[int]
    lyapunov_margin: float
    bound_satisfied: bool
    bound_worst_margin: float
    admissibility: Admissibility
    lower_bound_ok: Optional[bool] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.lyapunov_nonincreasing and self.bound_satisfied and self.admissibility.ok

    def summary(self):
        flag = lambda ok: "PASS" if ok else "FAIL"
        lines = [
            f"lyapunov: {flag(self.lyapunov_nonincreasing)}",
            f"bound: {flag(self.bound_satisfied)}",
            f"admissibility: {flag(self.admissibility.ok)}",
        ]
        if self.lower_bound_ok is not None:
            lines.append(f"lower_bound: {flag(self.lower_bound_ok)}")
        return lines

    def render(self):
        lines = self.summary()
        if self.lyapunov_first_violation is not None:
            lines.append(f"first lyapunov violation at row {self.lyapunov_first_violation}")
        lines.append(f"lyapunov min slack: {self.lyapunov_margin:.6g}")
        lines.append(f"bound worst relative slack: {self.bound_worst_margin:.6g}")
        if not self.admissibility.ok:
            lines.append(f"violated: {self.admissibility}")
        lines.extend(self.notes)
        return "\n".join(lines) + "\n"


def aeg_lower_bound_holds(trace, rel_tol=1e-8):
    """``P_k >= gamma^2 (k+1)^2/4 ||w^{k-1}||^2`` along a contiguous AEG trace."""
    gamma = trace.meta["gamma"]
    rows = trace.rows
    prev = 2 * trace.meta["w0_norm"]  # ||w^{-1}|| = 2 ||w^0||
    for i, row in enumerate(rows):
        if row.k != i:
            raise ValueError("lower-bound check needs record_every = 1")
        lower = gamma**2 * (row.k + 1) ** 2 / 4 * prev**2
        if row.lyapunov < lower - rel_tol * (1 + abs(row.lyapunov)):
            return False
        prev = row.res_w
    return True


def certify_trace(trace, rel_tol=1e-8, bound_slack=1e-8):
    """Lyapunov monotonicity and bound satisfaction along a certified trace."""
    rows = trace.rows
    lyap = [r.lyapunov for r in rows if r.lyapunov is not None]
    notes = []
    if lyap:
        mono = check_monotone_decrease(lyap, rel_tol)
    else:
        mono = MonotoneCheck(False, None, math.nan)
        notes.append("no Lyapunov values recorded")

    worst = math.inf
    bound_ok = True
    seen = False
    for r in rows:
        if r.bound is None or r.res_w is None:
            continue
        seen = True
        slack = (r.bound * (1 + bound_slack) - r.res_w**2) / max(r.bound, 1e-300)
        worst = min(worst, slack)
        if slack < 0:
            bound_ok = False
    if not seen:
        bound_ok = False
        notes.append("no bound values recorded")

    lower = None
    if trace.meta.get("method") == Method.AEG.value and lyap and all(
        r.k == i for i, r in enumerate(rows)
    ):
        lower = aeg_lower_bound_holds(trace, rel_tol)
    if trace.aborted:
        notes.append(f"run aborted: {trace.meta['aborted']}")

    return CertReport(
        lyapunov_nonincreasing=mono.ok and not trace.aborted,
        lyapunov_first_violation=mono.index,
        lyapunov_margin=mono.margin,
        bound_satisfied=bound_ok and not trace.aborted,
        bound_worst_margin=worst,
        admissibility=trace.meta["admissibility"],
        lower_bound_ok=lower,
        notes=notes,
    )
