"""
Iteration maps for AEG, APEG, EAG, PEAG and the FBFS / PFBFS baselines.

Every step is a pure function ``(state, sched, problem) -> state``. The
driver :func:`run` strings steps together and records a :class:`Trace`.

Conventions for the state *entering* iteration ``k``:

* AEG / APEG: ``y = y^k``, ``z = z^k``, ``w_prev = w^{k-1}`` (for APEG also
  ``w_hat = ŵ^{k-1}``); ``x``, ``w``, ``xi`` hold the last produced iterate.
* EAG / PEAG: ``x = x^k``, ``w = w^k`` (PEAG: ``w_hat = ŵ^k`` and
  ``Fy_prev = F y^{k-1}``), ``x0`` is the anchor.
* FBFS / PFBFS: ``y = y^k`` (PFBFS: ``Fx_prev = F x^{k-1}``).

Trace row ``k`` always holds ``x^k`` and ``w^k`` with the indexing of the
convergence bounds, so an ``N``-iteration run has ``N + 1`` rows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (
    NonFiniteError,
    initial_selection,
    natural_residual,
    resolvent_apply,
)
from .schedules import (
    AdmissibilityError,
    Method,
    admissibility_check,
    default_step,
    schedule,
)

logger = logging.getLogger(__name__)



def _norm(v):
    # same arithmetic as np.linalg.norm for 1-D input, minus its dispatch overhead
    return math.sqrt(float(np.dot(v, v)))


@dataclass(frozen=True)
class SolverState:
    method: Method
    k: int
    x: np.ndarray
    y: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    w_hat: Optional[np.ndarray] = None
    w_prev: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    x0: Optional[np.ndarray] = None
    Fy_prev: Optional[np.ndarray] = None
    Fx_prev: Optional[np.ndarray] = None
    x_prev: Optional[np.ndarray] = None


@dataclass
class RunConfig:
    max_iters: int = 1000
    target_residual: float = 0.0
    step_override: Optional[float] = None
    record_every: int = 1
    certify: bool = False
    lazy_diagnostics: bool = False
    natural_residual: bool = False
    force: bool = False

    def __post_init__(self):
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass
class TraceRow:
    k: int
    res_w: Optional[float] = None
    res_nat: Optional[float] = None
    dist: Optional[float] = None
    lyapunov: Optional[float] = None
    bound: Optional[float] = None


@dataclass
class Trace:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name):
        return [getattr(r, name) for r in self.rows]

    @property
    def aborted(self):
        return self.meta.get("aborted") is not None


def _finite(k, *arrays):
    for a in arrays:
        if not np.isfinite(a).all():
            raise NonFiniteError(f"non-finite iterate at k={k}", k=k)


# ---------------------------------------------------------------------------
# initialization


def init_state(method, problem, sched0, x0, xi0=None):
    """Initial state for ``method`` from ``x0``.

    ``xi0`` defaults to the problem's selection of ``T x0`` (or zero when
    ``J(x0) = x0``).
    """
    method = Method.parse(method)
    x0 = np.array(x0, dtype=float)
    if x0.shape != (problem.dimension,):
        raise ValueError(f"x0 must have shape ({problem.dimension},), got {x0.shape}")
    _finite(0, x0)
    F = problem.F

    if method in (Method.FBFS, Method.PFBFS):
        state = SolverState(method=method, k=0, x=x0, y=x0)
        if method is Method.PFBFS:
            # x^{-1} := y^0
            state = replace(state, Fx_prev=F(x0), x_prev=x0)
        return state

    if xi0 is None:
        xi0 = initial_selection(problem, x0, eta=sched0.eta)
    xi0 = np.asarray(xi0, dtype=float)
    w0 = F(x0) + xi0

    if method in (Method.AEG, Method.APEG):
        w_m1 = (sched0.eta / sched0.eta_hat) * w0
        state = SolverState(
            method=method, k=0, x=x0, y=x0, z=x0, w=w0, w_prev=w_m1, xi=xi0,
            # virtual x^{-1} making z^0 = x^{-1} - gamma w^{-1} hold
            x_prev=x0 + sched0.gamma * w_m1,
        )
        if method is Method.APEG:
            state = replace(state, w_hat=w_m1)
        return state

    if method is Method.EAG:
        return SolverState(method=method, k=0, x=x0, w=w0, xi=xi0, x0=x0)

    # PEAG: y^{-1} := x^0 and ŵ^0 := w^0
    return SolverState(
        method=method, k=0, x=x0, w=w0, w_hat=w0, xi=xi0, x0=x0, Fy_prev=F(x0)
    )


# ---------------------------------------------------------------------------
# accelerated FBFS and past-FBFS


def aeg_step(state, sched, problem):
    """One AEG iteration: two F evaluations, one resolvent."""
    F = problem.F
    eta, eta_hat = sched.eta, sched.eta_hat
    y, z, w_prev = state.y, state.z, state.w_prev

    Fy = F(y)
    v = y + eta_hat * w_prev
    x = resolvent_apply(problem.T, eta, v - eta * Fy)
    Fx = F(x)
    w = (v - x) / eta + Fx - Fy
    z_next = x - sched.gamma * w
    y_next = z_next + sched.theta * (z_next - z) + sched.nu * (y - z_next)
    _finite(sched.k, x, y_next)
    return replace(
        state, k=sched.k + 1, x=x, y=y_next, z=z_next, w=w, w_prev=w,
        xi=w - Fx, x_prev=x,
    )


def apeg_step(state, sched, problem, diagnostics=True):
    """One APEG iteration: one F evaluation and one resolvent.

    With ``diagnostics`` the true residual ``w^k = ŵ^k + F x^k - F y^k`` is
    also formed, at the price of a second F evaluation.
    """
    F = problem.F
    eta, eta_hat = sched.eta, sched.eta_hat
    y, z = state.y, state.z

    Fy = F(y)
    v = y + eta_hat * state.w_hat
    x = resolvent_apply(problem.T, eta, v - eta * Fy)
    w_hat = (v - x) / eta
    z_next = x - sched.gamma * w_hat
    y_next = z_next + sched.theta * (z_next - z) + sched.nu * (y - z_next)
    _finite(sched.k, x, y_next)
    w = w_hat + F(x) - Fy if diagnostics else None
    return replace(
        state, k=sched.k + 1, x=x, y=y_next, z=z_next, w=w, w_prev=w,
        w_hat=w_hat, xi=w_hat - Fy, x_prev=x,
    )


def eliminated_step(method, state, sched, problem):
    """Momentum form of AEG / APEG with ``z`` eliminated.

    Produces the same ``x`` sequence as :func:`aeg_step` /
    :func:`apeg_step`; kept as an independent cross-check.
    """
    method = Method.parse(method)
    F = problem.F
    eta, eta_hat, gamma = sched.eta, sched.eta_hat, sched.gamma
    theta, nu = sched.theta, sched.nu
    beta = gamma * (1 + theta - nu) - eta * nu
    sigma = gamma * theta - nu * eta_hat
    y, x_prev = state.y, state.x_prev

    if method is Method.AEG:
        w_prev = state.w_prev
        Fy = F(y)
        x = resolvent_apply(problem.T, eta, y - eta * Fy + eta_hat * w_prev)
        Fx = F(x)
        w = (y - x + eta_hat * w_prev) / eta + Fx - Fy
        y_next = x + theta * (x - x_prev) - beta * w + sigma * w_prev - eta * nu * (Fx - Fy)
        _finite(sched.k, x, y_next)
        return replace(state, k=sched.k + 1, x=x, y=y_next, z=None, w=w, w_prev=w,
                       xi=w - Fx, x_prev=x)
    if method is Method.APEG:
        w_hat_prev = state.w_hat
        Fy = F(y)
        x = resolvent_apply(problem.T, eta, y - eta * Fy + eta_hat * w_hat_prev)
        w_hat = (y - x + eta_hat * w_hat_prev) / eta
        y_next = x + theta * (x - x_prev) - beta * w_hat + sigma * w_hat_prev
        _finite(sched.k, x, y_next)
        return replace(state, k=sched.k + 1, x=x, y=y_next, z=None, w=None, w_prev=None,
                       w_hat=w_hat, xi=w_hat - Fy, x_prev=x)
    raise ValueError(f"no eliminated form for {method.value}")


# ---------------------------------------------------------------------------
# anchored (Halpern-type) methods


def eag_step(state, sched, problem):
    """One EAG iteration ``x^k -> x^{k+1}``: two F evaluations, one resolvent."""
    F = problem.F
    eta, eta_hat = sched.eta, sched.eta_hat
    x, w, x0 = state.x, state.w, state.x0

    y = x + sched.tau * (x0 - x) - sched.anchor_coefficient * w
    Fy = F(y)
    v = y - eta * Fy + eta_hat * w
    x_next = resolvent_apply(problem.T, eta, v)
    xi_next = (v - x_next) / eta
    _finite(sched.k, y, x_next)
    w_next = F(x_next) + xi_next
    return replace(state, k=sched.k + 1, x=x_next, y=y, w=w_next, xi=xi_next)


def peag_step(state, sched, problem, diagnostics=True):
    """One PEAG iteration: one F evaluation, one resolvent.

    ``ŵ^{k+1} = (y^k - x^{k+1} + eta_hat ŵ^k) / eta`` equals
    ``F y^k + xi^{k+1}``. With ``diagnostics`` the true residual
    ``w^{k+1} = F x^{k+1} + xi^{k+1}`` costs one more F evaluation.
    """
    F = problem.F
    eta, eta_hat = sched.eta, sched.eta_hat
    x, w_hat, x0 = state.x, state.w_hat, state.x0

    y = x + sched.tau * (x0 - x) - sched.anchor_coefficient * w_hat
    Fy = F(y)
    v = y + eta_hat * w_hat
    x_next = resolvent_apply(problem.T, eta, v - eta * Fy)
    w_hat_next = (v - x_next) / eta
    _finite(sched.k, y, x_next)
    xi_next = w_hat_next - Fy
    w_next = F(x_next) + xi_next if diagnostics else None
    return replace(
        state, k=sched.k + 1, x=x_next, y=y, w=w_next, w_hat=w_hat_next,
        xi=xi_next, Fy_prev=Fy,
    )


# ---------------------------------------------------------------------------
# baselines


def fbfs_step(state, sched, problem):
    """Tseng's forward-backward-forward step with ``eta_hat = eta``."""
    F = problem.F
    eta = sched.eta
    y = state.y
    Fy = F(y)
    u = y - eta * Fy
    x = resolvent_apply(problem.T, eta, u)
    Fx = F(x)
    y_next = x - (sched.eta_hat * Fx - eta * Fy)
    _finite(sched.k, x, y_next)
    xi = (u - x) / eta
    return replace(state, k=sched.k + 1, x=x, y=y_next, w=Fx + xi, xi=xi)


def pfbfs_step(state, sched, problem):
    """Past FBFS: the forward step reuses ``F x^{k-1}``."""
    F = problem.F
    eta = sched.eta
    y, Fx_prev = state.y, state.Fx_prev
    u = y - eta * Fx_prev
    x = resolvent_apply(problem.T, eta, u)
    Fx = F(x)
    y_next = x - (sched.eta_hat * Fx - eta * Fx_prev)
    _finite(sched.k, x, y_next)
    xi = (u - x) / eta
    return replace(state, k=sched.k + 1, x=x, y=y_next, w=Fx + xi, xi=xi,
                   Fx_prev=Fx, x_prev=x)


def step(state, sched, problem, diagnostics=True):
    """Dispatch one iteration of ``state.method``."""
    m = state.method
    if m is Method.AEG:
        return aeg_step(state, sched, problem)
    if m is Method.APEG:
        return apeg_step(state, sched, problem, diagnostics)
    if m is Method.EAG:
        return eag_step(state, sched, problem)
    if m is Method.PEAG:
        return peag_step(state, sched, problem, diagnostics)
    if m is Method.FBFS:
        return fbfs_step(state, sched, problem)
    return pfbfs_step(state, sched, problem)


# methods whose iteration k produces x^k (the others produce x^{k+1})
_PRODUCES_CURRENT = (Method.AEG, Method.APEG, Method.FBFS, Method.PFBFS)


# ---------------------------------------------------------------------------
# driver


def resolve_step(method, problem, config):
    """Pick the step size and check admissibility.

    Returns ``(step, admissibility, warnings)``. Raises
    :class:`AdmissibilityError` when the step is inadmissible and the
    config does not force the run.
    """
    method = Method.parse(method)
    warnings = []
    if config.step_override is not None:
        step_size = float(config.step_override)
    else:
        try:
            step_size = default_step(method, problem.L, problem.rho)
        except AdmissibilityError:
            if not config.force:
                raise
            # fall back to the rho-free rule so a forced run still has a step
            step_size = default_step(method, problem.L, 0.0)
            warnings.append(f"no admissible default step; using {step_size:.6g}")
    adm = admissibility_check(method, problem.L, problem.rho, step_size)
    if not adm.ok:
        if not config.force:
            raise AdmissibilityError(f"{method.value} on {problem.name or 'problem'}: {adm}")
        warnings.append(f"inadmissible parameters forced: {adm}")
    for msg in warnings:
        logger.warning(msg)
    return step_size, adm, warnings


def run(method, problem, config=None, x0=None):
    """Iterate ``method`` on ``problem`` and record a :class:`Trace`.

    Stops after ``config.max_iters`` iterations or once ``||w^k|| <=
    config.target_residual``. A non-finite iterate ends the run; the rows
    recorded so far are kept and ``trace.meta['aborted']`` holds the reason.
    """
    from . import certify as cert

    method = Method.parse(method)
    config = config or RunConfig()
    if x0 is None:
        raise ValueError("x0 is required")
    step_size, adm, warnings = resolve_step(method, problem, config)
    rho = problem.rho
    diagnostics = not config.lazy_diagnostics or config.certify

    certifying = config.certify and method not in (Method.FBFS, Method.PFBFS)
    if config.certify and problem.known_solution is None:
        raise cert.MissingSolutionError("certification needs problem.known_solution")
    x_star = problem.known_solution

    sched0 = schedule(method, 0, step_size, rho)
    state = init_state(method, problem, sched0, x0)

    trace = Trace(meta={
        "method": method.value,
        "problem": problem.name,
        "step": step_size,
        "eta": sched0.eta,
        "gamma": sched0.gamma if method in (Method.AEG, Method.APEG) else None,
        "rho": rho,
        "L": problem.L,
        "admissibility": adm,
        "warnings": warnings,
        "aborted": None,
    })

    d0 = r0 = None
    if x_star is not None:
        d0 = float(_norm(np.asarray(x0, dtype=float) - x_star))
    if state.w is not None:
        r0 = float(_norm(state.w))
    trace.meta["x0_dist"] = d0
    trace.meta["w0_norm"] = r0

    bound_params = {"gamma": sched0.gamma, "eta": sched0.eta, "rho": rho}

    def record(k, st, lyap):
        """Append row ``k`` if due; return True when the target is reached."""
        res_w = float(_norm(st.w)) if st.w is not None else None
        res_nat = None
        if config.natural_residual:
            res_nat = float(_norm(natural_residual(problem, sched0.eta, st.x)))
        dist = float(_norm(st.x - x_star)) if x_star is not None else None
        bound = None
        if certifying:
            bound = cert.theoretical_bound(method, k, d0, r0, **bound_params)
        # an infinite target means "no target"
        stop = res_w is not None and math.isfinite(config.target_residual) and res_w <= config.target_residual
        if stop or k % config.record_every == 0 or k == config.max_iters:
            trace.rows.append(TraceRow(k, res_w, res_nat, dist, lyap, bound))
        return stop

    def lyapunov(k, st):
        if not certifying:
            return None
        return cert.potential(method, k, st, problem, step_size, L=problem.L)

    try:
        # overflow is caught below as a non-finite iterate, so keep numpy quiet
        with np.errstate(over="ignore", invalid="ignore"):
            if method in _PRODUCES_CURRENT:
                for k in range(config.max_iters + 1):
                    lyap = lyapunov(k, state)
                    state = step(state, schedule(method, k, step_size, rho), problem, diagnostics)
                    if record(k, state, lyap):
                        break
            else:
                if not record(0, state, lyapunov(0, state)):
                    for k in range(config.max_iters):
                        state = step(state, schedule(method, k, step_size, rho), problem, diagnostics)
                        if record(k + 1, state, lyapunov(k + 1, state)):
                            break
    except NonFiniteError as exc:
        trace.meta["aborted"] = str(exc)
        logger.warning("run aborted: %s", exc)

    trace.meta["final_state"] = state
    return trace
