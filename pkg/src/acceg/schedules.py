"""
Per-iteration parameters and step-size admissibility for each method.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import InclusionError


class Method(str, enum.Enum):
    AEG = "AEG"
    APEG = "APEG"
    EAG = "EAG"
    PEAG = "PEAG"
    FBFS = "FBFS"
    PFBFS = "PFBFS"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown method {name!r}") from None


class AdmissibilityError(InclusionError, ValueError):
    """Step-size rule or theorem hypothesis violated."""


# tolerance for the "<=" conditions, so a saturated default is not rejected by rounding
_LE_TOL = 1e-12


@dataclass(frozen=True)
class ScheduleEntry:
    """Parameters of iteration ``k``.

    All fields are filled for every method; ``used`` names the ones the
    method actually reads. ``beta`` is the correction on the anchored
    y-line: ``4 rho (1 - tau)/(1 + tau)`` for PEAG and ``2 rho (1 - tau)``
    for EAG, so both y-lines read ``eta_hat - beta``.
    """

    k: int
    t: float
    theta: float
    nu: float
    eta: float
    eta_hat: float
    gamma: float
    tau: float
    beta: float
    method: Method
    used: frozenset = field(default_factory=frozenset)

    @property
    def anchor_coefficient(self):
        """Coefficient of the residual in the anchored y-update."""
        return self.eta_hat - self.beta


def _base(k):
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    t = k + 2
    return t, (t - 1) / (t + 1), t / (t + 1), 1.0 / (k + 2)


def aeg_schedule(k, gamma, rho):
    if not gamma > 0:
        raise AdmissibilityError(f"gamma must be positive, got {gamma}")
    eta = gamma + 2 * rho
    if not eta > 0:
        raise AdmissibilityError(f"eta = gamma + 2 rho must be positive, got {eta}")
    t, theta, nu, tau = _base(k)
    return ScheduleEntry(
        k=k, t=t, theta=theta, nu=nu, eta=eta, eta_hat=(t - 1) * eta / t,
        gamma=gamma, tau=tau, beta=0.0, method=Method.AEG,
        used=frozenset({"t", "theta", "nu", "eta", "eta_hat", "gamma"}),
    )


def apeg_schedule(k, gamma, rho):
    if not gamma > 0:
        raise AdmissibilityError(f"gamma must be positive, got {gamma}")
    eta = 2 * (3 * gamma + 2 * rho)
    if not eta > 0:
        raise AdmissibilityError(f"eta = 2(3 gamma + 2 rho) must be positive, got {eta}")
    t, theta, nu, tau = _base(k)
    return ScheduleEntry(
        k=k, t=t, theta=theta, nu=nu, eta=eta, eta_hat=(t - 1) * eta / t,
        gamma=gamma, tau=tau, beta=0.0, method=Method.APEG,
        used=frozenset({"t", "theta", "nu", "eta", "eta_hat", "gamma"}),
    )


def eag_schedule(k, eta, rho):
    if not eta > 0:
        raise AdmissibilityError(f"eta must be positive, got {eta}")
    if rho > 0 and not eta > 2 * rho:
        raise AdmissibilityError(f"EAG needs eta > 2 rho, got eta={eta}, rho={rho}")
    t, theta, nu, tau = _base(k)
    return ScheduleEntry(
        k=k, t=t, theta=theta, nu=nu, eta=eta, eta_hat=(1 - tau) * eta,
        gamma=eta, tau=tau, beta=2 * rho * (1 - tau), method=Method.EAG,
        used=frozenset({"eta", "eta_hat", "tau", "beta"}),
    )


def peag_schedule(k, eta, rho):
    if not eta > 0:
        raise AdmissibilityError(f"eta must be positive, got {eta}")
    if rho > 0 and not eta > 4 * rho:
        raise AdmissibilityError(f"PEAG needs eta > 4 rho, got eta={eta}, rho={rho}")
    t, theta, nu, tau = _base(k)
    return ScheduleEntry(
        k=k, t=t, theta=theta, nu=nu, eta=eta, eta_hat=(1 - tau) * eta,
        gamma=eta, tau=tau, beta=4 * rho * (1 - tau) / (1 + tau), method=Method.PEAG,
        used=frozenset({"eta", "eta_hat", "tau", "beta"}),
    )


def baseline_schedule(k, eta, method=Method.FBFS):
    """Constant schedule of FBFS / PFBFS (``eta_hat = eta``)."""
    if not eta > 0:
        raise AdmissibilityError(f"eta must be positive, got {eta}")
    t, theta, nu, tau = _base(k)
    return ScheduleEntry(
        k=k, t=t, theta=theta, nu=nu, eta=eta, eta_hat=eta, gamma=eta, tau=tau,
        beta=1.0, method=Method.parse(method), used=frozenset({"eta", "eta_hat"}),
    )


def schedule(method, k, step, rho):
    """Dispatch to the schedule of ``method``; ``step`` is gamma or eta."""
    method = Method.parse(method)
    if method is Method.AEG:
        return aeg_schedule(k, step, rho)
    if method is Method.APEG:
        return apeg_schedule(k, step, rho)
    if method is Method.EAG:
        return eag_schedule(k, step, rho)
    if method is Method.PEAG:
        return peag_schedule(k, step, rho)
    return baseline_schedule(k, step, method)


def apeg_gamma_bar(L, rho):
    """Largest gamma satisfying the APEG step condition with equality."""
    Lr = L * rho
    return (math.sqrt(29 - 92 * Lr * Lr) - 74 * Lr) / (116 * L)


def default_step(method, L, rho):
    """Default gamma (AEG, APEG) or eta (EAG, PEAG, FBFS, PFBFS)."""
    method = Method.parse(method)
    if not L > 0:
        raise ValueError(f"Lipschitz constant must be positive, got {L}")
    if method is Method.AEG:
        if not 2 * L * rho < 1:
            raise AdmissibilityError(f"AEG needs 2Lρ < 1, got 2Lρ = {2 * L * rho:.6g}")
        if rho < 0:
            lo = max(-1 / L - 2 * rho, 0.0)
            return 0.5 * (lo + (1 / L - 2 * rho))
        return 1 / L - 2 * rho
    if method is Method.APEG:
        if not 8 * math.sqrt(3) * L * rho < 1:
            raise AdmissibilityError(
                f"APEG needs 8√3·Lρ < 1, got {8 * math.sqrt(3) * L * rho:.6g}"
            )
        return apeg_gamma_bar(L, rho)
    if method is Method.EAG:
        margin_rho = 1 - 2 * L * rho
        margin_eta = 1 / L * (1 - 1e-9) - 2 * rho
        if not (margin_rho > 0 and margin_eta > 0):
            raise AdmissibilityError(
                f"EAG needs 2ρ < η = 1/L: margin of 2Lρ < 1 is {margin_rho:.3g}, "
                f"margin of 2ρ < 1/L is {margin_eta:.3g}"
            )
        return 1 / L
    if method is Method.PEAG:
        if not 2 * math.sqrt(34) * L * rho < 1:
            raise AdmissibilityError(
                f"PEAG needs 2√34·Lρ < 1, got {2 * math.sqrt(34) * L * rho:.6g}"
            )
        return math.sqrt(2 / 17) / L
    if method is Method.FBFS:
        return 0.5 / L
    return 0.3 / L


@dataclass(frozen=True)
class Violation:
    name: str
    margin: float


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    violated: tuple = ()

    def names(self):
        return [v.name for v in self.violated]

    def __str__(self):
        if self.ok:
            return "admissible"
        return "; ".join(f"{v.name} (margin {v.margin:.4g})" for v in self.violated)


def admissibility_check(method, L, rho, step):
    """Evaluate the hypotheses of the convergence result for ``method``.

    Violations are returned as data. Each margin is positive when the
    condition holds.
    """
    method = Method.parse(method)
    checks = []  # (name, margin, strict)

    def lt(name, lhs, rhs):
        checks.append((name, rhs - lhs, True))

    def le(name, lhs, rhs):
        checks.append((name, rhs - lhs, False))

    lt("step > 0", 0.0, step)
    Lr = L * rho
    if method is Method.AEG:
        lt("2Lρ < 1", 2 * Lr, 1.0)
        le("L(2ρ + γ) ≤ 1", L * (2 * rho + step), 1.0)
        if rho < 0:
            lt("-1 < L(γ + 2ρ)", -1.0, L * (step + 2 * rho))
    elif method is Method.APEG:
        lt("8√3·Lρ < 1", 8 * math.sqrt(3) * Lr, 1.0)
        g = step
        le(
            "16L²[3(3γ+2ρ)² + γ(2γ+ρ)] ≤ 1",
            16 * L**2 * (3 * (3 * g + 2 * rho) ** 2 + g * (2 * g + rho)),
            1.0,
        )
    elif method is Method.EAG:
        lt("2Lρ < 1", 2 * Lr, 1.0)
        lt("2ρ < η", 2 * rho, step)
        le("η ≤ 1/L", step, 1 / L)
    elif method is Method.PEAG:
        lt("2√34·Lρ < 1", 2 * math.sqrt(34) * Lr, 1.0)
        eta_star = math.sqrt(2 / 17) / L
        # equality within 1e-12 relative, expressed as a <= condition
        checks.append(("η = √(2/17)/L", 1e-12 * eta_star - abs(step - eta_star) - _LE_TOL, False))
        lt("η > 4ρ", 4 * rho, step)
    elif method is Method.FBFS:
        lt("η < 1/L", step, 1 / L)
    else:
        le("η ≤ 1/(3L)", step, 1 / (3 * L))

    violated = []
    for name, margin, strict in checks:
        if (strict and not margin > 0) or (not strict and not margin >= -_LE_TOL):
            violated.append(Violation(name, margin))
    return Admissibility(ok=not violated, violated=tuple(violated))
