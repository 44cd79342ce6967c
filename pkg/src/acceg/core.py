"""
Operators, problems and residuals for inclusions ``0 in F x + T x``.

``F`` is single-valued and Lipschitz; ``T`` is possibly multivalued and is
only ever touched through its resolvent ``J_{eta T} = (I + eta T)^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np


class InclusionError(Exception):
    """Base class for errors raised by this package."""


class ResolventError(InclusionError):
    """The resolvent oracle could not produce a point."""


class SelectionError(InclusionError):
    """No valid element of ``T x0`` could be obtained."""


class ConvergenceError(InclusionError):
    """An inner numerical routine (power iteration, eigensolver) failed."""


class NonFiniteError(InclusionError):
    """An iterate contained NaN or Inf."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class MissingSolutionError(InclusionError):
    """A certificate needs ``x*`` but the problem does not provide one."""


@dataclass(frozen=True)
class SingleValuedOperator:
    """Lipschitz map ``F``.

    ``matrix`` is set for linear operators so that the linear-algebra checks
    (spectral norm, co-hypomonotonicity eigencheck) can be run on it.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    matrix: Optional[np.ndarray] = None

    def __call__(self, x):
        return self.eval(x)

    @classmethod
    def linear(cls, M, lipschitz_L=None):
        M = np.asarray(M, dtype=float)
        if lipschitz_L is None:
            lipschitz_L = lipschitz_constant_linear(M)
        return cls(eval=M.dot, lipschitz_L=float(lipschitz_L), matrix=M)


@dataclass(frozen=True)
class MultivaluedOperator:
    """Set-valued ``T`` described by its resolvent.

    ``resolvent(eta, u)`` must return the unique ``x`` with ``u in x + eta T x``.
    ``selection(x)``, when given, returns some element of ``T x``.
    """

    resolvent: Callable[[float, np.ndarray], np.ndarray]
    selection: Optional[Callable[[np.ndarray], np.ndarray]] = None
    nonexpansive_resolvent: bool = True
    name: str = "T"

    @classmethod
    def zero(cls):
        return cls(
            resolvent=lambda eta, u: u,
            selection=lambda x: np.zeros_like(x),
            name="zero",
        )

    @classmethod
    def box_normal_cone(cls, lower, upper):
        """Normal cone of the box ``[lower, upper]``; its resolvent is the clamp."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)

        def resolvent(eta, u):
            if np.any(lower > upper):
                raise ResolventError("projection onto an empty box")
            return np.clip(u, lower, upper)

        return cls(resolvent=resolvent, name="box-normal-cone")


@dataclass(frozen=True)
class ProblemSpec:
    F: SingleValuedOperator
    T: MultivaluedOperator
    rho: float
    dimension: int
    known_solution: Optional[np.ndarray] = None
    name: str = ""

    @property
    def L(self):
        return self.F.lipschitz_L


@dataclass(frozen=True)
class ResidualPair:
    """``w = F x + xi`` together with the element ``xi`` of ``T x`` it uses."""

    w: np.ndarray
    xi: np.ndarray


@dataclass
class OracleCounts:
    f_evals: int = 0
    resolvent_calls: int = 0

    def reset(self):
        self.f_evals = 0
        self.resolvent_calls = 0


def with_counters(problem):
    """Return a copy of ``problem`` whose oracles increment a shared counter."""
    counts = OracleCounts()
    F, T = problem.F, problem.T

    def f_eval(x):
        counts.f_evals += 1
        return F.eval(x)

    def resolvent(eta, u):
        counts.resolvent_calls += 1
        return T.resolvent(eta, u)

    counted = replace(
        problem,
        F=replace(F, eval=f_eval),
        T=replace(T, resolvent=resolvent),
    )
    return counted, counts


def _check_finite(v, what):
    if not np.isfinite(v).all():
        raise NonFiniteError(f"non-finite entries in {what}")


def resolvent_apply(T, eta, u):
    """Evaluate ``J_{eta T}(u)``, turning oracle failures into ``ResolventError``."""
    if not eta > 0:
        raise ValueError(f"resolvent step must be positive, got {eta}")
    _check_finite(u, "resolvent input")
    try:
        x = T.resolvent(eta, u)
    except ResolventError:
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise ResolventError(f"resolvent oracle of {T.name} failed: {exc}") from exc
    x = np.asarray(x, dtype=float)
    if x.shape != np.shape(u) or not np.isfinite(x).all():
        raise ResolventError(f"resolvent oracle of {T.name} returned an invalid point")
    return x


def natural_residual(problem, eta, x):
    """Forward-backward residual ``(x - J_{eta T}(x - eta F x)) / eta``."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    x = np.asarray(x, dtype=float)
    return (x - resolvent_apply(problem.T, eta, x - eta * problem.F(x))) / eta


def inclusion_residual_norm(problem, pair, x, check=False, tol=1e-10):
    """Norm of ``w = F x + xi``.

    With ``check=True`` the pair is re-validated against ``x`` (one extra
    ``F`` evaluation).
    """
    _check_finite(pair.w, "residual")
    if check:
        expected = problem.F(x) + pair.xi
        if np.linalg.norm(expected - pair.w) > tol * (1 + np.linalg.norm(pair.w)):
            raise ValueError("residual pair was not produced at this x")
    return float(np.linalg.norm(pair.w))


def initial_selection(problem, x0, eta=1.0, tol=1e-10):
    """An element of ``T x0``.

    Uses the problem's selection oracle when present. Otherwise falls back to
    zero, which is accepted only if ``J_{eta T}(x0) = x0``.
    """
    x0 = np.asarray(x0, dtype=float)
    if problem.T.selection is not None:
        xi = np.asarray(problem.T.selection(x0), dtype=float)
        _check_finite(xi, "selection")
        return xi
    fixed = resolvent_apply(problem.T, eta, x0)
    if np.linalg.norm(fixed - x0) > tol * (1 + np.linalg.norm(x0)):
        raise SelectionError(
            "zero is not an element of T x0 (J(x0) != x0); supply a selection oracle"
        )
    return np.zeros_like(x0)


def verify_cohypomonotone_linear(M, rho, tol):
    """Check ``<M x, x> >= -rho ||M x||^2`` for all ``x``.

    Equivalent to ``sym(M) + rho M^T M`` being positive semidefinite; the
    smallest eigenvalue is compared against ``-tol``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("M must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError("M has non-finite entries")
    Q = 0.5 * (M + M.T) + rho * (M.T @ M)
    try:
        lam_min = np.linalg.eigvalsh(Q)[0]
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    return bool(lam_min >= -tol)


def lipschitz_constant_linear(M, rtol=1e-14, max_iter=100_000):
    """Spectral norm of ``M`` by power iteration on ``M^T M``.

    The start vector is deterministic, so repeated calls agree bit for bit.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("M must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError("M has non-finite entries")
    n = M.shape[0]
    # irregular start avoids being orthogonal to the top singular vector by symmetry
    v = 1.0 + np.sqrt(np.arange(1, n + 1, dtype=float))
    v /= np.linalg.norm(v)
    sigma = np.linalg.norm(M @ v)
    if sigma == 0.0 and not np.any(M):
        return 0.0
    for _ in range(max_iter):
        u = M.T @ (M @ v)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = u / nu
        new = np.linalg.norm(M @ v)
        if abs(new - sigma) <= rtol * new:
            return float(new)
        sigma = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")
