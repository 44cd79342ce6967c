"""
Synthetic test problems with known Lipschitz constant, co-hypomonotonicity
modulus and solution.

Entries are addressable by name: ``rotation-<dim>``, ``shifted-<mu>-<dim>``
and ``box-bilinear-<n>``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .core import MultivaluedOperator, ProblemSpec, SingleValuedOperator, lipschitz_constant_linear


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: ProblemSpec
    default_x0: np.ndarray
    notes: str = ""

    @property
    def matrix(self):
        return self.spec.F.matrix


def _block_diag(block, reps):
    return np.kron(np.eye(reps), block)


def _unit_x0(dim):
    x0 = np.zeros(dim)
    x0[0] = 1.0
    return x0


def make_rotation(dim=2):
    """Quarter-turn rotations ``(a, b) -> (-b, a)`` on each coordinate pair."""
    if dim < 2 or dim % 2:
        raise ValueError(f"rotation problem needs an even dimension, got {dim}")
    M = _block_diag(np.array([[0.0, -1.0], [1.0, 0.0]]), dim // 2)
    name = f"rotation-{dim}"
    spec = ProblemSpec(
        F=SingleValuedOperator.linear(M, lipschitz_L=1.0),
        T=MultivaluedOperator.zero(),
        rho=0.0,
        dimension=dim,
        known_solution=np.zeros(dim),
        name=name,
    )
    return CorpusEntry(name, spec, _unit_x0(dim), "skew-symmetric orthogonal map: L = 1, rho = 0, x* = 0")


def make_shifted_rotation(mu, dim=2):
    """Blocks ``[[-mu, -1], [1, -mu]]``; not monotone, but co-hypomonotone.

    ``<Mx, x> = -mu |x|^2`` and ``|Mx|^2 = (1 + mu^2)|x|^2``, so the
    tightest modulus is ``rho = mu / (1 + mu^2)`` and ``L = sqrt(1 + mu^2)``.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if dim < 2 or dim % 2:
        raise ValueError(f"shifted rotation needs an even dimension, got {dim}")
    M = _block_diag(np.array([[-mu, -1.0], [1.0, -mu]]), dim // 2)
    name = f"shifted-{mu:g}-{dim}"
    spec = ProblemSpec(
        F=SingleValuedOperator.linear(M, lipschitz_L=math.sqrt(1 + mu * mu)),
        T=MultivaluedOperator.zero(),
        rho=mu / (1 + mu * mu),
        dimension=dim,
        known_solution=np.zeros(dim),
        name=name,
    )
    return CorpusEntry(name, spec, _unit_x0(dim), "rho = mu/(1+mu^2), L = sqrt(1+mu^2); M invertible so x* = 0")


def make_box_bilinear(B, bound=1.0, name=None):
    """Bilinear saddle point ``min_u max_v u^T B v`` over a box.

    ``F(u, v) = (B v, -B^T u)`` and ``T`` is the normal cone of
    ``[-bound, bound]^{2n}``.
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = B.shape[0]
    if B.shape != (n, n):
        raise ValueError("B must be square")
    if not np.all(np.isfinite(B)):
        raise ValueError("B has non-finite entries")
    if not bound > 0:
        raise ValueError("bound must be positive")
    M = np.block([[np.zeros((n, n)), B], [-B.T, np.zeros((n, n))]])
    name = name or f"box-bilinear-{n}"
    spec = ProblemSpec(
        F=SingleValuedOperator.linear(M, lipschitz_L=lipschitz_constant_linear(B)),
        T=MultivaluedOperator.box_normal_cone(-bound * np.ones(2 * n), bound * np.ones(2 * n)),
        rho=0.0,
        dimension=2 * n,
        known_solution=np.zeros(2 * n),
        name=name,
    )
    return CorpusEntry(name, spec, _unit_x0(2 * n), "skew saddle operator plus box normal cone; 0 interior so x* = 0")


def box_bilinear_matrix(n):
    """Deterministic coupling matrix for ``box-bilinear-<n>``."""
    if n == 1:
        return np.eye(1)
    return np.random.default_rng(n).standard_normal((n, n)) / math.sqrt(n)


_NAME_PATTERNS = [
    (re.compile(r"^rotation-(\d+)$"), lambda m: make_rotation(int(m[1]))),
    (re.compile(r"^shifted-([0-9.eE+-]+)-(\d+)$"),
     lambda m: make_shifted_rotation(float(m[1]), int(m[2]))),
    (re.compile(r"^box-bilinear-(\d+)$"),
     lambda m: make_box_bilinear(box_bilinear_matrix(int(m[1])))),
]


def get_problem(name):
    """Build the corpus entry called ``name``."""
    for pattern, build in _NAME_PATTERNS:
        m = pattern.match(name)
        if m:
            entry = build(m)
            return CorpusEntry(name, replace(entry.spec, name=name), entry.default_x0, entry.notes)
    raise KeyError(f"unknown problem {name!r}")


DEFAULT_CORPUS = (
    "rotation-2",
    "rotation-4",
    "shifted-0.05-2",
    "shifted-0.1-2",
    "box-bilinear-1",
    "box-bilinear-3",
)


def corpus(names=DEFAULT_CORPUS):
    return [get_problem(n) for n in names]
