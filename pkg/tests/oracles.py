"""
Independent transcriptions used as test oracles.

Nothing here imports the package's step functions. The rational versions
use ``fractions.Fraction`` so the hand-evaluated examples are checked
exactly; the float versions transcribe the implicit (equation-root)
forms, valid when ``T = 0``.
"""

from fractions import Fraction as Q

import numpy as np


def matvec(M, x):
    return [sum(M[i][j] * x[j] for j in range(len(x))) for i in range(len(M))]


def add(*vs):
    return [sum(c) for c in zip(*vs)]


def scale(a, v):
    return [a * c for c in v]


ROT = [[Q(0), Q(-1)], [Q(1), Q(0)]]


def aeg_first_step_exact(gamma, rho, x0, M=ROT):
    """k = 0 of the accelerated FBFS scheme with T = 0, in exact arithmetic."""
    gamma, rho = Q(gamma), Q(rho)
    eta = gamma + 2 * rho
    t = Q(2)
    eta_hat = (t - 1) * eta / t
    theta, nu = (t - 1) / (t + 1), t / (t + 1)
    y = z = list(map(Q, x0))
    w_prev = scale(eta / eta_hat, matvec(M, y))
    x = add(y, scale(-eta, matvec(M, y)), scale(eta_hat, w_prev))
    w = matvec(M, x)
    z1 = add(x, scale(-gamma, w))
    y1 = add(z1, scale(theta, add(z1, scale(-1, z))), scale(nu, add(y, scale(-1, z1))))
    return x, w, z1, y1


def apeg_first_step_exact(gamma, rho, x0, M=ROT):
    gamma, rho = Q(gamma), Q(rho)
    eta = 2 * (3 * gamma + 2 * rho)
    t = Q(2)
    eta_hat = (t - 1) * eta / t
    theta, nu = (t - 1) / (t + 1), t / (t + 1)
    y = z = list(map(Q, x0))
    w_hat_prev = scale(eta / eta_hat, matvec(M, y))
    Fy = matvec(M, y)
    x = add(y, scale(-eta, Fy), scale(eta_hat, w_hat_prev))
    w_hat = scale(1 / eta, add(y, scale(-1, x), scale(eta_hat, w_hat_prev)))
    z1 = add(x, scale(-gamma, w_hat))
    y1 = add(z1, scale(theta, add(z1, scale(-1, z))), scale(nu, add(y, scale(-1, z1))))
    return x, w_hat, z1, y1


def eag_first_step_exact(eta, rho, x0, M=ROT):
    eta, rho = Q(eta), Q(rho)
    tau = Q(1, 2)
    eta_hat = (1 - tau) * eta
    x = list(map(Q, x0))
    w = matvec(M, x)
    y = add(x, scale(tau, add(x, scale(-1, x))), scale(-(eta_hat - 2 * rho * (1 - tau)), w))
    # T = 0: x1 = x + tau (x0 - x) - eta F y + 2 rho (1 - tau) F x
    x1 = add(x, scale(-eta, matvec(M, y)), scale(2 * rho * (1 - tau), w))
    return y, x1


def fbfs_first_step_exact(eta, y0, M=ROT):
    eta = Q(eta)
    y = list(map(Q, y0))
    x = add(y, scale(-eta, matvec(M, y)))
    y1 = add(x, scale(-eta, add(matvec(M, x), scale(-1, matvec(M, y)))))
    return x, y1


# ---------------------------------------------------------------------------
# float transcriptions of the implicit forms (T = 0)


def aeg_equation_form(M, x0, gamma, rho, n):
    """``x^0..x^{n-1}`` from the z-first form with ``xi = 0``.

    z^{k+1} = x^k - gamma F x^k
    y^{k+1} = z^{k+1} + theta_k (z^{k+1} - z^k) + nu_k (y^k - z^{k+1})
    x^{k+1} = y^{k+1} - eta F y^{k+1} + eta_hat_{k+1} F x^k
    with x^0 produced from y^0 = z^0 = x^0 and F x^{-1} := 2 F x^0.
    """
    M = np.asarray(M, float)
    eta = gamma + 2 * rho
    xs = []
    y = z = np.asarray(x0, float)
    Fx_prev = 2 * M @ y
    for k in range(n):
        t = k + 2.0
        eh = (t - 1) * eta / t
        x = y - eta * (M @ y) + eh * Fx_prev
        xs.append(x)
        th, nu = (t - 1) / (t + 1), t / (t + 1)
        z_new = x - gamma * (M @ x)
        y = z_new + th * (z_new - z) + nu * (y - z_new)
        z = z_new
        Fx_prev = M @ x
    return np.array(xs)


def eag_equation_form(M, x0, eta, rho, n):
    """``x^0..x^n`` of the anchored scheme with ``T = 0``."""
    M = np.asarray(M, float)
    anchor = np.asarray(x0, float)
    x = anchor.copy()
    xs = [x]
    for k in range(n):
        tau = 1.0 / (k + 2)
        eh = (1 - tau) * eta
        Fx = M @ x
        y = x + tau * (anchor - x) - (eh - 2 * rho * (1 - tau)) * Fx
        x = x + tau * (anchor - x) - eta * (M @ y) + 2 * rho * (1 - tau) * Fx
        xs.append(x)
    return np.array(xs)


def natural_residual_direct(M, lo, hi, eta, x):
    """Straight-line ``(x - clip(x - eta M x)) / eta``."""
    M = np.asarray(M, float)
    x = np.asarray(x, float)
    u = x - eta * (M @ x)
    p = np.minimum(np.maximum(u, lo), hi)
    return (x - p) / eta
