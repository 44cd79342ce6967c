import math
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from acceg import AdmissibilityError, Method, admissibility_check, default_step, schedule
from acceg.schedules import (
    aeg_schedule,
    apeg_gamma_bar,
    apeg_schedule,
    baseline_schedule,
    eag_schedule,
    peag_schedule,
)

SQ = math.sqrt


def close(a, b, tol=1e-15):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


# AEG

def test_aeg_k0():
    s = aeg_schedule(0, 1.0, 0.0)
    assert (s.t, s.eta, s.eta_hat) == (2, 1.0, 0.5)
    assert close(s.theta, 1 / 3) and close(s.nu, 2 / 3)


def test_aeg_k5():
    s = aeg_schedule(5, 1.0, 0.0)
    assert s.t == 7 and close(s.eta_hat, 6 / 7) and s.theta == 0.75 and s.nu == 0.875


def test_aeg_with_rho():
    s = aeg_schedule(0, 0.8, 0.1)
    assert close(s.eta, 1.0) and close(s.eta_hat, 0.5)


def test_aeg_rejects_nonpositive_eta():
    with pytest.raises(AdmissibilityError):
        aeg_schedule(0, 0.1, -0.1)
    with pytest.raises(AdmissibilityError):
        aeg_schedule(0, 0.0, 0.1)


# APEG

def test_apeg_examples():
    s = apeg_schedule(0, 0.04, 0.0)
    assert close(s.eta, 0.24) and close(s.eta_hat, 0.12)
    assert close(s.theta, 1 / 3) and close(s.nu, 2 / 3)
    s3 = apeg_schedule(3, 0.04, 0.0)
    assert s3.t == 5 and close(s3.eta_hat, 0.192, 1e-14)
    assert close(apeg_schedule(0, 0.01, 0.05).eta, 0.26, 1e-14)


def test_apeg_rejects_nonpositive_eta():
    with pytest.raises(AdmissibilityError):
        apeg_schedule(0, 0.01, -0.1)


# EAG / PEAG

def test_eag_examples():
    s = eag_schedule(0, 1.0, 0.0)
    assert s.tau == 0.5 and s.eta_hat == 0.5
    s8 = eag_schedule(8, 1.0, 0.0)
    assert close(s8.tau, 0.1) and close(s8.eta_hat, 0.9)
    assert close(eag_schedule(0, 1.0, 0.2).anchor_coefficient, 0.3)


def test_eag_rejects_small_eta():
    with pytest.raises(AdmissibilityError):
        eag_schedule(0, 0.2, 0.1)


def test_peag_examples():
    s = peag_schedule(0, 0.343, 0.0)
    assert s.beta == 0 and s.tau == 0.5 and close(s.eta_hat, 0.1715)
    assert close(peag_schedule(0, 0.343, 0.01).beta, 0.04 * 0.5 / 1.5)
    assert close(peag_schedule(10**8, 0.343, 0.01).beta, 0.04, 1e-7)


def test_peag_rejects_small_eta():
    with pytest.raises(AdmissibilityError):
        peag_schedule(0, 0.04, 0.01)


def test_unused_fields_are_flagged():
    assert "tau" not in aeg_schedule(0, 1.0, 0.0).used
    assert "theta" not in eag_schedule(0, 1.0, 0.0).used
    assert baseline_schedule(3, 0.5).eta_hat == 0.5


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        schedule("AEG", -1, 1.0, 0.0)


# invariants

@pytest.mark.parametrize("method", list(Method))
@pytest.mark.parametrize("k", [0, 1, 7, 999, 123456, 10**6])
def test_telescoping_exact(method, k):
    s = schedule(method, k, 0.3, 0.0)
    s1 = schedule(method, k + 1, 0.3, 0.0)
    assert s.theta * s1.t == s.t - 1
    assert s.nu * s1.t == s.t


@settings(max_examples=300, deadline=None)
@given(k=st.integers(0, 10**6))
def test_telescoping_exact_property(k):
    s = aeg_schedule(k, 1.0, 0.0)
    assert s.theta * (k + 3) == s.t - 1 and s.nu * (k + 3) == s.t
    # theta is the correctly rounded k+1 / k+3
    assert abs(Q(s.theta) - Q(k + 1, k + 3)) <= Q(1, 2**53)


@settings(max_examples=300, deadline=None)
@given(k=st.integers(0, 10**6), gamma=st.floats(1e-3, 1.0), rho=st.floats(0, 0.2))
def test_coupling_identity(k, gamma, rho):
    for s in (aeg_schedule(k, gamma, rho), apeg_schedule(k, gamma, rho)):
        assert math.isclose(s.eta_hat * s.nu, s.eta * s.theta, rel_tol=1e-14)


@settings(max_examples=100, deadline=None)
@given(k=st.integers(0, 10**5))
def test_monotone_limits(k):
    a, b = aeg_schedule(k, 1.0, 0.0), aeg_schedule(k + 1, 1.0, 0.0)
    assert a.theta < b.theta < 1 and a.nu < b.nu <= 1
    assert a.eta_hat < b.eta_hat < b.eta
    e, f = eag_schedule(k, 1.0, 0.0), eag_schedule(k + 1, 1.0, 0.0)
    assert 0 < f.tau < e.tau < 1 and e.eta_hat < f.eta_hat < 1.0


# default steps

def test_default_steps():
    assert default_step("AEG", 1.0, 0.0) == 1.0
    g = default_step("APEG", 1.0, 0.0)
    assert close(g, SQ(29) / 116, 1e-15) and close(16 * 29 * g * g, 1.0, 1e-12)
    assert close(default_step("PEAG", 2.0, 0.0), 0.5 * SQ(2 / 17), 1e-15)
    assert default_step("EAG", 2.0, 0.1) == 0.5
    assert default_step("FBFS", 2.0, 0.0) == 0.25
    assert close(default_step("PFBFS", 2.0, 0.0), 0.15)


def test_default_apeg_saturates():
    for L in (0.5, 1.0, 3.0):
        g = default_step("APEG", L, 0.0)
        lhs = 16 * L**2 * (3 * (3 * g) ** 2 + g * 2 * g)
        assert abs(lhs - 1) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(L=st.floats(0.1, 10), frac=st.floats(0, 0.99))
def test_default_apeg_saturates_with_rho(L, frac):
    rho = frac / (8 * SQ(3) * L)
    g = apeg_gamma_bar(L, rho)
    assert g > 0
    lhs = 16 * L**2 * (3 * (3 * g + 2 * rho) ** 2 + g * (2 * g + rho))
    assert abs(lhs - 1) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(method=st.sampled_from(list(Method)), L=st.floats(0.1, 10), frac=st.floats(-0.9, 0.99))
def test_default_step_is_admissible(method, L, frac):
    rho = frac / (8 * SQ(3) * L)  # strictest smallness condition (APEG)
    if method is Method.EAG and frac < 0:
        rho = 0.0
    step = default_step(method, L, rho)
    adm = admissibility_check(method, L, rho, step)
    assert adm.ok, str(adm)


def test_default_step_errors_name_inequality():
    with pytest.raises(AdmissibilityError, match="2Lρ < 1"):
        default_step("AEG", 1.0, 0.6)
    with pytest.raises(AdmissibilityError, match="8√3·Lρ < 1"):
        default_step("APEG", 1.0, 0.1)
    with pytest.raises(AdmissibilityError, match="2√34·Lρ < 1"):
        default_step("PEAG", 1.0, 0.1)
    with pytest.raises(AdmissibilityError, match="margin"):
        default_step("EAG", 1.0, 0.5)


def test_aeg_default_for_cocoercive():
    L, rho = 1.0, -0.3
    g = default_step("AEG", L, rho)
    # midpoint of (max(-1/L - 2 rho, 0), 1/L - 2 rho] = (0, 1.6]
    assert close(g, 0.8)
    assert admissibility_check("AEG", L, rho, g).ok
    assert -1 < L * (g + 2 * rho) <= 1


# admissibility

def test_admissibility_examples():
    assert admissibility_check("AEG", 1.0, 0.0, 1.0).ok
    assert admissibility_check("APEG", 1.0012, 0.0499, 0.0143).ok
    bad = admissibility_check("PEAG", 1.0050, 0.0990, SQ(2 / 17) / 1.0050)
    assert not bad.ok and "2√34·Lρ < 1" in bad.names()
    v = dict((x.name, x.margin) for x in bad.violated)
    assert math.isclose(1 - v["2√34·Lρ < 1"], 2 * SQ(34) * 1.0050 * 0.0990, rel_tol=1e-12)


def test_admissibility_violations():
    a = admissibility_check("AEG", 1.0, 0.0, 1.5)
    assert a.names() == ["L(2ρ + γ) ≤ 1"] and a.violated[0].margin == pytest.approx(-0.5)
    assert admissibility_check("PEAG", 1.0, 0.0, 0.3).names() == ["η = √(2/17)/L"]
    assert "η ≤ 1/L" in admissibility_check("EAG", 1.0, 0.0, 1.01).names()
    assert "2ρ < η" in admissibility_check("EAG", 1.0, 0.3, 0.5).names()
    assert admissibility_check("FBFS", 1.0, 0.0, 1.0).names() == ["η < 1/L"]
    assert admissibility_check("PFBFS", 1.0, 0.0, 0.34).names() == ["η ≤ 1/(3L)"]
    assert "step > 0" in admissibility_check("AEG", 1.0, 0.0, -1.0).names()
    assert "-1 < L(γ + 2ρ)" in admissibility_check("AEG", 1.0, -2.0, 0.5).names()
    ok = admissibility_check("AEG", 1.0, 0.0, 1.0)
    assert ok.ok and ok.violated == () and str(ok) == "admissible"


@settings(max_examples=300, deadline=None)
@given(method=st.sampled_from(list(Method)), L=st.floats(0.1, 10), rho=st.floats(-0.5, 0.5),
       step=st.floats(1e-4, 5))
def test_ok_iff_no_violations(method, L, rho, step):
    a = admissibility_check(method, L, rho, step)
    assert a.ok == (len(a.violated) == 0)
    for v in a.violated:
        assert v.margin <= 0 or math.isnan(v.margin)
