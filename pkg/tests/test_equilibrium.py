"""Tests for the equilibrium-measure solver and its integral identities."""

import mpmath
import pytest
from mpmath import mp, mpf

from fhlab.mpnum import DomainError, PrecContext
from fhlab.equilibrium import (
    EquilibriumData,
    Regime,
    capital_f,
    capital_f_one_cut_closed,
    check_variational,
    ell_log_form,
    lambda_crit,
    lambda_crit_integral,
    omega_lambda_integral,
    omega_mass,
    one_cut,
    rho,
    semicircle,
    support,
    total_mass,
    two_cut,
)
from fhlab.equilibrium import _lambda_of_b

CTX = PrecContext(256)


def test_one_cut_t0_values():
    eq = one_cut(CTX, 0)
    with mp.workprec(300):
        assert abs(eq.endpoints[0] + 1 / mpmath.sqrt(3)) < mpf(10) ** -70
        assert abs(eq.endpoints[1] - 2 / mpmath.sqrt(3)) < mpf(10) ** -70
        assert abs(eq.ell - (1 + mpmath.log(12))) < mpf(10) ** -70


def test_one_cut_t1_endpoints():
    eq = one_cut(CTX, 1)
    with mp.workprec(300):
        assert abs(eq.endpoints[0] + mpf(1) / 3) < mpf(10) ** -70
        assert abs(eq.endpoints[1] - mpf(5) / 3) < mpf(10) ** -70


@pytest.mark.parametrize("t", ["-0.5", "0", "1.5"])
def test_one_cut_mass(t):
    eq = one_cut(CTX, t)
    assert abs(total_mass(CTX, eq) - 1) < mpf(10) ** -30


def test_lambda_crit_t0_value():
    with mp.workprec(300):
        ref = 2 * mpmath.log(2 + mpmath.sqrt(3))
        assert abs(lambda_crit(CTX, 0) - ref) < mpf(10) ** -70


def test_lambda_crit_small_near_minus_one():
    assert lambda_crit(CTX, "-0.99") < mpf("0.2")


@pytest.mark.parametrize("t", ["-0.5", "0.7", "2"])
def test_lambda_crit_closed_vs_integral(t):
    a = lambda_crit(CTX, t)
    b = lambda_crit_integral(CTX, t)
    assert abs(a - b) < mpf(10) ** -30


def test_two_cut_residuals_and_mass():
    eq = two_cut(CTX, 0, 1)
    a, b, c = eq.endpoints
    with mp.workprec(320):
        assert abs(a + b + c - eq.t) < mpf(10) ** -60
        assert abs(a * a + b * b + c * c - eq.t**2 - 2) < mpf(10) ** -60
        lam_back = _lambda_of_b(CTX, eq.t, b)
        assert abs(lam_back - 1) < mpf(10) ** -30
    assert abs(total_mass(CTX, eq) - 1) < mpf(10) ** -30
    assert a < b < eq.t < c


def test_two_cut_domain_errors():
    with pytest.raises(DomainError):
        two_cut(CTX, "1.5", 1)
    with pytest.raises(DomainError):
        two_cut(CTX, 0, 3)  # above lam_c(0) ~ 2.634
    with pytest.raises(DomainError):
        two_cut(CTX, 0, 0)


def test_two_cut_small_lambda_approaches_semicircle():
    eq = two_cut(CTX, 0, "1e-6")
    a, b, c = eq.endpoints
    assert abs(a + 1) < mpf("1e-3")
    assert abs(c - 1) < mpf("1e-3")
    assert abs(b - eq.t) < mpf("1e-3")
    assert abs(eq.omega - mpf("0.5")) < mpf("1e-3")


def test_two_cut_near_critical_approaches_one_cut():
    lc = lambda_crit(CTX, 0)
    eq = two_cut(CTX, 0, lc - mpf("1e-8"))
    ref = one_cut(CTX, 0)
    a, b, c = eq.endpoints
    assert abs(a - ref.endpoints[0]) < mpf("1e-3")
    assert abs(b - ref.endpoints[0]) < mpf("1e-3")
    assert abs(c - ref.endpoints[1]) < mpf("1e-3")
    assert eq.omega < mpf("1e-6")


def test_b_strictly_decreasing_on_lambda_grid():
    lc = lambda_crit(CTX, 0)
    bs = []
    for i in range(1, 21):
        lam = lc * mpf(i) / 21
        bs.append(two_cut(CTX, 0, lam).endpoints[1])
    assert all(b2 < b1 for b1, b2 in zip(bs, bs[1:]))


def test_omega_decreasing_on_lambda_grid():
    lc = lambda_crit(CTX, 0)
    vals = [two_cut(CTX, 0, lc * mpf(i) / 8).omega for i in range(1, 8)]
    assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))


def test_semicircle_data():
    eq = semicircle(CTX, 0)
    with mp.workprec(300):
        assert abs(eq.ell - (1 + mpmath.log(4))) < mpf(10) ** -70
        assert abs(eq.omega - mpf("0.5")) < mpf(10) ** -70
        assert abs(total_mass(CTX, eq) - 1) < mpf(10) ** -40
        assert omega_mass(CTX, eq) == eq.omega


def test_ell_two_routes_agree():
    eq = two_cut(CTX, 0, 1)
    assert abs(ell_log_form(CTX, eq) - eq.ell) < mpf(10) ** -25


def test_capital_f_semicircle():
    eq = semicircle(CTX, "0.3")
    with mp.workprec(300):
        assert abs(capital_f(CTX, eq) - (mpf(3) / 2 + 2 * mpmath.log(2))) < mpf(10) ** -60


def test_capital_f_one_cut_t0():
    with mp.workprec(300):
        ref = mpf(3) / 2 + mpmath.log(12)
        assert abs(capital_f_one_cut_closed(CTX, 0) - ref) < mpf(10) ** -70
    eq = one_cut(CTX, 0)
    assert abs(capital_f(CTX, eq) - capital_f_one_cut_closed(CTX, 0)) < mpf(10) ** -30


def test_capital_f_one_cut_quad_vs_closed_offcenter():
    eq = one_cut(CTX, "0.5")
    quad_route = capital_f(CTX, eq)
    closed = capital_f_one_cut_closed(CTX, "0.5")
    assert abs(quad_route - closed) < mpf(10) ** -30


def test_density_rejects_outside_support():
    eq = one_cut(CTX, 0)
    with pytest.raises(DomainError):
        rho(eq, eq.t)  # endpoint
    with pytest.raises(DomainError):
        rho(eq, -5)


def test_variational_one_cut():
    eq = one_cut(CTX, 0)
    r_on = check_variational(CTX, eq, "0.5")
    assert abs(r_on) < mpf(10) ** -8
    r_off = check_variational(CTX, eq, 2 * eq.endpoints[1])
    assert r_off < -mpf(10) ** -6
    # at lam = lam_c the inequality touches zero exactly at bbar
    r_bbar = check_variational(CTX, eq, eq.endpoints[0])
    assert abs(r_bbar) < mpf(10) ** -8
    r_gap = check_variational(CTX, eq, (eq.endpoints[0] + eq.t) / 2)
    assert r_gap < -mpf(10) ** -6


def test_variational_two_cut():
    eq = two_cut(CTX, 0, 1)
    a, b, c = eq.endpoints
    assert abs(check_variational(CTX, eq, (a + b) / 2)) < mpf(10) ** -8
    assert abs(check_variational(CTX, eq, (eq.t + c) / 2)) < mpf(10) ** -8
    assert check_variational(CTX, eq, (b + eq.t) / 2) < 0
    assert check_variational(CTX, eq, c + 1) < 0
    assert check_variational(CTX, eq, a - 1) < 0


def test_variational_semicircle():
    eq = semicircle(CTX, 0)
    assert abs(check_variational(CTX, eq, "0.25")) < mpf(10) ** -8
    assert check_variational(CTX, eq, 2) < 0


@pytest.mark.slow
def test_omega_lambda_integral_identity_t0():
    # -int_0^{lam_c} Omega = C_1(0) - (log 3)/2 = -(log 3)/2
    val = omega_lambda_integral(CTX, 0, 96)
    with mp.workprec(300):
        assert abs(val + mpmath.log(3) / 2) < mpf(10) ** -8


def test_half_f_drop_equals_identity_rhs():
    # -(F(t, lam_c) - F(t, 0))/2 reproduces the same constant, by closed forms
    with mp.workprec(300):
        for t in (mpf("-0.5"), mpf(0), mpf("0.5")):
            drop = -(capital_f_one_cut_closed(CTX, t) - (mpf(3) / 2 + 2 * mpmath.log(2))) / 2
            r = mpmath.sqrt(3 + t * t)
            c1 = (
                -2 * t**3 / 27 * (r - t)
                - (mpf(4) / 3 * t * t + mpf(5) / 9 * t * r)
                - mpmath.log((t + r) / mpmath.sqrt(3))
            )
            assert abs(drop - (c1 - mpmath.log(3) / 2)) < mpf(10) ** -60


@pytest.mark.slow
def test_band_mass_rate_lemma():
    # Omega = d/dlam [ ell + int 2x^2 rho ] + lam * d/dlam Omega
    h = mpf("1e-4")
    lam = mpf(1)
    eqs = {d: two_cut(CTX, 0, lam + d * h) for d in (-1, 0, 1)}
    with mp.workprec(300):
        f_plus = capital_f(CTX, eqs[1])
        f_minus = capital_f(CTX, eqs[-1])
        df = (f_plus - f_minus) / (2 * h)
        domega = (eqs[1].omega - eqs[-1].omega) / (2 * h)
        resid = abs(eqs[0].omega - (df + lam * domega))
        assert resid < mpf(10) ** -6


@pytest.mark.slow
def test_omega_as_derivative_lemma():
    # Omega(t, lam) = d/dlam [ F(lam_c)/2 (lam/lam_c)^2 + lam^2 int_lam^lam_c F(u)/u^3 du ]
    sctx = PrecContext(128)
    t = mpf(0)
    lam = mpf(1)
    h = mpf("0.01")
    lc = lambda_crit(sctx, t)
    f_at_lc = capital_f_one_cut_closed(sctx, t)

    def bracket(l):
        from fhlab.equilibrium import _gl_nodes

        with sctx.workprec():
            total = mpf(0)
            for u, wq in _gl_nodes(l, lc, 3):
                total += wq * capital_f(sctx, two_cut(sctx, t, u)) / u**3
            return f_at_lc / 2 * (l / lc) ** 2 + l * l * total

    with mp.workprec(200):
        deriv = (bracket(lam + h) - bracket(lam - h)) / (2 * h)
        omega = two_cut(sctx, t, lam).omega
        assert abs(omega - deriv) < mpf(10) ** -6
