"""Tests for the Hankel/orthogonal-polynomial core."""

import math

import mpmath
import numpy as np
import pytest
from mpmath import mp, mpf

from fhlab.mpnum import DomainError, PrecContext
from fhlab.opkernel import (
    cd_kernel,
    check_ds_identity,
    check_dv_identity,
    eval_p_pair,
    expected_count,
    gue_logdet_exact,
    op_system,
    pipeline,
)
from fhlab.weight import FHWeight, moments

CTX = PrecContext(256)


def _sys(v, s, alpha, n, ctx=CTX):
    w = FHWeight(v=v, s=s, alpha=alpha)
    tbl = moments(ctx, w, 2 * n)
    return w, tbl, op_system(ctx, tbl, n)


def test_gue_n1_recurrence_data():
    _, _, sys = _sys(0, 1, 0, 1)
    with mp.workprec(320):
        assert abs(sys.h[0] - mpmath.sqrt(mpmath.pi)) < mpf(10) ** -70
        assert abs(sys.beta[0]) < mpf(10) ** -70
        assert abs(sys.sigma[1]) < mpf(10) ** -70
        # h_1 = mu_2 - mu_1^2/mu_0 = sqrt(pi)/2
        assert abs(sys.h[1] - mpmath.sqrt(mpmath.pi) / 2) < mpf(10) ** -70


def test_gue_n2_logdet():
    _, _, sys = _sys(0, 1, 0, 2)
    with mp.workprec(320):
        assert abs(sys.log_det - mpmath.log(mpmath.pi / 2)) < mpf(10) ** -70


def test_gue_exact_formula_values():
    with mp.workprec(320):
        assert abs(gue_logdet_exact(CTX, 1) - mpmath.log(mpmath.sqrt(mpmath.pi))) < CTX.eps(8)
        assert abs(gue_logdet_exact(CTX, 2) - mpmath.log(mpmath.pi / 2)) < CTX.eps(8)


@pytest.mark.parametrize("n", [5, 12])
def test_gue_oracle_spot_checks(n):
    res = pipeline(FHWeight(v=0, s=1, alpha=0), n, prec_bits=max(256, 24 * n), adaptive=False)
    ref = gue_logdet_exact(PrecContext(max(256, 24 * n)), n)
    with mp.workprec(600):
        assert abs(res.log_det - ref) < mpf(2) ** (-max(256, 24 * n) // 2) * abs(ref)


def test_symmetric_weight_zero_beta_sigma():
    _, _, sys = _sys(0, 1, "0.5", 4)
    for j in range(4):
        assert abs(sys.beta[j]) < mpf(10) ** -60
    for j in range(5):
        assert abs(sys.sigma[j]) < mpf(10) ** -60


def test_gamma_sq_matches_norm_ratios():
    _, _, sys = _sys("0.4", "0.7", "0.5", 5)
    with mp.workprec(320):
        for j in range(1, 5):
            assert abs(sys.gamma_sq[j - 1] - sys.h[j] / sys.h[j - 1]) < mpf(10) ** -60 * abs(
                sys.gamma_sq[j - 1]
            )


def test_op_system_requires_enough_moments():
    w = FHWeight(v=0, s=1, alpha=0)
    tbl = moments(CTX, w, 4)
    with pytest.raises(DomainError):
        op_system(CTX, tbl, 3)


def test_eval_p_pair_gue_n1():
    w, tbl, sys = _sys(0, 1, 0, 1)
    pn, dpn, pn1, dpn1 = eval_p_pair(CTX, sys, tbl, 0)
    assert abs(pn) < mpf(10) ** -70  # odd polynomial at 0
    pn, dpn, _, _ = eval_p_pair(CTX, sys, tbl, 1)
    with mp.workprec(320):
        h1 = mpmath.sqrt(mpmath.pi) / 2
        assert abs(pn - 1 / mpmath.sqrt(h1)) < mpf(10) ** -60


def test_monic_leading_coefficient_by_finite_differences():
    # n-th forward difference of pi_n with step h equals n! h^n exactly
    w, tbl, sys = _sys("0.3", "0.6", "0.5", 4)
    n = 4
    with mp.workprec(320):
        h = mpf(1) / 8
        vals = []
        for i in range(n + 1):
            pn, _, _, _ = eval_p_pair(CTX, sys, tbl, i * h)
            vals.append(pn * mpmath.sqrt(sys.h[n]))  # back to monic
        diff = mpmath.fsum((-1) ** (n - i) * math.comb(n, i) * vals[i] for i in range(n + 1))
        lead = diff / (mpmath.factorial(n) * h**n)
        assert abs(lead - 1) < mpf(10) ** -55


def test_kernel_n1_gaussian():
    w, tbl, sys = _sys(0, 1, 0, 1)
    with mp.workprec(320):
        x = mpf("0.4")
        got = cd_kernel(CTX, sys, tbl, w, x)
        ref = mpmath.exp(-x * x) / mpmath.sqrt(mpmath.pi)
        assert abs(got - ref) < mpf(10) ** -60
    total = expected_count(CTX, sys, tbl, w, mpmath.inf)
    assert abs(total - 1) < mpf(10) ** -30


def test_kernel_positive_on_grid():
    w, tbl, sys = _sys("0.5", "0.3", "0.5", 3)
    with mp.workprec(300):
        for i in range(50):
            x = mpf(-4) + i * mpf("0.16")
            if x == w.v:
                continue
            assert cd_kernel(CTX, sys, tbl, w, x) >= 0


def test_expected_count_reproducing_small():
    w, tbl, sys = _sys("0.7", "0.3", "0.5", 4)
    total = expected_count(CTX, sys, tbl, w, mpmath.inf)
    assert abs(total - 4) < mpf(10) ** -20


def test_expected_count_half_at_symmetric_point():
    w, tbl, sys = _sys(0, 1, 0, 1)
    got = expected_count(CTX, sys, tbl, w, 0)
    assert abs(got - mpf("0.5")) < mpf(10) ** -30


def test_expected_count_limits():
    w, tbl, sys = _sys(0, 1, 0, 2)
    assert expected_count(CTX, sys, tbl, w, mpmath.ninf) == 0
    assert expected_count(CTX, sys, tbl, w, mpmath.inf) <= 2 + mpf(10) ** -30


def test_thinning_monotonicity_in_s():
    vals = []
    for s in ("0.05", "0.3", "0.6", "0.9", "1"):
        res = pipeline(FHWeight(v="0.4", s=s, alpha="0.5"), 4, prec_bits=256, adaptive=False)
        vals.append(res.log_det)
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_dv_identity_small_case():
    ctx = PrecContext(320)
    w = FHWeight(v="0.3", s=0, alpha="0.5")
    r1 = check_dv_identity(ctx, w, 3, "1e-6")
    assert r1 < mpf(10) ** -11
    r2 = check_dv_identity(ctx, w, 3, "5e-7")
    ratio = r2 / r1
    assert mpf("0.15") < ratio < mpf("0.35")


def test_dv_identity_symmetric_vanishes():
    ctx = PrecContext(320)
    w = FHWeight(v=0, s=0, alpha=0)
    _, _, sys = _sys(0, 0, 0, 3, ctx)
    assert abs(sys.sigma[3]) > 0  # half-line weight is asymmetric: sigma != 0
    w2 = FHWeight(v=0, s=1, alpha=0)
    _, _, sys2 = _sys(0, 1, 0, 3, ctx)
    assert abs(sys2.sigma[3]) < mpf(10) ** -60


def test_ds_identity_small_case():
    ctx = PrecContext(320)
    w = FHWeight(v=0, s="0.5", alpha=0)
    r1 = check_ds_identity(ctx, w, 2, "1e-6")
    assert r1 < mpf(10) ** -11
    r2 = check_ds_identity(ctx, w, 2, "5e-7")
    assert mpf("0.15") < r2 / r1 < mpf("0.35")


def _heine_brute_force(v: float, s: float, n: int, nodes: int = 48, radius: float = 7.5):
    """1/n! int Delta(x)^2 prod w(x_i) dx by a literal tensor quadrature sum.

    Composite Gauss-Legendre with the jump point v as a piece boundary;
    all terms are nonnegative so float64 keeps ~13 digits.
    """
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for a, b in ((-radius, v), (v, radius)):
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        x = mid + half * xg
        wq = half * wg * np.exp(-x * x) * np.where(x < v, s, 1.0)
        xs.append(x)
        ws.append(wq)
    X = np.concatenate(xs)
    W = np.concatenate(ws)
    if n == 1:
        return W.sum()
    if n == 2:
        D = (X[:, None] - X[None, :]) ** 2
        return (D * W[:, None] * W[None, :]).sum() / 2.0
    if n == 3:
        D3 = (X[:, None] - X[None, :]) ** 2
        total = 0.0
        for i in range(X.size):
            d = (X[i] - X[:, None]) ** 2 * (X[i] - X[None, :]) ** 2 * D3
            total += W[i] * (d * W[:, None] * W[None, :]).sum()
        return total / 6.0
    if n == 4:
        D = (X[:, None] - X[None, :]) ** 2
        WW = W[:, None] * W[None, :]
        total = 0.0
        for i in range(X.size):
            di = (X[i] - X) ** 2
            for j in range(X.size):
                d = di[j] * (X[i] - X[:, None]) ** 2 * (X[j] - X[:, None]) ** 2
                d = d * (X[i] - X[None, :]) ** 2 * (X[j] - X[None, :]) ** 2 * D
                total += W[i] * W[j] * (d * WW).sum()
        return total / 24.0
    raise ValueError("brute force implemented for n <= 4")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_heine_nfold_integral_consistency(n):
    res = pipeline(FHWeight(v="0.3", s="0.6", alpha=0), n, prec_bits=256, adaptive=False)
    brute = _heine_brute_force(0.3, 0.6, n)
    with mp.workprec(300):
        ours = mpmath.exp(res.log_det)
        assert abs(float(ours) - brute) < 1e-10 * brute


@pytest.mark.slow
def test_heine_nfold_integral_n4():
    res = pipeline(FHWeight(v="0.3", s="0.6", alpha=0), 4, prec_bits=256, adaptive=False)
    brute = _heine_brute_force(0.3, 0.6, 4, nodes=40)
    with mp.workprec(300):
        ours = mpmath.exp(res.log_det)
        assert abs(float(ours) - brute) < 1e-10 * brute
