"""Hankel determinants, orthogonal-polynomial recurrence data, and the
Christoffel-Darboux kernel of the singular Hermite weight.

The (n+1) x (n+1) Hankel moment matrix (mu_{j+k}) is factored LDL^T without
pivoting; positivity of the weight makes it positive definite, the pivots
are the squared norms h_j of the monic orthogonal polynomials, and the
unit-triangular factor carries their coefficients.  From these come the
three-term recurrence, log H_n = sum log h_j, the diagonal kernel
K_n(x,x), expected counts, and the two differential identities

    d/dv log H_n(v, 0, alpha) = 2 sigma_n(v),
    s d/ds log H_n(v, s, alpha) = int_{-oo}^v K_n(x,x) dx,

which are verified against central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .mpnum import (
    BigReal,
    DomainError,
    NonConvergenceError,
    NonPositivePivotError,
    PrecContext,
    _mp_quad,
)
from .weight import _PARAM_PREC, FHWeight, MomentTable, as_param, eval_weight, moments

__all__ = [
    "OPSystem",
    "PipelineResult",
    "op_system",
    "gue_logdet_exact",
    "eval_p_pair",
    "cd_kernel",
    "expected_count",
    "check_dv_identity",
    "check_ds_identity",
    "pipeline",
    "hankel_logdet",
]


@dataclass(frozen=True)
class OPSystem:
    """Recurrence data of the first n+1 monic orthogonal polynomials.

    h holds h_0..h_n (one past the determinant order: the kernel prefactor
    kappa_{n-1}/kappa_n = sqrt(h_n/h_{n-1}) and the orthonormal p_n need
    h_n).  beta holds beta_0..beta_{n-1}, gamma_sq holds
    gamma_1^2..gamma_{n-1}^2, sigma holds the subleading coefficients
    sigma_0..sigma_n, and log_det = log H_n = sum_{j<n} log h_j.
    """

    n: int
    h: tuple
    beta: tuple
    gamma_sq: tuple
    sigma: tuple
    log_det: BigReal
    prec_bits: int


def op_system(ctx: PrecContext, m: MomentTable, n: int) -> OPSystem:
    """LDL^T factorization of the Hankel matrix (mu_{j+k})_{j,k=0..n}."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if m.k_max < 2 * n:
        raise DomainError("moment table too short: k_max=%d < 2n=%d" % (m.k_max, 2 * n))
    wp = max(ctx.total_bits, m.prec_bits)
    with mp.workprec(wp):
        size = n + 1
        L = [[mpf(0)] * size for _ in range(size)]
        d = [mpf(0)] * size
        for j in range(size):
            acc = m.mu[2 * j]
            for k in range(j):
                acc -= L[j][k] * L[j][k] * d[k]
            if not acc > 0:
                raise NonPositivePivotError(
                    "pivot h_%d <= 0 (insufficient precision or invalid weight)" % j
                )
            d[j] = acc
            for i in range(j + 1, size):
                acc = m.mu[i + j]
                for k in range(j):
                    acc -= L[i][k] * L[j][k] * d[k]
                L[i][j] = acc / d[j]
        sigma = [mpf(0)] + [-L[j][j - 1] for j in range(1, size)]
        beta = [sigma[j] - sigma[j + 1] for j in range(n)]
        gamma_sq = [d[j] / d[j - 1] for j in range(1, n)]
        log_det = mpmath.fsum(mpmath.log(d[j]) for j in range(n))
    return OPSystem(
        n=n,
        h=tuple(d),
        beta=tuple(beta),
        gamma_sq=tuple(gamma_sq),
        sigma=tuple(sigma),
        log_det=log_det,
        prec_bits=wp,
    )


def gue_logdet_exact(ctx: PrecContext, n: int) -> BigReal:
    """log H_n of the pure Gaussian weight: the closed product formula."""
    if n < 1:
        raise DomainError("n must be >= 1")
    with ctx.workprec():
        val = (
            -mpf(n) ** 2 / 2 * mpmath.log(2)
            + mpf(n) / 2 * mpmath.log(2 * mpmath.pi)
            + mpmath.fsum(mpmath.loggamma(j + 1) for j in range(1, n))
        )
    return ctx.round(val)


def eval_p_pair(ctx: PrecContext, sys: OPSystem, m: MomentTable, x):
    """Orthonormal p_n, p_n', p_{n-1}, p_{n-1}' at x via the recurrence."""
    n = sys.n
    with mp.workprec(sys.prec_bits):
        x = mpf(x)
        pi_prev, pi_cur = mpf(0), mpf(1)  # pi_{-1}, pi_0
        dp_prev, dp_cur = mpf(0), mpf(0)
        for j in range(n):
            g2 = sys.gamma_sq[j - 1] if j >= 1 else mpf(0)
            pi_next = (x - sys.beta[j]) * pi_cur - g2 * pi_prev
            dp_next = pi_cur + (x - sys.beta[j]) * dp_cur - g2 * dp_prev
            pi_prev, pi_cur = pi_cur, pi_next
            dp_prev, dp_cur = dp_cur, dp_next
        rn = mpmath.sqrt(sys.h[n])
        rn1 = mpmath.sqrt(sys.h[n - 1])
        return (
            ctx.round(pi_cur / rn),
            ctx.round(dp_cur / rn),
            ctx.round(pi_prev / rn1),
            ctx.round(dp_prev / rn1),
        )


def cd_kernel(ctx: PrecContext, sys: OPSystem, m: MomentTable, w: FHWeight, x) -> BigReal:
    """Diagonal Christoffel-Darboux kernel K_n(x, x) >= 0."""
    pn, dpn, pn1, dpn1 = eval_p_pair(ctx, sys, m, x)
    with mp.workprec(sys.prec_bits):
        pref = mpmath.sqrt(sys.h[sys.n] / sys.h[sys.n - 1])
        val = eval_weight(w, x, ctx) * pref * (dpn * pn1 - pn * dpn1)
    return ctx.round(val)


def _kernel_cutoff_radius(ctx, sys, m, w):
    """Radius beyond which the kernel diagonal is negligible."""
    with mp.workprec(ctx.total_bits):
        n = sys.n
        base = abs(w.v) + mpmath.sqrt(
            mpf("0.8") * ctx.work_bits * mpmath.log(2) + 2 * n * mpmath.log(n + 2) + 40
        )
        R = base + 2
        cut = mpf(2) ** (-ctx.work_bits - 32)
        for _ in range(200):
            hi = abs(cd_kernel(ctx, sys, m, w, R))
            lo = abs(cd_kernel(ctx, sys, m, w, -R)) if w.s > 0 else mpf(0)
            if max(hi, lo) * 4 * R < cut:
                return R
            R *= mpf("1.2")
        raise NonConvergenceError("kernel tail cutoff search failed")


def expected_count(ctx: PrecContext, sys: OPSystem, m: MomentTable, w: FHWeight, upper) -> BigReal:
    """E_n(upper) = int_{-oo}^{upper} K_n(x,x) dx, in [0, n].

    The integral is split at the singular point v; the two pieces touching
    v carry the |x-v|^alpha endpoint and go through the singularity-capable
    rule, the rest through Gauss-Legendre.  Gaussian tails are truncated at
    a radius where the integrand is provably negligible.
    """
    with mp.workprec(ctx.total_bits):
        upper = mpf(upper)
        if upper == mpmath.ninf:
            return mpf(0)
        R = _kernel_cutoff_radius(ctx, sys, m, w)
        v = w.v
        delta = mpf(1)
        hi = min(upper, R) if upper != mpmath.inf else R
        lo = -R if w.s > 0 else v
        if hi <= lo:
            return mpf(0)

        def K(x):
            return cd_kernel(ctx, sys, m, w, x)

        # breakpoints around the singularity
        marks = sorted({lo, v - delta, v, v + delta, hi})
        marks = [p for p in marks if lo <= p <= hi]
        total = mpf(0)
        maxdeg = ctx.max_quad_degree
        for a, b in zip(marks[:-1], marks[1:]):
            if b <= lo or a >= hi or b == a:
                continue
            singular = (b == v and w.alpha != 0) or (a == v and w.alpha != 0)
            if singular:
                val, err = _mp_quad(K, [a, b], "tanh-sinh", maxdeg)
            else:
                val, err = _mp_quad(K, [a, b], "gauss-legendre", maxdeg)
            if not err < mpf(2) ** (-(ctx.work_bits // 2)) * (1 + abs(val)):
                raise NonConvergenceError("kernel integral piece did not converge")
            total += val
    return ctx.round(total)


@dataclass(frozen=True)
class PipelineResult:
    log_det: BigReal
    system: OPSystem
    table: MomentTable
    prec_bits: int


_PIPELINE_CACHE: dict = {}


def _pipeline_once(w: FHWeight, n: int, prec_bits: int, quad_budget: int) -> PipelineResult:
    key = (w.v._mpf_, w.s._mpf_, w.alpha._mpf_, n, prec_bits)
    hit = _PIPELINE_CACHE.get(key)
    if hit is not None:
        return hit
    ctx = PrecContext(prec_bits, guard_bits=64, quad_budget=quad_budget)
    tbl = moments(ctx, w, 2 * n)
    sys = op_system(ctx, tbl, n)
    res = PipelineResult(log_det=sys.log_det, system=sys, table=tbl, prec_bits=prec_bits)
    _PIPELINE_CACHE[key] = res
    return res


def pipeline(
    w: FHWeight,
    n: int,
    prec_bits: Optional[int] = None,
    adaptive: bool = True,
    quad_budget: int = 20000,
) -> PipelineResult:
    """Moment table + OP system + log H_n at adaptive precision.

    Starts at max(256, 24 n) bits; a run is accepted when it agrees with
    the doubled-precision run to 2^(-p/2).  Non-positive pivots double the
    precision and retry, up to three times.
    """
    p = prec_bits if prec_bits is not None else max(256, 24 * n)
    last_exc: Exception | None = None
    for _ in range(4):
        try:
            r1 = _pipeline_once(w, n, p, quad_budget)
            if not adaptive:
                return r1
            r2 = _pipeline_once(w, n, 2 * p, quad_budget)
            with mp.workprec(2 * p):
                ok = abs(r1.log_det - r2.log_det) <= mpf(2) ** (-(p // 2)) * (
                    1 + abs(r2.log_det)
                )
            if ok:
                return r2
            last_exc = NonConvergenceError(
                "pipeline runs at %d and %d bits disagree" % (p, 2 * p)
            )
        except NonPositivePivotError as exc:
            last_exc = exc
        p *= 2
    raise NonConvergenceError("pipeline failed after precision retries") from last_exc


def hankel_logdet(
    w: FHWeight, n: int, prec_bits: Optional[int] = None, adaptive: bool = True
) -> BigReal:
    return pipeline(w, n, prec_bits=prec_bits, adaptive=adaptive).log_det


def check_dv_identity(ctx: PrecContext, w: FHWeight, n: int, step) -> BigReal:
    """|central-difference_v log H_n(v,0,alpha) - 2 sigma_n(v)|; O(step^2)."""
    if w.s != 0:
        raise DomainError("the v-identity requires s = 0")
    h = as_param(step)
    with mp.workprec(_PARAM_PREC):
        vp, vm = w.v + h, w.v - h
    center = _pipeline_once(w, n, ctx.work_bits, ctx.quad_budget)
    plus = _pipeline_once(FHWeight(v=vp, s=0, alpha=w.alpha), n, ctx.work_bits, ctx.quad_budget)
    minus = _pipeline_once(FHWeight(v=vm, s=0, alpha=w.alpha), n, ctx.work_bits, ctx.quad_budget)
    with mp.workprec(ctx.total_bits):
        diff = (plus.log_det - minus.log_det) / (2 * h)
        resid = abs(diff - 2 * center.system.sigma[n])
    return ctx.round(resid)


def check_ds_identity(ctx: PrecContext, w: FHWeight, n: int, step) -> BigReal:
    """|s * central-difference_s log H_n - E_n(v)|; O(step^2)."""
    if not (0 < w.s < 1):
        raise DomainError("the s-identity requires s in (0, 1)")
    h = as_param(step)
    with mp.workprec(_PARAM_PREC):
        sp, sm = w.s + h, w.s - h
    center = _pipeline_once(w, n, ctx.work_bits, ctx.quad_budget)
    plus = _pipeline_once(FHWeight(v=w.v, s=sp, alpha=w.alpha), n, ctx.work_bits, ctx.quad_budget)
    minus = _pipeline_once(FHWeight(v=w.v, s=sm, alpha=w.alpha), n, ctx.work_bits, ctx.quad_budget)
    count = expected_count(ctx, center.system, center.table, w, w.v)
    with mp.workprec(ctx.total_bits):
        diff = w.s * (plus.log_det - minus.log_det) / (2 * h)
        resid = abs(diff - count)
    return ctx.round(resid)
