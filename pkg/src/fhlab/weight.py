"""The Gaussian weight with a combined root/jump singularity and its moments.

The weight is

    w(x; v, s, alpha) = e^{-x^2} |x - v|^alpha * (s if x < v else 1),

with alpha > -1 and s in [0, 1] (s = 0 truncates the support to [v, oo)).
Power moments mu_k = int x^k w(x) dx are assembled from the two half-line
splits x = v +/- u, whose building blocks

    I_j(c) = int_0^oo u^{alpha + j} e^{-u^2 - c u} du

are seeded from the parabolic cylinder function and propagated by a
three-term recurrence, with a direct-quadrature oracle validating the
result.  Everything is arbitrary precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .mpnum import (
    BigReal,
    DomainError,
    InstabilityError,
    PoleError,
    PrecContext,
    _mp_quad,
    gamma_real,
    pcf_u,
)

__all__ = [
    "FHWeight",
    "ScaledParams",
    "MomentTable",
    "eval_weight",
    "base_integrals",
    "moments",
    "moments_oracle",
]

# weight parameters are pinned once at this precision so that every
# downstream computation, at any working precision, sees the same numbers
_PARAM_PREC = 4096


def as_param(x) -> BigReal:
    """Convert a parameter to a fixed high-precision mpf, once."""
    with mp.workprec(_PARAM_PREC):
        return mpf(x)


@dataclass(frozen=True)
class FHWeight:
    """Parameters (v, s, alpha): singularity location, jump height, root exponent."""

    v: BigReal
    s: BigReal
    alpha: BigReal

    def __post_init__(self):
        object.__setattr__(self, "v", as_param(self.v))
        object.__setattr__(self, "s", as_param(self.s))
        object.__setattr__(self, "alpha", as_param(self.alpha))
        if not self.alpha > -1:
            raise DomainError("alpha must be > -1 for an integrable weight")
        if not (0 <= self.s <= 1):
            raise DomainError("s must lie in [0, 1]")


@dataclass(frozen=True)
class ScaledParams:
    """Scaled parametrization: v = sqrt(2n) t and s = e^{-lam n} (lam=inf -> s=0)."""

    t: BigReal
    lam: BigReal
    n: int

    def __post_init__(self):
        object.__setattr__(self, "t", as_param(self.t))
        lam = mpmath.inf if self.lam == mpmath.inf else as_param(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.n < 1:
            raise DomainError("n must be a positive integer")
        if not self.lam >= 0:
            raise DomainError("lam must be >= 0 (or +inf)")

    def to_weight(self, alpha) -> FHWeight:
        with mp.workprec(_PARAM_PREC):
            v = mpmath.sqrt(2 * mpf(self.n)) * self.t
            s = mpf(0) if self.lam == mpmath.inf else mpmath.exp(-self.lam * self.n)
        return FHWeight(v=v, s=s, alpha=alpha)

    @classmethod
    def from_weight(cls, w: FHWeight, n: int) -> "ScaledParams":
        with mp.workprec(_PARAM_PREC):
            t = w.v / mpmath.sqrt(2 * mpf(n))
            lam = mpmath.inf if w.s == 0 else -mpmath.log(w.s) / n
        return cls(t=t, lam=lam, n=n)


@dataclass(frozen=True)
class MomentTable:
    """Moments mu_0..mu_k_max of a weight, with provenance and error metadata."""

    weight: FHWeight
    k_max: int
    mu: tuple
    method: str  # "recurrence" | "quadrature"
    err_bound: BigReal
    prec_bits: int


def eval_weight(w: FHWeight, x, ctx: Optional[PrecContext] = None) -> BigReal:
    """Evaluate the weight at a real point.

    At x = v the right-limit convention applies: 0 for alpha > 0, e^{-v^2}
    for alpha = 0; alpha < 0 has a pole there.
    """
    prec = ctx.total_bits if ctx is not None else mp.prec
    with mp.workprec(prec):
        x = mpf(x)
        if x == w.v:
            if w.alpha > 0:
                return mpf(0)
            if w.alpha == 0:
                return mpmath.exp(-w.v * w.v)
            raise PoleError("weight unbounded at x = v for alpha < 0")
        jump = w.s if x < w.v else mpf(1)
        return jump * mpmath.exp(-x * x) * abs(x - w.v) ** w.alpha


def _recurrence_guard(ctx: PrecContext, j_max: int) -> int:
    return max(ctx.guard_bits, 32 + 4 * j_max)


def _truncation_radius(logf, start, target_drop, ref):
    """Smallest doubling point where logf has fallen target_drop below ref."""
    U = start
    while logf(U) > ref - target_drop:
        U *= mpf(1.5)
        if U > mpf(2) ** 60:
            raise InstabilityError("integrand truncation did not terminate")
    return U


def _base_integral_quad(alpha, j, c, wp, maxdeg) -> BigReal:
    """Direct quadrature of int_0^oo u^(alpha+j) e^(-u^2 - c u) du.

    Independent cross-check route for the recurrence.  tanh-sinh keeps a
    (1+p) fraction of the working bits at a u^p endpoint, hence the boost
    for negative exponents.
    """
    p = alpha + j
    wp_eff = wp if p >= 0 else int(wp / (1 + float(p))) + 64
    with mp.workprec(wp_eff):
        alpha, c = mpf(alpha), mpf(c)
        aeff = alpha + j

        def logf(u):
            return aeff * mpmath.log(u) - u * u - c * u

        upeak = (-c + mpmath.sqrt(c * c + 8 * aeff)) / 4 if aeff > 0 else mpf(0)
        upeak = max(upeak, -c / 2, mpf(1))
        ref = logf(upeak)
        U = _truncation_radius(logf, 2 * upeak + 2, (wp + 40) * mpmath.log(2), ref)

        def f(u):
            return u ** aeff * mpmath.exp(-u * u - c * u) if u > 0 else mpf(0)

        points = sorted({mpf(0), mpf(1), upeak, 2 * upeak, U})
        points = [q for q in points if q <= U]
        val, err = _mp_quad(f, points, "tanh-sinh", maxdeg)
    return val


def base_integrals(ctx: PrecContext, alpha, c, j_max: int) -> list:
    """I_j(c) = int_0^oo u^(alpha+j) e^(-u^2 - c u) du for j = 0..j_max.

    Seeds come from the parabolic cylinder representation
        I_j = 2^{-(alpha+j+1)/2} Gamma(alpha+j+1) e^{c^2/8} U(alpha+j+1/2, c/sqrt 2);
    the integration-by-parts recurrence 2 I_{j+1} = (alpha+j) I_{j-1} - c I_j
    is run in its subtraction-free direction (upward for c <= 0, downward
    for c > 0).  Three entries are validated against direct quadrature; on
    disagreement the whole table is recomputed by quadrature.
    """
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    guard = _recurrence_guard(ctx, j_max)
    wp = ctx.work_bits + guard
    sctx = PrecContext(wp, guard_bits=64, quad_budget=ctx.quad_budget)
    with mp.workprec(wp + 10):
        alpha = mpf(alpha)
        c = mpf(c)
        if not alpha > -1:
            raise DomainError("alpha must be > -1")

        def seed(j):
            pref = (
                mpf(2) ** (-(alpha + j + 1) / 2)
                * gamma_real(sctx, alpha + j + 1)
                * mpmath.exp(c * c / 8)
            )
            return pref * pcf_u(sctx, alpha + j + mpf("0.5"), c / mpmath.sqrt(2))

        vals = [mpf(0)] * (j_max + 1)
        if c <= 0:
            vals[0] = seed(0)
            if j_max >= 1:
                vals[1] = seed(1)
            for j in range(1, j_max):
                vals[j + 1] = ((alpha + j) * vals[j - 1] - c * vals[j]) / 2
        else:
            hi1 = seed(j_max + 1)
            vals[j_max] = seed(j_max)
            nxt = hi1
            for j in range(j_max, 0, -1):
                prev = (2 * nxt + c * vals[j]) / (alpha + j)
                vals[j - 1] = prev
                nxt = vals[j]

        tol = mpf(2) ** (-(ctx.work_bits // 2) + 8)
        check_js = sorted({0, j_max // 2, j_max})

        def validated(table):
            if any(not x > 0 for x in table):
                return False
            for j in check_js:
                q = _base_integral_quad(alpha, j, c, wp, ctx.max_quad_degree)
                if not abs(table[j] - q) <= tol * abs(q):
                    return False
            return True

        if not validated(vals):
            vals = [
                _base_integral_quad(alpha, j, c, wp, ctx.max_quad_degree)
                for j in range(j_max + 1)
            ]
            if any(not x > 0 for x in vals):
                raise InstabilityError(
                    "base integrals non-positive even from direct quadrature"
                )
        out = [ctx.round(x) for x in vals]
    return out


def _binary_pow(x, m: int):
    if m == 0:
        return mpf(1)
    acc = mpf(1)
    base = x
    while m:
        if m & 1:
            acc *= base
        base *= base
        m >>= 1
    return acc


def _power_list(x, m_max: int) -> list:
    return [_binary_pow(x, m) for m in range(m_max + 1)]


def moments(ctx: PrecContext, w: FHWeight, k_max: int) -> MomentTable:
    """Moments mu_k = int x^k w(x) dx, k = 0..k_max, by the recurrence route.

    Assembly over the two splits x = v -/+ u:
        mu_k = e^{-v^2} [ sum_j C(k,j) v^{k-j} I_j(2v)
                          + s sum_j (-1)^j C(k,j) v^{k-j} I_j(-2v) ].
    Three entries are cross-checked against the quadrature oracle at the
    table's stated error bound, measured against the positive-sum scale so
    the check stays meaningful when terms cancel.
    """
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    guard = _recurrence_guard(ctx, k_max)
    wp = ctx.work_bits + guard
    ictx = PrecContext(wp, guard_bits=64, quad_budget=ctx.quad_budget)
    jm = max(k_max, 1)
    with mp.workprec(wp + 10):
        i_right = base_integrals(ictx, w.alpha, 2 * w.v, jm)
        i_left = None if w.s == 0 else base_integrals(ictx, w.alpha, -2 * w.v, jm)
        vpow = _power_list(w.v, k_max)
        gauss = mpmath.exp(-w.v * w.v)
        mus = []
        scales = []
        for k in range(k_max + 1):
            acc = mpf(0)
            mag = mpf(0)
            for j in range(k + 1):
                b = math.comb(k, j)
                term = b * vpow[k - j] * i_right[j]
                acc += term
                mag += abs(term)
                if i_left is not None:
                    lterm = w.s * b * vpow[k - j] * i_left[j] * (-1 if j % 2 else 1)
                    acc += lterm
                    mag += abs(lterm)
            mus.append(gauss * acc)
            scales.append(gauss * mag)
        if not mus[0] > 0:
            raise InstabilityError("mu_0 <= 0: invalid weight or precision loss")
        err_bound = mpf(2) ** (-(ctx.work_bits // 2) + 8)
        for k in sorted({0, k_max // 2, k_max}):
            q = _moment_quad(ictx, w, k)
            if not abs(mus[k] - q) <= err_bound * max(scales[k], abs(q)):
                raise InstabilityError(
                    "moment recurrence/quadrature mismatch at k=%d" % k
                )
        mus = tuple(ictx.round(x) for x in mus)
    return MomentTable(
        weight=w, k_max=k_max, mu=mus, method="recurrence",
        err_bound=ctx.round(err_bound), prec_bits=wp,
    )


def _moment_quad(ctx: PrecContext, w: FHWeight, k: int) -> BigReal:
    """One moment by direct quadrature on the two splits around v."""
    wp = ctx.total_bits
    alpha_f = float(w.alpha)
    wp_eff = wp if alpha_f >= 0 else int(wp / (1 + alpha_f)) + 64
    with mp.workprec(wp_eff):
        v, s, alpha = w.v, w.s, w.alpha
        drop = (wp + 40) * mpmath.log(2)

        def piece(sign):
            # sign=+1: x = v + u; sign=-1: x = v - u
            def f(u):
                if u <= 0:
                    return mpf(0)
                x = v + sign * u
                return (x ** k if k else mpf(1)) * u ** alpha * mpmath.exp(-x * x)

            def logabsf(u):
                x = v + sign * u
                if x == 0:
                    return mpf(-10**9)
                return (
                    k * mpmath.log(abs(x)) + alpha * mpmath.log(u) - x * x
                )

            upeak = max(mpf(1), -sign * v + mpmath.sqrt(mpf(k) / 2 + 1))
            ref = max(logabsf(upeak), logabsf(mpf(1)))
            U = _truncation_radius(logabsf, 2 * upeak + 2, drop, ref)
            points = sorted({mpf(0), mpf(1), upeak, U})
            points = [q for q in points if q <= U]
            val, err = _mp_quad(f, points, "tanh-sinh", ctx.max_quad_degree)
            return val

        total = piece(+1)
        if s > 0:
            total += s * piece(-1)
    return ctx.round(total)


def moments_oracle(ctx: PrecContext, w: FHWeight, k_max: int) -> MomentTable:
    """Moments by direct singular-endpoint quadrature (independent oracle)."""
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    guard = _recurrence_guard(ctx, k_max)
    ictx = PrecContext(ctx.work_bits + guard, guard_bits=64, quad_budget=ctx.quad_budget)
    mus = tuple(_moment_quad(ictx, w, k) for k in range(k_max + 1))
    if not mus[0] > 0:
        raise InstabilityError("mu_0 <= 0 from quadrature")
    return MomentTable(
        weight=w, k_max=k_max, mu=mus, method="quadrature",
        err_bound=ctx.round(mpf(2) ** (-(ctx.work_bits // 2) + 8)),
        prec_bits=ictx.work_bits,
    )
