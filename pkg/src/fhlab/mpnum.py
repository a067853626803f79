"""Arbitrary-precision numeric substrate.

Everything downstream (moments, Hankel determinants, equilibrium measures,
tau functions) runs on top of the primitives in this module: a precision
context, the real special functions Gamma / log Barnes-G / zeta'(-1), the
parabolic cylinder function U(a,z) evaluated from its integral
representation, quadrature with algebraic endpoint singularities removed,
and bracketed root finding.

Real numbers are mpmath ``mpf`` values (gmpy-backed when available).  A
``PrecContext`` fixes the binary working precision; every operation takes
the context explicitly, computes with ``work_bits + guard_bits`` and rounds
the result back to ``work_bits``.  Given identical (context, inputs) the
result is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpf

__all__ = [
    "BigReal",
    "PrecContext",
    "DomainError",
    "PoleError",
    "BracketError",
    "NumericsError",
    "NonConvergenceError",
    "BudgetExceededError",
    "InstabilityError",
    "NonPositivePivotError",
    "gamma_real",
    "log_barnes_g",
    "zeta_prime_minus_one",
    "pcf_u",
    "quad_endpoint_singular",
    "quad_tanhsinh",
    "quad_gauss_legendre",
    "bisect_monotone",
    "decimal_digits",
    "to_decimal",
    "from_decimal",
]

# A BigReal is a plain mpf; the producing context is passed alongside where
# needed (serialization, tolerances) rather than wrapped around every value.
BigReal = mpmath.mpf


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation exactly at a non-integrable singular point."""


class BracketError(DomainError):
    """Root bracket endpoints do not enclose a sign change."""


class NumericsError(ArithmeticError):
    """A numeric procedure failed to reach its contracted accuracy."""


class NonConvergenceError(NumericsError):
    """Successive quadrature/bisection refinements disagree at budget."""


class BudgetExceededError(NonConvergenceError):
    """Quadrature budget too small for the requested accuracy."""


class InstabilityError(NumericsError):
    """A recurrence produced inconsistent or non-positive values."""


class NonPositivePivotError(NumericsError):
    """A pivot of a positive-definite factorization came out <= 0."""


@dataclass(frozen=True)
class PrecContext:
    """Binary working precision plus internal guard bits and quad budget.

    quad_budget is the maximum node count a single quadrature call may
    spend; it maps onto the node-doubling depth of the underlying rules.
    """

    work_bits: int = 256
    guard_bits: int = 64
    quad_budget: int = 20000

    def __post_init__(self):
        if self.work_bits < 64:
            raise DomainError("work_bits must be >= 64")
        if self.guard_bits < 32:
            raise DomainError("guard_bits must be >= 32")
        if self.quad_budget < 64:
            raise DomainError("quad_budget must be >= 64")

    @property
    def total_bits(self) -> int:
        return self.work_bits + self.guard_bits

    def with_work_bits(self, bits: int) -> "PrecContext":
        return replace(self, work_bits=bits)

    def workprec(self):
        """Context manager setting mp precision to work+guard bits."""
        return mp.workprec(self.total_bits)

    def round(self, x) -> BigReal:
        """Round a value to work_bits (the externally visible precision)."""
        with mp.workprec(self.work_bits):
            return +mpf(x)

    def eps(self, shift: int = 0) -> BigReal:
        """2^(-work_bits + shift)."""
        return mpf(2) ** (-self.work_bits + shift)

    def half_eps(self, shift: int = 0) -> BigReal:
        """2^(-work_bits//2 + shift), the quadrature-grade tolerance."""
        return mpf(2) ** (-(self.work_bits // 2) + shift)

    @property
    def max_quad_degree(self) -> int:
        # mpmath's rules roughly double their node count per degree level;
        # translate a node budget into a doubling depth.
        return max(6, int(math.log2(max(self.quad_budget, 64) / 8.0)))


def decimal_digits(ctx: PrecContext) -> int:
    return math.ceil(ctx.work_bits * 0.302) + 2


def to_decimal(x, ctx: PrecContext) -> str:
    """Serialize to decimal scientific notation; round-trips to <= 1 ulp."""
    with mp.workprec(ctx.work_bits):
        return mpmath.nstr(mpf(x), decimal_digits(ctx), min_fixed=1, max_fixed=0)


def from_decimal(s: str, ctx: PrecContext) -> BigReal:
    with mp.workprec(ctx.work_bits):
        return mpf(s)


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def gamma_real(ctx: PrecContext, x) -> BigReal:
    """Gamma(x) for x > 0."""
    with ctx.workprec():
        x = mpf(x)
        if not x > 0:
            raise DomainError("gamma_real requires x > 0, got %s" % x)
        val = mpmath.gamma(x)
    return ctx.round(val)


_ZETA_PRIME_CACHE: dict[int, BigReal] = {}


def zeta_prime_minus_one(ctx: PrecContext) -> BigReal:
    """zeta'(-1), the constant term of the log-determinant expansions."""
    wp = ctx.total_bits
    if wp not in _ZETA_PRIME_CACHE:
        with mp.workprec(wp):
            _ZETA_PRIME_CACHE[wp] = mpmath.zeta(-1, derivative=1)
    return ctx.round(_ZETA_PRIME_CACHE[wp])


def log_barnes_g(ctx: PrecContext, x) -> BigReal:
    """log G(x) for x > 0, G the Barnes function with G(1) = G(2) = 1.

    The argument is shifted upward through G(z+1) = Gamma(z) G(z) until the
    large-argument expansion of log G converges below the target precision,
    then the expansion is summed with explicit Bernoulli-number terms.
    """
    wp = ctx.total_bits + 16
    with mp.workprec(wp):
        x = mpf(x)
        if not x > 0:
            raise DomainError("log_barnes_g requires x > 0, got %s" % x)
        target = mpf(16) + mpf(wp) / 8
        shift = int(max(0, mpmath.ceil(target - x)))
        correction = mpf(0)
        for k in range(shift):
            correction += mpmath.loggamma(x + k)
        z = x + shift - 1  # expand log G(z+1)
        log_a = mpf(1) / 12 - zeta_prime_minus_one(ctx.with_work_bits(wp))
        total = (
            z * z / 4
            + z * mpmath.loggamma(z + 1)
            - (z * (z + 1) / 2 + mpf(1) / 12) * mpmath.log(z)
            - log_a
        )
        zsq = z * z
        zpow = zsq
        thresh = mpf(2) ** (-wp)
        prev = mpmath.inf
        for k in range(1, 400):
            term = mpmath.bernoulli(2 * k + 2) / (
                2 * k * (2 * k + 1) * (2 * k + 2) * zpow
            )
            if abs(term) > prev:
                raise NonConvergenceError(
                    "barnes-g asymptotic series diverged before threshold"
                )
            total += term
            if abs(term) < thresh:
                break
            prev = abs(term)
            zpow *= zsq
        else:
            raise NonConvergenceError("barnes-g series did not reach threshold")
        val = total - correction
    return ctx.round(val)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def _mp_quad(f, points, method: str, maxdegree: int):
    """mp.quad wrapper returning (value, error-estimate)."""
    val, err = mp.quad(f, points, method=method, error=True, maxdegree=maxdegree)
    return val, err


def quad_tanhsinh(ctx: PrecContext, f, points: Sequence) -> tuple[BigReal, BigReal]:
    """Tanh-sinh quadrature over consecutive subintervals of `points`.

    Handles integrable algebraic/log endpoint singularities natively; this
    is also the brute-force cross-check rule for the substituted
    Gauss-Legendre routes.
    """
    with ctx.workprec():
        val, err = _mp_quad(f, [mpf(p) for p in points], "tanh-sinh", ctx.max_quad_degree)
    return ctx.round(val), ctx.round(err)


def quad_gauss_legendre(ctx: PrecContext, f, points: Sequence) -> tuple[BigReal, BigReal]:
    """Gauss-Legendre quadrature; integrand must be smooth on each piece."""
    with ctx.workprec():
        val, err = _mp_quad(f, [mpf(p) for p in points], "gauss-legendre", ctx.max_quad_degree)
    return ctx.round(val), ctx.round(err)


def _is_half_integer_exponent(p) -> bool:
    """True when 2p is an integer (sin^2 substitution yields an analytic map)."""
    twop = 2 * mpf(p)
    return abs(twop - mpmath.nint(twop)) < mpf(2) ** (-40)


def quad_endpoint_singular(
    ctx: PrecContext,
    f: Callable,
    a,
    b,
    p_left=0,
    p_right=0,
) -> BigReal:
    """Integrate f over (a,b) where f ~ (x-a)^p_left, (b-x)^p_right at the ends.

    For exponents that are integer multiples of 1/2 the substitution
    x = a + (b-a) sin^2(theta) turns the integrand into an analytic function
    of theta and Gauss-Legendre converges spectrally; other exponents go to
    the tanh-sinh rule directly.  The node-doubling error estimate must land
    below 2^(-work_bits/2) or the call raises.
    """
    with ctx.workprec():
        a, b = mpf(a), mpf(b)
        p_left, p_right = mpf(p_left), mpf(p_right)
        if not (p_left > -1 and p_right > -1):
            raise DomainError("endpoint exponents must be > -1")
        if not b > a:
            raise DomainError("need b > a")
        if _is_half_integer_exponent(p_left) and _is_half_integer_exponent(p_right):
            span = b - a

            def g(theta):
                s = mpmath.sin(theta)
                c = mpmath.cos(theta)
                x = a + span * s * s
                return f(x) * 2 * span * s * c

            val, err = _mp_quad(g, [mpf(0), mp.pi / 2], "gauss-legendre", ctx.max_quad_degree)
        else:
            val, err = _mp_quad(f, [a, b], "tanh-sinh", ctx.max_quad_degree)
        tol = ctx.half_eps() * (1 + abs(val))
        if not err < tol:
            raise NonConvergenceError(
                "quadrature error %s above tolerance %s"
                % (mpmath.nstr(err, 5), mpmath.nstr(tol, 5))
            )
    return ctx.round(val)


# ---------------------------------------------------------------------------
# parabolic cylinder U
# ---------------------------------------------------------------------------


def _log_pcf_integrand(a, z, x):
    return (a - mpf("0.5")) * mpmath.log(x) - x * x / 2 - z * x


def _pcf_singular_piece(a, z, wp):
    """int_0^1 x^(a-1/2) e^(-x^2/2 - z x) dx by exact term-wise integration.

    The entire factor exp(-x^2/2 - z x) = sum c_k x^k with
    (k+1) c_{k+1} = -z c_k - c_{k-1}, so the piece equals
    sum c_k / (a + 1/2 + k).  Removing the algebraic endpoint analytically
    keeps full precision where direct singular quadrature would only
    deliver half.
    """
    half = mpf("0.5")
    c_prev = mpf(1)  # c_0
    c_cur = -z  # c_1
    total = c_prev / (a + half) + c_cur / (a + half + 1)
    hump = 2 * abs(z) + 10
    thresh = mpf(2) ** (-wp - 10)
    small_run = 0  # z=0 zeroes every other coefficient; need a run of small terms
    for k in range(1, 4000):
        c_next = (-z * c_cur - c_prev) / (k + 1)
        term = c_next / (a + half + k + 1)
        total += term
        c_prev, c_cur = c_cur, c_next
        small_run = small_run + 1 if abs(term) < thresh * (1 + abs(total)) else 0
        if k > hump and small_run >= 3:
            return total
    raise NonConvergenceError("pcf_u series piece did not converge")


def pcf_u(ctx: PrecContext, a, z) -> BigReal:
    """Parabolic cylinder U(a, z) for real z and a > -1/2.

    Evaluated from
        U(a,z) = e^{-z^2/4} / Gamma(a+1/2) * int_0^inf x^{a-1/2} e^{-x^2/2 - z x} dx.
    The singular endpoint piece [0,1] is integrated term by term against
    the Maclaurin series of the entire factor; the smooth remainder is
    handled by Gauss-Legendre on geometrically split pieces, truncated
    where the integrand has dropped 2^{-(work+guard)} below its peak.
    """
    wp = ctx.total_bits
    # the series piece alternates with intermediate terms of size ~ e^|z|
    with mp.workprec(wp + 30 + int(3 * abs(float(z)))):
        a, z = mpf(a), mpf(z)
        if not a > mpf("-0.5"):
            raise DomainError("pcf_u requires a > -1/2, got a=%s" % a)
        half = mpf("0.5")
        series = _pcf_singular_piece(a, z, wp)
        # location of the integrand maximum: x (x+z) = a - 1/2
        if a > half:
            xpeak = (-z + mpmath.sqrt(z * z + 4 * (a - half))) / 2
        else:
            xpeak = mpf(0)
        ref = max(
            _log_pcf_integrand(a, z, max(xpeak, mpf(1))),
            _log_pcf_integrand(a, z, mpf(1)),
        )
        drop = (wp + 30) * mpmath.log(2)
        X = max(2 * xpeak + 2, mpf(4), -2 * z)
        while _log_pcf_integrand(a, z, X) > ref - drop:
            X *= 2
            if X > mpf(2) ** 60:
                raise NonConvergenceError("pcf_u truncation failed to terminate")

        def integrand(x):
            return x ** (a - half) * mpmath.exp(-x * x / 2 - z * x)

        points = [mpf(1)]
        while points[-1] < X:
            points.append(min(2 * points[-1], X))
        if xpeak > 1:
            points = sorted(set(points) | {xpeak})
        smooth, err = _mp_quad(integrand, points, "gauss-legendre", ctx.max_quad_degree)
        val = series + smooth
        if not err < abs(val) * ctx.half_eps(-6) + mpf(2) ** (-wp):
            raise BudgetExceededError(
                "pcf_u quadrature error %s too large for work_bits=%d"
                % (mpmath.nstr(err, 5), ctx.work_bits)
            )
        result = mpmath.exp(-z * z / 4) / mpmath.gamma(a + half) * val
    return ctx.round(result)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------


def bisect_monotone(ctx: PrecContext, f: Callable, lo, hi, tol) -> BigReal:
    """Bisection for a continuous monotone f with a sign change on [lo, hi].

    Returns the midpoint of the final bracket, whose width is <= tol.
    """
    with ctx.workprec():
        lo, hi, tol = mpf(lo), mpf(hi), mpf(tol)
        if not hi > lo:
            raise DomainError("need hi > lo")
        if not tol > 0:
            raise DomainError("need tol > 0")
        flo = f(lo)
        fhi = f(hi)
        if flo == 0:
            return ctx.round(lo)
        if fhi == 0:
            return ctx.round(hi)
        if mpmath.sign(flo) == mpmath.sign(fhi):
            raise BracketError(
                "no sign change: f(lo)=%s f(hi)=%s"
                % (mpmath.nstr(flo, 5), mpmath.nstr(fhi, 5))
            )
        max_iter = int(mpmath.ceil(mpmath.log((hi - lo) / tol, 2))) + 4
        if max_iter > 6000:
            raise NonConvergenceError("bisection tolerance unreachable")
        for _ in range(max_iter):
            if hi - lo <= tol:
                break
            mid = (lo + hi) / 2
            fm = f(mid)
            if fm == 0:
                return ctx.round(mid)
            if mpmath.sign(fm) == mpmath.sign(flo):
                lo, flo = mid, fm
            else:
                hi, fhi = mid, fm
        else:
            raise NonConvergenceError("bisection failed to reach tolerance")
        return ctx.round((lo + hi) / 2)
