"""Equilibrium measure for the quadratic field with a step penalty.

The minimizing probability measure for the energy functional with external
field V(x) = 2x^2 + lam*[x < t] lives in one of three regimes:

  * one-cut   (lam >= lam_c(t)):  support [t, cbar], density
                (2/pi)(x - bbar) sqrt(cbar - x)/sqrt(x - t),
                bbar = (t - sqrt(3+t^2))/3,  cbar = (t + 2 sqrt(3+t^2))/3;
  * two-cut   (0 < lam < lam_c(t), |t| < 1):  support [a,b] u [t,c] with
                t = a+b+c,  2 = a^2+b^2+c^2-t^2, and lam pinned by an
                explicit integral; the endpoint b is found by bisection
                using the strict monotonicity of lam(b);
  * semicircle (lam = 0): (2/pi) sqrt(1-x^2) on [-1,1].

The module also evaluates the Euler-Lagrange constant ell, the left-band
mass Omega, the critical rate lam_c(t) in both closed and integral form,
the functional F = ell + int 2x^2 rho, the lam-integral of Omega, and the
variational conditions as a residual check.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .mpnum import (
    BigReal,
    BracketError,
    DomainError,
    NonConvergenceError,
    PrecContext,
    _mp_quad,
)

__all__ = [
    "Regime",
    "EquilibriumData",
    "one_cut",
    "two_cut",
    "semicircle",
    "lambda_crit",
    "lambda_crit_integral",
    "rho",
    "support",
    "total_mass",
    "omega_mass",
    "capital_f",
    "capital_f_one_cut_closed",
    "ell_log_form",
    "omega_lambda_integral",
    "omega_integral_to",
    "check_variational",
]


class Regime(Enum):
    ONE_CUT = "one-cut"
    TWO_CUT = "two-cut"
    SEMICIRCLE = "semicircle"


@dataclass(frozen=True)
class EquilibriumData:
    """Support data, Euler-Lagrange constant and left-band mass.

    endpoints is (bbar, cbar) for ONE_CUT, (a, b, c) for TWO_CUT and
    (-1, 1) for SEMICIRCLE.
    """

    regime: Regime
    t: BigReal
    lam: BigReal
    endpoints: tuple
    ell: BigReal
    omega: BigReal
    prec_bits: int


def _gl(ctx: PrecContext, f, points) -> BigReal:
    val, err = _mp_quad(f, points, "gauss-legendre", ctx.max_quad_degree)
    if not err < (1 + abs(val)) * ctx.half_eps():
        raise NonConvergenceError("gauss-legendre piece did not converge")
    return val


def _ts(ctx: PrecContext, f, points) -> BigReal:
    val, err = _mp_quad(f, points, "tanh-sinh", ctx.max_quad_degree)
    if not err < (1 + abs(val)) * ctx.half_eps():
        raise NonConvergenceError("tanh-sinh piece did not converge")
    return val


def _sin_sq_piece(ctx: PrecContext, g: Callable, lo, hi) -> BigReal:
    """int_lo^hi g with the x = lo + (hi-lo) sin^2(theta) substitution."""
    span = hi - lo

    def f(theta):
        st = mpmath.sin(theta)
        ct = mpmath.cos(theta)
        return g(lo + span * st * st) * 2 * span * st * ct

    return _gl(ctx, f, [mpf(0), mp.pi / 2])


def one_cut(ctx: PrecContext, t) -> EquilibriumData:
    """Single-band data; valid for every lam >= lam_c(t), stored at lam_c."""
    with ctx.workprec():
        t = mpf(t)
        if not t > -1:
            raise DomainError("one-cut regime requires t > -1")
        r = mpmath.sqrt(3 + t * t)
        bbar = (t - r) / 3
        cbar = (t + 2 * r) / 3
        ell = 1 + mpf(2) / 3 * t * (r + 2 * t) + 2 * mpmath.log(2 * (t + r))
        lam = lambda_crit(ctx, t)
        return EquilibriumData(
            regime=Regime.ONE_CUT,
            t=ctx.round(t),
            lam=lam,
            endpoints=(ctx.round(bbar), ctx.round(cbar)),
            ell=ctx.round(ell),
            omega=mpf(0),
            prec_bits=ctx.work_bits,
        )


def semicircle(ctx: PrecContext, t) -> EquilibriumData:
    """lam = 0 data; omega is the semicircle mass left of t."""
    with ctx.workprec():
        t = mpf(t)
        if not (-1 < t < 1):
            raise DomainError("semicircle left-mass needs t in (-1, 1)")
        omega = (2 * mpmath.asin(t) + 2 * t * mpmath.sqrt(1 - t * t) + mpmath.pi) / (
            2 * mpmath.pi
        )
        return EquilibriumData(
            regime=Regime.SEMICIRCLE,
            t=ctx.round(t),
            lam=mpf(0),
            endpoints=(mpf(-1), mpf(1)),
            ell=ctx.round(1 + mpmath.log(4)),
            omega=ctx.round(omega),
            prec_bits=ctx.work_bits,
        )


def lambda_crit(ctx: PrecContext, t) -> BigReal:
    """Critical jump rate lam_c(t), closed form."""
    with ctx.workprec():
        t = mpf(t)
        if not t > -1:
            raise DomainError("lambda_crit requires t > -1")
        r = mpmath.sqrt(3 + t * t)
        q = mpmath.sqrt(3 + t * t + 2 * t * r)
        val = 2 * t / mpmath.sqrt(3) * q + 2 * mpmath.log(
            2 + t * t + t * r + (r + t) / mpmath.sqrt(3) * q
        )
    return ctx.round(val)


def lambda_crit_integral(ctx: PrecContext, t) -> BigReal:
    """lam_c(t) = 4 int_bbar^t sqrt(cbar-x)(x-bbar)/sqrt(t-x) dx (oracle route)."""
    with ctx.workprec():
        t = mpf(t)
        if not t > -1:
            raise DomainError("lambda_crit requires t > -1")
        r = mpmath.sqrt(3 + t * t)
        bbar, cbar = (t - r) / 3, (t + 2 * r) / 3

        def g(x):
            return 4 * mpmath.sqrt(cbar - x) * (x - bbar) / mpmath.sqrt(t - x)

        val = _sin_sq_piece(ctx, g, bbar, t)
    return ctx.round(val)


def _two_cut_companions(t, b):
    """a and c from the endpoint constraints given b."""
    q = mpmath.sqrt(4 - 3 * b * b + 2 * t * b + t * t)
    return (t - b) / 2 - q / 2, (t - b) / 2 + q / 2


def _lambda_of_b(ctx: PrecContext, t, b) -> BigReal:
    """The jump rate pinned by the band gap [b, t] for a trial endpoint b.

    The branch points a and b sit arbitrarily close together near the
    critical rate, so x = a + (b-a) cosh^2(psi) absorbs the root pair
    sqrt((x-a)(x-b)) = (b-a) cosh(psi) sinh(psi) exactly, and
    psi = psi_t sin^2(phi) removes the remaining 1/sqrt(t-x) endpoint;
    t - x is evaluated through sinh(psi_t - psi) sinh(psi_t + psi) to
    avoid cancellation.  The phi-integrand is analytic uniformly in b.
    """
    a, c = _two_cut_companions(t, b)
    delta = b - a
    psi_t = mpmath.acosh(mpmath.sqrt((t - a) / delta))

    def f(phi):
        sphi, cphi = mpmath.sin(phi), mpmath.cos(phi)
        psi = psi_t * sphi * sphi
        ch, sh = mpmath.cosh(psi), mpmath.sinh(psi)
        x = a + delta * ch * ch
        t_minus_x = delta * mpmath.sinh(psi_t * cphi * cphi) * mpmath.sinh(psi_t + psi)
        dx = 2 * delta * ch * sh * (2 * psi_t * sphi * cphi)
        return 4 * mpmath.sqrt(c - x) * (delta * ch * sh) / mpmath.sqrt(t_minus_x) * dx

    return _gl(ctx, f, [mpf(0), mp.pi / 2])


def _band_quad_left(ctx: PrecContext, t, endpoints, g) -> BigReal:
    """int_a^b g(x) rho(x) dx on the left band of the two-cut regime.

    The substitution b - x = tau sinh^2(psi) (tau = t - b) turns
    sqrt(b-x)/sqrt(t-x) into tanh(psi) even when the branch point t hugs
    b; psi = psi_a sin^2(phi) then removes the sqrt(x-a) endpoint.
    """
    a, b, c = endpoints
    tau = t - b
    psi_a = mpmath.asinh(mpmath.sqrt((b - a) / tau))
    two_over_pi = 2 / mpmath.pi

    def f(phi):
        sphi, cphi = mpmath.sin(phi), mpmath.cos(phi)
        psi = psi_a * sphi * sphi
        ch, sh = mpmath.cosh(psi), mpmath.sinh(psi)
        x = b - tau * sh * sh
        x_minus_a = tau * mpmath.sinh(psi_a * cphi * cphi) * mpmath.sinh(psi_a + psi)
        dens = two_over_pi * mpmath.sqrt(c - x) * mpmath.tanh(psi) * mpmath.sqrt(x_minus_a)
        dx = 2 * tau * sh * ch * (2 * psi_a * sphi * cphi)
        return g(x) * dens * dx

    return _gl(ctx, f, [mpf(0), mp.pi / 2])


def _band_quad_right(ctx: PrecContext, t, endpoints, g) -> BigReal:
    """int_t^c g(x) rho(x) dx on the right band of the two-cut regime.

    x - t = tau sinh^2(psi) gives rho dx proportional to cosh^2(psi)
    (the 1/sqrt(x-t) endpoint cancels against sqrt(x-b) for any gap
    width); psi = psi_c sin^2(phi) removes the sqrt(c-x) endpoint.
    """
    a, b, c = endpoints
    tau = t - b
    psi_c = mpmath.asinh(mpmath.sqrt((c - t) / tau))
    two_over_pi = 2 / mpmath.pi

    def f(phi):
        sphi, cphi = mpmath.sin(phi), mpmath.cos(phi)
        psi = psi_c * sphi * sphi
        ch, sh = mpmath.cosh(psi), mpmath.sinh(psi)
        x = t + tau * sh * sh
        c_minus_x = tau * mpmath.sinh(psi_c * cphi * cphi) * mpmath.sinh(psi_c + psi)
        pref = two_over_pi * mpmath.sqrt(c_minus_x) * mpmath.sqrt(x - a)
        jac = 2 * tau * ch * ch * (2 * psi_c * sphi * cphi)
        return g(x) * pref * jac

    return _gl(ctx, f, [mpf(0), mp.pi / 2])


def _illinois(f, lo, hi, flo, fhi, tol, max_iter=300):
    """Bracketed regula falsi (Illinois variant): superlinear, keeps the bracket."""
    side = 0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        x = (lo * fhi - hi * flo) / (fhi - flo)
        if not (lo < x < hi):
            x = (lo + hi) / 2
        fx = f(x)
        if fx == 0:
            return x
        if mpmath.sign(fx) == mpmath.sign(flo):
            lo, flo = x, fx
            if side == -1:
                fhi /= 2
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo /= 2
            side = 1
    else:
        raise NonConvergenceError("endpoint solve did not converge")
    return (lo + hi) / 2


def _solve_b(ctx: PrecContext, t, lam, bracket=None) -> BigReal:
    """Endpoint b with lam(b) = lam, by bracketed two-stage root finding.

    A coarse pass at reduced precision shrinks the bracket cheaply; the
    refinement then runs at the caller's precision.  An optional bracket
    hint (from a neighbouring solve) skips the full-span search.
    """
    r = mpmath.sqrt(3 + t * t)
    bbar = (t - r) / 3
    span = t - bbar
    nudge = span * mpf(10) ** -12
    if bracket is None:
        lo, hi = bbar + nudge, t - nudge
    else:
        lo, hi = bracket
        lo = max(lo, bbar + nudge)
        hi = min(hi, t - nudge)
    coarse = PrecContext(
        min(128, ctx.work_bits), guard_bits=64, quad_budget=ctx.quad_budget
    )
    with coarse.workprec():
        g = lambda b: lam - _lambda_of_b(coarse, t, b)  # increasing in b
        glo, ghi = g(lo), g(hi)
        if not (glo < 0 < ghi):
            raise BracketError("lam(b) bracket failed")
        ctol = span * mpf(2) ** -44
        b0 = _illinois(g, lo, hi, glo, ghi, ctol)
    with ctx.workprec():
        w = span * mpf(2) ** -42
        lo2, hi2 = b0 - w, b0 + w
        g2 = lambda b: lam - _lambda_of_b(ctx, t, b)
        glo2, ghi2 = g2(lo2), g2(hi2)
        if not (glo2 < 0 < ghi2):  # coarse solve landed on the tolerance edge
            lo2, hi2, glo2, ghi2 = lo, hi, g2(lo), g2(hi)
        tol = span * mpf(2) ** (-(ctx.work_bits // 2) - 16)
        return _illinois(g2, lo2, hi2, glo2, ghi2, tol)


def _validate_two_cut_domain(ctx, t, lam):
    if not (-1 < t < 1):
        raise DomainError("two-cut regime requires t in (-1, 1)")
    lc = lambda_crit(ctx, t)
    if not (0 < lam < lc):
        raise DomainError(
            "two-cut regime requires 0 < lam < lam_c(t) = %s" % mpmath.nstr(lc, 10)
        )


def two_cut(ctx: PrecContext, t, lam) -> EquilibriumData:
    """Two-band data for |t| < 1 and 0 < lam < lam_c(t).

    lam(b) is strictly decreasing on (bbar, t), so a bracketed solve on b
    is guaranteed; a and c then follow from the closed-form constraints.
    """
    with ctx.workprec():
        t = mpf(t)
        lam = mpf(lam)
        _validate_two_cut_domain(ctx, t, lam)
        b = _solve_b(ctx, t, lam)
        a, c = _two_cut_companions(t, b)
        ell = _ell_two_cut_tail(ctx, t, a, b, c)
        omega = _band_quad_left(ctx, t, (a, b, c), lambda x: mpf(1))
        return EquilibriumData(
            regime=Regime.TWO_CUT,
            t=ctx.round(t),
            lam=ctx.round(lam),
            endpoints=(ctx.round(a), ctx.round(b), ctx.round(c)),
            ell=ctx.round(ell),
            omega=ctx.round(omega),
            prec_bits=ctx.work_bits,
        )


def _ell_two_cut_tail(ctx: PrecContext, t, a, b, c) -> BigReal:
    """Euler-Lagrange constant from the tail-integral form.

    ell = -2 log c + 2 c^2
          + int_c^oo (4x - 2/x - 4 sqrt((x-c)(x-b)(x-a))/sqrt(x-t)) dx;
    the integrand decays like 1/x^2, so the far tail is mapped through
    u = 1/x onto a finite interval where it is analytic.
    """

    def h(x):
        return 4 * x - 2 / x - 4 * mpmath.sqrt(x - c) * mpmath.sqrt(x - b) * mpmath.sqrt(
            x - a
        ) / mpmath.sqrt(x - t)

    C = 2 * max(c, mpf(1)) + 1
    near = _sin_sq_piece(ctx, h, c, C)

    def tail(u):
        return h(1 / u) / (u * u)

    far = _gl(ctx, tail, [mpf(0), 1 / C])
    return -2 * mpmath.log(c) + 2 * c * c + near + far


def support(eq: EquilibriumData) -> list:
    if eq.regime is Regime.ONE_CUT:
        return [(eq.t, eq.endpoints[1])]
    if eq.regime is Regime.TWO_CUT:
        a, b, c = eq.endpoints
        return [(a, b), (eq.t, c)]
    return [(eq.endpoints[0], eq.endpoints[1])]


def rho(eq: EquilibriumData, x) -> BigReal:
    """Density at a point strictly inside the support."""
    x = mpf(x)
    if not any(lo < x < hi for lo, hi in support(eq)):
        raise DomainError("density evaluated outside the open support")
    two_over_pi = 2 / mpmath.pi
    if eq.regime is Regime.ONE_CUT:
        bbar, cbar = eq.endpoints
        return two_over_pi * (x - bbar) * mpmath.sqrt(cbar - x) / mpmath.sqrt(x - eq.t)
    if eq.regime is Regime.TWO_CUT:
        a, b, c = eq.endpoints
        if x > eq.t:
            ratio = mpmath.sqrt(x - b) / mpmath.sqrt(x - eq.t)
        else:
            ratio = mpmath.sqrt(b - x) / mpmath.sqrt(eq.t - x)
        return two_over_pi * mpmath.sqrt(c - x) * ratio * mpmath.sqrt(x - a)
    return two_over_pi * mpmath.sqrt(1 - x * x)


def _rho_weighted(ctx: PrecContext, eq: EquilibriumData, g) -> BigReal:
    """int_S g(x) rho(x) dx with the regime-appropriate substitutions."""
    if eq.regime is Regime.TWO_CUT:
        return _band_quad_left(ctx, eq.t, eq.endpoints, g) + _band_quad_right(
            ctx, eq.t, eq.endpoints, g
        )
    total = mpf(0)
    for lo, hi in support(eq):
        total += _sin_sq_piece(ctx, lambda x: g(x) * rho(eq, x), lo, hi)
    return total


def total_mass(ctx: PrecContext, eq: EquilibriumData) -> BigReal:
    """int_S rho: must be 1 in every regime."""
    with ctx.workprec():
        total = _rho_weighted(ctx, eq, lambda x: mpf(1))
    return ctx.round(total)


def omega_mass(ctx: PrecContext, eq: EquilibriumData) -> BigReal:
    """Mass of the left band (a, b); semicircle takes its lam -> 0 limit value."""
    if eq.regime is Regime.SEMICIRCLE:
        return eq.omega
    if eq.regime is not Regime.TWO_CUT:
        raise DomainError("omega_mass needs the two-cut regime (or semicircle limit)")
    with ctx.workprec():
        val = _band_quad_left(ctx, eq.t, eq.endpoints, lambda x: mpf(1))
    return ctx.round(val)


def _second_moment_term(ctx: PrecContext, eq: EquilibriumData) -> BigReal:
    return _rho_weighted(ctx, eq, lambda x: 2 * x * x)


def capital_f(ctx: PrecContext, eq: EquilibriumData) -> BigReal:
    """F = ell + int_S 2 x^2 rho; closed values in the boundary regimes."""
    with ctx.workprec():
        if eq.regime is Regime.SEMICIRCLE:
            return ctx.round(mpf(3) / 2 + 2 * mpmath.log(2))
        val = eq.ell + _second_moment_term(ctx, eq)
    return ctx.round(val)


def capital_f_one_cut_closed(ctx: PrecContext, t) -> BigReal:
    """Closed form of F at lam = lam_c(t)."""
    with ctx.workprec():
        t = mpf(t)
        r = mpmath.sqrt(3 + t * t)
        val = (
            mpf(3) / 2
            + 2 * (mpf(4) / 3 * t * t + mpf(5) / 9 * t * r)
            + 4 * t**3 / 27 * (r - t)
            + 2 * mpmath.log(2 * (t + r))
        )
    return ctx.round(val)


def ell_log_form(ctx: PrecContext, eq: EquilibriumData) -> BigReal:
    """ell = -2 int_S log|x - t| rho(x) dx + 2 t^2 (cross-check route)."""
    with ctx.workprec():
        t = eq.t
        total = mpf(0)
        for lo, hi in support(eq):

            def g(x):
                return mpmath.log(abs(x - t)) * rho(eq, x)

            if lo == t or hi == t:
                total += _ts(ctx, g, [lo, hi])
            else:
                total += _sin_sq_piece(ctx, g, lo, hi)
        val = -2 * total + 2 * t * t
    return ctx.round(val)


def _gl_nodes(a, b, degree):
    """Gauss-Legendre nodes/weights on [a, b] at the current precision."""
    from mpmath.calculus.quadrature import GaussLegendre

    rule = GaussLegendre(mp)
    return rule.get_nodes(a, b, degree, mp.prec, verbose=False)


def _omega_node_sums(ctx: PrecContext, t, tasks, sctx) -> list:
    """Accumulate weighted Omega values over (lam, weight, level) tasks.

    Tasks must be sorted by ascending lam; each two-cut solve warm-starts
    from its neighbour's bracket, and negligible contributions are skipped
    using the monotone decay of Omega in lam.
    """
    r = mpmath.sqrt(3 + t * t)
    bbar = (t - r) / 3
    span = t - bbar
    sums = [mpf(0), mpf(0)]
    solved = []  # ascending lam -> descending b
    last_omega = None
    for lam, contrib, level in tasks:
        if last_omega is not None and abs(contrib) * last_omega < mpf(10) ** -14:
            continue
        bracket = None
        if solved:
            hi = solved[-1][1]
            if len(solved) >= 2:
                (l1, b1), (l2, b2) = solved[-2], solved[-1]
                pred = b2 + (b2 - b1) / (l2 - l1) * (lam - l2)
                width = max(abs(pred - b2) * 4, span * mpf(2) ** -40)
                lo = max(pred - width, bbar + span * mpf(10) ** -12)
            else:
                lo = bbar + span * mpf(10) ** -12
            with sctx.workprec():
                while lam - _lambda_of_b(sctx, t, lo) >= 0:
                    lo = max(lo - (hi - lo), bbar + span * mpf(10) ** -12)
            bracket = (lo, hi)
        b = _solve_b(sctx, t, lam, bracket=bracket)
        solved.append((lam, b))
        a, c = _two_cut_companions(t, b)
        omega = _band_quad_left(sctx, t, (a, b, c), lambda x: mpf(1))
        last_omega = omega
        sums[level] += contrib * omega
    return sums


def omega_integral_to(ctx: PrecContext, t, lam, grid_size: int = 64) -> BigReal:
    """int_0^lam Omega(t, u) du for a fixed subcritical lam.

    Same machinery as the full-range integral: u = lam sin^2(theta) nodes
    visited in ascending order with warm-started solves, two rule levels
    for the error estimate.
    """
    with ctx.workprec():
        t = mpf(t)
        lam = mpf(lam)
        _validate_two_cut_domain(ctx, t, lam)
        sctx = PrecContext(min(ctx.work_bits, 192), guard_bits=64, quad_budget=ctx.quad_budget)
        degree = max(5, (max(int(grid_size), 12) // 3 - 1).bit_length())
        tasks = []
        for level, deg in ((0, degree - 1), (1, degree)):
            for theta, wq in _gl_nodes(mpf(0), mp.pi / 2, deg):
                st, ct = mpmath.sin(theta), mpmath.cos(theta)
                u = lam * st * st
                tasks.append((u, wq * 2 * lam * st * ct, level))
        tasks.sort(key=lambda z: z[0])
        sums = _omega_node_sums(ctx, t, tasks, sctx)
        if not abs(sums[0] - sums[1]) < mpf(10) ** -7 * (1 + abs(sums[1])):
            raise NonConvergenceError("Omega partial integral levels disagree")
    return ctx.round(sums[1])


def omega_lambda_integral(ctx: PrecContext, t, grid_size: int = 48) -> BigReal:
    """-int_0^{lam_c} Omega(t, lam) d lam, the band-mass rate integral.

    The substitution lam = lam_c sin^2(theta) softens both interval ends;
    interior nodes are two-cut solves, the endpoint values (semicircle
    left mass, 0) enter through the limits and are never evaluated.  Nodes
    are visited in ascending lam so each solve warm-starts from its
    neighbour's bracket; two rule levels provide the error estimate.
    grid_size sets the node count of the finer level.
    """
    with ctx.workprec():
        t = mpf(t)
        lc = lambda_crit(ctx, t)
        # two-cut solves are the cost driver; their own contracts only need
        # ~1e-12 here, so cap the solver context while keeping ctx's output
        sctx = PrecContext(min(ctx.work_bits, 192), guard_bits=64, quad_budget=ctx.quad_budget)
        degree = max(5, (max(int(grid_size), 12) // 3 - 1).bit_length())
        tasks = []  # (lam, weight_contribution, level)
        for level, deg in ((0, degree - 1), (1, degree)):
            for theta, wq in _gl_nodes(mpf(0), mp.pi / 2, deg):
                st, ct = mpmath.sin(theta), mpmath.cos(theta)
                lam = lc * st * st
                tasks.append((lam, wq * 2 * lc * st * ct, level))
        tasks.sort(key=lambda z: z[0])
        sums = _omega_node_sums(ctx, t, tasks, sctx)
        if not abs(sums[0] - sums[1]) < mpf(10) ** -7 * (1 + abs(sums[1])):
            raise NonConvergenceError("Omega integral levels disagree")
    return ctx.round(-sums[1])


def _potential(eq: EquilibriumData, x) -> BigReal:
    v = 2 * x * x
    if x < eq.t and eq.regime is not Regime.SEMICIRCLE:
        v += eq.lam
    return v


def check_variational(ctx: PrecContext, eq: EquilibriumData, x) -> BigReal:
    """r(x) = 2 int_S log|x-y| rho(y) dy - V(x) + ell.

    Zero on the support, strictly negative outside (with equality at bbar
    exactly at lam = lam_c in the one-cut regime).
    """
    with ctx.workprec():
        x = mpf(x)
        flat = [e for seg in support(eq) for e in seg]
        if any(x == e for e in flat):
            raise DomainError("variational residual undefined at band endpoints")
        total = mpf(0)
        for lo, hi in support(eq):

            def g(y):
                return mpmath.log(abs(x - y)) * rho(eq, y)

            if lo < x < hi:
                total += _ts(ctx, g, [lo, x]) + _ts(ctx, g, [x, hi])
            else:
                total += _sin_sq_piece(ctx, g, lo, hi)
        val = 2 * total - _potential(eq, x) + eq.ell
    return ctx.round(val)
