"""Criterion functionals of the speed measure mu(dx) = sigma(x)**(-alpha) dx.

Four quantities decide the long-run behaviour of the time-changed
process:

* ``mu_total``    total mass of mu; finite iff the process is ergodic;
* ``delta``       sup_x |x|**(a-1) * mu(outside (-|x|, |x|)), finite iff
                  exponentially ergodic;
* ``delta_plus``  one-sided variant sup_{x>0} x**(a-1) int_x^inf dmu
                  (and the mirror image delta_minus);
* ``I_integral``  int |x|**(a-1) dmu, finite iff strongly ergodic.

Whether a value is finite is always decided analytically from the
profile's tail exponents, never from quadrature overflow.  Suprema are
located on a geometric grid refined by golden-section search; when the
supremum is only attained in the limit x -> inf (tail exponent exactly
one) the analytic limit value is reported and ``argsup`` is left empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRange,
    IntegralDiverged,
    NotErgodic,
    TailUndetermined,
)
from .quadrature import (
    gauss_jacobi_left,
    gauss_legendre_panels,
    geometric_knots,
)

__all__ = [
    "CriterionValue",
    "mu_total",
    "delta",
    "delta_plus",
    "delta_minus",
    "I_integral",
    "tail_mass",
    "pi_cdf",
]

_GRID_LO = 1.0e-3
_GRID_HI = 1.0e6
_GRID_POINTS = 512
_TAIL_CUT = 1.0e7
_BOUNDARY_BAND = 1.0e-3  # fitted-exponent distance to a borderline case


@dataclass(frozen=True)
class CriterionValue:
    """Extended nonnegative real with provenance.

    ``value`` may be ``math.inf``, in which case ``reason`` explains the
    divergence and ``argsup``/``abs_error`` are meaningless.  A finite
    value with ``argsup=None`` was attained in the limit |x| -> inf.
    """

    value: float
    argsup: float | None = None
    abs_error: float = 0.0
    reason: str | None = None

    def __post_init__(self):
        if math.isinf(self.value) and not self.reason:
            raise ValueError("infinite criterion values need a reason")
        if math.isfinite(self.value) and self.reason:
            raise ValueError("finite criterion values carry no reason")

    @classmethod
    def finite(cls, value, argsup=None, abs_error=0.0):
        return cls(float(value), argsup, abs_error, None)

    @classmethod
    def infinite(cls, reason):
        return cls(math.inf, None, 0.0, str(reason))

    @property
    def is_finite(self):
        return math.isfinite(self.value)

    def to_json(self):
        if self.is_finite:
            out = {"value": self.value, "abs_error": self.abs_error}
            if self.argsup is not None:
                out["argsup"] = self.argsup
            return out
        return {"infinite": True, "reason": self.reason}


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (1.0 < alpha < 2.0):
        raise AlphaOutOfRange(f"alpha must lie in (1, 2), got {alpha}")
    return alpha


@dataclass(frozen=True)
class _SideTail:
    """Tail behaviour of sigma on one side: sigma ~ coeff * |x|**exponent."""

    exponent: float  # +inf / -inf flag super-polynomial growth / decay
    coeff: float
    exact: bool

    def density_integral_finite(self, alpha, weight_exp):
        """Is int |y|**weight_exp sigma(y)**(-alpha) dy finite at this tail?

        None means undecidable from a fitted exponent this close to the
        border.
        """
        if math.isinf(self.exponent):
            return self.exponent > 0
        margin = alpha * self.exponent - weight_exp - 1.0
        if self.exact:
            return margin > 0.0
        if abs(margin) <= alpha * _BOUNDARY_BAND:
            return None
        return margin > 0.0


class _Measure:
    """Quadrature backend bound to one (profile, alpha) pair."""

    def __init__(self, profile, alpha):
        self.profile = profile
        self.alpha = _check_alpha(alpha)
        gm, gp = profile.tail_exponents()
        cm, cp = profile.tail_coefficients()
        exact = profile.tails_are_exact()
        self.minus = _SideTail(gm, cm, exact)
        self.plus = _SideTail(gp, cp, exact)

    def density(self, y):
        return self.profile.eval(y) ** (-self.alpha)

    def side(self, sign):
        return self.plus if sign > 0 else self.minus

    # -- one-sided integrals ------------------------------------------------

    def _require_finite(self, sign, weight_exp, what):
        fin = self.side(sign).density_integral_finite(self.alpha, weight_exp)
        if fin is None:
            raise TailUndetermined(
                f"fitted tail exponent too close to the borderline to "
                f"decide finiteness of {what}"
            )
        if not fin:
            side = "right" if sign > 0 else "left"
            raise _Diverges(
                f"{what} diverges: sigma {side} tail exponent "
                f"{self.side(sign).exponent:g} is too small"
            )

    def weighted_tail(self, x, weight_exp=0.0, sign=+1):
        """int over sign*y > x of |y|**weight_exp * density, x >= 0.

        Caller is responsible for the finiteness decision.
        """
        x = float(x)
        dens = self.density

        def g(y):
            y = np.abs(np.asarray(y, dtype=float))
            base = dens(sign * y)
            return y ** weight_exp * base if weight_exp else base

        cut = max(_TAIL_CUT, 10.0 * x)
        val = 0.0
        lo = x
        if x < 1.0:
            if weight_exp and x == 0.0:
                # |y|**weight_exp is singular-kinked at 0: exact Jacobi weight
                val += gauss_jacobi_left(
                    lambda y: dens(sign * y), 0.0, 1.0, weight_exp
                )
            else:
                val += gauss_legendre_panels(g, np.linspace(x, 1.0, 5))
            lo = 1.0
        val += gauss_legendre_panels(g, geometric_knots(lo, cut, per_decade=4))
        val += _tail_closure(g, cut)
        return val

    def core_integral(self, weight_exp=0.0):
        """int_-1^1 |y|**weight_exp * density(y) dy, kinks at 0 handled."""
        dens = self.density
        if weight_exp:
            right = gauss_jacobi_left(lambda y: dens(y), 0.0, 1.0, weight_exp)
            left = gauss_jacobi_left(lambda y: dens(-y), 0.0, 1.0, weight_exp)
            return left + right
        right = gauss_legendre_panels(dens, np.linspace(0.0, 1.0, 5))
        left = gauss_legendre_panels(lambda y: dens(-y),
                                     np.linspace(0.0, 1.0, 5))
        return left + right

    # -- supremum machinery ---------------------------------------------

    def tail_masses_on_grid(self, xs, sign):
        """int over sign side beyond each grid point, batched.

        xs must be increasing; returns the vector of tail masses.
        """
        dens = self.density

        def g(y):
            return dens(sign * y)

        top = self.weighted_tail(xs[-1], 0.0, sign)
        x16, w16 = np.polynomial.legendre.leggauss(16)
        a = xs[:-1]
        half = 0.5 * np.diff(xs)
        nodes = a[:, None] + half[:, None] * (x16[None, :] + 1.0)
        vals = g(nodes.ravel()).reshape(nodes.shape)
        segs = half * (vals @ w16)
        return np.concatenate([np.cumsum(segs[::-1])[::-1] + top, [top]])

    def limit_at_infinity(self, sign):
        """lim x**(a-1) * tail mass as x -> inf: 0, finite, or inf."""
        side = self.side(sign)
        a = self.alpha
        if math.isinf(side.exponent):
            return 0.0 if side.exponent > 0 else math.inf
        if side.exact:
            if side.exponent > 1.0:
                return 0.0
            if side.exponent == 1.0:
                return side.coeff ** (-a) / (a - 1.0)
            return math.inf
        if side.exponent > 1.0 + _BOUNDARY_BAND:
            return 0.0
        if side.exponent < 1.0 - _BOUNDARY_BAND:
            return math.inf
        return side.coeff ** (-a) / (a - 1.0)


class _Diverges(Exception):
    """Internal: criterion integral diverges (not an error for callers)."""


def _tail_closure(g, cut, probe=4.0, depth=0):
    """Close int_cut^inf g from a local power fit; g already one-sided."""
    v1 = float(g(np.array([cut]))[0])
    v2 = float(g(np.array([cut * probe]))[0])
    if v1 <= 0.0:
        return 0.0
    p = math.log(v2 / v1) / math.log(probe) if v2 > 0 else -math.inf
    if p >= -1.0:
        # finiteness was certified analytically; a local fit this shallow
        # means the asymptotic regime starts further out -- push the cut
        if depth >= 4:
            raise TailUndetermined(
                f"integrand tail never reached its asymptotic power law "
                f"(local exponent {p:.3f} at cut {cut:g})"
            )
        extra = gauss_legendre_panels(
            g, geometric_knots(cut, cut * 100.0, per_decade=4)
        )
        return extra + _tail_closure(g, cut * 100.0, probe, depth + 1)
    if math.isinf(p):
        return 0.0
    return v1 * cut / (-(p + 1.0))


def _golden_max(fun, lo, hi, rel_tol=1e-10, max_iter=200):
    """Golden-section maximization on [lo, hi]."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * max(abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def _supremum(meas, signs, what):
    """sup_{x>0} x**(a-1) * sum of tail masses over the given signs."""
    a = meas.alpha
    # divergence / limit analysis per side
    limit = 0.0
    for s in signs:
        side = meas.side(s)
        fin = side.density_integral_finite(a, 0.0)
        if fin is None:
            raise TailUndetermined(
                f"fitted tail exponent of sigma too close to 1/alpha to "
                f"decide {what}"
            )
        lim = meas.limit_at_infinity(s)
        if math.isinf(lim):
            side_name = "right" if s > 0 else "left"
            return CriterionValue.infinite(
                f"{what} = inf: sigma {side_name} tail exponent "
                f"{side.exponent:g} < 1"
            )
        limit += lim

    xs = np.geomspace(_GRID_LO, _GRID_HI, _GRID_POINTS)
    total = np.zeros(xs.size)
    for s in signs:
        total += meas.tail_masses_on_grid(xs, s)
    svals = xs ** (a - 1.0) * total
    i = int(np.argmax(svals))

    def s_at(x):
        return x ** (a - 1.0) * sum(
            meas.weighted_tail(x, 0.0, s) for s in signs
        )

    # widen the bracket when the grid max sits on an edge
    lo = xs[i - 1] if i > 0 else xs[0] * 1e-3
    hi = xs[i + 1] if i + 1 < xs.size else xs[-1] * 1e2
    xstar, sstar = _golden_max(s_at, lo, hi)
    abs_err = 1e-9 * sstar
    if limit > sstar:
        return CriterionValue.finite(limit, argsup=None, abs_error=abs_err)
    return CriterionValue.finite(sstar, argsup=xstar, abs_error=abs_err)


# -- public criterion functionals ----------------------------------------


def mu_total(profile, alpha):
    """Total mass of the speed measure; infinite means not ergodic."""
    meas = _Measure(profile, alpha)
    try:
        meas._require_finite(+1, 0.0, "mu(R)")
        meas._require_finite(-1, 0.0, "mu(R)")
    except _Diverges as exc:
        return CriterionValue.infinite(str(exc))
    val = meas.core_integral(0.0)
    val += meas.weighted_tail(1.0, 0.0, +1)
    val += meas.weighted_tail(1.0, 0.0, -1)
    return CriterionValue.finite(val, abs_error=1e-10 * val)


def I_integral(profile, alpha):
    """int |y|**(alpha-1) dmu; infinite means not strongly ergodic."""
    meas = _Measure(profile, alpha)
    a = meas.alpha
    try:
        meas._require_finite(+1, a - 1.0, "I")
        meas._require_finite(-1, a - 1.0, "I")
    except _Diverges as exc:
        return CriterionValue.infinite(str(exc))
    val = meas.core_integral(a - 1.0)
    val += meas.weighted_tail(1.0, a - 1.0, +1)
    val += meas.weighted_tail(1.0, a - 1.0, -1)
    return CriterionValue.finite(val, abs_error=1e-10 * val)


def delta_plus(profile, alpha):
    """sup_{x>0} x**(alpha-1) int_x^inf sigma**(-alpha) dy."""
    return _supremum(_Measure(profile, alpha), (+1,), "delta_plus")


def delta_minus(profile, alpha):
    """sup_{x>0} x**(alpha-1) int_-inf^-x sigma**(-alpha) dy."""
    return _supremum(_Measure(profile, alpha), (-1,), "delta_minus")


def delta(profile, alpha):
    """sup_x |x|**(alpha-1) mu(outside (-|x|, |x|)).

    For even profiles the two one-sided tail masses share their argsup,
    so delta = delta_plus + delta_minus holds exactly and is used as is;
    otherwise the two-sided supremum is searched directly.
    """
    if profile.is_even():
        dp = delta_plus(profile, alpha)
        if not dp.is_finite:
            return dp
        return CriterionValue.finite(
            2.0 * dp.value, argsup=dp.argsup, abs_error=2.0 * dp.abs_error
        )
    return _supremum(_Measure(profile, alpha), (+1, -1), "delta")


def weighted_tail_batch(profile, alpha, weight_exp, side=+1):
    """Vectorized z -> int_{side*y > z} |y|**weight_exp dmu, z >= 0.

    Finiteness is certified from the tail exponent up front; raises
    IntegralDiverged when the integral cannot be finite and
    TailUndetermined when the exponent sits on the border.
    """
    meas = _Measure(profile, alpha)
    fin = meas.side(side).density_integral_finite(meas.alpha, weight_exp)
    if fin is None:
        raise TailUndetermined(
            "fitted tail exponent too close to the borderline to decide "
            f"the |y|^{weight_exp:g}-weighted tail integral"
        )
    if not fin:
        raise IntegralDiverged(
            f"|y|^{weight_exp:g}-weighted tail integral diverges: sigma "
            f"tail exponent {meas.side(side).exponent:g} is too small"
        )

    def call(z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            return meas.weighted_tail(float(z), weight_exp, side)
        flat = z.ravel()
        order = np.argsort(flat)
        zs = flat[order]
        top = meas.weighted_tail(float(zs[-1]), weight_exp, side)

        def g(y):
            y = np.abs(np.asarray(y, dtype=float))
            base = meas.density(side * y)
            return y ** weight_exp * base if weight_exp else base

        segs = _segment_integrals(g, zs) if zs.size > 1 else np.array([])
        cum = np.concatenate([np.cumsum(segs[::-1])[::-1] + top, [top]])
        out = np.empty_like(flat)
        out[order] = cum
        return out.reshape(z.shape)

    return call


def tail_mass(profile, alpha, y):
    """mu(outside (-y, y)) for y > 0; nonincreasing in y."""
    meas = _Measure(profile, alpha)
    for s in (+1, -1):
        if meas.side(s).density_integral_finite(meas.alpha, 0.0) is False:
            return math.inf
    y = float(y)
    return meas.weighted_tail(y, 0.0, +1) + meas.weighted_tail(y, 0.0, -1)


def pi_cdf(profile, alpha, xs):
    """CDF of the normalized speed measure at the (sorted or not) points xs.

    Builds a dense cumulative table spanning the data and interpolates;
    raises TailUndetermined or returns values via the analytic tails.
    """
    mu = mu_total(profile, alpha)
    if not mu.is_finite:
        raise NotErgodic(mu.reason)
    meas = _Measure(profile, alpha)
    xs = np.asarray(xs, dtype=float)
    span = max(10.0, float(np.max(np.abs(xs))) if xs.size else 10.0)
    grid = np.concatenate(
        [-np.geomspace(span, 1e-4, 1024), [0.0], np.geomspace(1e-4, span, 1024)]
    )
    dens_vals = _segment_integrals(meas.density, grid)
    left_tail = meas.weighted_tail(span, 0.0, -1)
    cum = left_tail + np.concatenate([[0.0], np.cumsum(dens_vals)])
    F_grid = cum / mu.value
    out = np.interp(xs, grid, F_grid, left=np.nan, right=np.nan)
    below = xs < grid[0]
    above = xs > grid[-1]
    if below.any() or above.any():
        for i in np.flatnonzero(below | above):
            x = xs[i]
            if x < 0:
                out[i] = meas.weighted_tail(-x, 0.0, -1) / mu.value
            else:
                out[i] = 1.0 - meas.weighted_tail(x, 0.0, +1) / mu.value
    return out


def _segment_integrals(g, knots):
    x8, w8 = np.polynomial.legendre.leggauss(8)
    a = knots[:-1]
    half = 0.5 * np.diff(knots)
    nodes = a[:, None] + half[:, None] * (x8[None, :] + 1.0)
    vals = g(nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ w8)
