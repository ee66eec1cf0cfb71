"""Closed-form Green kernels of the killed driver and their operators.

Three killed domains admit explicit Green functions:

* the punctured line R \\ {0}:
    (omega/2) (|y|**(a-1) + |x|**(a-1) - |y-x|**(a-1));
* the complement of [-1, 1]:
    c_a (|x-y|**(a-1) h(|xy-1|/|x-y|) - (a-1) h(x) h(y));
* the half line (0, inf):
    Gamma(a/2)**(-2) |x-y|**(a-1) J_a((x ^ y)/|x-y|).

The Green operator of the time-changed process applies the kernel
against f d(mu), mu(dy) = sigma(y)**(-alpha) dy.  Quadrature splits at
the kernel kink y = x and at the killing boundary with geometrically
graded panels, and closes the tails from a local power fit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import measure
from .errors import DomainError, IntegralDiverged, PreconditionError
from .quadrature import (
    gauss_legendre_panels,
    geometric_knots,
    power_tail_closure,
)
from .special import AlphaConstants, J_alpha, harmonic_h

__all__ = [
    "Domain",
    "GreenKernel",
    "QuadratureSpec",
    "green_punctured",
    "green_complement_interval",
    "green_halfline",
    "green_apply",
    "ii_operator",
    "ii_plus_operator",
    "mean_exit_bound",
    "MeanExitBound",
]


class Domain(str, enum.Enum):
    PUNCTURED = "punctured"
    COMPLEMENT_INTERVAL = "interval-complement"
    HALFLINE = "halfline"


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-13
    max_panels: int = 2048
    tail_cut: float = 1e7

    def __post_init__(self):
        if self.rel_tol < 1e-12:
            raise ValueError("rel_tol below 1e-12 is not attainable here")
        if self.max_panels < 64:
            raise ValueError("max_panels must be at least 64")
        if not (self.abs_tol > 0 and self.tail_cut > 0):
            raise ValueError("tolerances must be positive")


_DEFAULT_SPEC = QuadratureSpec()


def green_punctured(x, y, alpha):
    """Green function of the driver killed at the origin; zero there."""
    consts = AlphaConstants.for_alpha(alpha)
    return _punctured(consts, x, y)


def _punctured(consts, x, y):
    a = consts.alpha
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e = a - 1.0
    val = 0.5 * consts.omega_alpha * (
        np.abs(y) ** e + np.abs(x) ** e - np.abs(y - x) ** e
    )
    out = np.maximum(val, 0.0)  # exact zero on the killing set, round-off only
    return out if out.ndim else float(out)


def green_complement_interval(x, y, alpha):
    """Green function of the driver killed inside [-1, 1].

    Diagonal values use the analytic limit; subtraction round-off below
    1e-12 is clamped to zero.
    """
    consts = AlphaConstants.for_alpha(alpha)
    return _complement(consts, x, y)


def _complement(consts, x, y):
    a = consts.alpha
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) < 1.0) or np.any(np.abs(y) < 1.0):
        raise DomainError("interval-complement kernel needs |x|, |y| >= 1")
    scalar = x.ndim == 0 and y.ndim == 0
    x, y = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(y))
    out = np.empty(x.shape, dtype=float)
    dist = np.abs(x - y)
    near = dist <= 1e-8 * (1.0 + np.abs(x))
    if near.any():
        xs = x[near]
        hx = harmonic_h(xs, a)
        out[near] = consts.c_alpha * (
            (xs * xs - 1.0) ** (a - 1.0) / (a - 1.0) - (a - 1.0) * hx * hx
        )
    far = ~near
    if far.any():
        xf, yf, df = x[far], y[far], dist[far]
        ratio = np.abs(xf * yf - 1.0) / df
        val = consts.c_alpha * (
            df ** (a - 1.0) * harmonic_h(ratio, a)
            - (a - 1.0) * harmonic_h(xf, a) * harmonic_h(yf, a)
        )
        out[far] = val
    out[(out < 0.0) & (out >= -1e-12)] = 0.0
    return float(out[()]) if scalar else out.reshape(np.broadcast(x, y).shape)


def green_halfline(x, y, alpha):
    """Green function of the driver killed on (-inf, 0]."""
    consts = AlphaConstants.for_alpha(alpha)
    return _halfline(consts, x, y)


def _halfline(consts, x, y):
    a = consts.alpha
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise DomainError("half-line kernel needs x, y > 0")
    scalar = x.ndim == 0 and y.ndim == 0
    x, y = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(y))
    g2 = consts.gamma_half_sq
    out = np.empty(x.shape, dtype=float)
    dist = np.abs(x - y)
    mn = np.minimum(x, y)
    near = dist <= 1e-10 * mn
    # diagonal limit: |x-y|**(a-1) J((x^y)/|x-y|) -> (x^y)**(a-1)/(a-1)
    out[near] = mn[near] ** (a - 1.0) / ((a - 1.0) * g2)
    far = ~near
    if far.any():
        t = mn[far] / dist[far]
        jv = np.array([J_alpha(float(tv), a) for tv in t])
        out[far] = dist[far] ** (a - 1.0) * jv / g2
    return float(out[()]) if scalar else out.reshape(np.broadcast(x, y).shape)


@dataclass(frozen=True)
class GreenKernel:
    """A killed-domain Green kernel bound to its alpha constants."""

    domain: Domain
    constants: AlphaConstants

    @classmethod
    def punctured(cls, alpha):
        return cls(Domain.PUNCTURED, AlphaConstants.for_alpha(alpha))

    @classmethod
    def complement_interval(cls, alpha):
        return cls(Domain.COMPLEMENT_INTERVAL, AlphaConstants.for_alpha(alpha))

    @classmethod
    def halfline(cls, alpha):
        return cls(Domain.HALFLINE, AlphaConstants.for_alpha(alpha))

    def evaluate(self, x, y):
        if self.domain is Domain.PUNCTURED:
            return _punctured(self.constants, x, y)
        if self.domain is Domain.COMPLEMENT_INTERVAL:
            return _complement(self.constants, x, y)
        return _halfline(self.constants, x, y)

    def contains(self, x):
        if self.domain is Domain.PUNCTURED:
            return x != 0.0
        if self.domain is Domain.COMPLEMENT_INTERVAL:
            return abs(x) > 1.0
        return x > 0.0

    def regions(self):
        """Connected components of the domain as (lo, hi) with inf ends."""
        if self.domain is Domain.PUNCTURED:
            return ((-math.inf, 0.0), (0.0, math.inf))
        if self.domain is Domain.COMPLEMENT_INTERVAL:
            return ((-math.inf, -1.0), (1.0, math.inf))
        return ((0.0, math.inf),)


def _graded_pair(lo, hi, depth=34):
    """Knots on [lo, hi] graded toward both endpoints."""
    width = hi - lo
    if width <= 0:
        return np.array([lo, hi])
    steps = 0.5 ** np.arange(depth + 1)  # 1, 1/2, ..., 2^-depth
    left = lo + 0.5 * width * steps[::-1]
    right = hi - 0.5 * width * steps
    return np.concatenate([[lo], left, right[1:], [hi]])


def _finite_segment(g, lo, hi):
    if hi <= lo:
        return 0.0
    return gauss_legendre_panels(g, _graded_pair(lo, hi), order=16)


def _tail_piece(g, start, cut, sign):
    """int over sign*y in [start, cut] plus the analytic closure beyond."""
    def one_sided(y):
        return g(sign * y)

    val = 0.0
    lo = max(start, 1e-12)
    cut = max(cut, 10.0 * lo)
    if start < lo:
        val += _finite_segment(one_sided, start, lo)
    val += gauss_legendre_panels(
        one_sided, geometric_knots(lo, cut, per_decade=4)
    )
    # no global certificate here: a shallow local slope means divergence
    val += power_tail_closure(one_sided, cut)
    return val


def green_apply(kernel, profile, f, x, spec=None, alpha=None):
    """U^B f(x) = int_B G(x, y) f(y) sigma(y)**(-alpha) dy.

    ``kernel`` may be a GreenKernel or a Domain/str (then ``alpha`` is
    required).  f must be vectorized; the tail closure assumes f has
    eventually constant sign.  Raises IntegralDiverged when the local
    tail fit shows the integral is infinite, DomainError when x is
    outside the kernel domain.
    """
    if not isinstance(kernel, GreenKernel):
        if alpha is None:
            raise ValueError("need alpha when kernel is given by name")
        kernel = GreenKernel(Domain(kernel), AlphaConstants.for_alpha(alpha))
    spec = spec or _DEFAULT_SPEC
    x = float(x)
    if not kernel.contains(x):
        raise DomainError(f"x={x} is outside the {kernel.domain.value} domain")

    a = kernel.constants.alpha

    def integrand(y):
        y = np.asarray(y, dtype=float)
        return kernel.evaluate(x, y) * np.asarray(f(y), dtype=float) \
            * profile.eval(y) ** (-a)

    total = 0.0
    for lo, hi in kernel.regions():
        inside = lo < x < hi
        if math.isinf(hi):
            anchor = max(lo, 0.0)
            # finite stretch [anchor, T] with kinks, then tail beyond T
            T = max(10.0, 2.0 * abs(x), 2.0 * abs(anchor))
            pts = sorted({anchor, T} | ({x} if inside and x < T else set()))
            for q0, q1 in zip(pts[:-1], pts[1:]):
                total += _finite_segment(integrand, q0, q1)
            total += _tail_piece(integrand, T, spec.tail_cut, +1)
        elif math.isinf(lo):
            anchor = min(hi, 0.0)
            T = -max(10.0, 2.0 * abs(x), 2.0 * abs(anchor))
            pts = sorted({T, anchor} | ({x} if inside and x > T else set()))
            for q0, q1 in zip(pts[:-1], pts[1:]):
                total += _finite_segment(integrand, q0, q1)
            total += _tail_piece(lambda y: integrand(y), -T, spec.tail_cut, -1)
        else:
            pts = sorted({lo, hi} | ({x} if inside else set()))
            for q0, q1 in zip(pts[:-1], pts[1:]):
                total += _finite_segment(integrand, q0, q1)
    return total


def _sqrt_h0(consts):
    a = consts.alpha
    c = math.sqrt(0.5 * consts.omega_alpha)

    def f(y):
        return c * np.abs(y) ** (0.5 * (a - 1.0))

    return f


def ii_operator(profile, alpha, x, f=None, spec=None):
    """U^(0) f(x) / f(x) on the punctured line.

    Default f is the square root of the origin-killed harmonic function
    h0(y) = (omega/2) |y|**(alpha-1).  A user f must vanish at the origin
    and be positive away from it.
    """
    kernel = GreenKernel.punctured(alpha)
    if f is None:
        f = _sqrt_h0(kernel.constants)
    else:
        _check_vanishes_at(f, 0.0)
    fx = float(f(np.asarray(x, dtype=float)))
    if not fx > 0.0:
        raise PreconditionError(f"f(x) must be positive at x={x}")
    return green_apply(kernel, profile, f, x, spec) / fx


def _check_vanishes_at(f, point, scale_point=1.0):
    v0 = abs(float(f(np.asarray(point, dtype=float))))
    ref = abs(float(f(np.asarray(scale_point, dtype=float)))) + 1e-30
    if v0 > 1e-9 * ref:
        raise PreconditionError(
            f"f must vanish at the killing boundary {point}; got {v0!r}"
        )


def ii_plus_operator(profile, alpha, x):
    """Half-line ratio bound via the nested closed-form majorant:

        (1 / (Gamma(a/2)**2 phi(x))) *
            int_0^x z**(a-2) ( int_z^inf phi sigma**(-a) dy ) dz,

    with phi(y) = y**((a-1)/2).  This majorizes U^(0,inf) phi(x)/phi(x).
    """
    consts = AlphaConstants.for_alpha(alpha)
    a = consts.alpha
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"ii_plus_operator needs x > 0, got {x}")
    we = 0.5 * (a - 1.0)

    inner = measure.weighted_tail_batch(profile, alpha, we, side=+1)

    # outer integral: z**(a-2) is singular at 0; absorb into Jacobi weight
    from .quadrature import gauss_jacobi_left

    z0 = min(x, 1.0)
    val = gauss_jacobi_left(inner, 0.0, z0, a - 2.0, order=48)
    if x > z0:
        def g(z):
            return z ** (a - 2.0) * inner(z)

        val += gauss_legendre_panels(g, geometric_knots(z0, x, per_decade=4))
    return val / (consts.gamma_half_sq * x ** we)


@dataclass(frozen=True)
class MeanExitBound:
    """Bound and numeric estimate of sup_x E_x(time to hit the origin)."""

    analytic: float      # omega * I
    grid_estimate: float  # sup over a grid of U^(0)1, capped by analytic
    argmax: float

    def to_json(self):
        return {
            "analytic": self.analytic,
            "grid_estimate": self.grid_estimate,
            "argmax": self.argmax,
        }


def mean_exit_bound(profile, alpha, grid=None, spec=None):
    """omega * I together with a grid supremum of U^(0) 1.

    The pointwise inequality U^(0)1 <= omega*I makes the analytic value a
    hard cap for the grid estimate; quadrature noise above it is clipped.
    """
    consts = AlphaConstants.for_alpha(alpha)
    I = measure.I_integral(profile, alpha)
    if not I.is_finite:
        raise IntegralDiverged(f"mean exit bound needs finite I: {I.reason}")
    analytic = consts.omega_alpha * I.value
    if grid is None:
        half = np.geomspace(1e-2, 1e3, 13)
        grid = np.concatenate([-half[::-1], half])
    kernel = GreenKernel.punctured(alpha)

    def one(y):
        return np.ones_like(np.asarray(y, dtype=float))

    vals = [green_apply(kernel, profile, one, float(g), spec) for g in grid]
    i = int(np.argmax(vals))
    return MeanExitBound(
        analytic=analytic,
        grid_estimate=min(vals[i], analytic),
        argmax=float(grid[i]),
    )
