"""Panel quadrature primitives.

Everything here integrates smooth-after-substitution integrands with fixed
Gauss rules on explicit panels.  Algebraic endpoint singularities of the
form (y - a)**e with e > -1 are absorbed exactly into Gauss-Jacobi weights,
so the convergence order does not depend on the exponent.  Improper tails
are closed analytically from a local power-law fit at the truncation point.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import IntegralDiverged

__all__ = [
    "gauss_legendre_panels",
    "gauss_jacobi_left",
    "geometric_knots",
    "graded_knots",
    "power_tail_closure",
]


@lru_cache(maxsize=64)
def _gl_rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@lru_cache(maxsize=256)
def _gj_rule(order, exponent):
    # weight (1 + t)**exponent on [-1, 1]
    x, w = roots_jacobi(order, 0.0, exponent)
    return x, w


def gauss_legendre_panels(f, knots, order=32):
    """Integrate f over the union of panels delimited by ``knots``.

    f must accept an ndarray and return values elementwise.  All panel
    nodes are evaluated in a single call.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 1 or knots.size < 2:
        raise ValueError("need at least two knots")
    x, w = _gl_rule(order)
    a = knots[:-1]
    half = 0.5 * (knots[1:] - a)
    nodes = a[:, None] + half[:, None] * (x[None, :] + 1.0)
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum(half * (vals @ w)))


def gauss_jacobi_left(g, a, b, exponent, order=32):
    """Integrate (y - a)**exponent * g(y) over [a, b] with g smooth.

    The singular factor is absorbed into the quadrature weight, so the
    rule is exact for polynomial g regardless of the exponent (> -1).
    """
    if b <= a:
        return 0.0
    x, w = _gj_rule(order, exponent)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    # weight carries (1+t)**exponent; scale by the affine map Jacobian
    scale = half ** (exponent + 1.0)
    return float(scale * np.dot(w, g(nodes)))


def geometric_knots(a, b, per_decade=2):
    """Geometrically spaced knots covering [a, b], 0 < a < b."""
    if a <= 0 or b <= a:
        raise ValueError("need 0 < a < b")
    ndec = np.log10(b / a)
    n = max(2, int(np.ceil(ndec * per_decade)) + 1)
    return np.geomspace(a, b, n)


def graded_knots(a, b, toward, depth=40, ratio=0.5):
    """Panel knots on [a, b] geometrically graded toward one endpoint.

    ``toward`` must be a or b.  Used where the integrand has a kink or an
    integrable singularity at that endpoint: each panel away from it sees
    a locally smooth integrand, and the innermost panel has width
    (b - a) * ratio**depth, small enough that its contribution is below
    round-off for any integrable singularity.
    """
    width = b - a
    if width <= 0:
        raise ValueError("empty panel")
    steps = width * ratio ** np.arange(depth + 1)
    if toward == a:
        ks = a + steps[::-1]
        return np.concatenate(([a], ks))
    elif toward == b:
        ks = b - steps
        return np.concatenate((ks, [b]))
    raise ValueError("toward must be an endpoint")


def power_tail_closure(f, cut, sign=+1, max_exponent=-1.02, probe=4.0):
    """Analytic closure of int_cut^inf f for a locally power-like f.

    Fits the local exponent p from f at cut and probe*cut and returns
    f(cut)*cut / (-(p+1)).  Raises IntegralDiverged when the fitted
    exponent is not safely below -1.  ``sign=-1`` closes the left tail
    int_-inf^-cut instead.
    """
    cut = float(cut)
    y1 = sign * cut
    y2 = sign * cut * probe
    v1 = float(f(np.array([y1]))[0])
    v2 = float(f(np.array([y2]))[0])
    if v1 == 0.0 and v2 == 0.0:
        return 0.0
    if not np.isfinite(v1) or not np.isfinite(v2) or v1 * v2 <= 0.0:
        raise IntegralDiverged(
            f"tail integrand not of constant sign and finite near |y|={cut:g}"
        )
    p = np.log(abs(v2) / abs(v1)) / np.log(probe)
    if p >= max_exponent:
        raise IntegralDiverged(
            f"tail integrand decays like |y|^{p:.3f} beyond {cut:g}; "
            "integral diverges"
        )
    return v1 * cut / (-(p + 1.0))
