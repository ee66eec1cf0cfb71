"""Ergodicity classification and explicit convergence-rate bounds.

The three regimes are decided by finiteness of criterion functionals of
the speed measure:

* ergodic                 <->  mu(R) < inf
* exponentially ergodic   <->  delta < inf
* strongly ergodic        <->  I < inf

and the bounds read

* spectral gap            lambda_1      >= 1 / (4 omega delta)
* origin-killed bottom    lambda_0      in [1/(4 omega delta),
                                            (2/omega)(1/delta_+ + 1/delta_-)]
* half-line bottom        lambda_0(0,inf) >= (alpha-1) Gamma(alpha/2)**2
                                             / (4 delta_+)
* strong-ergodicity rate  kappa         >= 1 / (omega I).

For the polynomial family sigma = (1+|x|)**gamma everything is available
in closed form and both routes are exposed side by side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import measure
from .errors import AlphaOutOfRange, DomainError, TailUndetermined
from .measure import CriterionValue
from .sigma import PolynomialSigma
from .special import AlphaConstants, gamma as gamma_fn

__all__ = [
    "TriState",
    "ErgodicityReport",
    "RateBounds",
    "classify",
    "rate_bounds",
    "lyapunov_check",
    "LyapunovReport",
    "polynomial_closed_forms",
    "PolynomialClosedForms",
]


class TriState(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def _tri(criterion):
    if criterion is None:
        return TriState.UNKNOWN
    return TriState.YES if criterion.is_finite else TriState.NO


@dataclass(frozen=True)
class ErgodicityReport:
    alpha: float
    profile_label: str
    ergodic: TriState
    exponentially_ergodic: TriState
    strongly_ergodic: TriState
    mu_total: CriterionValue | None
    delta: CriterionValue | None
    delta_plus: CriterionValue | None
    delta_minus: CriterionValue | None
    I: CriterionValue | None
    notes: tuple = ()

    def to_json(self):
        def enc(v):
            return v.to_json() if v is not None else {"undetermined": True}

        return {
            "alpha": self.alpha,
            "profile": self.profile_label,
            "ergodic": self.ergodic.value,
            "exponentially_ergodic": self.exponentially_ergodic.value,
            "strongly_ergodic": self.strongly_ergodic.value,
            "criteria": {
                "mu_total": enc(self.mu_total),
                "delta": enc(self.delta),
                "delta_plus": enc(self.delta_plus),
                "delta_minus": enc(self.delta_minus),
                "I": enc(self.I),
            },
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class RateBounds:
    """Each bound is None when its governing criterion is infinite."""

    lambda1_lower: float | None = None
    lambda0_lower: float | None = None
    lambda0_upper: float | None = None
    lambda0_halfline_lower: float | None = None
    kappa_lower: float | None = None

    def __post_init__(self):
        for name in (
            "lambda1_lower",
            "lambda0_lower",
            "lambda0_upper",
            "lambda0_halfline_lower",
            "kappa_lower",
        ):
            v = getattr(self, name)
            if v is not None and not v > 0.0:
                raise ValueError(f"{name} must be positive when present")
        if (
            self.lambda0_lower is not None
            and self.lambda0_upper is not None
            and self.lambda0_lower > self.lambda0_upper
        ):
            raise ValueError("lambda0 bounds out of order")

    def to_json(self):
        def enc(v):
            return v if v is not None else {"infinite_criterion": True}

        return {
            "lambda1_lower": enc(self.lambda1_lower),
            "lambda0_lower": enc(self.lambda0_lower),
            "lambda0_upper": enc(self.lambda0_upper),
            "lambda0_halfline_lower": enc(self.lambda0_halfline_lower),
            "kappa_lower": enc(self.kappa_lower),
        }


def _criteria_values(profile, alpha):
    """All five criterion values; None marks an undetermined one."""
    out = {}
    notes = []
    for name, fn in (
        ("mu_total", measure.mu_total),
        ("delta_plus", measure.delta_plus),
        ("delta_minus", measure.delta_minus),
        ("delta", measure.delta),
        ("I", measure.I_integral),
    ):
        try:
            out[name] = fn(profile, alpha)
        except TailUndetermined as exc:
            out[name] = None
            notes.append(f"{name}: {exc}")
    return out, notes


def classify(profile, alpha):
    """Ergodicity report for the time-changed process with this profile."""
    vals, notes = _criteria_values(profile, alpha)
    return ErgodicityReport(
        alpha=float(alpha),
        profile_label=profile.label(),
        ergodic=_tri(vals["mu_total"]),
        exponentially_ergodic=_tri(vals["delta"]),
        strongly_ergodic=_tri(vals["I"]),
        mu_total=vals["mu_total"],
        delta=vals["delta"],
        delta_plus=vals["delta_plus"],
        delta_minus=vals["delta_minus"],
        I=vals["I"],
        notes=tuple(notes),
    )


def rate_bounds(profile, alpha, criteria=None):
    """Plug criterion values into the closed-form rate bounds.

    ``criteria`` may carry precomputed values keyed like
    :func:`_criteria_values`; anything missing is computed here.
    """
    consts = AlphaConstants.for_alpha(alpha)
    om = consts.omega_alpha
    if criteria is None:
        criteria, _ = _criteria_values(profile, alpha)
    d = criteria["delta"]
    dp = criteria["delta_plus"]
    dm = criteria["delta_minus"]
    I = criteria["I"]

    lam1 = lam0_lo = lam0_hi = lam0_half = kappa = None
    if d is not None and d.is_finite:
        lam1 = 1.0 / (4.0 * om * d.value)
        lam0_lo = lam1
    if (
        dp is not None
        and dm is not None
        and dp.is_finite
        and dm.is_finite
    ):
        lam0_hi = (2.0 / om) * (1.0 / dp.value + 1.0 / dm.value)
    if dp is not None and dp.is_finite:
        lam0_half = (
            (consts.alpha - 1.0) * consts.gamma_half_sq / (4.0 * dp.value)
        )
    if I is not None and I.is_finite:
        kappa = 1.0 / (om * I.value)
    return RateBounds(
        lambda1_lower=lam1,
        lambda0_lower=lam0_lo,
        lambda0_upper=lam0_hi,
        lambda0_halfline_lower=lam0_half,
        kappa_lower=kappa,
    )


@dataclass(frozen=True)
class LyapunovReport:
    """Numerical drift ratios; sufficiency checks only.

    A positive ``A1`` = liminf sigma(x)/|x| certifies exponential
    ergodicity; a positive ``A2`` = liminf sigma(x)/|x|**g for some g > 1
    certifies strong ergodicity.  A zero value is inconclusive and never
    overrides the criterion classification.
    """

    A1: float
    A2: tuple | None  # (g, value) or None when no usable g > 1
    exponential_sufficient: bool
    strong_sufficient: bool

    def to_json(self):
        return {
            "A1": self.A1 if math.isfinite(self.A1) else {"infinite": True},
            "A2": (
                {"gamma": self.A2[0], "value": self.A2[1]}
                if self.A2 is not None
                else None
            ),
            "exponential_sufficient": self.exponential_sufficient,
            "strong_sufficient": self.strong_sufficient,
        }


def lyapunov_check(profile, alpha):
    """Estimate the drift liminfs over |x| in [1e3, 1e6].

    Tail exponents steer the extrapolation: a tail exponent above one
    sends A1 to +inf, exactly one gives the tail coefficient, below one
    gives zero.
    """
    float(alpha)  # alpha only scales rates; validated elsewhere
    gm, gp = profile.tail_exponents()
    cm, cp = profile.tail_coefficients()

    def liminf_ratio(power):
        # min over both tails of sigma(x)/|x|**power, window plus limit
        vals = []
        for g, c in ((gm, cm), (gp, cp)):
            if math.isinf(g):
                vals.append(math.inf if g > 0 else 0.0)
            elif g > power:
                vals.append(math.inf)
            elif g == power:
                vals.append(c)
            else:
                vals.append(0.0)
        return min(vals)

    A1 = liminf_ratio(1.0)
    g_est = min(gm, gp)
    A2 = None
    if g_est > 1.0:
        if math.isinf(g_est):
            A2 = (math.inf, math.inf)
        else:
            A2 = (g_est, liminf_ratio(g_est))
    return LyapunovReport(
        A1=A1,
        A2=A2,
        exponential_sufficient=A1 > 0.0,
        strong_sufficient=A2 is not None and A2[1] > 0.0,
    )


@dataclass(frozen=True)
class PolynomialClosedForms:
    """Exact criterion values and bounds for sigma = (1+|x|)**gamma.

    ``lambda0_upper`` follows the two-sided bound
    (2/omega)(1/delta_+ + 1/delta_-); ``lambda0_upper_corollary`` is the
    sharper constant stated alongside the polynomial family, kept for
    reference (it is a factor 2 below the two-sided bound).
    ``kappa_lower`` uses 1/(omega I) with the exact beta-function I;
    ``kappa_lower_coarse`` is alpha*(gamma-1)/(2*omega).
    """

    gamma: float
    alpha: float
    delta_plus: float
    delta: float
    mu_total: float
    I: float | None
    argsup: float | None
    bounds: RateBounds
    lambda0_upper_corollary: float
    kappa_lower_coarse: float | None

    def to_json(self):
        return {
            "gamma": self.gamma,
            "alpha": self.alpha,
            "delta_plus": self.delta_plus,
            "delta": self.delta,
            "mu_total": self.mu_total,
            "I": self.I if self.I is not None else {"infinite": True},
            "argsup": self.argsup,
            "bounds": self.bounds.to_json(),
            "lambda0_upper_corollary": self.lambda0_upper_corollary,
            "kappa_lower_coarse": self.kappa_lower_coarse,
        }


def polynomial_closed_forms(gamma, alpha):
    """Closed-form criteria and bounds for the polynomial family.

    Needs gamma > 1/alpha (otherwise the process is not even ergodic and
    no finite criterion exists).
    """
    alpha = float(alpha)
    if not (1.0 < alpha < 2.0):
        raise AlphaOutOfRange(f"alpha must lie in (1, 2), got {alpha}")
    gamma = float(gamma)
    if gamma * alpha <= 1.0:
        raise DomainError(
            f"gamma = {gamma} <= 1/alpha = {1.0 / alpha:.6g}: not ergodic, "
            "no closed forms apply"
        )
    consts = AlphaConstants.for_alpha(alpha)
    om = consts.omega_alpha
    a = alpha
    mu = 2.0 / (a * gamma - 1.0)

    if gamma > 1.0:
        dp = (
            (a - 1.0) ** (a - 1.0)
            * (a * (gamma - 1.0)) ** (a * (gamma - 1.0))
            / (a * gamma - 1.0) ** (a * gamma)
        )
        argsup = (a - 1.0) / (a * (gamma - 1.0))
        I = 2.0 * gamma_fn(a) * gamma_fn(a * (gamma - 1.0)) / gamma_fn(a * gamma)
        kappa = 1.0 / (om * I)
        kappa_coarse = a * (gamma - 1.0) / (2.0 * om)
    elif gamma == 1.0:
        dp = 1.0 / (a - 1.0)
        argsup = None  # supremum attained in the limit x -> inf
        I = None
        kappa = None
        kappa_coarse = None
    else:
        # 1/alpha < gamma < 1: ergodic but delta = inf
        return PolynomialClosedForms(
            gamma=gamma,
            alpha=a,
            delta_plus=math.inf,
            delta=math.inf,
            mu_total=mu,
            I=None,
            argsup=None,
            bounds=RateBounds(),
            lambda0_upper_corollary=math.inf,
            kappa_lower_coarse=None,
        )

    d = 2.0 * dp
    bounds = RateBounds(
        lambda1_lower=1.0 / (4.0 * om * d),
        lambda0_lower=1.0 / (4.0 * om * d),
        lambda0_upper=(2.0 / om) * (2.0 / dp),
        lambda0_halfline_lower=(a - 1.0) * consts.gamma_half_sq / (4.0 * dp),
        kappa_lower=kappa,
    )
    return PolynomialClosedForms(
        gamma=gamma,
        alpha=a,
        delta_plus=dp,
        delta=d,
        mu_total=mu,
        I=I,
        argsup=argsup,
        bounds=bounds,
        lambda0_upper_corollary=2.0 / (om * dp),
        kappa_lower_coarse=kappa_coarse,
    )
