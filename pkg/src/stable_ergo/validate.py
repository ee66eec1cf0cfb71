"""End-to-end verification suite.

Each numbered check exercises one acceptance property of the library:
closed-form reproduction, classification tables, kernel inequalities,
operator bounds, eigenvalue sandwiches, and the Monte Carlo
cross-checks.  The checks are pure functions of fixed seeds, so a run is
reproducible bit for bit; ``quick=True`` subsamples the stochastic
checks and widens their noise-driven tolerances accordingly.

``inject_omega_scale`` is a test hook that perturbs the omega constant
used to evaluate the Green kernels (and only those); any value other
than one must make the kernel inequality check fail, which guards the
wiring between the constants and the kernels.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass

import numpy as np

from . import criteria, green, measure, montecarlo, spectral
from .green import Domain, GreenKernel
from .measure import CriterionValue
from .sigma import PolynomialSigma
from .special import AlphaConstants, gamma as gamma_fn

__all__ = ["CheckResult", "run_validation", "ALL_CHECKS"]

_ALPHAS = (1.2, 1.5, 1.8)


@dataclass(frozen=True)
class CheckResult:
    cid: int
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.cid:2d} {self.name}: {self.detail} " \
               f"({self.elapsed:.2f}s)"

    def to_json(self):
        return dataclasses.asdict(self)


def _closed_delta_plus(gamma, a):
    if gamma == 1.0:
        return 1.0 / (a - 1.0)
    return (
        (a - 1.0) ** (a - 1.0)
        * (a * (gamma - 1.0)) ** (a * (gamma - 1.0))
        / (a * gamma - 1.0) ** (a * gamma)
    )


def check_01_delta_plus_closed_form(ctx):
    worst = 0.0
    for g in (1.5, 2.0, 3.0):
        for a in _ALPHAS:
            got = measure.delta_plus(PolynomialSigma(g), a).value
            ref = _closed_delta_plus(g, a)
            worst = max(worst, abs(got - ref) / ref)
    if worst > 1e-6:
        return False, f"worst closed-form mismatch {worst:.2e} > 1e-6"
    for a in _ALPHAS:
        got = measure.delta_plus(PolynomialSigma(1.0), a).value
        if got != 1.0 / (a - 1.0):
            return False, f"gamma=1 value {got!r} != 1/(alpha-1) at alpha={a}"
    return True, f"worst rel error {worst:.2e}; gamma=1 exact"


def check_02_I_pi_over_4(ctx):
    got = measure.I_integral(PolynomialSigma(2.0), 1.5).value
    rel = abs(got - math.pi / 4.0) / (math.pi / 4.0)
    return rel <= 1e-8, f"I = {got:.12f}, rel error {rel:.2e} (tol 1e-8)"


def check_03_classification_table(ctx):
    want = {
        0.5: ("no", "no", "no"),
        0.7: ("yes", "no", "no"),
        1.0: ("yes", "yes", "no"),
        2.0: ("yes", "yes", "yes"),
    }
    for g, expect in want.items():
        rep = criteria.classify(PolynomialSigma(g), 1.5)
        got = (
            rep.ergodic.value,
            rep.exponentially_ergodic.value,
            rep.strongly_ergodic.value,
        )
        if got != expect:
            return False, f"gamma={g}: got {got}, want {expect}"
    return True, "all four regimes reproduced"


def check_04_sandwich_ratio(ctx):
    worst = 0.0
    for g in (1.0, 1.5, 2.0, 3.0):
        for a in _ALPHAS:
            rb = criteria.rate_bounds(PolynomialSigma(g), a)
            ratio = rb.lambda0_upper / rb.lambda0_lower
            worst = max(worst, abs(ratio - 32.0))
    return worst <= 1e-10 * 32.0, f"worst |ratio - 32| = {worst:.2e}"


def check_05_green_inequalities(ctx):
    n = 2000 if ctx.quick else 10000
    rng = np.random.Generator(np.random.Philox(key=[2024, 5]))
    bad = []
    for a in _ALPHAS:
        true_consts = AlphaConstants.for_alpha(a)
        consts = dataclasses.replace(
            true_consts,
            omega_alpha=true_consts.omega_alpha * ctx.inject_omega_scale,
        )
        om = true_consts.omega_alpha
        e = a - 1.0
        punct = GreenKernel(Domain.PUNCTURED, consts)
        x = rng.uniform(-50.0, 50.0, n)
        y = rng.uniform(-50.0, 50.0, n)
        keep = (x != 0) & (y != 0)
        x, y = x[keep], y[keep]
        g0 = punct.evaluate(x, y)
        mn = np.minimum(np.abs(x), np.abs(y)) ** e
        if np.any(g0 > om * mn + 1e-12):
            bad.append(f"upper kernel bound violated at alpha={a}")
        same = x * y > 0
        if np.any(g0[same] < 0.5 * om * mn[same] - 1e-12):
            bad.append(f"same-sign lower bound violated at alpha={a}")
        half = GreenKernel(Domain.HALFLINE, consts)
        xp = rng.uniform(1e-3, 50.0, n)
        yp = rng.uniform(1e-3, 50.0, n)
        gh = half.evaluate(xp, yp)
        g2 = true_consts.gamma_half_sq
        if np.any((a - 1.0) * g2 * gh > np.minimum(xp, yp) ** e + 1e-12):
            bad.append(f"half-line bound violated at alpha={a}")
    if bad:
        return False, "; ".join(bad)
    return True, f"{3 * len(_ALPHAS)} sweeps of {n} points, no violations"


def check_06_ii_operator_bounds(ctx):
    npts = 10 if ctx.quick else 50
    xs = np.geomspace(1e-2, 1e2, npts)
    slack = 1.0 + 1e-6
    for g in (2.0, 1.5):
        prof = PolynomialSigma(g)
        consts = AlphaConstants.for_alpha(1.5)
        om = consts.omega_alpha
        d = measure.delta(prof, 1.5).value
        dp = measure.delta_plus(prof, 1.5).value
        bound_ii = 4.0 * om * d
        bound_iip = 4.0 * dp / ((consts.alpha - 1.0) * consts.gamma_half_sq)
        for x in xs:
            v = green.ii_operator(prof, 1.5, float(x))
            if v > bound_ii * slack:
                return False, (
                    f"II bound broken: {v:.8f} > {bound_ii:.8f} at "
                    f"x={x:.3g}, gamma={g}"
                )
            vp = green.ii_plus_operator(prof, 1.5, float(x))
            if vp > bound_iip * slack:
                return False, (
                    f"II+ bound broken: {vp:.8f} > {bound_iip:.8f} at "
                    f"x={x:.3g}, gamma={g}"
                )
    return True, f"both operator bounds hold at {npts} points, 2 profiles"


def check_07_eigen_sandwich(ctx):
    prof = PolynomialSigma(2.0)
    rb = criteria.rate_bounds(prof, 1.5)
    if ctx.quick:
        R_list, n = [15.0, 30.0], 600
    else:
        R_list, n = [10.0, 25.0, 50.0], 2000
    res = spectral.lambda0_numeric(prof, 1.5, "punctured", R_list, n)
    lam = res[-1].lambda0
    lo, hi = 0.9 * rb.lambda0_lower, 1.1 * rb.lambda0_upper
    if not (lo <= lam <= hi):
        return False, f"lambda0 = {lam:.4f} outside [{lo:.4f}, {hi:.4f}]"
    vals = [r.lambda0 for r in res]
    for a_, b_ in zip(vals, vals[1:]):
        if b_ > a_ * 1.001:
            return False, f"not monotone in R: {vals}"
    vl = spectral.variational_lower(prof, 1.5, "punctured")
    ru = spectral.rayleigh_upper(prof, 1.5)
    if not (vl <= lam * 1.1 and lam <= ru * 1.1
            and ru <= rb.lambda0_upper * 1.1):
        return False, (
            f"ordering broken: variational {vl:.4f}, numeric {lam:.4f}, "
            f"rayleigh {ru:.4f}, theorem {rb.lambda0_upper:.4f}"
        )
    return True, (
        f"lambda0 = {lam:.4f} in [{lo:.3f}, {hi:.2f}]; chain "
        f"{vl:.3f} <= {lam:.3f} <= {ru:.3f} <= {rb.lambda0_upper:.2f}; "
        f"R-sequence {['%.4f' % v for v in vals]}"
    )


def check_08_halfline_bound(ctx):
    prof = PolynomialSigma(2.0)
    rb = criteria.rate_bounds(prof, 1.5)
    R, n = (30.0, 600) if ctx.quick else (50.0, 2000)
    res = spectral.lambda0_numeric(prof, 1.5, "halfline", [R], n)
    lam = res[0].lambda0
    floor = 0.9 * rb.lambda0_halfline_lower
    return lam >= floor, (
        f"half-line lambda0 = {lam:.4f} vs floor 0.9*"
        f"{rb.lambda0_halfline_lower:.5f} = {floor:.5f}"
    )


def check_09_stable_sampler(ctx):
    # cheap even at full size; the tail fit needs the full sample anyway
    nsamp = 10 ** 6
    cf_tol = 4e-3
    tail_tol = 0.1
    msgs = []
    for a in _ALPHAS:
        smp = montecarlo.StableSampler(a, 20240, 9)
        s = smp.variates(smp.generator(), nsamp)
        for xi in (0.5, 1.0, 2.0):
            err = abs(np.cos(xi * s).mean() - math.exp(-xi ** a))
            if err > cf_tol:
                return False, f"CF error {err:.2e} > {cf_tol:.1e} at " \
                              f"alpha={a}, xi={xi}"
        xs = np.geomspace(10.0, 100.0, 8)
        p = np.array([(np.abs(s) > v).mean() for v in xs])
        slope = np.polyfit(np.log(xs), np.log(p), 1)[0]
        if abs(slope + a) > tail_tol:
            return False, f"tail index {-slope:.3f} vs alpha={a}"
        msgs.append(f"a={a}: tail {-slope:.2f}")
    return True, f"CF within {cf_tol:.1e}; " + ", ".join(msgs)


def check_10_hitting_bound(ctx):
    prof = PolynomialSigma(2.0)
    consts = AlphaConstants.for_alpha(1.5)
    bound = consts.omega_alpha * measure.I_integral(prof, 1.5).value
    n = 2000 if ctx.quick else 10000
    cfg = montecarlo.PathConfig(dt=1e-3, horizon=60.0, n_paths=n)
    smp = montecarlo.StableSampler(1.5, 31337, 10)
    est = montecarlo.estimate_hitting_time(prof, 1.5, 5.0, 0.05, cfg, smp)
    limit = bound + 3.0 * est.stderr
    return est.mean <= limit, (
        f"mean {est.mean:.4f} (se {est.stderr:.4f}, censored "
        f"{est.n_censored}) vs bound {bound:.5f} + 3se = {limit:.4f}"
    )


def check_11_stationarity(ctx):
    prof = PolynomialSigma(2.0)
    n = 100 if ctx.quick else 400
    cfg = montecarlo.PathConfig(dt=0.01, horizon=125.0, n_paths=n)
    smp = montecarlo.StableSampler(1.5, 424242, 11)
    est = montecarlo.estimate_stationary(prof, 1.5, cfg, smp)
    need = 10 ** 4 if ctx.quick else 10 ** 5
    if est.n_samples < need:
        return False, f"only {est.n_samples} occupation samples"
    return est.ks_distance <= 0.05, (
        f"KS = {est.ks_distance:.4f} over {est.n_samples} samples "
        "(tol 0.05)"
    )


def check_12_decay_rate(ctx):
    prof = PolynomialSigma(2.0)
    rb = criteria.rate_bounds(prof, 1.5)
    floor = 0.5 * rb.lambda1_lower

    def f(y):
        return np.sign(y) * np.minimum(np.abs(y), 1.0)

    n = 4000 if ctx.quick else 20000
    cfg = montecarlo.PathConfig(dt=0.002, horizon=8.0, n_paths=n)
    smp = montecarlo.StableSampler(1.5, 777, 12)
    est = montecarlo.estimate_decay_rate(prof, 1.5, f, [5.0], cfg, smp)
    return est.rate >= floor, (
        f"fitted rate {est.rate:.4f} (se {est.stderr:.4f}, window "
        f"{est.window}) vs one-sided floor 0.5*lambda1_lower = {floor:.4f}"
    )


ALL_CHECKS = (
    (1, "delta_plus closed form", check_01_delta_plus_closed_form),
    (2, "I integral beta identity", check_02_I_pi_over_4),
    (3, "classification table", check_03_classification_table),
    (4, "lambda0 sandwich ratio 32", check_04_sandwich_ratio),
    (5, "Green kernel inequalities", check_05_green_inequalities),
    (6, "II operator bounds", check_06_ii_operator_bounds),
    (7, "eigenvalue sandwich and ordering", check_07_eigen_sandwich),
    (8, "half-line eigenvalue floor", check_08_halfline_bound),
    (9, "stable increment sampler", check_09_stable_sampler),
    (10, "hitting time bound", check_10_hitting_bound),
    (11, "stationary law KS", check_11_stationarity),
    (12, "decay rate soft floor", check_12_decay_rate),
)


@dataclass(frozen=True)
class _Context:
    quick: bool
    inject_omega_scale: float


def run_validation(quick=False, inject_omega_scale=1.0, report=print,
                   only=None):
    """Run the acceptance checks; returns (results, all_passed)."""
    ctx = _Context(quick=quick, inject_omega_scale=inject_omega_scale)
    results = []
    for cid, name, fn in ALL_CHECKS:
        if only is not None and cid not in only:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(ctx)
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        res = CheckResult(
            cid=cid,
            name=name,
            passed=passed,
            detail=detail,
            elapsed=time.perf_counter() - t0,
        )
        results.append(res)
        if report:
            report(res.line())
    return results, all(r.passed for r in results)
