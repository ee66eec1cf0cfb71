"""Command-line front end.

Every run validates its configuration first, then writes a manifest
echoing the fully resolved configuration next to its outputs, so any
result can be reproduced from the manifest alone.  Infinite criterion
values are first-class in all JSON output ({"infinite": true, ...});
no command ever prints a finite number for a divergent quantity.

Exit codes: 0 success, 1 configuration error, 2 classification left
undetermined, 3 numerical failure, 4 validation failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import criteria, green, montecarlo, spectral, validate
from .errors import (
    AllCensored,
    GridTooCoarse,
    HorizonExceeded,
    NoConvergence,
    NotErgodic,
    SignalTooNoisy,
    StableErgoError,
)
from .measure import CriterionValue
from .sigma import PolynomialSigma, load_profile

SCHEMA_VERSION = "1"

_CONFIG_ERRORS = (StableErgoError, ValueError, OSError, KeyError)
_NUMERIC_ERRORS = (
    NoConvergence,
    GridTooCoarse,
    HorizonExceeded,
    AllCensored,
    NotErgodic,
    SignalTooNoisy,
)


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_json(args, name, payload):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path = os.path.join(_out_dir(args), name)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_csv(args, name, header, rows):
    path = os.path.join(_out_dir(args), name)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _manifest(args, command, extra=None):
    cfg = {
        "command": command,
        "sigma": getattr(args, "sigma", None),
        "alpha": getattr(args, "alpha", None),
        "seed": getattr(args, "seed", None),
        "out": args.out,
        "format": getattr(args, "format", "json"),
    }
    if extra:
        cfg.update(extra)
    _write_json(args, "manifest.json", {"config": cfg})


def _load(args):
    profile = load_profile(args.sigma)
    alpha = float(args.alpha)
    return profile, alpha


def cmd_classify(args):
    profile, alpha = _load(args)
    _manifest(args, "classify")
    report = criteria.classify(profile, alpha)
    lyap = criteria.lyapunov_check(profile, alpha)
    path = _write_json(
        args,
        "report.json",
        {"report": report.to_json(), "lyapunov": lyap.to_json()},
    )
    print(f"profile            {report.profile_label}")
    print(f"alpha              {report.alpha}")
    print(f"ergodic            {report.ergodic.value}")
    print(f"exponentially erg. {report.exponentially_ergodic.value}")
    print(f"strongly ergodic   {report.strongly_ergodic.value}")
    print(f"report written to  {path}")
    unknown = criteria.TriState.UNKNOWN in (
        report.ergodic,
        report.exponentially_ergodic,
        report.strongly_ergodic,
    )
    return 2 if unknown else 0


def cmd_bounds(args):
    profile, alpha = _load(args)
    _manifest(args, "bounds")
    report = criteria.classify(profile, alpha)
    vals = {
        "mu_total": report.mu_total,
        "delta": report.delta,
        "delta_plus": report.delta_plus,
        "delta_minus": report.delta_minus,
        "I": report.I,
    }
    rb = criteria.rate_bounds(profile, alpha, criteria=vals)
    payload = {"criteria": report.to_json()["criteria"],
               "bounds": rb.to_json()}
    if isinstance(profile, PolynomialSigma) \
            and profile.gamma * alpha > 1.0:
        payload["polynomial_closed_forms"] = criteria.polynomial_closed_forms(
            profile.gamma, alpha
        ).to_json()
    path = _write_json(args, "bounds.json", payload)
    for k, v in rb.to_json().items():
        print(f"{k:24s} {v if not isinstance(v, dict) else 'absent'}")
    if all(v is None for v in (rb.lambda1_lower, rb.lambda0_lower,
                               rb.lambda0_upper, rb.kappa_lower)):
        print("note: every governing criterion is infinite; no bounds apply")
    print(f"bounds written to        {path}")
    return 0


def cmd_eigen(args):
    profile, alpha = _load(args)
    R_list = [float(t) for t in args.R.split(",")]
    _manifest(args, "eigen", {"domain": args.domain, "R": R_list, "n": args.n})
    results = spectral.lambda0_numeric(
        profile, alpha, args.domain, R_list, args.n
    )
    rows = [
        (r.R, r.n, f"{r.lambda0:.12g}", f"{r.residual:.3e}") for r in results
    ]
    path = _write_csv(args, "eigen.csv", ["R", "n", "lambda0", "residual"],
                      rows)
    if args.dump_eigvec:
        final = results[-1]
        grid = spectral.Grid(R=final.R, n=final.n, excluded=args.domain)
        centers = grid.centers()[grid.active_mask()]
        _write_csv(
            args,
            "eigvec.csv",
            ["cell_center", "value"],
            zip(centers, final.eigvec),
        )
    for r in results:
        print(f"R={r.R:<8g} n={r.n:<6d} lambda0={r.lambda0:.8f} "
              f"residual={r.residual:.2e}")
    rb = criteria.rate_bounds(profile, alpha)
    verdict_bits = []
    if args.domain == "punctured" and rb.lambda0_lower is not None:
        lam = results[-1].lambda0
        inside = rb.lambda0_lower * 0.9 <= lam <= rb.lambda0_upper * 1.1
        verdict_bits.append(
            f"{'inside' if inside else 'OUTSIDE'} sandwich "
            f"[{rb.lambda0_lower:.5f}, {rb.lambda0_upper:.5f}]"
        )
    vals = [r.lambda0 for r in results]
    monotone = all(b <= a * 1.001 for a, b in zip(vals, vals[1:]))
    verdict_bits.append("monotone in R" if monotone else "NOT monotone in R")
    print("verdict: " + "; ".join(verdict_bits))
    print(f"series written to {path}")
    return 0


def cmd_green_dump(args):
    profile, alpha = _load(args)
    _manifest(args, "green-dump", {"domain": args.domain, "x": args.x})
    kernel = green.GreenKernel(green.Domain(args.domain),
                               green.AlphaConstants.for_alpha(alpha))
    lo, hi, num = (float(t) for t in args.grid.split(":"))
    ys = np.linspace(lo, hi, int(num))
    ys = ys[[kernel.contains(float(v)) for v in ys]]
    gv = kernel.evaluate(float(args.x), ys)
    path = _write_csv(
        args, "green.csv", ["x", "y", "G"],
        [(args.x, y, f"{g:.12g}") for y, g in zip(ys, gv)],
    )
    print(f"{len(ys)} kernel values written to {path}")
    return 0


def cmd_simulate(args):
    profile, alpha = _load(args)
    cfg = montecarlo.PathConfig(
        dt=args.dt, horizon=args.horizon, scheme=args.scheme,
        n_paths=args.paths,
    )
    sampler = montecarlo.StableSampler(alpha, args.seed, args.stream)
    _manifest(args, f"simulate-{args.mode}", {
        "mode": args.mode, "dt": cfg.dt, "horizon": cfg.horizon,
        "paths": cfg.n_paths, "scheme": cfg.scheme, "stream": args.stream,
        "x0": args.x0, "eps": args.eps,
    })
    if args.mode == "hitting":
        est = montecarlo.estimate_hitting_time(
            profile, alpha, args.x0, args.eps, cfg, sampler
        )
        path = _write_json(args, "hitting.json", {"estimate": est.to_json()})
        print(f"mean={est.mean:.6f} stderr={est.stderr:.6f} "
              f"hit={est.n_hit} censored={est.n_censored}")
    elif args.mode == "stationary":
        est = montecarlo.estimate_stationary(profile, alpha, cfg, sampler)
        path = _write_json(args, "stationary.json", {
            "ks_distance": est.ks_distance, "n_samples": est.n_samples,
        })
        _write_csv(
            args, "histogram.csv", ["bin_center", "mass", "pi_mass"],
            zip(est.bin_centers, est.mass, est.pi_mass),
        )
        print(f"KS={est.ks_distance:.5f} over {est.n_samples} samples")
    elif args.mode == "decay":
        def f(y):
            return np.sign(y) * np.minimum(np.abs(y), 1.0)

        est = montecarlo.estimate_decay_rate(
            profile, alpha, f, [args.x0], cfg, sampler
        )
        path = _write_json(args, "decay.json", {"estimate": est.to_json()})
        print(f"rate={est.rate:.5f} stderr={est.stderr:.5f} "
              f"window={est.window}")
    else:  # path dump
        runner = montecarlo.simulate_euler if cfg.scheme == "euler" \
            else montecarlo.simulate_timechange
        res = runner(profile, alpha, args.x0, cfg, sampler)
        header = ["t"] + [f"path{j}" for j in range(cfg.n_paths)]
        rows = np.column_stack([res.times, res.values.T])
        path = _write_csv(args, "path.csv", header, rows)
        print(f"{cfg.n_paths} path(s) of {res.times.size} points written")
    print(f"outputs in {args.out}")
    return 0


def cmd_validate(args):
    _manifest(args, "validate", {
        "quick": args.quick, "inject_omega_scale": args.inject_omega_scale,
    })
    results, ok = validate.run_validation(
        quick=args.quick, inject_omega_scale=args.inject_omega_scale
    )
    _write_json(args, "validation.json", {
        "passed": ok,
        "results": [r.to_json() for r in results],
    })
    if not ok:
        failures = [r.cid for r in results if not r.passed]
        print(f"FAILED criteria: {failures}")
        return 4
    print("all criteria passed")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="stable-ergo",
        description="Ergodicity criteria, rate bounds and numerical "
                    "verification for one-dimensional time-changed "
                    "symmetric stable processes",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sigma=True):
        if sigma:
            sp.add_argument("--sigma", required=True,
                            help="poly:<g> | expr:<text> | table:<csv> | "
                                 "profile JSON path")
            sp.add_argument("--alpha", required=True, type=float)
        sp.add_argument("--out", default="stable-ergo-out")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("classify", help="ergodicity classification")
    common(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("bounds", help="criterion values and rate bounds")
    common(sp)
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("eigen", help="bottom Dirichlet eigenvalue series")
    common(sp)
    sp.add_argument("--domain", default="punctured",
                    choices=("punctured", "halfline", "interval"))
    sp.add_argument("--R", default="10,25,50",
                    help="comma-separated increasing truncation radii")
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--dump-eigvec", action="store_true")
    sp.set_defaults(fn=cmd_eigen)

    sp = sub.add_parser("green-dump", help="kernel values on a grid (CSV)")
    common(sp)
    sp.add_argument("--domain", default="punctured",
                    choices=[d.value for d in green.Domain])
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--grid", default="-50:50:401", help="lo:hi:count")
    sp.set_defaults(fn=cmd_green_dump)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates")
    common(sp)
    sp.add_argument("mode", choices=("hitting", "stationary", "decay",
                                     "path"))
    sp.add_argument("--x0", type=float, default=5.0)
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--paths", type=int, default=10000)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--horizon", type=float, default=60.0)
    sp.add_argument("--scheme", choices=("euler", "timechange"),
                    default="euler")
    sp.add_argument("--stream", type=int, default=0)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("validate", help="run the acceptance suite")
    common(sp, sigma=False)
    sp.add_argument("--quick", action="store_true",
                    help="subsampled suite, completes in under a minute")
    sp.add_argument("--inject-omega-scale", type=float, default=1.0,
                    help="test hook: perturb the kernel omega constant")
    sp.set_defaults(fn=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
