"""Coefficient profiles sigma and their tail behaviour.

A profile is a strictly positive continuous function on the line.  Three
kinds are supported: the polynomial family (1+|x|)**gamma, parsed
expressions over the mini-language in :mod:`stable_ergo.expr`, and
tabulated samples with declared extrapolation exponents.  Each profile
reports its tail exponents (gamma such that sigma(x) ~ c |x|**gamma), on
which every finiteness decision downstream is based; values of +inf and
-inf flag super-polynomial growth and decay.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .errors import (
    DomainError,
    NonPositiveSigma,
    ParseError,
    TailUndetermined,
)

__all__ = [
    "SigmaProfile",
    "PolynomialSigma",
    "ExpressionSigma",
    "TabulatedSigma",
    "parse_sigma",
    "eval_sigma",
    "estimate_tail_exponent",
    "load_profile",
]

DEFAULT_POSITIVITY_FLOOR = 1e-300

# fitting windows for expression tails; slopes from two half-windows must
# agree within _FIT_TOL to certify a power law
_FIT_LO = 1.0e3
_FIT_MID = 10.0 ** 4.5
_FIT_HI = 1.0e6
_FIT_EXTRA = 10.0 ** 7.5
_FIT_TOL = 1.0e-3
_FIT_POINTS = 24


def parse_sigma(text):
    """Parse coefficient expression text; see :mod:`stable_ergo.expr`."""
    return expr.parse(text)


class SigmaProfile:
    """Base class; concrete kinds implement ``_raw`` and tail metadata."""

    kind = "abstract"

    def __init__(self, positivity_floor=DEFAULT_POSITIVITY_FLOOR):
        if not positivity_floor > 0.0:
            raise ValueError("positivity_floor must be positive")
        self.positivity_floor = positivity_floor

    def _raw(self, x):
        raise NotImplementedError

    def eval(self, x):
        """sigma(x), elementwise, checked against the positivity floor."""
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self._raw(arr), dtype=float)
        bad = ~(out > self.positivity_floor)
        if bad.any():
            where = arr.ravel()[np.flatnonzero(bad.ravel())[0]]
            raise NonPositiveSigma(
                f"sigma(x) <= positivity floor at x={where!r}"
            )
        return out if isinstance(x, np.ndarray) else float(out)

    __call__ = eval

    def tail_exponents(self):
        """(gamma_minus, gamma_plus); +-inf flags super-polynomial tails."""
        raise NotImplementedError

    def tail_coefficients(self):
        """(c_minus, c_plus) with sigma(x) ~ c |x|**gamma on each side."""
        raise NotImplementedError

    def tails_are_exact(self):
        """True when tail exponents are structural, not fitted."""
        return False

    def is_even(self):
        raise NotImplementedError

    def label(self):
        raise NotImplementedError

    def to_spec(self):
        """JSON-serializable profile description."""
        raise NotImplementedError


class PolynomialSigma(SigmaProfile):
    """sigma(x) = (1 + |x|)**gamma with gamma > 0."""

    kind = "polynomial"

    def __init__(self, gamma, positivity_floor=DEFAULT_POSITIVITY_FLOOR):
        super().__init__(positivity_floor)
        gamma = float(gamma)
        if not gamma > 0.0:
            raise DomainError(f"polynomial exponent must be > 0, got {gamma}")
        self.gamma = gamma

    def _raw(self, x):
        return (1.0 + np.abs(x)) ** self.gamma

    def tail_exponents(self):
        return (self.gamma, self.gamma)

    def tail_coefficients(self):
        return (1.0, 1.0)

    def tails_are_exact(self):
        return True

    def is_even(self):
        return True

    def label(self):
        return f"poly:{self.gamma:g}"

    def to_spec(self):
        return {"kind": "polynomial", "gamma": self.gamma}


class ExpressionSigma(SigmaProfile):
    """Profile given by a parsed expression tree."""

    kind = "expression"

    _EVEN_PROBES = np.array(
        [0.0, 0.37, 0.7, 1.3, 2.9, 17.5, 303.7, 1.0e4 + 1.0 / 3.0, 8.7e5]
    )

    def __init__(self, node, text=None,
                 positivity_floor=DEFAULT_POSITIVITY_FLOOR):
        super().__init__(positivity_floor)
        if isinstance(node, str):
            text = node
            node = expr.parse(node)
        self.node = node
        self.text = text if text is not None else expr.to_text(node)
        self._tail_cache = None

    def _raw(self, x):
        return expr.evaluate(self.node, x)

    def _fit_side(self, sign):
        def logs(lo, hi):
            xs = sign * np.geomspace(lo, hi, _FIT_POINTS)
            vals = self.eval(np.asarray(xs))
            if not np.all(np.isfinite(vals)):
                return None, None  # overflow: treated as super-polynomial
            return np.log(np.abs(xs)), np.log(vals)

        lx1, ls1 = logs(_FIT_LO, _FIT_MID)
        lx2, ls2 = logs(_FIT_MID, _FIT_HI)
        if ls1 is None or ls2 is None:
            return math.inf, 1.0
        s1 = np.polyfit(lx1, ls1, 1)[0]
        s2 = np.polyfit(lx2, ls2, 1)[0]
        if abs(s1 - s2) <= _FIT_TOL:
            slope, icpt = np.polyfit(
                np.concatenate([lx1, lx2]), np.concatenate([ls1, ls2]), 1
            )
            # local coefficient at the far end is the better extrapolant
            far = self.eval(sign * _FIT_HI)
            return float(slope), float(far / _FIT_HI ** slope)
        # slopes drift: super-polynomial behaviour means they keep moving
        # by whole units across windows, not a slow log-type correction
        lx3, ls3 = logs(_FIT_HI, _FIT_EXTRA)
        if ls3 is None:
            return math.inf, 1.0
        s3 = np.polyfit(lx3, ls3, 1)[0]
        if s3 > s2 + _SUPERPOLY_STEP and s2 > s1 + _SUPERPOLY_STEP:
            return math.inf, 1.0
        if s3 < s2 - _SUPERPOLY_STEP and s2 < s1 - _SUPERPOLY_STEP:
            return -math.inf, 1.0
        raise TailUndetermined(
            f"tail exponent fit does not converge on the "
            f"{'right' if sign > 0 else 'left'} side: "
            f"window slopes {s1:.4f}, {s2:.4f}, {s3:.4f}"
        )

    def _tails(self):
        if self._tail_cache is None:
            gm, cm = self._fit_side(-1.0)
            gp, cp = self._fit_side(+1.0)
            self._tail_cache = ((gm, gp), (cm, cp))
        return self._tail_cache

    def tail_exponents(self):
        return self._tails()[0]

    def tail_coefficients(self):
        return self._tails()[1]

    def is_even(self):
        xs = self._EVEN_PROBES
        a = self.eval(xs)
        b = self.eval(-xs)
        return bool(np.all(np.abs(a - b) <= 1e-12 * np.maximum(a, b)))

    def label(self):
        return f"expr:{self.text}"

    def to_spec(self):
        return {"kind": "expression", "text": self.text}


class TabulatedSigma(SigmaProfile):
    """Samples (x_i, sigma_i) with log-linear interpolation in between.

    Criterion integrals are tail-dominated, so extrapolation exponents
    beyond the table must be declared, never inferred.
    """

    kind = "table"

    def __init__(self, xs, sigmas, tail_exponents, even=False,
                 positivity_floor=DEFAULT_POSITIVITY_FLOOR, source=None):
        super().__init__(positivity_floor)
        xs = np.asarray(xs, dtype=float)
        sigmas = np.asarray(sigmas, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != sigmas.shape:
            raise DomainError("table needs two matching 1-d columns")
        if not np.all(np.diff(xs) > 0):
            raise DomainError("table abscissae must be strictly increasing")
        if not np.all(sigmas > 0):
            raise NonPositiveSigma("table contains nonpositive sigma values")
        if even and xs[0] < 0:
            raise DomainError("even-extendable table must cover x >= 0 only")
        if not even and xs[0] >= 0:
            raise DomainError(
                "table must either cover negative x or declare evenness"
            )
        gm, gp = tail_exponents
        self.xs = xs
        self.log_sigmas = np.log(sigmas)
        self.declared = (float(gm), float(gp))
        self.even = bool(even)
        self.source = source

    def _raw(self, x):
        x = np.asarray(x, dtype=float)
        q = np.abs(x) if self.even else x
        out = np.exp(np.interp(q, self.xs, self.log_sigmas))
        gm, gp = self.declared
        hi = self.xs[-1]
        above = q > hi
        if above.any():
            out = np.where(
                above,
                math.exp(self.log_sigmas[-1]) * (np.abs(q) / abs(hi)) ** gp,
                out,
            )
        if not self.even:
            lo = self.xs[0]
            below = q < lo
            if below.any():
                out = np.where(
                    below,
                    math.exp(self.log_sigmas[0]) * (np.abs(q) / abs(lo)) ** gm,
                    out,
                )
        return out

    def tail_exponents(self):
        return self.declared

    def tail_coefficients(self):
        gp = self.declared[1]
        cp = math.exp(self.log_sigmas[-1]) / abs(self.xs[-1]) ** gp
        if self.even:
            return (cp, cp)
        gm = self.declared[0]
        cm = math.exp(self.log_sigmas[0]) / abs(self.xs[0]) ** gm
        return (cm, cp)

    def tails_are_exact(self):
        return True

    def is_even(self):
        return self.even

    def label(self):
        src = self.source or f"{self.xs.size} points"
        return f"table:{src}"

    def to_spec(self):
        spec = {
            "kind": "table",
            "tail_exponents": list(self.declared),
            "even": self.even,
        }
        if self.source:
            spec["file"] = self.source
        return spec


def eval_sigma(profile, x):
    """sigma(x) for a profile; checked strictly positive."""
    return profile.eval(x)


def estimate_tail_exponent(profile):
    """(gamma_minus, gamma_plus); may raise TailUndetermined."""
    return profile.tail_exponents()


def _read_table_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"empty table file {path}")
    start = 1 if not _is_number(rows[0][0]) else 0
    xs, sigmas = [], []
    for row in rows[start:]:
        if not row:
            continue
        xs.append(float(row[0]))
        sigmas.append(float(row[1]))
    return np.array(xs), np.array(sigmas)


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def load_profile(spec, base_dir="."):
    """Build a profile from shorthand text, a spec dict, or a JSON path.

    Shorthand: ``poly:<gamma>``, ``expr:<text>``, ``table:<csv-path>``.
    Dict form mirrors the profile JSON schema, e.g.
    ``{"kind": "polynomial", "gamma": 2.0}``.
    """
    if isinstance(spec, SigmaProfile):
        return spec
    if isinstance(spec, str):
        if spec.startswith("poly:"):
            return PolynomialSigma(float(spec[5:]))
        if spec.startswith("expr:"):
            return ExpressionSigma(spec[5:])
        if spec.startswith("table:"):
            return load_profile({"kind": "table", "file": spec[6:]}, base_dir)
        if os.path.exists(os.path.join(base_dir, spec)):
            with open(os.path.join(base_dir, spec)) as fh:
                return load_profile(json.load(fh), base_dir)
        raise DomainError(
            f"cannot interpret profile spec {spec!r}; "
            "expected poly:<gamma>, expr:<text>, table:<path> or a JSON file"
        )
    if not isinstance(spec, dict):
        raise DomainError(f"bad profile spec {spec!r}")
    kind = spec.get("kind")
    if kind == "polynomial":
        return PolynomialSigma(spec["gamma"])
    if kind == "expression":
        return ExpressionSigma(spec["text"])
    if kind == "table":
        if "file" in spec:
            path = os.path.join(base_dir, spec["file"])
            xs, sigmas = _read_table_csv(path)
            source = spec["file"]
        else:
            xs = np.asarray(spec["x"], dtype=float)
            sigmas = np.asarray(spec["sigma"], dtype=float)
            source = None
        tails = spec.get("tail_exponents")
        if tails is None:
            raise DomainError("tabulated profiles require tail_exponents")
        return TabulatedSigma(
            xs, sigmas, tails, even=spec.get("even", False), source=source
        )
    raise DomainError(f"unknown profile kind {kind!r}")
