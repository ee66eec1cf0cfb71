"""Discretized nonlocal form and the bottom local Dirichlet eigenvalue.

The quadratic form (1/2) iint (f(x)-f(y))^2 C_a |x-y|**(-1-a) dx dy with
zero exterior condition is realized on equal cells over [-R, R] as a
graph Laplacian: exact kernel cell-pair masses

    W(i,j) = C_a [Psi(d-a) - Psi(c-a) - Psi(d-b) + Psi(c-b)],
    Psi(r) = r**(1-a) / (a (a-1)),

for separated cells [a,b], [c,d], plus a killing term per cell for the
mass sent to the excluded set and to the exterior of [-R, R].  For
1 < a < 2 the exact mass between touching cells is infinite (piecewise
constants fall outside the form domain), so the adjacent coupling is
replaced by the chord-moment matched weight

    W_1 = C_a h**(1-a) [ 1/((2-a)(3-a))
                         + 2 (2**(2-a) - 1)/(2-a) + (2 - 2**(3-a))/(3-a) ],

which reproduces the near-field energy of smooth functions (including
the same-cell share) and restores the classical 1/h limit as a -> 2.
The mass matrix is the plain cell mass of mu = sigma**(-alpha) dx, not
its normalization: every bound this eigenvalue is compared against is
normalization free.

The eigenvalue of the pencil (stiffness, mass) is found by inverse
iteration from a positive start; the stiffness is an M-matrix, so the
ground state is positive.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import measure
from .errors import (
    GridTooCoarse,
    IntegralDiverged,
    NoConvergence,
    PreconditionError,
)
from .green import GreenKernel, green_apply
from .quadrature import gauss_legendre_panels, power_tail_closure
from .special import AlphaConstants

__all__ = [
    "Grid",
    "FormSystem",
    "EigenResult",
    "assemble_form",
    "solve_lambda0",
    "lambda0_numeric",
    "rayleigh_upper",
    "variational_lower",
    "pair_coupling",
    "adjacent_coupling",
]

_DENSE_LIMIT = 4096


@dataclass(frozen=True)
class Grid:
    """Equal cells on [-R, R] with a killing-set description.

    excluded: 'punctured' zeroes the two cells adjacent to the origin,
    'interval' zeroes every cell meeting [-1, 1], 'halfline' zeroes all
    cells left of the origin.
    """

    R: float
    n: int
    excluded: str = "punctured"

    def __post_init__(self):
        if not self.R > 0:
            raise GridTooCoarse("truncation radius must be positive")
        if self.n < 4 or self.n % 2:
            raise GridTooCoarse("need an even cell count of at least 4")
        if self.excluded not in ("punctured", "interval", "halfline"):
            raise ValueError(f"unknown excluded set {self.excluded!r}")
        if self.excluded == "interval" and self.R <= 1.0 + self.h:
            raise GridTooCoarse(
                "interval-complement grid needs R well beyond 1"
            )

    @property
    def h(self):
        return 2.0 * self.R / self.n

    def centers(self):
        return -self.R + self.h * (np.arange(self.n) + 0.5)

    def active_mask(self):
        c = self.centers()
        if self.excluded == "punctured":
            mask = np.ones(self.n, dtype=bool)
            mask[self.n // 2 - 1] = False
            mask[self.n // 2] = False
            return mask
        if self.excluded == "halfline":
            return c > 0.0
        half = 0.5 * self.h
        return (np.abs(c) - half) >= 1.0  # cells fully outside [-1, 1]


def psi(r, alpha):
    """Second antiderivative of the jump kernel: r**(1-a)/(a(a-1))."""
    return r ** (1.0 - alpha) / (alpha * (alpha - 1.0))


def pair_coupling(cell_a, cell_b, alpha, C=None):
    """Exact kernel mass C_a * iint over [a0,a1] x [b0,b1], separated cells.

    Telescopes in both arguments; infinite for touching cells, which is
    why the assembled form uses :func:`adjacent_coupling` there.
    """
    a0, a1 = cell_a
    b0, b1 = cell_b
    if a1 > b0:
        a0, a1, b0, b1 = b0, b1, a0, a1
    if a1 >= b0:
        raise ValueError("cells must be strictly separated")
    if C is None:
        C = AlphaConstants.for_alpha(alpha).C_alpha
    return C * (
        psi(b1 - a0, alpha)
        - psi(b0 - a0, alpha)
        - psi(b1 - a1, alpha)
        + psi(b0 - a1, alpha)
    )


def adjacent_coupling(h, alpha, C=None):
    """Chord-moment matched weight between touching cells of width h."""
    if C is None:
        C = AlphaConstants.for_alpha(alpha).C_alpha
    a = alpha
    bracket = (
        1.0 / ((2.0 - a) * (3.0 - a))
        + 2.0 * (2.0 ** (2.0 - a) - 1.0) / (2.0 - a)
        + (2.0 - 2.0 ** (3.0 - a)) / (3.0 - a)
    )
    return C * h ** (1.0 - a) * bracket


@dataclass(frozen=True)
class FormSystem:
    """Assembled pencil: stiffness K (dense, active cells) and mass m."""

    stiffness: np.ndarray
    mass: np.ndarray
    kill: np.ndarray
    centers: np.ndarray
    alpha: float
    grid: Grid | None = None

    def __post_init__(self):
        K = self.stiffness
        if K is not None:
            if not np.allclose(K, K.T, atol=1e-12 * max(1.0, np.abs(K).max())):
                raise ValueError("stiffness must be symmetric")
        if np.any(self.mass <= 0):
            raise ValueError("mass must be positive")


def _coupling_vector(n, h, alpha, C):
    """w[k-1] = coupling between cells k apart, k = 1..n-1."""
    w = np.empty(max(n - 1, 1))
    w[0] = adjacent_coupling(h, alpha, C)
    if n > 2:
        k = np.arange(2, n, dtype=float)
        w[1:] = C * (
            psi((k + 1.0) * h, alpha)
            - 2.0 * psi(k * h, alpha)
            + psi((k - 1.0) * h, alpha)
        )
    return w


def _row_total(w, h, alpha, C):
    """Full-lattice row mass: both adjacents plus the telescoped rest."""
    return 2.0 * w[0] + 2.0 * C * (psi(h, alpha) - psi(2.0 * h, alpha))


def assemble_form(profile, alpha, grid):
    """Stiffness and mass of the killed form on the grid's active cells."""
    consts = AlphaConstants.for_alpha(alpha)
    a, C = consts.alpha, consts.C_alpha
    active = grid.active_mask()
    idx = np.flatnonzero(active)
    m = idx.size
    if m < 4:
        raise GridTooCoarse(
            f"only {m} active cells; refine the grid or enlarge R"
        )
    h = grid.h
    w = _coupling_vector(grid.n, h, a, C)
    if not np.all(np.isfinite(w)) or w[-1] <= 0.0:
        raise GridTooCoarse("cell couplings underflow at this resolution")
    rho = _row_total(w, h, a, C)
    if m > _DENSE_LIMIT:
        raise GridTooCoarse(
            f"{m} active cells exceeds the dense assembly limit "
            f"{_DENSE_LIMIT}; use lambda0_numeric with a coarser n"
        )
    D = np.abs(idx[:, None] - idx[None, :])
    W = np.zeros((m, m))
    off = D > 0
    W[off] = w[D[off] - 1]
    K = -W
    row = W.sum(axis=1)
    kill = rho - row
    np.fill_diagonal(K, row + kill)

    centers = grid.centers()[idx]
    gl_x, gl_w = np.polynomial.legendre.leggauss(12)
    nodes = centers[:, None] + 0.5 * h * gl_x[None, :]
    dens = profile.eval(nodes.ravel()).reshape(nodes.shape) ** (-a)
    mass = 0.5 * h * dens @ gl_w
    return FormSystem(
        stiffness=K, mass=mass, kill=kill, centers=centers, alpha=a, grid=grid
    )


@dataclass(frozen=True)
class EigenResult:
    lambda0: float
    eigvec: np.ndarray
    residual: float
    iterations: int
    R: float | None = None
    n: int | None = None

    def __post_init__(self):
        if self.residual > 1e-8:
            raise ValueError("eigensolve accepted with residual above 1e-8")


def solve_lambda0(system, tol=1e-10, max_iter=500):
    """Smallest eigenvalue of (K, diag(m)) by inverse iteration.

    The start vector is positive and K is an M-matrix, so the iteration
    stays positive and converges to the ground state; the result is
    deterministic for a given system.
    """
    K, mass = system.stiffness, system.mass
    m = mass.size
    if m == 1:
        lam = float(K[0, 0] / mass[0])
        return EigenResult(
            lambda0=lam,
            eigvec=np.array([1.0 / math.sqrt(mass[0])]),
            residual=0.0,
            iterations=0,
            R=system.grid.R if system.grid else None,
            n=system.grid.n if system.grid else None,
        )
    try:
        factor = cho_factor(K)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"stiffness not positive definite: {exc}") from exc
    v = np.ones(m)
    lam = residual = math.inf
    for it in range(1, max_iter + 1):
        u = cho_solve(factor, mass * v)
        u /= math.sqrt(u @ (mass * u))
        lam = float(u @ (K @ u))
        residual = float(
            np.linalg.norm(K @ u - lam * mass * u)
            / np.linalg.norm(mass * u)
        )
        v = u
        if residual <= tol:
            break
    else:
        raise NoConvergence(
            f"inverse iteration stalled after {max_iter} steps",
            residual=residual,
        )
    if np.all(v <= 0.0):
        v = -v
    return EigenResult(
        lambda0=lam,
        eigvec=v,
        residual=residual,
        iterations=it,
        R=system.grid.R if system.grid else None,
        n=system.grid.n if system.grid else None,
    )


def _worker_count():
    env = os.environ.get("STABLE_ERGO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def lambda0_numeric(profile, alpha, excluded, R_list, n, tol=1e-10):
    """One eigensolve per truncation radius, constant cell width.

    The cell width is pinned to the largest radius (h = 2 max(R)/n) so
    the killing set of the punctured domain does not widen with R and the
    sequence isolates the truncation effect, which is monotone: smaller
    domains have larger bottom eigenvalues.
    """
    R_list = [float(R) for R in R_list]
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise PreconditionError("R_list must be strictly increasing")
    h = 2.0 * max(R_list) / int(n)

    def solve_one(R):
        nR = int(round(2.0 * R / h))
        nR += nR % 2
        grid = Grid(R=R, n=nR, excluded=excluded)
        return solve_lambda0(assemble_form(profile, alpha, grid), tol=tol)

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        return list(pool.map(solve_one, R_list))


def _capped_test_function(x0, alpha):
    e = alpha - 1.0

    def g(y):
        y = np.asarray(y, dtype=float)
        return np.minimum(np.abs(y), x0) ** e

    return g


def rayleigh_upper(profile, alpha, x0_grid=None, spec=None, points_per_side=24):
    """Upper bound on the origin-killed bottom eigenvalue.

    For each cap location x0 the test function g = (|y| ^ x0)**(alpha-1)
    gives lambda0 <= sup_{x>0} g/Ug + sup_{x<0} g/Ug; the reported value
    is the minimum over the cap grid.  The ratio is scale free, so the
    unnormalized Green operator can be used directly.  Each supremum
    includes the |x| -> inf limit candidate.
    """
    consts = AlphaConstants.for_alpha(alpha)
    kernel = GreenKernel.punctured(alpha)
    if x0_grid is None:
        x0_grid = np.geomspace(0.1, 30.0, 9)
    a = consts.alpha

    best = math.inf
    for x0 in np.asarray(x0_grid, dtype=float):
        g = _capped_test_function(x0, a)
        # limit of Ug as |x| -> inf: (omega/2) int |y|**(a-1)-capped g dmu
        # evaluated exactly as (omega/2) int g(y) |y|**(a-1)... matches the
        # kernel limit G(x, y) -> (omega/2)|y|**(a-1)
        cap_mass = _cap_weighted_mass(profile, alpha, g)
        u_inf = 0.5 * consts.omega_alpha * cap_mass
        total = 0.0
        for side in (+1, -1):
            xs = side * np.geomspace(x0 * 1e-2, x0 * 1e3, points_per_side)
            sup = max(
                float(g(np.asarray(x))) /
                green_apply(kernel, profile, g, float(x), spec)
                for x in xs
            )
            sup = max(sup, x0 ** (a - 1.0) / u_inf)
            total += sup
        best = min(best, total)
    return best


def _cap_weighted_mass(profile, alpha, g):
    """int |y|**(alpha-1) g(y) dmu over the line; inf when divergent.

    An infinite value is legitimate: it only removes the |x| -> inf sup
    candidate in the Rayleigh construction (Ug grows without bound, so
    the ratio tends to zero there).
    """
    a = float(alpha)

    def integrand(y):
        y = np.asarray(y, dtype=float)
        return np.abs(y) ** (a - 1.0) * g(y) * profile.eval(y) ** (-a)

    val = gauss_legendre_panels(integrand, np.linspace(-1.0, 1.0, 9))
    for side in (+1, -1):
        def one_sided(y):
            return integrand(side * np.abs(y))

        try:
            tail = power_tail_closure(one_sided, 1e6)
        except IntegralDiverged:
            return math.inf
        val += gauss_legendre_panels(one_sided, np.geomspace(1.0, 1e6, 25))
        val += tail
    return val


def variational_lower(profile, alpha, excluded="punctured", f=None,
                      sample_grid=None, spec=None):
    """Lower bound on lambda0(B) as inf over samples of f / U^B f.

    Default f = |x|**((alpha-1)/2), the choice that realizes the
    closed-form bounds.  f must vanish at the killing boundary.
    """
    a = AlphaConstants.for_alpha(alpha).alpha
    if excluded == "punctured":
        kernel = GreenKernel.punctured(alpha)
        boundary = (0.0,)
    elif excluded == "halfline":
        kernel = GreenKernel.halfline(alpha)
        boundary = (0.0,)
    elif excluded == "interval":
        kernel = GreenKernel.complement_interval(alpha)
        boundary = (-1.0, 1.0)
    else:
        raise ValueError(f"unknown domain {excluded!r}")

    if f is None:
        if excluded == "interval":
            def f(y):
                y = np.asarray(y, dtype=float)
                return np.maximum(np.abs(y) - 1.0, 0.0) ** (0.5 * (a - 1.0))
        else:
            def f(y):
                return np.abs(np.asarray(y, dtype=float)) ** (0.5 * (a - 1.0))
    for b in boundary:
        _assert_zero_at(f, b)

    if sample_grid is None:
        half = np.geomspace(1e-3, 1e3, 25)
        if excluded == "punctured":
            sample_grid = np.concatenate([-half[::-1], half])
        elif excluded == "halfline":
            sample_grid = half
        else:
            shifted = 1.0 + np.geomspace(1e-3, 1e3, 25)
            sample_grid = np.concatenate([-shifted[::-1], shifted])

    worst = math.inf
    for x in np.asarray(sample_grid, dtype=float):
        fx = float(f(np.asarray(x)))
        u = green_apply(kernel, profile, f, float(x), spec)
        if not u > 0.0:
            raise IntegralDiverged(f"U f vanished at x={x}")
        worst = min(worst, fx / u)
    return worst


def _assert_zero_at(f, point):
    probe = abs(float(f(np.asarray(point, dtype=float))))
    ref = abs(float(f(np.asarray(point + 2.0, dtype=float)))) + 1e-30
    if probe > 1e-9 * ref:
        raise PreconditionError(
            f"test function must vanish at the killing boundary {point}; "
            f"got {probe!r}"
        )
