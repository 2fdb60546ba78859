"""Weight catalog with analytic gradients/p-Laplacians and the weak-form
sign checker.

The central sufficient criterion verified by this toolkit says: if a
nonnegative weight rho satisfies -Delta_p rho >= 0 in the weak sense,

    integral |grad rho|^(p-2) (grad rho . grad phi) dv_g >= 0

for every nonnegative compactly supported test phi, then a Hardy
inequality with the explicit constant ((p-1)/p)^p holds.  On the 1D
reductions used here the weak functional becomes

    integral s(t) g(t)^p |rho'|^(p-2) rho' phi' dt,

with s the volume density and g the gradient factor, which is what
``weak_superharmonicity_check`` evaluates over a family of bump test
functions.  ``sign=+1`` tests p-superharmonicity, ``sign=-1`` tests
p-subharmonicity (the Caccioppoli hypothesis).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import BSpline

from .errors import (
    InvalidArgumentError,
    ParabolicModelError,
    UnsupportedModelError,
    ZeroDenominatorError,
)
from .geometry import HALF_PLANE, INTERVAL, ModelManifold
from .grids import GridFunction, RadialGrid, cell_gauss, derivative_values

#: relative tolerance separating quadrature noise from a genuine sign
#: violation (calibrated for n >= 500 node grids)
TOL_WEAK = 1e-8

#: bump half-widths in grid cells used by the checker
BUMP_WIDTHS = (3, 9)


@dataclass
class WeightSpec:
    """A weight rho with closed-form value, coordinate derivative, and
    p-Laplacian where analytic.

    ``rho_prime`` is the signed derivative in the reduction coordinate;
    the Riemannian gradient norm is g(t) * |rho_prime(t)|.
    """

    name: str
    family: str
    model: ModelManifold
    p: float
    rho: Callable
    rho_prime: Callable
    plap: Callable | None = None
    analytic_plap: bool = False
    alpha: float = 0.0
    params: dict = field(default_factory=dict)

    def grad_norm(self, t):
        return self.model.gradient_factor(t) * np.abs(self.rho_prime(t))

    def scaled(self, lam: float) -> "WeightSpec":
        """The weight lam * rho (same sign structure, scaled functional)."""
        return WeightSpec(
            name=f"{lam}*{self.name}",
            family=self.family,
            model=self.model,
            p=self.p,
            rho=lambda t, f=self.rho: lam * f(t),
            rho_prime=lambda t, f=self.rho_prime: lam * f(t),
            plap=None,
            analytic_plap=False,
            alpha=self.alpha,
            params=dict(self.params),
        )


def _power_weight(model: ModelManifold, p: float, beta: float) -> WeightSpec:
    if beta == 0:
        raise InvalidArgumentError("power weight needs beta != 0")

    def rho(t):
        return np.asarray(t, dtype=float) ** beta

    def rho_prime(t):
        return beta * np.asarray(t, dtype=float) ** (beta - 1.0)

    def plap(t):
        t = np.asarray(t, dtype=float)
        if model.kind == INTERVAL:
            t_lap = np.zeros_like(t)
        else:
            t_lap = t * model.laplacian_of_distance(t)
        bracket = (beta - 1.0) * (p - 1.0) + t_lap
        return (
            abs(beta) ** (p - 2.0)
            * beta
            * t ** ((beta - 1.0) * (p - 1.0) - 1.0)
            * bracket
        )

    return WeightSpec(
        name=f"power:beta={beta:g}",
        family="power",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        plap=plap,
        analytic_plap=True,
        params={"beta": beta},
    )


def _log_weight(model: ModelManifold, p: float, side: str) -> WeightSpec:
    """rho = -ln t on (0, 1) (side="inner") or rho = ln t on (1, inf)."""
    if model.kind in (HALF_PLANE,):
        raise UnsupportedModelError("log weight defined on radial/interval models")
    sgn = -1.0 if side == "inner" else 1.0

    def rho(t):
        return sgn * np.log(np.asarray(t, dtype=float))

    def rho_prime(t):
        return sgn / np.asarray(t, dtype=float)

    def plap(t):
        t = np.asarray(t, dtype=float)
        if model.kind == INTERVAL:
            t_lap = np.zeros_like(t)
        else:
            t_lap = t * model.laplacian_of_distance(t)
        # flux of sgn*ln t is sgn * s(t) t^(1-p); differentiate and divide by s
        return sgn * t ** (-p) * (t_lap - (p - 1.0))

    return WeightSpec(
        name=f"log:{side}",
        family="log",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        plap=plap,
        analytic_plap=True,
        params={"side": side},
    )


def _rlogr_weight(model: ModelManifold, p: float) -> WeightSpec:
    """rho = -t ln t, positive on (0, 1); p-Laplacian sign is not constant."""

    def rho(t):
        t = np.asarray(t, dtype=float)
        return -t * np.log(t)

    def rho_prime(t):
        return -(np.log(np.asarray(t, dtype=float)) + 1.0)

    return WeightSpec(
        name="rlogr",
        family="rlogr",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        analytic_plap=False,
    )


def _halfplane_height_weight(model: ModelManifold, p: float) -> WeightSpec:
    if model.kind != HALF_PLANE:
        raise UnsupportedModelError("height weight lives on the half-plane model")

    def rho(t):
        return np.asarray(t, dtype=float) * 1.0

    def rho_prime(t):
        return np.ones_like(np.asarray(t, dtype=float))

    def plap(t):
        # Delta_H of y is 0; for general p the flux s g^p |rho'|^(p-2) rho'
        # equals y^(p-2), giving (p-2) y^(p-1)
        t = np.asarray(t, dtype=float)
        return (p - 2.0) * t ** (p - 1.0)

    return WeightSpec(
        name="halfplane-y",
        family="halfplane-y",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        plap=plap,
        analytic_plap=True,
    )


def _distance_to_boundary_weight(model: ModelManifold, p: float) -> WeightSpec:
    if model.kind != INTERVAL:
        raise UnsupportedModelError("distance-to-boundary weight needs an interval")
    a, b = model.a, model.b

    def rho(t):
        t = np.asarray(t, dtype=float)
        return np.minimum(t - a, b - t)

    def rho_prime(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0.5 * (a + b), 1.0, -1.0)

    return WeightSpec(
        name="dist-boundary",
        family="dist-boundary",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        analytic_plap=False,
    )


def _constant_weight(model: ModelManifold, p: float, c: float) -> WeightSpec:
    if c <= 0:
        raise InvalidArgumentError("constant weight needs c > 0")
    return WeightSpec(
        name=f"constant:c={c:g}",
        family="constant",
        model=model,
        p=p,
        rho=lambda t: np.full_like(np.asarray(t, dtype=float), c),
        rho_prime=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        plap=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        analytic_plap=True,
        params={"c": c},
    )


def weight_from_samples(
    name: str, model: ModelManifold, p: float, grid: RadialGrid, values: np.ndarray
) -> WeightSpec:
    """Wrap a sampled weight (e.g. an eigenfunction) as a WeightSpec.

    Values and the finite-difference derivative are linearly interpolated
    between nodes; outside the grid the weight is frozen at its endpoint
    values.
    """
    values = np.asarray(values, dtype=float)
    dvals = derivative_values(grid.nodes, values)
    nodes = grid.nodes

    def rho(t):
        return np.interp(np.asarray(t, dtype=float), nodes, values)

    def rho_prime(t):
        return np.interp(np.asarray(t, dtype=float), nodes, dvals)

    return WeightSpec(
        name=name,
        family="sampled",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        analytic_plap=False,
    )


def green_weight_radial(model: ModelManifold, p: float, grid: RadialGrid) -> WeightSpec:
    """Radial Green-type profile rho(t) = integral_t^hi s(tau)^(-1/(p-1)) dtau.

    Requires a p-hyperbolic model (the profile degenerates to the constant 0
    in the parabolic case); the pole sits at the radial origin.
    """
    from .capacity import classify_parabolicity  # local import, no cycle

    if not model.is_radial:
        raise UnsupportedModelError("Green profile defined on radial models")
    if grid.lo <= 0:
        raise InvalidArgumentError("Green profile needs grid.lo > 0")
    cls = classify_parabolicity(model, p, a=grid.lo)
    if cls.classification == "p_parabolic":
        raise ParabolicModelError(
            f"{model.kind}(N={model.dim}) is {p}-parabolic: Green integral diverges"
        )

    def inv_density_power(t):
        return np.exp(-model.log_volume_density(t) / (p - 1.0))

    pts, wts = cell_gauss(grid.nodes, 8)
    cell_ints = np.sum(wts * inv_density_power(pts), axis=1)
    # suffix[i] = integral from node i to the last node
    suffix = np.concatenate([np.cumsum(cell_ints[::-1])[::-1], [0.0]])
    nodes = grid.nodes

    def rho(t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, nodes, suffix)

    def rho_prime(t):
        return -inv_density_power(np.asarray(t, dtype=float))

    return WeightSpec(
        name="green",
        family="green",
        model=model,
        p=p,
        rho=rho,
        rho_prime=rho_prime,
        plap=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        analytic_plap=True,
        params={"hi": grid.hi},
    )


def rho_catalog_entry(name: str, model: ModelManifold, p: float, **params) -> WeightSpec:
    """Resolve a catalog weight by family name.

    Known families: power (beta), log (side), rlogr, dist-boundary,
    halfplane-y, constant (c).  Green and eigenfunction weights are built
    by ``green_weight_radial`` and ``weight_from_samples`` because they
    need a grid.
    """
    if name == "power":
        return _power_weight(model, p, float(params["beta"]))
    if name == "log":
        return _log_weight(model, p, params.get("side", "inner"))
    if name == "rlogr":
        return _rlogr_weight(model, p)
    if name == "dist-boundary":
        return _distance_to_boundary_weight(model, p)
    if name == "halfplane-y":
        return _halfplane_height_weight(model, p)
    if name == "constant":
        return _constant_weight(model, p, float(params.get("c", 1.0)))
    raise InvalidArgumentError(f"unknown weight family {name!r}")


def parse_weight(spec: str, model: ModelManifold, p: float) -> WeightSpec:
    """Parse config strings like "power:beta=-1" or "log:side=inner"."""
    family, _, rest = spec.partition(":")
    params: dict = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not _:
                # bare value shorthand, e.g. "log:inner"
                key, val = {"log": "side"}.get(family, "value"), key
            try:
                params[key] = float(val)
            except ValueError:
                params[key] = val
    return rho_catalog_entry(family, model, p, **params)


@dataclass
class CheckResult:
    """Outcome of the weak-form sign check."""

    passed: bool
    worst_value: float
    worst_raw: float
    n_bumps: int
    sign: int


def _bump_splines(grid: RadialGrid, n_tests: int):
    """Cubic B-spline bumps with knots on grid nodes, two widths each.

    Centers are equispaced densely enough that adjacent supports of each
    width overlap (a kink anywhere on the grid is straddled by some bump),
    and never fewer than n_tests per width.

    Yields (spline, first_cell, last_cell) with support spanning the cells
    [first_cell, last_cell).
    """
    n = grid.n
    out = []
    for w in BUMP_WIDTHS:
        if 2 * w + 1 > n:
            continue
        count = max(n_tests, math.ceil((n - 1) / w) + 1)
        centers = np.linspace(w, n - 1 - w, count)
        for c in np.unique(np.round(centers).astype(int)):
            half = max(1, w // 2)
            kn = [c - w, c - half, c, c + half, c + w]
            knots = grid.nodes[kn]
            out.append((BSpline.basis_element(knots, extrapolate=False), kn[0], kn[-1]))
    return out


def _flux_factory(w, p, model):
    def flux(t):
        rp = w.rho_prime(t)
        g = model.gradient_factor(t)
        s = np.exp(model.log_volume_density(t))
        return s * g ** p * np.sign(rp) * np.abs(rp) ** (p - 1.0)

    return flux


def weak_superharmonicity_check(
    w,
    grid: RadialGrid,
    n_tests: int = 8,
    sign: int = 1,
    *,
    p: float | None = None,
    model: ModelManifold | None = None,
    tol: float = TOL_WEAK,
) -> CheckResult:
    """Test sign * (-Delta_p rho) >= 0 in the weak sense over bump functions.

    ``w`` is a WeightSpec (closed forms integrated per-cell with Gauss
    quadrature) or a GridFunction (piecewise-linear flux form, exact in the
    test function).  Each bump value is normalized by the same integral
    taken with absolute values, so ``worst_value`` is dimensionless and
    insensitive to scaling of rho and phi.
    """
    if isinstance(w, WeightSpec):
        model = w.model
        p = w.p if p is None else p
        flux = _flux_factory(w, p, model)
        sampled = None
    else:
        if model is None or p is None:
            raise InvalidArgumentError("raw grid weights need model= and p=")
        sampled = np.asarray(w.values if isinstance(w, GridFunction) else w, float)
        flux = None

    nodes = grid.nodes
    if sampled is not None:
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        h = np.diff(nodes)
        slope = np.diff(sampled) / h
        g = model.gradient_factor(mid)
        s = np.exp(model.log_volume_density(mid))
        cell_flux = s * g ** p * np.sign(slope) * np.abs(slope) ** (p - 1.0)

    worst = np.inf
    worst_raw = np.inf
    bumps = _bump_splines(grid, n_tests)
    for spline, i0, i1 in bumps:
        dspline = spline.derivative()
        if flux is not None:
            pts, wts = cell_gauss(nodes[i0 : i1 + 1], 8)
            dphi = np.nan_to_num(dspline(pts))
            fx = flux(pts)
            raw = float(np.sum(wts * fx * dphi))
            norm = float(np.sum(np.abs(wts * fx * dphi)))
        else:
            phi = np.nan_to_num(spline(nodes[i0 : i1 + 1]))
            dphi = np.diff(phi)
            fx = cell_flux[i0:i1]
            raw = float(np.dot(fx, dphi))
            norm = float(np.sum(np.abs(fx * dphi)))
        val = sign * raw
        rel = val / norm if norm > 0 else 0.0
        if rel < worst:
            worst = rel
            worst_raw = val
    if not bumps:
        raise InvalidArgumentError("grid too coarse for any test bump")
    return CheckResult(
        passed=bool(worst >= -tol),
        worst_value=float(worst),
        worst_raw=float(worst_raw),
        n_bumps=len(bumps),
        sign=sign,
    )


def classify_weight_sign(
    w, grid: RadialGrid, n_tests: int = 8, **kw
) -> str:
    """Classify a weight as superharmonic / subharmonic / harmonic / indefinite
    from the two one-sided weak checks."""
    sup = weak_superharmonicity_check(w, grid, n_tests, sign=+1, **kw)
    sub = weak_superharmonicity_check(w, grid, n_tests, sign=-1, **kw)
    if sup.passed and sub.passed:
        return "harmonic"
    if sup.passed:
        return "superharmonic"
    if sub.passed:
        return "subharmonic"
    return "indefinite"


def chain_rule_identity_check(w: WeightSpec, gamma: float, grid: RadialGrid) -> float:
    """Relative quadrature error in
    integral |grad rho^gamma|^p = gamma^p integral rho^(p(gamma-1)) |grad rho|^p.

    Both sides are evaluated with the grid's trapezoid rule; the left side
    differentiates rho^gamma by finite differences, so the error is O(n^-2).
    """
    t = grid.nodes
    p = w.p
    s = np.exp(w.model.log_volume_density(t))
    g = w.model.gradient_factor(t)
    rho = w.rho(t)
    pow_rho = rho ** gamma
    lhs = grid.integrate((g * np.abs(derivative_values(t, pow_rho))) ** p * s)
    rhs = grid.integrate(
        rho ** (p * (gamma - 1.0)) * (g * np.abs(w.rho_prime(t))) ** p * s
    ) * abs(gamma) ** p
    if rhs < 1e-300:
        # constant weights: both sides vanish (lhs only to FD roundoff)
        if lhs < 1e-12:
            return 0.0
        raise ZeroDenominatorError("chain-rule reference integral vanished")
    return abs(lhs - rhs) / rhs


@dataclass
class SignedCatalogEntry:
    """Weight with a known analytic sign, for checker validation."""

    weight: WeightSpec
    grid: RadialGrid
    expected: str  # "superharmonic" | "subharmonic" | "harmonic"


def signed_catalog() -> list[SignedCatalogEntry]:
    """Eight weights of known sign: harmonic powers, a strict subharmonic
    and a strict superharmonic power, the interval distance kink, the two
    log weights on either side of 1, and the half-plane height."""
    from .geometry import (
        CoordinateRange,
        euclidean_radial,
        half_plane_poincare,
        interval,
    )
    from .grids import LOG, build_grid

    e3, e4 = euclidean_radial(3), euclidean_radial(4)
    ball = CoordinateRange(1e-2, 0.99, open_lo=True)
    outer = CoordinateRange(1.01, 1e2, open_hi=True)
    wide = CoordinateRange(1e-2, 1e2, open_lo=True, open_hi=True)
    unit = interval(0.0, 1.0)
    entries = [
        SignedCatalogEntry(
            _power_weight(e3, 2.0, -1.0), build_grid(wide, 900, LOG), "harmonic"
        ),
        SignedCatalogEntry(
            _power_weight(e4, 3.0, -0.5), build_grid(wide, 900, LOG), "harmonic"
        ),
        SignedCatalogEntry(
            _power_weight(e3, 2.0, 2.0), build_grid(wide, 900, LOG), "subharmonic"
        ),
        SignedCatalogEntry(
            _power_weight(e4, 2.0, -1.0), build_grid(wide, 900, LOG), "superharmonic"
        ),
        SignedCatalogEntry(
            _distance_to_boundary_weight(unit, 2.0),
            build_grid(CoordinateRange(0.0, 1.0), 901, "linear"),
            "superharmonic",
        ),
        SignedCatalogEntry(
            _log_weight(e3, 2.0, "inner"), build_grid(ball, 900, LOG), "superharmonic"
        ),
        SignedCatalogEntry(
            _log_weight(e3, 2.0, "outer"), build_grid(outer, 900, LOG), "subharmonic"
        ),
        SignedCatalogEntry(
            _halfplane_height_weight(half_plane_poincare(), 2.0),
            build_grid(CoordinateRange(1e-2, 1e2, open_lo=True), 900, LOG),
            "harmonic",
        ),
    ]
    return entries
