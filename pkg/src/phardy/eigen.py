"""First Dirichlet eigenpair of the 1D p-Laplacian and the eigenfunction
Hardy/Poincare inequalities built from it."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollarGradientError, InvalidArgumentError
from .functionals import (
    InequalityCase,
    SidePair,
    _masked_integral,
    _u_data,
    weighted_hardy_case,
    weighted_hardy_sides,
)
from .geometry import CoordinateRange, INTERVAL, ModelManifold
from .grids import GridFunction, RadialGrid, build_grid
from .optimize import _descend_quotient, _P1Forms, minimize_rayleigh_p2
from .weights import weight_from_samples

TOL_EIG_P2 = 1e-6
TOL_EIG_GENERAL = 1e-4


@dataclass
class EigenPair:
    """First eigenpair, with phi1 positive inside and sup-normalized to 1."""

    lambda1: float
    phi1: GridFunction
    residual: float
    model: ModelManifold
    p: float
    converged: bool
    iterations: int


def _eigen_densities(model: ModelManifold, p: float):
    def a_fn(t):
        return np.exp(model.log_volume_density(t))

    def b_fn(t):
        return model.gradient_factor(t) ** p * np.exp(model.log_volume_density(t))

    return a_fn, b_fn


def _weak_residual(forms: _P1Forms, u: np.ndarray, lam: float, p: float) -> float:
    """Relative discrete-form norm of -Delta_p phi - lambda |phi|^{p-2} phi."""
    kp = forms.energy_grad(u, p) / p
    mp = forms.mass_grad(u, p) / p
    r = (kp - lam * mp)[1:-1]
    scale = np.linalg.norm(kp[1:-1])
    return float(np.linalg.norm(r) / scale) if scale > 0 else 0.0


def first_eigenpair(
    model: ModelManifold,
    p: float,
    rng: CoordinateRange,
    grid: RadialGrid | None = None,
    n: int = 2000,
) -> EigenPair:
    """Solve -Delta_p phi = lambda |phi|^{p-2} phi with Dirichlet ends.

    p = 2 uses inverse power iteration on the P1 pencil; p != 2 descends
    the p-Rayleigh quotient with a positivity projection each step.
    """
    if not math.isfinite(rng.hi):
        raise InvalidArgumentError("eigenproblem needs a bounded range")
    if grid is None:
        grid = build_grid(rng, n, "linear")
    a_fn, b_fn = _eigen_densities(model, p)
    if p == 2.0:
        res = minimize_rayleigh_p2(model, grid, a_fn, b_fn)
        lam, u, iters, conv = res.quotient, res.minimizer.values, res.iterations, res.converged
        tol = TOL_EIG_P2
    else:
        x = grid.to_coord(grid.nodes)
        seed = np.sin(math.pi * (x - x[0]) / (x[-1] - x[0]))
        lam, u, iters, conv, _ = _descend_quotient(
            grid, a_fn, b_fn, p, seed, positivity=True, rtol=1e-10
        )
        tol = TOL_EIG_GENERAL
    forms = _P1Forms(grid, a_fn, b_fn)
    u = np.abs(u)
    u = u / np.max(u)
    residual = _weak_residual(forms, u, lam, p)
    return EigenPair(
        lambda1=lam,
        phi1=GridFunction(grid, u, dirichlet_zero=True),
        residual=residual,
        model=model,
        p=p,
        converged=bool(conv and residual < tol),
        iterations=iters,
    )


def eigen_weight(pair: EigenPair):
    """The first eigenfunction as a catalog weight."""
    return weight_from_samples(
        "eigenfunction", pair.model, pair.p, pair.phi1.grid, pair.phi1.values
    )


def eigen_hardy_case(pair: EigenPair, alpha: float = 0.0) -> InequalityCase:
    if alpha >= pair.p - 1.0:
        raise InvalidArgumentError("eigenfunction Hardy needs alpha < p-1")
    case = weighted_hardy_case(
        pair.model,
        eigen_weight(pair),
        alpha,
        case_id=f"eigen-hardy[{pair.model.kind}|p={pair.p:g}|alpha={alpha:g}]",
    )
    return case


def eigen_hardy_check(pair: EigenPair, p: float, alpha: float, u: GridFunction) -> SidePair:
    """Weighted Hardy sides with rho = phi1 and constant ((p-1-alpha)/p)^p."""
    if p != pair.p:
        raise InvalidArgumentError("p must match the eigenpair")
    return weighted_hardy_sides(eigen_hardy_case(pair, alpha), u)


def poincare_eigen_constant(pair: EigenPair, s: float) -> float:
    p = pair.p
    return pair.lambda1 * (p - 1.0 - s) ** (p - 1.0) / p ** p


def poincare_eigen_check(pair: EigenPair, p: float, s: float, u: GridFunction) -> SidePair:
    """lambda1 (p-1-s)^(p-1)/p^p  int phi1^s |u|^p  <=  int phi1^s |grad u|^p."""
    if not (0.0 < s < p - 1.0):
        raise InvalidArgumentError("need 0 < s < p-1")
    if p != pair.p:
        raise InvalidArgumentError("p must match the eigenpair")
    t, g, sd, au, gu = _u_data(pair.model, u)
    phi = np.interp(t, pair.phi1.grid.nodes, pair.phi1.values)
    lhs = _masked_integral(u.grid, au ** p, phi ** s * sd)
    rhs = _masked_integral(u.grid, gu ** p, phi ** s * sd)
    c = poincare_eigen_constant(pair, s)
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - c * lhs)


def poincare_eigen_case(pair: EigenPair, s: float) -> InequalityCase:
    """Case wrapper so the suite runner and minimizers can drive (dis:poinc)."""
    if not (0.0 < s < pair.p - 1.0):
        raise InvalidArgumentError("need 0 < s < p-1")
    return InequalityCase(
        kind="poincare-eigen",
        model=pair.model,
        weight=eigen_weight(pair),
        params={"p": pair.p, "s": s},
        rng=CoordinateRange(pair.phi1.grid.lo, pair.phi1.grid.hi),
        formula_constant=poincare_eigen_constant(pair, s),
        case_id=f"poincare-eigen[{pair.model.kind}|p={pair.p:g}|s={s:g}]",
    )


@dataclass
class CompositeConstant:
    value: float
    collar_gradient_min: float
    lipschitz_bound: float
    interior_min: float
    eps_split: float
    s: float


def distance_hardy_constant(
    pair: EigenPair, eps_split: float, s: float | None = None
) -> CompositeConstant:
    """Composite constant for the distance-from-boundary Hardy inequality.

    Splits the interval into a boundary collar (where the eigenfunction
    Hardy inequality controls 1/d^p through the collar gradient bound) and
    the interior (where the Poincare-type inequality does), and takes half
    the worse of the two explicit constants.
    """
    p = pair.p
    if s is None:
        s = 0.5 * (p - 1.0)
    if pair.model.kind != INTERVAL:
        raise InvalidArgumentError("composite constant implemented on intervals")
    t = pair.phi1.grid.nodes
    d = np.minimum(t - pair.model.a, pair.model.b - t)
    dphi = np.abs(pair.phi1.derivative())
    collar = d < eps_split
    if not np.any(collar) or not np.any(~collar):
        raise InvalidArgumentError("eps_split leaves an empty collar or interior")
    b_min = float(np.min(dphi[collar]))
    if b_min <= 0:
        raise CollarGradientError("eigenfunction gradient vanishes on the collar")
    lip = float(np.max(dphi))
    l_eps = float(np.min(pair.phi1.values[~collar]))
    c_collar = ((p - 1.0) / p) ** p * b_min ** p / lip ** p
    c_inner = poincare_eigen_constant(pair, s) * l_eps ** s * eps_split ** p
    return CompositeConstant(
        value=0.5 * min(c_collar, c_inner),
        collar_gradient_min=b_min,
        lipschitz_bound=lip,
        interior_min=l_eps,
        eps_split=eps_split,
        s=s,
    )


def distance_hardy_composite(
    pair: EigenPair, p: float, eps_split: float, u: GridFunction, s: float | None = None
) -> SidePair:
    """c int |u|^p / d^p <= int |grad u|^p with the computed composite c."""
    if p != pair.p:
        raise InvalidArgumentError("p must match the eigenpair")
    comp = distance_hardy_constant(pair, eps_split, s)
    t, g, sd, au, gu = _u_data(pair.model, u)
    d = np.minimum(t - pair.model.a, pair.model.b - t)
    with np.errstate(divide="ignore"):
        lhs_factor = d ** (-p) * sd
    lhs = _masked_integral(u.grid, au ** p, lhs_factor)
    rhs = _masked_integral(u.grid, gu ** p, sd)
    c = comp.value
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - c * lhs)
