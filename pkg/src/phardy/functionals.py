"""Left/right-hand sides of every inequality in the catalog.

Each ``*_sides`` operation reduces its inequality to 1D quadrature on
the grid carried by the test function: volume elements become the model
density s(t), Riemannian gradient norms become g(t)|u'(t)|.  The
returned SidePair carries the margin with the source inequality's
orientation, so
an inequality holds iff margin >= 0 up to discretization tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    HypothesisViolationError,
    InvalidArgumentError,
    NonFiniteIntegrandError,
    RelationViolationError,
    UnsupportedModelError,
    ZeroDenominatorError,
)
from .geometry import CoordinateRange, EUCLIDEAN, HALF_PLANE, ModelManifold
from .grids import GridFunction
from .weights import CheckResult, WeightSpec, weak_superharmonicity_check

#: discretization tolerance for margin/bound checks (n >= 2000 grids)
TOL_DISC = 1e-6


@dataclass
class SidePair:
    """Evaluated sides of one inequality for one test function.

    margin >= 0 means the inequality held; the constant is placed exactly
    where the source inequality puts it (on lhs for Hardy-type bounds, as
    a factor of rhs for the product-form interpolation bounds).
    """

    lhs: float
    rhs: float
    constant: float
    margin: float


@dataclass
class InequalityCase:
    """One configured inequality: weight, model, parameters and the
    constant evaluated from the closed-form formula."""

    kind: str
    model: ModelManifold
    weight: WeightSpec | None
    params: dict
    rng: CoordinateRange
    formula_constant: float
    case_id: str = ""
    hypothesis_mode: str | None = None  # "superharmonic" | "subharmonic" | None
    trivial: bool = False
    oracle_shift: float = 0.0  # (pi/L)^2 scale factor when the log oracle applies
    hypothesis_result: CheckResult | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.case_id:
            bits = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
            wname = self.weight.name if self.weight else "-"
            self.case_id = f"{self.kind}[{self.model.kind}|{wname}|{bits}]"
        if self.formula_constant < 0 or (self.formula_constant == 0 and not self.trivial):
            raise InvalidArgumentError("inequality constant must be positive")

    @property
    def p(self) -> float:
        return float(self.params["p"])


@dataclass
class VectorFieldCase:
    """Radial vector field h with a candidate divergence lower bound A_h."""

    name: str
    model: ModelManifold
    h_mag: Callable
    a_h: Callable


# ---------------------------------------------------------------------------
# quadrature helpers

def _density(model: ModelManifold, t):
    return np.exp(model.log_volume_density(t))


def _masked_integral(grid, base, factor) -> float:
    """Quadrature of base*factor treating 0 * inf as 0 (u vanishing where the
    weight is singular); raises where a genuinely non-finite product appears."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = base * factor
    vals = np.where(base == 0.0, 0.0, vals)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrandError(
            "non-finite integrand where the test function does not vanish"
        )
    return float(np.dot(grid.quad_weights, vals))


def _u_data(case_model: ModelManifold, u: GridFunction):
    t = u.grid.nodes
    g = case_model.gradient_factor(t)
    s = _density(case_model, t)
    return t, g, s, np.abs(u.values), g * np.abs(u.derivative())


def _require_hypothesis(case: InequalityCase):
    res = case.hypothesis_result
    if res is not None and not res.passed:
        raise HypothesisViolationError(
            f"{case.case_id}: weight failed its {case.hypothesis_mode} hypothesis "
            f"(worst normalized value {res.worst_value:.3e})"
        )


def validate_case_hypothesis(
    case: InequalityCase, grid=None, n_tests: int = 8
) -> CheckResult | None:
    """Run the weak-form check the case's hypothesis requires and cache it."""
    if case.hypothesis_mode is None or case.weight is None:
        return None
    if grid is None:
        raise InvalidArgumentError("hypothesis validation needs a grid")
    sign = +1 if case.hypothesis_mode == "superharmonic" else -1
    res = weak_superharmonicity_check(case.weight, grid, n_tests=n_tests, sign=sign)
    case.hypothesis_result = res
    return res


# ---------------------------------------------------------------------------
# sides

def weighted_hardy_sides(case: InequalityCase, u: GridFunction) -> SidePair:
    """Sides of the alpha-weighted Hardy inequality
    (|p-1-alpha|/p)^p  int rho^(alpha-p) |grad rho|^p |u|^p  <=  int rho^alpha |grad u|^p."""
    _require_hypothesis(case)
    p = case.p
    alpha = float(case.params.get("alpha", 0.0))
    t, g, s, au, gu = _u_data(case.model, u)
    rho = case.weight.rho(t)
    grad_rho = case.weight.grad_norm(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lhs_factor = rho ** (alpha - p) * grad_rho ** p * s
        rhs_factor = rho ** alpha * s
    lhs = _masked_integral(u.grid, au ** p, lhs_factor)
    rhs = _masked_integral(u.grid, gu ** p, rhs_factor)
    c = case.formula_constant
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - c * lhs)


def hardy_sides(case: InequalityCase, u: GridFunction) -> SidePair:
    """Plain Hardy sides; the alpha = 0 instance of the weighted form."""
    return weighted_hardy_sides(case, u)


def caccioppoli_sides(case: InequalityCase, u: GridFunction) -> SidePair:
    """((q+1)/p)^p int rho^q |grad rho|^p |u|^p <= int rho^(p+q) |grad u|^p
    for p-subharmonic rho."""
    _require_hypothesis(case)
    p = case.p
    q = float(case.params["q"])
    if q <= -1:
        raise InvalidArgumentError("Caccioppoli needs q > -1")
    t, g, s, au, gu = _u_data(case.model, u)
    rho = case.weight.rho(t)
    grad_rho = case.weight.grad_norm(t)
    lhs = _masked_integral(u.grid, au ** p, rho ** q * grad_rho ** p * s)
    rhs = _masked_integral(u.grid, gu ** p, rho ** (p + q) * s)
    c = case.formula_constant
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - c * lhs)


def divergence_lemma_sides(v: VectorFieldCase, u: GridFunction, p: float) -> SidePair:
    """int |u|^p A_h <= p^p int |h|^p / A_h^(p-1) |grad u|^p."""
    t, g, s, au, gu = _u_data(v.model, u)
    a_vals = v.a_h(t)
    h_vals = v.h_mag(t)
    if np.any((a_vals <= 0) & (h_vals != 0)):
        raise InvalidArgumentError("A_h must be positive where h does not vanish")
    lhs = _masked_integral(u.grid, au ** p, a_vals * s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rhs_factor = h_vals ** p / a_vals ** (p - 1.0) * s
    rhs = p ** p * _masked_integral(u.grid, gu ** p, rhs_factor)
    return SidePair(lhs=lhs, rhs=rhs, constant=p ** p, margin=rhs - lhs)


def gn_sides(case: InequalityCase, u: GridFunction) -> SidePair:
    """Weighted Gagliardo-Nirenberg sides for rho = d^alpha, |grad d| = 1:
    int |u|^s d^-(p-1) <= C (int |grad u|^p)^(1/p') (int |u|^delta)^(1/p)."""
    _require_hypothesis(case)
    if case.model.kind == HALF_PLANE:
        raise UnsupportedModelError("GN form needs |grad d| = 1 (radial/interval)")
    p = case.p
    alpha = float(case.params["alpha"])
    delta = float(case.params["delta"])
    if delta <= 0:
        raise InvalidArgumentError("need delta > 0")
    s_exp = p - 1.0 + delta / p
    if "s" in case.params and abs(case.params["s"] - s_exp) > 1e-12:
        raise RelationViolationError("s = p-1+delta/p", f"got s={case.params['s']}")
    t, g, s, au, gu = _u_data(case.model, u)
    lhs = _masked_integral(u.grid, au ** s_exp, t ** -(p - 1.0) * s)
    grad_term = _masked_integral(u.grid, gu ** p, s)
    mass_term = _masked_integral(u.grid, au ** delta, s)
    c = case.formula_constant
    rhs = c * grad_term ** (1.0 - 1.0 / p) * mass_term ** (1.0 / p)
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - lhs)


def uncertainty_sides(case: InequalityCase, u: GridFunction) -> SidePair:
    """Uncertainty-principle sides for rho = d^alpha, |grad d| = 1:
    int |u|^s <= C (int |grad u|^p)^(1/a) (int |u|^((as-p)/(a-1)) d^(p(a'-1)))^(1/a')."""
    _require_hypothesis(case)
    if case.model.kind == HALF_PLANE:
        raise UnsupportedModelError("uncertainty form needs |grad d| = 1")
    p = case.p
    alpha = float(case.params["alpha"])
    s_exp = float(case.params["s"])
    a = float(case.params["a"])
    if not (s_exp > 0 and a > 1):
        raise InvalidArgumentError("need s > 0 and a > 1")
    m_exp = (a * s_exp - p) / (a - 1.0)
    if m_exp <= 0:
        raise InvalidArgumentError(f"exponent (as-p)/(a-1) = {m_exp} must be positive")
    a_conj = a / (a - 1.0)
    t, g, s, au, gu = _u_data(case.model, u)
    lhs = _masked_integral(u.grid, au ** s_exp, s)
    grad_term = _masked_integral(u.grid, gu ** p, s)
    mixed_term = _masked_integral(u.grid, au ** m_exp, t ** (p * (a_conj - 1.0)) * s)
    c = case.formula_constant
    rhs = c * grad_term ** (1.0 / a) * mixed_term ** (1.0 / a_conj)
    return SidePair(lhs=lhs, rhs=rhs, constant=c, margin=rhs - lhs)


def hardy_sobolev_sides(
    case: InequalityCase,
    u: GridFunction,
    S_p: float | None = None,
    H_val: float | None = None,
) -> SidePair:
    """C2 (int rho^(p* theta) |u|^p*)^(1/p*) <= (int rho^(p theta) |grad u|^p)^(1/p)."""
    _require_hypothesis(case)
    p = case.p
    theta = float(case.params["theta"])
    p_star = float(case.params["p_star"])
    if S_p is None:
        S_p = case.params.get("sobolev_constant")
    if S_p is None:
        raise InvalidArgumentError("hardy-sobolev needs the Sobolev constant S_p")
    if H_val is None:
        H_val = float(case.params.get("H_val", (abs(p - 1.0 - p * theta) / p) ** p))
    if H_val <= 0:
        raise InvalidArgumentError("need H_val > 0")
    c2 = hardy_sobolev_constant(float(S_p), H_val, theta, p)
    t, g, s, au, gu = _u_data(case.model, u)
    rho = case.weight.rho(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lhs_factor = rho ** (p_star * theta) * s
        rhs_factor = rho ** (p * theta) * s
    lhs = _masked_integral(u.grid, au ** p_star, lhs_factor) ** (1.0 / p_star)
    rhs = _masked_integral(u.grid, gu ** p, rhs_factor) ** (1.0 / p)
    return SidePair(lhs=lhs, rhs=rhs, constant=c2, margin=rhs - c2 * lhs)


def hardy_sobolev_constant(S_p: float, H_val: float, theta: float, p: float) -> float:
    """C2 = S(p) H^(1/p) / (|theta| + H^(1/p))."""
    hroot = H_val ** (1.0 / p)
    return S_p * hroot / (abs(theta) + hroot)


def ckn_sides(
    case: InequalityCase, u: GridFunction, C3: float | None = None
) -> SidePair:
    """First-order interpolation (CKN-type) sides; constants from the
    Hardy-Sobolev constant C2 and the weighted Hardy constant H."""
    _require_hypothesis(case)
    p = case.p
    pr = case.params
    theta, p_star = float(pr["theta"]), float(pr["p_star"])
    r, a = float(pr["r"]), float(pr["a"])
    gamma, delta = float(pr["gamma"]), float(pr["delta"])
    eps, sigma = float(pr["eps"]), float(pr["sigma"])
    if C3 is None:
        C3 = case.formula_constant
    t, g, s, au, gu = _u_data(case.model, u)
    rho = case.weight.rho(t)
    grad_rho = case.weight.grad_norm(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lhs_factor = rho ** (-gamma * r) * grad_rho ** ((gamma + eps) * r) * s
        grad_factor = rho ** (theta * p) * s
        mixed_factor = grad_rho ** ((delta + sigma) * p) * rho ** (-delta * p) * s
    lhs = _masked_integral(u.grid, au ** r, lhs_factor) ** (1.0 / r)
    grad_term = _masked_integral(u.grid, gu ** p, grad_factor)
    mixed_term = _masked_integral(u.grid, au ** p, mixed_factor)
    rhs = grad_term ** (a / p) * mixed_term ** ((1.0 - a) / p)
    return SidePair(lhs=lhs, rhs=rhs, constant=C3, margin=rhs - C3 * lhs)


_SIDES_DISPATCH = {
    "hardy": hardy_sides,
    "weighted-hardy": weighted_hardy_sides,
    "caccioppoli": caccioppoli_sides,
    "gn": gn_sides,
    "uncertainty": uncertainty_sides,
    "hardy-sobolev": hardy_sobolev_sides,
    "ckn": ckn_sides,
}


def sides_for(case: InequalityCase, u: GridFunction) -> SidePair:
    try:
        fn = _SIDES_DISPATCH[case.kind]
    except KeyError:
        raise InvalidArgumentError(f"no sides evaluator for kind {case.kind!r}")
    return fn(case, u)


def rayleigh_quotient(case: InequalityCase, u: GridFunction) -> float:
    """rhs/lhs of the case's side pair, so the formula constant is a lower bound."""
    pair = sides_for(case, u)
    if pair.lhs <= 0.0:
        raise ZeroDenominatorError("Rayleigh quotient needs a nonzero lhs")
    return pair.rhs / pair.lhs


def hardy_gap(case: InequalityCase, u: GridFunction) -> float:
    """The nonnegative functional rhs - constant*lhs (I(u) for Hardy cases)."""
    pair = sides_for(case, u)
    return pair.margin


# ---------------------------------------------------------------------------
# case factories

def _hypothesis_mode_for_alpha(p: float, alpha: float) -> str | None:
    if alpha < p - 1.0:
        return "superharmonic"
    if alpha > p - 1.0:
        return "subharmonic"
    return None


def _oracle_shift(model: ModelManifold, weight: WeightSpec, p: float) -> float:
    """Scale of the (pi/L)^2 truncation correction predicted by the p = 2
    log-substitution oracle, or 0 when it does not apply."""
    if p != 2.0:
        return 0.0
    if model.kind == EUCLIDEAN and weight.family == "power":
        return 1.0 / weight.params["beta"] ** 2
    if model.kind == HALF_PLANE and weight.family == "halfplane-y":
        return 1.0
    return 0.0


def weighted_hardy_case(
    model: ModelManifold,
    weight: WeightSpec,
    alpha: float,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    p = weight.p
    const = (abs(p - 1.0 - alpha) / p) ** p
    kind = "hardy" if alpha == 0.0 else "weighted-hardy"
    return InequalityCase(
        kind=kind,
        model=model,
        weight=weight,
        params={"p": p, "alpha": alpha},
        rng=rng or model.natural_range(),
        formula_constant=const,
        case_id=case_id,
        hypothesis_mode=_hypothesis_mode_for_alpha(p, alpha),
        trivial=(const == 0.0),
        oracle_shift=_oracle_shift(model, weight, p),
    )


def hardy_case(
    model: ModelManifold,
    weight: WeightSpec,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    return weighted_hardy_case(model, weight, 0.0, rng, case_id)


def caccioppoli_case(
    model: ModelManifold,
    weight: WeightSpec,
    q: float,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    if q <= -1:
        raise InvalidArgumentError("Caccioppoli needs q > -1")
    p = weight.p
    return InequalityCase(
        kind="caccioppoli",
        model=model,
        weight=weight,
        params={"p": p, "q": q},
        rng=rng or model.natural_range(),
        formula_constant=((q + 1.0) / p) ** p,
        case_id=case_id,
        hypothesis_mode="subharmonic",
    )


def gn_case(
    model: ModelManifold,
    weight: WeightSpec,
    delta: float,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    if weight.family != "power":
        raise InvalidArgumentError("GN case needs a power-of-distance weight d^alpha")
    p = weight.p
    alpha = weight.params["beta"]
    return InequalityCase(
        kind="gn",
        model=model,
        weight=weight,
        params={"p": p, "alpha": alpha, "delta": delta},
        rng=rng or model.natural_range(),
        formula_constant=(p / (abs(alpha) * (p - 1.0))) ** (p - 1.0),
        case_id=case_id,
        hypothesis_mode="superharmonic",
    )


def uncertainty_case(
    model: ModelManifold,
    weight: WeightSpec,
    s: float,
    a: float,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    if weight.family != "power":
        raise InvalidArgumentError("uncertainty case needs a power weight d^alpha")
    p = weight.p
    alpha = weight.params["beta"]
    if (a * s - p) / (a - 1.0) <= 0:
        raise InvalidArgumentError("exponent (as-p)/(a-1) must be positive")
    return InequalityCase(
        kind="uncertainty",
        model=model,
        weight=weight,
        params={"p": p, "alpha": alpha, "s": s, "a": a},
        rng=rng or model.natural_range(),
        formula_constant=(p / (abs(alpha) * (p - 1.0))) ** (p / a),
        case_id=case_id,
        hypothesis_mode="superharmonic",
    )


def hardy_sobolev_case(
    model: ModelManifold,
    weight: WeightSpec,
    theta: float,
    p_star: float,
    sobolev_constant: float,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    p = weight.p
    if p_star <= 0:
        raise InvalidArgumentError("need p* > 0")
    if sobolev_constant is None or sobolev_constant <= 0:
        raise InvalidArgumentError("missing Sobolev constant S_p")
    H = (abs(p - 1.0 - p * theta) / p) ** p
    if H <= 0:
        raise InvalidArgumentError("weighted Hardy constant degenerates at p*theta = p-1")
    return InequalityCase(
        kind="hardy-sobolev",
        model=model,
        weight=weight,
        params={
            "p": p,
            "theta": theta,
            "p_star": p_star,
            "sobolev_constant": sobolev_constant,
            "H_val": H,
        },
        rng=rng or model.natural_range(),
        formula_constant=hardy_sobolev_constant(sobolev_constant, H, theta, p),
        case_id=case_id,
        hypothesis_mode=_hypothesis_mode_for_alpha(p, p * theta),
    )


def ckn_case(
    model: ModelManifold,
    weight: WeightSpec,
    theta: float,
    p_star: float,
    r: float,
    a: float,
    gamma: float,
    delta: float,
    eps: float | None = None,
    sigma: float = 0.0,
    sobolev_constant: float = None,
    rng: CoordinateRange | None = None,
    case_id: str = "",
) -> InequalityCase:
    """Validate the three CKN parameter relations and evaluate C3."""
    p = weight.p
    if not (p_star > p):
        raise InvalidArgumentError("CKN needs p* > p")
    if sobolev_constant is None or sobolev_constant <= 0:
        raise InvalidArgumentError("missing Sobolev constant S_p")
    if not (0.0 <= a <= 1.0) or r <= 0:
        raise InvalidArgumentError("need r > 0 and 0 <= a <= 1")
    if eps is None:
        eps = theta * a + sigma * (1.0 - a)
    tol = 1e-12
    if not (1.0 / p >= 1.0 / r - tol and 1.0 / r >= (1 - a) / p + a / p_star - tol):
        raise RelationViolationError(
            "condr", f"1/p >= 1/r >= (1-a)/p + a/p* fails for r={r}, a={a}"
        )
    P = p_star * (r - p) / (r * (p_star - p))
    if abs(gamma + P - ((1.0 - theta) * a + delta * (1.0 - a))) > tol:
        raise RelationViolationError("cond1", "gamma relation fails")
    if abs(eps - (theta * a + sigma * (1.0 - a))) > tol:
        raise RelationViolationError("cond2", "eps relation fails")
    H = (abs(p - 1.0 - p * theta) / p) ** p
    c2 = hardy_sobolev_constant(sobolev_constant, H, theta, p)
    c3 = c2 ** P * H ** (a / p - P / p)
    return InequalityCase(
        kind="ckn",
        model=model,
        weight=weight,
        params={
            "p": p,
            "theta": theta,
            "p_star": p_star,
            "r": r,
            "a": a,
            "gamma": gamma,
            "delta": delta,
            "eps": eps,
            "sigma": sigma,
            "sobolev_constant": sobolev_constant,
            "H_val": H,
        },
        rng=rng or model.natural_range(),
        formula_constant=c3,
        case_id=case_id,
        hypothesis_mode=_hypothesis_mode_for_alpha(p, p * theta),
    )


def davies_hinz_field(model: ModelManifold) -> VectorFieldCase:
    """h = grad V for V = t^2; A_h = Delta V = 2 + 2 t Delta t."""
    if model.kind == HALF_PLANE:
        raise UnsupportedModelError("Davies-Hinz instance needs |grad t| = 1")

    def h_mag(t):
        return 2.0 * np.asarray(t, dtype=float)

    def a_h(t):
        t = np.asarray(t, dtype=float)
        if model.kind == "interval":
            return np.full_like(t, 2.0)
        return 2.0 + 2.0 * t * model.laplacian_of_distance(t)

    return VectorFieldCase("davies-hinz", model, h_mag, a_h)


def killing_field(model: ModelManifold, p: float) -> VectorFieldCase:
    """h = K/|K|^p for the Euclidean conformal Killing field K = x (p < N)."""
    if model.kind != EUCLIDEAN:
        raise UnsupportedModelError("Killing instance defined on Euclidean models")
    if p >= model.dim:
        raise InvalidArgumentError("Killing instance needs p < N")
    n = model.dim

    def h_mag(t):
        return np.asarray(t, dtype=float) ** (1.0 - p)

    def a_h(t):
        return (n - p) * np.asarray(t, dtype=float) ** (-p)

    return VectorFieldCase("killing", model, h_mag, a_h)


# ---------------------------------------------------------------------------
# density factories for the minimization backends

def quadratic_densities(case: InequalityCase):
    """(A, B) with lhs = int A u^2, rhs = int B (u')^2, for p = 2 cases."""
    if case.p != 2.0:
        raise InvalidArgumentError("quadratic densities need p = 2")
    A_p, B_p = p_densities(case)
    return A_p, B_p


def p_densities(case: InequalityCase):
    """(A, B) with lhs = int A |u|^p, rhs = int B |u'|^p, as functions of t."""
    p = case.p
    model, w = case.model, case.weight

    def g_pow(t):
        return model.gradient_factor(t) ** p

    def s_fn(t):
        return np.exp(model.log_volume_density(t))

    if case.kind in ("hardy", "weighted-hardy"):
        alpha = float(case.params.get("alpha", 0.0))

        def A(t):
            return w.rho(t) ** (alpha - p) * w.grad_norm(t) ** p * s_fn(t)

        def B(t):
            return w.rho(t) ** alpha * g_pow(t) * s_fn(t)

        return A, B
    if case.kind == "caccioppoli":
        q = float(case.params["q"])

        def A(t):
            return w.rho(t) ** q * w.grad_norm(t) ** p * s_fn(t)

        def B(t):
            return w.rho(t) ** (p + q) * g_pow(t) * s_fn(t)

        return A, B
    if case.kind == "poincare-eigen":
        s_exp = float(case.params["s"])

        def A(t):
            return w.rho(t) ** s_exp * s_fn(t)

        def B(t):
            return w.rho(t) ** s_exp * g_pow(t) * s_fn(t)

        return A, B
    raise InvalidArgumentError(f"kind {case.kind!r} has no quotient densities")
