import math

import numpy as np
import pytest

from phardy.errors import (
    InvalidArgumentError,
    NonFiniteIntegrandError,
    RelationViolationError,
    ZeroDenominatorError,
)
from phardy.functionals import (
    caccioppoli_case,
    caccioppoli_sides,
    ckn_case,
    ckn_sides,
    davies_hinz_field,
    divergence_lemma_sides,
    gn_case,
    gn_sides,
    hardy_case,
    hardy_gap,
    hardy_sobolev_case,
    hardy_sobolev_sides,
    hardy_sides,
    killing_field,
    rayleigh_quotient,
    sides_for,
    uncertainty_case,
    uncertainty_sides,
    validate_case_hypothesis,
    VectorFieldCase,
    weighted_hardy_case,
    weighted_hardy_sides,
)
from phardy.geometry import CoordinateRange, euclidean_radial, interval
from phardy.grids import GridFunction, build_grid
from phardy.testfunctions import bump, random_test_functions, tent
from phardy.weights import rho_catalog_entry, weight_from_samples

E3 = euclidean_radial(3)
RNG = CoordinateRange(1e-3, 1e3, open_lo=True, open_hi=True)


def hardy_e3_case():
    return hardy_case(E3, rho_catalog_entry("power", E3, 2.0, beta=-1.0), RNG)


def log_grid(n=2000, rng=RNG):
    return build_grid(rng, n, "log")


def zero_fn(grid):
    return GridFunction(grid, np.zeros(grid.n), dirichlet_zero=True)


def test_zero_function_gives_zero_sides():
    grid = log_grid(500)
    case = hardy_e3_case()
    pair = hardy_sides(case, zero_fn(grid))
    assert pair.lhs == pair.rhs == pair.margin == 0.0


def test_hardy_margin_positive_for_bumps():
    grid = log_grid()
    case = hardy_e3_case()
    for u in random_test_functions(grid, 20, seed=7):
        pair = hardy_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs
        assert pair.constant == 0.25


def test_log_tent_quotient_matches_substitution_oracle():
    # the substitution u = r^(-1/2) v(ln r) turns the quotient into
    # (int v'^2 + v^2/4) / int v^2; for the tent v = max(0, 1 - |x|/L)
    # that is exactly 1/4 + 3/L^2
    L = 4.0
    rng = CoordinateRange(math.exp(-1.2 * L), math.exp(1.2 * L), True, True)
    grid = build_grid(rng, 4000, "log")
    case = hardy_e3_case()
    tent_log = np.clip(1.0 - np.abs(np.log(grid.nodes)) / L, 0.0, None)
    vals = grid.nodes ** -0.5 * tent_log
    vals[0] = vals[-1] = 0.0
    u = GridFunction(grid, vals, dirichlet_zero=True)
    q = rayleigh_quotient(case, u)
    assert q == pytest.approx(0.25 + 3.0 / L ** 2, rel=1e-2)


def test_weighted_alpha_zero_equals_hardy():
    grid = log_grid()
    case0 = hardy_e3_case()
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case_alpha = weighted_hardy_case(E3, w, 0.0, RNG)
    for u in random_test_functions(grid, 20, seed=11):
        a = hardy_sides(case0, u)
        b = weighted_hardy_sides(case_alpha, u)
        assert b.lhs == pytest.approx(a.lhs, rel=1e-12)
        assert b.rhs == pytest.approx(a.rhs, rel=1e-12)
        assert b.margin == pytest.approx(a.margin, rel=1e-12)


def test_weighted_degenerate_alpha():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = weighted_hardy_case(E3, w, 1.0, RNG)  # alpha = p-1
    assert case.trivial and case.formula_constant == 0.0
    grid = log_grid(500)
    u = bump(grid, -2.0, 2.0)
    pair = weighted_hardy_sides(case, u)
    assert pair.margin == pair.rhs >= 0.0


def test_margin_sign_invariant_under_scaling():
    grid = log_grid(1000)
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    cases = [
        hardy_e3_case(),
        weighted_hardy_case(E3, w, -1.0, RNG),
        gn_case(E3, w, delta=2.0, rng=RNG),
        uncertainty_case(E3, w, s=2.0, a=2.0, rng=RNG),
    ]
    u = bump(grid, -3.0, 3.0)
    for case in cases:
        signs = set()
        for lam in (1e-3, 1.0, 1e3):
            scaled = GridFunction(grid, lam * u.values, dirichlet_zero=True)
            signs.add(math.copysign(1.0, sides_for(case, scaled).margin))
        assert len(signs) == 1


def test_weight_scaling_leaves_quotient_unchanged():
    grid = log_grid(1000)
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    u = bump(grid, -2.0, 1.0)
    q1 = rayleigh_quotient(hardy_case(E3, w, RNG), u)
    q2 = rayleigh_quotient(hardy_case(E3, w.scaled(37.5), RNG), u)
    assert q2 == pytest.approx(q1, rel=1e-10)


def test_caccioppoli_margins_and_hypothesis():
    w = rho_catalog_entry("power", E3, 2.0, beta=2.0)
    rng = CoordinateRange(1e-2, 1e2, True, True)
    grid = build_grid(rng, 1500, "log")
    for q in (0.0, 2.0):
        case = caccioppoli_case(E3, w, q, rng)
        res = validate_case_hypothesis(case, grid)
        assert res.passed  # rho = r^2 is subharmonic
        for u in random_test_functions(grid, 10, seed=3):
            pair = caccioppoli_sides(case, u)
            assert pair.margin >= -1e-6 * pair.rhs
    with pytest.raises(InvalidArgumentError):
        caccioppoli_case(E3, w, -1.0, rng)


def test_caccioppoli_interval_distance_q_equals_p():
    m = interval(0.0, 1.0)
    w = rho_catalog_entry("power", m, 2.0, beta=1.0)
    rng = CoordinateRange(0.0, 1.0)
    grid = build_grid(rng, 1001, "linear")
    case = caccioppoli_case(m, w, 2.0, rng)
    assert case.formula_constant == pytest.approx(((2 + 1) / 2) ** 2)
    validate_case_hypothesis(case, grid)
    for u in random_test_functions(grid, 10, seed=5):
        assert caccioppoli_sides(case, u).margin >= 0.0


def test_caccioppoli_rejects_superharmonic_weight():
    w = rho_catalog_entry("power", euclidean_radial(4), 2.0, beta=-1.0)
    rng = CoordinateRange(1e-2, 1e2, True, True)
    case = caccioppoli_case(euclidean_radial(4), w, 0.0, rng)
    grid = build_grid(rng, 900, "log")
    res = validate_case_hypothesis(case, grid)
    assert not res.passed
    from phardy.errors import HypothesisViolationError

    with pytest.raises(HypothesisViolationError):
        caccioppoli_sides(case, bump(grid, -1.0, 1.0))


def test_divergence_lemma_instances():
    grid = log_grid(1500, CoordinateRange(1e-2, 1e2, True, True))
    dh = davies_hinz_field(E3)
    kf = killing_field(E3, 2.0)
    for u in random_test_functions(grid, 10, seed=13):
        assert divergence_lemma_sides(dh, u, 2.0).margin >= 0.0
        assert divergence_lemma_sides(kf, u, 2.0).margin >= 0.0
    z = zero_fn(grid)
    assert divergence_lemma_sides(dh, z, 2.0).margin == 0.0


def test_killing_reduces_to_hardy_constant():
    # h = x/|x|^p gives exactly the ((N-p)/p)^p Hardy form
    grid = log_grid(1500, CoordinateRange(1e-2, 1e2, True, True))
    kf = killing_field(E3, 2.0)
    case = hardy_e3_case()
    u = bump(grid, -2.0, 2.0)
    dl = divergence_lemma_sides(kf, u, 2.0)
    h = hardy_sides(case, u)
    # lhs_dl = (N-p) * lhs_hardy, rhs_dl = p^p/(N-p)^(p-1) * rhs_hardy
    assert dl.lhs == pytest.approx((3 - 2) * h.lhs, rel=1e-12)
    assert dl.rhs == pytest.approx(4.0 * h.rhs, rel=1e-12)


def test_divergence_rejects_nonpositive_ah():
    grid = log_grid(200, CoordinateRange(0.5, 2.0, True, True))
    bad = VectorFieldCase(
        "bad", E3, lambda t: np.ones_like(t), lambda t: -np.ones_like(t)
    )
    with pytest.raises(InvalidArgumentError):
        divergence_lemma_sides(bad, bump(grid, 0.6, 1.5), 2.0)


def test_killing_requires_p_below_n():
    with pytest.raises(InvalidArgumentError):
        killing_field(E3, 3.0)


def test_gn_margins_and_relation():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = gn_case(E3, w, delta=2.0, rng=RNG)
    assert case.formula_constant == pytest.approx(2.0)
    grid = log_grid(1500)
    for u in random_test_functions(grid, 10, seed=17):
        pair = gn_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs
    case.params["s"] = 3.0  # violates s = p-1+delta/p = 2
    with pytest.raises(RelationViolationError):
        gn_sides(case, bump(grid, -1.0, 1.0))


def test_uncertainty_margins_and_dilation_invariance():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = uncertainty_case(E3, w, s=2.0, a=2.0, rng=RNG)
    grid = log_grid(1500)
    for u in random_test_functions(grid, 10, seed=19):
        pair = uncertainty_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs
    # dilation u -> u(lam x): rhs/lhs is invariant (both sides scale alike)
    u = bump(grid, -2.0, 2.0)
    base = uncertainty_sides(case, u)
    lam = 2.0
    grid2 = build_grid(
        CoordinateRange(RNG.lo / lam, RNG.hi / lam, True, True), 1500, "log"
    )
    u2 = GridFunction(grid2, u.values, dirichlet_zero=True)
    scaled = uncertainty_sides(case, u2)
    assert scaled.rhs / scaled.lhs == pytest.approx(base.rhs / base.lhs, rel=1e-8)
    with pytest.raises(InvalidArgumentError):
        uncertainty_case(E3, w, s=0.5, a=1.5, rng=RNG)  # (as-p)/(a-1) < 0


def test_hardy_sobolev_theta_zero_is_sobolev():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = hardy_sobolev_case(E3, w, theta=0.0, p_star=6.0, sobolev_constant=2.0, rng=RNG)
    assert case.formula_constant == pytest.approx(2.0)
    grid = log_grid(1500)
    for u in random_test_functions(grid, 10, seed=23):
        pair = hardy_sobolev_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs


def test_hardy_sobolev_weighted_margins():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = hardy_sobolev_case(E3, w, theta=-0.5, p_star=6.0, sobolev_constant=2.0, rng=RNG)
    grid = log_grid(1500)
    for u in random_test_functions(grid, 20, seed=29):
        pair = hardy_sobolev_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs
    with pytest.raises(InvalidArgumentError):
        hardy_sobolev_case(E3, w, theta=0.0, p_star=6.0, sobolev_constant=-1.0)


def valid_ckn_case(a=0.75, r=4.0, delta=0.5):
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    P = 6.0 * (r - 2.0) / (r * 4.0)
    gamma = (1.0 - (-0.5)) * a + delta * (1 - a) - P
    return ckn_case(
        E3, w, theta=-0.5, p_star=6.0, r=r, a=a, gamma=gamma, delta=delta,
        sigma=0.0, sobolev_constant=2.0, rng=RNG,
    )


def test_ckn_margins_valid_tuple():
    case = valid_ckn_case()
    grid = log_grid(1500)
    for u in random_test_functions(grid, 20, seed=31):
        pair = ckn_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs


def test_ckn_rejects_infeasible_relations():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    with pytest.raises(RelationViolationError) as err:
        ckn_case(E3, w, theta=-0.5, p_star=6.0, r=4.0, a=0.5, gamma=0.5,
                 delta=1.0, sigma=0.0, sobolev_constant=2.0, rng=RNG)
    assert err.value.condition == "condr"
    with pytest.raises(RelationViolationError) as err:
        ckn_case(E3, w, theta=-0.5, p_star=6.0, r=4.0, a=0.75, gamma=0.0,
                 delta=0.5, sigma=0.0, sobolev_constant=2.0, rng=RNG)
    assert err.value.condition == "cond1"


def test_ckn_a1_reduces_to_hardy_sobolev():
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    hs = hardy_sobolev_case(E3, w, theta=-0.5, p_star=6.0, sobolev_constant=2.0, rng=RNG)
    # a = 1, r = p*: cond1 gives gamma = -theta
    ck = ckn_case(E3, w, theta=-0.5, p_star=6.0, r=6.0, a=1.0, gamma=0.5,
                  delta=0.3, sigma=0.0, sobolev_constant=2.0, rng=RNG)
    assert ck.formula_constant == pytest.approx(hs.formula_constant, rel=1e-14)
    grid = log_grid(1500)
    for u in random_test_functions(grid, 10, seed=37):
        a = hardy_sobolev_sides(hs, u)
        b = ckn_sides(ck, u)
        assert b.lhs == pytest.approx(a.lhs, rel=1e-12)
        assert b.rhs == pytest.approx(a.rhs, rel=1e-12)
        assert b.margin == pytest.approx(a.margin, rel=1e-12)


def test_rayleigh_quotient_zero_denominator():
    grid = log_grid(300)
    case = hardy_e3_case()
    with pytest.raises(ZeroDenominatorError):
        rayleigh_quotient(case, zero_fn(grid))


def test_hardy_gap_nonnegative_and_zero_at_zero():
    grid = log_grid(1200)
    case = hardy_e3_case()
    assert hardy_gap(case, zero_fn(grid)) == 0.0
    for u in random_test_functions(grid, 10, seed=41):
        assert hardy_gap(case, u) > 0.0


def test_non_finite_integrand_raises():
    # sampled weight vanishing at an interior node under a test function
    # that does not vanish there
    m = interval(0.0, 1.0)
    grid = build_grid(CoordinateRange(0.0, 1.0), 101, "linear")
    vals = np.abs(grid.nodes - 0.5)
    w = weight_from_samples("pinch", m, 2.0, grid, vals)
    case = hardy_case(m, w, CoordinateRange(0.0, 1.0))
    u = tent(grid, 0.2, 0.8)  # peak sits at the pinch
    with pytest.raises(NonFiniteIntegrandError):
        hardy_sides(case, u)


def test_interval_distance_hardy_margin():
    m = interval(0.0, 1.0)
    w = rho_catalog_entry("dist-boundary", m, 2.0)
    rng = CoordinateRange(0.0, 1.0)
    grid = build_grid(rng, 1001, "linear")
    case = hardy_case(m, w, rng)
    res = validate_case_hypothesis(case, grid)
    assert res.passed
    for u in random_test_functions(grid, 10, seed=43):
        assert hardy_sides(case, u).margin >= 0.0


def test_halfspace_distance_hardy_on_interval():
    # distance from the boundary of the half-space reduces to rho = x
    m = interval(0.0, 1.0)
    w = rho_catalog_entry("power", m, 2.0, beta=1.0)
    rng = CoordinateRange(1e-3, 1.0, open_hi=True)
    grid = build_grid(rng, 1001, "linear")
    case = hardy_case(m, w, rng)
    res = validate_case_hypothesis(case, grid)
    assert res.passed  # x is harmonic on the interval
    for u in random_test_functions(grid, 10, seed=47):
        pair = hardy_sides(case, u)
        assert pair.margin >= -1e-6 * pair.rhs


def test_ckn_a_zero_identity_case():
    # a = 0, r = p, gamma = delta, eps = sigma: lhs equals the second rhs
    # factor and C3 = 1, so the margin vanishes identically
    w = rho_catalog_entry("power", E3, 2.0, beta=-1.0)
    case = ckn_case(
        E3, w, theta=-0.5, p_star=6.0, r=2.0, a=0.0, gamma=0.7, delta=0.7,
        eps=0.2, sigma=0.2, sobolev_constant=2.0, rng=RNG,
    )
    assert case.formula_constant == pytest.approx(1.0)
    grid = log_grid(1000)
    for u in random_test_functions(grid, 5, seed=53):
        pair = ckn_sides(case, u)
        assert pair.margin == pytest.approx(0.0, abs=1e-12 * pair.rhs)
