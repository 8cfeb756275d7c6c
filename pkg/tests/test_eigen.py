"""Eigenvalue machinery: brackets, iteration behavior, spectral estimates.

Reference eigenvalues come from independent radial shooting oracles
solved with adaptive ODE integration (see docstrings below); they are
frozen here with their derivations.
"""

import math

import numpy as np
import pytest

from khessian.dirichlet import SolverConfig, SourceTerm, solve_radial_dirichlet
from khessian.eigen import (
    IterationConfig,
    default_sup_cap,
    domain_monotonicity_check,
    estimate_lambda1,
    iterate_fixed_lambda,
    lower_bound,
    minimum_principle_probe,
    rayleigh_quotient,
    sphere_area,
    thread_cap,
    upper_bound,
)
from khessian.errors import DomainError, InconsistencyError
from khessian.radial import quartic_test_profile

# h'' + h'/r = lambda |h| on (0,1), h'(0) = 0, h(1) = 0: the first
# eigenvalue is the squared Bessel zero j_{0,1}^2, reproduced to 2e-12
# by power-series startup plus solve_ivp shooting with 60 bisections
LAMBDA_21_SHOOTING = 5.783185962946785

# h'' h'/r = lambda h^2 with h(0) = -1, h'(0) = 0, h''(0) = sqrt(lambda),
# shot from eps = 1e-8 at rtol 1e-12, bisected 60 times on h(1) = 0
LAMBDA_22_SHOOTING = 7.490039398687065


@pytest.fixture(scope="module")
def est21():
    return estimate_lambda1(1.0, 2, 1)


@pytest.fixture(scope="module")
def est22():
    return estimate_lambda1(1.0, 2, 2)


def test_bracket_endpoints_frozen():
    assert lower_bound(2, 1, 1.0) == 2.0
    assert upper_bound(2, 1, 1.0) == 8.0
    assert lower_bound(3, 2, 1.0) == 3.0
    assert upper_bound(3, 2, 1.0) == 48.0
    assert lower_bound(2, 2, 2.0) == 1.0 / 16.0
    assert upper_bound(2, 2, 2.0) == 1.0
    with pytest.raises(DomainError):
        lower_bound(2, 1, 0.0)
    with pytest.raises(DomainError):
        upper_bound(2, 3, 1.0)


def test_iteration_config_validation():
    with pytest.raises(DomainError):
        IterationConfig(n_max=5)
    with pytest.raises(DomainError):
        IterationConfig(fixed_point_tol=-1.0)


def test_default_sup_cap_scaling():
    base = default_sup_cap(2, 1, 1.0)
    assert base > 0
    assert default_sup_cap(2, 1, 2.0) == pytest.approx(4.0 * base)


def test_lambda_zero_fixed_point_in_two_steps():
    res = iterate_fixed_lambda(0.0, 1.0, 2, 1)
    assert res.converged and res.reason == "fixed-point"
    assert res.n_iter == 2
    p = solve_radial_dirichlet(
        SourceTerm.constant(1.0), 1.0, 2, 1, SolverConfig(quadrature="trapezoid")
    )
    np.testing.assert_array_equal(res.profile.h, p.h)


def test_negative_lambda_rejected():
    with pytest.raises(DomainError):
        iterate_fixed_lambda(-0.5, 1.0, 2, 1)


def test_monotone_decreasing_below_lower_bound():
    rng = np.random.default_rng(11)
    for _ in range(5):
        lam = float(rng.uniform(0.0, lower_bound(3, 2, 1.0)))
        res = iterate_fixed_lambda(lam, 1.0, 3, 2)
        assert res.converged
        # sup trace of a decreasing negative sequence is nondecreasing
        sups = np.asarray(res.sup_trace)
        assert np.all(np.diff(sups) >= 0.0)
        assert np.all(res.profile.h <= 0.0)


def test_divergence_above_upper_bound():
    res = iterate_fixed_lambda(1.05 * upper_bound(2, 1, 1.0), 1.0, 2, 1)
    assert not res.converged and res.reason == "sup-cap"
    sups = np.asarray(res.sup_trace)
    assert sups[-1] > default_sup_cap(2, 1, 1.0)
    assert np.all(np.diff(sups) >= 0.0)


def test_principal_eigenvalue_vs_shooting_oracle_21(est21):
    assert abs(est21.lambda_best - LAMBDA_21_SHOOTING) <= 0.01
    assert est21.lambda_lo <= est21.lambda_best <= est21.lambda_hi
    assert est21.bounds == {"lower": 2.0, "upper": 8.0}
    assert 2.0 <= est21.lambda_best <= 8.0


def test_principal_eigenvalue_vs_shooting_oracle_22(est22):
    assert abs(est22.lambda_best - LAMBDA_22_SHOOTING) / LAMBDA_22_SHOOTING <= 0.01


def test_rayleigh_consistency(est21, est22):
    for est in (est21, est22):
        gap = abs(est.rayleigh - est.lambda_best) / est.lambda_best
        assert gap <= 0.01
        assert est.residual_max <= 0.02 * est.lambda_best


def test_rayleigh_scale_invariance(est21):
    p = est21.eigenfunction
    one = rayleigh_quotient(p)
    scaled = type(p)(
        N=p.N, k=p.k, r=p.r, h=3.0 * p.h, hp=3.0 * p.hp, hpp=3.0 * p.hpp
    )
    assert rayleigh_quotient(scaled) == pytest.approx(one, rel=1e-12)
    with pytest.raises(DomainError):
        zero = type(p)(
            N=p.N, k=p.k, r=p.r, h=0.0 * p.h, hp=0.0 * p.hp, hpp=0.0 * p.hpp
        )
        rayleigh_quotient(zero)


def test_eigenfunction_normalization_and_sign(est21):
    h = est21.eigenfunction.h
    assert h.min() == pytest.approx(-1.0, abs=1e-12)
    assert np.all(h <= 0.0) and h[-1] == 0.0


def test_dilation_covariance():
    est_half = estimate_lambda1(2.0, 2, 2)
    est_unit = estimate_lambda1(1.0, 2, 2)
    # probe decisions are identical in scaled variables for a dyadic
    # radius, so the products agree to rounding, well inside the 2%
    # covariance budget
    assert est_half.lambda_best * 2.0**4 == pytest.approx(
        est_unit.lambda_best, rel=1e-12
    )


def test_holder_seminorm_emitted_only_when_subcritical(est21, est22):
    assert est21.holder is None  # 2k = N: no positive exponent
    assert est22.holder is not None and est22.holder > 0
    d = est22.to_json_dict("psi.csv")
    assert "holder_seminorm" in d
    d21 = est21.to_json_dict("psi.csv")
    assert "holder_seminorm" not in d21
    assert set(d21) == {
        "N", "k", "R", "lambda_lo", "lambda_hi", "lambda_best",
        "bounds", "rayleigh", "residual_max", "profile_ref",
    }


def test_minimum_principle_quartic_violations():
    # the quartic with C = 4^k C(N,k) R^{-2k} is admissible and a
    # supersolution everywhere yet dips below zero inside
    for n, k in [(2, 1), (2, 2)]:
        cap = upper_bound(n, k, 1.0)
        prof = quartic_test_profile(1.0, n, k, 512)
        rep = minimum_principle_probe(prof, cap)
        assert rep["supersolution_everywhere"]
        assert rep["negative_interior_min"]
        assert rep["violates_minimum_principle"]
        assert rep["interior_min"] == pytest.approx(float(prof.h.min()))
        # lam = C has to sit above the estimated eigenvalue
        est = estimate_lambda1(1.0, n, k)
        assert cap >= est.lambda_best


def test_minimum_principle_sharp_constant_three_two():
    # for N = 3, k = 2 the quartic needs C slightly above 4^k C(N,k):
    # the interior ratio max is 4^k C(N-1,k-1)/k * (2/k) *
    # ((N+2k)/(2(k+1)))^(k+1) = 32 (7/6)^3 at R = 1
    c_nominal = upper_bound(3, 2, 1.0)
    sharp = 32.0 * (7.0 / 6.0) ** 3
    prof = quartic_test_profile(1.0, 3, 2, 512)
    rep = minimum_principle_probe(prof, c_nominal)
    assert not rep["supersolution_everywhere"]
    assert rep["n_failed_nodes"] > 0
    prof_sharp = quartic_test_profile(1.0, 3, 2, 512)
    rep_sharp = minimum_principle_probe(prof_sharp, sharp + 1e-9)
    assert rep_sharp["supersolution_everywhere"]
    assert rep_sharp["violates_minimum_principle"]


def test_domain_monotonicity():
    rep = domain_monotonicity_check(2, 1, 1.0, 1.5)
    assert rep["passed"]
    assert rep["lambda_small"] > rep["lambda_big"]
    assert rep["lambda_big"] == pytest.approx(
        rep["lambda_small"] / 1.5**2, rel=0.02
    )
    with pytest.raises(DomainError):
        domain_monotonicity_check(2, 1, 1.5, 1.5)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("KHESS_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("KHESS_THREADS", "abc")
    with pytest.raises(DomainError):
        thread_cap()
    monkeypatch.setenv("KHESS_THREADS", "0")
    with pytest.raises(DomainError):
        thread_cap()
    monkeypatch.delenv("KHESS_THREADS")
    assert thread_cap() >= 1


def test_sphere_area_values():
    assert sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)
    assert sphere_area(4) == pytest.approx(2.0 * math.pi**2)


def test_estimate_diagnostics_structure(est21):
    d = est21.diagnostics
    assert len(d["probes"]) >= 2
    assert d["effective_bisect_tol"] > 0
    assert est21.lambda_hi - est21.lambda_lo <= d["effective_bisect_tol"] * 1.0001
