"""Boundary curvature fields and collar barriers.

Ellipsoid curvatures are checked against the classical surface-of-
revolution formulas (meridional a b / (b^2 cos^2 u + a^2 sin^2 u)^{3/2},
parallel a / (b sqrt(b^2 cos^2 u + a^2 sin^2 u)) for semi-axes (a,b,b)),
and the collar operators against directly assembled diagonal Hessians.
"""

import numpy as np
import pytest

from khessian.cones import s_k_op
from khessian.errors import DomainError, SearchError
from khessian.geometry import (
    CurvatureField,
    TubeSpec,
    augment_r,
    ellipsoid_field,
    hess_dist_spectrum,
    load_field_json,
    s_j_composition,
    save_field_json,
    sphere_field,
    strictly_km1_convex,
    verify_exp_boundary_barrier,
    verify_log_boundary_barrier,
)


def test_sphere_field_curvatures():
    for n in (2, 3, 4):
        field = sphere_field(2.0, n, n_samples=16)
        assert field.ambient_dim == n
        assert field.kappas.shape == (16, n - 1)
        np.testing.assert_allclose(field.kappas, 0.5, rtol=1e-12)
        np.testing.assert_allclose(
            np.linalg.norm(field.points, axis=1), 2.0, rtol=1e-12
        )
        for k in range(2, n + 1):
            assert strictly_km1_convex(field, k)


def test_ellipse_curvature_oracle():
    # plane ellipse x^2/a^2 + y^2/b^2 = 1: curvature a b / (a^2 sin^2 t
    # + b^2 cos^2 t)^{3/2} at (a cos t, b sin t)
    a, b = 2.0, 1.0
    field = ellipsoid_field([a, b], n_samples=64)
    for p, kap in zip(field.points, field.kappas):
        cos_t, sin_t = p[0] / a, p[1] / b
        expected = a * b / (a * a * sin_t**2 + b * b * cos_t**2) ** 1.5
        np.testing.assert_allclose(kap[0], expected, rtol=1e-9)


def test_spheroid_curvature_oracle():
    # prolate spheroid semi-axes (2,1,1); u is the angle from the long axis
    a, b = 2.0, 1.0
    field = ellipsoid_field([a, b, b], n_samples=48)
    for p, kap in zip(field.points, field.kappas):
        cos_u = p[0] / a
        w = b * b * cos_u**2 + a * a * (1.0 - cos_u**2)
        k_meridian = a * b / w**1.5
        k_parallel = a / (b * np.sqrt(w))
        np.testing.assert_allclose(
            np.sort(kap), np.sort([k_meridian, k_parallel]), rtol=1e-8
        )


def test_spheroid_curvature_range():
    # principal curvatures of the (2,1,1) spheroid live in [b/a^2, a/b^2]
    # = [0.25, 2], the extremes at equator meridian and pole umbilic
    a, b = 2.0, 1.0
    field = ellipsoid_field([a, b, b], n_samples=200)
    assert np.min(field.kappas) >= 0.25 - 1e-12
    assert np.max(field.kappas) <= 2.0 + 1e-12
    i_eq = int(np.argmin(np.abs(field.points[:, 0])))
    assert abs(field.points[i_eq, 0]) < 0.2
    np.testing.assert_allclose(
        np.sort(field.kappas[i_eq]), [0.25, 1.0], rtol=5e-2
    )


def test_augment_r_linear_oracle():
    # sigma_3(1, 1, -0.1, R) = -0.1 + 0.8 R crosses zero at R = 0.125 and
    # the lower sigmas are positive there, so the infimum is exactly 0.125
    field = CurvatureField(
        points=np.zeros((1, 4)), kappas=np.array([[1.0, 1.0, -0.1]])
    )
    r_cert = augment_r(field, 3)
    assert 0.125 < r_cert <= 0.125 * 1.002


def test_augment_r_requires_strict_convexity():
    field = CurvatureField(
        points=np.zeros((1, 4)), kappas=np.array([[1.0, -1.0, -1.0]])
    )
    with pytest.raises(DomainError):
        augment_r(field, 3)


def test_distance_hessian_on_ball():
    # inside a ball of radius rho the distance Hessian has eigenvalues
    # -1/(rho - d) with multiplicity N-1 plus a zero normal direction
    rho = 2.0
    for n in (2, 3, 5):
        kappa = np.full(n - 1, 1.0 / rho)
        for d in (0.0, 0.3, 0.9):
            vals = hess_dist_spectrum(kappa, d)
            assert vals.size == n
            np.testing.assert_allclose(vals[:-1], -1.0 / (rho - d), rtol=1e-12)
            assert vals[-1] == 0.0


def test_composition_matches_assembled_matrix():
    rng = np.random.default_rng(67)
    for _ in range(300):
        n = int(rng.integers(2, 6))
        kappa = rng.uniform(-0.4, 1.2, n - 1)
        d = float(rng.uniform(0.0, 0.4))
        gp, gpp = rng.standard_normal(2) * 2.0
        tangential = -kappa * gp / (1.0 - kappa * d)
        hess = np.diag(np.append(tangential, gpp))
        for j in range(1, n + 1):
            expected = s_k_op(hess, j)
            got = s_j_composition(gp, gpp, kappa, d, j)
            np.testing.assert_allclose(
                got, expected, rtol=1e-10, atol=1e-10 * (1.0 + abs(expected))
            )


def test_exp_barrier_on_sphere():
    field = sphere_field(1.0, 3)
    report = verify_exp_boundary_barrier(field, 2, 1.0, 3.0, 0.1)
    assert report["passed"]
    assert report["admissible"]
    assert report["worst_margin"] > 0
    assert report["kind"] == "exp-barrier"


def test_exp_barrier_margin_grows_with_rate():
    # a steeper barrier has more slack on the sphere; checked on a pair
    field = sphere_field(1.0, 3)
    lo = verify_exp_boundary_barrier(field, 2, 1.0, 3.0, 0.1)
    hi = verify_exp_boundary_barrier(field, 2, 1.0, 6.0, 0.1)
    assert hi["worst_margin"] > lo["worst_margin"]


def test_exp_barrier_fails_on_saddle_boundary():
    field = CurvatureField(
        points=np.zeros((2, 3)), kappas=np.array([[-5.0, -5.0], [-5.0, -4.0]])
    )
    report = verify_exp_boundary_barrier(field, 2, 1.0, 3.0, 0.1)
    assert not report["passed"]


def test_log_barrier_trivial_data():
    field = sphere_field(1.0, 3)
    m_amp, report = verify_log_boundary_barrier(field, 2, 0.0, 0.0, 3.0, 0.1)
    assert m_amp == 1.0
    assert report["passed"]


def test_log_barrier_scales_with_data():
    # at these parameters the boundary term 1/log(1+t d0) ~ 3.81 floors M,
    # so the source side needs a big push before it takes over
    field = sphere_field(1.0, 3)
    m_base, _ = verify_log_boundary_barrier(field, 2, 1.0, 1.0, 3.0, 0.1)
    m_usup, _ = verify_log_boundary_barrier(field, 2, 1.0, 10.0, 3.0, 0.1)
    m_fsup, _ = verify_log_boundary_barrier(field, 2, 1e4, 1.0, 3.0, 0.1)
    assert m_usup > m_base >= 1.0
    assert m_fsup > m_base


def test_log_barrier_infeasible_curvature():
    field = CurvatureField(
        points=np.zeros((1, 3)), kappas=np.array([[-5.0, -5.0]])
    )
    with pytest.raises(SearchError):
        verify_log_boundary_barrier(field, 2, 1.0, 1.0, 3.0, 0.1)


def test_tube_spec_validation():
    spec = TubeSpec(delta=0.2, d0=0.1, mu=2.0)
    assert spec.d0 <= 1.0 / (2.0 * spec.mu)
    with pytest.raises(DomainError):
        TubeSpec(delta=0.2, d0=0.3, mu=2.0)
    with pytest.raises(DomainError):
        TubeSpec(delta=0.2, d0=0.5, mu=4.0)
    field = sphere_field(0.5, 3)  # curvature 2 everywhere
    auto = TubeSpec.for_field(field, delta=0.2)
    assert auto.d0 <= 0.25


def test_field_json_roundtrip(tmp_path):
    field = ellipsoid_field([2.0, 1.0, 1.0], n_samples=12)
    path = tmp_path / "field.json"
    save_field_json(path, field)
    back = load_field_json(path)
    np.testing.assert_allclose(back.points, field.points, rtol=1e-15)
    np.testing.assert_allclose(back.kappas, field.kappas, rtol=1e-15)
    with pytest.raises(DomainError):
        load_field_json(tmp_path / "nope.json")


def test_strict_convexity_orders():
    field = CurvatureField(
        points=np.zeros((1, 4)), kappas=np.array([[1.0, 1.0, -0.1]])
    )
    assert strictly_km1_convex(field, 3)  # needs sigma_1, sigma_2 > 0
    assert not strictly_km1_convex(field, 4)  # sigma_3 = -0.1
    with pytest.raises(DomainError):
        strictly_km1_convex(field, 1)
