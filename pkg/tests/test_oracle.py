import math

import pytest

from weingarten_flow.families import (
    Equidistant, GeneralizedCylinder, GeodesicSphere, HFGeodesicSphere, HyperbolicField,
    SpaceForm, SphereMunzner,
)
from weingarten_flow.flow import FlowProblem, collapse_time, integrate
from weingarten_flow.oracle import closed_form_T, implicit_phi_residual
from weingarten_flow.verify import closed_form_problems
from weingarten_flow.weingarten import GaussK, MeanCurvature, Power, SquaredNorm


def sphere(eps, n):
    return GeodesicSphere(SpaceForm(eps, n + 1))


# values computed once from the closed forms and frozen
FROZEN = [
    (FlowProblem(sphere(0, 2), SquaredNorm(), 1.0), 1 / 6),
    (FlowProblem(sphere(0, 3), MeanCurvature(2), 1.0), 1 / 9),
    (FlowProblem(sphere(1, 2), MeanCurvature(1), math.pi / 4), 0.17328679513998632),
    (FlowProblem(sphere(-1, 2), MeanCurvature(1), 1.0), 0.21689041524151356),
    (FlowProblem(SphereMunzner((2, 2)), GaussK(), 0.3), 0.3),
    (FlowProblem(SphereMunzner((3, 2)), GaussK(), 0.5), 0.13058424044372263),
    (FlowProblem(HFGeodesicSphere(HyperbolicField("R", 2)), MeanCurvature(1), 1.0), 0.43378083),
    (FlowProblem(HFGeodesicSphere(HyperbolicField("C", 2)), MeanCurvature(1), 1.0), 0.15449684),
    (FlowProblem(HFGeodesicSphere(HyperbolicField("K", 2)), MeanCurvature(1), 1.0), 0.06556049),
    (FlowProblem(HFGeodesicSphere(HyperbolicField("O", 2)), MeanCurvature(1), 1.0), 0.03047527),
]


@pytest.mark.parametrize("problem,want", FROZEN, ids=lambda x: getattr(x, "tau0", None) and
                         f"{x.family.describe()} {x.spec.label()}")
def test_frozen_closed_forms(problem, want):
    T = closed_form_T(problem)
    tol = 1e-8 if want in (0.43378083, 0.15449684, 0.06556049, 0.03047527) else 1e-14
    assert T == pytest.approx(want, rel=tol, abs=tol)


def test_log_sec_value():
    assert math.log(1 / math.cos(0.5)) == pytest.approx(0.13058424, abs=1e-8)
    assert math.log(2) / 4 == pytest.approx(0.17328680, abs=1e-8)


def test_euclidean_norm2_residual_zero_at_known_point():
    p = FlowProblem(sphere(0, 2), SquaredNorm(), 1.0)
    phi = 1 - 0.5 ** (1 / 3)
    assert implicit_phi_residual(p, 1 / 12, phi) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("problem", [
    FlowProblem(sphere(1, 3), MeanCurvature(3), 0.5),
    FlowProblem(sphere(-1, 3), GaussK(), 0.5),
    FlowProblem(SphereMunzner((3, 3)), GaussK(), 0.5),  # m2 odd: not covered
    FlowProblem(SphereMunzner((4, 2)), GaussK(), 0.5),
    FlowProblem(SphereMunzner((1, 1, 1)), GaussK(), 0.3),
    FlowProblem(SphereMunzner((2, 2)), MeanCurvature(1), 0.3),
    FlowProblem(HFGeodesicSphere(HyperbolicField("C", 2)), SquaredNorm(), 1.0),
    FlowProblem(Equidistant(SpaceForm(-1, 3)), MeanCurvature(1), 1.0),
    FlowProblem(GeneralizedCylinder(SpaceForm(0, 4), 1), MeanCurvature(1), 1.0),
    FlowProblem(sphere(0, 3), Power(MeanCurvature(1), 2.0), 1.0),
], ids=lambda p: f"{p.family.describe()} {p.spec.label()}")
def test_unmatched_problems_return_none(problem):
    assert closed_form_T(problem) is None
    assert implicit_phi_residual(problem, 0.0, 0.0) is None


def test_gauss_curvature_sphere_uses_top_mean_curvature():
    p = FlowProblem(sphere(0, 3), GaussK(), 1.0)
    assert closed_form_T(p) == pytest.approx(1 / 4, rel=1e-15)


@pytest.mark.parametrize("problem", list(closed_form_problems()),
                         ids=lambda p: f"{p.family.describe()} {p.spec.label()} {p.tau0:g}")
def test_closed_form_matches_quadrature(problem):
    T = closed_form_T(problem)
    assert T is not None
    assert abs(collapse_time(problem).T - T) <= 1e-8 * (1 + T)


@pytest.mark.parametrize("problem", [
    FlowProblem(sphere(1, 3), MeanCurvature(1), math.pi / 4),
    FlowProblem(sphere(-1, 3), MeanCurvature(1), 1.0),
    FlowProblem(sphere(-1, 5), MeanCurvature(2), 0.5),
    FlowProblem(sphere(1, 2), SquaredNorm(), 1.0),
    FlowProblem(SphereMunzner((5, 4)), GaussK(), 0.6),
    FlowProblem(HFGeodesicSphere(HyperbolicField("K", 3)), MeanCurvature(1), 0.5),
], ids=lambda p: f"{p.family.describe()} {p.spec.label()}")
def test_residual_small_along_trajectory(problem):
    traj = integrate(problem)
    worst = max(abs(implicit_phi_residual(problem, s.t, s.phi)) for s in traj.samples)
    assert worst <= 1e-6


@pytest.mark.parametrize("eps", [1, -1])
def test_implicit_relation_reproduces_the_ode(eps):
    # d/dt of cos_eps(R - phi) = exp(eps c t) cos_eps R gives phi' = c cot_eps(R - phi)
    n, R = 3, 0.6
    p = FlowProblem(sphere(eps, n), MeanCurvature(1), R)
    traj = integrate(p)
    early = [s for s in traj.samples if 0 < s.t < 0.8 * traj.terminal.T]
    assert len(early) > 5
    for s in early:
        h = 1e-7
        G = implicit_phi_residual
        dG_dt = (G(p, s.t + h, s.phi) - G(p, s.t - h, s.phi)) / (2 * h)
        dG_dphi = (G(p, s.t, s.phi + h) - G(p, s.t, s.phi - h)) / (2 * h)
        phi_dot = -dG_dt / dG_dphi
        assert phi_dot == pytest.approx(s.speed, rel=1e-5)
