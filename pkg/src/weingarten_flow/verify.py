"""The verification grid run by ``weingarten-flow verify``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .avoidance import (
    CollinearDisjointSpheres, ConcentricSpheres, SphereInsideHorosphere, check_monotone,
    distance_curve,
)
from .families import (
    Equidistant, GeneralizedCylinder, GeodesicSphere, HFGeodesicSphere, HFHorosphere,
    Horosphere, HyperbolicField, SpaceForm, SphereMunzner,
)
from .flow import FlowProblem, SolverConfig, collapse_time, integrate
from .oracle import closed_form_T, implicit_phi_residual
from .weingarten import GaussK, MeanCurvature, Power, SquaredNorm, validate_axioms

SUITES = ("oracle", "ode", "residual", "axioms", "qualitative", "avoidance")

# smallest m for each field at which both curvature blocks of a sphere appear
MINIMAL_M = {"R": 2, "C": 2, "K": 2, "O": 2}


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    value: Optional[float] = None
    reference: Optional[float] = None
    diff: Optional[float] = None
    tol: Optional[float] = None
    detail: str = ""


def closed_form_problems() -> Iterator[FlowProblem]:
    for eps in (0, 1, -1):
        for n in (2, 3, 5):
            sphere = GeodesicSphere(SpaceForm(eps, n + 1))
            rs = range(1, n + 1) if eps == 0 else (1, 2)
            for R in (0.25, 0.5, 1.0):
                yield FlowProblem(sphere, SquaredNorm(), R)
                for r in rs:
                    yield FlowProblem(sphere, MeanCurvature(r), R)
    for field_, m_min in MINIMAL_M.items():
        for m in sorted({m_min, 3} if field_ != "O" else {2}):
            fam = HFGeodesicSphere(HyperbolicField(field_, m))
            for R in (0.25, 0.5, 1.0):
                yield FlowProblem(fam, MeanCurvature(1), R)
    for mults in ((2, 2), (4, 4), (3, 2), (5, 4)):
        for tau0 in (0.3, 0.6):
            yield FlowProblem(SphereMunzner(mults), GaussK(), tau0)


def extra_problems() -> Iterator[FlowProblem]:
    """Collapsing problems with no closed form, checked ODE against quadrature."""
    for eps in (0, -1):
        cyl = GeneralizedCylinder(SpaceForm(eps, 5), 2)
        for spec in (MeanCurvature(1), MeanCurvature(2), SquaredNorm()):
            yield FlowProblem(cyl, spec, 0.7)
    yield FlowProblem(SphereMunzner((1, 1, 1)), MeanCurvature(1), 0.2)
    yield FlowProblem(SphereMunzner((2, 2, 2, 2)), SquaredNorm(), 0.1)
    yield FlowProblem(SphereMunzner((1,) * 6), MeanCurvature(1), 0.05)
    yield FlowProblem(SphereMunzner((1, 2)), MeanCurvature(1), 1.3)
    yield FlowProblem(SphereMunzner((1, 1)), GaussK(), 0.4)
    hf = HFGeodesicSphere(HyperbolicField("C", 2))
    yield FlowProblem(hf, SquaredNorm(), 1.0)
    yield FlowProblem(hf, MeanCurvature(2), 1.0)
    sphere = GeodesicSphere(SpaceForm(-1, 4))
    yield FlowProblem(sphere, Power(MeanCurvature(1), 2.0), 1.0)
    yield FlowProblem(sphere, Power(SquaredNorm(), 0.5), 1.0)


def _oracle_checks() -> Iterator[Check]:
    for p in closed_form_problems():
        T_ref = closed_form_T(p)
        T = collapse_time(p).T
        diff = abs(T - T_ref)
        tol = 1e-8 * (1 + T_ref)
        yield Check("oracle", _name(p), diff <= tol, T, T_ref, diff, tol)


def _ode_checks(rtol: float, atol: float) -> Iterator[Check]:
    config = SolverConfig(rtol=rtol, atol=atol)
    for p in list(closed_form_problems()) + list(extra_problems()):
        quad = collapse_time(p)
        ode = integrate(p, config).terminal
        diff = abs(ode.T - quad.T)
        tol = 10 * (rtol * quad.T + atol)
        ok = diff <= tol and ode.end == quad.end
        yield Check("ode", _name(p), ok, ode.T, quad.T, diff, tol, f"end={ode.end}")


def _residual_checks() -> Iterator[Check]:
    for p in closed_form_problems():
        traj = integrate(p)
        worst = max(abs(implicit_phi_residual(p, s.t, s.phi)) for s in traj.samples)
        yield Check("residual", _name(p), worst <= 1e-6, worst, 0.0, worst, 1e-6)


def _axiom_checks(seed: int) -> Iterator[Check]:
    for n in (3, 5):
        for spec in (MeanCurvature(1), MeanCurvature(2), MeanCurvature(3), SquaredNorm(), GaussK()):
            report = validate_axioms(spec, n, samples=100, seed=seed)
            failed = [c.name for c in report.checks.values() if not c.passed]
            skipped = [c.name for c in report.checks.values() if c.skipped]
            yield Check("axioms", f"{spec.label()} n={n}", report.passed,
                        detail=f"failed={failed} skipped={skipped}")


def _qualitative_checks() -> Iterator[Check]:
    config = SolverConfig()
    for horo in (Horosphere(SpaceForm(-1, 4)), HFHorosphere(HyperbolicField("K", 2))):
        p = FlowProblem(horo, MeanCurvature(1), 0.0, t_max=5.0)
        traj = integrate(p, config)
        w = p.speed(0.0)
        dev = float(np.max(np.abs(traj.tau - w * traj.t)))
        ok = traj.terminal.verdict == "non-collapsing" and dev <= 1e-12 * (1 + w * 5)
        ok = ok and collapse_time(p).verdict == "non-collapsing"
        yield Check("qualitative", f"{horo.describe()} linear tau", ok, dev, 0.0, dev, 1e-12)
    p = FlowProblem(Equidistant(SpaceForm(-1, 4)), MeanCurvature(1), 1.0, t_max=50.0)
    traj = integrate(p, config)
    # phi = tau0 - tau rounds to tau0 once tau is tiny, so test through tau and W
    inc = bool(np.all(np.diff(traj.tau) < 0) and np.all(traj.tau > 0))
    concave = bool(np.all(np.diff(traj.speed) < 0))
    ok = (collapse_time(p).verdict == "non-collapsing" and traj.terminal.verdict == "non-collapsing"
          and inc and concave and traj.speed[-1] < 1e-3)
    yield Check("qualitative", "equidistant H_1", ok, float(traj.speed[-1]), None, None, 1e-3,
                f"increasing={inc} concave={concave} tau_end={traj.tau[-1]!r}")
    for fam in (GeodesicSphere(SpaceForm(0, 4)), GeodesicSphere(SpaceForm(1, 4)),
                GeodesicSphere(SpaceForm(-1, 4)), GeneralizedCylinder(SpaceForm(0, 4), 1),
                HFGeodesicSphere(HyperbolicField("O", 2))):
        p = FlowProblem(fam, MeanCurvature(1), 1.0)
        traj = integrate(p, config)
        slopes = np.diff(traj.phi) / np.diff(traj.t)
        convex = bool(np.all(np.diff(slopes) > 0))
        ok = traj.terminal.verdict == "collapsed" and convex
        yield Check("qualitative", f"{fam.describe()} convex collapse", ok,
                    traj.terminal.T, detail=f"end={traj.terminal.end}")


def avoidance_scenarios():
    for spec in (MeanCurvature(1), MeanCurvature(3)):
        for amb in (SpaceForm(0, 4), SpaceForm(1, 4), SpaceForm(-1, 4)):
            yield ConcentricSpheres(amb, spec, 1.2, 0.6)
            yield CollinearDisjointSpheres(amb, spec, 1.5, 0.5, 0.4)
        hf = HyperbolicField("C", 2)
        yield ConcentricSpheres(hf, spec, 1.5, 0.7)
        yield CollinearDisjointSpheres(hf, spec, 3.0, 1.0, 0.5)
        yield SphereInsideHorosphere(SpaceForm(-1, 4), spec, 1.0, 0.5)
        yield SphereInsideHorosphere(hf, spec, 1.0, 0.5)


def _avoidance_checks() -> Iterator[Check]:
    for sc in avoidance_scenarios():
        curve = distance_curve(sc, grid=200)
        verdict = check_monotone(curve, 1e-9)
        min_ok = float(np.min(curve.D)) >= curve.D[0] - 1e-9
        yield Check("avoidance", f"{sc.kind} {sc.spec.label()} in {sc.ambient.label()}",
                    verdict.passed and min_ok, float(curve.D[-1]), float(curve.D[0]),
                    verdict.worst_violation, 1e-9)


def _name(p: FlowProblem) -> str:
    return f"{p.family.describe()} {p.spec.label()} tau0={p.tau0:g}"


def run_verify(suites=SUITES, seed: int = 0, rtol: float = 1e-10, atol: float = 1e-12) -> list[Check]:
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}")
    out: list[Check] = []
    runners = {
        "oracle": _oracle_checks,
        "ode": lambda: _ode_checks(rtol, atol),
        "residual": _residual_checks,
        "axioms": lambda: _axiom_checks(seed),
        "qualitative": _qualitative_checks,
        "avoidance": _avoidance_checks,
    }
    for suite in SUITES:
        if suite in suites:
            out.extend(runners[suite]())
    return out
