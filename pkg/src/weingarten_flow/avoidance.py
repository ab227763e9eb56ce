"""Avoidance checks on configurations with a closed-form distance.

Each scenario pairs two parallel flows whose mutual distance is an explicit
function of their focal parameters, so ``D(t) = dist^2`` can be tracked
exactly from the two scalar solutions and tested for monotonicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .families import (
    AmbientSpace, GeodesicSphere, HFGeodesicSphere, HFHorosphere, Horosphere,
    HyperbolicField, SpaceForm,
)
from .flow import FlowProblem, SolverConfig, collapse_time, integrate, phi_of_t
from .weingarten import WeingartenSpec


def _sphere_family(ambient: AmbientSpace):
    if isinstance(ambient, HyperbolicField):
        return HFGeodesicSphere(ambient)
    return GeodesicSphere(ambient)


def _is_hyperbolic(ambient: AmbientSpace) -> bool:
    return isinstance(ambient, HyperbolicField) or ambient.eps == -1


@dataclass(frozen=True)
class ConcentricSpheres:
    ambient: AmbientSpace
    spec: WeingartenSpec
    tau_outer: float
    tau_inner: float
    kind = "concentric"

    def validate(self):
        if not self.tau_outer > self.tau_inner > 0:
            raise ValueError("concentric spheres need tau_outer > tau_inner > 0")
        if isinstance(self.ambient, SpaceForm) and self.ambient.eps == 1 and self.tau_outer >= math.pi / 2:
            raise ValueError("spherical scenarios must stay inside an open hemisphere")

    def members(self):
        fam = _sphere_family(self.ambient)
        return fam, self.tau_outer, fam, self.tau_inner

    def gap(self, tau1: float, tau2: float) -> float:
        return tau1 - tau2


@dataclass(frozen=True)
class CollinearDisjointSpheres:
    ambient: AmbientSpace
    spec: WeingartenSpec
    d: float
    tau1: float
    tau2: float
    kind = "collinear"

    def validate(self):
        if not (self.tau1 > 0 and self.tau2 > 0 and self.tau1 + self.tau2 < self.d):
            raise ValueError("disjoint spheres need tau1 + tau2 < d")
        if isinstance(self.ambient, SpaceForm) and self.ambient.eps == 1 and self.d + self.tau1 + self.tau2 >= math.pi:
            raise ValueError("spherical scenarios must stay inside an open hemisphere")

    def members(self):
        fam = _sphere_family(self.ambient)
        return fam, self.tau1, fam, self.tau2

    def gap(self, tau1: float, tau2: float) -> float:
        return self.d - tau1 - tau2


@dataclass(frozen=True)
class SphereInsideHorosphere:
    """A geodesic sphere of radius ``radius`` inside a horoball, ``gap`` away from its horosphere.

    The horosphere advances into the horoball by its constant speed while
    the sphere shrinks about its fixed center, so the distance is
    ``radius + gap - advance - radius(t)``.
    """

    ambient: AmbientSpace
    spec: WeingartenSpec
    radius: float
    gap0: float
    kind = "sphere_in_horoball"

    def validate(self):
        if not _is_hyperbolic(self.ambient):
            raise ValueError("horospheres need a hyperbolic ambient")
        if not (self.radius > 0 and self.gap0 > 0):
            raise ValueError("radius and gap must be positive")

    def members(self):
        horo = HFHorosphere(self.ambient) if isinstance(self.ambient, HyperbolicField) else Horosphere(self.ambient)
        return horo, 0.0, _sphere_family(self.ambient), self.radius

    def gap(self, tau1: float, tau2: float) -> float:
        return self.radius + self.gap0 - tau1 - tau2


PairScenario = Union[ConcentricSpheres, CollinearDisjointSpheres, SphereInsideHorosphere]


@dataclass
class MonotoneVerdict:
    passed: bool
    worst_violation: float = 0.0
    first_violation: Optional[tuple[float, float]] = None


@dataclass
class DistanceCurve:
    t: np.ndarray
    D: np.ndarray
    horizon: float
    justification: str
    extension: bool = False
    verdict: Optional[MonotoneVerdict] = field(default=None)


def _justification(scenario: PairScenario) -> str:
    n = scenario.ambient.n
    if scenario.spec.is_odd(n):
        return "odd"
    if scenario.kind == "sphere_in_horoball":
        raise ValueError("non-odd speeds are only admitted for two inward-oriented spheres")
    return "inward-spheres"


def distance_curve(scenario: PairScenario, config: SolverConfig = SolverConfig(),
                   grid: int = 200, horizon_fraction: float = 0.99) -> DistanceCurve:
    """Integrate both flows and tabulate ``D(t)`` up to a fraction of the first collapse."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    scenario.validate()
    justification = _justification(scenario)
    fam1, s1, fam2, s2 = scenario.members()
    p1 = FlowProblem(fam1, scenario.spec, s1)
    p2 = FlowProblem(fam2, scenario.spec, s2)
    times = [collapse_time(p).T for p in (p1, p2) if not p.family.is_constant()]
    horizon = horizon_fraction * min(times)
    t = np.linspace(0.0, horizon, grid)
    phis = []
    for p in (p1, p2):
        traj = integrate(FlowProblem(p.family, p.spec, p.tau0, t_max=horizon), config, t_eval=t)
        by_time = {s.t: s.phi for s in traj.samples}
        phis.append([by_time.get(float(ti)) if float(ti) in by_time else phi_of_t(traj, float(ti))
                     for ti in t])
    D = np.empty(grid)
    for i in range(grid):
        phi1, phi2 = phis[0][i], phis[1][i]
        # the horosphere enters through its advance phi1, spheres through their radii
        if scenario.kind == "sphere_in_horoball":
            g = scenario.gap(phi1, s2 - phi2)
        else:
            g = scenario.gap(s1 - phi1, s2 - phi2)
        D[i] = g * g
    return DistanceCurve(t, D, horizon, justification,
                         extension=scenario.kind == "sphere_in_horoball")


def check_monotone(curve: DistanceCurve, tol: float = 1e-9) -> MonotoneVerdict:
    """Pass iff every consecutive difference is at least ``-tol * (1 + |D|)``."""
    D = np.asarray(curve.D, dtype=float)
    if D.size == 0:
        raise ValueError("empty distance curve")
    worst, first = 0.0, None
    for i in range(len(D) - 1):
        diff = D[i + 1] - D[i]
        bound = -tol * (1.0 + abs(D[i]))
        if diff < bound:
            worst = min(worst, diff)
            if first is None:
                first = (float(curve.t[i]), float(curve.t[i + 1]))
    verdict = MonotoneVerdict(first is None, abs(worst), first)
    curve.verdict = verdict
    return verdict
