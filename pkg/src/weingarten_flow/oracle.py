"""Closed-form collapse times and implicit solution relations.

The table is deliberately closed: it covers spherical flows in space forms
(``|A|^2`` and ``H_r``, with ``H_1``/``H_2`` in curved space), the Gauss
curvature flow of two-curvature families in ``S^{n+1}``, and the mean
curvature flow of geodesic spheres in ``H_F^m``. Any other problem gets
``None``.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

from .epstrig import cos_eps, cot_eps, tan_eps
from .families import GeodesicSphere, HFGeodesicSphere, SpaceForm, SphereMunzner
from .flow import FlowProblem
from .weingarten import GaussK, MeanCurvature, SquaredNorm

# (T, residual(t, phi)) for one matched problem
_Case = tuple[float, Callable[[float, float], float]]


def _sphere_power_case(eps: int, n: int, r: int, coeff: float, radius: float) -> Optional[_Case]:
    """Spheres moving with speed ``coeff * cot_eps(tau) ** r``.

    Covers ``H_r`` (``coeff = C(n, r)``) and ``|A|^2`` (``r = 2``, ``coeff = n``).
    """
    if eps == 0:
        T = radius ** (r + 1) / ((r + 1) * coeff)

        def residual(t, phi):
            return (radius - phi) ** (r + 1) / (r + 1) - radius ** (r + 1) / (r + 1) + coeff * t
        return T, residual
    cot0 = cot_eps(eps, radius)
    if r == 1:
        T = eps / coeff * math.log(1.0 / cos_eps(eps, radius))

        def residual(t, phi):
            return cos_eps(eps, radius - phi) - math.exp(eps * coeff * t) * cos_eps(eps, radius)
        return T, residual
    if r == 2:
        T = eps * (1.0 - cot0 * radius) / (cot0 * coeff)

        def residual(t, phi):
            return tan_eps(eps, radius - phi) + phi - (1.0 / cot0 - eps * coeff * t)
        return T, residual
    return None


def _match(problem: FlowProblem) -> Optional[_Case]:
    fam, spec, tau0 = problem.family, problem.spec, problem.tau0

    if isinstance(fam, GeodesicSphere) and isinstance(fam.ambient, SpaceForm):
        eps, n = fam.ambient.eps, fam.n
        if isinstance(spec, SquaredNorm):
            return _sphere_power_case(eps, n, 2, float(n), tau0)
        if isinstance(spec, (MeanCurvature, GaussK)):
            r = n if isinstance(spec, GaussK) else spec.r
            if r > n:
                return None
            return _sphere_power_case(eps, n, r, float(math.comb(n, r)), tau0)
        return None

    if isinstance(fam, SphereMunzner) and isinstance(spec, GaussK) and fam.g == 2:
        m1, m2 = fam.multiplicities
        if m2 % 2:
            return None
        if m1 == m2:
            return tau0, lambda t, phi: phi - t
        if m1 - m2 == 1:
            return (math.log(1.0 / math.cos(tau0)),
                    lambda t, phi: math.cos(tau0 - phi) - math.exp(t) * math.cos(tau0))
        return None

    if isinstance(fam, HFGeodesicSphere) and isinstance(spec, MeanCurvature) and spec.r == 1:
        n, q = fam.n, fam.ambient.q
        half_sum, diff = (n + q) / 2.0, float(n - q)

        def log_term(s):
            x = math.exp(s)
            return math.log(x / (half_sum * (x * x + 1) + diff * x)) / half_sum

        start = log_term(tau0)
        growth = math.exp(tau0)
        T = math.log((half_sum * (growth * growth + 1) + diff * growth) / (2 * n * growth)) / half_sum
        return T, lambda t, phi: log_term(tau0 - phi) - t - start

    return None


def closed_form_T(problem: FlowProblem) -> Optional[float]:
    """Exact collapse time of ``problem`` when it is in the table, else ``None``."""
    case = _match(problem)
    return None if case is None else case[0]


def implicit_phi_residual(problem: FlowProblem, t: float, phi: float) -> Optional[float]:
    """``G(t, phi)`` of the implicit solution relation ``G = 0``, or ``None``."""
    case = _match(problem)
    return None if case is None else case[1](t, phi)
