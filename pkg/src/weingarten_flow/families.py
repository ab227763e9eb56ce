"""Ambient spaces and their parallel families of isoparametric hypersurfaces.

Every family is parametrized by the focal parameter ``tau`` (radius for
geodesic spheres, distance to the focal set otherwise) and exposes its
principal curvatures, with the orientation that makes them positive on
the convex families, as a :class:`CurvatureProfile`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .epstrig import check_eps, cot_eps
from .weingarten import CurvatureProfile, WeingartenSpec, evaluate

FIELD_DIMENSION = {"R": 1, "C": 2, "K": 4, "O": 8}


class DomainError(ValueError):
    """``tau`` lies outside the family's parameter interval."""


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected space form of curvature ``eps`` and dimension ``dim = n + 1``."""

    eps: int
    dim: int

    def __post_init__(self):
        check_eps(self.eps)
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"ambient dimension must be an integer >= 2, got {self.dim!r}")

    @property
    def n(self) -> int:
        return self.dim - 1

    def label(self) -> str:
        return {0: "R", 1: "S", -1: "H"}[self.eps] + f"^{self.dim}"


@dataclass(frozen=True)
class HyperbolicField:
    """Hyperbolic space ``H_F^m`` over ``F`` in {R, C, K, O}, of real dimension ``m dim F``."""

    field: str
    m: int

    def __post_init__(self):
        if self.field not in FIELD_DIMENSION:
            raise ValueError(f"field must be one of {sorted(FIELD_DIMENSION)}, got {self.field!r}")
        if self.field == "O" and self.m != 2:
            raise ValueError("the Cayley hyperbolic space only exists for m = 2")
        if int(self.m) != self.m or self.m < 1 or self.dim < 2:
            raise ValueError(f"invalid m={self.m!r} for field {self.field}")

    @property
    def dim(self) -> int:
        return self.m * FIELD_DIMENSION[self.field]

    @property
    def n(self) -> int:
        return self.dim - 1

    @property
    def q(self) -> int:
        """Multiplicity of the ``coth(tau)`` curvature of geodesic spheres."""
        return {"R": self.n, "C": 1, "K": 3, "O": 7}[self.field]

    def label(self) -> str:
        return f"H_{self.field}^{self.m}"


AmbientSpace = Union[SpaceForm, HyperbolicField]


class _Family:
    """Shared behaviour; subclasses provide ``_profile``, ``tau_domain`` and ``ends``."""

    drift = -1
    kind = ""

    @property
    def n(self) -> int:
        return self.ambient.n

    def tau_domain(self) -> tuple[float, float]:
        raise NotImplementedError

    def ends(self) -> tuple[str | None, str | None]:
        """Labels of what the flow reaches at the lower and upper domain ends."""
        raise NotImplementedError

    def contains(self, tau: float) -> bool:
        lo, hi = self.tau_domain()
        return lo < tau < hi

    def principal_curvatures(self, tau: float) -> CurvatureProfile:
        if not self.contains(tau):
            lo, hi = self.tau_domain()
            raise DomainError(f"tau={tau!r} outside ({lo}, {hi}) for {self.describe()}")
        blocks = [(v, m) for v, m in self._profile(tau) if m > 0]
        return CurvatureProfile(tuple(blocks))

    def speed(self, spec: WeingartenSpec, tau: float) -> float:
        return evaluate(spec, self.principal_curvatures(tau))

    def is_constant(self) -> bool:
        return False

    def describe(self) -> str:
        return f"{self.kind} in {self.ambient.label()}"


@dataclass(frozen=True)
class GeodesicSphere(_Family):
    ambient: SpaceForm
    kind = "geodesic_sphere"

    def __post_init__(self):
        if not isinstance(self.ambient, SpaceForm):
            raise TypeError("GeodesicSphere lives in a space form; use HFGeodesicSphere for H_F^m")

    def tau_domain(self):
        # cot has a pole at pi on the round sphere
        return (0.0, math.pi if self.ambient.eps == 1 else math.inf)

    def ends(self):
        return ("center", "antipode" if self.ambient.eps == 1 else None)

    def _profile(self, tau):
        return [(cot_eps(self.ambient.eps, tau), self.n)]


@dataclass(frozen=True)
class Horosphere(_Family):
    ambient: SpaceForm
    kind = "horosphere"
    drift = 1

    def __post_init__(self):
        if not (isinstance(self.ambient, SpaceForm) and self.ambient.eps == -1):
            raise ValueError("horospheres require the hyperbolic space form (eps = -1)")

    def tau_domain(self):
        return (-math.inf, math.inf)

    def ends(self):
        return (None, None)

    def is_constant(self):
        return True

    def _profile(self, tau):
        return [(1.0, self.n)]


@dataclass(frozen=True)
class Equidistant(_Family):
    """Hypersurfaces at distance ``tau`` from a totally geodesic hyperplane ``Pi``."""

    ambient: SpaceForm
    kind = "equidistant"

    def __post_init__(self):
        if not (isinstance(self.ambient, SpaceForm) and self.ambient.eps == -1):
            raise ValueError("equidistant hypersurfaces require the hyperbolic space form (eps = -1)")

    def tau_domain(self):
        return (0.0, math.inf)

    def ends(self):
        return ("Pi", None)

    def _profile(self, tau):
        return [(math.tanh(tau), self.n)]


@dataclass(frozen=True)
class GeneralizedCylinder(_Family):
    """Tube ``Q^{n-k} x S^k`` of radius ``tau`` about a totally geodesic ``Q^{n-k}``."""

    ambient: SpaceForm
    k: int
    kind = "generalized_cylinder"

    def __post_init__(self):
        if not isinstance(self.ambient, SpaceForm) or self.ambient.eps == 1:
            raise ValueError("generalized cylinders are catalogued for eps in {0, -1}")
        if not 1 <= self.k <= self.ambient.n - 1:
            raise ValueError(f"cylinder sphere dimension k must lie in [1, n-1], got {self.k!r}")

    def tau_domain(self):
        return (0.0, math.inf)

    def ends(self):
        return ("axis", None)

    def _profile(self, tau):
        eps = self.ambient.eps
        flat = 0.0 if eps == 0 else math.tanh(tau)
        return [(cot_eps(eps, tau), self.k), (flat, self.n - self.k)]


@dataclass(frozen=True)
class SphereMunzner(_Family):
    """Isoparametric family in ``S^{n+1}`` with ``g`` distinct curvatures.

    ``k_i = cot(tau + (i - 1) pi / g)`` with multiplicity ``m_i``; ``tau`` is
    the distance to the focal component ``F+``, the other component ``F-``
    sits at ``tau = pi / g``.
    """

    multiplicities: tuple[int, ...]
    kind = "munzner"

    def __post_init__(self):
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in self.multiplicities))
        if len(self.multiplicities) not in (1, 2, 3, 4, 6):
            raise ValueError(f"g must be one of 1, 2, 3, 4, 6, got {len(self.multiplicities)}")
        if min(self.multiplicities) < 1:
            raise ValueError("multiplicities must be positive")

    @property
    def g(self) -> int:
        return len(self.multiplicities)

    @property
    def ambient(self) -> SpaceForm:
        return SpaceForm(1, sum(self.multiplicities) + 1)

    def tau_domain(self):
        return (0.0, math.pi / self.g)

    def ends(self):
        return ("F+", "F-")

    def _profile(self, tau):
        g = self.g
        return [
            (1.0 / math.tan(tau + i * math.pi / g), m)
            for i, m in enumerate(self.multiplicities)
        ]


@dataclass(frozen=True)
class HFGeodesicSphere(_Family):
    ambient: HyperbolicField
    kind = "hf_sphere"

    def __post_init__(self):
        if not isinstance(self.ambient, HyperbolicField):
            raise TypeError("HFGeodesicSphere needs a HyperbolicField ambient")

    def tau_domain(self):
        return (0.0, math.inf)

    def ends(self):
        return ("center", None)

    def _profile(self, tau):
        q, n = self.ambient.q, self.n
        return [(1.0 / math.tanh(tau), q), (0.5 / math.tanh(0.5 * tau), n - q)]


@dataclass(frozen=True)
class HFHorosphere(_Family):
    ambient: HyperbolicField
    kind = "hf_horosphere"
    drift = 1

    def __post_init__(self):
        if not isinstance(self.ambient, HyperbolicField):
            raise TypeError("HFHorosphere needs a HyperbolicField ambient")

    def tau_domain(self):
        return (-math.inf, math.inf)

    def ends(self):
        return (None, None)

    def is_constant(self):
        return True

    def _profile(self, tau):
        q, n = self.ambient.q, self.n
        return [(1.0, q), (0.5, n - q)]


IsoparametricFamily = Union[
    GeodesicSphere, Horosphere, Equidistant, GeneralizedCylinder,
    SphereMunzner, HFGeodesicSphere, HFHorosphere,
]

CATALOGUE = {
    "geodesic_sphere": "Q_eps^{n+1}: k = cot_eps(tau), mult n; tau in (0, inf), (0, pi) on S^{n+1}",
    "horosphere": "H^{n+1}: k = 1, mult n; tau in R, constant speed",
    "equidistant": "H^{n+1}: k = tanh(tau), mult n; tau in (0, inf), tends to Pi",
    "generalized_cylinder": "Q_eps^{n+1}, eps<=0: cot_eps(tau) mult k, 0 or tanh(tau) mult n-k",
    "munzner": "S^{n+1}: k_i = cot(tau + (i-1) pi/g), mult m_i; tau in (0, pi/g)",
    "hf_sphere": "H_F^m: coth(tau) mult q, coth(tau/2)/2 mult n-q; tau in (0, inf)",
    "hf_horosphere": "H_F^m: 1 mult q, 1/2 mult n-q; tau in R, constant speed",
}
