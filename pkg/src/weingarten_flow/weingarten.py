"""Weingarten speed functions evaluated on multiplicity-compressed curvatures.

A principal-curvature vector is stored as blocks ``(value, multiplicity)``.
Higher order mean curvatures are computed from the generating polynomial

    prod_i (1 + k_i x)^{m_i} = sum_r H_r x^r

truncated at degree ``r``, so the cost depends on the number of distinct
blocks rather than on ``C(n, r)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np


class WeingartenDomainError(ValueError):
    """The speed function is not defined on the given curvature profile."""


@dataclass(frozen=True)
class CurvatureProfile:
    """Principal curvatures as ``(value, multiplicity)`` blocks."""

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        cleaned = []
        for value, mult in self.entries:
            if int(mult) != mult or mult < 1:
                raise ValueError(f"multiplicity must be a positive integer, got {mult!r}")
            cleaned.append((float(value), int(mult)))
        if not cleaned:
            raise ValueError("a curvature profile needs at least one block")
        object.__setattr__(self, "entries", tuple(cleaned))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "CurvatureProfile":
        return cls(tuple((float(v), 1) for v in values))

    @property
    def n(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.entries)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.entries)

    def expanded(self) -> list[float]:
        return [v for v, m in self.entries for _ in range(m)]

    def scaled(self, lam: float) -> "CurvatureProfile":
        return CurvatureProfile(tuple((lam * v, m) for v, m in self.entries))

    def canonical(self) -> tuple[tuple[float, int], ...]:
        """Blocks sorted by ``(|value|, value)`` with equal values merged.

        Evaluating on the canonical form makes results independent of the
        order (and splitting) of the blocks, bit for bit. Sorting on the
        magnitude first keeps the order under ``k -> -k``, so odd specs
        satisfy ``W(-k) = -W(k)`` exactly.
        """
        merged: dict[float, int] = {}
        for v, m in self.entries:
            merged[v] = merged.get(v, 0) + m
        return tuple(sorted(merged.items(), key=lambda b: (abs(b[0]), b[0])))


def elementary_symmetric(blocks: Sequence[tuple[float, int]], r: int) -> list[float]:
    """Return ``[e_0, ..., e_r]`` of the expanded vector described by ``blocks``."""
    e = [1.0] + [0.0] * r
    for value, mult in blocks:
        top = min(mult, r)
        coeffs = [math.comb(mult, j) * value**j for j in range(top + 1)]
        new = [0.0] * (r + 1)
        for i, ei in enumerate(e):
            if ei == 0.0:
                continue
            for j in range(min(top, r - i) + 1):
                new[i + j] += ei * coeffs[j]
        e = new
    return e


def _drop_one(blocks: Sequence[tuple[float, int]], index: int) -> list[tuple[float, int]]:
    out = []
    for i, (v, m) in enumerate(blocks):
        if i == index:
            m -= 1
        if m:
            out.append((v, m))
    return out


@dataclass(frozen=True)
class MeanCurvature:
    """Non-normalized ``r``-th mean curvature ``H_r`` (``H_1`` is the mean curvature)."""

    r: int = 1

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"H_r needs an integer r >= 1, got {self.r!r}")

    def degree(self, n: int) -> float:
        return float(self.r)

    def is_odd(self, n: int) -> bool:
        return self.r % 2 == 1

    def _check(self, k: CurvatureProfile):
        if self.r > k.n:
            raise WeingartenDomainError(f"H_{self.r} needs n >= {self.r}, profile has n={k.n}")

    def value(self, k: CurvatureProfile) -> float:
        self._check(k)
        return elementary_symmetric(k.canonical(), self.r)[self.r]

    def grad(self, k: CurvatureProfile) -> list[float]:
        self._check(k)
        blocks = k.entries
        return [
            elementary_symmetric(_drop_one(blocks, i), self.r - 1)[self.r - 1]
            for i in range(len(blocks))
        ]

    def label(self) -> str:
        return f"H_{self.r}"


@dataclass(frozen=True)
class SquaredNorm:
    """Squared norm of the second fundamental form, ``sum k_i^2``."""

    def degree(self, n: int) -> float:
        return 2.0

    def is_odd(self, n: int) -> bool:
        return False

    def value(self, k: CurvatureProfile) -> float:
        return math.fsum(m * v * v for v, m in k.canonical())

    def grad(self, k: CurvatureProfile) -> list[float]:
        return [2.0 * v for v, _ in k.entries]

    def label(self) -> str:
        return "|A|^2"


@dataclass(frozen=True)
class GaussK:
    """Gauss-Kronecker curvature ``K = H_n``."""

    def degree(self, n: int) -> float:
        return float(n)

    def is_odd(self, n: int) -> bool:
        return n % 2 == 1

    def value(self, k: CurvatureProfile) -> float:
        return math.prod(v**m for v, m in k.canonical())

    def grad(self, k: CurvatureProfile) -> list[float]:
        blocks = k.entries
        return [
            math.prod(v**m for v, m in _drop_one(blocks, i)) for i in range(len(blocks))
        ]

    def label(self) -> str:
        return "K"


@dataclass(frozen=True)
class Power:
    """Positive power ``base ** p`` of another Weingarten function."""

    base: "WeingartenSpec"
    p: float = 1.0

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"power must be positive, got {self.p!r}")

    def degree(self, n: int) -> float:
        return self.p * self.base.degree(n)

    def is_odd(self, n: int) -> bool:
        return self.p == 1 and self.base.is_odd(n)

    def _base_value(self, k: CurvatureProfile) -> float:
        b = self.base.value(k)
        if b < 0 and float(self.p) != int(self.p):
            raise WeingartenDomainError(
                f"negative base value {b!r} under fractional power {self.p!r}"
            )
        return b

    def value(self, k: CurvatureProfile) -> float:
        b = self._base_value(k)
        if float(self.p).is_integer():
            return b ** int(self.p)
        return b**self.p

    def grad(self, k: CurvatureProfile) -> list[float]:
        b = self._base_value(k)
        if b == 0 and self.p < 1:
            raise WeingartenDomainError("gradient of a fractional power at a zero of the base")
        factor = self.p * (b ** int(self.p - 1) if float(self.p).is_integer() else b ** (self.p - 1))
        return [factor * g for g in self.base.grad(k)]

    def label(self) -> str:
        return f"({self.base.label()})^{self.p:g}"


WeingartenSpec = Union[MeanCurvature, SquaredNorm, GaussK, Power]


def evaluate(spec: WeingartenSpec, k: CurvatureProfile) -> float:
    """``W(k_1, ..., k_n)`` on the expanded curvature vector."""
    return spec.value(k)


def gradient(spec: WeingartenSpec, k: CurvatureProfile) -> list[float]:
    """Partial derivatives ``dW/dk_i``, one entry per block of ``k``."""
    return spec.grad(k)


@dataclass
class AxiomCheck:
    name: str
    passed: bool = True
    skipped: bool = False
    counterexample: tuple[float, ...] | None = None
    detail: str = ""


@dataclass
class AxiomReport:
    spec: str
    n: int
    samples: int
    checks: dict[str, AxiomCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())


def _rel_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def validate_axioms(
    spec: WeingartenSpec,
    n: int,
    samples: int = 100,
    seed: int = 0,
    euler_rtol: float = 1e-8,
) -> AxiomReport:
    """Sample the positive cone and test the Weingarten axioms.

    Checks positivity, monotonicity (positive gradient), Euler's identity
    ``sum k_i dW/dk_i = degree * W``, permutation symmetry and, for odd
    specs, ``W(-k) = -W(k)``. Failures are recorded with the first
    offending point instead of raising.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    names = ("positivity", "monotonicity", "euler", "symmetry", "oddness")
    report = AxiomReport(spec=spec.label(), n=n, samples=samples,
                         checks={name: AxiomCheck(name) for name in names})
    odd = spec.is_odd(n)
    if not odd:
        report.checks["oddness"].skipped = True
        report.checks["oddness"].detail = "spec is not odd"
    degree = spec.degree(n)

    def fail(name: str, point: np.ndarray, detail: str):
        check = report.checks[name]
        if check.passed:
            check.passed = False
            check.counterexample = tuple(float(x) for x in point)
            check.detail = detail

    for _ in range(samples):
        point = np.exp(rng.uniform(-1.5, 1.5, size=n))
        k = CurvatureProfile.from_values(point)
        w = evaluate(spec, k)
        if not w > 0:
            fail("positivity", point, f"W={w!r}")
        grad = gradient(spec, k)
        if min(grad) <= 0:
            fail("monotonicity", point, f"min gradient {min(grad)!r}")
        euler = math.fsum(v * g for v, g in zip(point, grad))
        if not _rel_close(euler, degree * w, euler_rtol):
            fail("euler", point, f"sum k dW/dk={euler!r}, degree*W={degree * w!r}")
        shuffled = CurvatureProfile.from_values(rng.permutation(point))
        w_perm = evaluate(spec, shuffled)
        if not _rel_close(w_perm, w, 1e-12):
            fail("symmetry", point, f"W(perm k)={w_perm!r} vs {w!r}")
        if odd:
            w_neg = evaluate(spec, k.scaled(-1.0))
            if not _rel_close(w_neg, -w, 1e-12):
                fail("oddness", point, f"W(-k)={w_neg!r} vs -W(k)={-w!r}")
    return report
