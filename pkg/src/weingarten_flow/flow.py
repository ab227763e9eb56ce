"""Parallel Weingarten flows reduced to a scalar ODE in the focal parameter.

A parallel flow ``F_t = f_{tau(t)}`` of an isoparametric family solves the
Weingarten flow exactly when

    tau'(t) = drift * W(tau),    tau(0) = tau0,

where ``W(tau)`` is the speed function evaluated on the principal
curvatures of ``f_tau`` and ``drift`` is ``-1`` for families moving toward
their focal set and ``+1`` for horospheres. The travelled distance is
``phi(t) = drift * (tau(t) - tau0)`` so that ``phi' = W``.

Collapse times are computed twice, independently:

* :func:`integrate` steps the ODE with an adaptive Dormand-Prince pair
  until ``tau`` is within ``collapse_margin`` of the focal end;
* :func:`collapse_time` integrates ``dtau / |W(tau)|`` by adaptive
  quadrature over the traversed interval.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ._rk import ORDER, dp_step
from .families import IsoparametricFamily
from .weingarten import CurvatureProfile, WeingartenSpec

log = logging.getLogger(__name__)

# ends that are only approached asymptotically (W -> 0 there)
ASYMPTOTIC_ENDS = frozenset({"Pi"})


class FlowError(RuntimeError):
    """Numerical failure while following a flow."""


class StepUnderflowError(FlowError):
    pass


class FlowStallError(FlowError):
    """``W`` vanishes inside the traversed interval, so the flow stalls."""


@dataclass(frozen=True)
class SolverConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    collapse_margin: float = 1e-6
    max_steps: int = 200_000

    def __post_init__(self):
        if not (0 < self.rtol < 1 and 0 < self.atol < 1):
            raise ValueError("rtol and atol must lie in (0, 1)")
        if not self.collapse_margin > 0:
            raise ValueError("collapse_margin must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class FlowProblem:
    family: IsoparametricFamily
    spec: WeingartenSpec
    tau0: float
    t_max: Optional[float] = None

    def __post_init__(self):
        fam = self.family
        if not fam.contains(self.tau0):
            lo, hi = fam.tau_domain()
            raise ValueError(f"tau0={self.tau0!r} must be interior to ({lo}, {hi})")
        if fam.kind == "geodesic_sphere" and fam.ambient.eps == 1 and not self.tau0 < math.pi / 2:
            raise ValueError("spherical geodesic spheres must start strictly convex, tau0 < pi/2")
        w = self.speed(self.tau0)
        if not math.isfinite(w):
            raise ValueError(f"speed at tau0 is not finite: {w!r}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")

    @property
    def drift(self) -> int:
        return self.family.drift

    def speed(self, tau: float) -> float:
        return self.family.speed(self.spec, tau)

    def rhs(self, tau: float) -> float:
        return self.family.drift * self.speed(tau)

    def direction(self) -> int:
        """Sign of ``tau'`` at the start; raises when the flow is stationary."""
        v = self.rhs(self.tau0)
        if v == 0:
            raise FlowStallError(f"W vanishes at tau0={self.tau0!r}: the flow is stationary")
        return 1 if v > 0 else -1

    def target(self) -> tuple[float, Optional[str]]:
        """Domain end the flow travels toward, with its label."""
        lo, hi = self.family.tau_domain()
        end_lo, end_hi = self.family.ends()
        return (hi, end_hi) if self.direction() > 0 else (lo, end_lo)


@dataclass(frozen=True)
class CollapseResult:
    """Terminal state of a flow.

    ``verdict`` is ``"collapsed"`` (``T`` and ``end`` set), ``"non-collapsing"``
    (``reason`` set) or ``"truncated"`` (stopped at ``t_max``).
    """

    verdict: str
    T: Optional[float] = None
    end: Optional[str] = None
    reason: Optional[str] = None
    t_max: Optional[float] = None
    error_estimate: float = 0.0
    monotone_speed: Optional[bool] = None

    def __post_init__(self):
        if self.verdict not in ("collapsed", "non-collapsing", "truncated"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "collapsed" and not (self.T is not None and self.T > 0):
            raise ValueError("a collapsed verdict needs T > 0")
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")


@dataclass(frozen=True)
class Sample:
    t: float
    tau: float
    phi: float
    speed: float
    curvatures: CurvatureProfile


@dataclass
class FlowTrajectory:
    problem: FlowProblem
    samples: list[Sample]
    terminal: CollapseResult
    _interp: Optional["_MonotoneHermite"] = field(default=None, repr=False)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def tau(self) -> np.ndarray:
        return np.array([s.tau for s in self.samples])

    @property
    def phi(self) -> np.ndarray:
        return np.array([s.phi for s in self.samples])

    @property
    def speed(self) -> np.ndarray:
        return np.array([s.speed for s in self.samples])


def _non_collapse_reason(family: IsoparametricFamily) -> str:
    return "constant-speed horosphere" if family.is_constant() else "asymptotic-to-Pi"


def _traversed_grid(problem: FlowProblem, margin: float, points: int = 64) -> np.ndarray:
    """Sample points from ``tau0`` toward the target end, denser near it."""
    end, _ = problem.target()
    tau0 = problem.tau0
    if math.isinf(end):
        return tau0 + math.copysign(1.0, end) * np.expm1(np.linspace(0.0, 4.0, points))
    span = end - tau0
    frac = 1.0 - np.logspace(0.0, math.log10(max(margin / abs(span), 1e-12)), points)
    return tau0 + span * np.clip(frac, 0.0, 1.0 - 1e-12)


def speed_monotone(problem: FlowProblem, margin: float = 1e-6) -> bool:
    """Whether ``|W|`` increases along the traversed interval.

    This is the hypothesis under which flows on the sphere are known to
    collapse onto the focal component they move toward.
    """
    grid = _traversed_grid(problem, margin)
    w = np.abs([problem.speed(float(s)) for s in grid])
    return bool(np.all(np.diff(w) > 0))


def _check_no_stall(problem: FlowProblem, margin: float):
    sign = problem.direction()
    for s in _traversed_grid(problem, margin, points=128):
        v = problem.rhs(float(s))
        if v == 0 or math.copysign(1, v) != sign:
            raise FlowStallError(
                f"W changes sign near tau={float(s)!r}: the flow stalls before reaching the end"
            )


def _inv_speed(problem: FlowProblem):
    def g(tau: float) -> float:
        try:
            return 1.0 / abs(problem.speed(tau))
        except (ZeroDivisionError, ArithmeticError):
            return 0.0  # pole of W: 1/|W| -> 0
    return g


def _quad(g, a: float, b: float, tol: float) -> tuple[float, float]:
    val, err = quad(g, a, b, epsabs=tol, epsrel=1e-13, limit=200)
    return val, err


def collapse_time(problem: FlowProblem, tol: float = 1e-12) -> CollapseResult:
    """Collapse time as the integral of ``dtau / |W(tau)|`` over the traversed interval.

    The interval is cut into pieces that shrink geometrically toward the
    target end (or grow geometrically when the end is infinite). The
    contributions of a convergent integral decay geometrically, and the
    tail is extrapolated from their ratio. Contributions that stop
    decaying mark a divergent integral, reported as non-collapsing.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    _check_no_stall(problem, 1e-9)
    end, label = problem.target()
    g = _inv_speed(problem)
    tau0 = problem.tau0
    monotone = speed_monotone(problem)

    if math.isinf(end):
        step = math.copysign(1.0, end)
        edges = (tau0 + step * (2.0**k - 1.0) for k in range(0, 200))
    else:
        span = end - tau0
        edges = (end - span * 2.0**-k for k in range(0, 200))

    total, err_total = 0.0, 0.0
    prev_piece = None
    flat_levels = 0
    a = next(edges)
    for level, b in enumerate(edges):
        if b == a:
            break
        lo_, hi_ = (a, b) if a < b else (b, a)
        piece, err = _quad(g, lo_, hi_, tol / 64)
        total += piece
        err_total += err
        a = b
        if total > 1e6 * max(abs(tau0), 1.0):
            return CollapseResult("non-collapsing", reason=_non_collapse_reason(problem.family),
                                  monotone_speed=monotone)
        if prev_piece is not None and prev_piece > 0:
            ratio = piece / prev_piece
            if ratio >= 0.95:
                flat_levels += 1
                if flat_levels >= 8:
                    return CollapseResult("non-collapsing",
                                          reason=_non_collapse_reason(problem.family),
                                          monotone_speed=monotone)
            else:
                flat_levels = 0
                tail = piece * ratio / (1.0 - ratio)
                if level >= 3 and tail < tol / 4:
                    return CollapseResult("collapsed", T=total + tail, end=label,
                                          error_estimate=err_total + tail,
                                          monotone_speed=monotone)
        elif piece == 0.0 and prev_piece == 0.0:
            break
        prev_piece = piece
    if label in ASYMPTOTIC_ENDS or label is None:
        return CollapseResult("non-collapsing", reason=_non_collapse_reason(problem.family),
                              monotone_speed=monotone)
    return CollapseResult("collapsed", T=total, end=label,
                          error_estimate=err_total + (prev_piece or 0.0),
                          monotone_speed=monotone)


def _event_step(rhs, tau: float, k1: float, h: float, threshold: float) -> float:
    """Sub-step length in ``(0, h]`` at which the RK step lands on ``threshold``."""
    def g(hh: float) -> float:
        return dp_step(rhs, tau, hh, k1)[0] - threshold
    try:
        return brentq(g, 0.0, h, xtol=4 * np.finfo(float).eps * h, rtol=4 * np.finfo(float).eps)
    except (ValueError, ArithmeticError):
        # linear fallback on the accepted step
        y1, _, _ = dp_step(rhs, tau, h, k1)
        return h * (threshold - tau) / (y1 - tau)


def integrate(problem: FlowProblem, config: SolverConfig = SolverConfig(),
              t_eval: Optional[Sequence[float]] = None) -> FlowTrajectory:
    """Follow the flow until collapse or ``problem.t_max``.

    On reaching ``collapse_margin`` of a focal end the crossing time is
    located inside the last step and the remaining time
    ``int dtau / |W|`` across the margin is added by quadrature.

    Times in ``t_eval`` are added to the samples by taking a partial step
    from the start of the step that contains them, at full order.
    """
    fam = problem.family
    rhs = problem.rhs
    tau0 = problem.tau0
    direction = problem.direction()
    end, label = problem.target()
    event = math.isfinite(end) and label not in ASYMPTOTIC_ENDS
    if problem.t_max is None and not event:
        raise ValueError(f"{fam.describe()} does not collapse toward its {label or 'infinite'} end; "
                         "a finite t_max is required")
    threshold = end - direction * config.collapse_margin if event else None
    if event and (threshold - tau0) * direction <= 0:
        raise ValueError("tau0 already lies within collapse_margin of the focal end")
    lo, hi = fam.tau_domain()
    t_max = problem.t_max if problem.t_max is not None else math.inf

    def sample(t: float, tau: float) -> Sample:
        k = fam.principal_curvatures(tau)
        return Sample(t, tau, fam.drift * (tau - tau0) + 0.0, problem.spec.value(k), k)

    samples = [sample(0.0, tau0)]
    t, tau = 0.0, tau0
    k1 = rhs(tau)
    distance = abs(threshold - tau0) if event else max(abs(tau0), 1.0)
    h = min(0.01 * distance / abs(k1), config.max_step, t_max)
    shift_error = 0.0
    floor_tau = 1e-14 * max(1.0, abs(tau0))
    terminal = None
    pending = sorted(float(x) for x in (() if t_eval is None else t_eval) if x > 0)
    pending.reverse()

    def emit_between(t_end: float):
        while pending and pending[-1] < t_end:
            te = pending.pop()
            samples.append(sample(te, dp_step(rhs, tau, te - t, k1)[0]))

    for _ in range(config.max_steps):
        h = min(h, config.max_step, t_max - t)
        try:
            tau_new, err, k7 = dp_step(rhs, tau, h, k1)
            ok = lo < tau_new < hi and math.isfinite(tau_new)
        except (ArithmeticError, ValueError):
            ok = False
        if ok:
            # error per unit step: a local error d shifts the collapse time by
            # d/|W|, so bounding d by rtol*|dtau| keeps the summed shift near rtol*T
            size = min(max(abs(tau), abs(tau_new)), abs(tau_new - tau))
            errnorm = abs(err) / (config.atol + config.rtol * size)
        if not ok or errnorm > 1.0:
            h *= 0.25 if not ok else max(0.2, 0.9 * errnorm ** (-1.0 / (ORDER - 1)))
            if h < 1e-14 * max(1.0, t) and abs(h * k1) < floor_tau:
                raise StepUnderflowError(
                    f"step size underflow at t={t!r}, tau={tau!r} (h={h!r})")
            continue

        if event and (tau_new - threshold) * direction >= 0:
            h_evt = _event_step(rhs, tau, k1, h, threshold)
            t_evt = t + h_evt
            emit_between(t_evt)
            shift_error += abs(err) / abs(k1)
            samples.append(sample(t_evt, threshold))
            a, b = sorted((end, threshold))
            rest, rest_err = _quad(_inv_speed(problem), a, b, 1e-15)
            terminal = CollapseResult("collapsed", T=t_evt + rest, end=label,
                                      error_estimate=shift_error + rest_err,
                                      monotone_speed=speed_monotone(problem, config.collapse_margin))
            break

        shift_error += abs(err) / max(abs(k1), abs(k7))
        t_next = t_max if t + h >= t_max else t + h
        emit_between(t_next)
        if pending and pending[-1] == t_next:
            pending.pop()
        t = t_next
        tau, k1 = tau_new, k7
        samples.append(sample(t, tau))
        if t >= t_max:
            break
        grow = 5.0 if errnorm == 0 else min(5.0, 0.9 * errnorm ** (-1.0 / (ORDER - 1)))
        h *= grow
    else:
        raise FlowError(f"no collapse or t_max within {config.max_steps} steps")

    if terminal is None:
        # constant families and flows tending to an asymptotic end never collapse,
        # so stopping at t_max is the expected outcome rather than a truncation
        if fam.is_constant() or problem.target()[1] in ASYMPTOTIC_ENDS:
            terminal = CollapseResult("non-collapsing", reason=_non_collapse_reason(fam),
                                      t_max=t, error_estimate=shift_error)
        else:
            terminal = CollapseResult("truncated", t_max=t, error_estimate=shift_error,
                                      monotone_speed=None)
    return FlowTrajectory(problem, samples, terminal)


class _MonotoneHermite:
    """Cubic Hermite interpolant with Fritsch-Carlson slope limiting."""

    def __init__(self, x: np.ndarray, y: np.ndarray, dy: np.ndarray):
        self.x, self.y = x, y
        d = dy.astype(float).copy()
        if len(x) > 1:
            delta = np.diff(y) / np.diff(x)
            for i, s in enumerate(delta):
                if s == 0:
                    d[i] = d[i + 1] = 0.0
                    continue
                a, b = d[i] / s, d[i + 1] / s
                if a < 0:
                    d[i], a = 0.0, 0.0
                if b < 0:
                    d[i + 1], b = 0.0, 0.0
                r2 = a * a + b * b
                if r2 > 9.0:
                    tau = 3.0 / math.sqrt(r2)
                    d[i], d[i + 1] = tau * a * s, tau * b * s
        self.d = d

    def __call__(self, t: float) -> float:
        x = self.x
        i = int(np.clip(np.searchsorted(x, t, side="right") - 1, 0, len(x) - 2))
        h = x[i + 1] - x[i]
        s = (t - x[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return float(h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1])


def phi_of_t(trajectory: FlowTrajectory, t: float) -> float:
    """Travelled distance ``phi(t)`` by monotone cubic interpolation of the samples."""
    ts = trajectory.t
    if not 0.0 <= t <= ts[-1]:
        raise ValueError(f"t={t!r} outside [0, {ts[-1]!r}]")
    if t == 0.0:
        return 0.0
    if trajectory._interp is None:
        # samples near the focal end can share a rounded t; keep the last of each
        last = np.append(np.diff(ts) > 0, True)
        trajectory._interp = _MonotoneHermite(ts[last], trajectory.phi[last],
                                              trajectory.speed[last])
    return trajectory._interp(t)
