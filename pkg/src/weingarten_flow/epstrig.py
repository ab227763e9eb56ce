"""Curvature-parametrized trigonometric functions.

For a space form of sectional curvature ``eps`` in {-1, 0, 1}:

    ============  ========  ========  =========
    function      eps = 0   eps = 1   eps = -1
    ============  ========  ========  =========
    cos_eps(s)    1         cos s     cosh s
    sin_eps(s)    s         sin s     sinh s
    ============  ========  ========  =========

``tan_eps``, ``cot_eps`` and ``sec_eps`` are the usual quotients. They raise
:class:`PoleError` instead of returning infinities.
"""
from __future__ import annotations

import math

EPSILONS = (-1, 0, 1)


class PoleError(ArithmeticError):
    """Raised when a quotient is evaluated at a zero of its denominator."""


def check_eps(eps: int) -> int:
    if eps not in EPSILONS:
        raise ValueError(f"curvature sign must be one of {EPSILONS}, got {eps!r}")
    return int(eps)


def cos_eps(eps: int, s: float) -> float:
    eps = check_eps(eps)
    if eps == 0:
        return 1.0
    if eps == 1:
        return math.cos(s)
    return math.cosh(s)


def sin_eps(eps: int, s: float) -> float:
    eps = check_eps(eps)
    if eps == 0:
        return float(s)
    if eps == 1:
        return math.sin(s)
    return math.sinh(s)


def _quotient(num: float, den: float, name: str, eps: int, s: float) -> float:
    if den == 0.0:
        raise PoleError(f"{name}_eps has a pole at s={s!r} (eps={eps})")
    return num / den


def tan_eps(eps: int, s: float) -> float:
    return _quotient(sin_eps(eps, s), cos_eps(eps, s), "tan", eps, s)


def cot_eps(eps: int, s: float) -> float:
    """``cos_eps / sin_eps``; blows up like ``1/s`` as ``s -> 0+`` for every eps."""
    return _quotient(cos_eps(eps, s), sin_eps(eps, s), "cot", eps, s)


def sec_eps(eps: int, s: float) -> float:
    return _quotient(1.0, cos_eps(eps, s), "sec", eps, s)
