"""Dormand-Prince 5(4) embedded pair for scalar autonomous ODEs ``y' = f(y)``."""
from __future__ import annotations

from typing import Callable

C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
E = tuple(b5 - b4 for b5, b4 in zip(B5, B4))

ORDER = 5


def dp_step(f: Callable[[float], float], y: float, h: float, k1: float) -> tuple[float, float, float]:
    """One step of size ``h`` from ``y`` with ``k1 = f(y)``.

    Returns ``(y_new, error_estimate, f(y_new))``; the last value is the
    first stage of the next step (FSAL).
    """
    k = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(A[i], k))
        k.append(f(yi))
    y_new = y + h * sum(b * kj for b, kj in zip(B5, k))
    err = h * sum(e * kj for e, kj in zip(E, k))
    return y_new, err, k[6]
