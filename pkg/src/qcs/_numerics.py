"""Small numerical helpers shared by the modules: grids, RK4, Simpson."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Fixed check grid.

    ``kind="x"`` samples the real x-line on ``window``; ``kind="t"`` samples
    the circle variable t on ``window`` and maps it to x = (i s / 2 pi) t.
    """

    kind: str = "x"
    window: tuple[float, float] = (-3.0, 3.0)
    n: int = 21

    def __post_init__(self):
        if self.kind not in ("x", "t"):
            raise ValueError("grid kind must be 'x' or 't'")
        if not self.window[0] < self.window[1]:
            raise ValueError("window must be increasing")

    @classmethod
    def circle(cls, n: int = 21) -> "Grid":
        return cls("t", (-math.pi, math.pi), n)

    def points(self, s: float | None = None) -> np.ndarray:
        u = np.linspace(self.window[0], self.window[1], self.n)
        if self.kind == "x":
            return u.astype(complex)
        if s is None:
            raise ValueError("circle grid needs s")
        return 1j * s / (2 * math.pi) * u


def grid_norm(f, points) -> float:
    return float(np.max(np.abs(f.evaluate(points))))


def rk4(rhs, x0: float, y0: complex, x1: float, step: float, guard: float | None = None):
    """Classical RK4 for ``y' = rhs(x, y)`` from x0 to x1 (either direction).

    Returns ``(xs, ys)``.  When ``guard`` is given, ``|y| > guard`` raises
    :class:`BlowUp` carrying the location.
    """
    n = max(1, int(math.ceil(abs(x1 - x0) / step - 1e-9)))
    h = (x1 - x0) / n
    xs = x0 + h * np.arange(n + 1)
    ys = np.empty(n + 1, dtype=complex)
    y = complex(y0)
    ys[0] = y
    for k in range(n):
        x = xs[k]
        k1 = rhs(x, y)
        k2 = rhs(x + h / 2, y + h / 2 * k1)
        k3 = rhs(x + h / 2, y + h / 2 * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if guard is not None and (not np.isfinite(y) or abs(y) > guard):
            raise BlowUp(float(xs[k + 1]))
        ys[k + 1] = y
    return xs, ys


class BlowUp(ArithmeticError):
    def __init__(self, x: float):
        self.x = x
        super().__init__(f"solution blew up near x = {x:.6g}")


def simpson(y, x) -> complex:
    """Composite Simpson on an odd number of uniform nodes."""
    y = np.asarray(y)
    n = len(y)
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd number (>= 3) of nodes")
    h = (x[-1] - x[0]) / (n - 1)
    return complex(h / 3 * (y[0] + y[-1] + 4 * np.sum(y[1:-1:2]) + 2 * np.sum(y[2:-1:2])))
