"""Periodic part of the deformation function.

The deformation ``beta(x) = x + b(x)`` solves ``beta(x + i s) = beta(x) + i s``
whenever ``b`` has period ``i s``.  We use the truncated mode expansion

    b(x) = sum_n c_n exp(2 n pi x / s),

which on the circle ``x = (i s / 2 pi) t`` is the ordinary Fourier series
``sum_n c_n exp(i n t)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .exp_class import PolyFourierSum, PolyFourierTerm

MAX_MODE = 32
MIN_NODES = 256


@dataclass(frozen=True)
class PeriodicDeformation:
    s: float
    coeffs: tuple = field(default=())

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("deformation scale s must be positive")
        items = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        merged: dict[int, complex] = {}
        for n, c in items:
            if int(n) != n:
                raise ValueError(f"mode index {n!r} is not an integer")
            merged[int(n)] = merged.get(int(n), 0j) + complex(c)
        bad = [n for n in merged if abs(n) > MAX_MODE]
        if bad:
            raise ValueError(f"mode indices {bad} exceed |n| <= {MAX_MODE}")
        object.__setattr__(self, "coeffs", tuple(sorted((n, c) for n, c in merged.items() if c != 0)))

    @property
    def is_trivial(self) -> bool:
        return not self.coeffs

    def rate(self, n: int) -> float:
        """Exponent rate of mode n on the x-line."""
        return 2 * n * math.pi / self.s

    def with_scale(self, s: float) -> "PeriodicDeformation":
        """Same Fourier coefficients, period i*s."""
        return PeriodicDeformation(s, self.coeffs)

    def b(self) -> PolyFourierSum:
        return PolyFourierSum([PolyFourierTerm(c, 0, self.rate(n)) for n, c in self.coeffs])

    def beta(self) -> PolyFourierSum:
        return PolyFourierSum.x() + self.b()

    def b_of_t(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for n, c in self.coeffs:
            out = out + c * np.exp(1j * n * t)
        return out

    def window_log_magnitude(self, points) -> float:
        """log of max |c_n exp(rate_n x)| over the given points."""
        pts = np.asarray(points, dtype=complex)
        worst = -math.inf
        for n, c in self.coeffs:
            worst = max(worst, math.log(abs(c)) + float(np.max(self.rate(n) * pts.real)))
        return worst

    def to_json(self) -> dict:
        return {"s": self.s, "coeffs": [{"n": n, "re": c.real, "im": c.imag} for n, c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict, s: float | None = None) -> "PeriodicDeformation":
        if "coeffs" not in data or not isinstance(data["coeffs"], list):
            raise ValueError("deformation JSON needs a 'coeffs' list")
        scale = s if s is not None else data.get("s")
        if scale is None:
            raise ValueError("deformation JSON needs 's'")
        items = []
        for entry in data["coeffs"]:
            try:
                items.append((int(entry["n"]), complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"bad coefficient entry {entry!r}") from exc
        return cls(float(scale), tuple(items))

    @classmethod
    def load(cls, path: str | Path, s: float | None = None) -> "PeriodicDeformation":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), s=s)

    @classmethod
    def random(cls, rng: np.random.Generator, s: float, n_max: int = 4, n_modes: int = 3,
               amp: float = 0.5) -> "PeriodicDeformation":
        idx = rng.choice(np.arange(-n_max, n_max + 1), size=n_modes, replace=False)
        coeffs = [(int(n), complex(*(amp * rng.uniform(-1, 1, 2)))) for n in idx]
        return cls(s, tuple(coeffs))


def build_beta(d: PeriodicDeformation) -> PolyFourierSum:
    return d.beta()


def circle_points(s: float, t) -> np.ndarray:
    """Map t on the circle to x = (i s / 2 pi) t."""
    return 1j * s / (2 * math.pi) * np.asarray(t, dtype=float)


def difference_residual(d: PeriodicDeformation, points) -> float:
    """max |beta(x + i s) - beta(x) - i s| over the points."""
    beta = d.beta()
    pts = np.asarray(points, dtype=complex)
    r = beta.evaluate(pts + 1j * d.s) - beta.evaluate(pts) - 1j * d.s
    return float(np.max(np.abs(r)))


def fourier_coefficient(b: Callable, n: int, nodes: int = MIN_NODES) -> complex:
    """Coefficient c_n of a 2 pi-periodic function by the uniform trapezoid rule.

    Exact (to rounding) for trigonometric polynomials of degree < nodes / 2.
    """
    if nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes")
    t = -math.pi + 2 * math.pi * np.arange(nodes) / nodes
    vals = np.asarray(b(t), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample of periodic function")
    return complex(np.mean(vals * np.exp(-1j * n * t)))


def recover_coefficients(d: PeriodicDeformation, n_max: int = MAX_MODE, nodes: int = MIN_NODES) -> dict:
    """Sample b on the circle and extract c_n for |n| <= n_max."""
    b = d.b()
    sampler = lambda t: b.evaluate(circle_points(d.s, t))  # noqa: E731
    return {n: fourier_coefficient(sampler, n, nodes) for n in range(-n_max, n_max + 1)}
