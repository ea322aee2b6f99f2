"""q-boson ladder operators on exponential-class functions.

Exact operators (beta(x) = x + b(x), shift by i s):

    B  f = alpha    (e^{-2 i s beta} f - e^{-i s beta} f(x + i s))
    B+ f = alphabar (e^{ 2 i s beta} f - [e^{i s beta} f](x + i s))

The multiplications by ``exp(+-i s b(x))`` are exact in the class, since
``b`` is a sum of pure exponentials and sits in the exponent modes; a
truncated-series alternative is available with ``phase="series"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import Grid, grid_norm
from .exp_class import ExpClassSum, ExpLike, PolyFourierSum, PolyFourierTerm
from .fourier_periodic import PeriodicDeformation

SQRT2 = math.sqrt(2.0)

SINGULAR_DELTAS = (1.0, -3.0)
DEGENERATE_DELTAS = (-1.0, 3.0)


class SingularParameterError(ValueError):
    pass


class TruncationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CSParameters:
    """Deformation scale s, ansatz exponent delta and quadrature ratio omega."""

    s: float
    delta: complex = -2.0
    omega: float = 0.0
    alpha_phase: float = 0.0

    def __post_init__(self):
        if not (self.s > 0 and math.isfinite(self.s)):
            raise SingularParameterError(f"s must be positive and finite, got {self.s!r}")
        if not math.isfinite(self.omega):
            raise SingularParameterError("omega must be finite")
        for d in SINGULAR_DELTAS:
            if abs(complex(self.delta) - d) < 1e-12:
                raise SingularParameterError(
                    f"delta = {d:g} is singular: the eigenvalue lambda_s has a pole at delta in {{1, -3}}"
                )

    @property
    def q(self) -> float:
        return math.exp(-self.s ** 2)

    @property
    def alpha_sq(self) -> float:
        # 1/(1 - q^2) without cancellation for small s
        return 1.0 / -math.expm1(-2 * self.s ** 2)

    @property
    def alpha(self) -> complex:
        return math.sqrt(self.alpha_sq) * complex(math.cos(self.alpha_phase), math.sin(self.alpha_phase))

    @property
    def degenerate(self) -> bool:
        """beta^2 coefficient (delta+1)(delta-3) of the Riccati source vanishes."""
        return any(abs(complex(self.delta) - d) < 1e-12 for d in DEGENERATE_DELTAS)

    def replace(self, **kw) -> "CSParameters":
        data = dict(s=self.s, delta=self.delta, omega=self.omega, alpha_phase=self.alpha_phase)
        data.update(kw)
        return CSParameters(**data)

    def to_json(self) -> dict:
        d = complex(self.delta)
        return {"s": self.s, "q": self.q, "alpha_sq": self.alpha_sq,
                "delta": {"re": d.real, "im": d.imag}, "omega": self.omega, "alpha_phase": self.alpha_phase}


KINDS = ("annihilation", "creation", "weak_annihilation", "eigen_L")


@dataclass(frozen=True)
class LadderOperator:
    """Immutable operator descriptor.

    weak_form: ``"derived"`` uses f'' coefficient s/(2 sqrt 2), the second-order
    truncation of the exact operator, which makes ``eigen_L`` exactly
    ``(2 sqrt 2 / s)`` times the weak operator.  ``"printed"`` uses s/sqrt 2.
    phase: ``"exact"`` keeps exp(i s b) in the exponent modes; ``"series"``
    expands it to order ``order`` in the prefactor.
    """

    kind: str
    params: CSParameters
    beta: PeriodicDeformation | None = None
    weak_form: str = "derived"
    phase: str = "exact"
    order: int = 6
    tolerance: float | None = None
    grid: Grid = field(default_factory=Grid)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.weak_form not in ("derived", "printed"):
            raise ValueError("weak_form must be 'derived' or 'printed'")
        if self.phase not in ("exact", "series"):
            raise ValueError("phase must be 'exact' or 'series'")
        if self.beta is not None and abs(self.beta.s - self.params.s) > 1e-14:
            raise ValueError("deformation period does not match params.s")

    @property
    def s(self) -> float:
        return self.params.s

    def b_poly(self) -> PolyFourierSum:
        return PolyFourierSum() if self.beta is None else self.beta.b()

    def beta_poly(self) -> PolyFourierSum:
        return PolyFourierSum.x() + self.b_poly()

    def check_points(self):
        return self.grid.points(self.s)

    def __call__(self, f: ExpLike) -> ExpClassSum:
        return _DISPATCH[self.kind](self, f)


def truncation_bound(op: LadderOperator, points=None) -> float:
    """Remainder bound max|2 s b|^{K+1}/(K+1)! of the series phase expansion."""
    if op.beta is None or op.beta.is_trivial:
        return 0.0
    pts = op.check_points() if points is None else points
    m = float(np.max(np.abs(2 * op.s * op.b_poly().evaluate(pts))))
    return m ** (op.order + 1) / math.factorial(op.order + 1)


def _mul_phase(op: LadderOperator, f: ExpClassSum, k: float) -> ExpClassSum:
    """Multiply by exp(i k s beta(x))."""
    f = f.map(lambda blk: blk.mul_exp(lin=1j * k * op.s))
    if op.beta is None or op.beta.is_trivial:
        return f
    if op.phase == "exact":
        modes = tuple((op.beta.rate(n), 1j * k * op.s * c) for n, c in op.beta.coeffs)
        return f.map(lambda blk: blk.mul_exp(modes=modes))
    if op.tolerance is not None and truncation_bound(op) > op.tolerance:
        raise TruncationError(
            f"phase series remainder {truncation_bound(op):.3g} exceeds tolerance {op.tolerance:.3g}"
        )
    arg = op.b_poly() * (1j * k * op.s)
    series = PolyFourierSum.constant(1.0)
    term = PolyFourierSum.constant(1.0)
    for j in range(1, op.order + 1):
        term = term * arg / j
        series = series + term
    return f * series


def apply_annihilation(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    f = ExpClassSum.of(f)
    first = _mul_phase(op, f, -2.0)
    second = _mul_phase(op, f.map(lambda blk: blk.shift(1j * op.s)), -1.0)
    return (first - second) * op.params.alpha


def apply_creation(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    f = ExpClassSum.of(f)
    first = _mul_phase(op, f, 2.0)
    # multiply first, then shift
    second = _mul_phase(op, f, 1.0).map(lambda blk: blk.shift(1j * op.s))
    return (first - second) * op.params.alpha.conjugate()


def apply_creation_reversed(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    """Creation with the shift applied before the multiplication (wrong ordering)."""
    f = ExpClassSum.of(f)
    first = _mul_phase(op, f, 2.0)
    second = _mul_phase(op, f.map(lambda blk: blk.shift(1j * op.s)), 1.0)
    return (first - second) * op.params.alpha.conjugate()


def apply_q_mutator(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    """B B+ f - q^2 B+ B f."""
    ann = op if op.kind == "annihilation" else _with_kind(op, "annihilation")
    q2 = op.params.q ** 2
    return apply_annihilation(ann, apply_creation(ann, f)) - apply_creation(ann, apply_annihilation(ann, f)) * q2


def _with_kind(op: LadderOperator, kind: str) -> LadderOperator:
    return LadderOperator(kind, op.params, op.beta, op.weak_form, op.phase, op.order, op.tolerance, op.grid)


def _second_order(op: LadderOperator, f: ExpLike, c2: complex, c1: complex, c0: complex) -> ExpClassSum:
    """c2 f'' + c1 (1 - i s beta) f' + c0 (beta - (3 i s / 2) beta^2) f."""
    f = ExpClassSum.of(f)
    s = op.s
    beta = op.beta_poly()
    d1 = f.map(lambda blk: blk.differentiate())
    d2 = d1.map(lambda blk: blk.differentiate())
    g1 = (PolyFourierSum.constant(1.0) - beta * (1j * s)) * c1
    g0 = (beta - beta * beta * (1.5j * s)) * c0
    return d2 * c2 + d1 * g1 + f * g0


def apply_weak(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    s = op.s
    c2 = s / (2 * SQRT2) if op.weak_form == "derived" else s / SQRT2
    return _second_order(op, f, c2, -1j / SQRT2, -1j / SQRT2)


def apply_eigen_L(op: LadderOperator, f: ExpLike) -> ExpClassSum:
    s = op.s
    return _second_order(op, f, 1.0, -2j / s, -2j / s)


_DISPATCH = {
    "annihilation": apply_annihilation,
    "creation": apply_creation,
    "weak_annihilation": apply_weak,
    "eigen_L": apply_eigen_L,
}


def q_mutator_residual(op: LadderOperator, f: ExpLike, points=None) -> float:
    """Grid max-abs of ([B, B+]_q f - f)."""
    pts = op.check_points() if points is None else points
    return grid_norm(apply_q_mutator(op, f) - ExpClassSum.of(f), pts)


def weak_consistency_errors(f: ExpLike, s_values, weak_form: str = "derived", grid: Grid | None = None):
    """Grid norms of (weak - exact) annihilation with beta(x) = x, one per s."""
    grid = grid or Grid()
    out = []
    for s in s_values:
        p = CSParameters(s)
        exact = LadderOperator("annihilation", p, grid=grid)
        weak = LadderOperator("weak_annihilation", p, weak_form=weak_form, grid=grid)
        out.append(grid_norm(apply_weak(weak, f) - apply_annihilation(exact, f), grid.points(s)))
    return np.array(out)


def fitted_order(s_values, errors) -> float:
    """Least-squares slope of log(error) against log(s)."""
    slope, _ = np.polyfit(np.log(np.asarray(s_values, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)


def algebra_report(s: float, beta: PeriodicDeformation | None, samples: int, seed: int,
                   window: tuple[float, float] | None = None) -> dict:
    """q-mutator residuals for random class members; drives the algebra-check command."""
    from .exp_class import random_function

    rng = np.random.default_rng(seed)
    params = CSParameters(s)
    if beta is None or beta.is_trivial:
        grid = Grid("x", window or (-3.0, 3.0))
    else:
        grid = Grid("t", window or (-math.pi, math.pi))
    op = LadderOperator("annihilation", params, beta, grid=grid)
    per = []
    for k in range(samples):
        f = random_function(rng)
        per.append({"index": k, "residual": q_mutator_residual(op, f),
                    "scale": grid_norm(f, grid.points(s)), "blocks": len(apply_q_mutator(op, f))})
    res = np.array([p["residual"] for p in per]) if per else np.zeros(1)
    return {
        "max_residual": float(np.max(res)),
        "mean_residual": float(np.mean(res)),
        "truncation_bound": truncation_bound(LadderOperator("annihilation", params, beta, phase="series", grid=grid)),
        "grid": {"kind": grid.kind, "window": list(grid.window), "n": grid.n},
        "per_function": per,
    }
