"""First-order expansion in s of the minus-branch state.

With ``a = i sqrt2 lambda0`` the order-0 equation is
``L0' + (beta - a) L0 = 0`` and the order-1 equation

    L1' + (beta - a) L1 = -(i/2) L0'' + i beta L0' + i (sqrt2 lambda1 + 3/2 beta^2) L0.

Closed forms: ``L0 = exp(a x - x^2/2 - int b)`` and ``L1 = i * bracket * L0`` with
``bracket = kappa x + b/2 + a x^2 + 2 a int b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._numerics import Grid, grid_norm, rk4
from .cs_builder import coherent_state, spectral_data
from .exp_class import ExpClassFunction, ExpClassSum, PolyFourierSum
from .fourier_periodic import PeriodicDeformation
from .operator_algebra import SQRT2, CSParameters


def _b(beta: PeriodicDeformation | None) -> PolyFourierSum:
    return PolyFourierSum() if beta is None or beta.is_trivial else beta.b()


def _a(params: CSParameters) -> complex:
    return 1j * SQRT2 * spectral_data(params).lambda0


@dataclass
class PerturbativeState:
    order0: ExpClassFunction
    order1: ExpClassSum
    lambda0: complex
    lambda1: complex
    kappa: complex
    residual0: float
    residual1: float

    def truncated(self, s: float) -> ExpClassSum:
        return ExpClassSum.of(self.order0) + self.order1 * s


def solve_order0(params: CSParameters, beta: PeriodicDeformation | None = None) -> ExpClassFunction:
    exponent = PolyFourierSum.monomial(_a(params), 1) + PolyFourierSum.monomial(-0.5, 2) - _b(beta).antiderivative()
    return ExpClassFunction.exp_of(exponent)


def order1_bracket(params: CSParameters, beta: PeriodicDeformation | None = None) -> PolyFourierSum:
    sp = spectral_data(params)
    a = _a(params)
    b = _b(beta)
    return (PolyFourierSum.monomial(sp.kappa, 1) + b * 0.5 + PolyFourierSum.monomial(a, 2)
            + b.antiderivative() * (2 * a))


def solve_order1(params: CSParameters, beta: PeriodicDeformation | None = None,
                 order0: ExpClassFunction | None = None) -> ExpClassSum:
    if order0 is None:
        order0 = solve_order0(params, beta)
    return ExpClassSum.of(order0.mul_poly(order1_bracket(params, beta) * 1j))


def _beta(beta) -> PolyFourierSum:
    return PolyFourierSum.x() + _b(beta)


def order0_residual(params, beta, order0, points) -> float:
    shift = _beta(beta) - _a(params)
    res = ExpClassSum.of(order0.differentiate()) + ExpClassSum.of(order0) * shift
    return grid_norm(res, points)


def order1_source(params: CSParameters, beta, order0: ExpClassFunction) -> ExpClassSum:
    lam1 = spectral_data(params).lambda1
    B = _beta(beta)
    d1 = order0.differentiate()
    d2 = d1.differentiate()
    return (ExpClassSum.of(d2) * (-0.5j) + ExpClassSum.of(d1) * (B * 1j)
            + ExpClassSum.of(order0) * ((B * B * 1.5 + SQRT2 * lam1) * 1j))


def order1_residual(params, beta, order0, order1, points) -> float:
    shift = _beta(beta) - _a(params)
    lhs = order1.map(lambda blk: blk.differentiate()) + order1 * shift
    return grid_norm(lhs - order1_source(params, beta, order0), points)


def expand(params: CSParameters, beta: PeriodicDeformation | None = None, grid: Grid | None = None) -> PerturbativeState:
    grid = grid or (Grid() if beta is None or beta.is_trivial else Grid.circle())
    pts = grid.points(params.s)
    sp = spectral_data(params)
    L0 = solve_order0(params, beta)
    L1 = solve_order1(params, beta, L0)
    return PerturbativeState(L0, L1, sp.lambda0, sp.lambda1, sp.kappa,
                             order0_residual(params, beta, L0, pts), order1_residual(params, beta, L0, L1, pts))


def numeric_order1(params: CSParameters, beta: PeriodicDeformation | None = None, window=(-2.0, 2.0),
                   step: float = 1e-3, n_check: int = 41):
    """Integrate the order-1 equation from x = 0 with the closed-form value there.

    Returns ``(xs, numeric, closed)`` on ``n_check`` points of ``window``.
    """
    L0 = solve_order0(params, beta)
    L1 = solve_order1(params, beta, L0)
    src = order1_source(params, beta, L0)
    shift = _beta(beta) - _a(params)

    def rhs(x, y):
        return complex(src.evaluate(x)) - complex(shift.evaluate(x)) * y

    y0 = complex(L1.evaluate(0.0))
    xs = np.linspace(window[0], window[1], n_check)
    out = np.empty(n_check, dtype=complex)
    # march outward from 0 in each direction; check points must lie on the step lattice
    for side in (window[0], window[1]):
        grid_x, ys = rk4(rhs, 0.0, y0, side, step)
        mask = (xs <= 0) if side < 0 else (xs >= 0)
        for i in np.nonzero(mask)[0]:
            j = int(round((xs[i] - 0.0) / (grid_x[1] - grid_x[0])))
            out[i] = ys[j]
    return xs, out, L1.evaluate(xs)


@dataclass
class ConvergenceReport:
    s_values: list
    errors: list
    slope: float
    interval: tuple
    flagged: bool

    def to_json(self) -> dict:
        return {"s_values": self.s_values, "errors_by_s": self.errors, "fitted_order": self.slope,
                "fitted_order_95": list(self.interval), "flagged": self.flagged}


def convergence_study(s_values, delta: float = -2.0, omega: float = 1.0, beta: PeriodicDeformation | None = None,
                      grid: Grid | None = None, expected=(1.8, 2.2)) -> ConvergenceReport:
    """Fit log e(s) against log s for e(s) = |Lambda_full(s) - (L0 + s L1)|_grid.

    Both sides are normalized to 1 at x = 0.  A nontrivial ``beta`` keeps its
    Fourier coefficients and is re-scaled to each s.
    """
    s_values = [float(s) for s in s_values]
    if len(s_values) < 3:
        raise ValueError("convergence study needs at least three s values")
    grid = grid or Grid("x", (-2.0, 2.0))
    errors = []
    for s in s_values:
        b = None if beta is None or beta.is_trivial else beta.with_scale(s)
        p = CSParameters(s, delta, omega)
        pts = grid.points(s)
        full = coherent_state(p, b, "minus")
        st = expand(p, b, grid)
        approx = st.truncated(s)
        a0 = complex(approx.evaluate(0.0))
        if a0 == 0:
            raise ValueError("perturbative state vanishes at x = 0")
        diff = full.evaluate(pts) / complex(full.evaluate(0.0)) - approx.evaluate(pts) / a0
        errors.append(float(np.max(np.abs(diff))))
    errs = np.array(errors)
    if np.any(errs <= 0) or not np.all(np.isfinite(errs)):
        raise ValueError(f"degenerate error norms {errors}")
    fit = stats.linregress(np.log(s_values), np.log(errs))
    if len(s_values) > 2:
        half = stats.t.ppf(0.975, len(s_values) - 2) * fit.stderr
    else:
        half = math.inf
    slope = float(fit.slope)
    return ConvergenceReport(s_values, errors, slope, (slope - half, slope + half),
                             not (expected[0] <= slope <= expected[1]))
