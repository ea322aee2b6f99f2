"""Riccati equations z' = p2 z^2 + p1 z + p0 with ring-valued coefficients.

Two closed-form routes are offered, each checked by substitution:

* polynomial solutions from the integer rational part of sqrt(S),
  S = p1^2 - 2 p1' - 4 p0 (requires p2 = 1 and polynomial p0, p1);
* reduction to a linear equation through a constant particular solution
  c with p2 c^2 + p1 c + p0 = 0, solved by quadrature.

:func:`integrate_numeric` (RK4) is the independent oracle for both.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .exp_class import PolyFourierSum, PolyFourierTerm

COEFF_TOL = 1e-10
GRID_TOL = 1e-9
POLE_GUARD = 1e8
CHECK_GRID = np.linspace(-1.0, 1.0, 21)


class NoPolynomialSolution(ValueError):
    pass


class PoleEncountered(ArithmeticError):
    def __init__(self, x: float):
        self.x = x
        super().__init__(f"Riccati solution has a pole near x = {x:.6g}")


@dataclass(frozen=True)
class RiccatiProblem:
    p2: PolyFourierSum
    p1: PolyFourierSum
    p0: PolyFourierSum

    @classmethod
    def from_coeffs(cls, p2=(1.0,), p1=(0.0,), p0=(0.0,)) -> "RiccatiProblem":
        return cls(PolyFourierSum.from_poly(p2), PolyFourierSum.from_poly(p1), PolyFourierSum.from_poly(p0))

    def rhs(self, x, z):
        return self.p2.evaluate(x) * z * z + self.p1.evaluate(x) * z + self.p0.evaluate(x)

    def check_lemma_polynomial(self):
        one = self.p2 - 1.0
        if not one.is_zero(COEFF_TOL):
            raise ValueError("polynomial route requires p2 = 1")
        if not (self.p1.is_polynomial() and self.p0.is_polynomial()):
            raise ValueError("polynomial route requires polynomial p0 and p1")


@dataclass
class QuadratureReduction:
    """z = c + 1/u with u' = -(2 p2 c + p1) u - p2, tabulated on ``xs``.

    ``u(x) = exp(-P(x)) (u0 - Q(x))`` where ``P = int (2 p2 c + p1)`` and
    ``Q = int p2 exp(P)``, both from ``xs[0]``.
    """

    c: complex
    xs: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def u(self, u0: complex) -> np.ndarray:
        return np.exp(-self.P) * (u0 - self.Q)

    def z(self, z0: complex) -> np.ndarray:
        if z0 == self.c:
            return np.full(self.xs.shape, self.c, dtype=complex)
        u = self.u(1.0 / (z0 - self.c))
        small = np.abs(u) < 1.0 / POLE_GUARD
        if np.any(small):
            raise PoleEncountered(float(self.xs[np.argmax(small)]))
        return self.c + 1.0 / u

    description: str = "z = c + 1/u,  u' = -(2 p2 c + p1) u - p2"


@dataclass
class RiccatiSolution:
    kind: str
    z_plus: PolyFourierSum | None = None
    z_minus: PolyFourierSum | None = None
    constants: list = field(default_factory=list)
    residual: float = 0.0
    candidate_residuals: dict = field(default_factory=dict)
    rejected: list = field(default_factory=list)
    reduction: QuadratureReduction | None = None
    xs: np.ndarray | None = None
    zs: np.ndarray | None = None


def substitution_residual(prob: RiccatiProblem, z: PolyFourierSum) -> PolyFourierSum:
    """z' - (p2 z^2 + p1 z + p0) as a ring element."""
    return z.derivative() - (prob.p2 * z * z + prob.p1 * z + prob.p0)


def compute_S(prob: RiccatiProblem) -> PolyFourierSum:
    prob.check_lemma_polynomial()
    return prob.p1 * prob.p1 - prob.p1.derivative() * 2.0 - prob.p0 * 4.0


def _degree(coeffs: np.ndarray, tol: float) -> int:
    """Index of the highest coefficient above tol relative to the largest; -1 for zero."""
    top = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if top == 0:
        return -1
    nz = np.nonzero(np.abs(coeffs) > tol * max(1.0, top))[0]
    return int(nz[-1]) if nz.size else -1


def poly_sqrt_floor(S: PolyFourierSum, tol: float = 1e-12) -> PolyFourierSum:
    """Polynomial part of sqrt(S) in decreasing powers of x.

    Picks the principal root of the leading coefficient.  Raises
    :class:`NoPolynomialSolution` for odd degree.
    """
    a = S.poly_coeffs()
    deg = _degree(a, tol)
    if deg < 0:
        return PolyFourierSum()
    if deg % 2:
        raise NoPolynomialSolution(f"S has odd degree {deg}; no polynomial solution exists")
    m = deg // 2
    t = np.zeros(m + 1, dtype=complex)
    t[m] = cmath.sqrt(a[deg])
    for k in range(m - 1, -1, -1):
        # coefficient of x^(m+k) in T^2 fixes t_k
        acc = sum(t[i] * t[m + k - i] for i in range(k + 1, m))
        t[k] = (a[m + k] - acc) / (2 * t[m])
    return PolyFourierSum.from_poly(t)


def solve_polynomial(prob: RiccatiProblem) -> RiccatiSolution:
    T = poly_sqrt_floor(compute_S(prob))
    cands = {"plus": (prob.p1 + T) * -0.5, "minus": (prob.p1 - T) * -0.5}
    sol = RiccatiSolution(kind="numeric")
    kept_grid = []
    for name, z in cands.items():
        r = substitution_residual(prob, z)
        coeff_res = r.max_abs_coeff()
        grid_res = float(np.max(np.abs(r.evaluate(CHECK_GRID))))
        sol.candidate_residuals[name] = {"coefficient": coeff_res, "grid": grid_res}
        if coeff_res < COEFF_TOL and grid_res < GRID_TOL:
            setattr(sol, f"z_{name}", z)
            kept_grid.append(grid_res)
        else:
            sol.rejected.append(name)
    if kept_grid:
        sol.kind = "polynomial_pair"
        sol.residual = max(kept_grid)
    else:
        sol.residual = min(v["grid"] for v in sol.candidate_residuals.values())
    return sol


def _ring_keys(*sums: PolyFourierSum):
    keys = []
    for s in sums:
        for t in s.terms:
            if not any(k[0] == t.power and abs(k[1] - t.freq) <= 1e-12 for k in keys):
                keys.append((t.power, t.freq))
    return keys


def _coeff_at(s: PolyFourierSum, key) -> complex:
    return sum((t.coeff for t in s.terms if t.power == key[0] and abs(t.freq - key[1]) <= 1e-12), 0j)


def find_constant_solutions(prob: RiccatiProblem, tol: float = COEFF_TOL) -> list:
    """All constants c with p2 c^2 + p1 c + p0 identically zero in the ring."""
    keys = _ring_keys(prob.p2, prob.p1, prob.p0)
    eqs = [(_coeff_at(prob.p2, k), _coeff_at(prob.p1, k), _coeff_at(prob.p0, k)) for k in keys]
    nontrivial = [e for e in eqs if max(abs(v) for v in e) > tol]
    if not nontrivial:
        raise ValueError("all coefficients vanish; every constant solves the equation")
    # candidate roots from the first equation that actually constrains c
    cands: list[complex] = []
    for a, b, d in nontrivial:
        if abs(a) > tol:
            disc = cmath.sqrt(b * b - 4 * a * d)
            cands = [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]
            break
        if abs(b) > tol:
            cands = [-d / b]
            break
        return []  # 0 = d with d != 0
    out = []
    for c in cands:
        r = prob.p2 * (c * c) + prob.p1 * c + prob.p0
        if r.max_abs_coeff() < tol * max(1.0, abs(c) ** 2) and not any(abs(c - o) < 1e-12 for o in out):
            out.append(complex(c))
    return out


def solve_by_quadrature(prob: RiccatiProblem, c: complex, domain=(0.0, 1.0), nodes: int = 2001,
                        z0: complex | None = None) -> RiccatiSolution:
    """General solution through the constant particular solution ``c``.

    The trajectory returned in ``xs``/``zs`` starts from ``z0`` at
    ``domain[0]`` (default ``c + 1``).
    """
    r = prob.p2 * (c * c) + prob.p1 * c + prob.p0
    if r.max_abs_coeff() >= COEFF_TOL * max(1.0, abs(c) ** 2):
        raise ValueError(f"{c!r} is not a constant particular solution (residual {r.max_abs_coeff():.3g})")
    if nodes % 2 == 0:
        nodes += 1
    xs = np.linspace(domain[0], domain[1], nodes)
    rate = (prob.p2 * (2 * c) + prob.p1).evaluate(xs)
    p2 = prob.p2.evaluate(xs)
    P = _cumulative_simpson(rate, xs)
    Q = _cumulative_simpson(p2 * np.exp(P), xs)
    red = QuadratureReduction(complex(c), xs, P, Q)
    z_start = complex(c) + 1.0 if z0 is None else complex(z0)
    zs = red.z(z_start)
    return RiccatiSolution(kind="quadrature_general", constants=[complex(c)], reduction=red, xs=xs, zs=zs,
                           residual=0.0)


def _cumulative_simpson(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Running integral from x[0]: Simpson on even nodes, 3-point correction at odd nodes."""
    n = len(x)
    h = x[1] - x[0]
    out = np.zeros(n, dtype=complex)
    # pairs of panels
    pair = h / 3 * (y[0:-2:2] + 4 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pair)
    # odd nodes: previous even node plus a single-panel quadratic rule
    left = h / 12 * (5 * y[0:-2:2] + 8 * y[1:-1:2] - y[2::2])
    out[1:-1:2] = out[0:-2:2] + left
    if n % 2 == 0:
        out[-1] = out[-2] + h / 12 * (-y[-3] + 8 * y[-2] + 5 * y[-1])
    return out


def integrate_numeric(prob: RiccatiProblem, z0: complex, domain=(0.0, 1.0), step: float = 1e-4):
    """RK4 trajectory ``(xs, zs)`` from z(domain[0]) = z0.

    The coefficients are tabulated once on the half-step lattice, so the
    stepping loop is plain complex arithmetic.
    """
    x0, x1 = domain
    n = max(1, int(np.ceil(abs(x1 - x0) / step - 1e-9)))
    h = (x1 - x0) / n
    half = x0 + (h / 2) * np.arange(2 * n + 1)
    a = prob.p2.evaluate(half).astype(complex).tolist()
    b = prob.p1.evaluate(half).astype(complex).tolist()
    c = prob.p0.evaluate(half).astype(complex).tolist()
    xs = half[::2]
    zs = [complex(z0)]
    z = zs[0]
    for k in range(n):
        i = 2 * k
        k1 = (a[i] * z + b[i]) * z + c[i]
        y = z + h / 2 * k1
        k2 = (a[i + 1] * y + b[i + 1]) * y + c[i + 1]
        y = z + h / 2 * k2
        k3 = (a[i + 1] * y + b[i + 1]) * y + c[i + 1]
        y = z + h * k3
        k4 = (a[i + 2] * y + b[i + 2]) * y + c[i + 2]
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not abs(z) <= POLE_GUARD:
            raise PoleEncountered(float(xs[k + 1]))
        zs.append(z)
    return xs, np.array(zs)


def lemma_combination(prob: RiccatiProblem, omega1: complex, omega2: complex) -> PolyFourierSum:
    """omega1^2 p2 + omega1 omega2 p1 + omega2^2 p0."""
    return prob.p2 * (omega1 * omega1) + prob.p1 * (omega1 * omega2) + prob.p0 * (omega2 * omega2)


def quadrature_check(prob: RiccatiProblem, c: complex, z0: complex, domain=(0.0, 1.0), nodes: int = 2001,
                     step: float = 1e-4) -> float:
    """max |z_quadrature - z_RK4| on the quadrature nodes.

    The RK4 step is refined to an integer fraction of the node spacing so the
    two grids coincide.
    """
    sol = solve_by_quadrature(prob, c, domain, nodes, z0)
    h = sol.xs[1] - sol.xs[0]
    sub = max(1, int(np.ceil(h / step - 1e-9)))
    _, zs = integrate_numeric(prob, z0, domain, h / sub)
    return float(np.max(np.abs(sol.zs - zs[::sub])))


PROBE_OFFSETS = (0.5, -0.5, 0.5j, -0.5j, 0.1, -0.1)
PROBE_DOMAINS = ((0.0, 1.0), (-1.0, 0.0))


def pole_free_check(prob: RiccatiProblem, c: complex, offsets=PROBE_OFFSETS, domains=PROBE_DOMAINS,
                    nodes: int = 2001, step: float = 1e-4) -> dict:
    """Quadrature vs RK4 on the first (offset, interval) pair without a pole.

    Returns ``{"max_dev", "z0", "domain"}``; raises :class:`PoleEncountered`
    (last location) when every pair runs into a pole.
    """
    last = None
    for dom in domains:
        for off in offsets:
            z0 = complex(c) + off
            try:
                dev = quadrature_check(prob, c, z0, dom, nodes, step)
            except PoleEncountered as exc:
                last = exc
                continue
            return {"max_dev": dev, "z0": z0, "domain": list(dom)}
    raise last if last is not None else PoleEncountered(math.nan)


def poly_from_literal(values) -> PolyFourierSum:
    """Ascending coefficient list; entries are numbers, [re, im] pairs or complex strings."""
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"complex pair must have two entries: {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, str):
            out.append(complex(v.replace(" ", "").replace("i", "j")))
        elif isinstance(v, (int, float)):
            out.append(complex(v))
        else:
            raise ValueError(f"bad polynomial coefficient {v!r}")
    return PolyFourierSum([PolyFourierTerm(c, k) for k, c in enumerate(out)])
