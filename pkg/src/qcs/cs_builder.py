"""Construction and audit of the weak q-deformed coherent states.

Pipeline: Riccati coefficients of the reduced eigen-equation, the polynomial
S in its three shapes (direct, quadratic in beta after eliminating beta',
perfect square), the eigenvalue that kills the discriminant, the branch
solutions z, xi, Lambda and the reduced state at delta = -2.

Several printed closed forms disagree with a direct derivation; every such
formula takes ``form="derived"`` (default) or ``form="printed"`` so that the
two can be audited side by side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import Grid, grid_norm
from .exp_class import ExpClassFunction, PolyFourierSum
from .fourier_periodic import PeriodicDeformation
from .operator_algebra import SQRT2, CSParameters, LadderOperator, SingularParameterError, apply_eigen_L
from .riccati import RiccatiProblem, compute_S, find_constant_solutions, solve_polynomial, substitution_residual

FORMS = ("derived", "printed")


def _check_form(form: str):
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")


def _delta(params: CSParameters) -> complex:
    return complex(params.delta)


def _b(params: CSParameters, beta: PeriodicDeformation | None) -> PolyFourierSum:
    if beta is None or beta.is_trivial:
        return PolyFourierSum()
    if abs(beta.s - params.s) > 1e-14:
        raise ValueError("deformation period does not match params.s")
    return beta.b()


def _beta(params, beta) -> PolyFourierSum:
    return PolyFourierSum.x() + _b(params, beta)


@dataclass(frozen=True)
class SpectralData:
    lambda_s: complex
    gamma_plus: complex
    gamma_minus: complex
    gamma_re: float
    lambda0: complex
    lambda1: complex
    kappa: complex

    def to_json(self) -> dict:
        cj = lambda z: {"re": complex(z).real, "im": complex(z).imag}  # noqa: E731
        return {"lambda_s": cj(self.lambda_s), "gamma_plus": cj(self.gamma_plus),
                "gamma_minus": cj(self.gamma_minus), "gamma_re": self.gamma_re,
                "lambda0": cj(self.lambda0), "lambda1": cj(self.lambda1), "kappa": cj(self.kappa)}


def eigenvalue(params: CSParameters) -> complex:
    """lambda_s = (delta - 1 - 2 i s Omega)^2 / (2 sqrt2 s (delta - 1)(delta + 3))."""
    d, s, w = _delta(params), params.s, params.omega
    return (d - 1 - 2j * s * w) ** 2 / (2 * SQRT2 * s * (d - 1) * (d + 3))


def gamma(params: CSParameters, branch: str) -> complex:
    sign = {"plus": 1.0, "minus": -1.0}[branch]
    d, s, w = _delta(params), params.s, params.omega
    return 1 + sign * (2 + 1j * w * s) / (2 * (d + 3))


def spectral_data(params: CSParameters, gamma_branch: str = "minus") -> SpectralData:
    d, w = _delta(params), params.omega
    lam0 = -1j * w / (SQRT2 * (d + 3))
    lam1 = -SQRT2 * w ** 2 / ((d - 1) * (d + 3))
    gp, gm = gamma(params, "plus"), gamma(params, "minus")
    g = gm if gamma_branch == "minus" else gp
    return SpectralData(
        lambda_s=eigenvalue(params), gamma_plus=gp, gamma_minus=gm,
        gamma_re=float(((g + g.conjugate()) / 2).real),
        lambda0=lam0, lambda1=lam1, kappa=lam0 ** 2 + SQRT2 * lam1 + 0.5,
    )


def _lam(params, lam):
    return eigenvalue(params) if lam is None else complex(lam)


def build_coefficients(params: CSParameters, beta: PeriodicDeformation | None = None,
                       lam: complex | None = None) -> RiccatiProblem:
    """p2 = 1, p1 = -2 (delta - 1) beta, p0 = source term of the reduced equation."""
    d, s = _delta(params), params.s
    lam = _lam(params, lam)
    B = _beta(params, beta)
    p1 = B * (-2 * (d - 1))
    p0 = ((1 - 2 * SQRT2 * s * lam) / s ** 2 + B * (-4j / s) + B * B * ((d + 1) * (d - 3))
          + B.derivative() * d)
    return RiccatiProblem(PolyFourierSum.constant(1.0), p1, p0)


def compute_S_form43(params: CSParameters, beta: PeriodicDeformation | None = None,
                     lam: complex | None = None) -> PolyFourierSum:
    s = params.s
    lam = _lam(params, lam)
    B = _beta(params, beta)
    return B * B * 16 + B * (16j / s) - (4 / s ** 2) * (1 - 2 * SQRT2 * s * lam) - B.derivative() * 4


def quadrature_constraint_residual(params: CSParameters, beta: PeriodicDeformation | None = None,
                                   lam: complex | None = None, form: str = "derived") -> PolyFourierSum:
    """Constant-solution condition Omega^2 + Omega p1 + p0 as a ring element.

    ``printed`` flips the sign of the constant term, as in the source text.
    """
    _check_form(form)
    d, s, w = _delta(params), params.s, params.omega
    lam = _lam(params, lam)
    B = _beta(params, beta)
    const = (1 - 2 * SQRT2 * s * lam + w ** 2 * s ** 2) / s ** 2
    if form == "printed":
        const = -const
    return B.derivative() * d + B * B * ((d + 1) * (d - 3)) - B * ((2 / s) * (2j + (d - 1) * w * s)) + const


def form45_coefficients(params: CSParameters, lam: complex | None = None, form: str = "derived"):
    """(A, B, C) with S = A beta^2 + B beta + C once beta' is eliminated."""
    _check_form(form)
    d, s, w = _delta(params), params.s, params.omega
    if abs(d) < 1e-14:
        raise SingularParameterError("delta = 0: beta' cannot be eliminated")
    lam = _lam(params, lam)
    B = 8 * (d - 1) / (s * d) * (2j - w * s)
    inner = w ** 2 * s ** 2 + 2 * SQRT2 * (d - 1) * s * lam - (d - 1)
    if form == "derived":
        A = 4 * (d - 1) * (d + 3) / d
        C = 4 / (s ** 2 * d) * inner
    else:
        A = 4 / s * (d - 1) * (d + 3)
        C = -4 / (s ** 2 * d) * inner
    return A, B, C


def compute_S_form45(params: CSParameters, beta: PeriodicDeformation | None = None,
                     lam: complex | None = None, form: str = "derived") -> PolyFourierSum:
    A, Bc, C = form45_coefficients(params, lam, form)
    B = _beta(params, beta)
    return B * B * A + B * Bc + C


def square_root_form(params: CSParameters, beta: PeriodicDeformation | None = None) -> PolyFourierSum:
    """Linear form beta + (2i - Omega s) / (s (delta + 3)) whose square gives S."""
    d, s, w = _delta(params), params.s, params.omega
    return _beta(params, beta) + (2j - w * s) / (s * (d + 3))


def compute_S_form48(params: CSParameters, beta: PeriodicDeformation | None = None,
                     leading: str = "derived") -> PolyFourierSum:
    """Perfect square of :func:`square_root_form`.

    ``leading="derived"`` keeps the factor A = 4(delta-1)(delta+3)/delta of the
    quadratic; ``"printed"`` drops it (unit leading coefficient).
    """
    L = square_root_form(params, beta)
    A = form45_coefficients(params, form="derived")[0] if leading == "derived" else 1.0
    return L * L * A


def discriminant_residual(params: CSParameters, lam: complex | None = None, form: str = "derived") -> complex:
    """Closed-form discriminant of the quadratic-in-beta S.

    derived: 64(d-1)/(s^2 d^2) [(d-1)^2 - 2(d-1)(2 i W + sqrt2 (d+3) lam) s - 4 W^2 s^2]
    printed: same with +4 W^2 s^2.
    """
    _check_form(form)
    d, s, w = _delta(params), params.s, params.omega
    lam = _lam(params, lam)
    sign = -1.0 if form == "derived" else 1.0
    bracket = (d - 1) ** 2 - 2 * (d - 1) * (2j * w + SQRT2 * (d + 3) * lam) * s + sign * 4 * w ** 2 * s ** 2
    return 64 * (d - 1) / (s ** 2 * d ** 2) * bracket


def discriminant_from_coefficients(params: CSParameters, lam: complex | None = None, form: str = "derived") -> complex:
    A, B, C = form45_coefficients(params, lam, form)
    return B * B - 4 * A * C


def z_branches(params: CSParameters, beta: PeriodicDeformation | None = None) -> dict:
    d, s, w = _delta(params), params.s, params.omega
    shift = (2j - w * s) / (2 * s * (d + 3))
    B = _beta(params, beta)
    return {
        "plus": B * (d - 1 - 0.5) - shift,
        "minus": B * (d - 1 + 0.5) + shift,
    }


def coherent_state(params: CSParameters, beta: PeriodicDeformation | None = None,
                   branch: str = "minus") -> ExpClassFunction:
    """exp((i/s) gamma x + (1 +- 1/2) int beta), equal to 1 at x = 0."""
    sign = {"plus": 1.0, "minus": -1.0}[branch]
    g = gamma(params, branch)
    exponent = PolyFourierSum.monomial(1j * g / params.s, 1) + _beta(params, beta).antiderivative() * (1 + sign * 0.5)
    return ExpClassFunction.exp_of(exponent)


def reduced_state(omega: float, beta: PeriodicDeformation | None = None) -> ExpClassFunction:
    """exp(Omega x / 2 + x^2 / 4 + (1/2) int b)."""
    b = PolyFourierSum() if beta is None or beta.is_trivial else beta.b()
    exponent = PolyFourierSum.monomial(omega / 2, 1) + PolyFourierSum.monomial(0.25, 2) + b.antiderivative() * 0.5
    return ExpClassFunction.exp_of(exponent)


@dataclass
class CSConstruction:
    params: CSParameters
    beta: PeriodicDeformation | None
    spectral: SpectralData
    problem: RiccatiProblem
    z_plus: PolyFourierSum
    z_minus: PolyFourierSum
    xi_plus: ExpClassFunction
    xi_minus: ExpClassFunction
    lambda_plus: ExpClassFunction
    lambda_minus: ExpClassFunction
    grid: Grid
    audit: dict = field(default_factory=dict)

    def state(self, branch: str = "minus") -> ExpClassFunction:
        return self.lambda_minus if branch == "minus" else self.lambda_plus


def _cj(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def build_states(params: CSParameters, beta: PeriodicDeformation | None = None,
                 grid: Grid | None = None) -> CSConstruction:
    d = _delta(params)
    if abs(d) < 1e-14:
        raise SingularParameterError("delta = 0 is excluded: the quadratic form of S divides by delta")
    trivial = beta is None or beta.is_trivial
    grid = grid or (Grid() if trivial else Grid.circle())
    sp = spectral_data(params)
    lam = sp.lambda_s
    prob = build_coefficients(params, beta, lam)
    zs = z_branches(params, beta)
    B = _beta(params, beta)
    xis = {k: ExpClassFunction.exp_of(-z.antiderivative()) for k, z in zs.items()}
    lams = {k: coherent_state(params, beta, k) for k in ("plus", "minus")}
    pts = grid.points(params.s)

    # (i) S shapes
    S_lemma = compute_S(prob) if trivial else None
    S43 = compute_S_form43(params, beta, lam)
    S45 = compute_S_form45(params, beta, lam)
    elim = S43 - S45 + quadrature_constraint_residual(params, beta, lam) * (4 / d)
    s_agreement = {
        "lemma_vs_direct": (S_lemma - S43).max_abs_coeff() if S_lemma is not None else
        (prob.p1 * prob.p1 - prob.p1.derivative() * 2 - prob.p0 * 4 - S43).max_abs_coeff(),
        "elimination_identity": elim.max_abs_coeff(),
        "quadratic_vs_square": (S45 - compute_S_form48(params, beta)).max_abs_coeff(),
        "quadratic_vs_unit_square": (S45 - compute_S_form48(params, beta, leading="printed")).max_abs_coeff(),
        "printed_quadratic_vs_square": (compute_S_form45(params, beta, lam, "printed")
                                        - compute_S_form48(params, beta)).max_abs_coeff(),
        "direct_vs_square": (S43 - compute_S_form48(params, beta)).max_abs_coeff(),
    }

    # (ii) Riccati substitution of the branch solutions
    riccati = {}
    for k, z in zs.items():
        r = substitution_residual(prob, z)
        riccati[k] = {"coefficient": r.max_abs_coeff(), "grid": float(np.max(np.abs(r.evaluate(pts))))}

    # (iii) eigen-equation residual
    Lop = LadderOperator("eigen_L", params, None if trivial else beta, grid=grid)
    eigen = {}
    for k, st in lams.items():
        res = apply_eigen_L(Lop, st) - st * (2 * SQRT2 * lam / params.s)
        scale = grid_norm(st, pts)
        eigen[k] = {"abs": grid_norm(res, pts), "rel": grid_norm(res, pts) / scale if scale else math.inf}

    # chain Lambda = exp((i/s) x + delta int beta) * xi
    chain = {}
    for k, xi in xis.items():
        pref = ExpClassFunction.exp_of(PolyFourierSum.monomial(1j / params.s, 1) + B.antiderivative() * d)
        built = pref.multiply(xi)
        chain[k] = float(np.max(np.abs(built.evaluate(pts) - lams[k].evaluate(pts))) / max(1.0, grid_norm(lams[k], pts)))

    poly_route = None
    if trivial:
        sol = solve_polynomial(prob)
        poly_route = {"kind": sol.kind, "candidate_residuals": sol.candidate_residuals}
    try:
        consts = find_constant_solutions(prob)
    except ValueError:
        consts = []
    constraint = quadrature_constraint_residual(params, beta, lam)

    audit = {
        "S_agreement": s_agreement,
        "discriminant_residual": abs(discriminant_residual(params, lam)),
        "discriminant_residual_printed": abs(discriminant_residual(params, lam, "printed")),
        "discriminant_from_coefficients": abs(discriminant_from_coefficients(params, lam)),
        "riccati_residual": riccati,
        "eigen_residual_grid": eigen,
        "chain_relation": chain,
        "polynomial_route": poly_route,
        "constant_solutions": [_cj(c) for c in consts],
        "omega_is_constant_solution": any(abs(c - params.omega) < 1e-9 for c in consts),
        "quadrature_constraint_max_coeff": constraint.max_abs_coeff(),
        "gamma": {"plus": _cj(sp.gamma_plus), "minus": _cj(sp.gamma_minus)},
        "lambda_s": _cj(lam),
        "degenerate_delta": params.degenerate,
    }
    return CSConstruction(params, beta, sp, prob, zs["plus"], zs["minus"], xis["plus"], xis["minus"],
                          lams["plus"], lams["minus"], grid, audit)


def reduced_state_audit(omega: float, s_values=(0.1, 0.05), beta: PeriodicDeformation | None = None,
                        grid: Grid | None = None) -> dict:
    """Minus-branch states at delta = -2 for several s, compared with each other and the reduced form.

    A nontrivial ``beta`` is re-scaled to each s (same Fourier coefficients)
    and checked on the circle grid, where its modes stay bounded.
    """
    grid = grid or (Grid() if beta is None or beta.is_trivial else Grid.circle())
    pts = grid.points() if grid.kind == "x" else None
    states = []
    for s in s_values:
        b = None if beta is None or beta.is_trivial else beta.with_scale(s)
        st = coherent_state(CSParameters(s, -2.0, omega), b, "minus")
        red = reduced_state(omega, b)
        p = pts if pts is not None else grid.points(s)
        states.append((s, st, red, p))
    vs_reduced = [float(np.max(np.abs(st.evaluate(p) - red.evaluate(p))) / max(1.0, grid_norm(red, p)))
                  for _, st, red, p in states]
    cross = []
    if pts is not None:
        ref = states[0][1].evaluate(pts)
        for _, st, _, _ in states[1:]:
            cross.append(float(np.max(np.abs(st.evaluate(pts) - ref)) / max(1.0, float(np.max(np.abs(ref))))))
    return {"s_values": list(s_values), "vs_reduced": vs_reduced, "cross_s": cross}

