"""Acceptance suite: one test and one PASS/FAIL line per criterion."""
import math

import numpy as np

from qcs._numerics import Grid
from qcs.cli import run
from qcs.cs_builder import (build_coefficients, build_states, compute_S_form43, compute_S_form45,
                            compute_S_form48, discriminant_residual, eigenvalue)
from qcs.exp_class import ExpClassFunction, PolyFourierSum, random_function
from qcs.fourier_periodic import PeriodicDeformation, difference_residual
from qcs.operator_algebra import CSParameters, LadderOperator, fitted_order, q_mutator_residual, \
    weak_consistency_errors
from qcs.perturbation import convergence_study, expand, numeric_order1
from qcs.riccati import (NoPolynomialSolution, PoleEncountered, RiccatiProblem, compute_S,
                         find_constant_solutions, pole_free_check, solve_polynomial, substitution_residual)
from qcs.unity_measure import WeightFunction, sigma_relative_error, theta_identity_errors, unity_scalar

P = PolyFourierSum.from_poly
SEED = 0


def test_c01_exact_q_mutator(criterion):
    rng = np.random.default_rng(SEED)
    funcs = [random_function(rng) for _ in range(100)]
    worst = 0.0
    for s in (0.05, 0.1, 0.2, 0.5):
        op = LadderOperator("annihilation", CSParameters(s))
        worst = max(worst, max(q_mutator_residual(op, f) for f in funcs))
    assert criterion(1, worst < 1e-10, f"max q-mutator residual {worst:.2e} (< 1e-10), 100 functions x 4 s")


def test_c02_difference_equation(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        s = rng.uniform(0.05, 1.0)
        d = PeriodicDeformation.random(rng, s)
        worst = max(worst, difference_residual(d, Grid.circle().points(s)))
    assert criterion(2, worst < 1e-10, f"max |beta(x+is)-beta(x)-is| {worst:.2e} (< 1e-10), 20 fixtures")


def test_c03_weak_consistency(criterion):
    s_vals = [0.2, 0.1, 0.05, 0.025]
    family = [ExpClassFunction(PolyFourierSum.constant(1), quad=-a, lin=b) for a, b in
              ((0.5, 0), (0.25, 0), (1.0, 0), (0.5, 0.5j), (0.5, 0.3))]
    orders = [fitted_order(s_vals, weak_consistency_errors(f, s_vals)) for f in family]
    printed = fitted_order(s_vals, weak_consistency_errors(family[0], s_vals, "printed"))
    ok = min(orders) >= 1.8
    assert criterion(3, ok, f"fitted order min {min(orders):.3f} (>= 1.8) over 5 Gaussians; "
                            f"printed f'' coefficient gives {printed:.3f}")


def _poly(rng, deg, lead=True):
    c = rng.uniform(-1, 1, deg + 1) + 1j * rng.uniform(-1, 1, deg + 1)
    if lead:
        c[-1] = (0.5 + rng.uniform(0, 1)) * np.exp(1j * rng.uniform(-3, 3))
    return P(c)


def test_c04_polynomial_riccati(criterion):
    rng = np.random.default_rng(SEED)
    recovered, worst = 0, 0.0
    for _ in range(30):
        z0 = _poly(rng, int(rng.integers(0, 4)))
        p1 = _poly(rng, int(rng.integers(0, 3)), lead=False)
        prob = RiccatiProblem(P([1]), p1, z0.derivative() - z0 * z0 - p1 * z0)
        sol = solve_polynomial(prob)
        kept = [z for z in (sol.z_plus, sol.z_minus) if z is not None]
        if any((z - z0).max_abs_coeff() < 1e-8 for z in kept):
            recovered += 1
        worst = max([worst] + [substitution_residual(prob, z).max_abs_coeff() for z in kept])
    odd = 0
    for _ in range(30):
        prob = RiccatiProblem(P([1]), PolyFourierSum(), _poly(rng, 2 * int(rng.integers(0, 3)) + 1))
        assert compute_S(prob).poly_coeffs().size % 2 == 0  # odd degree
        try:
            solve_polynomial(prob)
        except NoPolynomialSolution:
            odd += 1
    ok = recovered == 30 and worst < 1e-10 and odd == 30
    assert criterion(4, ok, f"recovered {recovered}/30 (max residual {worst:.1e}); "
                            f"odd-degree rejected {odd}/30")


def test_c05_quadrature_vs_rk4(criterion):
    rng = np.random.default_rng(SEED)
    fixtures = [RiccatiProblem.from_coeffs((1,), (0,), (-1,)), RiccatiProblem.from_coeffs((1,), (0, -2), (-1, 2))]
    for _ in range(18):
        c = complex(*rng.uniform(-1, 1, 2))
        p1 = _poly(rng, 2, lead=False) * 0.5
        p2 = P([1.0]) + _poly(rng, 1, lead=False) * 0.3
        fixtures.append(RiccatiProblem(p2, p1, -(p2 * (c * c) + p1 * c)))
    worst, count, poles = 0.0, 0, 0
    for prob in fixtures:
        for c in find_constant_solutions(prob):
            try:
                worst = max(worst, pole_free_check(prob, c)["max_dev"])
                count += 1
            except PoleEncountered:
                poles += 1
    ok = worst < 1e-6 and poles == 0 and count >= len(fixtures)
    assert criterion(5, ok, f"{count} constants on {len(fixtures)} fixtures, max |quad - RK4| {worst:.1e} "
                            f"(< 1e-6), poles {poles}")


def test_c06_discriminant_closure(criterion):
    rng = np.random.default_rng(SEED)
    res = []
    for _ in range(50):
        s, d, w = rng.uniform(0.01, 0.5), rng.uniform(-5, 5), rng.uniform(-2, 2)
        res.append(abs(discriminant_residual(CSParameters(s, d, w))))
    worked = CSParameters(0.1, -2.0, 1.0)
    lam = eigenvalue(worked)
    pinned = abs(lam - (-10.5595 - 1.41421j)) < 1e-4 and abs(discriminant_residual(worked)) < 1e-10
    # the same sampler over many draws exposes the rounding floor of the closed form
    big = np.random.default_rng(123)
    fails = sum(abs(discriminant_residual(CSParameters(big.uniform(0.01, 0.5), big.uniform(-5, 5),
                                                       big.uniform(-2, 2)))) >= 1e-10 for _ in range(2000))
    ok = max(res) < 1e-10 and pinned
    assert criterion(6, ok, f"max |Delta| {max(res):.1e} over 50 draws (seed {SEED}); worked lambda "
                            f"{lam.real:.4f}{lam.imag:+.5f}i; rounding-floor exceedance in 2000 draws "
                            f"{fails / 2000:.1%}")


def test_c07_s_form_agreement(criterion):
    lemma_worst, square_worst = 0.0, 0.0
    for s, d, w in ((0.1, -2.0, 1.0), (0.3, 2.0, -0.5), (0.05, 0.5, 1.5), (0.2, -4.0, 0.0)):
        p = CSParameters(s, d, w)
        prob = build_coefficients(p)
        lemma_worst = max(lemma_worst, (compute_S(prob) - compute_S_form43(p)).max_abs_coeff())
        for b in (None, PeriodicDeformation(s, {1: 0.1, -1: 0.05j})):
            square_worst = max(square_worst, (compute_S_form45(p, b) - compute_S_form48(p, b)).max_abs_coeff())
    ok = lemma_worst < 1e-10 and square_worst < 1e-9
    assert criterion(7, ok, f"lemma vs direct {lemma_worst:.1e} (< 1e-10); quadratic vs square "
                            f"{square_worst:.1e} (< 1e-9)")


def test_c08_perturbation(criterion):
    r0, r1, dev = 0.0, 0.0, 0.0
    for d, w in ((-2.0, 1.0), (-2.0, 0.0), (2.0, 0.5)):
        p = CSParameters(0.1, d, w)
        st = expand(p)
        r0, r1 = max(r0, st.residual0), max(r1, st.residual1)
        _, num, closed = numeric_order1(p)
        dev = max(dev, float(np.max(np.abs(num - closed))))
    rep = convergence_study([0.2, 0.1, 0.05, 0.025], -2.0, 1.0)
    flag_ok = rep.flagged == (not 1.8 <= rep.slope <= 2.2)
    ok = r0 < 1e-10 and dev < 1e-6 and flag_ok
    assert criterion(8, ok, f"order-0 residual {r0:.1e}; order-1 vs ODE {dev:.1e}; slope {rep.slope:.3f} "
                            f"{'flagged' if rep.flagged else 'in range'}")


def test_c09_theta_identity(criterion):
    t = np.linspace(-math.pi, math.pi, 41)
    sig, th = 0.0, 0.0
    for s in (0.5, 1.0, 2.0):
        for g in (0.0, 0.3):
            w = WeightFunction(s, g, reparam=True)
            sig = max(sig, sigma_relative_error(w, t))
            z = t / 2 + math.pi * g / w.s_formula ** 2 + 0.2j
            th = max(th, max(theta_identity_errors(z, w.tau).values()))
    ok = sig < 1e-10 and th < 1e-12
    assert criterion(9, ok, f"sigma closed vs lattice {sig:.1e} (< 1e-10); quasi-periodicity {th:.1e} (< 1e-12)")


def test_c10_unity_quadrature(criterion):
    quad, norm, fold_ok = 0.0, 0.0, True
    cases = [(0.5, None), (1.0, None), (0.5, {1: 0.2, -2: 0.1j})]
    for s, modes in cases:
        b = None if modes is None else PeriodicDeformation(s, modes)
        c = build_states(CSParameters(s, -2.0, 1.0), b)
        r = unity_scalar(c, WeightFunction.from_construction(c))
        quad = max(quad, abs(r.value - r.gauss_legendre) / r.value)
        norm = max(norm, abs(r.normalized_value - 1))
        fold_ok &= r.fold_within_estimate
    ok = quad < 1e-8 and norm < 1e-8 and fold_ok
    assert criterion(10, ok, f"Simpson vs Gauss-Legendre {quad:.1e} (< 1e-8); fold within estimate {fold_ok}; "
                             f"|normalized - 1| {norm:.1e}")


def test_c11_determinism(criterion, tmp_path):
    cmds = [
        ["algebra-check", "--s", "0.1", "--samples", "5", "--seed", "3"],
        ["solve-riccati", "--p2", "[1]", "--p1", "[0]", "--p0", "[-1]", "--numeric-check"],
        ["perturb-compare", "--s-list", "0.2,0.1,0.05", "--delta", "-2", "--omega", "1"],
        ["unity-check", "--s", "0.5", "--delta", "-2", "--omega", "1"],
    ]
    same = 0
    out = tmp_path / "r.json"
    for argv in cmds:
        blobs = []
        for _ in range(2):
            assert run(argv + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        same += blobs[0] == blobs[1]
    audit = tmp_path / "a.json"
    blobs = []
    for _ in range(2):
        assert run(["build-cs", "--s", "0.1", "--delta", "-2", "--omega", "1", "--audit", str(audit)]) == 0
        blobs.append(audit.read_bytes())
    same += blobs[0] == blobs[1]
    assert criterion(11, same == 5, f"{same}/5 subcommands byte-identical on repeat")
