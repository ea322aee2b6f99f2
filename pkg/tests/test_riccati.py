import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcs.exp_class import PolyFourierSum, PolyFourierTerm
from qcs.riccati import (NoPolynomialSolution, PoleEncountered, RiccatiProblem, compute_S,
                         find_constant_solutions, integrate_numeric, lemma_combination, poly_from_literal,
                         poly_sqrt_floor, quadrature_check, solve_by_quadrature, solve_polynomial,
                         substitution_residual)

P = PolyFourierSum.from_poly
X5 = np.linspace(-2, 2, 5)


def prob(p1=(0,), p0=(0,), p2=(1,)):
    return RiccatiProblem.from_coeffs(p2, p1, p0)


def close(poly, coeffs, tol=1e-12):
    return (poly - P(coeffs)).max_abs_coeff() < tol


def test_compute_S_examples():
    assert compute_S(prob()).is_zero()
    S = compute_S(prob(p0=(1, 0, -1)))
    assert np.allclose(S.evaluate(X5), 4 * X5 ** 2 - 4)
    S = compute_S(prob(p1=(0, -2), p0=(0, 0, 1)))
    assert np.allclose(S.evaluate(X5), 4)


def test_compute_S_requires_polynomial_inputs():
    with pytest.raises(ValueError):
        compute_S(prob(p2=(2,)))
    with pytest.raises(ValueError):
        compute_S(RiccatiProblem(P([1]), PolyFourierSum([PolyFourierTerm(1, 0, 1j)]), P([0])))


def test_sqrt_floor_examples():
    assert close(poly_sqrt_floor(P([4])), [2])
    assert close(poly_sqrt_floor(P([-4, 0, 4])), [0, 2])
    assert close(poly_sqrt_floor(P([1, 2, 3, 2, 1])), [1, 1, 1])
    assert poly_sqrt_floor(PolyFourierSum()).is_zero()


def test_sqrt_floor_series_oracle():
    # sqrt(4x^2 - 4) = 2x - 1/x - ...; remainder after the integer part has lower degree
    T = poly_sqrt_floor(P([-4, 0, 4]))
    x = 1e4
    assert abs(T.evaluate(x) - math.sqrt(4 * x * x - 4)) < 2 / x


def test_sqrt_floor_odd_degree():
    with pytest.raises(NoPolynomialSolution):
        poly_sqrt_floor(P([0, 1, 0, 2]))


def test_principal_branch():
    T = poly_sqrt_floor(P([0, 0, -4]))
    assert T.poly_coeffs()[1] == pytest.approx(2j)


def test_solve_polynomial_example_kept_and_rejected():
    sol = solve_polynomial(prob(p0=(1, 0, -1)))
    assert sol.kind == "polynomial_pair"
    kept = [z for z in (sol.z_plus, sol.z_minus) if z is not None]
    assert len(kept) == 1 and close(kept[0], [0, 1])
    assert len(sol.rejected) == 1
    bad = sol.candidate_residuals[sol.rejected[0]]
    # z = -x: residual -1 - (x^2 + 1 - x^2) = -2
    assert bad["coefficient"] == pytest.approx(2.0)


def test_solve_polynomial_constant_case():
    sol = solve_polynomial(prob(p0=(-1,)))
    assert sol.kind == "polynomial_pair"
    assert {round(sol.z_plus.evaluate(0.3).real), round(sol.z_minus.evaluate(0.3).real)} == {-1, 1}


def test_solve_polynomial_sqrt8_case():
    p = prob(p1=(0, -2), p0=(-1, 0, 1))
    assert compute_S(p).evaluate(0.7) == pytest.approx(8)
    sol = solve_polynomial(p)
    for name in ("plus", "minus"):
        z = -0.5 * (p.p1 + (1 if name == "plus" else -1) * P([math.sqrt(8)]))
        r = substitution_residual(p, z).max_abs_coeff()
        assert sol.candidate_residuals[name]["coefficient"] == pytest.approx(r, abs=1e-12)
        # x + sqrt2 gives 1 = (x+sqrt2)^2 - 2x(x+sqrt2) + x^2 - 1 = 1: identically zero
        assert r == pytest.approx(0, abs=1e-12)


def random_poly(rng, deg, lead=True):
    c = rng.uniform(-1, 1, deg + 1) + 1j * rng.uniform(-1, 1, deg + 1)
    if lead:
        c[-1] = (0.5 + rng.uniform(0, 1)) * np.exp(1j * rng.uniform(-3, 3))
    return c


def constructed_fixture(rng):
    """p2 = 1 problem built around a known polynomial solution z0."""
    z0 = P(random_poly(rng, int(rng.integers(0, 4))))
    p1 = P(random_poly(rng, int(rng.integers(0, 3)), lead=False))
    p0 = z0.derivative() - z0 * z0 - p1 * z0
    return RiccatiProblem(P([1]), p1, p0), z0


def odd_fixture(rng):
    p0 = P(random_poly(rng, 2 * int(rng.integers(0, 3)) + 1))
    return RiccatiProblem(P([1]), PolyFourierSum(), p0)


@given(st.integers(0, 10**6))
def test_recovers_constructed_solution(seed):
    p, z0 = constructed_fixture(np.random.default_rng(seed))
    sol = solve_polynomial(p)
    kept = [z for z in (sol.z_plus, sol.z_minus) if z is not None]
    assert any((z - z0).max_abs_coeff() < 1e-8 for z in kept)
    for z in kept:
        assert substitution_residual(p, z).max_abs_coeff() < 1e-10


@given(st.integers(0, 10**6))
def test_odd_degree_has_no_polynomial_solution(seed):
    with pytest.raises(NoPolynomialSolution):
        solve_polynomial(odd_fixture(np.random.default_rng(seed)))


def test_constant_solutions_examples():
    assert sorted(c.real for c in find_constant_solutions(prob(p0=(-1,)))) == [-1, 1]
    cs = find_constant_solutions(prob(p1=(0, -2), p0=(-1, 2)))
    assert len(cs) == 1 and cs[0] == pytest.approx(1)
    assert find_constant_solutions(prob(p1=(0, 1), p0=(0, 1))) == []


def test_constant_solutions_contradiction():
    # p2 = p1 = 0 and p0 = 1: 0 = 1 never holds
    assert find_constant_solutions(RiccatiProblem(PolyFourierSum(), PolyFourierSum(), P([1]))) == []


def test_lemma_combination_matches_constant():
    p = prob(p1=(0, -2), p0=(-1, 2))
    assert lemma_combination(p, 1.0, 1.0).is_zero()
    assert lemma_combination(p, 2.0, 2.0).is_zero()


def test_quadrature_tanh_example():
    p = prob(p0=(-1,))
    sol = solve_by_quadrature(p, 1.0, z0=0.0)
    assert np.max(np.abs(sol.zs + np.tanh(sol.xs))) < 1e-8
    xs, zs = integrate_numeric(p, 0.0, (0, 1), 1e-4)
    assert abs(zs[-1] + math.tanh(1)) < 1e-8
    assert quadrature_check(p, 1.0, 0.0) < 1e-8


def test_quadrature_linear_case():
    # 2 c p2 + p1 = 0 with c = 1: p1 = -2, p0 = 1
    p = prob(p1=(-2,), p0=(1,))
    sol = solve_by_quadrature(p, 1.0, domain=(0.0, 0.5), z0=2.0)
    # u' = -1, u(0) = 1 -> u = 1 - x, z = 1 + 1/(1 - x)
    assert np.allclose(sol.zs, 1 + 1 / (1 - sol.xs), rtol=1e-12)


def test_quadrature_rejects_non_solution():
    with pytest.raises(ValueError):
        solve_by_quadrature(prob(p0=(-1,)), 0.5)


def test_quadrature_reduction_closed_form_description():
    sol = solve_by_quadrature(prob(p0=(-1,)), 1.0)
    assert "u'" in sol.reduction.description
    # u = C e^{-2x} - 1/2 with u(0) = 1/(z0 - 1) = 1
    u = sol.reduction.u(1.0)
    assert np.allclose(u, 1.5 * np.exp(-2 * sol.xs) - 0.5, atol=1e-12)


def constant_fixture(rng):
    c = complex(*rng.uniform(-1, 1, 2))
    p1 = P(random_poly(rng, 2, lead=False)) * 0.5
    p2 = P([1.0]) + P(random_poly(rng, 1, lead=False)) * 0.3
    p0 = -(p2 * (c * c) + p1 * c)
    return RiccatiProblem(p2, p1, p0), c


@given(st.integers(0, 10**6))
def test_quadrature_matches_rk4(seed):
    rng = np.random.default_rng(seed)
    p, c = constant_fixture(rng)
    found = find_constant_solutions(p)
    assert any(abs(f - c) < 1e-9 for f in found)
    for f in found:
        try:
            assert quadrature_check(p, f, f + 0.5) < 1e-6
        except PoleEncountered:
            pass


def test_integrate_numeric_examples():
    _, zs = integrate_numeric(RiccatiProblem(P([1]), PolyFourierSum(), PolyFourierSum()), 1.0, (0, 0.5), 1e-4)
    assert abs(zs[-1] - 2) < 1e-8
    _, zs = integrate_numeric(RiccatiProblem(PolyFourierSum(), P([-1]), PolyFourierSum()), 1.0, (0, 1), 1e-3)
    assert abs(zs[-1] - math.exp(-1)) < 1e-10


def test_pole_detection():
    with pytest.raises(PoleEncountered) as info:
        integrate_numeric(RiccatiProblem(P([1]), PolyFourierSum(), PolyFourierSum()), 1.0, (0, 2), 1e-4)
    assert 0.99 < info.value.x < 1.01


def test_poly_literal_forms():
    p = poly_from_literal([1, [0, 2], "3-1i"])
    assert close(p, [1, 2j, 3 - 1j])
    with pytest.raises(ValueError):
        poly_from_literal([{"a": 1}])


def test_pole_free_probe_skips_blow_up():
    from qcs.riccati import pole_free_check

    p = prob(p0=(-1,))
    # from z0 = 1.5 the solution of z' = z^2 - 1 blows up before x = 1
    with pytest.raises(PoleEncountered):
        quadrature_check(p, 1.0, 1.5)
    chk = pole_free_check(p, 1.0)
    assert chk["z0"] != 1.5 and chk["max_dev"] < 1e-8
    with pytest.raises(PoleEncountered):
        pole_free_check(p, 1.0, offsets=(1.0,), domains=((0.0, 1.0),))
