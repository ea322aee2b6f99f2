"""Riccati equations: a polynomial solution from the integer part of sqrt(S),
the parity obstruction, and reduction to quadrature through a constant root."""
from qcs.exp_class import PolyFourierSum
from qcs.riccati import (NoPolynomialSolution, RiccatiProblem, compute_S, find_constant_solutions,
                         pole_free_check, solve_polynomial)

p = RiccatiProblem.from_coeffs(p2=(1,), p1=(0,), p0=(1, 0, -1))
print("S =", compute_S(p))
sol = solve_polynomial(p)
print("kept:", sol.kind, "| rejected:", sol.rejected, "| residuals:", sol.candidate_residuals)

try:
    solve_polynomial(RiccatiProblem.from_coeffs(p0=(0, 1)))
except NoPolynomialSolution as exc:
    print("odd degree:", exc)

# z = 1 solves z' = (1 + x) z^2 - 2x z + (x - 1)
q = RiccatiProblem(PolyFourierSum.from_poly([1, 1]), PolyFourierSum.from_poly([0, -2]),
                   PolyFourierSum.from_poly([-1, 1]))
for c in find_constant_solutions(q):
    chk = pole_free_check(q, c)
    print(f"constant root {c:.4g}: quadrature vs RK4 {chk['max_dev']:.1e} on {chk['domain']}")
