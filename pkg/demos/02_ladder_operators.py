"""Ladder operators: the q-mutator closes exactly, the weak operator is a
second-order truncation, and the periodic deformation stays exact."""
import numpy as np

from qcs._numerics import Grid
from qcs.exp_class import random_function
from qcs.fourier_periodic import PeriodicDeformation
from qcs.operator_algebra import (CSParameters, LadderOperator, fitted_order, q_mutator_residual,
                                  weak_consistency_errors)
from qcs.exp_class import ExpClassFunction, PolyFourierSum

rng = np.random.default_rng(0)
f = random_function(rng)
for s in (0.05, 0.2, 0.5):
    op = LadderOperator("annihilation", CSParameters(s))
    print(f"s = {s:<5} |[B, B+]_q f - f| = {q_mutator_residual(op, f):.2e}")

s = 0.3
beta = PeriodicDeformation(s, {1: 0.2, -1: 0.1j})
op = LadderOperator("annihilation", CSParameters(s), beta, grid=Grid.circle())
print(f"with b(x) = 0.2 e^(2 pi x/s) + 0.1i e^(-2 pi x/s): residual {q_mutator_residual(op, f):.2e}")

gauss = ExpClassFunction(PolyFourierSum.constant(1), quad=-0.5)
s_vals = [0.2, 0.1, 0.05, 0.025]
for form in ("derived", "printed"):
    errs = weak_consistency_errors(gauss, s_vals, form)
    print(f"weak operator ({form:7}) error {np.array2string(errs, precision=2)}  order {fitted_order(s_vals, errs):.2f}")
