"""First-order expansion in s of the minus-branch state, checked against a
numerical solution of the order-1 equation, and the convergence study."""
import numpy as np

from qcs.operator_algebra import CSParameters
from qcs.perturbation import convergence_study, expand, numeric_order1

p = CSParameters(0.1, -2.0, 1.0)
st = expand(p)
print(f"lambda0 {st.lambda0:.4g}  lambda1 {st.lambda1:.4g}  kappa {st.kappa:.4g}")
print(f"order-0 residual {st.residual0:.1e}, order-1 residual {st.residual1:.1e}")
xs, num, closed = numeric_order1(p)
print(f"order 1: closed form vs RK4 on [-2, 2]: {np.max(np.abs(num - closed)):.1e}")

rep = convergence_study([0.2, 0.1, 0.05, 0.025], -2.0, 1.0)
print("e(s):", [f"{e:.3g}" for e in rep.errors])
print(f"fitted order {rep.slope:.3f}, 95% interval {rep.interval[0]:.3f}..{rep.interval[1]:.3f}, "
      f"flagged = {rep.flagged}")
print("the full state grows like exp(+x^2/4) while the expansion decays like exp(-x^2/2),")
print("so their gap stays O(1) as s shrinks")
