"""Circle representation and the unity integral: the lattice weight against
its theta-function closed form, periodicity of the state, and the fold."""
import math

import numpy as np

from qcs.cs_builder import build_states
from qcs.operator_algebra import CSParameters
from qcs.unity_measure import (WeightFunction, periodicity_factor, sigma_relative_error, unity_scalar)

c = build_states(CSParameters(0.5, -2.0, 1.0))
t = np.linspace(-math.pi, math.pi, 41)
for reparam in (True, False):
    w = WeightFunction.from_construction(c, reparam=reparam)
    r = unity_scalar(c, w)
    print(f"reparam {'on ' if reparam else 'off'}: sigma closed vs lattice {sigma_relative_error(w, t):.1e}, "
          f"unity {r.value:.6f}, fold agreement {r.fold_agreement:.1e}, within estimate {r.fold_within_estimate}")

for n in (1, 2, -1):
    print(f"Lambda(t + 2 pi {n:+d}) = factor * Lambda(t): deviation {periodicity_factor(c, n, t)[1]:.1e}")

r = unity_scalar(c, WeightFunction.from_construction(c))
print(f"normalization {r.normalization:.6f}; normalized unity {r.normalized_value:.12f}")
