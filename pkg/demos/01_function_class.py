"""The closed function class: build a member, shift it off the real axis,
differentiate it, and confirm each operation against direct arithmetic."""
import numpy as np

from qcs.exp_class import ExpClassFunction, PolyFourierSum, PolyFourierTerm, equal_by_evaluation

# f(x) = x e^{ix} exp(-x^2/4 + 0.3 e^{2ix})
f = ExpClassFunction(PolyFourierSum([PolyFourierTerm(1.0, 1, 1j)]), quad=-0.25, modes=((2j, 0.3),))
z = np.array([0.4, -1.1 + 0.2j])
direct = z * np.exp(1j * z) * np.exp(-z * z / 4 + 0.3 * np.exp(2j * z))
print("f(z) from the class   :", f.evaluate(z))
print("f(z) by hand          :", direct)

g = f.shift(0.1j)
print("shift by 0.1i matches :", np.allclose(g.evaluate(z), f.evaluate(z + 0.1j)))

h = 1e-6
fd = (f.evaluate(z + h) - f.evaluate(z - h)) / (2 * h)
print("derivative vs FD      :", np.max(np.abs(f.differentiate().evaluate(z) - fd)))

# the representation is not unique, so equality is decided by evaluation
alt = ExpClassFunction(f.prefactor * np.e, f.quad, f.lin, f.const - 1, f.modes)
print("same function, other form:", equal_by_evaluation(f, alt))
