"""Weak q-deformed coherent states: exact class algebra, ladder operators,
Riccati reduction, perturbation theory and the unity measure."""

__version__ = "0.1.0"

from .exp_class import ExpClassFunction, ExpClassSum, NonFiniteResult, PolyFourierSum, PolyFourierTerm
from .fourier_periodic import PeriodicDeformation
from .operator_algebra import CSParameters, LadderOperator, SingularParameterError
from .riccati import NoPolynomialSolution, PoleEncountered, RiccatiProblem
from .cs_builder import build_states, coherent_state, spectral_data
from .perturbation import convergence_study, expand
from .unity_measure import WeightFunction, theta3, unity_scalar

__all__ = [
    "__version__", "ExpClassFunction", "ExpClassSum", "NonFiniteResult", "PolyFourierSum", "PolyFourierTerm",
    "PeriodicDeformation", "CSParameters", "LadderOperator", "SingularParameterError",
    "NoPolynomialSolution", "PoleEncountered", "RiccatiProblem", "build_states", "coherent_state",
    "spectral_data", "convergence_study", "expand", "WeightFunction", "theta3", "unity_scalar",
]
