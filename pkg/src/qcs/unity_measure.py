"""Circle representation, lattice weight and the unity integral.

On the circle x = (i s / 2 pi) t the minus-branch state obeys

    Lambda(t + 2 pi n) = exp(-n gamma - n s^2 t / (4 pi) - n^2 s^2 / 4) Lambda(t)

(exactly when b has zero mean), so the full-line integral of |Lambda|^2 folds
onto [-pi, pi] against the weight sum_n |factor_n(t)|^2.  After s -> sqrt2 s
that weight is the lattice sum

    sigma(t) = sum_n exp(-2 n g - 2 n (s^2 / 2 pi) t - n^2 s^2)
             = (sqrt(pi)/s) exp((s t / 2 pi + g / s)^2) theta3(t/2 + pi g / s^2 | i pi / s^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from ._numerics import simpson
from .cs_builder import CSConstruction
from .exp_class import ExpClassFunction, ExpLike, rescale

_LOG_TAIL = math.log(1e-18)
# summing a few thousand positive doubles; floor for the fold comparison
_ROUNDING = 64 * np.finfo(float).eps


@lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    return roots_legendre(n)


@dataclass(frozen=True)
class ThetaParams:
    z: complex
    tau: complex

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ValueError("theta3 needs Im(tau) > 0")


def _theta_range(imz: np.ndarray, im_tau: float) -> np.ndarray:
    centre = -imz / (math.pi * im_tau)
    width = math.sqrt(-_LOG_TAIL / (math.pi * im_tau)) + 2
    lo = int(math.floor(np.min(centre) - width))
    hi = int(math.ceil(np.max(centre) + width))
    return np.arange(lo, hi + 1)


def theta3(z, tau: complex):
    """Jacobi theta_3(z | tau) = sum_n exp(i pi tau n^2 + 2 i n z).

    The index range covers every term within a factor 1e-18 of the largest.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("theta3 needs Im(tau) > 0")
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    n = _theta_range(flat.imag, tau.imag)
    expo = 1j * math.pi * tau * n[None, :] ** 2 + 2j * n[None, :] * flat[:, None]
    out = np.sum(np.exp(expo), axis=1)
    return out.reshape(z.shape) if z.shape else complex(out[0])


@dataclass(frozen=True)
class WeightFunction:
    """Weight built from the physical deformation scale ``s``.

    With ``reparam=True`` the lattice formulas are evaluated at s / sqrt2, so
    sigma equals the fold weight sum_n |factor_n|^2 of the state at scale s.
    """

    s: float
    gamma_re: float
    reparam: bool = True

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("weight needs s > 0")

    @classmethod
    def from_construction(cls, c: CSConstruction, reparam: bool = True, branch: str = "minus") -> "WeightFunction":
        g = c.spectral.gamma_minus if branch == "minus" else c.spectral.gamma_plus
        return cls(c.params.s, float(g.real), reparam)

    @property
    def s_formula(self) -> float:
        return self.s / math.sqrt(2) if self.reparam else self.s

    @property
    def tau(self) -> complex:
        return 1j * math.pi / self.s_formula ** 2

    def lattice_exponent(self, n, t):
        s2 = self.s_formula ** 2
        return -2 * n * self.gamma_re - 2 * n * (s2 / (2 * math.pi)) * t - n ** 2 * s2

    def lattice_cutoff(self, t) -> tuple[int, int]:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s2 = self.s_formula ** 2
        centre = -(self.gamma_re + s2 * t / (2 * math.pi)) / s2
        width = math.sqrt(-_LOG_TAIL / s2) + 2
        return int(math.floor(centre.min() - width)), int(math.ceil(centre.max() + width))


def sigma_lattice(w: WeightFunction, t):
    t = np.asarray(t, dtype=float)
    flat = t.reshape(-1)
    lo, hi = w.lattice_cutoff(flat)
    n = np.arange(lo, hi + 1)
    e = w.lattice_exponent(n[None, :], flat[:, None])
    if np.max(e) > 700:
        raise OverflowError(f"lattice sum exponent {np.max(e):.1f} overflows")
    out = np.sum(np.exp(e), axis=1)
    return out.reshape(t.shape) if t.shape else float(out[0])


def sigma_closed(w: WeightFunction, t):
    t = np.asarray(t, dtype=float)
    s, g = w.s_formula, w.gamma_re
    pre = math.sqrt(math.pi) / s * np.exp((s * t / (2 * math.pi) + g / s) ** 2)
    th = theta3(t / 2 + math.pi * g / s ** 2, w.tau)
    return np.real(pre * th)


def theta_identity_errors(z, tau) -> dict:
    """Relative errors of the two quasi-periodicity identities."""
    z = np.asarray(z, dtype=complex)
    base = theta3(z, tau)
    e1 = np.abs(theta3(z + math.pi, tau) - base) / np.abs(base)
    rhs = np.exp(-1j * math.pi * tau - 2j * z) * base
    e2 = np.abs(theta3(z + math.pi * tau, tau) - rhs) / np.abs(rhs)
    return {"period_pi": float(np.max(e1)), "period_pi_tau": float(np.max(e2))}


def to_t_representation(f: ExpLike, s: float) -> ExpLike:
    """g(t) = f((i s / 2 pi) t)."""
    return rescale(f, 1j * s / (2 * math.pi))


def periodicity_factor(construction: CSConstruction, n: int, t) -> tuple[np.ndarray, float]:
    """exp(-n gamma - n s^2 t / (4 pi) - n^2 s^2 / 4) and the measured relative deviation

    max |Lambda(t + 2 pi n) - factor Lambda(t)| / |Lambda(t + 2 pi n)| over t.
    """
    s = construction.params.s
    g = construction.spectral.gamma_minus
    t = np.asarray(t, dtype=float)
    factor = factor_values(s, g, n, t)
    lt = to_t_representation(construction.lambda_minus, s)
    lhs = lt.evaluate(t + 2 * math.pi * n)
    dev = np.abs(lhs - factor * lt.evaluate(t)) / np.abs(lhs)
    return factor, float(np.max(dev))


def factor_values(s: float, gamma: complex, n: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.exp(-n * gamma - n * s ** 2 * t / (4 * math.pi) - n ** 2 * s ** 2 / 4)


@dataclass
class UnityReport:
    value: float
    imag_part: float
    gauss_legendre: float
    quad_agreement: float
    fold_direct: float
    fold_agreement: float
    fold_tail: float
    fold_quadrature_error: float
    fold_terms: int
    normalization: float
    normalized_value: float
    extra: dict = field(default_factory=dict)

    @property
    def fold_within_estimate(self) -> bool:
        budget = self.fold_tail + self.fold_quadrature_error + _ROUNDING * abs(self.value)
        return self.fold_agreement * abs(self.value) <= budget

    def to_json(self) -> dict:
        return {
            "unity_scalar": self.value, "imag_part": self.imag_part, "gauss_legendre": self.gauss_legendre,
            "quad_agreement": self.quad_agreement, "fold_direct": self.fold_direct,
            "fold_agreement": self.fold_agreement, "fold_tail": self.fold_tail,
            "fold_quadrature_error": self.fold_quadrature_error, "fold_terms": self.fold_terms,
            "fold_within_estimate": bool(self.fold_within_estimate),
            "normalization": self.normalization, "normalized_unity": self.normalized_value,
        }


def _weight_values(w, t):
    if isinstance(w, WeightFunction):
        return sigma_lattice(w, t)
    if callable(w):
        return np.asarray(w(t), dtype=float) * np.ones_like(t)
    return float(w) * np.ones_like(t)


def _integrand(state_t, w, t):
    v = state_t.evaluate(t)
    return np.conj(v) * _weight_values(w, t) * v


def unity_integral(state: ExpLike, s: float, w, nodes: int = 2001) -> complex:
    """Simpson value of int_{-pi}^{pi} conj(L) sigma L dt for an x-representation state."""
    st = to_t_representation(state, s)
    t = np.linspace(-math.pi, math.pi, nodes)
    return simpson(_integrand(st, w, t), t)


def unity_scalar(construction: CSConstruction, w, nodes: int = 2001, gl_nodes: int = 5000,
                 max_fold: int = 10000, fold_rtol: float = 1e-16) -> UnityReport:
    """Unity integral on [-pi, pi] with its Gauss-Legendre check and the fold comparison."""
    if nodes % 2 == 0:
        nodes += 1
    s = construction.params.s
    state = construction.lambda_minus
    st = to_t_representation(state, s)
    val = unity_integral(state, s, w, nodes)
    x, wts = _gauss_legendre(gl_nodes)
    gl = complex(np.sum(wts * math.pi * _integrand(st, w, math.pi * x)))
    quad_agree = abs(val - gl) / abs(val) if val != 0 else abs(gl)

    # direct sum over the intervals [(2n-1) pi, (2n+1) pi]
    t = np.linspace(-math.pi, math.pi, nodes)
    t_half = np.linspace(-math.pi, math.pi, (nodes + 1) // 2)
    total, coarse, last, n = 0.0, 0.0, [], 0
    sizes = []
    while n <= max_fold:
        for k in ((0,) if n == 0 else (n, -n)):
            shift_t = t + 2 * math.pi * k
            v = st.evaluate(shift_t)
            piece = simpson(np.abs(v) ** 2, shift_t).real
            vc = st.evaluate(t_half + 2 * math.pi * k)
            coarse += simpson(np.abs(vc) ** 2, t_half + 2 * math.pi * k).real
            total += piece
            sizes.append(abs(piece))
        last = sizes[-2:] if n else sizes[-1:]
        if n > 0 and max(last) <= fold_rtol * abs(total):
            break
        n += 1
    # terms decay like exp(-c n^2); twice the last pair bounds the tail generously
    tail = 2 * sum(last)
    fold_q = abs(total - coarse) / 15  # Simpson h^4 Richardson estimate
    fold_agree = abs(total - val.real) / abs(val.real) if val.real != 0 else abs(total)

    norm = 1 / math.sqrt(val.real) if val.real > 0 else math.nan
    normalized = unity_integral(state.scale(norm), s, w, nodes).real if val.real > 0 else math.nan
    return UnityReport(
        value=float(val.real), imag_part=float(val.imag), gauss_legendre=float(gl.real),
        quad_agreement=float(quad_agree), fold_direct=float(total), fold_agreement=float(fold_agree),
        fold_tail=float(tail), fold_quadrature_error=float(fold_q), fold_terms=n,
        normalization=float(norm), normalized_value=float(normalized),
    )


def sigma_table(w: WeightFunction, construction: CSConstruction, t) -> np.ndarray:
    """Columns t, sigma_lattice, sigma_closed, Re Lambda(t), Im Lambda(t)."""
    t = np.asarray(t, dtype=float)
    lt = to_t_representation(construction.lambda_minus, construction.params.s).evaluate(t)
    return np.column_stack([t, sigma_lattice(w, t), sigma_closed(w, t), lt.real, lt.imag])


def sigma_relative_error(w: WeightFunction, t) -> float:
    lat = sigma_lattice(w, t)
    return float(np.max(np.abs(sigma_closed(w, t) - lat) / lat))


def state_norm_on_circle(state: ExpClassFunction, s: float, t) -> float:
    return float(np.max(np.abs(to_t_representation(state, s).evaluate(t))))
