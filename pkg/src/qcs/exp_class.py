"""Closed-form algebra of exponential-class functions.

A member of the class is

    f(x) = P(x) * exp(a x^2 + b x + c + sum_k d_k exp(nu_k x))

where ``P`` is a finite poly-Fourier sum ``sum_j c_j x^m_j exp(mu_j x)``.
The class is closed under products, differentiation, complex shifts of the
argument, linear rescaling of the argument and multiplication by pure
exponentials.  Linear combinations of members with different quadratic or
mode data are kept as an :class:`ExpClassSum` of blocks.

All rates (``mu``, ``nu``) are stored as full complex exponent rates, so a
pure Fourier mode ``exp(i k x)`` has rate ``1j * k``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

FREQ_TOL = 1e-12
PRUNE_REL = 1e-14
OVERFLOW_LIMIT = 1e300
_LOG_OVERFLOW = math.log(OVERFLOW_LIMIT)

Number = Union[int, float, complex]


class NonFiniteResult(ArithmeticError):
    """Evaluation exceeded the overflow guard."""

    def __init__(self, log_magnitude: float):
        self.log_magnitude = float(log_magnitude)
        super().__init__(
            f"evaluation magnitude exp({self.log_magnitude:.4g}) exceeds guard {OVERFLOW_LIMIT:g}"
        )


def _same_rate(u: complex, v: complex) -> bool:
    return abs(u - v) <= FREQ_TOL


@dataclass(frozen=True)
class PolyFourierTerm:
    coeff: complex
    power: int
    freq: complex = 0j

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")


class PolyFourierSum:
    """Finite sum of ``coeff * x**power * exp(freq * x)`` in canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[PolyFourierTerm] = (), prune: bool = True):
        merged: list[list] = []
        for t in terms:
            c = complex(t.coeff)
            if c == 0:
                continue
            fr = complex(t.freq)
            for m in merged:
                if m[1] == t.power and _same_rate(m[2], fr):
                    m[0] += c
                    break
            else:
                merged.append([c, int(t.power), fr])
        if merged and prune:
            top = max(abs(m[0]) for m in merged)
            floor = PRUNE_REL * top
            merged = [m for m in merged if abs(m[0]) > floor]
        else:
            merged = [m for m in merged if m[0] != 0]
        merged.sort(key=lambda m: (m[1], m[2].real, m[2].imag))
        self.terms: tuple[PolyFourierTerm, ...] = tuple(
            PolyFourierTerm(c, p, f) for c, p, f in merged
        )

    # construction helpers
    @classmethod
    def constant(cls, c: Number) -> "PolyFourierSum":
        return cls([PolyFourierTerm(complex(c), 0, 0j)])

    @classmethod
    def monomial(cls, c: Number = 1.0, power: int = 1, freq: Number = 0j) -> "PolyFourierSum":
        return cls([PolyFourierTerm(complex(c), power, complex(freq))])

    @classmethod
    def x(cls) -> "PolyFourierSum":
        return cls.monomial(1.0, 1)

    @classmethod
    def from_poly(cls, coeffs: Iterable[Number]) -> "PolyFourierSum":
        """Polynomial from ascending coefficients ``[c0, c1, ...]``."""
        return cls([PolyFourierTerm(complex(c), k, 0j) for k, c in enumerate(coeffs)])

    @staticmethod
    def coerce(value) -> "PolyFourierSum":
        if isinstance(value, PolyFourierSum):
            return value
        if isinstance(value, (int, float, complex, np.number)):
            return PolyFourierSum.constant(complex(value))
        raise TypeError(f"cannot coerce {type(value).__name__} to PolyFourierSum")

    # ring structure
    def __add__(self, other) -> "PolyFourierSum":
        try:
            other = PolyFourierSum.coerce(other)
        except TypeError:
            return NotImplemented
        return PolyFourierSum(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "PolyFourierSum":
        return PolyFourierSum([PolyFourierTerm(-t.coeff, t.power, t.freq) for t in self.terms])

    def __sub__(self, other) -> "PolyFourierSum":
        try:
            other = PolyFourierSum.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PolyFourierSum":
        return PolyFourierSum.coerce(other) - self

    def __mul__(self, other) -> "PolyFourierSum":
        if isinstance(other, (int, float, complex, np.number)):
            c = complex(other)
            return PolyFourierSum([PolyFourierTerm(t.coeff * c, t.power, t.freq) for t in self.terms])
        if not isinstance(other, PolyFourierSum):
            return NotImplemented
        out = [
            PolyFourierTerm(a.coeff * b.coeff, a.power + b.power, a.freq + b.freq)
            for a in self.terms
            for b in other.terms
        ]
        return PolyFourierSum(out)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "PolyFourierSum":
        return self * (1.0 / complex(other))

    def __pow__(self, n: int) -> "PolyFourierSum":
        if n < 0:
            raise ValueError("negative powers are not in the ring")
        out = PolyFourierSum.constant(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "PolyFourierSum(0)"
        parts = []
        for t in self.terms:
            s = f"({t.coeff:.6g})"
            if t.power:
                s += f"*x**{t.power}"
            if t.freq != 0:
                s += f"*exp(({t.freq:.6g})*x)"
            parts.append(s)
        return "PolyFourierSum(" + " + ".join(parts) + ")"

    # calculus
    def derivative(self) -> "PolyFourierSum":
        out = []
        for t in self.terms:
            if t.power:
                out.append(PolyFourierTerm(t.coeff * t.power, t.power - 1, t.freq))
            if t.freq != 0:
                out.append(PolyFourierTerm(t.coeff * t.freq, t.power, t.freq))
        return PolyFourierSum(out)

    def antiderivative(self) -> "PolyFourierSum":
        """Antiderivative vanishing at x = 0."""
        out = []
        for t in self.terms:
            if _same_rate(t.freq, 0):
                out.append(PolyFourierTerm(t.coeff / (t.power + 1), t.power + 1, 0j))
                continue
            nu, m = t.freq, t.power
            # int x^m e^{nu x} = e^{nu x} sum_j (-1)^j m!/(m-j)! x^(m-j) / nu^(j+1)
            for j in range(m + 1):
                c = t.coeff * (-1) ** j * math.factorial(m) / math.factorial(m - j) / nu ** (j + 1)
                out.append(PolyFourierTerm(c, m - j, nu))
            # value at 0 comes from the j = m term
            out.append(PolyFourierTerm(-t.coeff * (-1) ** m * math.factorial(m) / nu ** (m + 1), 0, 0j))
        return PolyFourierSum(out)

    def shift(self, h: Number) -> "PolyFourierSum":
        """g(x) = P(x + h)."""
        h = complex(h)
        if h == 0:
            return self
        out = []
        for t in self.terms:
            scale = t.coeff * cmath.exp(t.freq * h)
            for j in range(t.power + 1):
                out.append(PolyFourierTerm(scale * math.comb(t.power, j) * h ** (t.power - j), j, t.freq))
        return PolyFourierSum(out)

    def rescale(self, k: Number) -> "PolyFourierSum":
        """g(x) = P(k x)."""
        k = complex(k)
        return PolyFourierSum([PolyFourierTerm(t.coeff * k ** t.power, t.power, t.freq * k) for t in self.terms])

    # evaluation and inspection
    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for t in self.terms:
            out = out + t.coeff * z ** t.power * np.exp(t.freq * z)
        return out

    __call__ = evaluate

    def is_polynomial(self) -> bool:
        return all(_same_rate(t.freq, 0) for t in self.terms)

    def poly_coeffs(self) -> np.ndarray:
        """Ascending coefficient array; raises for non-polynomial sums."""
        if not self.is_polynomial():
            raise ValueError("sum has Fourier/exponential modes; not a polynomial")
        if not self.terms:
            return np.zeros(1, dtype=complex)
        out = np.zeros(max(t.power for t in self.terms) + 1, dtype=complex)
        for t in self.terms:
            out[t.power] += t.coeff
        return out

    def max_abs_coeff(self) -> float:
        return max((abs(t.coeff) for t in self.terms), default=0.0)

    def is_zero(self, tol: float = 1e-10) -> bool:
        return self.max_abs_coeff() < tol

    def split_exponent(self) -> tuple[complex, complex, complex, dict]:
        """Read the sum as an exponent ``a x^2 + b x + c + sum d exp(nu x)``.

        Only powers <= 2 with zero rate and power-0 terms with nonzero rate
        are allowed.
        """
        a = b = c = 0j
        modes: dict = {}
        for t in self.terms:
            if _same_rate(t.freq, 0):
                if t.power == 0:
                    c += t.coeff
                elif t.power == 1:
                    b += t.coeff
                elif t.power == 2:
                    a += t.coeff
                else:
                    raise ValueError("exponent has power > 2")
            elif t.power == 0:
                modes[t.freq] = modes.get(t.freq, 0j) + t.coeff
            else:
                raise ValueError("exponent has x^m exp(nu x) term with m > 0")
        return a, b, c, modes

    def to_json(self) -> list:
        return [
            {"re": t.coeff.real, "im": t.coeff.imag, "power": t.power,
             "freq_re": t.freq.real, "freq_im": t.freq.imag}
            for t in self.terms
        ]

    @classmethod
    def from_json(cls, data: list) -> "PolyFourierSum":
        return cls([
            PolyFourierTerm(complex(d["re"], d["im"]), int(d["power"]),
                            complex(d.get("freq_re", 0.0), d.get("freq_im", 0.0)))
            for d in data
        ])


def _canonical_modes(modes) -> tuple[tuple[complex, complex], ...]:
    """Merge close rates, drop zero amplitudes; zero rate handled by caller."""
    items = modes.items() if isinstance(modes, Mapping) else modes
    merged: list[list[complex]] = []
    for fr, amp in items:
        fr, amp = complex(fr), complex(amp)
        for m in merged:
            if _same_rate(m[0], fr):
                m[1] += amp
                break
        else:
            merged.append([fr, amp])
    merged = [m for m in merged if m[1] != 0]
    merged.sort(key=lambda m: (m[0].real, m[0].imag))
    return tuple((f, a) for f, a in merged)


def _split_zero_mode(modes) -> tuple[complex, tuple]:
    const = 0j
    rest = []
    for fr, amp in _canonical_modes(modes):
        if _same_rate(fr, 0):
            const += amp
        else:
            rest.append((fr, amp))
    return const, tuple(rest)


@dataclass(frozen=True)
class ExpClassFunction:
    """One block ``P(x) exp(a x^2 + b x + c + sum d exp(nu x))``."""

    prefactor: PolyFourierSum = field(default_factory=lambda: PolyFourierSum.constant(1.0))
    quad: complex = 0j
    lin: complex = 0j
    const: complex = 0j
    modes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "quad", complex(self.quad))
        object.__setattr__(self, "lin", complex(self.lin))
        zc, modes = _split_zero_mode(self.modes)
        object.__setattr__(self, "const", complex(self.const) + zc)
        object.__setattr__(self, "modes", modes)
        for v in (self.quad, self.lin, self.const, *(a for _, a in modes), *(f for f, _ in modes)):
            if not cmath.isfinite(v):
                raise ValueError("non-finite field in ExpClassFunction")

    @classmethod
    def one(cls) -> "ExpClassFunction":
        return cls()

    @classmethod
    def zero(cls) -> "ExpClassFunction":
        return cls(prefactor=PolyFourierSum())

    @classmethod
    def exp_of(cls, exponent: PolyFourierSum, prefactor: PolyFourierSum | None = None) -> "ExpClassFunction":
        a, b, c, modes = exponent.split_exponent()
        return cls(prefactor if prefactor is not None else PolyFourierSum.constant(1.0), a, b, c, modes)

    @property
    def mode_dict(self) -> dict:
        return dict(self.modes)

    def exponent(self, z):
        z = np.asarray(z, dtype=complex)
        e = self.quad * z * z + self.lin * z + self.const
        for fr, amp in self.modes:
            e = e + amp * np.exp(fr * z)
        return e

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        # overflow inside the exponent is reported below as NonFiniteResult
        with np.errstate(over="ignore", invalid="ignore"):
            e = self.exponent(z)
            p = self.prefactor.evaluate(z)
        with np.errstate(divide="ignore"):
            logmag = np.real(e) + np.log(np.abs(p))
        if np.any(~np.isfinite(e)) or np.any(~np.isfinite(p)):
            raise NonFiniteResult(math.inf)
        worst = np.max(logmag) if logmag.size else -math.inf
        if worst > _LOG_OVERFLOW:
            raise NonFiniteResult(worst)
        return p * np.exp(e)

    __call__ = evaluate

    # algebra
    def scale(self, c: Number) -> "ExpClassFunction":
        return ExpClassFunction(self.prefactor * complex(c), self.quad, self.lin, self.const, self.modes)

    def multiply(self, other: "ExpClassFunction") -> "ExpClassFunction":
        return ExpClassFunction(
            self.prefactor * other.prefactor,
            self.quad + other.quad,
            self.lin + other.lin,
            self.const + other.const,
            self.modes + other.modes,
        )

    def mul_poly(self, poly: PolyFourierSum) -> "ExpClassFunction":
        return ExpClassFunction(self.prefactor * poly, self.quad, self.lin, self.const, self.modes)

    def mul_exp(self, quad: Number = 0, lin: Number = 0, modes=(), const: Number = 0) -> "ExpClassFunction":
        modes = modes.items() if isinstance(modes, Mapping) else modes
        return ExpClassFunction(
            self.prefactor, self.quad + quad, self.lin + lin, self.const + const, self.modes + tuple(modes)
        )

    def differentiate(self) -> "ExpClassFunction":
        inner = PolyFourierSum(
            [PolyFourierTerm(2 * self.quad, 1), PolyFourierTerm(self.lin, 0)]
            + [PolyFourierTerm(fr * amp, 0, fr) for fr, amp in self.modes]
        )
        return ExpClassFunction(
            self.prefactor.derivative() + self.prefactor * inner,
            self.quad, self.lin, self.const, self.modes,
        )

    def shift(self, h: Number) -> "ExpClassFunction":
        h = complex(h)
        if h == 0:
            return self
        a, b = self.quad, self.lin
        return ExpClassFunction(
            self.prefactor.shift(h),
            a,
            b + 2 * a * h,
            self.const + a * h * h + b * h,
            tuple((fr, amp * cmath.exp(fr * h)) for fr, amp in self.modes),
        )

    def rescale(self, k: Number) -> "ExpClassFunction":
        """g(x) = f(k x)."""
        k = complex(k)
        return ExpClassFunction(
            self.prefactor.rescale(k), self.quad * k * k, self.lin * k, self.const,
            tuple((fr * k, amp) for fr, amp in self.modes),
        )

    def compatible(self, other: "ExpClassFunction") -> bool:
        """Same quadratic coefficient and exponent modes, so the two merge into one block."""
        if abs(self.quad - other.quad) > FREQ_TOL or len(self.modes) != len(other.modes):
            return False
        for (f1, a1), (f2, a2) in zip(self.modes, other.modes):
            if not _same_rate(f1, f2) or abs(a1 - a2) > FREQ_TOL * max(1.0, abs(a1)):
                return False
        return True

    def absorb(self, other: "ExpClassFunction") -> "ExpClassFunction":
        """Sum with a compatible block; lin/const differences move into the prefactor."""
        dlin = other.lin - self.lin
        dconst = other.const - self.const
        moved = PolyFourierSum(
            [PolyFourierTerm(t.coeff * cmath.exp(dconst), t.power, t.freq + dlin) for t in other.prefactor]
        )
        return ExpClassFunction(self.prefactor + moved, self.quad, self.lin, self.const, self.modes)

    # arithmetic sugar returning sums
    def __add__(self, other):
        return ExpClassSum.of(self) + other

    __radd__ = __add__

    def __sub__(self, other):
        return ExpClassSum.of(self) - other

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        if isinstance(other, ExpClassFunction):
            return self.multiply(other)
        if isinstance(other, PolyFourierSum):
            return self.mul_poly(other)
        if isinstance(other, ExpClassSum):
            return ExpClassSum.of(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "prefactor": self.prefactor.to_json(),
            "quad": {"re": self.quad.real, "im": self.quad.imag},
            "lin": {"re": self.lin.real, "im": self.lin.imag},
            "const": {"re": self.const.real, "im": self.const.imag},
            "modes": [
                {"freq_re": f.real, "freq_im": f.imag, "amp_re": a.real, "amp_im": a.imag}
                for f, a in self.modes
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExpClassFunction":
        c = lambda d: complex(d["re"], d["im"])  # noqa: E731
        return cls(
            PolyFourierSum.from_json(data["prefactor"]),
            c(data["quad"]), c(data["lin"]), c(data["const"]),
            tuple((complex(m["freq_re"], m["freq_im"]), complex(m["amp_re"], m["amp_im"])) for m in data["modes"]),
        )


class ExpClassSum:
    """Linear combination of :class:`ExpClassFunction` blocks.

    Compatible blocks (same quadratic coefficient and exponent modes) are
    merged on construction, so e.g. ladder-operator images of a single block
    with no exponent modes stay a single block.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable[ExpClassFunction] = ()):
        merged: list[ExpClassFunction] = []
        for blk in blocks:
            for i, m in enumerate(merged):
                if m.compatible(blk):
                    merged[i] = m.absorb(blk)
                    break
            else:
                merged.append(blk)
        self.blocks: tuple[ExpClassFunction, ...] = tuple(b for b in merged if len(b.prefactor))

    @staticmethod
    def of(f) -> "ExpClassSum":
        if isinstance(f, ExpClassSum):
            return f
        if isinstance(f, ExpClassFunction):
            return ExpClassSum([f])
        if isinstance(f, (int, float, complex, np.number)):
            return ExpClassSum([ExpClassFunction.one().scale(f)])
        raise TypeError(f"cannot use {type(f).__name__} as an exp-class function")

    def map(self, fn) -> "ExpClassSum":
        return ExpClassSum(fn(b) for b in self.blocks)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for b in self.blocks:
            out = out + b.evaluate(z)
        return out

    __call__ = evaluate

    def single(self) -> ExpClassFunction:
        """The sole block (zero if empty); raises if there are several."""
        if not self.blocks:
            return ExpClassFunction.zero()
        if len(self.blocks) > 1:
            raise ValueError(f"sum has {len(self.blocks)} incompatible blocks")
        return self.blocks[0]

    def __add__(self, other):
        try:
            other = ExpClassSum.of(other)
        except TypeError:
            return NotImplemented
        return ExpClassSum(self.blocks + other.blocks)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda b: b.scale(-1))

    def __sub__(self, other):
        return self + (-ExpClassSum.of(other))

    def __rsub__(self, other):
        return ExpClassSum.of(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.map(lambda b: b.scale(other))
        if isinstance(other, PolyFourierSum):
            return self.map(lambda b: b.mul_poly(other))
        try:
            other = ExpClassSum.of(other)
        except TypeError:
            return NotImplemented
        return ExpClassSum(a.multiply(b) for a in self.blocks for b in other.blocks)

    __rmul__ = __mul__

    def __len__(self):
        return len(self.blocks)

    def __repr__(self):
        return f"ExpClassSum({len(self.blocks)} blocks)"

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict) -> "ExpClassSum":
        return cls(ExpClassFunction.from_json(b) for b in data["blocks"])


ExpLike = Union[ExpClassFunction, ExpClassSum]


def _lift(f, op):
    if isinstance(f, ExpClassFunction):
        return op(f)
    return ExpClassSum.of(f).map(op)


def evaluate(f: ExpLike, z):
    return f.evaluate(z)


def multiply(f: ExpLike, g: ExpLike) -> ExpLike:
    if isinstance(f, ExpClassFunction) and isinstance(g, ExpClassFunction):
        return f.multiply(g)
    return ExpClassSum.of(f) * ExpClassSum.of(g)


def differentiate(f: ExpLike) -> ExpLike:
    return _lift(f, lambda b: b.differentiate())


def shift(f: ExpLike, h: Number) -> ExpLike:
    return _lift(f, lambda b: b.shift(h))


def rescale(f: ExpLike, k: Number) -> ExpLike:
    return _lift(f, lambda b: b.rescale(k))


def mul_exp(f: ExpLike, quad: Number = 0, lin: Number = 0, modes=(), const: Number = 0) -> ExpLike:
    modes = tuple(modes.items() if isinstance(modes, Mapping) else modes)
    return _lift(f, lambda b: b.mul_exp(quad, lin, modes, const))


def mul_poly(f: ExpLike, poly: PolyFourierSum) -> ExpLike:
    return _lift(f, lambda b: b.mul_poly(poly))


SAMPLE_SEED = 20240917


def sample_points(n_real: int = 21, n_complex: int = 8, seed: int = SAMPLE_SEED) -> np.ndarray:
    """Fixed point set used for evaluation-based equality."""
    rng = np.random.default_rng(seed)
    real = np.linspace(-np.pi, np.pi, n_real).astype(complex)
    cplx = rng.uniform(-2, 2, n_complex) + 1j * rng.uniform(-1, 1, n_complex)
    return np.concatenate([real, cplx])


def equal_by_evaluation(f: ExpLike, g: ExpLike, rtol: float = 1e-10, points=None) -> bool:
    pts = sample_points() if points is None else np.asarray(points, dtype=complex)
    fv, gv = f.evaluate(pts), g.evaluate(pts)
    scale = max(1.0, float(np.max(np.abs(fv))), float(np.max(np.abs(gv))))
    return bool(np.max(np.abs(fv - gv)) <= rtol * scale)


def random_function(
    rng: np.random.Generator,
    max_terms: int = 8,
    coeff_bound: float = 2.0,
    max_power: int = 3,
    with_modes: bool = True,
) -> ExpClassFunction:
    """Random class member of moderate size on the window [-3, 3].

    Prefactor plus mode count is at most ``max_terms``; all coefficients and
    amplitudes have modulus at most ``coeff_bound``.
    """

    def cz(bound):
        r = bound * math.sqrt(rng.uniform(0, 1))
        return r * cmath.exp(1j * rng.uniform(-math.pi, math.pi))

    n_modes = int(rng.integers(0, 3)) if with_modes else 0
    n_pref = int(rng.integers(1, max(2, max_terms - n_modes) + 1))
    terms = [
        PolyFourierTerm(cz(coeff_bound), int(rng.integers(0, max_power + 1)), 1j * rng.uniform(-2, 2))
        for _ in range(n_pref)
    ]
    quad = -rng.uniform(0.1, 0.5) + 1j * rng.uniform(-0.2, 0.2)
    lin = cz(1.0)
    const = cz(0.5)
    modes = tuple((1j * rng.uniform(-2, 2), cz(0.5)) for _ in range(n_modes))
    return ExpClassFunction(PolyFourierSum(terms), quad, lin, const, modes)
