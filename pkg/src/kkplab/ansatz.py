"""Exact tanh-method calculus for the travelling-wave ODE.

Everything here runs on ``fractions.Fraction``; no floating point enters a
residual.  A profile is a polynomial in T = tanh(m xi).  Since
dT/dxi = m (1 - T^2), the k-th derivative of P(T) is m^k (D^k P)(T) with the
m-free operator D P = (1 - T^2) P'.  The third-order ODE only involves
products whose derivative counts add up to an even number, so m enters
through m^2 alone and every expression stays in Q[T].
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TanhPoly:
    """Polynomial in T with rational coefficients, lowest power first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, a) -> "TanhPoly":
        return cls([a])

    @classmethod
    def monomial(cls, n: int, a=1) -> "TanhPoly":
        return cls([0] * n + [a])

    @classmethod
    def sech2_power(cls, k: int, a=1) -> "TanhPoly":
        """a * sech^(2k) = a * (1 - T^2)^k."""
        return cls.constant(a) * ONE_MINUS_T2 ** k

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TanhPoly):
            other = TanhPoly.constant(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, TanhPoly):
            other = TanhPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return TanhPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return TanhPoly([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TanhPoly):
            k = _frac(other)
            return TanhPoly([k * a for a in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return TanhPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return TanhPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = TanhPoly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def dT(self) -> "TanhPoly":
        return TanhPoly([i * a for i, a in enumerate(self.coeffs)][1:])

    def dxi_scaled(self) -> "TanhPoly":
        """(1 - T^2) dP/dT, i.e. d/dxi with the factor m removed."""
        return ONE_MINUS_T2 * self.dT()

    def __call__(self, T):
        out = 0 * T
        for a in reversed(self.coeffs):
            out = out * T + (a if isinstance(T, Fraction) else float(a))
        return out

    def __repr__(self):
        return f"TanhPoly({self.to_terms()})"

    def to_terms(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if i and abs(a) == 1:
                coef = "-" if a < 0 else "+"
            else:
                coef = f"{'+' if a > 0 else '-'}{abs(a)}" + ("*" if mono else "")
            parts.append(coef + mono)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


ONE_MINUS_T2 = TanhPoly([1, 0, -1])


class OddMPowerError(ValueError):
    pass


def _scaled_derivative(poly: TanhPoly, order: int) -> TanhPoly:
    for _ in range(order):
        poly = poly.dxi_scaled()
    return poly


def tanh_derivative(poly: TanhPoly, m2, order: int) -> TanhPoly:
    """d^order/dxi^order of poly(tanh(m xi)) for even *order*."""
    if order < 0:
        raise ValueError("negative derivative order")
    if order % 2:
        raise OddMPowerError("odd m power; pair derivatives")
    return _frac(m2) ** (order // 2) * _scaled_derivative(poly, order)


def derivative_product(a: TanhPoly, i: int, b: TanhPoly, j: int, m2) -> TanhPoly:
    """a^(i) * b^(j) in xi, for i + j even (so that only m^2 appears)."""
    if (i + j) % 2:
        raise OddMPowerError("odd m power; pair derivatives")
    return _frac(m2) ** ((i + j) // 2) * (_scaled_derivative(a, i) * _scaled_derivative(b, j))


# Degree balancing

def term_degree(derivative_orders: Sequence[int]) -> tuple[int, int]:
    """Degree in T of a product of derivatives of a degree-n polynomial.

    Each factor U^(k) has degree n + k, so the product has degree
    (number of factors) * n + sum(k).  Returned as (slope, offset) in n.
    """
    return len(derivative_orders), sum(derivative_orders)


def balance_degree(nonlinear: Sequence[int] = (0, 0, 0), dispersive: Sequence[int] = (1, 3)) -> int:
    """Solve degree(nonlinear term) = degree(dispersive term) for n.

    The defaults are U^3 against U'U''' for the third-order ODE, giving n = 4.
    """
    a1, b1 = term_degree(nonlinear)
    a2, b2 = term_degree(dispersive)
    if a1 == a2:
        raise ValueError("no positive balance: term degrees grow at the same rate in n")
    n = Fraction(b2 - b1, a1 - a2)
    if n.denominator != 1 or n <= 0:
        raise ValueError(f"no positive balance: n = {n}")
    return int(n)


# Ansatz instances

@dataclass(frozen=True)
class AnsatzInstance:
    """U = a0 + a1 sech^2(m xi) + a2 sech^4(m xi) with m^2 = m2."""

    m2: Fraction
    a0_t: Fraction
    a1_t: Fraction
    a2_t: Fraction
    kappa: Fraction
    beta: Fraction
    C1: Fraction | None = None
    C2: Fraction | None = None

    def __post_init__(self):
        for name in ("m2", "a0_t", "a1_t", "a2_t", "kappa", "beta", "C1", "C2"):
            val = getattr(self, name)
            if val is not None and not isinstance(val, Fraction):
                object.__setattr__(self, name, Fraction(val))

    def u_poly(self) -> TanhPoly:
        return (TanhPoly.constant(self.a0_t)
                + TanhPoly.sech2_power(1, self.a1_t)
                + TanhPoly.sech2_power(2, self.a2_t))

    @property
    def background(self) -> Fraction:
        """U at T = +-1, the |xi| -> infinity limit."""
        return self.a0_t

    def with_constants(self, C1=None, C2=None) -> "AnsatzInstance":
        if C1 is None or C2 is None:
            C1, C2 = derive_constants(self)
        return replace(self, C1=_frac(C1), C2=_frac(C2))


def family_instance(beta, kappa, *, depth_factor=105, background_factor=36) -> AnsatzInstance:
    """The sech^4 family member for (beta, kappa), constants derived.

    (2m)^2 = -beta/13, a0 = kappa + 36 (2m)^4, a1 = 0, a2 = -105 (2m)^4.
    The factors can be altered to build deliberately wrong instances.
    """
    beta, kappa = _frac(beta), _frac(kappa)
    if beta >= 0:
        raise ValueError("the sech family requires beta < 0")
    w4 = (beta / 13) ** 2  # (2m)^4
    inst = AnsatzInstance(m2=-beta / 52, a0_t=kappa + background_factor * w4, a1_t=0,
                          a2_t=-depth_factor * w4, kappa=kappa, beta=beta)
    return inst.with_constants()


def derive_constants(instance: AnsatzInstance) -> tuple[Fraction, Fraction]:
    """Integration constants forced by the |xi| -> infinity limit.

    With U -> p and all derivatives -> 0, the fourth-order ODE gives
    C1 = p^2/2 - kappa p and the third-order one C2 = p^3/6 - kappa p^2/2 - C1 p.
    """
    p, kappa = instance.background, instance.kappa
    C1 = p * p / 2 - kappa * p
    C2 = p ** 3 / 6 - kappa * p * p / 2 - C1 * p
    return C1, C2


def reference_constants(beta, kappa) -> tuple[Fraction, Fraction]:
    """The reference constants, kept for comparison with the derived ones.

    C1 = (kappa - 36 w)(kappa + 36 w)/2,  C2 = (kappa - 72 w)(kappa + 36 w)/6,
    with w = (2m)^4 = (beta/13)^2.
    """
    beta, kappa = _frac(beta), _frac(kappa)
    w = (beta / 13) ** 2
    return (kappa - 36 * w) * (kappa + 36 * w) / 2, (kappa - 72 * w) * (kappa + 36 * w) / 6


def ode3_residual(instance: AnsatzInstance) -> TanhPoly:
    """(1/6)U^3 - (1/2)k U^2 + (1/2)b U'^2 + U'U''' - (1/2)U''^2 - C1 U - C2 in T."""
    if instance.C1 is None or instance.C2 is None:
        raise ValueError("instance has no integration constants; use with_constants()")
    U, m2 = instance.u_poly(), instance.m2
    half = Fraction(1, 2)
    return (Fraction(1, 6) * U ** 3
            - half * instance.kappa * U * U
            + half * instance.beta * derivative_product(U, 1, U, 1, m2)
            + derivative_product(U, 1, U, 3, m2)
            - half * derivative_product(U, 2, U, 2, m2)
            - instance.C1 * U
            - TanhPoly.constant(instance.C2))


def ode4_residual(instance: AnsatzInstance) -> TanhPoly:
    """(1/2)U^2 - k U + b U'' + U'''' - C1 in T."""
    U, m2 = instance.u_poly(), instance.m2
    return (Fraction(1, 2) * U * U - instance.kappa * U + instance.beta * tanh_derivative(U, m2, 2)
            + tanh_derivative(U, m2, 4) - TanhPoly.constant(instance.C1))


# Family certification

# Coefficient degrees of the residual in (beta, kappa): at most 8 and 3.
BETA_DEGREE_BOUND = 8
KAPPA_DEGREE_BOUND = 3


@dataclass
class SampleResult:
    beta: Fraction
    kappa: Fraction
    residual: TanhPoly
    C1: Fraction
    C2: Fraction
    reference_C1: Fraction
    reference_C2: Fraction
    reference_residual: TanhPoly

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()


@dataclass
class FamilyReport:
    samples: list[SampleResult] = field(default_factory=list)
    depth_factor: int = 105
    background_factor: int = 36

    @property
    def passed(self) -> bool:
        return bool(self.samples) and all(s.passed for s in self.samples)

    @property
    def failures(self) -> list[SampleResult]:
        return [s for s in self.samples if not s.passed]

    @property
    def constants_discrepancies(self) -> list[SampleResult]:
        return [s for s in self.samples if (s.C1, s.C2) != (s.reference_C1, s.reference_C2)]

    def lines(self) -> list[str]:
        out = [
            "sech^4 family: U = p - q sech^4(m xi), (2m)^2 = -beta/13, "
            f"p = kappa + {self.background_factor}(2m)^4, q = {self.depth_factor}(2m)^4",
            "integration constants derived from the |xi|->inf limit:",
            "  C1 = p^2/2 - kappa p           = -(kappa - 36(2m)^4)(kappa + 36(2m)^4)/2",
            "  C2 = p^3/6 - kappa p^2/2 - C1 p = (kappa - 72(2m)^4)(kappa + 36(2m)^4)^2/6",
            "reference constants: C1 = (kappa - 36(2m)^4)(kappa + 36(2m)^4)/2, "
            "C2 = (kappa - 72(2m)^4)(kappa + 36(2m)^4)/6",
        ]
        ndisc = len(self.constants_discrepancies)
        if ndisc:
            bad_reference = sum(1 for s in self.constants_discrepancies if not s.reference_residual.is_zero())
            out.append(
                f"DISCREPANCY: reference C1/C2 differ from the derived values at {ndisc} of "
                f"{len(self.samples)} samples (sign of C1, missing factor (kappa + 36(2m)^4) in C2); "
                f"with the reference constants the residual is nonzero at {bad_reference} samples")
        else:
            out.append("reference C1/C2 agree with the derived values at every sample")
        for s in self.samples:
            status = "PASS" if s.passed else "FAIL"
            line = f"{status} beta={s.beta} kappa={s.kappa} C1={s.C1} C2={s.C2}"
            if not s.passed:
                line += f" residual={s.residual.to_terms()}"
            out.append(line)
        verdict = "PASS" if self.passed else "FAIL"
        out.append(f"{verdict}: {sum(s.passed for s in self.samples)}/{len(self.samples)} samples "
                   "give the zero polynomial")
        return out


def verify_family(beta_samples: Sequence, kappa_samples: Sequence, *,
                  depth_factor=105, background_factor=36,
                  require_degree_bounds: bool = True) -> FamilyReport:
    """Check the third-order ODE exactly on a (beta, kappa) grid.

    The residual coefficients are polynomials of degree <= 8 in beta and
    <= 3 in kappa, so vanishing on 9 x 4 distinct values proves the identity
    for every beta < 0 and kappa.
    """
    betas = sorted({_frac(b) for b in beta_samples})
    kappas = sorted({_frac(k) for k in kappa_samples})
    if any(b >= 0 for b in betas):
        raise ValueError("beta samples must be negative")
    if require_degree_bounds and (len(betas) <= BETA_DEGREE_BOUND or len(kappas) <= KAPPA_DEGREE_BOUND):
        raise ValueError(
            f"need at least {BETA_DEGREE_BOUND + 1} distinct beta and "
            f"{KAPPA_DEGREE_BOUND + 1} distinct kappa samples (got {len(betas)}, {len(kappas)})")
    report = FamilyReport(depth_factor=depth_factor, background_factor=background_factor)
    for beta, kappa in itertools.product(betas, kappas):
        inst = family_instance(beta, kappa, depth_factor=depth_factor,
                               background_factor=background_factor)
        pC1, pC2 = reference_constants(beta, kappa)
        report.samples.append(SampleResult(
            beta=beta, kappa=kappa, residual=ode3_residual(inst), C1=inst.C1, C2=inst.C2,
            reference_C1=pC1, reference_C2=pC2,
            reference_residual=ode3_residual(inst.with_constants(pC1, pC2))))
    return report


DEFAULT_BETAS = tuple(Fraction(-k) for k in range(1, 10))
DEFAULT_KAPPAS = (Fraction(-2), Fraction(-1), Fraction(1), Fraction(3))


# Rescaled ODE and its linear operator

@dataclass
class RescaledReport:
    profile: TanhPoly
    residual: TanhPoly
    speed: Fraction
    proportional_to_profile: Fraction | None

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def lines(self) -> list[str]:
        op = "(1/1680)U'''' - (13/420)U''"
        if self.speed:
            op += f" + ({self.speed})U"
        out = [f"rescaled ODE {op} - U^2/2 = 0 with U = {self.profile.to_terms()} (T = tanh xi)"]
        if self.passed:
            out.append("PASS: residual is the zero polynomial")
        else:
            out.append(f"FAIL: residual = {self.residual.to_terms()}")
            if self.proportional_to_profile is not None:
                out.append(f"  residual = ({self.proportional_to_profile}) * U; the identity holds "
                           f"once the speed term ({-self.proportional_to_profile + self.speed})U is "
                           "included in the operator")
        return out


def _ratio_if_multiple(a: TanhPoly, b: TanhPoly) -> Fraction | None:
    if b.is_zero() or a.degree != b.degree:
        return None
    k = a.coeffs[-1] / b.coeffs[-1]
    return k if (a - k * b).is_zero() else None


def rescaled_ode_check(profile: TanhPoly | None = None, speed=0) -> RescaledReport:
    """Residual of (1/1680)U'''' - (13/420)U'' + speed*U - U^2/2 with m = 1.

    The default profile is sech^4(xi) = (1 - T^2)^2.
    """
    U = TanhPoly.sech2_power(2) if profile is None else profile
    speed = _frac(speed)
    residual = (Fraction(1, 1680) * tanh_derivative(U, 1, 4)
                - Fraction(13, 420) * tanh_derivative(U, 1, 2)
                + speed * U
                - Fraction(1, 2) * U * U)
    return RescaledReport(U, residual, speed, _ratio_if_multiple(residual, U))


def fourier_symbol(k, speed=0):
    """Symbol k^4/1680 + 13 k^2/420 + speed of the rescaled linear operator."""
    if isinstance(k, (Fraction, int)):
        k = _frac(k)
        return k ** 4 / 1680 + Fraction(13, 420) * k ** 2 + _frac(speed)
    return k ** 4 / 1680.0 + 13.0 * k ** 2 / 420.0 + float(speed)


@dataclass
class SymbolReport:
    samples: list
    values: list
    minimum: object
    symbol_at_zero: object

    @property
    def passed(self) -> bool:
        return all(v > 0 for v in self.values)


def fourier_symbol_positivity(k_samples: Sequence, speed=0) -> SymbolReport:
    ks = list(k_samples)
    if any(k == 0 for k in ks):
        raise ValueError("k samples must be nonzero")
    values = [fourier_symbol(k, speed) for k in ks]
    zero = fourier_symbol(Fraction(0), speed)
    return SymbolReport(ks, values, min(values), zero)
