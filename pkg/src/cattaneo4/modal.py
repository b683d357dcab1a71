"""Per-mode closed-form solutions of the fourth-order Cattaneo equation.

Expanding in Dirichlet eigenfunctions turns theta'' = -a theta' + b d_xx theta
- c d_xx theta'' into one scalar ODE per mode,

    (1 - c lam2) theta_n'' + a theta_n' + b lam2 theta_n = 0,

with lam2 = lambda_n^2 > 0.  For 1 - c lam2 != 0 this is second order with
characteristic roots

    r_pm = (-a +/- delta) / (2 (1 - c lam2)),

delta = sqrt(a^2 - 4 b lam2 (1 - c lam2)); the sign of the discriminant picks
real-distinct, double-root, or complex-pair behaviour.  At c = 1/lam2 the
order drops: a theta' + b lam2 theta = 0, which is solvable iff the data
satisfy the compatibility condition beta/alpha = -(b/a) lam2, and then
theta_n(t) = alpha exp(-(b lam2 / a) t).

Root formulas are arranged to avoid cancellation: r_plus is computed as
-2 b lam2 / (a + delta), which is exact in the limit delta -> a where the
naive (-a + delta) form loses all digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateModeError, UnsolvableModeError
from .util import LOG_SATURATION, exp_term, log_abs_exp_sum


@dataclass(frozen=True)
class ParameterSet:
    """Coefficients (a, b, c) of the normalized equation, all positive.

    When built from the physical triple (chi, sigma, gamma_rho) the map is

        a = chi / sigma,  b = chi^2 / (sigma gamma_rho),  c = sigma / gamma_rho,

    and the identity b * sigma * gamma_rho = chi^2 ties the forms together.
    ``sigma_form`` keeps the sigma-scaled equation
    sigma theta'' + a theta' = b d_xx theta - sigma^2 c d_xx theta''
    parameterized by sigma through ``at_sigma``.
    """

    a: float
    b: float
    c: float
    chi: float | None = None
    sigma: float | None = None
    gamma_rho: float | None = None
    map_tag: str | None = None

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")
        if self.map_tag not in (None, "m1", "m2"):
            raise ValueError("map_tag must be None, 'm1' or 'm2'")
        if self.map_tag == "m1":
            chi, sig, gr = self.chi, self.sigma, self.gamma_rho
            if None in (chi, sig, gr):
                raise ValueError("m1-mapped set needs the full physical triple")
            if abs(self.b * sig * gr - chi * chi) > 1e-9 * chi * chi:
                raise ValueError("physical triple inconsistent with (a, b, c)")

    @classmethod
    def from_physical(cls, chi: float, sigma: float, gamma_rho: float) -> "ParameterSet":
        for name, v in (("chi", chi), ("sigma", sigma), ("gamma_rho", gamma_rho)):
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")
        return cls(a=chi / sigma, b=chi * chi / (sigma * gamma_rho),
                   c=sigma / gamma_rho, chi=chi, sigma=sigma,
                   gamma_rho=gamma_rho, map_tag="m1")

    @classmethod
    def sigma_form(cls, chi: float, gamma_rho: float) -> "ParameterSet":
        """Sigma-scaled form: holds (a, b, c) = (chi, chi^2/gr, 1/gr)."""
        for name, v in (("chi", chi), ("gamma_rho", gamma_rho)):
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")
        return cls(a=chi, b=chi * chi / gamma_rho, c=1.0 / gamma_rho,
                   chi=chi, gamma_rho=gamma_rho, map_tag="m2")

    def at_sigma(self, sigma: float) -> "ParameterSet":
        """Normalize the sigma-form equation at a concrete sigma."""
        if self.map_tag != "m2":
            raise ValueError("at_sigma applies to sigma-form parameter sets")
        return ParameterSet.from_physical(self.chi, sigma, self.gamma_rho)


@dataclass(frozen=True)
class ModalInitialData:
    """Initial value and rate of one mode: theta_n(0), theta_n'(0)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("modal data must be finite")


@dataclass(frozen=True)
class CompatibilityReport:
    """Outcome of the degenerate-mode compatibility check beta/alpha = -(b/a) lam2."""

    required_ratio: float
    actual_ratio: float | None
    satisfied: bool
    tolerance: float
    mode_index: int | None = None


@dataclass(frozen=True)
class CharacteristicRoots:
    """Roots of the per-mode characteristic polynomial, tagged by regime."""

    kind: str  # 'real_distinct' | 'double' | 'complex_pair'
    mu_plus: complex
    mu_minus: complex

    @property
    def r_plus(self) -> float:
        return self.mu_plus.real

    @property
    def r_minus(self) -> float:
        return self.mu_minus.real

    @property
    def decay(self) -> float:
        return self.mu_plus.real

    @property
    def frequency(self) -> float:
        return abs(self.mu_plus.imag)


@dataclass(frozen=True)
class RealDistinct:
    """theta(t) = A exp(r_plus t) + B exp(r_minus t)."""

    A: float
    B: float
    r_plus: float
    r_minus: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class ComplexPair:
    """theta(t) = amplitude exp(decay t) cos(frequency t + phase)."""

    amplitude: float
    decay: float
    frequency: float
    phase: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class DoubleRoot:
    """theta(t) = (A + B t) exp(r t)."""

    A: float
    B: float
    r: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class FirstOrder:
    """Degenerate mode: theta(t) = alpha exp(rate t), rate = -(b/a) lam2."""

    alpha: float
    rate: float


ModalSolution = RealDistinct | ComplexPair | DoubleRoot | FirstOrder


@dataclass(frozen=True)
class ModeValue:
    """Value and time derivative of one mode, with a saturation flag."""

    value: float
    derivative: float
    saturated: bool = False


def mode_ode_coefficients(p: ParameterSet, lambda_sq: float) -> tuple[float, float, float]:
    """(leading, damping, stiffness) of the per-mode ODE."""
    if not lambda_sq > 0.0:
        raise ValueError("lambda_sq must be positive")
    return 1.0 - p.c * lambda_sq, p.a, p.b * lambda_sq


def default_degenerate_tol(p: ParameterSet, lambda_sq: float) -> float:
    return 1e-12 * max(1.0, p.c * lambda_sq)


def discriminant_delta(p: ParameterSet, lambda_sq: float) -> float:
    """Discriminant delta^2 = a^2 - 4 b lam2 (1 - c lam2).

    Exactly a^2 at a representable degenerate point, since the last factor
    is then exactly zero.
    """
    leading, a, stiff = mode_ode_coefficients(p, lambda_sq)
    return a * a - 4.0 * stiff * leading


def _roots_second_order(leading: float, damping: float, stiffness: float) -> CharacteristicRoots:
    """Roots of leading r^2 + damping r + stiffness = 0, damping > 0."""
    delta_sq = damping * damping - 4.0 * stiffness * leading
    if delta_sq > 0.0:
        delta = math.sqrt(delta_sq)
        # exact cancellation-free forms; (-a+delta) loses digits when
        # stiffness*leading is tiny
        r_plus = -2.0 * stiffness / (damping + delta)
        r_minus = -(damping + delta) / (2.0 * leading)
        return CharacteristicRoots("real_distinct", complex(r_plus), complex(r_minus))
    if delta_sq == 0.0:
        r = -damping / (2.0 * leading)
        return CharacteristicRoots("double", complex(r), complex(r))
    decay = -damping / (2.0 * leading)
    freq = math.sqrt(-delta_sq) / (2.0 * leading)  # leading > 0 here
    return CharacteristicRoots("complex_pair",
                               complex(decay, freq), complex(decay, -freq))


def characteristic_roots(p: ParameterSet, lambda_sq: float,
                         tol_degenerate: float | None = None) -> CharacteristicRoots:
    """Characteristic roots of the per-mode ODE at lambda_sq.

    Raises DegenerateModeError when |1 - c lam2| falls inside the degeneracy
    gate; that mode is first order and belongs to ``solve_mode``.
    """
    leading, damping, stiffness = mode_ode_coefficients(p, lambda_sq)
    tol = default_degenerate_tol(p, lambda_sq) if tol_degenerate is None else tol_degenerate
    if abs(leading) <= tol:
        raise DegenerateModeError(
            f"mode with lambda_sq={lambda_sq} is degenerate (1 - c lam2 = {leading:.3e}); "
            "use solve_mode for the first-order branch")
    return _roots_second_order(leading, damping, stiffness)


def compatibility_report(p: ParameterSet, lambda_sq: float,
                         data: ModalInitialData, mode_index: int | None = None,
                         tolerance: float = 1e-9) -> CompatibilityReport:
    """Check beta/alpha = -(b/a) lam2 for a degenerate mode.

    With alpha = 0 the condition collapses to beta = 0 (only the zero solution
    survives), checked exactly.
    """
    required = -(p.b * lambda_sq) / p.a
    if data.alpha == 0.0:
        return CompatibilityReport(required, None, data.beta == 0.0,
                                   tolerance, mode_index)
    actual = data.beta / data.alpha
    ok = abs(actual - required) <= tolerance * max(1.0, abs(required))
    return CompatibilityReport(required, actual, ok, tolerance, mode_index)


def solve_mode(p: ParameterSet, lambda_sq: float,
               data: ModalInitialData | tuple[float, float],
               mode_index: int | None = None,
               tol_degenerate: float | None = None,
               compat_tol: float = 1e-9) -> ModalSolution:
    """Closed-form solution of one mode from its initial data.

    Dispatches on the discriminant sign; degenerate modes go through the
    compatibility check and either return the first-order decay or raise
    UnsolvableModeError carrying the report.
    """
    if not isinstance(data, ModalInitialData):
        data = ModalInitialData(*data)
    leading, damping, stiffness = mode_ode_coefficients(p, lambda_sq)
    tol = default_degenerate_tol(p, lambda_sq) if tol_degenerate is None else tol_degenerate
    if abs(leading) <= tol:
        report = compatibility_report(p, lambda_sq, data, mode_index, compat_tol)
        if not report.satisfied:
            actual = (None if report.actual_ratio is None
                      else float(report.actual_ratio))
            raise UnsolvableModeError(
                f"degenerate mode {mode_index if mode_index is not None else '?'} "
                f"violates compatibility: beta/alpha = {actual}, "
                f"required {float(report.required_ratio)}",
                mode_index=mode_index, report=report)
        return FirstOrder(alpha=data.alpha, rate=report.required_ratio)
    return _solve_from_roots(_roots_second_order(leading, damping, stiffness), data)


def solve_second_order(leading: float, damping: float, stiffness: float,
                       data: ModalInitialData | tuple[float, float]) -> ModalSolution:
    """Solve leading y'' + damping y' + stiffness y = 0 from (y(0), y'(0)).

    Shared closed-form core; ``leading`` must be bounded away from zero here
    (degeneracy handling lives in ``solve_mode``).
    """
    if not isinstance(data, ModalInitialData):
        data = ModalInitialData(*data)
    if leading == 0.0:
        raise DegenerateModeError("leading coefficient is zero; first-order problem")
    if not damping > 0.0 or not stiffness > 0.0:
        raise ValueError("damping and stiffness must be positive")
    return _solve_from_roots(_roots_second_order(leading, damping, stiffness), data)


def _solve_from_roots(roots: CharacteristicRoots, data: ModalInitialData) -> ModalSolution:
    alpha, beta = data.alpha, data.beta
    if roots.kind == "real_distinct":
        rp, rm = roots.r_plus, roots.r_minus
        gap = rp - rm
        A = (beta - alpha * rm) / gap
        B = (alpha * rp - beta) / gap
        return RealDistinct(A, B, rp, rm, alpha, beta)
    if roots.kind == "double":
        r = roots.mu_plus.real
        return DoubleRoot(alpha, beta - r * alpha, r, alpha, beta)
    p_, q = roots.decay, roots.frequency
    C = alpha
    D = (beta - p_ * alpha) / q
    amplitude = math.hypot(C, D)
    phase = math.atan2(-D, C)
    return ComplexPair(amplitude, p_, q, phase, alpha, beta)


def _sum_two_exp(c1: float, r1: float, c2: float, r2: float, t: float) -> tuple[float, bool]:
    v1, s1 = exp_term(c1, r1, t)
    v2, s2 = exp_term(c2, r2, t)
    if not (s1 or s2):
        return v1 + v2, False
    terms = []
    for c, r in ((c1, r1), (c2, r2)):
        if c != 0.0:
            terms.append((c, math.log(abs(c)) + r * t))
    sign, logmag = log_abs_exp_sum(terms)
    if sign == 0.0:
        return 0.0, True
    if logmag > LOG_SATURATION:
        return math.copysign(math.inf, sign), True
    return sign * math.exp(logmag), True


def eval_mode(sol: ModalSolution, t: float) -> ModeValue:
    """Evaluate a modal solution and its derivative at time t.

    t = 0.0 short-circuits to the stored initial data, so round-tripping the
    data through solve_mode is exact.  Values beyond the e^700 range saturate
    to +/-inf with the flag set.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if isinstance(sol, FirstOrder):
        if t == 0.0:
            return ModeValue(sol.alpha, sol.rate * sol.alpha)
        v, s1 = exp_term(sol.alpha, sol.rate, t)
        d, s2 = exp_term(sol.alpha * sol.rate, sol.rate, t)
        return ModeValue(v, d, s1 or s2)
    if t == 0.0:
        return ModeValue(sol.alpha, sol.beta)
    if isinstance(sol, RealDistinct):
        v, sv = _sum_two_exp(sol.A, sol.r_plus, sol.B, sol.r_minus, t)
        d, sd = _sum_two_exp(sol.A * sol.r_plus, sol.r_plus,
                             sol.B * sol.r_minus, sol.r_minus, t)
        return ModeValue(v, d, sv or sd)
    if isinstance(sol, DoubleRoot):
        v, sv = exp_term(sol.A + sol.B * t, sol.r, t)
        d, sd = exp_term(sol.B + sol.r * (sol.A + sol.B * t), sol.r, t)
        return ModeValue(v, d, sv or sd)
    # complex pair
    ph = sol.frequency * t + sol.phase
    cos_, sin_ = math.cos(ph), math.sin(ph)
    if sol.amplitude == 0.0:
        return ModeValue(0.0, 0.0)
    logmag = math.log(sol.amplitude) + sol.decay * t
    if logmag > LOG_SATURATION:
        v = math.copysign(math.inf, cos_) if cos_ != 0.0 else 0.0
        dmix = sol.decay * cos_ - sol.frequency * sin_
        d = math.copysign(math.inf, dmix) if dmix != 0.0 else 0.0
        return ModeValue(v, d, True)
    env, _ = exp_term(sol.amplitude, sol.decay, t)
    v = env * cos_
    d = env * (sol.decay * cos_ - sol.frequency * sin_)
    return ModeValue(v, d, False)


def reference_heat_mode(a: float, b: float, lambda_sq: float,
                        alpha: float, t: float) -> float:
    """Mode of the limiting heat equation a theta' = b d_xx theta."""
    if not (a > 0.0 and b > 0.0 and lambda_sq > 0.0):
        raise ValueError("a, b, lambda_sq must be positive")
    return alpha * math.exp(-(b * lambda_sq / a) * t)


def reference_telegraph_mode(tau: float, kappa: float, lambda_sq: float,
                             data: ModalInitialData | tuple[float, float],
                             t: float) -> float:
    """Mode of the classical Cattaneo law tau theta'' + theta' = kappa d_xx theta."""
    if not (tau > 0.0 and kappa > 0.0 and lambda_sq > 0.0):
        raise ValueError("tau, kappa, lambda_sq must be positive")
    sol = solve_second_order(tau, 1.0, kappa * lambda_sq, data)
    return eval_mode(sol, t).value


def solve_mode_reference(kind: str, *, lambda_sq: float, t: float,
                         a: float | None = None, b: float | None = None,
                         tau: float | None = None, kappa: float | None = None,
                         alpha: float = 0.0, beta: float = 0.0) -> float:
    """Classical single-mode references for cross-checks.

    kind 'heat': a theta' = b d_xx theta from alpha.
    kind 'telegraph': tau theta'' + theta' = kappa d_xx theta from (alpha, beta).
    """
    if kind == "heat":
        if a is None or b is None:
            raise ValueError("heat reference needs a and b")
        return reference_heat_mode(a, b, lambda_sq, alpha, t)
    if kind == "telegraph":
        if tau is None or kappa is None:
            raise ValueError("telegraph reference needs tau and kappa")
        return reference_telegraph_mode(tau, kappa, lambda_sq, (alpha, beta), t)
    raise ValueError(f"unknown reference kind {kind!r}")
