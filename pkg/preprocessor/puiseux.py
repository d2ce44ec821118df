"""
Stage 3: the second term of the Puiseux series at an initial root.

After the unimodular transform for a tropism, and after dividing out the
monomial X^m Y^s that makes the initial form a polynomial p(Y) with nonzero
constant term, a polynomial reads

    F(X, Y) = p(Y) + X^k P_k(Y) + X^(k+1) P_(k+1)(Y) + ...

with Laurent polynomials P_j.  Substituting X = t^d, Y = c0 + c1 t^w and
asking the lowest power of t to cancel in both f and g fixes w and c1.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .initial_system import UnivariateForm
from .polygon import Tropism
from .polynomial import ExponentVector, SparsePoly
from .unimodular import UnimodularMatrix, matrix_for_tropism, transform_poly, untransform_point

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ExponentData:
    """
    Exponents deciding whether a second term exists.

    k, l: lowest positive X-degrees of f and g whose coefficient does not
    vanish at c0; a1, b1: multiplicities of c0 in the initial forms.
    """

    k: int
    l: int
    a1: int
    b1: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.k, self.l, self.a1, self.b1)


@dataclass(frozen=True)
class SeriesGerm:
    """X = t^d, Y = c0 + c1 t^w in the coordinates of the tropism's transform."""

    tropism: Tropism
    d: int
    c0: complex
    w: Fraction
    c1: complex
    data: Optional[ExponentData] = None
    exact: bool = False
    slope_f: Optional[float] = None
    slope_g: Optional[float] = None

    @property
    def matrix(self) -> UnimodularMatrix:
        return matrix_for_tropism(self.tropism)

    def y_at(self, t: float) -> complex:
        return self.c0 + self.c1 * t ** float(self.w)


class ShiftedForm:
    """
    A polynomial in the coordinates of a tropism, split by powers of X.

    ``parts[j]`` maps Y-exponents to coefficients of X^j after dividing out
    the monomial ``shift``; ``parts[0]`` is the initial form as a polynomial
    in Y with nonzero constant term.
    """

    def __init__(self, p: SparsePoly, t: Tropism, matrix: Optional[UnimodularMatrix] = None):
        self.tropism = t
        self.matrix = matrix or matrix_for_tropism(t)
        transformed = transform_poly(p, self.matrix)
        m = min(e.i for e in transformed.support)
        s = min(e.j for e in transformed.support if e.i == m)
        self.shift = ExponentVector(m, s)
        self.parts: Dict[int, Dict[int, complex]] = {}
        for e, c in transformed.terms():
            self.parts.setdefault(e.i - m, {})[e.j - s] = c

    @property
    def initial(self) -> UnivariateForm:
        part = self.parts[0]
        coeffs = [0j] * (max(part) + 1)
        for b, c in part.items():
            coeffs[b] = c
        return UnivariateForm(tuple(coeffs), self.shift)

    def positive_degrees(self) -> List[int]:
        return sorted(j for j in self.parts if j > 0)

    def part_value(self, j: int, y: complex) -> Tuple[complex, float]:
        """Value of P_j at y and the sum of absolute term values there."""
        value, scale = 0j, 0.0
        for b, c in self.parts.get(j, {}).items():
            term = c * y ** b
            value += term
            scale += abs(term)
        return value, scale

    def value(self, x: complex, y: complex) -> Tuple[complex, float]:
        """F(x, y) and the sum of absolute term values."""
        value, scale = 0j, 0.0
        for j, part in self.parts.items():
            xj = x ** j
            for b, c in part.items():
                term = c * xj * y ** b
                value += term
                scale += abs(term)
        return value, scale

    def order_at(self, c0: complex, tolerance: float) -> Optional[int]:
        """Lowest positive X-degree whose coefficient does not vanish at c0."""
        for j in self.positive_degrees():
            value, scale = self.part_value(j, c0)
            if abs(value) > tolerance * scale:
                return j
        return None


@lru_cache(maxsize=512)
def shifted_form(p: SparsePoly, t: Tropism) -> ShiftedForm:
    return ShiftedForm(p, t)


def multiplicity(form: UnivariateForm, c0: complex, tolerance: float) -> int:
    """
    Vanishing order of ``form`` at c0: the smallest mu with a Taylor
    coefficient above ``tolerance`` relative to the evaluation scale.
    """
    scale = form.scale_at(c0)
    radius = abs(c0)
    for mu, value in enumerate(form.derivative_values(c0, form.degree + 1)):
        if abs(value) * radius ** mu > tolerance * scale:
            return mu
    return form.degree + 1


def exponent_data(f: SparsePoly, g: SparsePoly, t: Tropism, c0: complex, config: Config) -> Optional[ExponentData]:
    """The (k, l, a1, b1) quadruple, or None if k or l does not exist."""
    sf, sg = shifted_form(f, t), shifted_form(g, t)
    tol = config.multiplicity_tolerance
    a1 = multiplicity(sf.initial, c0, tol)
    b1 = multiplicity(sg.initial, c0, tol)
    k = sf.order_at(c0, tol)
    l = sg.order_at(c0, tol)
    logger.debug("tropism %s, c0=%s: k=%s l=%s a1=%d b1=%d", t, c0, k, l, a1, b1)
    if k is None or l is None or a1 == 0 or b1 == 0:
        return None
    return ExponentData(k, l, a1, b1)


def exponent_condition(
    f: SparsePoly, g: SparsePoly, t: Tropism, c0: complex, config: Optional[Config] = None, d: int = 1
) -> Optional[Tuple[Fraction, ExponentData]]:
    """
    The exponent w of the second term, if the lowest orders can match.

    Returns (w, data) with w = k*d/a1 when that equals l*d/b1, and None
    otherwise: then the initial root is isolated and there is no second term.
    """
    data = exponent_data(f, g, t, c0, config or Config())
    if data is None:
        return None
    w_f = Fraction(data.k * d, data.a1)
    w_g = Fraction(data.l * d, data.b1)
    if w_f != w_g:
        logger.debug("exponent condition fails at %s: %s != %s", t, w_f, w_g)
        return None
    return w_f, data


def _lowest_order_coefficients(p: SparsePoly, t: Tropism, c0: complex, order: int, mu: int) -> Tuple[complex, complex]:
    # alpha: mu-th Taylor coefficient of the initial form; alpha2: P_order(c0)
    shifted = shifted_form(p, t)
    alpha = shifted.initial.derivative_values(c0, mu + 1)[mu]
    alpha2, _ = shifted.part_value(order, c0)
    return alpha, alpha2


def _relative(value: complex, *terms: complex) -> float:
    scale = sum(abs(x) for x in terms)
    return abs(value) / scale if scale > 0 else 0.0


def second_term(
    f: SparsePoly,
    g: SparsePoly,
    t: Tropism,
    c0: complex,
    w: Fraction,
    data: ExponentData,
    config: Optional[Config] = None,
) -> Optional[complex]:
    """
    Solve alpha*c1^a1 + alpha2 = 0 and beta*c1^b1 + beta2 = 0 for c1.

    With a1 = b1 the unknown c1^a1 enters linearly and is fitted by least
    squares on the two equations; otherwise the roots of the first equation
    are tried in the second.  None when the pair is inconsistent.
    """
    config = config or Config()
    tol = config.series_tolerance
    alpha, alpha2 = _lowest_order_coefficients(f, t, c0, data.k, data.a1)
    beta, beta2 = _lowest_order_coefficients(g, t, c0, data.l, data.b1)

    if data.a1 == data.b1:
        lhs = np.array([[alpha], [beta]], dtype=complex)
        rhs = -np.array([alpha2, beta2], dtype=complex)
        power = complex(np.linalg.lstsq(lhs, rhs, rcond=None)[0][0])
        candidates = [power ** (1.0 / data.a1)] if power != 0 else [0j]
    else:
        target = -alpha2 / alpha
        base = abs(target) ** (1.0 / data.a1) * np.exp(1j * np.angle(target) / data.a1)
        candidates = [complex(base * np.exp(2j * np.pi * r / data.a1)) for r in range(data.a1)]

    def residuals(c1: complex) -> Tuple[float, float]:
        rf = _relative(alpha * c1 ** data.a1 + alpha2, alpha * c1 ** data.a1, alpha2)
        rg = _relative(beta * c1 ** data.b1 + beta2, beta * c1 ** data.b1, beta2)
        return rf, rg

    c1 = min(candidates, key=lambda c: max(residuals(c)))
    rf, rg = residuals(c1)
    if rf > tol or rg > tol:
        logger.debug("second term inconsistent at %s: residuals %.3g, %.3g", t, rf, rg)
        return None
    if abs(c1) == 0.0:
        return None
    return complex(c1)


def is_exact_branch(f: SparsePoly, g: SparsePoly, t: Tropism, c0: complex, config: Config) -> bool:
    """Whether both f and g vanish identically on the curve Y = c0."""
    tol = config.multiplicity_tolerance
    for p in (f, g):
        shifted = shifted_form(p, t)
        if multiplicity(shifted.initial, c0, tol) == 0:
            return False
        if shifted.order_at(c0, tol) is not None:
            return False
    return True


def residual_order(p: SparsePoly, germ: SeriesGerm, samples: Sequence[float]) -> float:
    """
    Least-squares slope of log|F(t^d, c0 + c1 t^w) - F(0, c0)| against log t.

    F is p in the tropism's coordinates with the monomial shift removed.
    Subtracting F(0, c0) discounts the error of the approximate initial
    root.  Residuals at rounding level count as zero; when fewer than two
    samples are left the residual vanishes and the slope is +inf.
    """
    if len(set(samples)) < 2:
        raise ValueError("residual_order needs at least two distinct samples")
    shifted = shifted_form(p, germ.tropism)
    base, _ = shifted.value(0.0, germ.c0)
    logs_t, logs_r = [], []
    for t in samples:
        value, scale = shifted.value(t ** germ.d, germ.y_at(t))
        residual = abs(value - base)
        if residual <= 64 * _EPS * max(scale, abs(base)):
            continue
        logs_t.append(math.log(t))
        logs_r.append(math.log(residual))
    if len(logs_t) < 2:
        return math.inf
    slope, _ = np.polyfit(logs_t, logs_r, 1)
    return float(slope)


def expected_order(germ: SeriesGerm, order: int) -> float:
    """Vanishing order a correct germ must reach: order*d plus the next step in t."""
    return order * germ.d + 1.0 / germ.w.denominator


def germ_point(germ: SeriesGerm, t: float) -> Tuple[complex, complex]:
    """The germ at parameter t in the original (x, y) coordinates."""
    return untransform_point(germ.matrix, t ** germ.d, germ.y_at(t))


@dataclass
class GermOutcome:
    """Stage 3 result for one initial root; ``germ`` is None when no series was found."""

    tropism: Tropism
    c0: complex
    germ: Optional[SeriesGerm] = None
    data: Optional[ExponentData] = None
    reason: str = ""
    accepted: bool = False
    notes: List[str] = field(default_factory=list)


def grow_germ(f: SparsePoly, g: SparsePoly, t: Tropism, c0: complex, config: Config) -> GermOutcome:
    """Run the exponent condition, the second term and the residual test at one root."""
    outcome = GermOutcome(t, c0)
    if is_exact_branch(f, g, t, c0, config):
        germ = SeriesGerm(t, 1, c0, Fraction(1), 0j, exact=True, slope_f=math.inf, slope_g=math.inf)
        outcome.germ, outcome.accepted, outcome.reason = germ, True, "exact binomial branch"
        return outcome

    data = exponent_data(f, g, t, c0, config)
    outcome.data = data
    if data is None:
        outcome.reason = "no positive X-degree survives at the root"
        return outcome
    condition = exponent_condition(f, g, t, c0, config)
    if condition is None:
        outcome.reason = "exponent condition fails"
        return outcome
    w, data = condition
    c1 = second_term(f, g, t, c0, w, data, config)
    if c1 is None:
        outcome.reason = "second term inconsistent"
        return outcome

    germ = SeriesGerm(t, 1, c0, w, c1, data)
    slope_f = residual_order(f, germ, config.residual_samples)
    slope_g = residual_order(g, germ, config.residual_samples)
    germ = SeriesGerm(t, 1, c0, w, c1, data, slope_f=slope_f, slope_g=slope_g)
    outcome.germ = germ
    margin = config.residual_slope_margin
    passed = slope_f >= expected_order(germ, data.k) - margin and slope_g >= expected_order(germ, data.l) - margin
    if not passed:
        outcome.reason = f"residual slopes {slope_f:.3f}, {slope_g:.3f} too low"
        logger.warning("germ at %s rejected: %s", t, outcome.reason)
        return outcome
    if w.denominator != 1:
        outcome.notes.append(f"non-integer exponent w = {w}")
    outcome.accepted = True
    outcome.reason = "series"
    return outcome
