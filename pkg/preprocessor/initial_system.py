"""
Stage 2: roots at infinity.

For every tropism the initial forms of f and g are turned into polynomials
in one variable by the unimodular transform.  A common root in C* of that
pair is an initial root, the second certificate for a common factor.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import DegenerateFormError
from .polygon import Tropism
from .polynomial import ExponentVector, SparsePoly, initial_form
from .unimodular import UnimodularMatrix, matrix_for_tropism, transform_poly

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnivariateForm:
    """
    Coefficients in ascending degree of a polynomial in the transformed Y.

    ``source_shift`` is the monomial X^A Y^B divided out of the transformed
    initial form, so the constant and leading coefficients are both nonzero.
    """

    coeffs: Tuple[complex, ...]
    source_shift: ExponentVector = ExponentVector(0, 0)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "UnivariateForm":
        ascending = np.polynomial.polynomial.polyfromroots(roots) * leading
        return cls(tuple(complex(c) for c in ascending))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return self.degree == 0

    def is_binomial(self) -> bool:
        return self.degree >= 1 and all(c == 0 for c in self.coeffs[1:-1])

    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, z: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(z, self.array()))

    def scale_at(self, z: complex) -> float:
        """Sum of absolute term values at z."""
        return float(np.polynomial.polynomial.polyval(abs(z), np.abs(self.array())))

    def relative_residual(self, z: complex) -> float:
        scale = self.scale_at(z)
        return abs(self(z)) / scale if scale > 0 else 0.0

    def derivative_values(self, z: complex, count: int) -> List[complex]:
        """p(z), p'(z)/1!, p''(z)/2!, ... (Taylor coefficients at z), ``count`` of them."""
        values = []
        coeffs = self.array()
        factorial = 1.0
        for order in range(count):
            if order > 0:
                factorial *= order
            values.append(complex(np.polynomial.polynomial.polyval(z, coeffs)) / factorial)
            coeffs = np.polynomial.polynomial.polyder(coeffs) if len(coeffs) > 1 else np.zeros(1, dtype=complex)
        return values


@dataclass(frozen=True)
class InitialRoot:
    """A common nonzero root of a univariatized initial form system."""

    tropism: Tropism
    z: complex
    residual_f: float
    residual_g: float
    multiplicity: int = 1


@dataclass
class InitialSystemResult:
    """Everything stage 2 learned about one tropism."""

    tropism: Tropism
    form_f: UnivariateForm
    form_g: UnivariateForm
    size: int = 0
    rank: int = 0
    method: str = "sylvester"
    roots: List[InitialRoot] = field(default_factory=list)

    @property
    def gcd_degree(self) -> int:
        return self.size - self.rank


def univariatize(p: SparsePoly, t: Tropism, matrix: Optional[UnimodularMatrix] = None) -> UnivariateForm:
    """
    Transform the initial form of p along t into a polynomial in Y.

    After the change of coordinates every term has the same X-degree; that
    power of X and the lowest power of Y are stripped.  A monomial initial
    form yields a constant, which has no root in C*.
    """
    matrix = matrix or matrix_for_tropism(t)
    transformed = transform_poly(initial_form(p, t), matrix)
    x_degrees = {e.i for e in transformed.support}
    if len(x_degrees) != 1:
        raise ValueError(f"initial form along {t} is not homogeneous in X after the transform")
    shift = transformed.min_exponents()
    top = max(e.j for e in transformed.support) - shift.j
    coeffs = [0j] * (top + 1)
    for e, c in transformed.terms():
        coeffs[e.j - shift.j] = c
    return UnivariateForm(tuple(coeffs), shift)


def aberth_roots(
    coeffs: Sequence[complex],
    max_iterations: int = 200,
    tolerance: float = 1e-13,
    seed: int = 0,
) -> np.ndarray:
    """
    All roots of the polynomial with ascending coefficients ``coeffs``.

    Simultaneous Aberth-Ehrlich iteration started from a randomly rotated
    circle whose radius is the geometric mean of the root moduli.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size == 0:
        raise DegenerateFormError("the zero polynomial has no roots to find")
    zeros_at_origin = 0
    while c.size > 1 and c[0] == 0:
        c = c[1:]
        zeros_at_origin += 1
    n = c.size - 1
    if n == 0:
        return np.zeros(zeros_at_origin, dtype=complex)

    monic = c[::-1] / c[-1]
    slope = np.polyder(monic)
    if n == 1:
        roots = np.array([-monic[1]], dtype=complex)
    else:
        rng = np.random.default_rng(seed)
        radius = abs(monic[-1]) ** (1.0 / n)
        if radius == 0.0:
            radius = 1.0
        angles = 2.0 * np.pi * np.arange(n) / n + rng.uniform(0.0, 2.0 * np.pi) + 0.4
        roots = radius * np.exp(1j * angles)
        for iteration in range(max_iterations):
            values = np.polyval(monic, roots)
            slopes = np.polyval(slope, roots)
            gaps = roots[:, None] - roots[None, :]
            np.fill_diagonal(gaps, 1.0)
            repulsion = (1.0 / gaps).sum(axis=1) - 1.0
            denominator = slopes - values * repulsion
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(denominator != 0, values / denominator, 0.0)
            roots = roots - step
            size = np.maximum(np.abs(roots), np.finfo(float).tiny)
            if np.max(np.abs(step) / size) < tolerance:
                break
        else:
            logger.warning("root iteration not converged after %d steps on degree %d", max_iterations, n)
    if zeros_at_origin:
        roots = np.concatenate([roots, np.zeros(zeros_at_origin, dtype=complex)])
    return roots


def binomial_roots(form: UnivariateForm) -> np.ndarray:
    """Roots of a0 + an*Y^n as the n primitive roots of -a0/an."""
    n = form.degree
    target = -form.coeffs[0] / form.coeffs[-1]
    base = abs(target) ** (1.0 / n) * np.exp(1j * np.angle(target) / n)
    return base * np.exp(2j * np.pi * np.arange(n) / n)


def cluster_roots(roots: Sequence[complex], radius: float) -> List[Tuple[complex, int]]:
    """Merge roots closer than ``radius`` (relative) into (centroid, multiplicity)."""
    clusters: List[List[complex]] = []
    for z in sorted(roots, key=lambda w: (w.real, w.imag)):
        for members in clusters:
            centre = sum(members) / len(members)
            if abs(z - centre) <= radius * max(1.0, abs(centre)):
                members.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(sum(m) / len(m)), len(m)) for m in clusters]


def sylvester_matrix(p: UnivariateForm, q: UnivariateForm) -> np.ndarray:
    """The square Sylvester matrix with deg q rows of p followed by deg p rows of q."""
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        raise DegenerateFormError("Sylvester matrix of two constants is empty")
    size = m + n
    matrix = np.zeros((size, size), dtype=complex)
    p_desc = p.array()[::-1]
    q_desc = q.array()[::-1]
    for row in range(n):
        matrix[row, row:row + m + 1] = p_desc
    for row in range(m):
        matrix[n + row, row:row + n + 1] = q_desc
    return matrix


def numeric_rank(matrix: np.ndarray, tol: float) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular[0] == 0.0:
        return 0
    return int(np.sum(singular > tol * singular[0]))


def _sorted_roots(items: List[Tuple[complex, int, float, float]]) -> List[Tuple[complex, int, float, float]]:
    return sorted(items, key=lambda r: (round(r[0].real, 9), round(r[0].imag, 9)))


def _common_root_clusters(
    p: UnivariateForm, q: UnivariateForm, config: Config
) -> Tuple[List[Tuple[complex, int, float, float]], int, int, str]:
    """Common roots as (z, multiplicity, residual_p, residual_q), with rank data."""
    if p.is_constant() or q.is_constant():
        return [], 0, 0, "constant"

    tol = config.root_tolerance
    if p.is_binomial() or q.is_binomial():
        if p.is_binomial() and (not q.is_binomial() or p.degree <= q.degree):
            binomial, other = p, q
        else:
            binomial, other = q, p
        found = []
        for z in binomial_roots(binomial):
            z = complex(z)
            res_b, res_o = binomial.relative_residual(z), other.relative_residual(z)
            if res_o <= tol:
                res_p, res_q = (res_b, res_o) if binomial is p else (res_o, res_b)
                found.append((z, 1, res_p, res_q))
        return _sorted_roots(found), 0, 0, "binomial"

    matrix = sylvester_matrix(p, q)
    size = matrix.shape[0]
    rank = numeric_rank(matrix, config.rank_tolerance)
    if rank == size:
        return [], size, rank, "sylvester"

    solver = dict(max_iterations=config.max_iterations, tolerance=config.convergence, seed=config.seed)
    clusters_p = cluster_roots(aberth_roots(p.coeffs, **solver), config.cluster_radius)
    clusters_q = cluster_roots(aberth_roots(q.coeffs, **solver), config.cluster_radius)

    # nearest pairing of p-roots with q-roots, kept when both residuals are small
    found = []
    for zp, mp in clusters_p:
        if zp == 0:
            continue
        zq, mq = min(clusters_q, key=lambda c: abs(c[0] - zp))
        z = (zp + zq) / 2
        res_p, res_q = p.relative_residual(z), q.relative_residual(z)
        if res_p <= tol and res_q <= tol:
            found.append((complex(z), min(mp, mq), res_p, res_q))
    found = _sorted_roots(found)
    total = sum(r[1] for r in found)
    if total != size - rank:
        logger.debug("gcd degree %d from rank, %d common roots after filtering", size - rank, total)
    return found, size, rank, "sylvester"


def common_roots(p: UnivariateForm, q: UnivariateForm, tol: float, config: Optional[Config] = None) -> List[complex]:
    """
    Distinct common roots in C* of two univariate forms.

    A root z is kept when |p(z)| and |q(z)| are at most ``tol`` times the sum
    of absolute term values at z.  When the Sylvester matrix has full numeric
    rank the list is empty.
    """
    config = (config or Config()).replace(root_tolerance=tol)
    found, _, _, _ = _common_root_clusters(p, q, config)
    return [z for z, _, _, _ in found]


def solve_initial_system(f: SparsePoly, g: SparsePoly, t: Tropism, config: Config) -> InitialSystemResult:
    form_f = univariatize(f, t)
    form_g = univariatize(g, t)
    found, size, rank, method = _common_root_clusters(form_f, form_g, config)
    roots = [InitialRoot(t, z, res_f, res_g, mult) for z, mult, res_f, res_g in found]
    logger.debug(
        "tropism %s: degrees (%d, %d), %s rank %d/%d, %d roots",
        t, form_f.degree, form_g.degree, method, rank, size, len(roots),
    )
    return InitialSystemResult(t, form_f, form_g, size, rank, method, roots)


def solve_stage2(
    f: SparsePoly,
    g: SparsePoly,
    tropisms: Sequence[Tropism],
    config: Optional[Config] = None,
    executor: Optional[Executor] = None,
) -> Dict[Tropism, List[InitialRoot]]:
    """Initial roots for every tropism, in tropism order (possibly empty lists)."""
    results = solve_stage2_detailed(f, g, tropisms, config, executor)
    return {r.tropism: r.roots for r in results}


def solve_stage2_detailed(
    f: SparsePoly,
    g: SparsePoly,
    tropisms: Sequence[Tropism],
    config: Optional[Config] = None,
    executor: Optional[Executor] = None,
) -> List[InitialSystemResult]:
    config = config or Config()
    if executor is None or len(tropisms) < 2:
        return [solve_initial_system(f, g, t, config) for t in tropisms]
    futures = [executor.submit(solve_initial_system, f, g, t, config) for t in tropisms]
    return [future.result() for future in futures]
