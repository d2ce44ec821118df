"""
The staggered three-stage driver and the instance generator.

Stage 1 intersects tropicalizations (exact), stage 2 looks for common roots
of the initial form systems (approximate), stage 3 computes the second term
of a Puiseux series at every initial root.  The first empty stage ends the
run and its name is the certificate status.
"""

import logging
import math
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import DegenerateFormError, PreprocessError
from .initial_system import InitialRoot, InitialSystemResult, solve_stage2_detailed
from .polygon import Tropism, tropicalization, tropism_intersection
from .polynomial import SparsePoly, strip_monomial
from .puiseux import ExponentData, GermOutcome, SeriesGerm, grow_germ

logger = logging.getLogger(__name__)


class Status(str, Enum):
    NO_TROPISM = "NoTropism"
    NO_INITIAL_ROOT = "NoInitialRoot"
    NO_SECOND_TERM = "NoSecondTerm"
    FACTOR_LIKELY = "FactorLikely"

    def __str__(self) -> str:
        return self.value


def _complex_out(z: complex) -> Dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def _complex_in(data: Dict[str, float]) -> complex:
    return complex(data["re"], data["im"])


def _float_out(x: Optional[float]) -> Any:
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _float_in(x: Any) -> Optional[float]:
    if x is None:
        return None
    return float(x)


def germ_to_dict(germ: SeriesGerm) -> Dict[str, Any]:
    return {
        "tropism": list(germ.tropism.pair()),
        "d": germ.d,
        "c0": _complex_out(germ.c0),
        "w": str(germ.w),
        "c1": _complex_out(germ.c1),
        "exact": germ.exact,
        "exponents": list(germ.data.as_tuple()) if germ.data else None,
        "slope_f": _float_out(germ.slope_f),
        "slope_g": _float_out(germ.slope_g),
    }


def germ_from_dict(data: Dict[str, Any]) -> SeriesGerm:
    exponents = data.get("exponents")
    return SeriesGerm(
        tropism=Tropism(*data["tropism"]),
        d=int(data["d"]),
        c0=_complex_in(data["c0"]),
        w=Fraction(data["w"]),
        c1=_complex_in(data["c1"]),
        data=ExponentData(*exponents) if exponents else None,
        exact=bool(data.get("exact", False)),
        slope_f=_float_in(data.get("slope_f")),
        slope_g=_float_in(data.get("slope_g")),
    )


def _root_to_dict(root: InitialRoot) -> Dict[str, Any]:
    return {
        "z": _complex_out(root.z),
        "residual_f": root.residual_f,
        "residual_g": root.residual_g,
        "multiplicity": root.multiplicity,
    }


@dataclass
class Certificate:
    """
    Outcome of one preprocessing run.

    ``roots`` keeps every tropism of stage 2, in tropism order, including
    those without roots.  ``germs`` holds only germs that passed the
    residual test.  ``timings`` is left out of comparisons and of the
    default serialization so that equal inputs give equal documents.
    """

    status: Status
    tropisms: List[Tropism] = field(default_factory=list)
    roots: Dict[Tropism, List[InitialRoot]] = field(default_factory=dict)
    germs: List[SeriesGerm] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def factor_likely(self) -> bool:
        return self.status is Status.FACTOR_LIKELY

    def to_dict(self, with_timings: bool = False) -> Dict[str, Any]:
        data = {
            "status": self.status.value,
            "tropisms": [list(t.pair()) for t in self.tropisms],
            "roots": [
                {"tropism": list(t.pair()), "roots": [_root_to_dict(r) for r in roots]}
                for t, roots in self.roots.items()
            ],
            "germs": [germ_to_dict(g) for g in self.germs],
            "diagnostics": self.diagnostics,
        }
        if with_timings:
            data["timings"] = dict(self.timings)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Certificate":
        roots: Dict[Tropism, List[InitialRoot]] = {}
        for entry in data.get("roots", []):
            t = Tropism(*entry["tropism"])
            roots[t] = [
                InitialRoot(t, _complex_in(r["z"]), r["residual_f"], r["residual_g"], r.get("multiplicity", 1))
                for r in entry["roots"]
            ]
        return cls(
            status=Status(data["status"]),
            tropisms=[Tropism(*pair) for pair in data.get("tropisms", [])],
            roots=roots,
            germs=[germ_from_dict(g) for g in data.get("germs", [])],
            diagnostics=data.get("diagnostics", {}),
            timings=data.get("timings", {}),
        )


def _system_record(result: InitialSystemResult) -> Dict[str, Any]:
    return {
        "tropism": list(result.tropism.pair()),
        "degree_f": result.form_f.degree,
        "degree_g": result.form_g.degree,
        "method": result.method,
        "size": result.size,
        "rank": result.rank,
        "gcd_degree": result.gcd_degree,
        "roots": len(result.roots),
    }


def _attempt_record(outcome: GermOutcome) -> Dict[str, Any]:
    return {
        "tropism": list(outcome.tropism.pair()),
        "root": _complex_out(outcome.c0),
        "accepted": outcome.accepted,
        "reason": outcome.reason,
        "exponents": list(outcome.data.as_tuple()) if outcome.data else None,
        "w": str(outcome.germ.w) if outcome.germ else None,
        "notes": list(outcome.notes),
    }


def preprocess(
    f: SparsePoly,
    g: SparsePoly,
    cfg: Optional[Config] = None,
    executor: Optional[Executor] = None,
) -> Certificate:
    """
    Run the three stages on (f, g), stopping at the first empty one.

    Stage 3 is attempted at every initial root; the certificate keeps every
    germ that passes the residual test.  Monomial inputs end with
    NoTropism and a note.
    """
    cfg = cfg or Config()
    timings: Dict[str, float] = {}
    diagnostics: Dict[str, Any] = {"notes": []}

    for name, p in (("f", f), ("g", g)):
        if p.is_monomial():
            diagnostics["notes"].append(f"degenerate input: {name} is a monomial")

    start = time.perf_counter()
    trop_f, trop_g = tropicalization(f), tropicalization(g)
    tropisms = tropism_intersection(trop_f, trop_g)
    timings["tropisms"] = time.perf_counter() - start
    diagnostics["tropicalization_f"] = [list(t.pair()) for t in trop_f]
    diagnostics["tropicalization_g"] = [list(t.pair()) for t in trop_g]
    logger.debug("stage 1: %d and %d normals, %d tropisms", len(trop_f), len(trop_g), len(tropisms))
    if not tropisms:
        return Certificate(Status.NO_TROPISM, diagnostics=diagnostics, timings=timings)

    start = time.perf_counter()
    systems = solve_stage2_detailed(f, g, tropisms, cfg, executor)
    timings["initial_roots"] = time.perf_counter() - start
    roots = {s.tropism: s.roots for s in systems}
    diagnostics["initial_systems"] = [_system_record(s) for s in systems]
    pending = [(s.tropism, r.z) for s in systems for r in s.roots]
    logger.debug("stage 2: %d initial roots over %d tropisms", len(pending), len(tropisms))
    if not pending:
        return Certificate(Status.NO_INITIAL_ROOT, tropisms, roots, diagnostics=diagnostics, timings=timings)

    start = time.perf_counter()
    if executor is None or len(pending) < 2:
        outcomes = [grow_germ(f, g, t, z, cfg) for t, z in pending]
    else:
        futures = [executor.submit(grow_germ, f, g, t, z, cfg) for t, z in pending]
        outcomes = [future.result() for future in futures]
    timings["second_terms"] = time.perf_counter() - start
    diagnostics["germ_attempts"] = [_attempt_record(o) for o in outcomes]
    germs = [o.germ for o in outcomes if o.accepted]
    logger.debug("stage 3: %d of %d germs accepted", len(germs), len(outcomes))

    status = Status.FACTOR_LIKELY if germs else Status.NO_SECOND_TERM
    return Certificate(status, tropisms, roots, germs, diagnostics, timings)


class Preprocessor:
    """
    Holds a Config and a worker pool and runs the pipeline on single pairs
    or whole batches.
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.executor = ThreadPoolExecutor(max_workers=self.config.max_workers)
        self.current_pair = ""
        self.is_running = False
        self.cancel_requested = False

    def preprocess(self, f: SparsePoly, g: SparsePoly) -> Certificate:
        return preprocess(f, g, self.config, self.executor)

    def preprocess_single_pair(self, f: SparsePoly, g: SparsePoly) -> Tuple[bool, Optional[Certificate], Optional[str]]:
        """
        Preprocess one pair without raising.
        Returns: (success, certificate, error_message)
        """
        try:
            return True, self.preprocess(f, g), None
        except PreprocessError as e:
            logger.warning("pair %s failed: %s", self.current_pair, e)
            return False, None, str(e)

    def batch_preprocess(
        self,
        pairs: Sequence[Tuple[str, SparsePoly, SparsePoly]],
        progress_callback: Optional[Callable[..., None]] = None,
    ) -> List[Dict[str, Any]]:
        """
        Preprocess named pairs in order with progress updates.

        A failing pair is recorded and the batch goes on.
        """
        self.is_running = True
        self.cancel_requested = False
        notify = progress_callback or (lambda **kwargs: None)

        total = len(pairs)
        completed = factors = failed = 0
        results: List[Dict[str, Any]] = []

        for name, f, g in pairs:
            if self.cancel_requested:
                break
            self.current_pair = name
            notify(current=name, completed=completed, total=total, factors=factors, failed=failed, status="running")

            success, certificate, error = self.preprocess_single_pair(f, g)
            if not success:
                failed += 1
                status = "failed"
            elif certificate.factor_likely:
                factors += 1
                status = certificate.status.value
            else:
                status = certificate.status.value

            results.append({"name": name, "success": success, "certificate": certificate, "error": error, "status": status})
            completed += 1
            notify(
                current=name, completed=completed, total=total, factors=factors, failed=failed,
                status=status, last_result=results[-1],
            )

        self.is_running = False
        notify(current="", completed=completed, total=total, factors=factors, failed=failed, status="complete", results=results)
        return results

    def cancel(self):
        self.cancel_requested = True

    def shutdown(self):
        self.executor.shutdown(wait=True)

    def __enter__(self) -> "Preprocessor":
        return self

    def __exit__(self, *exc_info):
        self.shutdown()


# ---------------------------------------------------------------------------
# Resultant probe
# ---------------------------------------------------------------------------

def _y_coefficients(p: SparsePoly, x0: complex) -> np.ndarray:
    # descending coefficients of p(x0, y), lowest powers of x and y stripped
    stripped, _ = strip_monomial(p)
    top = max(e.j for e in stripped.support)
    coeffs = np.zeros(top + 1, dtype=complex)
    for e, c in stripped.terms():
        coeffs[top - e.j] += c * x0 ** e.i
    return coeffs


def _sylvester_desc(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    m, n = len(p) - 1, len(q) - 1
    matrix = np.zeros((m + n, m + n), dtype=complex)
    for row in range(n):
        matrix[row, row:row + m + 1] = p
    for row in range(m):
        matrix[n + row, row:row + n + 1] = q
    return matrix


def resultant_probe(
    f: SparsePoly,
    g: SparsePoly,
    config: Optional[Config] = None,
    seed: Optional[int] = None,
) -> bool:
    """
    Numerical resultant test: True when the Sylvester matrix in y of
    f(x0, y), g(x0, y) is singular at every sampled x0 on the unit circle.

    ``config.probe_samples`` points are drawn with ``seed`` (default
    ``config.seed``); singularity is judged by
    sigma_min / sigma_max <= ``config.probe_tolerance``.
    """
    config = config or Config()
    if f.y_degree() == 0 or g.y_degree() == 0:
        raise DegenerateFormError("resultant probe needs positive degree in y; swap the variables")
    rng = np.random.default_rng(config.seed if seed is None else seed)
    for x0 in np.exp(2j * np.pi * rng.uniform(size=config.probe_samples)):
        matrix = _sylvester_desc(_y_coefficients(f, x0), _y_coefficients(g, x0))
        singular = np.linalg.svd(matrix, compute_uv=False)
        ratio = singular[-1] / singular[0] if singular[0] > 0 else 0.0
        logger.debug("probe at x0=%.4f%+.4fj: sigma ratio %.3g", x0.real, x0.imag, ratio)
        if ratio > config.probe_tolerance:
            return False
    return True


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

@dataclass
class GroundTruth:
    """What the generator planted: the common factor, or nothing."""

    planted: bool
    factor: Optional[SparsePoly] = None
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)


def _unit_disk(rng: np.random.Generator, size: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(size=size))
    angle = 2.0 * np.pi * rng.uniform(size=size)
    return radius * np.exp(1j * angle)


def random_poly(degree: int, sparsity: float, rng: np.random.Generator) -> SparsePoly:
    """
    Random polynomial of total degree ``degree``, coefficients uniform on
    the unit disk.  Each term of the dense support is kept with probability
    ``sparsity``; the corners (0,0), (degree,0), (0,degree) always stay.
    """
    support = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
    corners = {(0, 0), (degree, 0), (0, degree)}
    keep = rng.uniform(size=len(support)) < sparsity
    coeffs = _unit_disk(rng, len(support))
    terms = {e: complex(c) for e, c, k in zip(support, coeffs, keep) if k or e in corners}
    return SparsePoly(terms)


def gen_instance(
    deg_factor: int,
    deg_cofactor: int,
    planted: bool = True,
    sparsity: float = 1.0,
    seed: int = 0,
) -> Tuple[SparsePoly, SparsePoly, GroundTruth]:
    """
    A seeded test pair.

    Planted: f = r*a and g = r*b with random r of degree ``deg_factor`` and
    random cofactors of degree ``deg_cofactor``.  Otherwise f and g are
    independent random polynomials of degree deg_factor + deg_cofactor.
    """
    if deg_factor < 1 or deg_cofactor < 1:
        raise ValueError("degrees must be at least 1")
    if not 0.0 < sparsity <= 1.0:
        raise ValueError("sparsity must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    params = {"deg_factor": deg_factor, "deg_cofactor": deg_cofactor, "sparsity": sparsity}
    if planted:
        r = random_poly(deg_factor, sparsity, rng)
        a = random_poly(deg_cofactor, sparsity, rng)
        b = random_poly(deg_cofactor, sparsity, rng)
        return r * a, r * b, GroundTruth(True, r, seed, params)
    total = deg_factor + deg_cofactor
    f = random_poly(total, sparsity, rng)
    g = random_poly(total, sparsity, rng)
    return f, g, GroundTruth(False, None, seed, params)


def add_noise(p: SparsePoly, level: float, rng: np.random.Generator) -> SparsePoly:
    """Perturb every coefficient by a relative complex error of size ``level``."""
    noise = _unit_disk(rng, len(p))
    factors = dict(zip(p.support, 1.0 + level * noise))
    return p.map_coefficients(lambda e, c: c * complex(factors[e]))
