"""
Sparse Laurent polynomials in x and y with complex coefficients.

A polynomial is kept as a list of exponent vectors (its support) plus a
coefficient table keyed by exponent.  Keeping the two apart lets a monomial
change of coordinates act on the support alone, and lets a monomial order be
stored as a permutation of support indices.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

from .errors import DomainError, PolynomialSyntaxError, ZeroPolynomialError

logger = logging.getLogger(__name__)

DEFAULT_DROP_TOLERANCE = 1e-12


class ExponentVector(NamedTuple):
    """Exponents (i, j) of the monomial x^i y^j; negative after transforms."""

    i: int
    j: int


@dataclass(frozen=True, order=True)
class Direction:
    """A nonzero integer direction (u, v) used to grade exponent vectors."""

    u: int
    v: int

    def __post_init__(self):
        if not isinstance(self.u, int) or not isinstance(self.v, int):
            object.__setattr__(self, "u", int(self.u))
            object.__setattr__(self, "v", int(self.v))
        if self.u == 0 and self.v == 0:
            raise ValueError("direction (0, 0) is not allowed")

    def __iter__(self) -> Iterator[int]:
        yield self.u
        yield self.v

    def pair(self) -> Tuple[int, int]:
        return (self.u, self.v)


DirectionLike = Union[Direction, Tuple[int, int]]


def as_direction(d: DirectionLike) -> Direction:
    return d if isinstance(d, Direction) else Direction(*d)


def inner(e: Tuple[int, int], d: DirectionLike) -> int:
    """The grading <(i, j), (u, v)> = i*u + j*v."""
    u, v = d
    return e[0] * u + e[1] * v


class SparsePoly:
    """
    Immutable sparse bivariate Laurent polynomial.

    ``support`` is sorted lexicographically by (i, j) and every stored
    coefficient has magnitude above ``drop_tolerance`` times the largest
    coefficient magnitude.
    """

    __slots__ = ("_support", "_coeffs", "_drop_tolerance")

    def __init__(
        self,
        terms: Union[Mapping[Tuple[int, int], complex], Iterable[Tuple[Tuple[int, int], complex]]],
        drop_tolerance: float = DEFAULT_DROP_TOLERANCE,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: Dict[ExponentVector, complex] = {}
        for exponent, coefficient in items:
            key = ExponentVector(int(exponent[0]), int(exponent[1]))
            table[key] = table.get(key, 0j) + complex(coefficient)
        self._init_from_table(_drop_small(table, drop_tolerance), drop_tolerance)

    @classmethod
    def _trusted(cls, table: Dict[ExponentVector, complex], drop_tolerance: float) -> "SparsePoly":
        # Skips the drop pass: callers hand over a subset of an existing polynomial.
        poly = cls.__new__(cls)
        poly._init_from_table(table, drop_tolerance)
        return poly

    def _init_from_table(self, table: Dict[ExponentVector, complex], drop_tolerance: float):
        if not table:
            raise ZeroPolynomialError("the zero polynomial is not allowed")
        self._support = tuple(sorted(table))
        self._coeffs = MappingProxyType(dict(table))
        self._drop_tolerance = drop_tolerance

    @property
    def support(self) -> Tuple[ExponentVector, ...]:
        return self._support

    @property
    def coeffs(self) -> Mapping[ExponentVector, complex]:
        return self._coeffs

    @property
    def drop_tolerance(self) -> float:
        return self._drop_tolerance

    def terms(self) -> Iterator[Tuple[ExponentVector, complex]]:
        for e in self._support:
            yield e, self._coeffs[e]

    def coefficient(self, i: int, j: int) -> complex:
        return self._coeffs.get(ExponentVector(i, j), 0j)

    def __len__(self) -> int:
        return len(self._support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._support == other._support and all(
            self._coeffs[e] == other._coeffs[e] for e in self._support
        )

    def __hash__(self):
        return hash(tuple(self.terms()))

    def __repr__(self) -> str:
        return f"SparsePoly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return multiply(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def is_close(self, other: "SparsePoly", tolerance: float = 1e-9) -> bool:
        """Same support and coefficients equal up to ``tolerance`` relative to the largest."""
        if self._support != other._support:
            return False
        scale = max(self.max_abs(), other.max_abs())
        return all(abs(self._coeffs[e] - other._coeffs[e]) <= tolerance * scale for e in self._support)

    def max_abs(self) -> float:
        return max(abs(c) for c in self._coeffs.values())

    def is_monomial(self) -> bool:
        return len(self._support) == 1

    def min_exponents(self) -> ExponentVector:
        return ExponentVector(min(e.i for e in self._support), min(e.j for e in self._support))

    def total_degree(self) -> int:
        return max(e.i + e.j for e in self._support)

    def y_degree(self) -> int:
        """Degree in y after stripping the lowest power of y."""
        return max(e.j for e in self._support) - min(e.j for e in self._support)

    def scaled(self, factor: complex) -> "SparsePoly":
        return SparsePoly({e: c * factor for e, c in self.terms()}, self._drop_tolerance)

    def shifted(self, shift: Tuple[int, int]) -> "SparsePoly":
        """Multiply by the monomial x^a y^b."""
        a, b = shift
        table = {ExponentVector(e.i + a, e.j + b): c for e, c in self.terms()}
        return SparsePoly._trusted(table, self._drop_tolerance)

    def map_exponents(self, fn: Callable[[ExponentVector], Tuple[int, int]]) -> "SparsePoly":
        """Apply an injective map to the support, leaving coefficients untouched."""
        table = {}
        for e, c in self.terms():
            image = fn(e)
            key = ExponentVector(int(image[0]), int(image[1]))
            if key in table:
                raise ValueError(f"exponent map is not injective at {tuple(e)}")
            table[key] = c
        return SparsePoly._trusted(table, self._drop_tolerance)

    def map_coefficients(self, fn: Callable[[ExponentVector, complex], complex]) -> "SparsePoly":
        return SparsePoly({e: fn(e, c) for e, c in self.terms()}, self._drop_tolerance)

    def restricted(self, keep: Callable[[ExponentVector], bool]) -> "SparsePoly":
        table = {e: c for e, c in self.terms() if keep(e)}
        return SparsePoly._trusted(table, self._drop_tolerance)


def _drop_small(table: Dict[ExponentVector, complex], drop_tolerance: float) -> Dict[ExponentVector, complex]:
    if not table:
        return table
    largest = max(abs(c) for c in table.values())
    if largest == 0.0:
        return {}
    threshold = drop_tolerance * largest
    kept = {e: c for e, c in table.items() if abs(c) > threshold}
    if len(kept) < len(table):
        logger.debug("dropped %d coefficients below %.3g", len(table) - len(kept), threshold)
    return kept


# ---------------------------------------------------------------------------
# Gradings and initial forms
# ---------------------------------------------------------------------------

def weighted_degree(p: SparsePoly, d: DirectionLike) -> int:
    """Minimal value of <(i, j), d> over the support of p."""
    d = as_direction(d)
    return min(inner(e, d) for e in p.support)


def initial_form(p: SparsePoly, d: DirectionLike) -> SparsePoly:
    """
    The initial form of p in the direction d.

    Keeps exactly the terms whose exponents attain the weighted degree.  Its
    Newton polygon is the edge (or vertex) of the Newton polygon of p picked
    out by d.
    """
    d = as_direction(d)
    m = weighted_degree(p, d)
    return p.restricted(lambda e: inner(e, d) == m)


def monomial_order(p: SparsePoly, d: DirectionLike) -> Tuple[int, ...]:
    """Permutation of support indices sorting the terms by weighted degree along d."""
    d = as_direction(d)
    support = p.support
    return tuple(sorted(range(len(support)), key=lambda k: (inner(support[k], d), support[k])))


def strip_monomial(p: SparsePoly) -> Tuple[SparsePoly, ExponentVector]:
    """Divide out x^a y^b with a, b the smallest exponents of x and y in p."""
    shift = p.min_exponents()
    return p.shifted((-shift.i, -shift.j)), shift


def evaluate(p: SparsePoly, x: complex, y: complex) -> complex:
    """Evaluate p term by term at (x, y)."""
    x = complex(x)
    y = complex(y)
    total = 0j
    for e, c in p.terms():
        if (x == 0 and e.i < 0) or (y == 0 and e.j < 0):
            raise DomainError(f"monomial x^{e.i} y^{e.j} is undefined at ({x}, {y})")
        total += c * (x ** e.i) * (y ** e.j)
    return total


def evaluation_scale(p: SparsePoly, x: complex, y: complex) -> float:
    """Sum of absolute term values at (x, y); the natural scale for residuals."""
    ax, ay = abs(x), abs(y)
    return sum(abs(c) * ax ** e.i * ay ** e.j for e, c in p.terms())


def multiply(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Product of p and q; coefficients that cancel below the drop tolerance vanish."""
    table: Dict[ExponentVector, complex] = {}
    for e, c in p.terms():
        for f, d in q.terms():
            key = ExponentVector(e.i + f.i, e.j + f.j)
            table[key] = table.get(key, 0j) + c * d
    tolerance = max(p.drop_tolerance, q.drop_tolerance)
    return SparsePoly(table, tolerance)


# ---------------------------------------------------------------------------
# Text and structured forms
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<imag>[iIj](?![A-Za-z_]))
  | (?P<var>[xy](?![A-Za-z_]))
  | (?P<pow>\*\*|\^)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)

# Exact complex rationals as (real, imaginary) Fraction pairs.
_Q = Tuple[Fraction, Fraction]
_QPoly = Dict[Tuple[int, int], _Q]

_ZERO: _Q = (Fraction(0), Fraction(0))
_ONE: _Q = (Fraction(1), Fraction(0))

_EXACT_POWER_BITS = 1 << 16
_INT64_MIN = -(2 ** 63)
_INT64_MAX = 2 ** 63 - 1


def _q_add(a: _Q, b: _Q) -> _Q:
    return (a[0] + b[0], a[1] + b[1])


def _q_mul(a: _Q, b: _Q) -> _Q:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _q_inv(a: _Q) -> _Q:
    norm = a[0] * a[0] + a[1] * a[1]
    return (a[0] / norm, -a[1] / norm)


def _q_power(a: _Q, n: int) -> _Q:
    """a**n, exact while the result stays small, in floating point beyond that."""
    if n < 0:
        a, n = _q_inv(a), -n
    bits = max(abs(part.numerator).bit_length() + part.denominator.bit_length() for part in a) - 2
    if bits * n <= _EXACT_POWER_BITS:
        if a[1] == 0:
            return (a[0] ** n, Fraction(0))
        result, square = _ONE, a
        while n:
            if n & 1:
                result = _q_mul(result, square)
            square = _q_mul(square, square)
            n >>= 1
        return result
    if a[1] == 0:
        z = complex(float(a[0]) ** n)
    elif a[0] == 0:
        z = float(a[1]) ** n * 1j ** (n % 4)
    else:
        z = complex(float(a[0]), float(a[1])) ** n
    return (Fraction(z.real), Fraction(z.imag))


def _poly_add(p: _QPoly, q: _QPoly, sign: int = 1) -> _QPoly:
    out = dict(p)
    for e, c in q.items():
        c = c if sign > 0 else (-c[0], -c[1])
        out[e] = _q_add(out.get(e, _ZERO), c)
    return {e: c for e, c in out.items() if c != _ZERO}


def _poly_mul(p: _QPoly, q: _QPoly) -> _QPoly:
    out: _QPoly = {}
    for e, c in p.items():
        for f, d in q.items():
            key = (e[0] + f[0], e[1] + f[1])
            out[key] = _q_add(out.get(key, _ZERO), _q_mul(c, d))
    return {e: c for e, c in out.items() if c != _ZERO}


class _Parser:
    """Recursive descent over the token stream of a polynomial expression."""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if match is None:
                raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            kind = match.lastgroup
            if kind != "space":
                self.tokens.append((kind, match.group(), pos))
            pos = match.end()
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def position(self) -> int:
        token = self.peek()
        return token[2] if token else len(self.text)

    def fail(self, message: str):
        raise PolynomialSyntaxError(message, self.text, self.position())

    def take(self, kind: str, value: Optional[str] = None) -> Optional[Tuple[str, str, int]]:
        token = self.peek()
        if token and token[0] == kind and (value is None or token[1] == value):
            self.index += 1
            return token
        return None

    def parse(self) -> _QPoly:
        if not self.tokens:
            self.fail("empty expression")
        result = self.expression()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()[1]!r}")
        return result

    def expression(self) -> _QPoly:
        result = self.term()
        while True:
            if self.take("op", "+"):
                result = _poly_add(result, self.term())
            elif self.take("op", "-"):
                result = _poly_add(result, self.term(), sign=-1)
            else:
                return result

    def _starts_factor(self) -> bool:
        token = self.peek()
        return token is not None and (token[0] in ("number", "imag", "var") or token[1] == "(")

    def term(self) -> _QPoly:
        result = self.factor()
        while True:
            if self.take("op", "*"):
                result = _poly_mul(result, self.factor())
            elif self.take("op", "/"):
                at = self.position()
                divisor = self.factor()
                if not divisor:
                    raise PolynomialSyntaxError("division by zero", self.text, at)
                if list(divisor) != [(0, 0)]:
                    raise PolynomialSyntaxError("division by a non-constant", self.text, at)
                inverse = _q_inv(divisor[(0, 0)])
                result = {e: _q_mul(c, inverse) for e, c in result.items()}
            elif self._starts_factor():
                result = _poly_mul(result, self.factor())
            else:
                return result

    def factor(self) -> _QPoly:
        if self.take("op", "-"):
            return {e: (-c[0], -c[1]) for e, c in self.factor().items()}
        if self.take("op", "+"):
            return self.factor()
        base = self.atom()
        if self.take("pow"):
            at = self.position()
            return self._power(base, self.signed_integer(), at)
        return base

    def signed_integer(self) -> int:
        sign = 1
        wrapped = self.take("op", "(") is not None
        if self.take("op", "-"):
            sign = -1
        elif self.take("op", "+"):
            pass
        at = self.position()
        token = self.take("number")
        if token is None or not token[1].isdigit():
            self.fail("expected an integer exponent")
        digits = token[1].lstrip("0") or "0"
        value = sign * int(digits) if len(digits) <= 19 else None
        if value is None or not _INT64_MIN <= value <= _INT64_MAX:
            raise PolynomialSyntaxError("exponent outside the signed 64-bit range", self.text, at)
        if wrapped and not self.take("op", ")"):
            self.fail("expected ')'")
        return value

    def _power(self, base: _QPoly, n: int, at: int) -> _QPoly:
        if len(base) == 1:
            (e, c), = base.items()
            exponent = (e[0] * n, e[1] * n)
            if not all(_INT64_MIN <= k <= _INT64_MAX for k in exponent):
                raise PolynomialSyntaxError("exponent outside the signed 64-bit range", self.text, at)
            try:
                coefficient = _q_power(c, n)
            except OverflowError:
                raise PolynomialSyntaxError("power outside the double precision range", self.text, at) from None
            return {exponent: coefficient} if coefficient != _ZERO else {}
        if n < 0:
            raise PolynomialSyntaxError("negative power of a non-monomial", self.text, at)
        result: _QPoly = {(0, 0): _ONE}
        square = base
        while n:
            if n & 1:
                result = _poly_mul(result, square)
            n >>= 1
            if n:
                square = _poly_mul(square, square)
        return result

    def atom(self) -> _QPoly:
        token = self.take("number")
        if token:
            value = Fraction(token[1])
            if self.take("imag"):
                return {(0, 0): (Fraction(0), value)} if value else {}
            return {(0, 0): (value, Fraction(0))} if value else {}
        if self.take("imag"):
            return {(0, 0): (Fraction(0), Fraction(1))}
        token = self.take("var")
        if token:
            return {(1, 0): _ONE} if token[1] == "x" else {(0, 1): _ONE}
        if self.take("op", "("):
            inside = self.expression()
            if not self.take("op", ")"):
                self.fail("expected ')'")
            return inside
        self.fail("expected a number, a variable or '('")


def parse_poly(text: str, drop_tolerance: float = DEFAULT_DROP_TOLERANCE) -> SparsePoly:
    """
    Parse a polynomial expression such as ``"2*x*y + 9*x*y^2"``.

    Coefficients may be integers, decimals, fractions or complex numbers
    written with ``i``, ``I`` or ``j`` (``(1/2 - 3i)*x^2``).  Exponents are
    integers and may be negative.  Arithmetic is exact over the rationals and
    converted to double precision complex numbers at the end.

    Raises:
        PolynomialSyntaxError: with the offending position, or when a
            coefficient or an exponent is out of range.
        ZeroPolynomialError: if the expression is identically zero.
    """
    exact = _Parser(text).parse()
    try:
        table = {e: complex(float(c[0]), float(c[1])) for e, c in exact.items()}
    except OverflowError:
        raise PolynomialSyntaxError("coefficient outside the double precision range", text) from None
    try:
        return SparsePoly(table, drop_tolerance)
    except ZeroPolynomialError:
        raise ZeroPolynomialError(f"expression {text.strip()!r} is the zero polynomial") from None


def _format_number(z: complex) -> str:
    if z.imag == 0.0:
        return repr(z.real)
    if z.real == 0.0:
        return f"{z.imag!r}j"
    sign = "-" if z.imag < 0 else "+"
    return f"({z.real!r}{sign}{abs(z.imag)!r}j)"


def _format_monomial(e: ExponentVector) -> str:
    parts = []
    for name, power in (("x", e.i), ("y", e.j)):
        if power == 1:
            parts.append(name)
        elif power != 0:
            parts.append(f"{name}^{power}")
    return "*".join(parts)


def format_poly(p: SparsePoly) -> str:
    """Render p so that ``parse_poly(format_poly(p)) == p``."""
    pieces = []
    for e, c in p.terms():
        negative_real = c.imag == 0.0 and c.real < 0
        magnitude = complex(-c.real, 0.0) if negative_real else c
        monomial = _format_monomial(e)
        number = _format_number(magnitude)
        body = f"{number}*{monomial}" if monomial else number
        if not pieces:
            pieces.append(f"-{body}" if negative_real else body)
        else:
            pieces.append(f" - {body}" if negative_real else f" + {body}")
    return "".join(pieces)


def to_records(p: SparsePoly) -> List[Dict[str, Union[int, float]]]:
    """Structured form: one ``{i, j, re, im}`` record per term, in support order."""
    return [{"i": e.i, "j": e.j, "re": c.real, "im": c.imag} for e, c in p.terms()]


def from_records(records: Iterable[Mapping], drop_tolerance: float = DEFAULT_DROP_TOLERANCE) -> SparsePoly:
    return SparsePoly(
        {(int(r["i"]), int(r["j"])): complex(r["re"], r.get("im", 0.0)) for r in records},
        drop_tolerance,
    )
