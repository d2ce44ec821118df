"""
Unimodular coordinate transformations built from tropisms.

For a primitive tropism (u, v) with k*u + l*v = 1 the matrix

    M = [[ u, v],
         [-l, k]]

has determinant 1 and defines x = X^u Y^-l, y = X^v Y^k.  The monomial
x^a y^b becomes X^(a*u + b*v) Y^(-l*a + k*b), so every monomial of an
initial form along (u, v) lands on the same power of X.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError, ExponentOverflowError, NotPrimitiveError
from .polynomial import DirectionLike, ExponentVector, SparsePoly, as_direction

logger = logging.getLogger(__name__)

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


def _checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise ExponentOverflowError(f"transformed exponent {value} does not fit in 64 bits")
    return value


def _euclid(a: int, b: int) -> Tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def extended_gcd(u: int, v: int) -> Tuple[int, int, int]:
    """
    Return (g, k, l) with g = gcd(|u|, |v|) and k*u + l*v = g.

    Of the family (k + m*v/g, l - m*u/g) the representative with the
    smallest |l| is returned, ties broken by the smallest |k|.
    """
    if u == 0 and v == 0:
        raise ValueError("extended_gcd(0, 0) is undefined")
    g, k, l = _euclid(u, v)
    step_k, step_l = v // g, -(u // g)

    if step_l != 0:
        anchor = l // -step_l
    else:
        anchor = -(k // step_k)
    candidates = []
    for m in (anchor - 1, anchor, anchor + 1, anchor + 2):
        kk, ll = k + m * step_k, l + m * step_l
        candidates.append(((abs(ll), abs(kk), ll, kk), kk, ll))
    _, k, l = min(candidates)
    return g, k, l


@dataclass(frozen=True)
class UnimodularMatrix:
    """The matrix [[u, v], [-l, k]] with k*u + l*v = 1."""

    u: int
    v: int
    k: int
    l: int

    def __post_init__(self):
        if self.determinant() != 1:
            raise ValueError(f"matrix {self.rows} has determinant {self.determinant()}")

    @property
    def rows(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return ((self.u, self.v), (-self.l, self.k))

    def determinant(self) -> int:
        return self.u * self.k + self.l * self.v

    def shifted(self, m: int) -> "UnimodularMatrix":
        """Another representative for the same tropism: (k + m*v, l - m*u)."""
        return UnimodularMatrix(self.u, self.v, self.k + m * self.v, self.l - m * self.u)

    def transform_exponent(self, e: Tuple[int, int]) -> ExponentVector:
        return transform_exponent(self, e)

    def inverse_exponent(self, e: Tuple[int, int]) -> ExponentVector:
        """Map transformed exponents (A, B) back to (a, b)."""
        a, b = e
        return ExponentVector(_checked(self.k * a - self.v * b), _checked(self.l * a + self.u * b))


def matrix_for_tropism(t: DirectionLike) -> UnimodularMatrix:
    d = as_direction(t)
    g, k, l = extended_gcd(d.u, d.v)
    if g != 1:
        raise NotPrimitiveError(f"tropism ({d.u}, {d.v}) is not primitive")
    logger.debug("tropism (%d, %d): k=%d, l=%d", d.u, d.v, k, l)
    return UnimodularMatrix(d.u, d.v, k, l)


def transform_exponent(m: UnimodularMatrix, e: Tuple[int, int]) -> ExponentVector:
    """(a, b) -> (a*u + b*v, -l*a + k*b)."""
    a, b = e
    return ExponentVector(_checked(a * m.u + b * m.v), _checked(-m.l * a + m.k * b))


def transform_poly(p: SparsePoly, m: UnimodularMatrix) -> SparsePoly:
    """Apply the change of coordinates to the support only."""
    return p.map_exponents(lambda e: transform_exponent(m, e))


def untransform_point(m: UnimodularMatrix, X: complex, Y: complex) -> Tuple[complex, complex]:
    """Original coordinates x = X^u Y^-l, y = X^v Y^k of a torus point (X, Y)."""
    if X == 0 or Y == 0:
        raise DomainError("untransform_point needs a point of the torus, got a zero coordinate")
    X, Y = complex(X), complex(Y)
    return X ** m.u * Y ** (-m.l), X ** m.v * Y ** m.k
