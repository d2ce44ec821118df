import numpy as np
import pytest

from preprocessor import Config, SparsePoly, parse_poly

WORKED_FACTOR = "2*x*y + x^2*y + 9*x*y^2 + 7*x^3*y + x^4*y + 9*x^3*y^2"
WORKED_COFACTOR_F = "5*y^4 + 5*y^5 + 3*x + 2*x*y^2 + x^2*y"
WORKED_COFACTOR_G = "5*y^5 + 4*x + x*y^3 + 2*x^2"


@pytest.fixture
def r() -> SparsePoly:
    return parse_poly(WORKED_FACTOR)


@pytest.fixture
def worked_pair(r):
    """f = r*a and g = r*b whose initial forms along (1,0) are 5xy^5(y+1)(2+9y) and 5xy^6(2+9y)."""
    return r * parse_poly(WORKED_COFACTOR_F), r * parse_poly(WORKED_COFACTOR_G)


@pytest.fixture
def config() -> Config:
    return Config()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
