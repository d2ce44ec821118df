import math
from fractions import Fraction

import numpy as np
import pytest

from preprocessor import (
    Config,
    ExponentData,
    SeriesGerm,
    Tropism,
    evaluate,
    exponent_condition,
    gen_instance,
    germ_point,
    parse_poly,
    preprocess,
    residual_order,
    second_term,
)
from preprocessor.puiseux import expected_order, grow_germ, is_exact_branch, shifted_form

C0 = -2 / 9
SAMPLES = (1e-2, 1e-3, 1e-4)
EAST = Tropism(1, 0)
LINE = "y - 1 + x"


def worked_germ(c1=-1 / 9) -> SeriesGerm:
    return SeriesGerm(EAST, 1, C0, Fraction(1), c1)


def log_slope(ts, values) -> float:
    slope, _ = np.polyfit(np.log(ts), np.log(np.abs(values)), 1)
    return float(slope)


def test_exponent_condition_on_a_common_line():
    line = parse_poly(LINE)
    assert exponent_condition(line, line, EAST, 1.0) == (Fraction(1), ExponentData(1, 1, 1, 1))


def test_exponent_condition_rejects_an_isolated_root():
    f = parse_poly("y - 1 + x")
    g = parse_poly("y - 1 + x^2")
    assert exponent_condition(f, g, EAST, 1.0) is None


def test_exponent_condition_on_the_worked_pair(worked_pair):
    f, g = worked_pair
    w, data = exponent_condition(f, g, EAST, C0)
    assert w == 1
    assert data.as_tuple() == (1, 1, 1, 1)


def test_exponent_condition_scales_with_d():
    line = parse_poly(LINE)
    w, _ = exponent_condition(line, line, EAST, 1.0, d=3)
    assert w == 3


def test_second_term_on_the_worked_pair(worked_pair):
    f, g = worked_pair
    w, data = exponent_condition(f, g, EAST, C0)
    c1 = second_term(f, g, EAST, C0, w, data)
    assert abs(c1 + 1 / 9) <= 1e-8


def test_second_term_on_a_common_line():
    line = parse_poly(LINE)
    w, data = exponent_condition(line, line, EAST, 1.0)
    assert second_term(line, line, EAST, 1.0, w, data) == pytest.approx(-1)


def test_second_term_rejects_an_inconsistent_pair():
    f, g = parse_poly("1 + x + y"), parse_poly("2 + x + y")
    diagonal = Tropism(-1, -1)
    w, data = exponent_condition(f, g, diagonal, -1.0)
    assert second_term(f, g, diagonal, -1.0, w, data) is None


def test_residual_order_of_the_worked_germ(worked_pair, r):
    f, g = worked_pair
    germ = worked_germ()
    assert residual_order(f, germ, SAMPLES) >= 1.9
    assert residual_order(g, germ, SAMPLES) >= 1.9
    # r/(xy) is exactly 5t^2 along the germ
    assert residual_order(r, germ, SAMPLES) == pytest.approx(2, abs=1e-3)


def test_residual_of_an_exact_line_is_infinite():
    germ = SeriesGerm(EAST, 1, 1.0, Fraction(1), -1.0)
    assert residual_order(parse_poly(LINE), germ, SAMPLES) == math.inf


def test_wrong_second_term_loses_one_order(r):
    assert residual_order(r, worked_germ(-1 / 9 + 0.1), SAMPLES) == pytest.approx(1, abs=0.1)


def test_residual_order_needs_two_samples(r):
    with pytest.raises(ValueError):
        residual_order(r, worked_germ(), [1e-3, 1e-3])


def test_no_second_term_means_no_cancelling_c1(rng):
    f = parse_poly("y - 1 + x")
    g = parse_poly("y - 1 + x^2")
    for _ in range(20):
        c1 = complex(rng.normal(), rng.normal())
        for w in (Fraction(1, 2), Fraction(1), Fraction(2)):
            germ = SeriesGerm(EAST, 1, 1.0, w, c1)
            slopes = residual_order(f, germ, SAMPLES), residual_order(g, germ, SAMPLES)
            assert min(slopes) <= 1.05


def test_germ_point_under_the_identity():
    x, y = germ_point(worked_germ(), 1e-3)
    assert x == pytest.approx(1e-3)
    assert y == pytest.approx(C0 - 1e-3 / 9)


def test_germ_back_transformation_keeps_the_order(r):
    diagonal = Tropism(-1, -1)
    outcome = grow_germ(r, r, diagonal, -9.0, Config())
    assert outcome.accepted
    germ = outcome.germ
    assert germ.c1 == pytest.approx(63)
    samples = (1e-3, 1e-4, 1e-5)
    values = [evaluate(r, *germ_point(germ, t)) for t in samples]
    shift = shifted_form(r, diagonal).shift
    assert log_slope(samples, values) == pytest.approx(residual_order(r, germ, samples) + shift.i, abs=0.02)


def test_grow_germ_on_the_factor_alone(r):
    outcome = grow_germ(r, r, EAST, C0, Config())
    assert outcome.accepted
    assert outcome.germ.w == 1
    assert abs(outcome.germ.c1 + 1 / 9) <= 1e-8
    assert outcome.germ.slope_f >= expected_order(outcome.germ, 1) - 0.1


def test_planted_germ_matches_the_factor_germ(worked_pair, r):
    f, g = worked_pair
    config = Config()
    planted = grow_germ(f, g, EAST, C0, config).germ
    alone = grow_germ(r, r, EAST, C0, config).germ
    assert planted.w == alone.w
    assert abs(planted.c1 - alone.c1) <= 1e-6


def test_generated_germs_match_the_planted_factor():
    config = Config()
    compared = 0
    for seed in range(1, 6):
        f, g, truth = gen_instance(3, 4, planted=True, seed=seed)
        for germ in preprocess(f, g, config).germs:
            if germ.exact:
                continue
            alone = grow_germ(truth.factor, truth.factor, germ.tropism, germ.c0, config)
            assert alone.germ is not None
            assert alone.germ.w == germ.w
            assert abs(alone.germ.c1 - germ.c1) <= 1e-6 * max(1.0, abs(germ.c1))
            compared += 1
    assert compared > 0


def test_fractional_exponent_is_noted():
    r = parse_poly("(y - 1)^2 - x")
    outcome = grow_germ(r, r, EAST, 1.0, Config())
    assert outcome.accepted
    assert outcome.germ.w == Fraction(1, 2)
    assert outcome.germ.c1 == pytest.approx(1)
    assert outcome.notes == ["non-integer exponent w = 1/2"]


def test_exact_branch():
    f = parse_poly("(y - 1)*(x + 2)")
    g = parse_poly("(y - 1)*(x + 3)")
    config = Config()
    assert is_exact_branch(f, g, EAST, 1.0, config)
    outcome = grow_germ(f, g, EAST, 1.0, config)
    assert outcome.accepted
    assert outcome.germ.exact
    assert outcome.germ.slope_f == math.inf


def test_root_without_higher_terms_is_rejected():
    f = parse_poly("y - 1")
    g = parse_poly("y - 1 + x")
    outcome = grow_germ(f, g, EAST, 1.0, Config())
    assert not outcome.accepted
    assert outcome.data is None
    assert exponent_condition(f, g, EAST, 1.0) is None
