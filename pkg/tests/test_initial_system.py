import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from preprocessor import (
    Config,
    DegenerateFormError,
    Tropism,
    UnivariateForm,
    aberth_roots,
    common_roots,
    numeric_rank,
    parse_poly,
    solve_stage2,
    sylvester_matrix,
    tropicalization,
    tropism_intersection,
    matrix_for_tropism,
    univariatize,
)
from preprocessor.initial_system import cluster_roots, solve_initial_system

WORKED_FORM_F = UnivariateForm((10, 55, 45))
WORKED_FORM_G = UnivariateForm((10, 45))


def test_univariatize_worked_pair(worked_pair):
    f, g = worked_pair
    form_f = univariatize(f, Tropism(1, 0))
    form_g = univariatize(g, Tropism(1, 0))
    assert form_f.coeffs == pytest.approx((10, 55, 45))
    assert form_g.coeffs == pytest.approx((10, 45))
    assert form_f.source_shift == (1, 5)
    assert form_g.source_shift == (1, 6)


def test_univariatize_after_the_diagonal_transform():
    form = univariatize(parse_poly("54*x^13*y^2 + 6*x^14*y"), Tropism(-1, -1))
    assert form.coeffs == (54, 6)
    assert form.source_shift == (-15, -2)


def test_univariatize_monomial_initial_form_is_constant(r):
    form = univariatize(r, Tropism(1, 1))
    assert form.is_constant()


@pytest.mark.parametrize("shift", [-2, -1, 1, 3])
def test_other_representatives_give_the_same_form(r, shift):
    for t in tropicalization(r):
        m = matrix_for_tropism(t)
        base = univariatize(r, t, m)
        other = univariatize(r, t, m.shifted(shift))
        assert other.coeffs == base.coeffs
        # B moves by shift * A, and A is constant on the initial form
        assert other.source_shift == (base.source_shift.i, base.source_shift.j + shift * base.source_shift.i)


def test_other_representatives_keep_the_common_roots(worked_pair):
    f, g = worked_pair
    m = matrix_for_tropism(Tropism(1, 0)).shifted(2)
    roots = common_roots(univariatize(f, Tropism(1, 0), m), univariatize(g, Tropism(1, 0), m), 1e-8)
    assert len(roots) == 1
    assert abs(roots[0] + 2 / 9) <= 1e-10


def test_sylvester_of_two_lines():
    matrix = sylvester_matrix(UnivariateForm((-1, 1)), UnivariateForm((1, 1)))
    assert matrix.tolist() == [[1, -1], [1, 1]]
    assert np.linalg.det(matrix) == pytest.approx(2)


def test_sylvester_of_a_shared_root():
    line = UnivariateForm((-1, 1))
    assert abs(np.linalg.det(sylvester_matrix(line, line))) == pytest.approx(0)


def test_sylvester_of_constants_is_degenerate():
    with pytest.raises(DegenerateFormError):
        sylvester_matrix(UnivariateForm((2,)), UnivariateForm((3,)))


def test_sylvester_determinant_is_the_resultant(rng):
    for _ in range(50):
        m, n = (int(d) for d in rng.integers(1, 5, size=2))
        alpha = rng.normal(size=m) + 1j * rng.normal(size=m)
        beta = rng.normal(size=n) + 1j * rng.normal(size=n)
        lp, lq = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        p, q = UnivariateForm.from_roots(alpha, lp), UnivariateForm.from_roots(beta, lq)
        expected = lp ** n * lq ** m * np.prod(alpha[:, None] - beta[None, :])
        matrix = sylvester_matrix(p, q)
        hadamard = np.prod(np.linalg.norm(matrix, axis=1))
        assert abs(np.linalg.det(matrix) - expected) <= 1e-10 * hadamard


def test_numeric_rank():
    assert numeric_rank(np.eye(3), 1e-8) == 3
    assert numeric_rank(np.zeros((3, 3)), 1e-8) == 0
    p = UnivariateForm.from_roots([1, 2])
    q = UnivariateForm.from_roots([1, -3])
    assert numeric_rank(sylvester_matrix(p, q), 1e-8) == 3


def test_aberth_finds_every_root():
    expected = [1, 2, 3, -1j, 0.5 + 0.5j]
    found = aberth_roots(UnivariateForm.from_roots(expected, 2 - 1j).coeffs)
    assert sorted(found, key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(expected, key=lambda z: (complex(z).real, complex(z).imag)), abs=1e-10
    )


def test_aberth_keeps_zero_roots():
    found = aberth_roots([0, 0, -4, 1])
    assert sorted(abs(z) for z in found) == pytest.approx([0, 0, 4])


def test_aberth_warns_when_not_converged(caplog):
    coeffs = UnivariateForm.from_roots([1, 2, 3, -1j, 0.5 + 0.5j, 4]).coeffs
    with caplog.at_level(logging.WARNING, logger="preprocessor.initial_system"):
        aberth_roots(coeffs, max_iterations=1)
    assert "root iteration not converged" in caplog.text


def test_cluster_roots_merges_a_double_root():
    clusters = cluster_roots([1 + 1e-8, 1 - 1e-8, 3], 1e-6)
    assert [(pytest.approx(z), m) for z, m in clusters] == [(1, 2), (3, 1)]


def test_common_root_of_the_worked_forms():
    roots = common_roots(WORKED_FORM_F, WORKED_FORM_G, 1e-8)
    assert len(roots) == 1
    assert abs(roots[0] + 2 / 9) <= 1e-10


def test_common_root_under_the_diagonal_tropism():
    roots = common_roots(UnivariateForm((54, 6)), UnivariateForm((72, 8)), 1e-8)
    assert roots == [pytest.approx(-9)]


def test_common_root_through_the_rank_test():
    p = UnivariateForm.from_roots([1, 2])
    q = UnivariateForm.from_roots([1, -3])
    assert common_roots(p, q, 1e-8) == [pytest.approx(1, abs=1e-10)]


def test_binomial_pair_uses_primitive_roots():
    roots = common_roots(UnivariateForm((1, 0, 1)), UnivariateForm((-1, 0, 0, 0, 1)), 1e-8)
    assert sorted(roots, key=lambda z: z.imag) == [pytest.approx(-1j), pytest.approx(1j)]


def test_coprime_pairs_have_no_common_roots(rng):
    for _ in range(20):
        p = UnivariateForm.from_roots(rng.normal(size=4) + 1j * rng.normal(size=4))
        q = UnivariateForm.from_roots(rng.normal(size=3) + 1j * rng.normal(size=3))
        assert common_roots(p, q, 1e-6) == []


def test_common_roots_do_not_depend_on_scale():
    p = UnivariateForm.from_roots([1, 2, -1])
    q = UnivariateForm.from_roots([1, 2, 3j])
    base = common_roots(p, q, 1e-8)
    scaled = common_roots(UnivariateForm.from_roots([1, 2, -1], 1e6), UnivariateForm.from_roots([1, 2, 3j], 1e-3), 1e-8)
    assert len(base) == len(scaled) == 2
    assert np.allclose(base, scaled, atol=1e-10)


def test_gcd_degree_matches_the_roots_found():
    f = parse_poly("(y - 1)*(y - 2)*(y + 1) + x")
    g = parse_poly("(y - 1)*(y - 2)*(y - 3i) + x")
    result = solve_initial_system(f, g, Tropism(1, 0), Config())
    assert result.method == "sylvester"
    assert result.gcd_degree == 2
    assert sum(root.multiplicity for root in result.roots) == 2
    assert [root.z for root in result.roots] == [pytest.approx(1, abs=1e-9), pytest.approx(2, abs=1e-9)]


def test_roots_respect_the_residual_bound(worked_pair):
    f, g = worked_pair
    config = Config()
    tropisms = tropism_intersection(tropicalization(f), tropicalization(g))
    for t, roots in solve_stage2(f, g, tropisms, config).items():
        for root in roots:
            assert root.tropism == t
            assert root.z != 0
            assert root.residual_f <= config.root_tolerance
            assert root.residual_g <= config.root_tolerance


def test_stage2_on_the_worked_pair(worked_pair):
    f, g = worked_pair
    tropisms = tropism_intersection(tropicalization(f), tropicalization(g))
    table = solve_stage2(f, g, tropisms)
    assert list(table) == tropisms
    (root,) = table[Tropism(1, 0)]
    assert abs(root.z + 2 / 9) <= 1e-10
    (root,) = table[Tropism(-1, -1)]
    assert abs(root.z + 9) <= 1e-8


def test_stage2_with_a_pool_gives_the_same_table(worked_pair):
    f, g = worked_pair
    tropisms = tropism_intersection(tropicalization(f), tropicalization(g))
    with ThreadPoolExecutor(max_workers=2) as pool:
        assert solve_stage2(f, g, tropisms, Config(), pool) == solve_stage2(f, g, tropisms, Config())


def test_stage2_without_tropisms_is_empty():
    assert solve_stage2(parse_poly("1 + x"), parse_poly("1 + y"), []) == {}
