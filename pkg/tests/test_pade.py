import numpy as np
import pytest

from padelab.models import exp_model, from_partial_fractions, rational
from padelab.pade import (
    ExceptionalSet,
    ProductOracle,
    build_pade,
    divided_difference,
    exceptional_set,
    leja_order,
    newton_coefficients,
    newton_to_monomial,
    normalize_denominator,
)
from padelab.polynomial import Polynomial, poly_eval, poly_from_roots
from padelab.potential import LevelRegion, UniformCircleMeasure
from padelab.tables import TriangularTable, confluent_table, roots_of_unity_table

from _oracles import cauchy_divided_difference, classical_pade_from_taylor

UNIT_CIRCLE = UniformCircleMeasure(0, 1)


def explicit_table(*rows):
    return TriangularTable("explicit", max_row=len(rows), rows=tuple(tuple(r) for r in rows))


def oracle_of(f):
    return ProductOracle(f, Polynomial([1.0]))


def test_dd_slope_of_square():
    f = rational([0, 0, 1], [1])  # z^2
    assert abs(divided_difference(oracle_of(f), [0, 1]) - 1) < 1e-14


def test_dd_confluent_derivative_rule():
    assert abs(divided_difference(oracle_of(exp_model()), [0, 0]) - 1) < 1e-14


def test_dd_leading_coefficient_of_quadratic():
    f = rational([0, 0, 1], [1])
    assert abs(divided_difference(oracle_of(f), [1, 2, 3]) - 1) < 1e-13


def test_dd_matches_cauchy_closed_form():
    f = rational([1], [-2, 1])  # 1/(z-2)
    nodes = leja_order(roots_of_unity_table().row(9))
    coeffs = newton_coefficients(oracle_of(f), nodes)
    for k in range(1, 9):
        expected = cauchy_divided_difference(nodes[: k + 1], 2.0)
        assert abs(coeffs[k] - expected) <= 1e-12 * max(1.0, abs(expected))


def test_dd_confluent_matches_cauchy_closed_form():
    f = rational([1], [-2, 1])
    nodes = [0.0] * 6
    coeffs = newton_coefficients(oracle_of(f), nodes)
    for k in range(6):
        expected = cauchy_divided_difference(np.zeros(k + 1), 2.0)
        assert abs(coeffs[k] - expected) <= 1e-14 * max(1.0, abs(expected))


def test_newton_to_monomial_roundtrip():
    nodes = np.array([0.5, -1.0, 2.0 + 1j])
    coeffs = np.array([1.0, 2.0, -0.5j])
    p = newton_to_monomial(coeffs, nodes)
    for z in (0.3, 1j, -2.0):
        direct = (
            coeffs[0]
            + coeffs[1] * (z - nodes[0])
            + coeffs[2] * (z - nodes[0]) * (z - nodes[1])
        )
        assert abs(poly_eval(p, z) - direct) < 1e-13


def test_leja_order_starts_at_max_modulus_and_keeps_repeats_adjacent():
    nodes = [0.1, 3.0, 0.1, -2.0]
    ordered = list(leja_order(nodes))
    assert ordered[0] == 3.0
    idx = [i for i, z in enumerate(ordered) if z == 0.1]
    assert idx == [len(ordered) - 2, len(ordered) - 1] or idx[1] == idx[0] + 1


def test_build_linear_interpolation_case():
    # f = z^2 at order (1,0) on nodes {0,1}: P must be the Lagrange line z
    f = rational([0, 0, 1], [1])
    table = explicit_table([0.5], [0.0, 1.0])
    approx = build_pade(f, table, 1, 0)
    assert approx.denominator.degree == 0
    assert np.allclose(approx.numerator.coefficients, [0, 1], atol=1e-13)


def test_build_reproduces_rational_of_same_type():
    f = rational([1], [1, -1])  # 1/(1-z)
    table = explicit_table([0.5], [0.0, 0.5])
    approx = build_pade(f, table, 0, 1)
    for z in (2.0, -1.0, 0.3 + 0.4j):
        assert abs(approx.eval(z) - f.eval(z)) < 1e-12


def test_build_classical_exp_11():
    # hand-solved Taylor conditions: (1 + z/2)/(1 - z/2)
    approx = build_pade(exp_model(), confluent_table(0), 1, 1)
    assert np.allclose(approx.numerator.coefficients, [1, 0.5], atol=1e-12)
    assert np.allclose(approx.denominator.coefficients, [1, -0.5], atol=1e-12)
    assert approx.residual < 1e-12


def test_build_classical_matches_taylor_oracle():
    f = exp_model()
    for n, m in [(2, 2), (3, 1), (1, 3), (4, 2), (0, 2), (5, 0)]:
        approx = build_pade(f, confluent_table(0), n, m)
        p_ref, q_ref = classical_pade_from_taylor(f.taylor(0, n + m), n, m)
        p_got = approx.numerator.coefficients
        q_got = approx.denominator.coefficients
        assert np.allclose(p_got, p_ref[: len(p_got)], atol=1e-8)
        assert np.allclose(q_got, q_ref[: len(q_got)], atol=1e-8)


def test_build_interpolates_at_nodes():
    f = from_partial_fractions([(2, 1), (3, 1), (4, 1)])
    table = roots_of_unity_table()
    n, m = 7, 2
    approx = build_pade(f, table, n, m)
    for z in table.row(n + m + 1):
        defect = abs(f.eval(z) * approx.denominator(z) - approx.numerator(z))
        assert defect < 1e-10


def test_build_node_count_contract():
    # row n+m+1 exists exactly when the table has it
    f = rational([1], [-2, 1])
    table = roots_of_unity_table(max_row=5)
    build_pade(f, table, 2, 2)  # row 5: fine
    with pytest.raises(ValueError):
        build_pade(f, table, 3, 2)  # needs row 6


def test_degenerate_block_flagged_and_still_exact():
    # f of type (0,1) built at (1,2): the solution family is 2-dimensional
    f = rational([3], [3, -1])  # 1/(1 - z/3), pole off the unit circle
    table = roots_of_unity_table()
    approx = build_pade(f, table, 1, 2)
    assert approx.degenerate
    for z in (2.0, 0.25j, -3.0):
        assert abs(approx.eval(z) - f.eval(z)) < 1e-9


def test_normalize_split_example():
    # D = disk of radius 4: roots {2, 8} give (z-2)(1 - z/8)
    q = poly_from_roots([2.0, 8.0], leading=3.0)
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    Q, inside, outside = normalize_denominator(q, region)
    assert np.allclose(Q.coefficients, [-2, 1.25, -0.125])
    assert len(inside) == 1 and abs(inside[0] - 2.0) < 1e-10
    assert len(outside) == 1 and abs(outside[0] - 8.0) < 1e-10


def test_normalize_all_inside_is_monic():
    q = poly_from_roots([1.5, -2.0], leading=5.0)
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    Q, inside, outside = normalize_denominator(q, region)
    assert abs(Q.leading - 1.0) < 1e-14
    assert len(inside) == 2 and not outside


def test_normalize_all_outside_value_one_at_origin():
    q = poly_from_roots([5.0, -6.0, 8.0j], leading=2.0)
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    Q, inside, outside = normalize_denominator(q, region)
    assert abs(poly_eval(Q, 0) - 1.0) < 1e-12
    assert len(outside) == 3 and not inside


def test_normalize_none_region_is_classical():
    q = poly_from_roots([2.0], leading=-0.7)
    Q, inside, outside = normalize_denominator(q, None)
    assert abs(poly_eval(Q, 0) - 1.0) < 1e-14
    assert not inside and outside == (2.0,)


def test_normalize_singular_zero_at_origin_outside():
    from padelab.errors import NormalizationError

    q = Polynomial([0, 1.0])  # zero at the origin
    with pytest.raises(NormalizationError):
        normalize_denominator(q, None)


def test_exceptional_set_radius_formula():
    # eps/(2 m n^2) = 0.1 / (2*2*100) = 2.5e-4
    f = from_partial_fractions([(2, 1), (3, 1), (4, 1)])
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    approx = build_pade(f, roots_of_unity_table(), 10, 2, region=region)
    omega = exceptional_set(approx, 0.1)
    assert len(omega.disks) == approx.k_inside == 2
    for _, radius in omega.disks:
        assert radius == pytest.approx(2.5e-4, rel=1e-12)


def test_exceptional_set_empty_without_inside_zeros():
    approx = build_pade(exp_model(), confluent_table(0), 2, 1)
    omega = exceptional_set(approx, 0.1)
    assert omega.disks == ()
    assert omega.radii_sum() == 0.0


def test_exceptional_series_budget():
    # sum over n of m * eps/(2 m n^2) = eps * pi^2 / 12 <= eps
    eps, m = 0.37, 3
    total = sum(m * eps / (2 * m * n**2) for n in range(1, 200001))
    assert total <= eps * np.pi**2 / 12 + 1e-12
    assert total <= eps


def test_exceptional_union_and_covers():
    s1 = ExceptionalSet(((2.0, 0.001),), 0.1)
    s2 = ExceptionalSet(((3.0, 0.002),), 0.1)
    u = ExceptionalSet.union([s1, s2], 0.1)
    assert u.radii_sum() == pytest.approx(0.003)
    assert bool(u.covers(2.0 + 0.0005j)[0])
    assert not bool(u.covers(2.5)[0])


def test_montessus_free_poles_approach_true_poles():
    # pole at a converges like (a/4)^n: comfortably within 10x of that at n=30
    f = from_partial_fractions([(2, 1), (3, 1), (4, 1)])
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    approx = build_pade(f, roots_of_unity_table(), 30, 2, region=region)
    poles = sorted(approx.free_poles.flatten(), key=lambda z: z.real)
    assert abs(poles[0] - 2) < 10 * 0.5**30
    assert abs(poles[1] - 3) < 10 * 0.75**30


def test_build_rejects_node_on_pole():
    from padelab.errors import PoleProximityError

    f = rational([1], [-1, 1])  # pole at 1 sits on the unit circle nodes
    with pytest.raises(PoleProximityError):
        build_pade(f, roots_of_unity_table(), 2, 1)


def test_approximant_json_shape():
    approx = build_pade(exp_model(), confluent_table(0), 1, 1)
    data = approx.to_json()
    assert set(data) == {"n", "m", "P", "Q", "free_zeros", "free_poles", "residual", "degenerate"}
    assert data["n"] == 1 and data["m"] == 1
