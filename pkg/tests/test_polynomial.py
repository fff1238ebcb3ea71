import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padelab.errors import RootfindingError
from padelab.polynomial import (
    Polynomial,
    RootSet,
    deflate,
    poly_eval,
    poly_from_roots,
    poly_roots,
    remove_common_factors,
)


def test_eval_root_of_z2_plus_1():
    p = Polynomial([1, 0, 1])
    assert abs(poly_eval(p, 1j)) < 1e-15


def test_eval_constant():
    p = Polynomial([1])
    assert poly_eval(p, 7 + 2j) == 1


def test_eval_constant_term():
    p = Polynomial([6, -5, 1])
    assert poly_eval(p, 0) == 6


def test_eval_vectorized_matches_scalar():
    p = Polynomial([1, -2.5, 0.5j, 3])
    zs = np.array([0.3 + 0.1j, -1.2, 2j])
    vec = poly_eval(p, zs)
    for z, v in zip(zs, vec):
        assert abs(v - poly_eval(p, complex(z))) < 1e-14


def test_trimming_and_degree():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert len(p.coefficients) == 2
    zero = Polynomial([0, 0])
    assert zero.is_zero and zero.degree == 0


def test_roots_of_z2_plus_1():
    roots = poly_roots(Polynomial([1, 0, 1]))
    flat = sorted(roots.flatten(), key=lambda z: z.imag)
    assert abs(flat[0] + 1j) < 1e-12
    assert abs(flat[1] - 1j) < 1e-12


def test_roots_cube_roots_of_unity():
    roots = poly_roots(Polynomial([-1, 0, 0, 1]))
    expected = sorted(np.exp(2j * np.pi * np.arange(3) / 3), key=lambda z: (z.real, z.imag))
    found = sorted(roots.flatten(), key=lambda z: (z.real, z.imag))
    for a, b in zip(found, expected):
        assert abs(a - b) < 1e-12


def test_roots_expanded_cubic():
    # (z-1)(z-2)(z-3) expanded by hand: z^3 - 6 z^2 + 11 z - 6
    p = Polynomial([-6, 11, -6, 1])
    found = sorted((r for r, _ in poly_roots(p)), key=lambda z: z.real)
    for a, b in zip(found, [1.0, 2.0, 3.0]):
        assert abs(a - b) < 1e-10


def test_roots_zero_polynomial_errors():
    with pytest.raises(RootfindingError, match="undefined roots"):
        poly_roots(Polynomial([0]))


def test_multiplicity_clustering_double():
    p = poly_from_roots([2, 2, 5], leading=1)
    roots = poly_roots(p, tol=1e-6)
    by_mult = {m: r for r, m in roots}
    assert 2 in by_mult and abs(by_mult[2] - 2) < 1e-6
    assert 1 in by_mult and abs(by_mult[1] - 5) < 1e-8


def test_multiplicity_clustering_triple():
    p = poly_from_roots([2, 2, 2, -1], leading=1)
    roots = poly_roots(p, tol=1e-4)
    by_mult = {m: r for r, m in roots}
    assert 3 in by_mult and abs(by_mult[3] - 2) < 1e-4
    assert 1 in by_mult and abs(by_mult[1] + 1) < 1e-8


def test_distinct_close_roots_not_merged():
    p = poly_from_roots([1.0, 1.0 + 1e-4], leading=1)
    roots = poly_roots(p, tol=1e-6)
    assert len(roots) == 2


def test_from_roots_simple():
    p = poly_from_roots([1, -1], leading=1)
    assert np.allclose(p.coefficients, [-1, 0, 1])


def test_from_roots_empty():
    p = poly_from_roots([], leading=5)
    assert p.degree == 0 and p.coefficients[0] == 5


def test_from_roots_quadratic():
    p = poly_from_roots([2, 3], leading=1)
    assert np.allclose(p.coefficients, [6, -5, 1])


def test_from_roots_eval_small_at_roots():
    rng = np.random.default_rng(7)
    roots = rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8)
    p = poly_from_roots(roots, leading=2 - 1j)
    scale = p.coeff_scale()
    for r in roots:
        assert abs(poly_eval(p, r)) <= 1e-12 * scale


def test_cancel_shared_linear_factor():
    p = poly_from_roots([1, 2], leading=1)
    q = poly_from_roots([1, 5], leading=1)
    cp, cq = remove_common_factors(p, q, 1e-8)
    assert cp.degree == 1 and cq.degree == 1
    assert abs(poly_eval(cp, 2)) < 1e-10
    assert abs(poly_eval(cq, 5)) < 1e-10


def test_cancel_noop_for_coprime():
    p = Polynomial([1, 0, 1])
    q = Polynomial([2, 1])
    cp, cq = remove_common_factors(p, q, 1e-8)
    assert cp is p and cq is q


def test_cancel_constructed_doublet():
    p = poly_from_roots([1.0, 3.0], leading=1)
    q = poly_from_roots([1.0 + 1e-12, -4.0], leading=2)
    cp, cq = remove_common_factors(p, q, 1e-8)
    assert cp.degree == 1 and cq.degree == 1
    # ratio preserved away from the cancelled neighborhood
    for z in np.exp(2j * np.pi * np.arange(8) / 8) * 10:
        before = poly_eval(p, z) / poly_eval(q, z)
        after = poly_eval(cp, z) / poly_eval(cq, z)
        assert abs(before - after) <= 1e-8 * abs(before)


def test_cancel_idempotent():
    p = poly_from_roots([1, 2, 3], leading=1)
    q = poly_from_roots([1 + 1e-11, 7], leading=1)
    p1, q1 = remove_common_factors(p, q, 1e-8)
    p2, q2 = remove_common_factors(p1, q1, 1e-8)
    assert np.allclose(p1.coefficients, p2.coefficients)
    assert np.allclose(q1.coefficients, q2.coefficients)


def test_deflate_exact():
    p = poly_from_roots([2, 5], leading=3)
    d = deflate(p, 2)
    assert np.allclose(d.coefficients, poly_from_roots([5], leading=3).coefficients)


def test_rootset_total_multiplicity():
    rs = RootSet([(1, 2), (3, 1)])
    assert rs.total_multiplicity == 3
    assert list(rs.flatten()) == [1, 1, 3]


def test_taylor_shift():
    p = Polynomial([1, 2, 3])  # 1 + 2z + 3z^2
    # p(1 + h) = 6 + 8h + 3h^2
    shifted = p.taylor_at(1.0, 3)
    assert np.allclose(shifted, [6, 8, 3, 0])


@st.composite
def small_polys(draw):
    deg = draw(st.integers(min_value=1, max_value=12))
    coeffs = draw(
        st.lists(
            st.tuples(
                st.floats(min_value=-2, max_value=2, allow_nan=False),
                st.floats(min_value=-2, max_value=2, allow_nan=False),
            ),
            min_size=deg + 1,
            max_size=deg + 1,
        )
    )
    c = [complex(a, b) for a, b in coeffs]
    if abs(c[-1]) < 0.1:
        c[-1] = 1.0
    return Polynomial(c)


@settings(max_examples=40, deadline=None)
@given(small_polys())
def test_roots_roundtrip_random(p):
    roots = poly_roots(p, tol=1e-6)
    q = poly_from_roots(roots, leading=p.leading)
    assert q.degree == p.degree
    err = np.max(np.abs(q.coefficients - p.coefficients))
    assert err <= 1e-8 * p.coeff_scale()


def test_product_roots_are_union():
    rng = np.random.default_rng(3)
    ra = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
    rb = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
    pa = poly_from_roots(ra, leading=1)
    pb = poly_from_roots(rb, leading=1)
    prod = pa.multiply(pb)
    found = sorted(poly_roots(prod, tol=1e-6).flatten(), key=lambda z: (z.real, z.imag))
    expected = sorted(np.concatenate([ra, rb]), key=lambda z: (z.real, z.imag))
    for a, b in zip(found, expected):
        assert abs(a - b) < 1e-8


def test_json_roundtrip():
    p = Polynomial([1 + 2j, -0.5, 3j])
    q = Polynomial.from_json(p.to_json())
    assert np.allclose(p.coefficients, q.coefficients)
