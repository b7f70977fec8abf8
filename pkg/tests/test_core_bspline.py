import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdbspline.core_bspline import (
    OpenKnotVector,
    bernstein_knots,
    degree_elevation_matrix,
    endpoint_deriv_matrix,
    eval_bspline_derivs,
    eval_bspline_table,
    eval_bsplines,
    knot_insertion_matrix,
    refinement_matrix,
    validate_knot_vector,
)
from mdbspline.errors import (
    IntervalMismatch,
    MultiplicityExceeded,
    NonDecreasingViolated,
    NotNested,
    NotOpen,
    OrderTooHigh,
    OutOfDomain,
    TooShort,
)

from helpers import cox_de_boor, dense_basis, left_limit_basis, random_knot_vector


@st.composite
def knot_vectors(draw, max_degree=6):
    p = draw(st.integers(0, max_degree))
    a = draw(st.sampled_from([0.0, -1.0, 2.5]))
    h = draw(st.floats(0.5, 4.0))
    inner = draw(st.lists(st.floats(0.05, 0.95), max_size=4, unique=True))
    inner = sorted({round(a + h * t, 6) for t in inner})
    mults = [draw(st.integers(1, max(p, 1))) for _ in inner]
    knots = [a] * (p + 1) + [v for v, m in zip(inner, mults) for _ in range(m)] + [a + h] * (p + 1)
    return OpenKnotVector(knots, p)


def spline_values(kv, coeffs, x, k=0):
    return dense_basis(kv, x, k) @ coeffs


# validation ----------------------------------------------------------------------


def test_validate_cubic_bezier():
    kv = validate_knot_vector([0, 0, 0, 0, 2, 2, 2, 2], 3)
    assert kv.dimension == 4
    assert kv.interval == (0.0, 2.0)


def test_validate_bernstein_quadratic():
    assert validate_knot_vector([0, 0, 0, 1, 1, 1], 2).dimension == 3


@pytest.mark.parametrize(
    "knots, p, err",
    [
        ([0, 0, 1, 0.5, 1, 1], 1, NonDecreasingViolated),
        ([0, 0, 1, 1], 2, TooShort),
        ([0, 0, 0, 1, 1, 1], 1, NotOpen),  # end multiplicity p + 2
        ([0, 0.5, 1, 1], 1, NotOpen),
        ([0, 0, 1, 1, 1], 2, TooShort),
        ([1, 1, 1, 1], 1, NotOpen),
        ([0, 0, 0.5, 0.5, 0.5, 1, 1], 1, MultiplicityExceeded),
    ],
)
def test_validate_rejects(knots, p, err):
    with pytest.raises(err):
        validate_knot_vector(knots, p)


def test_interior_multiplicity_p_plus_one_allowed():
    kv = validate_knot_vector([0, 0, 0.5, 0.5, 1, 1], 1)
    assert kv.dimension == 4


# evaluation ----------------------------------------------------------------------


def test_bernstein_midpoint():
    ev = eval_bsplines(bernstein_knots(2), 0.5)
    assert ev.first_index == 0
    np.testing.assert_allclose(ev.values, [0.25, 0.5, 0.25], atol=1e-15)


@given(knot_vectors())
def test_left_end_interpolation(kv):
    ev = eval_bsplines(kv, kv.interval[0])
    assert ev.first_index == 0
    assert ev.values[0] == pytest.approx(1.0, abs=1e-15)
    assert np.all(ev.values[1:] == 0.0)


@given(knot_vectors())
def test_right_end_is_left_limit(kv):
    ev = eval_bsplines(kv, kv.interval[1])
    assert ev.first_index + kv.degree == kv.dimension - 1
    assert ev.values[-1] == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(ev.values[:-1], 0.0, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(knot_vectors(max_degree=5), st.floats(0.0, 0.999))
def test_matches_literal_recursion(kv, t):
    a, b = kv.interval
    x = a + t * (b - a)
    ev = eval_bsplines(kv, x)
    expect = np.array([cox_de_boor(kv.knots, j, kv.degree, x) for j in range(kv.dimension)])
    got = np.zeros(kv.dimension)
    got[ev.first_index : ev.first_index + kv.degree + 1] = ev.values
    np.testing.assert_allclose(got, expect, atol=1e-14)


def test_out_of_domain():
    kv = bernstein_knots(2)
    with pytest.raises(OutOfDomain):
        eval_bsplines(kv, 1.0 + 1e-12)
    with pytest.raises(OutOfDomain):
        eval_bspline_derivs(kv, -0.1, 1)


def test_bernstein_first_derivative_at_zero():
    ders = eval_bspline_derivs(bernstein_knots(2), 0.0, 1)
    np.testing.assert_allclose(ders[1].values, [-2.0, 2.0, 0.0])


@given(knot_vectors(), st.floats(0, 1))
def test_order_zero_matches_values(kv, t):
    x = kv.interval[0] + t * (kv.interval[1] - kv.interval[0])
    (d0,) = eval_bspline_derivs(kv, x, 0)
    ev = eval_bsplines(kv, x)
    assert d0.first_index == ev.first_index
    np.testing.assert_array_equal(d0.values, ev.values)


def test_order_too_high():
    with pytest.raises(OrderTooHigh):
        eval_bspline_derivs(bernstein_knots(2), 0.3, 3)
    with pytest.raises(OrderTooHigh):
        endpoint_deriv_matrix(bernstein_knots(2), 3, "left")


def test_first_derivative_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(30):
        kv = random_knot_vector(rng, int(rng.integers(1, 7)))
        a, b = kv.interval
        breaks = kv.breaks[0]
        x = rng.uniform(a + 1e-3, b - 1e-3)
        if np.min(np.abs(breaks - x)) < 1e-4:
            continue
        h = 1e-6
        fd = (dense_basis(kv, x + h) - dense_basis(kv, x - h)) / (2 * h)
        exact = dense_basis(kv, x, 1)
        scale = max(1.0, np.abs(exact).max())
        np.testing.assert_allclose(fd, exact, atol=1e-5 * scale)


# partition of unity, positivity, smoothness -----------------------------------------


@settings(deadline=None)
@given(knot_vectors(max_degree=8))
def test_partition_of_unity_and_nonnegativity(kv):
    x = np.linspace(*kv.interval, 1000)
    _, ders = eval_bspline_table(kv, x, 0)
    np.testing.assert_allclose(ders[0].sum(axis=1), 1.0, atol=1e-13)
    assert ders[0].min() >= -1e-14


@given(knot_vectors(max_degree=6))
def test_local_support_window(kv):
    x = np.linspace(*kv.interval, 101)
    first, _ = eval_bspline_table(kv, x, 0)
    u, p = kv.knots, kv.degree
    for xi, j0 in zip(x, first):
        # every B-spline in the window has xi inside its support
        for j in range(j0, j0 + p + 1):
            assert u[j] <= xi <= u[j + p + 1]


@settings(deadline=None)
@given(knot_vectors(max_degree=7))
def test_smoothness_at_interior_knots(kv):
    vals, mult = kv.breaks
    p = kv.degree
    for t, m in zip(vals[1:-1], mult[1:-1]):
        for r in range(0, p - m + 1):
            left = left_limit_basis(kv, t, r)
            right = dense_basis(kv, t, r)
            scale = max(1.0, np.abs(right).max())
            np.testing.assert_allclose(left, right, atol=1e-9 * scale)


# endpoint derivatives ------------------------------------------------------------------


def test_endpoint_bernstein_left():
    np.testing.assert_allclose(endpoint_deriv_matrix(bernstein_knots(2), 1, "left"), [[1, -2], [0, 2]])


@given(knot_vectors())
def test_endpoint_order_zero(kv):
    np.testing.assert_array_equal(endpoint_deriv_matrix(kv, 0, "left"), [[1.0]])
    np.testing.assert_array_equal(endpoint_deriv_matrix(kv, 0, "right"), [[1.0]])


@given(knot_vectors())
def test_endpoint_matches_general_evaluator(kv):
    k = min(2, kv.degree)
    p, n = kv.degree, kv.dimension
    a, b = kv.interval
    ders = eval_bspline_derivs(kv, b, k)
    expect = np.array([ders[r].values[p - k :] for r in range(k + 1)]).T
    got = endpoint_deriv_matrix(kv, k, "right")
    np.testing.assert_allclose(got, expect, rtol=1e-12, atol=1e-12 * max(1, np.abs(expect).max()))
    ders = eval_bspline_derivs(kv, a, k)
    expect = np.array([ders[r].values[: k + 1] for r in range(k + 1)]).T
    got = endpoint_deriv_matrix(kv, k, "left")
    np.testing.assert_allclose(got, expect, rtol=1e-12, atol=1e-12 * max(1, np.abs(expect).max()))
    assert n >= k + 1


@given(knot_vectors(max_degree=6), st.data())
def test_derivative_coefficient_recursion(kv, data):
    # D f = sum f_{j,1} b_{j,p-1} on the knot vector with one end knot dropped
    p = kv.degree
    if p == 0:
        return
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = rng.normal(size=kv.dimension)
    u = kv.knots
    alpha = p / (u[p + 1 : p + kv.dimension] - u[1 : kv.dimension])
    f1 = alpha * np.diff(f)
    lower = OpenKnotVector(u[1:-1], p - 1)
    x = np.linspace(*kv.interval, 57)
    np.testing.assert_allclose(
        spline_values(kv, f, x, 1), spline_values(lower, f1, x), atol=1e-12 * max(1, np.abs(f1).max())
    )


# refinement ----------------------------------------------------------------------------


def test_knot_insertion_linear_midpoint():
    r, refined = knot_insertion_matrix(OpenKnotVector([0, 0, 1, 1], 1), 0.5)
    np.testing.assert_allclose(r.toarray(), [[1, 0.5, 0], [0, 0.5, 1]])
    np.testing.assert_array_equal(refined.knots, [0, 0, 0.5, 1, 1])


def test_knot_insertion_preserves_spline():
    rng = np.random.default_rng(3)
    for _ in range(40):
        kv = random_knot_vector(rng, int(rng.integers(0, 7)))
        a, b = kv.interval
        t = rng.uniform(a, b)
        r, refined = knot_insertion_matrix(kv, t)
        col_nnz = np.diff(r.T.row_offsets)
        assert col_nnz.max() <= 2
        f = rng.normal(size=kv.dimension)
        x = rng.uniform(a, b, 100)
        np.testing.assert_allclose(
            spline_values(refined, r.rmatvec(f), x), spline_values(kv, f, x), atol=1e-13 * max(1, np.abs(f).max())
        )


def test_insert_existing_knot_to_full_multiplicity():
    kv = OpenKnotVector([0, 0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1, 1], 3)
    r, refined = knot_insertion_matrix(kv, 0.5)
    f = np.array([1.0, -2.0, 3.0, 0.5, 2.0, -1.0, 4.0])
    g = r.rmatvec(f)
    np.testing.assert_allclose(spline_values(refined, g, 0.5), spline_values(kv, f, 0.5), atol=1e-13)
    np.testing.assert_allclose(
        left_limit_basis(refined, 0.5) @ g, left_limit_basis(kv, 0.5) @ f, atol=1e-13
    )
    with pytest.raises(MultiplicityExceeded):
        knot_insertion_matrix(refined, 0.5)


def test_knot_insertion_out_of_domain():
    with pytest.raises(OutOfDomain):
        knot_insertion_matrix(bernstein_knots(2), 1.0)


def test_degree_elevation_linear():
    r, target = degree_elevation_matrix(OpenKnotVector([0, 0, 1, 1], 1))
    np.testing.assert_allclose(r.toarray(), [[1, 0.5, 0], [0, 0.5, 1]])
    np.testing.assert_array_equal(target.knots, [0, 0, 0, 1, 1, 1])


def test_degree_elevation_preserves_spline():
    rng = np.random.default_rng(5)
    for _ in range(40):
        kv = random_knot_vector(rng, int(rng.integers(0, 7)))
        r, target = degree_elevation_matrix(kv)
        assert target.degree == kv.degree + 1
        vals, mult = kv.breaks
        np.testing.assert_array_equal(target.breaks[1], mult + 1)
        f = rng.normal(size=kv.dimension)
        x = rng.uniform(*kv.interval, 100)
        np.testing.assert_allclose(spline_values(target, r.rmatvec(f), x), spline_values(kv, f, x), atol=1e-12)


def test_degree_elevation_bernstein_endpoints_exact():
    f = np.array([3.0, -1.0, 2.0, 7.0])
    r, _ = degree_elevation_matrix(bernstein_knots(3))
    g = r.rmatvec(f)
    assert g[0] == f[0]
    assert g[-1] == f[-1]


def test_refinement_identity():
    kv = OpenKnotVector([0, 0, 0, 0.3, 0.7, 0.7, 1, 1, 1], 2)
    np.testing.assert_array_equal(refinement_matrix(kv, kv).toarray(), np.eye(kv.dimension))


def test_refinement_quadratic_to_degree_seven():
    src = OpenKnotVector([0, 0, 0, 1, 1, 1], 2)
    dst = bernstein_knots(7)
    r = refinement_matrix(src, dst)
    f = np.array([2.0, 1.5, 2.0])
    x = np.random.default_rng(0).uniform(0, 1, 50)
    np.testing.assert_allclose(spline_values(dst, r.rmatvec(f), x), spline_values(src, f, x), atol=1e-12)


def test_refinement_rejects_non_nested():
    src = OpenKnotVector([0, 0, 0, 0.5, 1, 1, 1], 2)
    with pytest.raises(NotNested):
        refinement_matrix(src, bernstein_knots(3))  # knot 0.5 missing
    with pytest.raises(NotNested):
        refinement_matrix(bernstein_knots(3), bernstein_knots(2))
    with pytest.raises(IntervalMismatch):
        refinement_matrix(bernstein_knots(2), bernstein_knots(2, 0, 2))


def test_refinement_chain_is_product():
    rng = np.random.default_rng(8)
    for _ in range(20):
        a = random_knot_vector(rng, int(rng.integers(0, 5)))
        # b: elevate once and insert a knot; c: elevate again and insert another
        _, b = degree_elevation_matrix(a)
        _, b = knot_insertion_matrix(b, rng.uniform(*a.interval))
        _, c = degree_elevation_matrix(b)
        _, c = knot_insertion_matrix(c, rng.uniform(*a.interval))
        direct = refinement_matrix(a, c).toarray()
        composed = (refinement_matrix(a, b) @ refinement_matrix(b, c)).toarray()
        np.testing.assert_allclose(direct, composed, atol=1e-12)
