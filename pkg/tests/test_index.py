import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from homportrait import (
    NotWellPosed,
    Reason,
    VectorField,
    cubic_index,
    linear_index,
    quadratic_index,
    winding_index,
)
from homportrait.core import DegenerateField
from homportrait.index import VanishesOnCircle, index_batch, quadratic_index_data, symbolic_index

# seeded perturbation used by the cubic examples
EPS = np.array([
    1.2301533574825744e-06, 0.00029874553750846986, -0.00027413785536221756, -0.0008905918387572742,
    -0.00045467078517172257, -0.0009916465549964623, 6.0143602597438484e-05, 0.0013402152455545336,
])

F = VectorField.from_coeffs


def test_linear_examples():
    assert linear_index(F(1, [1, 0, 0, -1])) == -1
    assert linear_index(F(1, [1, 0, 0, 2])) == 1
    assert linear_index(F(1, [0.1, 1, -1, 0.1])) == 1
    assert winding_index(F(1, [0.1, 1, -1, 0.1])) == 1
    with pytest.raises(NotWellPosed):
        linear_index(F(1, [1, 1, 1, 1]))


def test_quadratic_examples():
    f = F(2, [1, 2, 0, 0, -1, 1])
    data = quadratic_index_data(f)
    assert (data.lam, data.mu) == pytest.approx((1, -2))
    assert quadratic_index(f) == 0 == winding_index(f)
    g = F(2, [1, 0.1, -1, 0.1, 2, 0])
    assert quadratic_index(g) == 2 == winding_index(g)
    with pytest.raises(NotWellPosed) as exc:
        quadratic_index(F(2, [1, 0, 0, 0, 0, 1]))
    assert exc.value.reasons & Reason.LAMBDA_MU_ZERO


def test_cubic_examples():
    f = F(3, np.array([1, 0, 0, 0, 0, 0, 0, 1.0]) + EPS)
    assert cubic_index(f) == 1 == winding_index(f)
    z3 = F(3, np.array([1, 0, -3, 0, 0, 3, 0, -1.0]) + EPS)
    assert cubic_index(z3) == 3 == winding_index(z3)
    assert cubic_index(z3.swapped()) == -3 == winding_index(z3.swapped())


def test_cubic_unperturbed_symmetric_field_is_not_well_posed():
    with pytest.raises(NotWellPosed):
        cubic_index(F(3, [1, 0, 0, 0, 0, 0, 0, 1]))


def test_winding_examples():
    assert winding_index(F(1, [1, 0, 0, 1])) == 1
    assert winding_index(F(2, [1, 0, -1, 0, 2, 0])) == 2
    assert winding_index(F(3, [1, 0, -3, 0, 0, 3, 0, -1])) == 3


def test_winding_rejects_zero_on_circle():
    with pytest.raises(VanishesOnCircle):
        winding_index(F(2, [1, 0, 0, 0, 1, 0]))  # P = x^2, Q = xy vanish on x = 0


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_symbolic_equals_winding_seeded(degree):
    rng = np.random.default_rng(100 + degree)
    rows = rng.standard_normal((1500, 2 * degree + 2))
    idx, reasons = index_batch(rows, degree)
    for row, k, r in zip(rows, idx, reasons):
        if r == 0:
            assert winding_index(F(degree, row)) == k


coeffs = lambda n: st.lists(st.floats(-3, 3, allow_nan=False), min_size=2 * n + 2, max_size=2 * n + 2)


def _sym(f):
    try:
        return symbolic_index(f)
    except DegenerateField:
        assume(False)


@given(st.sampled_from([1, 2, 3]).flatmap(lambda n: st.tuples(st.just(n), coeffs(n))))
def test_index_parity_and_range(case):
    n, c = case
    i = _sym(F(n, c))
    assert abs(i) <= n and (i - n) % 2 == 0


@given(st.sampled_from([1, 2, 3]).flatmap(lambda n: st.tuples(st.just(n), coeffs(n))), st.floats(0.01, 100))
def test_index_scale_invariant(case, lam):
    n, c = case
    f = F(n, c)
    i = _sym(f)
    try:
        assert symbolic_index(F(n, np.asarray(c) * lam)) == i
    except DegenerateField:
        assume(False)


@given(st.sampled_from([1, 2, 3]).flatmap(lambda n: st.tuples(st.just(n), coeffs(n))))
def test_sign_flip_of_one_component_negates_index(case):
    n, c = case
    f = F(n, c)
    i = _sym(f)
    try:
        assert symbolic_index(f.q_negated()) == -i
        assert symbolic_index(f.swapped()) == -i
    except DegenerateField:
        assume(False)


@given(st.sampled_from([1, 3]).flatmap(lambda n: st.tuples(st.just(n), coeffs(n))))
def test_negation_preserves_index_for_odd_degree(case):
    n, c = case
    f = F(n, c)
    i = _sym(f)
    try:
        assert symbolic_index(f.negated()) == i
    except DegenerateField:
        assume(False)
