import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from homportrait import (
    Classified,
    Degenerate,
    PortraitLabel,
    Reason,
    VectorField,
    classify,
    classify_linear,
    is_global_attractor,
    is_global_repeller,
    portrait_table,
    winding_index,
)
from homportrait.classifier import DEGENERATE, classify_batch, radial_growth
from homportrait.core import DegenerateField, NoConvergence
from homportrait.invlines import infinity_signs
from homportrait.montecarlo import NormalStream, sample_coeffs
from homportrait.realroots import real_roots_batch
from homportrait.invlines import direction_coeffs

F = VectorField.from_coeffs
L = PortraitLabel
EPS = np.array([
    1.2301533574825744e-06, 0.00029874553750846986, -0.00027413785536221756, -0.0008905918387572742,
    -0.00045467078517172257, -0.0009916465549964623, 6.0143602597438484e-05, 0.0013402152455545336,
])


def test_saddle():
    out = classify(F(1, [1, 0, 0, -1]))
    assert (out.label, out.index, out.lines) == (L.L1, -1, 2)
    assert out.warnings  # x = 0 is invariant
    strict = classify(F(1, [1, 0, 0, -1]), strict=True)
    assert isinstance(strict, Degenerate) and strict.reasons & Reason.X_AXIS_INVARIANT


def test_kappa4_plus_one_field_is_c9():
    out = classify(F(3, [1, 0, 0, -1, 1, 1, 0, 0]))
    assert (out.label, out.index, out.lines) == (L.C9, 1, 0)
    assert out.index_source == "winding"
    assert winding_index(F(3, [1, 0, 0, -1, 1, 1, 0, 0])) == 1
    no_fallback = classify(F(3, [1, 0, 0, -1, 1, 1, 0, 0]), oracle_fallback=False)
    assert isinstance(no_fallback, Degenerate)


def test_quadratic_lambda_mu_zero_is_degenerate():
    out = classify(F(2, [1, 0, 0, 0, 0, 1]))
    assert isinstance(out, Degenerate)
    assert out.reasons & Reason.LAMBDA_MU_ZERO
    assert "λμ=0" in str(out)


def test_linear_examples():
    assert classify_linear(1, 0, 0, -1).label == L.L1
    assert classify_linear(1, 0, 0, 2).label == L.L2
    assert classify_linear(0.1, 1, -1, 0.1).label == L.L3
    assert isinstance(classify_linear(1, 0, 0, 1), Degenerate)  # star node, disc = 0
    assert isinstance(classify_linear(0, 1, -1, 0), Degenerate)  # centre, trace = 0


def test_linear_routes_agree():
    rng = np.random.default_rng(11)
    for row in rng.standard_normal((3000, 4)):
        a = classify_linear(*row)
        b = classify(F(1, row), strict=True)
        if isinstance(a, Classified) and isinstance(b, Classified):
            assert a.label == b.label


def test_portrait_tables():
    assert len(portrait_table(1)) == 3
    assert len(portrait_table(2)) == 5
    t3 = portrait_table(3)
    assert len(t3) == 8
    assert sum(len(e.labels) for e in t3) == 9


def test_tiebreak_constructed_c3():
    f = F(3, [1, 0, 0, 2, -8, 1, 10, 0])
    out = classify(f)
    assert (out.label, out.index, out.lines, out.tiebreak_used) == (L.C3, 1, 4, True)


def test_c4_sample_alternates():
    stream = NormalStream(2024, 0)
    rows = sample_coeffs(3, stream, 20_000)
    res = classify_batch(rows, 3)
    c4 = L.for_degree(3).index(L.C4)
    picks = np.flatnonzero(res.label == c4)[:20]
    assert picks.size > 0
    for k in picks:
        f = F(3, rows[k])
        out = classify(f)
        assert out.label == L.C4 and (out.index, out.lines) == (1, 4)
        assert winding_index(f) == 1
        assert infinity_signs(f).alternating


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_batch_matches_scalar_and_oracles(degree):
    stream = NormalStream(77, degree)
    rows = sample_coeffs(degree, stream, 2000)
    res = classify_batch(rows, degree)
    labels = L.for_degree(degree)
    _, real = real_roots_batch(direction_coeffs(rows, degree))
    for k, row in enumerate(rows):
        f = F(degree, row)
        out = classify(f, strict=True, oracle_fallback=False)
        if res.label[k] == DEGENERATE:
            assert isinstance(out, Degenerate)
            continue
        assert isinstance(out, Classified)
        assert out.label == labels[res.label[k]]
        assert out.lines == real[k].sum()
        assert out.index == winding_index(f)


@pytest.mark.parametrize("degree", [1, 3])
def test_batch_attractor_matches_scalar(degree):
    stream = NormalStream(5, degree)
    rows = sample_coeffs(degree, stream, 400)
    res = classify_batch(rows, degree)
    for k, row in enumerate(rows):
        if res.attractor[k] == 2 or res.label[k] < 0:
            continue
        f = F(degree, row)
        expected = -1 if is_global_attractor(f) else (1 if is_global_repeller(f) else 0)
        assert res.attractor[k] == expected


def test_radial_attractor():
    f = F(3, -np.array([1, 0, 0, 0, 0, 0, 0, 1.0]) + EPS)
    assert is_global_attractor(f)
    assert not is_global_repeller(f)
    assert is_global_repeller(f.negated())


def test_linear_focus_attractor_and_rotation_sense():
    # same stable focus, turning either way; a sign error in R/Θ would flip one of them
    assert is_global_attractor(F(1, [-0.1, 1, -1, -0.1]))
    assert is_global_attractor(F(1, [-0.1, -1, 1, -0.1]))
    assert radial_growth(F(1, [-0.1, 1, -1, -0.1])) == pytest.approx(-0.2 * np.pi, rel=1e-6)


def test_even_degree_has_no_attractor():
    with pytest.raises(ValueError):
        is_global_attractor(F(2, [1, 0, 0, 0, 0, 1]))


cubic = st.lists(st.floats(-3, 3, allow_nan=False), min_size=8, max_size=8)


@given(cubic)
def test_attractor_repeller_symmetry(c):
    f = F(3, c)
    try:
        a = is_global_attractor(f)
        r_neg = is_global_repeller(f.negated())
    except (DegenerateField, NoConvergence):
        assume(False)
    assert a == r_neg


@given(st.sampled_from([1, 2, 3]).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.floats(-3, 3, allow_nan=False), min_size=2 * n + 2, max_size=2 * n + 2))
))
def test_label_invariant_under_negation(case):
    n, c = case
    f = F(n, c)
    a = classify(f, strict=True, oracle_fallback=False)
    b = classify(f.negated(), strict=True, oracle_fallback=False)
    assume(isinstance(a, Classified) and isinstance(b, Classified))
    assert a.label == b.label
