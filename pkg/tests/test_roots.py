"""Exact Sturm-chain root isolation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gausslab.roots import (
    NEG_INF,
    POS_INF,
    Polynomial,
    count_real_roots_in,
    isolate_and_refine,
    sturm_sequence,
)


def poly(*coeffs):
    return Polynomial.from_coeffs(coeffs)


def test_cubic_with_known_roots():
    # (x-1)(x-2)(x-3) = -6 + 11x - 6x^2 + x^3
    p = poly(-6, 11, -6, 1)
    roots = isolate_and_refine(p)
    assert [r.value for r in roots] == pytest.approx([1.0, 2.0, 3.0], abs=1e-12)
    for r in roots:
        assert r.certified
        assert r.lo <= Fraction(r.value).limit_denominator(10 ** 15) <= r.hi \
            or float(r.lo) <= r.value <= float(r.hi)


def test_half_open_interval_semantics():
    # roots of x^2 - x are 0 and 1; (0, 1] keeps only the right endpoint
    p = poly(0, -1, 1)
    assert count_real_roots_in(p, 0, 1) == 1
    assert count_real_roots_in(p, -1, 1) == 2
    assert count_real_roots_in(p, 0, Fraction(1, 2)) == 0
    roots = isolate_and_refine(p, 0, 1)
    assert len(roots) == 1
    assert roots[0].lo == roots[0].hi == 1
    assert roots[0].value == 1.0


def test_endpoint_root_at_left_is_excluded():
    p = poly(0, 1)  # x
    assert count_real_roots_in(p, 0, 5) == 0
    assert isolate_and_refine(p, 0, 5) == []
    assert count_real_roots_in(p, -1, 0) == 1


def test_repeated_roots_counted_once():
    # x^5 - 2x^4 + x^3 = x^3 (x-1)^2
    p = poly(0, 0, 0, 1, -2, 1)
    roots = isolate_and_refine(p)
    assert len(roots) == 2
    assert [r.value for r in roots] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_no_real_roots():
    assert isolate_and_refine(poly(1, 0, 1)) == []
    assert count_real_roots_in(poly(1, 0, 1), NEG_INF, POS_INF) == 0


def test_rational_coefficients():
    # x^2 - 1/9
    p = poly(Fraction(-1, 9), 0, 1)
    roots = isolate_and_refine(p)
    assert [r.value for r in roots] == pytest.approx([-1 / 3, 1 / 3], abs=1e-13)


def test_content_normalized():
    p = poly(Fraction(-2, 3), 0, Fraction(4, 3))
    q = p.content_normalized()
    assert q.coeffs == (Fraction(-1), Fraction(0), Fraction(2))
    neg = poly(2, 0, -4).content_normalized()
    assert neg.leading > 0
    assert neg.coeffs == (Fraction(-1), Fraction(0), Fraction(2))


def test_wilkinson_style_product_on_subranges():
    p = poly(1)
    for k in range(1, 8):
        p = p * poly(-k, 1)
    assert count_real_roots_in(p, NEG_INF, POS_INF) == 7
    assert count_real_roots_in(p, Fraction(5, 2), Fraction(11, 2)) == 3
    roots = isolate_and_refine(p, Fraction(5, 2), Fraction(11, 2))
    assert [r.value for r in roots] == pytest.approx([3.0, 4.0, 5.0], abs=1e-11)


def test_sturm_chain_ends_in_constant_for_square_free():
    chain = sturm_sequence(poly(-2, 0, 1))
    assert chain[0].coeffs == (Fraction(-2), Fraction(0), Fraction(1))
    assert chain[-1].degree == 0


def test_zero_and_constant_polynomials():
    assert Polynomial.from_coeffs([0, 0]).is_zero
    assert Polynomial.from_coeffs([0, 0]).degree == -1
    assert isolate_and_refine(poly(5)) == []


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=6))
def test_isolation_agrees_with_count(coeffs):
    p = Polynomial.from_coeffs(coeffs)
    if p.is_zero or p.degree < 1:
        return
    roots = isolate_and_refine(p)
    assert len(roots) == count_real_roots_in(p, NEG_INF, POS_INF)
    values = [r.value for r in roots]
    assert values == sorted(values)
    for r in roots:
        if r.lo == r.hi:
            assert p.eval_exact(r.lo) == 0
        else:
            # residual at the polished estimate is tiny at the local scale
            scale = max(abs(float(c)) for c in p.coeffs)
            assert abs(p.eval_float(r.value)) <= 1e-6 * scale * (
                1.0 + abs(r.value)) ** p.degree
