"""Two-term angle test and the Fourier-coefficient criterion."""
from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hillspec.diagnostics import (
    check_condition1,
    check_condition2,
    check_condition2_alpha,
    even_numerator_certificate,
    odd_distance_search,
)
from hillspec.errors import ZeroCoefficient, ZeroProduct
from hillspec.potential import from_fourier

FAIL_TOL = 1e-9

rationals = st.builds(
    Fraction, st.integers(min_value=-100, max_value=100), st.integers(min_value=1, max_value=50)
)


@pytest.mark.parametrize(
    ("alpha", "verdict", "minimum", "witness"),
    [(0.0, "holds", 1.0, None), (1.0, "fails", 0.0, 1), (0.5, "fails", 0.0, 2)],
)
def test_angle_test_on_literal_values(alpha: float, verdict: str, minimum: float, witness: int | None) -> None:
    result = check_condition2_alpha(alpha, Q=1000)
    assert result.verdict == verdict
    assert result.linear.min_distance == pytest.approx(minimum, abs=1e-12)
    if witness is not None:
        assert result.linear.witness_q == witness


@settings(max_examples=60, deadline=None)
@given(value=rationals)
def test_rational_alpha_verdict_follows_numerator_parity(value: Fraction) -> None:
    """alpha = m/n in lowest terms: even m holds, odd m fails at q = n."""

    alpha = float(value)
    result = check_condition2_alpha(alpha, Q=1000)
    if value.numerator % 2 == 0:
        assert result.verdict == "holds"
        assert result.linear.certificate == (value.numerator, value.denominator)
        minimum, _, _ = odd_distance_search(alpha, 10 * 1000)
        assert minimum > FAIL_TOL
    else:
        assert result.verdict == "fails"
        assert result.linear.min_distance < FAIL_TOL


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
def test_verdict_symmetric_in_sign_of_alpha(alpha: float) -> None:
    plus = check_condition2_alpha(alpha, Q=200)
    minus = check_condition2_alpha(-alpha, Q=200)
    assert plus.verdict == minus.verdict
    assert plus.linear.min_distance == pytest.approx(minus.linear.min_distance, abs=1e-9)


def test_irrational_angle_is_borderline() -> None:
    result = check_condition2_alpha(math.sqrt(2.0) - 1.0, Q=100)
    assert result.verdict == "borderline"
    assert result.linear.certificate is None
    assert result.linear.min_distance > FAIL_TOL


def test_doubled_form_is_reported() -> None:
    result = check_condition2_alpha(0.5, Q=100)
    assert result.doubled.verdict == "fails"
    assert check_condition2_alpha(2.0 / 3.0, Q=100).doubled.verdict == "holds"
    payload = result.as_dict()
    assert payload["verdict"] == "fails"
    assert payload["two_q_alpha"]["scale"] == 2


def test_two_term_potential_angle() -> None:
    """alpha = arg(ab) / pi."""

    same = check_condition2(1.0, 1.0, Q=100)
    assert same.verdict == "holds" and same.equal_moduli
    assert check_condition2(1.0, -1.0, Q=100).verdict == "fails"
    quarter = check_condition2(2.0, 1j, Q=100)
    assert quarter.alpha == pytest.approx(0.5)
    assert quarter.verdict == "fails" and quarter.equal_moduli is False


def test_angle_test_input_errors() -> None:
    with pytest.raises(ZeroProduct):
        check_condition2(0.0, 1.0)
    with pytest.raises(ValueError):
        check_condition2_alpha(0.3, Q=50)
    with pytest.raises(ValueError):
        check_condition2_alpha(math.inf)


def test_even_numerator_certificate() -> None:
    assert even_numerator_certificate(2.0 / 3.0, 100) == (2, 3)
    assert even_numerator_certificate(1.0 / 3.0, 100) is None
    assert even_numerator_certificate(math.pi, 100) is None


def test_condition1_holds_on_range() -> None:
    p = from_fourier({1: 1.0, -1: 1.0, 2: 0.5, -2: 0.5})
    result = check_condition1(p, s=0.0, c=0.1, eps=0.1, nrange=range(1, 3))
    assert result.verdict == "holds-on-range"
    assert result.first_violation is None
    assert [row.n for row in result.rows] == [1, 2]


def test_condition1_reports_first_violation() -> None:
    """q_2 q_-2 = -1/4 is real negative, so the sign condition fails at n = 2."""

    p = from_fourier({1: 1.0, -1: 1.0, 2: 0.5j, -2: 0.5j})
    result = check_condition1(p, s=0.0, c=0.1, eps=0.1, nrange=range(1, 3))
    assert result.verdict == "fails"
    assert result.first_violation == 2
    assert not result.rows[1].product_ok and result.rows[1].ratio_ok
    assert result.as_dict()["first_violation"] == 2


def test_condition1_zero_coefficient() -> None:
    p = from_fourier({1: 1.0, -1: 1.0, 2: 0.5, -2: 0.5})
    with pytest.raises(ZeroCoefficient) as info:
        check_condition1(p, s=0.0, c=0.1, eps=0.1, nrange=range(1, 4))
    assert info.value.n == 3
