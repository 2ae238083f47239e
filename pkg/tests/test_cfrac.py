from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topvol.cfrac import (
    X1,
    X2,
    QuadraticIrrational,
    approx_error,
    best_approx_check,
    cf_expand,
    cf_period,
    convergents,
    error_between,
    error_less,
    surd_sign,
)
from topvol.errors import DomainError
from topvol.lens import Slope

GOLDEN = QuadraticIrrational(1, 1, 2, 5)


def float_expand(x, k, dps=200):
    # independent oracle: floor/reciprocal at high precision
    with mpmath.workdps(dps):
        y = x.to_mpf(dps)
        out = []
        for _ in range(k):
            a = int(mpmath.floor(y))
            out.append(a)
            y = 1 / (y - a)
        return out


def test_printed_expansions():
    assert cf_expand(X1, 9) == [0, 1, 1, 1, 7, 7, 2, 7, 7]
    assert cf_expand(X2, 7) == [0, 9, 7, 2, 7, 7, 2]
    assert cf_expand(GOLDEN, 4) == [1, 1, 1, 1]


@pytest.mark.parametrize("x", [X1, X2, GOLDEN, QuadraticIrrational(-3, 2, 7, 11)])
def test_expansion_matches_float_oracle(x):
    assert cf_expand(x, 40) == float_expand(x, 40)


def test_periods():
    assert cf_period(X1) == ([0, 1, 1, 1], [7, 7, 2])
    pre, period = cf_period(X2)
    assert pre == [0, 9]
    assert "".join(map(str, period)) in "772772"


def test_invalid_inputs():
    with pytest.raises(DomainError):
        QuadraticIrrational(1, 1, 1, 4)
    with pytest.raises(DomainError):
        QuadraticIrrational(1, 0, 1, 2)
    with pytest.raises(DomainError):
        QuadraticIrrational(1, 1, 0, 2)
    with pytest.raises(DomainError):
        cf_expand(X1, 0)
    with pytest.raises(DomainError):
        cf_expand(0.5, 3)


def test_first_convergents():
    assert [str(c) for c in convergents(X1, 4)] == ["0/1", "1/1", "1/2", "2/3"]
    assert str(convergents(X2, 2)[1]) == "1/9"


@pytest.mark.parametrize("x", [X1, X2])
def test_convergents_reduced_and_increasing(x):
    conv = convergents(x, 30)
    for a, b in zip(conv, conv[1:]):
        assert b.q > a.q or (a.index == 0 and b.q >= a.q)
        assert gcd(b.p, b.q) == 1
        assert abs(a.p * b.q - b.p * a.q) == 1


@pytest.mark.parametrize("x", [X1, X2])
def test_sandwich_bounds(x):
    conv = convergents(x, 23)
    for i in range(21):
        c = conv[i]
        assert error_between(x, c.p, c.q, Fraction(1, conv[i + 2].q), Fraction(1, conv[i + 1].q))


@pytest.mark.parametrize("x", [X1, X2])
def test_errors_strictly_decrease(x):
    conv = convergents(x, 25)
    for a, b in zip(conv, conv[1:]):
        assert error_less(x, (b.p, b.q), (a.p, a.q))


@pytest.mark.parametrize("x", [X1, X2])
def test_growth_ratios(x):
    conv = convergents(x, 22)
    for i in range(3, 21):
        ratio = Fraction(conv[i + 1].q, conv[i].q)
        assert 2 <= ratio <= 8


def test_growth_fails_for_small_index():
    conv = convergents(X1, 4)
    assert Fraction(conv[3].q, conv[2].q) < 2


@given(
    st.fractions(max_denominator=10**6),
    st.fractions(max_denominator=10**6),
    st.sampled_from([2, 3, 5, 130]),
)
def test_surd_sign_against_float(r, s, d):
    with mpmath.workdps(60):
        value = mpmath.mpf(r.numerator) / r.denominator + mpmath.mpf(s.numerator) / s.denominator * mpmath.sqrt(d)
    expected = (value > 0) - (value < 0)
    assert surd_sign(r, s, d) == expected


def test_approx_error_is_absolute_value():
    r, s = approx_error(X1, 1, 1)
    assert surd_sign(r, s, 130) > 0
    with mpmath.workdps(40):
        assert abs(r + s * mpmath.sqrt(130) - abs(X1.to_mpf(40) - 1)) < 1e-35


def test_best_approx_convergent_itself():
    conv = convergents(X1, 10)
    verdict = best_approx_check(X1, Slope(conv[5].p, conv[5].q), conv)
    assert verdict.ok
    assert 5 in verdict.checked


@pytest.mark.parametrize("x", [X1, X2])
def test_best_approx_brute_force(x):
    # every fraction with q < q_{i+1} is no closer than the i-th convergent
    conv = convergents(x, 8)
    for q in range(1, 120):
        for p in range(0, q + 1):
            if gcd(p, q) != 1:
                continue
            verdict = best_approx_check(x, Slope(p, q), conv)
            assert verdict.ok, (p, q, verdict)


def test_best_approx_skips_large_q():
    conv = convergents(X1, 5)
    verdict = best_approx_check(X1, Slope(1, 10**6), conv)
    assert verdict.checked == ()
    assert len(verdict.skipped) == 5


def test_best_approx_flags_a_corrupted_convergent():
    conv = convergents(X1, 6)
    # 1/2 is closer to x1 than the fake "convergent" 1/1 planted at index 2
    from topvol.cfrac import Convergent

    fake = conv[:2] + [Convergent(2, 1, 1)] + conv[3:]
    verdict = best_approx_check(X1, Slope(1, 2), fake)
    assert not verdict.ok


def test_best_approx_preconditions():
    with pytest.raises(DomainError):
        best_approx_check(X1, Slope(1, 2), [])
    with pytest.raises(DomainError):
        best_approx_check(X1, Slope(1, -2), convergents(X1, 3))
