"""Continued fractions of real quadratic irrationals in exact arithmetic.

The expansion runs on integer states (P + sqrt(D)) / Q with Q | D - P^2, so no
floating point enters.  Quantities |q x - p| are numbers r + s sqrt(d) with
rational r, s and are compared exactly by squaring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import mpmath

from .errors import DomainError


def _is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadraticIrrational:
    """The number (a + b sqrt(d)) / c."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.c == 0:
            raise DomainError("denominator must be non-zero")
        if self.d < 2 or _is_square(self.d):
            raise DomainError(f"d = {self.d} must be a positive non-square")
        if self.b == 0:
            raise DomainError("b = 0 gives a rational number")

    def surd(self):
        """The value as rational coefficients (r, s) of r + s sqrt(d)."""
        return Fraction(self.a, self.c), Fraction(self.b, self.c)

    def to_mpf(self, precision=50):
        with mpmath.workdps(precision):
            return (self.a + self.b * mpmath.sqrt(self.d)) / self.c

    def __float__(self):
        return float(self.to_mpf(20))


# the two slopes of the lines where the leading volume terms of W and P agree
X1 = QuadraticIrrational(16, 1, 42, 130)
X2 = QuadraticIrrational(16, -1, 42, 130)


@dataclass(frozen=True)
class Convergent:
    index: int
    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0 or gcd(self.p, self.q) != 1:
            raise DomainError(f"{self.p}/{self.q} is not a reduced convergent")

    def __str__(self):
        return f"{self.p}/{self.q}"


def _initial_state(x):
    # (a + b sqrt d)/c == (P + sqrt D)/Q with D = b^2 d, signs folded into P, Q
    sign = 1 if x.b > 0 else -1
    P, D, Q = sign * x.a, x.b * x.b * x.d, sign * x.c
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return P, Q, D


def _floor_state(P, Q, D):
    r = isqrt(D)
    if Q > 0:
        return (P + r) // Q
    return -((P + r) // -Q) - 1


def _states(x):
    P, Q, D = _initial_state(x)
    while True:
        a = _floor_state(P, Q, D)
        yield a, (P, Q)
        P = a * Q - P
        Q = (D - P * P) // Q


def cf_expand(x, k):
    """First ``k`` partial quotients [a0; a1, ..., a_{k-1}] of x."""
    if not isinstance(x, QuadraticIrrational):
        raise DomainError("cf_expand needs a QuadraticIrrational")
    if k < 1:
        raise DomainError("need at least one partial quotient")
    out = []
    for a, _ in _states(x):
        out.append(a)
        if len(out) == k:
            return out


def cf_period(x):
    """Split the expansion into (pre-period, period) by detecting a repeated state."""
    seen = {}
    quotients = []
    for i, (a, state) in enumerate(_states(x)):
        if state in seen:
            start = seen[state]
            return quotients[:start], quotients[start:]
        seen[state] = i
        quotients.append(a)


def convergents(x, k):
    """First ``k`` convergents p_i/q_i of x."""
    out = []
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for i, a in enumerate(cf_expand(x, k)):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(Convergent(i, p, q))
    return out


# -- exact comparison of numbers r + s sqrt(d) ---------------------------------


def surd_sign(r, s, d):
    """Sign of r + s sqrt(d) for rationals r, s and non-square d > 0."""
    r, s = Fraction(r), Fraction(s)
    sr = (r > 0) - (r < 0)
    ss = (s > 0) - (s < 0)
    if sr == 0 or ss == 0 or sr == ss:
        return sr or ss
    # opposite signs: compare r^2 with s^2 d
    lhs, rhs = r * r, s * s * d
    if lhs == rhs:
        return 0
    return sr if lhs > rhs else ss


def approx_error(x, p, q):
    """|q x - p| as rational coefficients (r, s) of r + s sqrt(d)."""
    r, s = x.surd()
    r, s = q * r - p, q * s
    if surd_sign(r, s, x.d) < 0:
        r, s = -r, -s
    return r, s


def error_less(x, first, second):
    """Exact test |q1 x - p1| < |q2 x - p2| for pairs first=(p1, q1), second=(p2, q2)."""
    r1, s1 = approx_error(x, *first)
    r2, s2 = approx_error(x, *second)
    return surd_sign(r2 - r1, s2 - s1, x.d) > 0


def error_between(x, p, q, low, high):
    """Exact test low < |q x - p| < high for rationals low, high."""
    r, s = approx_error(x, p, q)
    return (
        surd_sign(r - Fraction(low), s, x.d) > 0
        and surd_sign(Fraction(high) - r, -s, x.d) > 0
    )


@dataclass(frozen=True)
class BestApproxVerdict:
    checked: tuple
    skipped: tuple
    violations: tuple

    @property
    def ok(self):
        return not self.violations


def best_approx_check(x, slope, conv):
    """Check the best-approximation property of ``conv`` against p/q = ``slope``.

    For every i with q < q_{i+1} the best-approximation theorem says |q x - p| >= |q_i x - p_i|;
    an index where |q x - p| is strictly smaller is reported as a violation,
    which can only come from an arithmetic error.
    """
    conv = list(conv)
    if not conv:
        raise DomainError("need at least one convergent")
    p, q = slope.p, slope.q
    if q <= 0:
        raise DomainError("best_approx_check needs q > 0")
    checked, skipped, violations = [], [], []
    for i, c in enumerate(conv):
        if i + 1 >= len(conv) or q >= conv[i + 1].q:
            skipped.append(i)
            continue
        checked.append(i)
        if error_less(x, (p, q), (c.p, c.q)):
            violations.append(i)
    return BestApproxVerdict(tuple(checked), tuple(skipped), tuple(violations))
