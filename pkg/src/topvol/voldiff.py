"""Two-term volume-change expansions for Dehn filling W and P, and their ordering.

Each estimate is c2 pi^2 + c4 pi^4 with exact rational c2, c4, truncated at
O(1/Q^3) where Q is the slope's quadratic form.  Orderings are decided exactly:
the sign of dc2 pi^2 + dc4 pi^4 equals the sign of dc2 + dc4 pi^2, which is
settled against a rigorous rational enclosure of pi^2 whose width halves with
every extra bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache

import mpmath
from mpmath.libmp import mpf_pi

from .dilog import DEFAULT_PRECISION, v_oct
from .errors import DomainError, TieError, UndecidableError
from .lens import LensClass, Slope, frame_p, frame_w, lens_equivalent_slopes

START_BITS = 64
MAX_BITS = 4096
ASYMPTOTIC_THRESHOLD = 100
ASYMPTOTIC_WARNING = "asymptotic regime not guaranteed"


class Parent(str, enum.Enum):
    W = "W"
    P = "P"


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def form_w(p, q):
    return p * p + 4 * p * q + 8 * q * q


def form_p(p, q):
    return (p - 4 * q) ** 2 + (p - 3 * q) ** 2


@dataclass(frozen=True)
class DeltaVolEstimate:
    c2: Fraction
    c4: Fraction
    error_order: int

    def __post_init__(self):
        if self.error_order <= 0:
            raise DomainError("quadratic form must be positive")

    def value(self, precision=DEFAULT_PRECISION):
        with mpmath.workdps(precision):
            pi2 = mpmath.pi**2
            c2 = mpmath.mpf(self.c2.numerator) / self.c2.denominator
            c4 = mpmath.mpf(self.c4.numerator) / self.c4.denominator
            return c2 * pi2 + c4 * pi2 * pi2

    @property
    def asymptotic(self):
        return self.error_order >= ASYMPTOTIC_THRESHOLD


def _slope_pair(s):
    if isinstance(s, Slope):
        return s.p, s.q
    p, q = s
    return int(p), int(q)


def delta_vol_w(s):
    """Two-term volume loss for filling W along slope s (topological framing)."""
    p, q = _slope_pair(s)
    Q = form_w(p, q)
    if Q <= 0:
        # (p + 2q)^2 + 4q^2 is positive definite; only (0, 0) gets here
        raise DomainError(f"degenerate quadratic form at ({p},{q})")
    c2 = Fraction(2, Q)
    c4 = -Fraction((p * p - 8 * q * q) * (p * p + 8 * p * q + 8 * q * q), 3 * Q**4)
    return DeltaVolEstimate(c2, c4, Q)


def delta_vol_p(s):
    """Two-term volume loss for filling P along slope s (topological framing)."""
    p, q = _slope_pair(s)
    Q = form_p(p, q)
    if Q <= 0:
        raise DomainError(f"degenerate quadratic form at ({p},{q})")
    quartic = (
        4 * p**4 - 80 * p**3 * q + 540 * p**2 * q**2 - 1520 * p * q**3 + 1535 * q**4
    )
    return DeltaVolEstimate(Fraction(1, Q), Fraction(quartic, 24 * Q**4), Q)


# -- certified comparison ----------------------------------------------------


def _to_fraction(mpf_tuple):
    sign, man, exp, _ = mpf_tuple
    value = Fraction(man) * (Fraction(2) ** exp)
    return -value if sign else value


@lru_cache(maxsize=None)
def pi_squared_enclosure(bits):
    """Rationals lo < pi^2 < hi from pi rounded down and up to ``bits`` bits."""
    lo = _to_fraction(mpf_pi(bits, "f"))
    hi = _to_fraction(mpf_pi(bits, "c"))
    return lo * lo, hi * hi


@dataclass(frozen=True)
class Comparison:
    order: Ordering
    bits: int


def sign_of(c2, c4, max_bits=MAX_BITS):
    """Exact sign of c2 pi^2 + c4 pi^4 and the enclosure precision that settled it."""
    c2, c4 = Fraction(c2), Fraction(c4)
    if c4 == 0:
        return (c2 > 0) - (c2 < 0), 0
    bits = START_BITS
    while bits <= max_bits:
        lo, hi = pi_squared_enclosure(bits)
        ends = (c2 + c4 * lo, c2 + c4 * hi)
        if min(ends) > 0:
            return 1, bits
        if max(ends) < 0:
            return -1, bits
        bits *= 2
    raise UndecidableError(
        f"sign of ({c2}) pi^2 + ({c4}) pi^4 unresolved at {max_bits} bits"
    )


def compare_estimates(a, b, max_bits=MAX_BITS):
    """Order two estimates by their represented values."""
    dc2, dc4 = a.c2 - b.c2, a.c4 - b.c4
    if dc2 == 0 and dc4 == 0:
        return Comparison(Ordering.EQUAL, 0)
    sign, bits = sign_of(dc2, dc4, max_bits)
    return Comparison(Ordering(sign), bits)


@dataclass(frozen=True)
class Decision:
    parent: Parent
    slope: Slope
    w: DeltaVolEstimate
    p: DeltaVolEstimate
    bits: int
    warnings: tuple = ()


def decide_w_vs_p(s, max_bits=MAX_BITS):
    """W if filling W along s loses more volume than filling P (two-term criterion)."""
    p, q = _slope_pair(s)
    slope = Slope(p, q)
    w, pp = delta_vol_w(slope), delta_vol_p(slope)
    cmp = compare_estimates(w, pp, max_bits)
    if cmp.order is Ordering.EQUAL:
        raise TieError(f"two-term estimates of W and P coincide at {slope}")
    parent = Parent.W if cmp.order is Ordering.GREATER else Parent.P
    warnings = () if (w.asymptotic and pp.asymptotic) else (ASYMPTOTIC_WARNING,)
    return Decision(parent, slope, w, pp, cmp.bits, warnings)


# -- lens-space minimiser ----------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    parent: Parent
    slope: Slope
    estimate: DeltaVolEstimate

    @property
    def census_slope(self):
        """The same filling in SnapPy framing on m129 (W) or m125 (P)."""
        return frame_w(self.slope) if self.parent is Parent.W else frame_p(self.slope)


@dataclass(frozen=True)
class MinimiserVerdict:
    lens: LensClass
    parent: Parent
    slope: Slope
    estimate: DeltaVolEstimate
    competitors: tuple
    bits: int
    warnings: tuple = field(default=())

    @property
    def census_slope(self):
        return Candidate(self.parent, self.slope, self.estimate).census_slope

    def filled_volume(self, precision=DEFAULT_PRECISION):
        """Two-term estimate of vol(W) - Delta vol for the winning filling."""
        with mpmath.workdps(precision + 10):
            return v_oct(precision) - self.estimate.value(precision + 10)


def _candidate_order(max_bits, used):
    def cmp(x, y):
        c = compare_estimates(x.estimate, y.estimate, max_bits)
        used.append(c.bits)
        if c.order is not Ordering.EQUAL:
            return -int(c.order)  # larger volume loss first
        kx = (x.parent is not Parent.W, x.slope)
        ky = (y.parent is not Parent.W, y.slope)
        return (kx > ky) - (kx < ky)

    return cmp_to_key(cmp)


def lens_candidates(lens, window=3):
    slopes = sorted({s.unsigned() for s in lens_equivalent_slopes(lens, window)})
    out = []
    for s in slopes:
        out.append(Candidate(Parent.W, s, delta_vol_w(s)))
        out.append(Candidate(Parent.P, s, delta_vol_p(s)))
    return out


def lens_minimiser(lens, window=3, max_bits=MAX_BITS):
    """Filling of W or P with the largest two-term volume loss giving ``lens``.

    Slopes are taken up to orientation, (p, q) ~ (-p, -q).  Candidates with
    identical estimates are ordered W before P, then by slope.
    """
    if window < 1:
        raise DomainError("window must be at least 1")
    candidates = lens_candidates(lens, window)
    used = []
    ranked = sorted(candidates, key=_candidate_order(max_bits, used))
    best = ranked[0]
    warnings = () if best.estimate.asymptotic else (ASYMPTOTIC_WARNING,)
    return MinimiserVerdict(
        lens,
        best.parent,
        best.slope,
        best.estimate,
        tuple(ranked),
        max(used, default=0),
        warnings,
    )
