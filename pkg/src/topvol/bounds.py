"""Closed-form upper and lower bounds on topological volume.

Upper bounds come from surgery presentations, Seifert data and covers; lower
bounds from the rank of mod-p homology.  Applicability conditions on the
inputs (a nontrivial surgery link, an actual cover) are the caller's to check.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath

from .dilog import DEFAULT_PRECISION, v_oct, v_tet
from .errors import DomainError

# rank of H_1(N; Z_p) is below this multiple of the hyperbolic volume
HOMOLOGY_RATIO = "168.602"
# (rank threshold, volume bound) for closed manifolds with large Z_2 rank
Z2_THRESHOLDS = ((5, "3.08"), (7, "3.69"), (10, "3.77"))
SMALL_SFS_COARSE = "3.67"


class Kind(str, enum.Enum):
    UPPER = "UPPER"
    LOWER = "LOWER"


@dataclass(frozen=True)
class BoundResult:
    kind: Kind
    value: object  # mpmath.mpf, or int for the integer-form Seifert bound
    source: str


def _digits(precision):
    return DEFAULT_PRECISION if precision is None else int(precision)


def _check_int(name, value, minimum):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def surgery_upper_bound(c, n, precision=None):
    """(9c + 15n - 20) v_oct + 4 v_tet for surgery on a nontrivial link."""
    c = _check_int("crossing number", c, 1)
    n = _check_int("component count", n, 1)
    coeff = 9 * c + 15 * n - 20
    if coeff <= 0:
        raise DomainError(f"9c + 15n - 20 = {coeff} must be positive")
    digits = _digits(precision)
    with mpmath.workdps(digits + 10):
        value = coeff * v_oct(digits) + 4 * v_tet(digits)
    return BoundResult(Kind.UPPER, value, "surgery")


def sfs_upper_bound(g, N, precision=None):
    """Octahedral and integer forms of the Seifert fibered space bound.

    Returns ``(octahedral, coarse)``.  For (g, N) in {(0, 0), (0, 1)} the
    octahedral bound is v_oct and the coarse one 3.67; otherwise they are
    (10g + 6N - 9) v_oct + 4 v_tet and the integer 37g + 22N - 28.
    """
    g = _check_int("genus", g, 0)
    N = _check_int("exceptional fibre count", N, 0)
    digits = _digits(precision)
    with mpmath.workdps(digits + 10):
        if g == 0 and N <= 1:
            octa = v_oct(digits)
            coarse = mpmath.mpf(SMALL_SFS_COARSE)
        else:
            octa = (10 * g + 6 * N - 9) * v_oct(digits) + 4 * v_tet(digits)
            coarse = 37 * g + 22 * N - 28
    return (
        BoundResult(Kind.UPPER, octa, "sfs-octahedral"),
        BoundResult(Kind.UPPER, coarse, "sfs-integer"),
    )


def is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def homology_lower_bound(rank, p, precision=None):
    """Lower bound from rk H_1(M; Z_p), sharpened for p = 2 and large rank."""
    rank = _check_int("rank", rank, 0)
    p = _check_int("p", p, 0)
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    digits = _digits(precision)
    with mpmath.workdps(digits + 10):
        value = mpmath.mpf(rank) / mpmath.mpf(HOMOLOGY_RATIO)
        source = "homology-rank"
        if p == 2:
            for threshold, bound in Z2_THRESHOLDS:
                bound = mpmath.mpf(bound)
                if rank > threshold and bound > value:
                    value, source = bound, f"z2-rank>{threshold}"
    return BoundResult(Kind.LOWER, value, source)


def cover_upper_bound(volt_base, d, precision=None):
    """volt(X) <= d volt(Y) for a d-fold cover X -> Y."""
    d = _check_int("degree", d, 1)
    digits = _digits(precision)
    with mpmath.workdps(digits + 10):
        base = mpmath.mpf(volt_base)
        if not base > 0:
            raise DomainError(f"base volume must be positive, got {volt_base!r}")
        return BoundResult(Kind.UPPER, d * base, "cover")
