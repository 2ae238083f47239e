"""Slopes, lens-space classes and the framing changes for W and P.

Slopes are plain integer pairs.  Lens spaces are identified up to
homeomorphism, orientation-reversing ones included, so L(p, q), L(p, -q),
L(p, q*) and L(p, q + np) all share one canonical representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import DomainError


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if (self.p, self.q) == (0, 0):
            raise DomainError("(0, 0) is not a slope")
        if gcd(self.p, self.q) != 1:
            raise DomainError(f"slope ({self.p}, {self.q}) is not primitive")

    def unsigned(self):
        """Representative of the unoriented curve: p > 0, or p == 0 and q > 0."""
        if self.p < 0 or (self.p == 0 and self.q < 0):
            return Slope(-self.p, -self.q)
        return self

    def __str__(self):
        return f"({self.p},{self.q})"


@dataclass(frozen=True)
class LensClass:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 2:
            raise DomainError(f"lens space needs p >= 2, got {self.p}")
        if not 1 <= self.q < self.p or gcd(self.p, self.q) != 1:
            raise DomainError(f"L({self.p},{self.q}) is not a canonical lens space")

    def __str__(self):
        return f"L({self.p},{self.q})"


def mod_inverse(q, p):
    """Inverse of q modulo p in the range [1, p)."""
    if p <= 0:
        raise DomainError(f"modulus must be positive, got {p}")
    if gcd(q, p) != 1:
        raise DomainError(f"{q} is not invertible modulo {p}")
    if p == 1:
        return 0
    return pow(q, -1, p)


def canonical_lens(p, q):
    """Canonical LensClass of L(p, q) for any coprime pair with |p| >= 2."""
    p = abs(p)
    if p < 2:
        raise DomainError(f"L({p},{q}) is not a lens space with p >= 2")
    if gcd(p, q) != 1:
        raise DomainError(f"L({p},{q}) needs coprime parameters")
    r = q % p
    r_inv = mod_inverse(r, p)
    return LensClass(p, min(r, r_inv, p - r, p - r_inv))


def lens_equivalent_slopes(lens, window=3):
    """Filling slopes giving the lens space ``lens`` on an unknotted cusp.

    The q-coordinates are the translates q' + n p (|n| <= window) of q and of
    its inverse q*; each slope (p, q') is returned together with its two sign
    moves (-p, q') and (p, -q').
    """
    if window < 0:
        raise DomainError("window must be non-negative")
    p = lens.p
    residues = sorted({lens.q, mod_inverse(lens.q, p)})
    out = set()
    for r in residues:
        for n in range(-window, window + 1):
            q = r + n * p
            out.add(Slope(p, q))
            out.add(Slope(-p, q))
            out.add(Slope(p, -q))
    return out


def frame_w(s):
    """Topological framing of W to SnapPy m129: (p, q) -> (p + 2q, -q)."""
    return Slope(s.p + 2 * s.q, -s.q)


def frame_p(s):
    """Topological framing of P to SnapPy m125: (p, q) -> (p - 4q, p - 3q)."""
    return Slope(s.p - 4 * s.q, s.p - 3 * s.q)


def unframe_p(s):
    """Inverse of :func:`frame_p`: (a, b) -> (4b - 3a, b - a)."""
    return Slope(4 * s.q - 3 * s.p, s.q - s.p)
