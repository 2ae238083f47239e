"""Bloch-Wigner dilogarithm and volumes of ideal hyperbolic tetrahedra.

All functions take an optional ``precision`` in decimal digits (default
:data:`DEFAULT_PRECISION`) and return :class:`mpmath.mpf` values computed with
a few guard digits above that.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import DegenerateShapeError, DomainError

DEFAULT_PRECISION = 50
DEGENERACY_TOL = mpmath.mpf("1e-12")
_GUARD = 10


def _digits(precision):
    return DEFAULT_PRECISION if precision is None else int(precision)


@dataclass(frozen=True)
class TetShape:
    """Shape parameter of a positively oriented ideal tetrahedron."""

    value: mpmath.mpc

    def __post_init__(self):
        z = self.value
        if not isinstance(z, mpmath.mpc):
            # exact for int/float/complex; strings round at the ambient precision
            z = mpmath.mpc(mpmath.mpmathify(z))
        if not (mpmath.isfinite(z.real) and mpmath.isfinite(z.imag)):
            raise DomainError(f"shape must be finite, got {self.value!r}")
        if z == 0 or z == 1:
            raise DegenerateShapeError(f"shape {self.value!r} is degenerate")
        if z.imag <= 0:
            raise DegenerateShapeError(
                f"shape {self.value!r} must have positive imaginary part"
            )
        object.__setattr__(self, "value", z)


# z -> (image, sign) with D(z) = sign * D(image); the six cross-ratio images.
_IMAGES = (
    (lambda z: z, 1),
    (lambda z: 1 - z, -1),
    (lambda z: 1 / z, -1),
    (lambda z: 1 / (1 - z), 1),
    (lambda z: (z - 1) / z, 1),
    (lambda z: z / (z - 1), -1),
)


def _reduce(z):
    """Pick the image closest to 0 among those with |w| <= 1 and Re w <= 1/2."""
    best = None
    for f, sign in _IMAGES:
        w = f(z)
        if abs(w) <= 1 and w.real <= 0.5:
            if best is None or abs(w) < abs(best[0]):
                best = (w, sign)
    return best


def _li2_power(w, eps):
    total = mpmath.mpc(0)
    term = w
    n = 1
    while True:
        contrib = term / (n * n)
        total += contrib
        if abs(contrib) < eps:
            return total
        n += 1
        term *= w


def _li2_bernoulli(w, eps):
    # Li2(w) = sum B_n u^(n+1)/(n+1)!, u = -log(1 - w); converges for |u| < 2 pi
    u = -mpmath.log(1 - w)
    total = u - u * u / 4
    u2 = u * u
    power = u  # u^(2k+1)
    fact = mpmath.mpf(1)  # (2k+1)!
    k = 1
    while True:
        power *= u2
        fact *= (2 * k) * (2 * k + 1)
        contrib = mpmath.bernoulli(2 * k) * power / fact
        total += contrib
        if abs(contrib) < eps and k > 2:
            return total
        k += 1


def _bloch_wigner_reduced(w):
    eps = mpmath.mpf(2) ** (-mp.prec - 4)
    if abs(w) <= 0.5:
        li2 = _li2_power(w, eps)
    else:
        li2 = _li2_bernoulli(w, eps)
    return li2.imag + mpmath.arg(1 - w) * mpmath.log(abs(w))


def bloch_wigner(z, precision=None):
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1 - z) log|z|.

    D is real-analytic away from {0, 1}, odd under conjugation and vanishes on
    the real axis.
    """
    digits = _digits(precision)
    with mp.workdps(digits + _GUARD):
        try:
            z = mpmath.mpc(z)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"cannot interpret {z!r} as a complex number") from exc
        if not (mpmath.isfinite(z.real) and mpmath.isfinite(z.imag)):
            raise DomainError(f"D(z) needs finite z, got {z}")
        if z == 0 or z == 1:
            raise DomainError(f"D(z) is undefined at z = {z}")
        if z.imag == 0:
            return mpmath.mpf(0)
        w, sign = _reduce(z)
        value = sign * _bloch_wigner_reduced(w)
    return value


def tet_volume(shape, precision=None, degeneracy_tol=DEGENERACY_TOL):
    """Hyperbolic volume of the ideal tetrahedron with the given shape."""
    if not isinstance(shape, TetShape):
        shape = TetShape(shape)
    if shape.value.imag <= degeneracy_tol:
        raise DegenerateShapeError(
            f"shape {shape.value} is within {degeneracy_tol} of the real axis"
        )
    return bloch_wigner(shape.value, precision)


def triangulation_volume(shapes, precision=None):
    """Sum of tetrahedron volumes for a list of shapes."""
    shapes = list(shapes)
    if not shapes:
        raise DomainError("triangulation_volume needs at least one shape")
    digits = _digits(precision)
    vols = [tet_volume(s, digits) for s in shapes]
    with mp.workdps(digits + _GUARD):
        return mpmath.fsum(vols)


def v_tet(precision=None):
    """Volume of the regular ideal tetrahedron, D(exp(i pi/3))."""
    digits = _digits(precision)
    with mp.workdps(digits + _GUARD):
        z = mpmath.expjpi(mpmath.mpf(1) / 3)
    return bloch_wigner(z, digits)


def v_oct(precision=None):
    """Volume of the regular ideal octahedron, 4 D(i)."""
    digits = _digits(precision)
    d = bloch_wigner(1j, digits)
    with mp.workdps(digits + _GUARD):
        return 4 * d
