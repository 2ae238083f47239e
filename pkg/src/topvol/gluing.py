"""Rectangular gluing equations and their geometric solutions.

A system in rect form is a list of triples ``(a, d, g)`` encoding

    prod_i z_i**a[i] * (1 - z_i)**d[i] == g,    g in {+1, -1},

one triple per edge or cusp equation.  :func:`solve_geometric` finds the
solution with every shape in the upper half plane by Gauss-Newton iteration
on the whole (overdetermined) system, working multiplicatively so no
logarithm branches are involved.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import mpmath
import numpy as np
from mpmath import mp

from .dilog import DEFAULT_PRECISION, DEGENERACY_TOL, TetShape, triangulation_volume
from .errors import (
    DegenerateShapeError,
    DomainError,
    InconsistentLengthError,
    NoGeometricSolutionError,
    NonConvergenceError,
    ParseError,
    UnsupportedExpressionError,
)

_GUARD = 10
MAX_ITER = 100
SCAN_MAX_TETS = 4
SCAN_RE = (0.25, 0.5, 0.75)
SCAN_IM = (0.25, 0.75, 1.5)

FIXTURES = ("m006", "m007", "m015", "m016", "m017")

# 4-6 digit approximations of the geometric solutions of the bundled fixtures
DEFAULT_SEEDS = {
    "m006": ("0.7733+1.4677j", "0.3352+0.4011j", "0.3352+0.4011j"),
    "m007": ("-0.1027+0.6654j", "0.2266+1.4677j", "-0.1027+0.6654j"),
    "m015": ("0.662359+0.56228j",) * 3,
    "m016": ("0.78492+1.30714j", "0.122561+0.744862j", "0.122561+0.744862j"),
    "m017": ("0.662359+0.56228j", "0.78492+1.30714j", "0.78492+1.30714j"),
}


@dataclass(frozen=True)
class RectEquation:
    a: tuple
    d: tuple
    g: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if len(self.a) != len(self.d) or not self.a:
            raise InconsistentLengthError(
                f"exponent vectors have lengths {len(self.a)} and {len(self.d)}"
            )
        if self.g not in (1, -1):
            raise DomainError(f"right-hand side must be +1 or -1, got {self.g}")

    @property
    def n(self):
        return len(self.a)


@dataclass(frozen=True)
class GluingSystem:
    n: int
    equations: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        if self.n < 1:
            raise DomainError("a gluing system needs at least one tetrahedron")
        for eq in self.equations:
            if eq.n != self.n:
                raise InconsistentLengthError(
                    f"equation {eq} has length {eq.n}, expected {self.n}"
                )

    @property
    def determined(self):
        return len(self.equations) >= self.n


@dataclass(frozen=True)
class ShapeSolution:
    shapes: tuple
    residual: mpmath.mpf
    volume: mpmath.mpf
    label: str = ""
    iterations: int = 0
    precision: int = DEFAULT_PRECISION

    @property
    def values(self):
        return [s.value for s in self.shapes]

    def __getitem__(self, index):
        return self.shapes[index].value


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s+|#[^\n]*|[-+]?\d+|[\[\](),]")


def _tokenize(text):
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        tok = m.group()
        if not tok.isspace() and not tok.startswith("#"):
            tokens.append((tok, line, pos - line_start + 1))
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(("<eof>", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def expect(self, tok):
        got, line, col = self.tokens[self.i]
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}", line, col)
        self.i += 1

    def integer(self):
        got, line, col = self.tokens[self.i]
        if not re.fullmatch(r"[-+]?\d+", got):
            raise ParseError(f"expected an integer, found {got!r}", line, col)
        self.i += 1
        return int(got)

    def int_list(self):
        _, line, col = self.tokens[self.i]
        self.expect("[")
        values = [self.integer()]
        while self.peek() == ",":
            self.expect(",")
            values.append(self.integer())
        self.expect("]")
        return values, line, col

    def equation(self):
        _, line, col = self.tokens[self.i]
        self.expect("(")
        a, _, _ = self.int_list()
        self.expect(",")
        d, dline, dcol = self.int_list()
        self.expect(",")
        g = self.integer()
        if self.peek() == ",":
            self.expect(",")
        self.expect(")")
        if len(a) != len(d):
            raise InconsistentLengthError(
                f"exponent vectors have lengths {len(a)} and {len(d)}", dline, dcol
            )
        if g not in (1, -1):
            raise ParseError(f"right-hand side must be 1 or -1, got {g}", line, col)
        return RectEquation(tuple(a), tuple(d), g), line, col

    def system(self):
        self.expect("[")
        eqs = [self.equation()]
        while self.peek() == ",":
            self.expect(",")
            if self.peek() == "]":
                break
            eqs.append(self.equation())
        self.expect("]")
        got, line, col = self.tokens[self.i]
        if got != "<eof>":
            raise ParseError(f"trailing input {got!r}", line, col)
        return eqs


def parse_rect(text, label=""):
    """Parse a bracketed list of ``([a...], [d...], g)`` tuples."""
    if not text.strip():
        raise ParseError("empty gluing system", 1, 1)
    eqs = _Parser(text).system()
    n = eqs[0][0].n
    for eq, line, col in eqs:
        if eq.n != n:
            raise InconsistentLengthError(
                f"equation has {eq.n} shape exponents, expected {n}", line, col
            )
    return GluingSystem(n, [eq for eq, _, _ in eqs], label)


def load_system(path):
    """Read a rect-form file; the label is the file stem."""
    path = Path(path)
    return parse_rect(path.read_text(encoding="utf-8"), label=path.stem)


def fixture_path(name):
    data = resources.files("topvol").joinpath("data")
    return data.joinpath("gluing").joinpath(f"{name}.rect")


def load_fixture(name):
    if name not in FIXTURES:
        raise DomainError(f"no bundled gluing fixture named {name!r}")
    return parse_rect(fixture_path(name).read_text(encoding="utf-8"), label=name)


# -- evaluation --------------------------------------------------------------


def _as_complex(z):
    if isinstance(z, TetShape):
        return z.value
    if isinstance(z, mpmath.mpc):
        return z
    return mpmath.mpc(mpmath.mpmathify(z))


def _product(eq, zs):
    p = mpmath.mpc(1)
    for a, d, z in zip(eq.a, eq.d, zs):
        if a:
            p *= z**a
        if d:
            p *= (1 - z) ** d
    return p


def evaluate_equation(eq, shapes, precision=None):
    """Defect ``prod z_i^a_i (1 - z_i)^d_i - g`` of one equation."""
    digits = DEFAULT_PRECISION if precision is None else precision
    if len(shapes) != eq.n:
        raise InconsistentLengthError(f"expected {eq.n} shapes, got {len(shapes)}")
    with mp.workdps(digits + _GUARD):
        zs = [_as_complex(z) for z in shapes]
        for z in zs:
            if z == 0 or z == 1:
                raise DomainError(f"shape {z} is 0 or 1")
        return _product(eq, zs) - eq.g


def _defects(system, zs):
    return [_product(eq, zs) - eq.g for eq in system.equations]


def _jacobian(system, zs, products):
    # d/dz_j of P = P * (a_j / z_j - d_j / (1 - z_j)); the defect shares it
    J = mpmath.matrix(len(system.equations), system.n)
    for r, (eq, p) in enumerate(zip(system.equations, products)):
        for j, z in enumerate(zs):
            if eq.a[j] or eq.d[j]:
                J[r, j] = p * (eq.a[j] / z - eq.d[j] / (1 - z))
    return J


def _newton(system, start, digits, max_iter):
    with mp.workdps(digits + _GUARD):
        zs = [mpmath.mpc(z) for z in start]
        step_tol = mpmath.mpf(10) ** (-digits + 10)
        for it in range(1, max_iter + 1):
            if any(z == 0 or z == 1 for z in zs):
                raise NonConvergenceError("iterate hit a degenerate shape")
            products = [_product(eq, zs) for eq in system.equations]
            F = mpmath.matrix([p - eq.g for p, eq in zip(products, system.equations)])
            J = _jacobian(system, zs, products)
            JH = J.H
            try:
                delta = mpmath.lu_solve(JH * J, JH * F)
            except ZeroDivisionError as exc:
                raise NonConvergenceError("singular Gauss-Newton system") from exc
            zs = [z - delta[j] for j, z in enumerate(zs)]
            if not all(mpmath.isfinite(abs(z)) for z in zs):
                raise NonConvergenceError("iteration diverged")
            if mpmath.norm(delta) < step_tol:
                residual = max(abs(f) for f in _defects(system, zs))
                return zs, residual, it
    raise NonConvergenceError(f"no convergence after {max_iter} iterations")


def _float_gauss_newton(system, z0, iters=60):
    A = np.array([eq.a for eq in system.equations], dtype=float)
    D = np.array([eq.d for eq in system.equations], dtype=float)
    g = np.array([eq.g for eq in system.equations], dtype=float)

    def defects(z):
        with np.errstate(all="ignore"):
            logp = A @ np.log(z) + D @ np.log(1 - z)
            return np.exp(logp), np.exp(logp) - g

    z = np.array(z0, dtype=complex)
    for _ in range(iters):
        p, f = defects(z)
        if not np.all(np.isfinite(f)):
            return None
        if np.max(np.abs(f)) < 1e-12:
            return z
        with np.errstate(all="ignore"):
            J = p[:, None] * (A / z[None, :] - D / (1 - z)[None, :])
        if not np.all(np.isfinite(J)):
            return None
        delta = np.linalg.lstsq(J, f, rcond=None)[0]
        t = 1.0
        norm0 = np.linalg.norm(f)
        while t > 1e-4:
            trial = z - t * delta
            _, ft = defects(trial)
            if np.all(np.isfinite(ft)) and np.linalg.norm(ft) < norm0:
                break
            t /= 2
        z = z - t * delta
    p, f = defects(z)
    if np.all(np.isfinite(f)) and np.max(np.abs(f)) < 1e-8:
        return z
    return None


def _scan_seeds(system):
    grid = [complex(x, y) for x in SCAN_RE for y in SCAN_IM]
    for start in itertools.product(grid, repeat=system.n):
        z = _float_gauss_newton(system, start)
        if z is not None and np.all(z.imag > 1e-6):
            yield [complex(w) for w in z]


def residual_tolerance(precision):
    return mpmath.mpf(10) ** (-(precision - 20))


def solve_geometric(system, seeds=None, precision=None, max_iter=MAX_ITER):
    """Solve for the shapes with positive imaginary part.

    With ``seeds`` given, a single Newton run starts there.  Otherwise the
    bundled approximations are used for known fixtures, and for unknown
    systems with at most four tetrahedra a coarse upper-half-plane grid is
    scanned in double precision before refining.
    """
    digits = DEFAULT_PRECISION if precision is None else int(precision)
    if not system.determined:
        raise DomainError(
            f"{len(system.equations)} equations cannot determine {system.n} shapes"
        )
    if seeds is not None:
        seeds = list(seeds)
        if len(seeds) != system.n:
            raise InconsistentLengthError(
                f"expected {system.n} seeds, got {len(seeds)}"
            )
        return _solve_from(system, seeds, digits, max_iter)
    if system.label in DEFAULT_SEEDS and len(DEFAULT_SEEDS[system.label]) == system.n:
        return _solve_from(system, DEFAULT_SEEDS[system.label], digits, max_iter)
    if system.n > SCAN_MAX_TETS:
        raise NoGeometricSolutionError(
            f"no seeds for {system.label or 'system'} and n = {system.n} > {SCAN_MAX_TETS}"
        )
    for start in _scan_seeds(system):
        try:
            return _solve_from(system, start, digits, max_iter)
        except (NonConvergenceError, DegenerateShapeError):
            continue
    raise NoGeometricSolutionError(
        f"grid scan found no geometric solution for {system.label or 'system'}"
    )


def _solve_from(system, start, digits, max_iter):
    with mp.workdps(digits + _GUARD):
        start = [_as_complex(s) for s in start]
    zs, residual, iterations = _newton(system, start, digits, max_iter)
    tol = residual_tolerance(digits)
    if residual >= tol:
        raise NonConvergenceError(
            f"converged point has residual {mpmath.nstr(residual, 5)} >= {mpmath.nstr(tol, 3)}"
        )
    for z in zs:
        if z.imag <= DEGENERACY_TOL:
            raise DegenerateShapeError(
                f"solution shape {mpmath.nstr(z, 10)} is not in the upper half plane"
            )
    shapes = tuple(TetShape(z) for z in zs)
    volume = triangulation_volume(shapes, digits)
    return ShapeSolution(shapes, residual, volume, system.label, iterations, digits)


# -- certificates ------------------------------------------------------------

# Moebius-type words in a single shape; the cross-ratio images plus z - 1.
FORMS = {
    "z": lambda z: z,
    "1-z": lambda z: 1 - z,
    "z-1": lambda z: z - 1,
    "1/z": lambda z: 1 / z,
    "1/(1-z)": lambda z: 1 / (1 - z),
    "z/(z-1)": lambda z: z / (z - 1),
    "(z-1)/z": lambda z: (z - 1) / z,
    "1-1/z": lambda z: 1 - 1 / z,
}


@dataclass(frozen=True)
class ShapeRef:
    """One coordinate of a solution, optionally transformed.

    ``conjugate`` pairs the solution with its mirror image, i.e. the complex
    conjugate solution of the same system (shapes in the lower half plane).
    """

    solution: ShapeSolution
    index: int
    form: str = "z"
    conjugate: bool = False

    def __post_init__(self):
        key = self.form.replace(" ", "")
        if key not in FORMS:
            raise UnsupportedExpressionError(
                f"unsupported expression {self.form!r}; use one of {sorted(FORMS)}"
            )
        object.__setattr__(self, "form", key)
        if not 0 <= self.index < len(self.solution.shapes):
            raise DomainError(f"shape index {self.index} out of range")

    def value(self):
        with mp.workdps(self.solution.precision + _GUARD):
            z = self.solution[self.index]
            if self.conjugate:
                z = mpmath.conj(z)
            return FORMS[self.form](z)

    def describe(self):
        name = f"{self.solution.label or 'z'}[{self.index}]"
        text = self.form.replace("z", name)
        return f"conj({text})" if self.conjugate else text


@dataclass(frozen=True)
class RelationReport:
    lhs: str
    rhs: str
    difference: mpmath.mpf
    tol: mpmath.mpf
    passed: bool


def verify_relation(lhs, rhs, tol="1e-9"):
    """Compare two transformed shape coordinates; ``passed`` iff |lhs - rhs| < tol."""
    precision = max(lhs.solution.precision, rhs.solution.precision)
    with mp.workdps(precision + _GUARD):
        diff = abs(lhs.value() - rhs.value())
        tol = mpmath.mpf(tol)
        return RelationReport(lhs.describe(), rhs.describe(), diff, tol, bool(diff < tol))


def verify_equal_volume(a, b, tol="1e-12"):
    """Volume-equality certificate between two independently solved systems."""
    precision = max(a.precision, b.precision)
    with mp.workdps(precision + _GUARD):
        diff = abs(a.volume - b.volume)
        tol = mpmath.mpf(tol)
        return RelationReport(
            f"vol({a.label})", f"vol({b.label})", diff, tol, bool(diff < tol)
        )


def minpoly_residual(coeffs, x, precision=None):
    """|p(x)| for the integer polynomial with coefficients highest degree first."""
    coeffs = [int(c) for c in coeffs]
    if not coeffs or coeffs[0] == 0:
        raise DomainError("polynomial needs a non-zero leading coefficient")
    digits = DEFAULT_PRECISION if precision is None else precision
    with mp.workdps(digits + _GUARD):
        x = _as_complex(x)
        acc = mpmath.mpc(0)
        for c in coeffs:
            acc = acc * x + c
        return abs(acc)
