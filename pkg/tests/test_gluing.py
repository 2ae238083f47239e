import mpmath
import pytest

from topvol import gluing
from topvol.dilog import v_tet
from topvol.errors import (
    DomainError,
    InconsistentLengthError,
    NoGeometricSolutionError,
    NonConvergenceError,
    ParseError,
    UnsupportedExpressionError,
)
from topvol.gluing import (
    GluingSystem,
    RectEquation,
    ShapeRef,
    evaluate_equation,
    load_fixture,
    minpoly_residual,
    parse_rect,
    solve_geometric,
    verify_equal_volume,
    verify_relation,
)

PRINTED = {
    "m006": ("0.7733+1.4677j", "0.3352+0.4011j", "0.3352+0.4011j"),
    "m007": ("-0.1027+0.6654j", "0.2266+1.4677j", "-0.1027+0.6654j"),
    "m015": ("0.662359+0.56228j",) * 3,
    "m016": ("0.78492+1.30714j", "0.122561+0.744862j", "0.122561+0.744862j"),
    "m017": ("0.662359+0.56228j", "0.78492+1.30714j", "0.78492+1.30714j"),
}
TABLE1 = {"m006": "2.56897060093671", "m015": "2.82812208833078"}


def close(a, b, tol):
    with mpmath.workdps(80):
        return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b)) < mpmath.mpf(tol)


@pytest.fixture(scope="module")
def solved():
    return {name: solve_geometric(load_fixture(name)) for name in gluing.FIXTURES}


# -- parsing -----------------------------------------------------------------


def test_parse_single_equation():
    sys_ = parse_rect("[([-1,1,1],[2,-2,-2],1)]")
    assert sys_.n == 3
    assert len(sys_.equations) == 1
    eq = sys_.equations[0]
    assert eq.a == (-1, 1, 1) and eq.d == (2, -2, -2) and eq.g == 1


def test_underdetermined_system_parses_but_does_not_solve():
    sys_ = parse_rect("[([-1,1,1],[2,-2,-2],1)]")
    assert not sys_.determined
    with pytest.raises(DomainError):
        solve_geometric(sys_)


def test_parse_zero_d_vector():
    eq = parse_rect("[([1,2,1],[0,0,0],1)]").equations[0]
    assert eq.d == (0, 0, 0)


def test_parse_whitespace_and_order():
    text = "[ ( [1, 0], [0, 1], -1 ),\n  ([0,1],\t[1,0], 1) ]"
    sys_ = parse_rect(text)
    assert [e.g for e in sys_.equations] == [-1, 1]


def test_parse_empty():
    with pytest.raises(ParseError):
        parse_rect("")
    with pytest.raises(ParseError):
        parse_rect("   \n ")


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_rect("[([1,0],[0,1],1),\n ([1,0] [0,1],1)]")
    assert info.value.line == 2
    assert info.value.column is not None


def test_parse_bad_sign():
    with pytest.raises((ParseError, DomainError)):
        parse_rect("[([1],[0],2)]")


def test_parse_inconsistent_lengths():
    with pytest.raises(InconsistentLengthError):
        parse_rect("[([1,0],[0,1],1), ([1,0,0],[0,1,0],1)]")
    with pytest.raises(InconsistentLengthError):
        parse_rect("[([1,0],[0],1)]")


def test_fixtures_parse():
    for name in gluing.FIXTURES:
        sys_ = load_fixture(name)
        assert sys_.n == 3 and len(sys_.equations) == 5 and sys_.label == name
    with pytest.raises(DomainError):
        load_fixture("m999")


# -- evaluation --------------------------------------------------------------


def test_empty_product():
    eq = RectEquation((0, 0, 0), (0, 0, 0), 1)
    assert evaluate_equation(eq, [0.3 + 0.1j, 2, -5]) == 0


def test_direct_substitution_off_upper_half_plane():
    eq = RectEquation((1,), (0,), 1)
    assert evaluate_equation(eq, [2]) == 1


def test_evaluate_rejects_degenerate():
    eq = RectEquation((1,), (1,), 1)
    with pytest.raises(DomainError):
        evaluate_equation(eq, [1])
    with pytest.raises(InconsistentLengthError):
        evaluate_equation(eq, [0.5j, 0.5j])


def test_printed_approximation_has_small_defects():
    sys_ = load_fixture("m006")
    for eq in sys_.equations:
        assert abs(evaluate_equation(eq, PRINTED["m006"])) < 1e-2


# -- solving -----------------------------------------------------------------


@pytest.mark.parametrize("name", gluing.FIXTURES)
def test_solution_matches_printed_shapes(solved, name):
    sol = solved[name]
    assert sol.residual < gluing.residual_tolerance(sol.precision)
    for z, printed in zip(sol.values, PRINTED[name]):
        assert z.imag > 0
        with mpmath.workdps(30):
            p = mpmath.mpmathify(printed)
            assert abs(z.real - p.real) < 5e-4 and abs(z.imag - p.imag) < 5e-4


@pytest.mark.parametrize("name", gluing.FIXTURES)
def test_all_equations_resubstituted(solved, name):
    sol = solved[name]
    for eq in load_fixture(name).equations:
        assert abs(evaluate_equation(eq, sol.values)) < 1e-25


def test_volumes_match_census(solved):
    for name in ("m006", "m007"):
        assert close(solved[name].volume, TABLE1["m006"], "1e-10")
    for name in ("m015", "m016", "m017"):
        assert close(solved[name].volume, TABLE1["m015"], "1e-10")


def test_equal_volume_certificates(solved):
    pairs = [("m006", "m007"), ("m015", "m016"), ("m016", "m017"), ("m015", "m017")]
    for a, b in pairs:
        report = verify_equal_volume(solved[a], solved[b])
        assert report.passed, (a, b, report.difference)
    assert not verify_equal_volume(solved["m006"], solved["m015"]).passed


def test_solver_is_deterministic():
    a = solve_geometric(load_fixture("m016"))
    b = solve_geometric(load_fixture("m016"))
    assert a.values == b.values and a.volume == b.volume and a.residual == b.residual


def test_explicit_seeds():
    sol = solve_geometric(load_fixture("m015"), seeds=["0.66+0.56j"] * 3)
    assert close(sol.volume, TABLE1["m015"], "1e-10")
    with pytest.raises(InconsistentLengthError):
        solve_geometric(load_fixture("m015"), seeds=["0.66+0.56j"])


def test_grid_scan_for_unlabelled_system():
    base = load_fixture("m015")
    anon = GluingSystem(base.n, base.equations, "")
    sol = solve_geometric(anon)
    assert close(sol.volume, TABLE1["m015"], "1e-10")


def test_one_tetrahedron_system():
    # z (1 - z) = 1 has the regular shape exp(i pi / 3) as its geometric root
    sol = solve_geometric(parse_rect("[([1],[1],1)]"))
    assert close(sol.volume, v_tet(), "1e-40")


def test_no_geometric_solution():
    # z = -1 has no root off the real line
    with pytest.raises(NoGeometricSolutionError):
        solve_geometric(parse_rect("[([1],[0],-1)]"))


def test_non_convergence_is_reported():
    with pytest.raises(NonConvergenceError):
        solve_geometric(load_fixture("m006"), seeds=["0.7+1.4j", "0.3+0.4j", "0.3+0.4j"], max_iter=1)


def test_higher_precision(solved):
    hi = solve_geometric(load_fixture("m006"), precision=80)
    assert hi.residual < gluing.residual_tolerance(80)
    assert close(hi.volume, solved["m006"].volume, "1e-45")


# -- relations ---------------------------------------------------------------


def test_mirror_relations_m006_m007(solved):
    z, w = solved["m006"], solved["m007"]
    checks = [
        (ShapeRef(w, 1, conjugate=True), ShapeRef(z, 0, "1-z")),
        (ShapeRef(w, 0, conjugate=True), ShapeRef(z, 1, "z/(z-1)")),
        (ShapeRef(w, 2, conjugate=True), ShapeRef(z, 2, "z/(z-1)")),
    ]
    for lhs, rhs in checks:
        assert verify_relation(lhs, rhs).passed


def test_literal_relation_w2_equals_z1_minus_1_fails(solved):
    # the relation as first conjectured is off by about 0.45; the basis
    # polynomial w2 + z1 - 1 is the one that holds
    report = verify_relation(ShapeRef(solved["m007"], 1), ShapeRef(solved["m006"], 0, "z-1"))
    assert not report.passed
    assert 0.4 < report.difference < 0.5


def test_relations_m015_m016_m017(solved):
    u, v, w = solved["m015"], solved["m016"], solved["m017"]
    u1 = ShapeRef(u, 0)
    for ref in (ShapeRef(u, 1), ShapeRef(u, 2), ShapeRef(w, 0)):
        assert verify_relation(ref, u1).passed
    for ref in (ShapeRef(v, 0), ShapeRef(w, 1), ShapeRef(w, 2)):
        assert verify_relation(ref, ShapeRef(u, 0, "1/(1-z)")).passed
    for ref in (ShapeRef(v, 1), ShapeRef(v, 2)):
        assert verify_relation(ref, ShapeRef(u, 0, "(z-1)/z")).passed


def test_identity_relation(solved):
    ref = ShapeRef(solved["m006"], 0)
    assert verify_relation(ref, ref).difference == 0


def test_unsupported_form(solved):
    with pytest.raises(UnsupportedExpressionError):
        ShapeRef(solved["m006"], 0, "z**2")
    with pytest.raises(DomainError):
        ShapeRef(solved["m006"], 5)


def test_groebner_basis_residuals(solved):
    z1, z2, z3 = solved["m006"].values
    with mpmath.workdps(60):
        w1, w2, w3 = (mpmath.conj(w) for w in solved["m007"].values)
        assert abs(-(z1**2) + z1 + 2 * z2 - 3) < 1e-40
        assert abs(-(z1**2) + z1 + 2 * z3 - 3) < 1e-40
        assert abs(w3 - z1**2 + 2 * z1 - 3) < 1e-40
        assert abs(w2 + z1 - 1) < 1e-40
        assert abs(w1 - z1**2 + 2 * z1 - 3) < 1e-40


def test_minpoly_residuals(solved):
    assert minpoly_residual([1, -3, 5, -4], solved["m006"][0]) < 1e-40
    for name in ("m015", "m017"):
        assert minpoly_residual([1, 0, -1, 1], solved[name][0]) < 1e-40
    assert minpoly_residual([1, 0], 0) == 0
    with pytest.raises(DomainError):
        minpoly_residual([0, 1], 1)
