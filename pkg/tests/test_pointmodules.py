import pytest
from sympy.polys.domains import QQ

from pslab.exceptions import BusinessError
from pslab.subprocesses.algebra.freealg import nc_groebner
from pslab.subprocesses.geometry.pointmodules import (
    ParametrizedFamily,
    ProjectivePointTuple,
    TruncatedPointModule,
    enumerate_points_finite,
    jd_from_families,
    jd_from_points,
    load_families,
    module_annihilator,
    module_to_point,
    point_to_module,
    point_vanishing_check,
    verify_point,
)
from pslab.subprocesses.geometry.cohomlocal import ker_tau_basis

P = ProjectivePointTuple.of

FINITE_POINTS_POINTS = {
    2: {
        P([[1, 0, 0], [1, 1, 0]]),
        P([[0, 0, 1], [1, 0, 1]]),
        P([[0, 1, 0], [0, 1, 0]]),
        P([[1, 0, -1], [0, 0, 1]]),
    },
    3: {
        P([[1, 0, -1], [0, 0, 1], [1, 0, 1]]),
        P([[0, 1, 0], [0, 1, 0], [0, 1, 0]]),
    },
}


def test_points_are_canonical():
    assert P([[2, 4, 0]]) == P([[1, 2, 0]])
    assert P([[0, -3, 6]]).factors == ((QQ(0), QQ(1), QQ(-2)),)
    assert P([[1, 0, -1], [0, 0, 1]]).format() == "(1:0:-1)×(0:0:1)"
    with pytest.raises(BusinessError):
        P([[0, 0, 0]])


@pytest.mark.parametrize("d", [2, 3])
def test_finite_point_schemes_of_finite_points(algebra, d):
    enumeration = enumerate_points_finite(algebra("finite_points"), d)
    assert enumeration.complete
    assert set(enumeration.points) == FINITE_POINTS_POINTS[d]
    assert enumeration.points == sorted(enumeration.points, key=ProjectivePointTuple.sort_key)


@pytest.mark.slow
@pytest.mark.parametrize("d", [4, 5])
def test_single_point_from_degree_four(algebra, d):
    enumeration = enumerate_points_finite(algebra("finite_points"), d)
    assert enumeration.complete
    assert enumeration.points == [P([[0, 1, 0]] * d)]


def test_curves_are_reported_as_positive_dimensional(algebra):
    enumeration = enumerate_points_finite(algebra("line_cycle"), 2)
    assert enumeration.positive_dimensional
    assert not enumeration.complete


def test_verify_point(algebra):
    pres = algebra("finite_points")
    assert all(verify_point(pres, 2, p) for p in FINITE_POINTS_POINTS[2])
    assert not verify_point(pres, 2, P([[1, 0, 0], [1, 0, 0]]))
    with pytest.raises(BusinessError):
        verify_point(pres, 3, P([[1, 0, 0], [1, 0, 0]]))


def test_point_module_round_trip(algebra):
    point = P([[1, 0, -1], [0, 0, 1]])
    module = point_to_module(point, algebra("finite_points"))
    assert module.length == 3
    assert module_to_point(module) == point
    assert module.act((0, 2)) == 1
    assert module.act((2,), start=1) == 1
    assert module.act((1, 0)) == 0


def test_invalid_module_is_rejected(algebra):
    with pytest.raises(BusinessError, match="does not satisfy"):
        point_to_module(P([[1, 0, 0], [1, 0, 0]]), algebra("finite_points"))
    with pytest.raises(BusinessError, match="zero"):
        TruncatedPointModule(((QQ(0), QQ(0), QQ(0)),)).validate(algebra("finite_points"))


def test_annihilator_is_a_hyperplane(algebra):
    pres = algebra("line_cycle")
    words = nc_groebner(pres, 3).normal_words(3)
    annihilator = module_annihilator(point_to_module(P([[0, 1, 0]] * 3), pres), pres, 3)
    assert annihilator.dim == len(words) - 1 == 9
    assert not annihilator.contains({words.index((1, 1, 1)): QQ(1)})
    assert annihilator.contains({words.index((0, 0, 0)): QQ(1)})


@pytest.mark.parametrize("point", sorted(FINITE_POINTS_POINTS[2], key=ProjectivePointTuple.sort_key))
def test_annihilator_matches_vanishing_ideal(algebra, point):
    assert point_vanishing_check(algebra("finite_points"), 2, point)


def test_jd_from_points_kills_every_point(algebra):
    pres = algebra("finite_points")
    points = sorted(FINITE_POINTS_POINTS[2], key=ProjectivePointTuple.sort_key)
    jd = jd_from_points(pres, 2, points)
    words = nc_groebner(pres, 2).normal_words(2)
    assert jd.dim == len(words) - len(points)
    for row in jd.rows:
        for point in points:
            module = point_to_module(point)
            assert sum(c * module.act(words[i]) for i, c in row.items()) == 0


def test_families_of_line_cycle(algebra, algebras_dir):
    pres = algebra("line_cycle")
    families = load_families(algebras_dir / "line_cycle_families_d3.toml")
    assert [f.label for f in families] == ["xy-curve", "yz-curve", "line0", "line1", "line2"]
    jd = jd_from_families(pres, 3, families)
    words = nc_groebner(pres, 3).normal_words(3)
    assert jd.dim == 1
    assert jd.contains({words.index((0, 1, 2)): QQ(1)})
    (kernel,) = ker_tau_basis(pres, 3)
    assert jd.contains({words.index(w): c for w, c in kernel.items()})


def test_family_outside_the_point_scheme_is_named(algebra):
    family = ParametrizedFamily.from_strings([["0", "0", "1"], ["s", "0", "t"], ["0", "0", "1"]], "bad")
    with pytest.raises(BusinessError, match="not contained") as caught:
        jd_from_families(algebra("line_cycle"), 3, [family])
    assert "z*x" in str(caught.value)


@pytest.mark.parametrize("factor, message", [
    (["s*t", "s^2", "0"], "share the factor"),
    (["s", "1", "0"], "one degree"),
    (["0", "0", "0"], "identically zero"),
    (["u", "s", "0"], "parameters s and t"),
])
def test_family_validation(factor, message):
    with pytest.raises(BusinessError, match=message):
        ParametrizedFamily.from_strings([factor], "f")


def test_missing_families_file(tmp_path):
    with pytest.raises(BusinessError, match="not found"):
        load_families(tmp_path / "absent.toml")
