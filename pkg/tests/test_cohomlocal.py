import pytest

from pslab.subprocesses.algebra.freealg import NCOrder, nc_groebner
from pslab.subprocesses.algebra.presentation import FreePolynomial
from pslab.subprocesses.commutative.cgroebner import radical_membership
from pslab.subprocesses.commutative.multilin import iota, ud_algebra, ud_element
from pslab.subprocesses.geometry.cohomlocal import (
    annihilator_degreewise,
    h0_inside_nilradical,
    h0m_degree1,
    ker_tau_basis,
    nilradical_degree1,
    sequence_evidence_degreewise,
    tau_report,
)
from pslab.subprocesses.geometry.pointmodules import jd_from_families, load_families
from pslab.subprocesses.geometry.sections import cover_from_words

from conftest import proportional

# x^{i} z^{3-i} together with y^3 meet every component of Υ_3 for line_cycle
LINE_CYCLE_D3_COVER = ["x^3", "x^2*z", "x*z^2", "z^3", "y^3"]


@pytest.mark.parametrize("d, expected", [(2, 0), (3, 1)])
def test_torsion_of_line_cycle(algebra, d, expected):
    assert h0m_degree1(algebra("line_cycle"), d).dim == expected


@pytest.mark.slow
def test_torsion_of_line_cycle_in_degree_four(algebra):
    assert h0m_degree1(algebra("line_cycle"), 4).dim == 3


@pytest.mark.slow
def test_torsion_of_line_cycle_in_degree_five(algebra):
    # spanned by the m_{ijk} with i, j, k ≥ 1
    assert h0m_degree1(algebra("line_cycle"), 5, "ambient").dim == 6


@pytest.mark.slow
def test_arenas_agree(algebra):
    pres = algebra("line_cycle")
    assert h0m_degree1(pres, 3, "ambient") == h0m_degree1(pres, 3, "presentation")


def test_kernel_of_tau_is_xyz(algebra):
    pres = algebra("line_cycle")
    (kernel,) = ker_tau_basis(pres, 3)
    assert set(kernel) == {(0, 1, 2)}


def test_kernel_follows_the_word_order(algebra):
    pres = algebra("line_cycle")
    (kernel,) = ker_tau_basis(pres, 3, nc_order=NCOrder.from_chain(pres, "z<y<x"))
    # xy = yx in A, and yxz is the normal word once x is largest
    assert set(kernel) == {(1, 0, 2)}


def test_kernel_of_tau_for_finite_points_is_zxy(algebra):
    pres = algebra("finite_points")
    (kernel,) = ker_tau_basis(pres, 3)
    assert proportional(kernel, nc_groebner(pres, 3).normal_form(FreePolynomial.word((2, 0, 1))))


@pytest.mark.parametrize("name", ["commutative", "free2", "depth_two"])
def test_injective_cases(algebra, name):
    assert ker_tau_basis(algebra(name), 2) == []


@pytest.mark.parametrize("name, d, method", [
    ("free2", 2, "presentation"),
    ("free3", 2, "ambient"),
    ("free3", 3, "ambient"),
    pytest.param("free2", 3, "presentation", marks=pytest.mark.slow),
    pytest.param("depth_two", 3, "presentation", marks=pytest.mark.slow),
])
def test_no_torsion_in_degree_one(algebra, name, d, method):
    assert h0m_degree1(algebra(name), d, method).dim == 0


def test_nilpotent_monomial_is_not_torsion(algebra):
    pres = algebra("nilpotent_monomial")
    ud = ud_algebra(pres, 3)
    m = iota(FreePolynomial.word((0, 1, 2)), 3, ud.layout)
    assert ud.reduce(m)
    assert not ud.reduce(m**2)
    assert radical_membership(m, ud.gb)
    m_x = iota(FreePolynomial.word((0, 0, 0)), 3, ud.layout)
    assert ud.reduce(m * m_x**3)
    assert not h0m_degree1(pres, 3).contains(ud.vector(m, 1))


def test_nilradical_certified_by_families(algebra, algebras_dir):
    pres = algebra("line_cycle")
    jd = jd_from_families(pres, 3, load_families(algebras_dir / "line_cycle_families_d3.toml"))
    nil = nilradical_degree1(pres, 3, trials=2, seed=5, jd=jd, jd_source="families")
    assert nil.certainty == "certified"
    assert nil.certified_by == "families"
    assert nil.dim == 1
    assert h0_inside_nilradical(h0m_degree1(pres, 3), nil)


def test_nilradical_is_seeded(algebra):
    pres = algebra("line_cycle")
    first = nilradical_degree1(pres, 2, trials=3, seed=11)
    second = nilradical_degree1(pres, 2, trials=3, seed=11)
    assert first.basis == second.basis
    assert first.certainty == "probabilistic"
    assert first.dim == 0


def test_annihilator_of_zero_is_everything(algebra):
    pres = algebra("line_cycle")
    ud = ud_algebra(pres, 2)
    assert annihilator_degreewise(pres, 2, {}, 2) == [ud.dim(t) for t in range(3)]


DEPTH_TWO_SEQUENCE = {
    2: ("x^2 + x*z + z^2", "y^2 + y*z + z^2"),
    3: ("x^3 + x^2*z + x*z^2 + z^3", "y^3 + y^2*z + y*z^2 + z^3"),
}


@pytest.mark.parametrize("d", [2, pytest.param(3, marks=pytest.mark.slow)])
@pytest.mark.parametrize("which", [0, 1])
def test_regular_elements_have_no_annihilator(algebra, d, which):
    pres = algebra("depth_two")
    element = ud_element(pres, d, pres.polynomial(DEPTH_TWO_SEQUENCE[d][which]))
    assert annihilator_degreewise(pres, d, element, 3) == [0, 0, 0, 0]


def test_sequence_evidence_of_a_regular_pair(algebra):
    pres = algebra("depth_two")
    u, v = (ud_element(pres, 2, pres.polynomial(text)) for text in DEPTH_TWO_SEQUENCE[2])
    evidence = sequence_evidence_degreewise(pres, 2, u, v, 2)
    assert evidence.koszul == [0, 0, 0]
    assert evidence.regular_up_to_bound


def test_sequence_evidence_of_a_repeated_element(algebra):
    pres = algebra("depth_two")
    u = ud_element(pres, 2, pres.polynomial("x^2 + x*z + z^2"))
    evidence = sequence_evidence_degreewise(pres, 2, u, u, 1)
    assert evidence.koszul[0] == 1
    assert not evidence.regular_up_to_bound


def test_tau_for_line_cycle_in_degree_three(algebra):
    pres = algebra("line_cycle")
    cover = cover_from_words(pres, 3, LINE_CYCLE_D3_COVER)
    report = tau_report(pres, 3, k=1, M=1, cover=cover, check_stability=False)
    assert (report.dim_A, report.dim_H0, report.dim_Gamma, report.dim_H1) == (10, 1, 9, 0)
    assert not report.injective
    assert report.surjective
    assert report.kernel == ["x*y*z"]


@pytest.mark.parametrize("d, dims", [(2, (6, 0, 6, 0)), pytest.param(4, (15, 3, 12, 0), marks=pytest.mark.slow)])
def test_tau_for_line_cycle_is_surjective(algebra, d, dims):
    report = tau_report(algebra("line_cycle"), d, k=1, M=1, check_stability=False)
    assert (report.dim_A, report.dim_H0, report.dim_Gamma, report.dim_H1) == dims
    assert report.surjective


def test_tau_for_finite_points_fails_surjectivity_in_degree_two(algebra):
    pres = algebra("finite_points")
    cover = cover_from_words(pres, 2, ["x*x", "z*x", "y*y", "x*z"])
    report = tau_report(pres, 2, cover=cover)
    assert (report.dim_A, report.dim_H0, report.dim_Gamma, report.dim_H1) == (5, 0, 6, 1)
    assert report.injective
    assert not report.surjective


def test_tau_for_finite_points_fails_injectivity_in_degree_three(algebra):
    pres = algebra("finite_points")
    cover = cover_from_words(pres, 3, ["x*z*x", "y*y*y"])
    report = tau_report(pres, 3, cover=cover)
    assert (report.dim_A, report.dim_H0, report.dim_Gamma, report.dim_H1) == (4, 1, 3, 0)
    assert report.sections.method == "disjoint-sum"


def test_kernel_words_are_normal(algebra):
    pres = algebra("finite_points")
    basis = nc_groebner(pres, 3)
    for element in ker_tau_basis(pres, 3):
        assert all(basis.is_normal(word) for word in element)
