import pytest
from pydantic import ValidationError

from pslab.exceptions import BusinessError
from pslab.subprocesses.algebra.freealg import algebra_dim
from pslab.subprocesses.geometry.cohomlocal import h0m_degree1
from pslab.subprocesses.geometry.sections import (
    ComponentSpec,
    NormalizationConfig,
    cech_h0_dim,
    certify_cover,
    check_separates,
    cover_from_words,
    default_cover,
    evaluate_normalization,
    load_normalization_config,
    localization_dim_deg1,
    normalization_formula,
    pairwise_disjoint,
)

from conftest import ALGEBRA_NAMES

# one word per point of Υ_2 for finite_points
FINITE_POINTS_D2_COVER = ["x*x", "z*x", "y*y", "x*z"]

SECTIONS_IN_DEGREE_TWO = {"commutative": 6, "depth_two": 6, "finite_points": 6, "free2": 4, "free3": 9, "line_cycle": 6}
SURJECTIVE_IN_DEGREE_TWO = {"commutative", "depth_two", "free2", "free3", "line_cycle"}


def test_cover_by_single_points_is_disjoint(algebra):
    pres = algebra("finite_points")
    cover = cover_from_words(pres, 2, FINITE_POINTS_D2_COVER)
    assert certify_cover(pres, 2, cover.vectors)
    assert pairwise_disjoint(pres, 2, cover.vectors)
    assert not certify_cover(pres, 2, cover.vectors[:3])


def test_certification_agrees_between_arenas(algebra):
    pres = algebra("finite_points")
    vectors = cover_from_words(pres, 2, FINITE_POINTS_D2_COVER).vectors
    assert certify_cover(pres, 2, vectors, "ambient")
    assert not certify_cover(pres, 2, vectors[1:], "ambient")


def test_chart_dimensions(algebra):
    pres = algebra("finite_points")
    vectors = cover_from_words(pres, 2, FINITE_POINTS_D2_COVER).vectors
    parts = [localization_dim_deg1(pres, 2, f) for f in vectors]
    assert all(part.plateau and not part.unbounded for part in parts)
    assert sorted(part.value for part in parts) == [1, 1, 2, 2]


def test_positive_dimensional_chart_is_flagged(algebra):
    pres = algebra("line_cycle")
    cover = cover_from_words(pres, 2, ["z*z"])
    assert localization_dim_deg1(pres, 2, cover.vectors[0]).unbounded


def test_disjoint_cover_sums_charts(algebra):
    pres = algebra("finite_points")
    result = cech_h0_dim(pres, 2, cover_from_words(pres, 2, FINITE_POINTS_D2_COVER))
    assert result.method == "disjoint-sum"
    assert result.dim == 6


def test_uncovered_locus_is_rejected(algebra):
    pres = algebra("finite_points")
    with pytest.raises(BusinessError, match="does not cover"):
        cech_h0_dim(pres, 2, cover_from_words(pres, 2, ["x*x", "y*y"]))


def test_cover_word_in_the_ideal_is_rejected(algebra):
    with pytest.raises(BusinessError, match="is zero"):
        cover_from_words(algebra("finite_points"), 2, ["y*x"])


@pytest.mark.parametrize("name, expected", [("line_cycle", 6), ("depth_two", 6), ("commutative", 6), ("free2", 4)])
def test_cech_sections_in_degree_two(algebra, name, expected):
    result = cech_h0_dim(algebra(name), 2, k=1, M=1, check_stability=False)
    assert result.method == "cech"
    assert result.dim == expected


def test_default_cover_is_certified(algebra):
    cover = default_cover(algebra("line_cycle"), 2)
    assert cover.certified
    assert len(cover) == 6


@pytest.mark.slow
@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_cech_refinement_never_decreases(algebra, name):
    pres = algebra(name)
    # a decrease from (k, M) to (k + 1, M + 1) raises InvariantViolation
    result = cech_h0_dim(pres, 2, k=1, M=1, check_stability=True)
    # U_1 modulo torsion always embeds in the sections
    assert result.dim >= algebra_dim(pres, 2) - h0m_degree1(pres, 2).dim
    if name in SECTIONS_IN_DEGREE_TWO:
        assert result.dim <= SECTIONS_IN_DEGREE_TWO[name]
    if name in SURJECTIVE_IN_DEGREE_TWO:
        assert result.stable
        assert result.dim == SECTIONS_IN_DEGREE_TWO[name]


@pytest.mark.slow
@pytest.mark.parametrize("name, d, expected", [
    ("line_cycle", 3, 9),
    ("line_cycle", 4, 12),
    ("depth_two", 3, 10),
    ("free2", 3, 8),
])
def test_cech_sections_in_higher_degrees(algebra, name, d, expected):
    assert cech_h0_dim(algebra(name), d, k=1, M=1, check_stability=False).dim == expected


@pytest.mark.parametrize("d, expected", [
    (3, 3),
    pytest.param(4, 2, marks=pytest.mark.slow),
    pytest.param(5, 2, marks=pytest.mark.slow),
])
def test_sections_of_finite_points(algebra, d, expected):
    result = cech_h0_dim(algebra("finite_points"), d)
    assert result.stable
    assert result.dim == expected


def test_normalization_formula_counts_lines_and_nodes():
    for d in range(2, 6):
        lines = [ComponentSpec(kind="projective-line") for _ in range(d)]
        curves = [ComponentSpec(kind="veronese", vars=2, degree=d) for _ in range(2)]
        # d lines and two rational normal curves meet in a cycle of d + 2 nodes
        assert normalization_formula(lines + curves, d + 2) == 3 * d


def test_veronese_sections():
    assert ComponentSpec(kind="veronese", vars=3, degree=2).h0_value == 6
    assert ComponentSpec(kind="explicit", h0=4).h0_value == 4
    with pytest.raises(ValidationError):
        ComponentSpec(kind="explicit")


def test_negative_singular_count_is_rejected():
    with pytest.raises(BusinessError):
        normalization_formula([], -1)


def test_normalization_document(algebras_dir):
    document = load_normalization_config(algebras_dir / "line_cycle_normalization_d3.toml")
    result = evaluate_normalization(document)
    assert result.value == 9
    assert result.separates
    assert result.sing_count == 5
    assert result.attested_q_dim_one


def test_separation_fails_with_three_points_on_a_component():
    components = [ComponentSpec(kind="projective-line", singular=["a", "b", "c"])]
    assert not check_separates(components)
    assert NormalizationConfig(components=components).sing_count == 3


def test_missing_normalization_document(tmp_path):
    with pytest.raises(BusinessError, match="not found"):
        load_normalization_config(tmp_path / "absent.toml")
    broken = tmp_path / "broken.toml"
    broken.write_text('[[components]]\nkind = "circle"\n', encoding="utf-8")
    with pytest.raises(BusinessError, match="invalid"):
        load_normalization_config(broken)
