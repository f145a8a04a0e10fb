"""Degree-one local cohomology of U_d(A) and the kernel and cokernel of τ in degree d.

ι̃ : A_d → U_d(A)_1 is an isomorphism, so subspaces of U_d(A)_1 are pulled back to A_d by solving
against the ι̃ columns of the normal words.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Literal

from pydantic import BaseModel, Field

from pslab import config
from pslab.exceptions import InvariantViolation
from pslab.subprocesses.algebra.freealg import NCOrder, SubspaceBasis, algebra_dim, nc_groebner
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, FreePolynomial
from pslab.subprocesses.commutative.cgroebner import (
    GroebnerLimits,
    radical_membership,
    saturate_irrelevant,
    saturation,
)
from pslab.subprocesses.commutative.multilin import UdAlgebra, shared_presentation, ud_algebra
from pslab.subprocesses.geometry.sections import Arena, CoverSpec, SectionsResult, cech_h0_dim
from pslab.subprocesses.helper_functions import (
    SparseVector,
    columns_to_rows,
    nullspace,
    random_sample,
    rank,
    solve_columns,
)

logger = logging.getLogger(__name__)

Certainty = Literal["certified", "probabilistic"]


def h0m_degree1(pres: AlgebraPresentation, d: int, method: Arena = "presentation", order: str = "degrevlex",
                cache=None, limits: GroebnerLimits | None = None) -> SubspaceBasis:
    """H⁰_m(U_d(A))_1 in the balanced standard-monomial basis of U_d(A)_1.

    Presentation arena: the linear part of (P : m^∞) in k[w]. Ambient arena: the elements x of
    degree one with x·m^N ∈ K(d) for every balanced standard monomial m of degree one.
    """
    ud = ud_algebra(pres, d, order, cache, limits)
    size = ud.dim(1)
    if method == "presentation":
        presentation = shared_presentation(pres, d, order, cache, limits)
        saturated = saturate_irrelevant(presentation.kernel, limits, cache)
        vectors = [presentation.linear_vector(g) for g in saturated.linear_part()]
    else:
        columns: list[SparseVector] = [{} for _ in range(size)]
        terms: dict = {}
        for chart in ud.basis(1):
            saturated = saturation(ud.gb, ud.monomial(chart), limits, cache=cache)
            for b, monomial in enumerate(ud.basis(1)):
                for term, coeff in saturated.normal_form(ud.monomial(monomial)).iterterms():
                    columns[b][terms.setdefault((chart, term), len(terms))] = coeff
        vectors = nullspace(columns_to_rows(columns).values(), size)
    result = SubspaceBasis.span(vectors, size, ud.basis(1))
    logger.debug("H0_m(U_%d)_1 has dimension %d (%s)", d, result.dim, method)
    return result


def ker_tau_basis(pres: AlgebraPresentation, d: int, h0: SubspaceBasis | None = None, order: str = "degrevlex",
                  cache=None, limits: GroebnerLimits | None = None,
                  nc_order: NCOrder | None = None) -> list[FreePolynomial]:
    """Normal-word representatives in A_d of ι̃⁻¹(H⁰_m(U_d(A))_1).

    Words are normal for ``nc_order``, the declaration order when omitted.
    """
    ud = ud_algebra(pres, d, order, cache, limits)
    h0 = h0 if h0 is not None else h0m_degree1(pres, d, "presentation", order, cache, limits)
    basis = ud.nc if nc_order is None else nc_groebner(pres, max(d, 2), nc_order, cache)
    words = basis.normal_words(d)
    columns = ud.iota_tilde_columns(words)
    kernel = []
    for row in h0.rows:
        preimage = solve_columns(columns, row)
        if preimage is None:
            raise InvariantViolation(f"H0 element {ud.format_vector(row, 1)} is not in the image of ι̃")
        kernel.append(FreePolynomial((words[j], c) for j, c in preimage.items() if c))
    return kernel


def to_ud_coordinates(ud: UdAlgebra, subspace: SubspaceBasis) -> SubspaceBasis:
    """ι̃ applied to a subspace of A_d given in normal-word coordinates."""
    columns = ud.iota_tilde_columns()
    image = []
    for row in subspace.rows:
        vector: SparseVector = {}
        for k, coeff in row.items():
            for j, value in columns[k].items():
                vector[j] = vector.get(j, 0) + coeff * value
        image.append(vector)
    return SubspaceBasis.span(image, ud.dim(1), ud.basis(1))


@dataclass
class NilResult:
    """Degree-one nilradical of U_d(A) found so far, with how far it is certified."""

    basis: SubspaceBasis
    certainty: Certainty
    seed: int
    trials: int
    certified_by: str | None = None

    @property
    def dim(self) -> int:
        return self.basis.dim


def nilradical_degree1(pres: AlgebraPresentation, d: int, trials: int = config.DEFAULT_TRIALS,
                       seed: int = config.DEFAULT_SEED, jd: SubspaceBasis | None = None,
                       jd_source: str = "points", order: str = "degrevlex", cache=None,
                       limits: GroebnerLimits | None = None) -> NilResult:
    """Nil(U_d(A)) ∩ U_d(A)_1 from radical monomials, completed by seeded random samples.

    ``jd`` is J_d computed from points or families in normal-word coordinates; since the nilradical
    lies inside its ι̃-image, equal dimensions certify the candidate.
    """
    ud = ud_algebra(pres, d, order, cache, limits)
    size = ud.dim(1)
    candidate = [{j: 1} for j, monomial in enumerate(ud.basis(1))
                 if radical_membership(ud.monomial(monomial), ud.gb, limits, cache)]
    span = SubspaceBasis.span(candidate, size)
    rng = random.Random(seed)
    for _ in range(trials):
        if span.dim == size:
            break
        complement = [j for j in range(size) if j not in set(span.pivots)]
        sample = random_sample(rng, complement)
        if radical_membership(ud.element(sample, 1), ud.gb, limits, cache):
            logger.debug("a random sample found a nilpotent element outside the monomial candidate")
            span = SubspaceBasis.span(list(span.rows) + [sample], size)

    basis = SubspaceBasis.span(list(span.rows), size, ud.basis(1))
    if basis.dim == size:
        return NilResult(basis, "certified", seed, trials, "full-space")
    if jd is not None and to_ud_coordinates(ud, jd).dim == basis.dim:
        return NilResult(basis, "certified", seed, trials, jd_source)
    return NilResult(basis, "probabilistic", seed, trials)


def _multiplication_rank(ud: UdAlgebra, u, t: int, columns: dict | None = None) -> tuple[list[SparseVector], int]:
    columns = {} if columns is None else columns
    images = ud.multiplication_columns(u, t, columns)
    return images, rank(columns_to_rows(images).values(), ud.dim(t))


def annihilator_degreewise(pres: AlgebraPresentation, d: int, u: SparseVector, bound: int,
                           order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> list[int]:
    """dim{a ∈ U_t : u·a = 0} for t = 0..bound, u of degree one."""
    ud = ud_algebra(pres, d, order, cache, limits)
    element = ud.element(u, 1)
    return [ud.dim(t) - _multiplication_rank(ud, element, t)[1] for t in range(bound + 1)]


class SequenceEvidence(BaseModel):
    """Degree-bounded Koszul evidence that u, v is a regular sequence."""

    annihilator: list[int]
    koszul: list[int]

    @property
    def regular_up_to_bound(self) -> bool:
        return not any(self.annihilator) and not any(self.koszul)


def sequence_evidence_degreewise(pres: AlgebraPresentation, d: int, u: SparseVector, v: SparseVector, bound: int,
                                 order: str = "degrevlex", cache=None,
                                 limits: GroebnerLimits | None = None) -> SequenceEvidence:
    """Per degree t ≤ bound: the annihilator of u on U_t and dim ({a ∈ U_t : a·v ∈ u·U_t} / u·U_{t−1})."""
    ud = ud_algebra(pres, d, order, cache, limits)
    first, second = ud.element(u, 1), ud.element(v, 1)
    koszul = []
    for t in range(bound + 1):
        size = ud.dim(t)
        columns: dict = {}
        by_v = ud.multiplication_columns(second, t, columns)
        by_u = ud.multiplication_columns(first, t, columns)
        rows = columns_to_rows(by_v)
        for i, row in columns_to_rows(by_u, offset=size).items():
            target = rows.setdefault(i, {})
            for j, value in row.items():
                target[j] = -value
        solutions = nullspace(rows.values(), 2 * size)
        projected = rank([{j: c for j, c in s.items() if j < size} for s in solutions], size)
        divisible = _multiplication_rank(ud, first, t - 1)[1] if t >= 1 else 0
        koszul.append(projected - divisible)
    return SequenceEvidence(annihilator=annihilator_degreewise(pres, d, u, bound, order, cache, limits),
                            koszul=koszul)


class TauReport(BaseModel):
    """Degree-d data of τ: A → B(A) from the exact sequence 0 → H⁰_m → U → Γ_* → H¹_m → 0."""

    degree: int
    dim_A: int = Field(ge=0)
    dim_H0: int = Field(ge=0)
    kernel: list[str]
    dim_Gamma: int = Field(ge=0)
    dim_H1: int
    sections: SectionsResult
    injective: bool
    surjective: bool


def tau_report(pres: AlgebraPresentation, d: int, k: int = config.DEFAULT_CECH_K, M: int = config.DEFAULT_CECH_M,
               cover: CoverSpec | None = None, method: Arena = "presentation", check_stability: bool = True,
               order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None,
               nc_order: NCOrder | None = None) -> TauReport:
    """Assemble dim A_d, H⁰, Γ and the derived H¹ = Γ − A_d + H⁰.

    Raises:
        InvariantViolation: the derived H¹ is negative or ι̃ is not injective on A_d.
    """
    dim_A = algebra_dim(pres, d, nc_order, cache)
    ud = ud_algebra(pres, d, order, cache, limits)
    if ud.dim(1) != dim_A:
        raise InvariantViolation(f"dim U_{d}(A)_1 = {ud.dim(1)} differs from dim A_{d} = {dim_A}")
    h0 = h0m_degree1(pres, d, method, order, cache, limits)
    kernel = ker_tau_basis(pres, d, h0, order, cache, limits, nc_order)
    sections = cech_h0_dim(pres, d, cover, k, M, check_stability, method, order, cache, limits)
    dim_H1 = sections.dim - dim_A + h0.dim
    if dim_H1 < 0:
        raise InvariantViolation(f"negative H1 at d={d}: Γ={sections.dim}, A={dim_A}, H0={h0.dim}")
    return TauReport(
        degree=d,
        dim_A=dim_A,
        dim_H0=h0.dim,
        kernel=[f.format(pres.names) for f in kernel],
        dim_Gamma=sections.dim,
        dim_H1=dim_H1,
        sections=sections,
        injective=h0.dim == 0,
        surjective=dim_H1 == 0,
    )


def h0_inside_nilradical(h0: SubspaceBasis, nil: NilResult) -> bool:
    return nil.basis.contains_subspace(h0)
