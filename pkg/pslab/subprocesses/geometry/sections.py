"""Global sections of O(1) on Υ_d(A) = Proj U_d(A).

Covers are lists of degree-one elements f_i of U_d(A), given as coordinate vectors over the
balanced standard monomials of degree one. Two arenas decide membership questions: the
w-presentation k[w]/P ("presentation") and S(d)/K(d) itself ("ambient"); they agree.
"""

from __future__ import annotations

import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

from pydantic import BaseModel, Field, ValidationError, model_validator

from pslab import config
from pslab.exceptions import BusinessError, InvariantViolation
from pslab.subprocesses.algebra.presentation import AlgebraPresentation
from pslab.subprocesses.commutative.cgroebner import (
    GroebnerLimits,
    ReducedGB,
    buchberger,
    initial_dim,
    quotient_dimension,
    radical_membership,
    saturation,
)
from pslab.subprocesses.commutative.multilin import UdAlgebra, shared_presentation, ud_algebra, ud_element
from pslab.subprocesses.helper_functions import SparseVector, columns_to_rows, nullspace, rank

logger = logging.getLogger(__name__)

Arena = Literal["presentation", "ambient"]


@dataclass(frozen=True)
class CoverSpec:
    """Degree-one elements f_i of U_d(A) whose charts D₊(f_i) should cover Υ_d(A)."""

    elements: tuple[tuple[tuple[int, object], ...], ...]
    labels: tuple[str, ...]
    certified: bool = False
    disjoint: bool = False

    @classmethod
    def from_vectors(cls, vectors: Sequence[SparseVector], labels: Sequence[str] = (), certified: bool = False,
                     disjoint: bool = False) -> CoverSpec:
        elements = tuple(tuple(sorted((i, c) for i, c in v.items() if c)) for v in vectors)
        labels = tuple(labels) or tuple(f"f{i}" for i in range(len(elements)))
        return cls(elements, labels, certified, disjoint)

    @property
    def vectors(self) -> list[SparseVector]:
        return [dict(element) for element in self.elements]

    def __len__(self) -> int:
        return len(self.elements)


class SectionsResult(BaseModel):
    """dim H⁰(Υ_d, O(1)) with the method and parameters that produced it."""

    dim: int = Field(ge=0)
    method: Literal["cech", "disjoint-sum", "normalization-formula"]
    k: int | None = None
    M: int | None = None
    stable: bool
    charts: int = 0


class LocalizationResult(BaseModel):
    """Eventual rank of multiplication by powers of f on U_{k+1}, i.e. dim U(1)_{(f)}."""

    value: int | None = None
    unbounded: bool = False
    ranks: list[int] = Field(default_factory=list)
    plateau: bool = False


def default_cover(pres: AlgebraPresentation, d: int, order: str = "degrevlex", cache=None) -> CoverSpec:
    """All balanced standard monomials of degree one; they generate m, so the cover is certified."""
    ud = ud_algebra(pres, d, order, cache)
    return CoverSpec.from_vectors([{j: 1} for j in range(ud.dim(1))],
                                  [ud.layout.format_monomial(m) for m in ud.basis(1)], certified=True)


def cover_from_words(pres: AlgebraPresentation, d: int, expressions: Sequence[str], order: str = "degrevlex",
                     cache=None) -> CoverSpec:
    """Cover elements ι̃(f) for degree-d expressions such as ``"x*x"`` or ``"y^3"``."""
    vectors = []
    for expression in expressions:
        vector = ud_element(pres, d, pres.polynomial(expression), order, cache)
        if not vector:
            raise BusinessError(f"cover element '{expression}' is zero in U_{d}(A)")
        vectors.append(vector)
    return CoverSpec.from_vectors(vectors, expressions)


def _ambient(ud: UdAlgebra, vector: SparseVector):
    return ud.element(vector, 1)


def certify_cover(pres: AlgebraPresentation, d: int, F: Sequence[SparseVector], method: Arena = "presentation",
                  order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> bool:
    """True iff the common zero locus of F on Υ_d(A) is empty.

    Presentation arena: every w-variable lies in √(P + ⟨F⟩). Ambient arena: every balanced standard
    monomial of degree one lies in √(K + ⟨F⟩).
    """
    if not F:
        return False
    if method == "presentation":
        presentation = shared_presentation(pres, d, order, cache, limits)
        ideal = buchberger(list(presentation.kernel.elements) + [presentation.linear_form(f) for f in F],
                           presentation.w_order, limits)
        targets = list(presentation.ring.gens)
    else:
        ud = ud_algebra(pres, d, order, cache, limits)
        ideal = buchberger(list(ud.gb.elements) + [_ambient(ud, f) for f in F], ud.gb.order, limits)
        targets = [ud.monomial(m) for m in ud.basis(1)]
    if ideal.is_unit:
        return True
    return all(radical_membership(target, ideal, limits) for target in targets)


def pairwise_disjoint(pres: AlgebraPresentation, d: int, F: Sequence[SparseVector], method: Arena = "presentation",
                      order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> bool:
    """True iff f_i·f_j is nilpotent in U_d(A) for all i < j."""
    if len(F) < 2:
        return True
    if method == "presentation":
        presentation = shared_presentation(pres, d, order, cache, limits)
        ideal = presentation.kernel
        forms = [presentation.linear_form(f) for f in F]
    else:
        ud = ud_algebra(pres, d, order, cache, limits)
        ideal = ud.gb
        forms = [_ambient(ud, f) for f in F]
    return all(
        radical_membership(forms[i] * forms[j], ideal, limits)
        for i in range(len(forms)) for j in range(i + 1, len(forms))
    )


def local_kernel(ud: UdAlgebra, saturated: ReducedGB, t: int) -> list[SparseVector]:
    """Z_t(f) = {x ∈ U_t : f^N·x = 0 for some N}, from the saturation (K : f^∞)."""
    columns = []
    terms: dict = {}
    for monomial in ud.basis(t):
        remainder = saturated.normal_form(ud.monomial(monomial))
        columns.append({terms.setdefault(m, len(terms)): c for m, c in remainder.iterterms()})
    return nullspace(columns_to_rows(columns).values(), ud.dim(t))


def _saturate_chart(ud: UdAlgebra, f: SparseVector, limits) -> ReducedGB:
    return saturation(ud.gb, _ambient(ud, f), limits, cache=ud.K.cache)


def localization_dim_deg1(pres: AlgebraPresentation, d: int, f: SparseVector,
                          stabilization_window: int = config.DEFAULT_WINDOW, method: Arena = "presentation",
                          order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> LocalizationResult:
    """dim Γ(D₊(f), O(1)) for a zero-dimensional chart.

    r_k = dim U_{k+1} − dim Z_{k+1}(f) is nondecreasing and, because U(1)/f·U(1) restricted to the
    f-torsion-free part is generated in degree zero, r_k = r_{k−1} certifies the limit.

    In the presentation arena the chart ring k[w]/(P + ⟨f − 1⟩) is checked first: positive dimension
    returns the unbounded flag, and a plateau must equal its vector-space dimension.
    """
    ud = ud_algebra(pres, d, order, cache, limits)
    chart_dim = None
    if method == "presentation":
        presentation = shared_presentation(pres, d, order, cache, limits)
        chart = buchberger(list(presentation.kernel.elements) + [presentation.linear_form(f) - 1],
                           presentation.w_order, limits)
        if initial_dim(chart) > 0:
            return LocalizationResult(unbounded=True)
        chart_dim = quotient_dimension(chart)

    saturated = _saturate_chart(ud, f, limits)
    ranks = []
    for k in range(stabilization_window + 1):
        ranks.append(ud.dim(k + 1) - len(local_kernel(ud, saturated, k + 1)))
        if k >= 1 and ranks[-1] == ranks[-2]:
            if chart_dim is not None and chart_dim != ranks[-1]:
                raise InvariantViolation(
                    f"chart dimension {chart_dim} disagrees with localization rank {ranks[-1]}")
            return LocalizationResult(value=ranks[-1], ranks=ranks, plateau=True)
    # no plateau inside the window; the chart dimension, when known, is still exact
    return LocalizationResult(value=chart_dim, ranks=ranks, plateau=False)


def _cech_value(ud: UdAlgebra, forms: list, kernels: list[list[SparseVector]], k: int, M: int) -> int:
    """rank(compatible tuples ∪ local kernels) − dim(local kernels) for tuples in U_{k+1}."""
    size = ud.dim(k + 1)
    charts = len(forms)
    powers_k = [ud.reduce(f ** k) for f in forms]
    rows: list[SparseVector] = []
    for i in range(charts):
        for j in range(i + 1, charts):
            guard = ud.reduce((forms[i] * forms[j]) ** M)
            if not guard:
                continue
            columns: dict = {}
            left = ud.multiplication_columns(guard * powers_k[j], k + 1, columns)
            right = ud.multiplication_columns(guard * powers_k[i], k + 1, columns)
            equations: dict[int, SparseVector] = {}
            for b, column in enumerate(left):
                for term, coeff in column.items():
                    equations.setdefault(term, {})[i * size + b] = coeff
            for b, column in enumerate(right):
                for term, coeff in column.items():
                    row = equations.setdefault(term, {})
                    row[j * size + b] = row.get(j * size + b, 0) - coeff
            rows.extend(equations.values())
    unknowns = charts * size
    compatible = nullspace(rows, unknowns)
    local = [{i * size + c: v for c, v in vector.items()} for i, chart in enumerate(kernels) for vector in chart]
    return rank(compatible + local, unknowns) - len(local)


def cech_h0_dim(pres: AlgebraPresentation, d: int, cover: CoverSpec | None = None, k: int = config.DEFAULT_CECH_K,
                M: int = config.DEFAULT_CECH_M, check_stability: bool = True, method: Arena = "presentation",
                order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> SectionsResult:
    """dim H⁰(Υ_d, O(1)) from compatible tuples over the charts D₊(f_i).

    A tuple (x_i) with x_i ∈ U_{k+1} is compatible when (f_i f_j)^M (x_i f_j^k − x_j f_i^k) = 0 for all
    i < j; pairs with (f_i f_j)^M = 0 impose nothing. Tuples of f_i-torsion elements give the zero
    section. The result is a lower bound that grows with (k, M); ``stable`` compares with (k+1, M+1).
    Certified pairwise disjoint covers are summed chart by chart instead.

    Raises:
        BusinessError: the cover does not cover Υ_d(A).
    """
    cover = cover or default_cover(pres, d, order, cache)
    vectors = cover.vectors
    if not cover.certified and not certify_cover(pres, d, vectors, method, order, cache, limits):
        raise BusinessError(f"cover {list(cover.labels)} does not cover Υ_{d}")
    if len(vectors) > 1 and (cover.disjoint or pairwise_disjoint(pres, d, vectors, method, order, cache, limits)):
        parts = [localization_dim_deg1(pres, d, f, config.DEFAULT_WINDOW, method, order, cache, limits) for f in vectors]
        if all(part.value is not None and part.plateau for part in parts):
            return SectionsResult(dim=sum(part.value for part in parts), method="disjoint-sum", stable=True,
                                  charts=len(vectors))
        logger.debug("disjoint cover with an unbounded chart, falling back to the Čech kernel")

    ud = ud_algebra(pres, d, order, cache, limits)
    forms = [_ambient(ud, f) for f in vectors]
    saturated = [_saturate_chart(ud, f, limits) for f in vectors]
    value = _cech_value(ud, forms, [local_kernel(ud, s, k + 1) for s in saturated], k, M)
    stable = True
    if check_stability:
        refined = _cech_value(ud, forms, [local_kernel(ud, s, k + 2) for s in saturated], k + 1, M + 1)
        if refined < value:
            raise InvariantViolation(f"Čech value decreased from {value} to {refined} when refining parameters")
        stable = refined == value
    logger.debug("Čech H0 at d=%d, k=%d, M=%d: %d (stable %s)", d, k, M, value, stable)
    return SectionsResult(dim=value, method="cech", k=k, M=M, stable=stable, charts=len(vectors))


# Normalization formula ----------------------------------------------------------------------------

class ComponentSpec(BaseModel):
    """A normalized component W′_i with the h⁰ of its twisted line bundle."""

    kind: Literal["projective-line", "veronese", "explicit"]
    vars: int = Field(default=2, ge=1)
    degree: int = Field(default=1, ge=1)
    h0: int | None = Field(default=None, ge=0)
    name: str = ""
    singular: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _explicit_needs_h0(self):
        if self.kind == "explicit" and self.h0 is None:
            raise ValueError("explicit components need h0")
        return self

    @property
    def h0_value(self) -> int:
        if self.kind == "projective-line":
            return 2
        if self.kind == "veronese":
            return math.comb(self.vars - 1 + self.degree, self.degree)
        return self.h0


class NormalizationConfig(BaseModel):
    """Components, singular points and the attested hypothesis dim Q_p = 1."""

    components: list[ComponentSpec]
    singular_points: list[str] | None = None
    attest_q_dim_one: bool = False

    @property
    def sing_count(self) -> int:
        if self.singular_points is not None:
            return len(set(self.singular_points))
        return len({label for component in self.components for label in component.singular})


class NormalizationResult(BaseModel):
    value: int
    separates: bool
    sing_count: int
    components: int
    attested_q_dim_one: bool


def normalization_formula(components: Sequence[ComponentSpec], sing_count: int) -> int:
    """Σ h⁰(W′_i, F_i) − |Sing(X)|."""
    if sing_count < 0:
        raise BusinessError("number of singular points must be nonnegative")
    return sum(component.h0_value for component in components) - sing_count


def check_separates(components: Sequence[ComponentSpec]) -> bool:
    """True iff every component meets at most two listed singular points."""
    return all(len(set(component.singular)) <= 2 for component in components)


def evaluate_normalization(document: NormalizationConfig) -> NormalizationResult:
    return NormalizationResult(
        value=normalization_formula(document.components, document.sing_count),
        separates=check_separates(document.components),
        sing_count=document.sing_count,
        components=len(document.components),
        attested_q_dim_one=document.attest_q_dim_one,
    )


def load_normalization_config(path: str | Path) -> NormalizationConfig:
    """Read the component/singularity document (TOML)."""
    path = Path(path)
    if not path.is_file():
        raise BusinessError(f"normalization config not found: {path}")
    try:
        return NormalizationConfig.model_validate(tomllib.loads(path.read_text(encoding="utf-8")))
    except (tomllib.TOMLDecodeError, ValidationError) as error:
        raise BusinessError(f"invalid normalization config {path}: {error}") from error
