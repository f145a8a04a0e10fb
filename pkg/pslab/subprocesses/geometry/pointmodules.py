"""Closed points of Υ_d(A) and truncated right point modules.

A point p = p_0 × … × p_{d−1} of (Pⁿ)^d corresponds to the module with basis m_0..m_d and
m_{i−1}·v = p_{i−1}(v) m_i, so a word w_0…w_{e−1} acts from m_i as Π_j p_{i+j}[w_j].
"""

from __future__ import annotations

import itertools
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement

from pslab.exceptions import BusinessError, InvariantViolation, PresentationError
from pslab.subprocesses.algebra.freealg import NCOrder, SubspaceBasis, nc_groebner
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, FreePolynomial, parse_terms
from pslab.subprocesses.commutative.cgroebner import (
    GroebnerLimits,
    MonomialOrder,
    buchberger,
    initial_dim,
)
from pslab.subprocesses.commutative.multilin import ud_algebra
from pslab.subprocesses.helper_functions import format_rational, nullspace, to_qq

logger = logging.getLogger(__name__)

PARAMETERS = ("s", "t")
PARAMETER_ORDER = MonomialOrder("degrevlex", PARAMETERS)


@dataclass(frozen=True)
class ProjectivePointTuple:
    """d points of Pⁿ in canonical form (first nonzero coordinate 1)."""

    factors: tuple[tuple[object, ...], ...]

    @classmethod
    def of(cls, factors: Sequence[Sequence[object]]) -> ProjectivePointTuple:
        canonical = []
        for factor in factors:
            values = [to_qq(v) for v in factor]
            lead = next((v for v in values if v), None)
            if lead is None:
                raise BusinessError("a point factor has all coordinates zero")
            canonical.append(tuple(v / lead for v in values))
        return cls(tuple(canonical))

    @property
    def d(self) -> int:
        return len(self.factors)

    def format(self) -> str:
        return "×".join("(" + ":".join(format_rational(v) for v in f) + ")" for f in self.factors)

    def sort_key(self):
        return tuple(tuple((v.numerator, v.denominator) for v in f) for f in self.factors)


@dataclass(frozen=True)
class TruncatedPointModule:
    """Structure covectors ρ̃_1..ρ̃_d of a length d+1 truncated point module."""

    covectors: tuple[tuple[object, ...], ...]

    @property
    def length(self) -> int:
        return len(self.covectors) + 1

    def act(self, word: Sequence[int], start: int = 0):
        """Scalar by which ``word`` moves m_start to m_{start+|word|}."""
        value = QQ(1)
        for offset, letter in enumerate(word):
            value *= self.covectors[start + offset][letter]
            if not value:
                break
        return value

    def evaluate(self, f: FreePolynomial, start: int = 0):
        return sum((c * self.act(word, start) for word, c in f.items()), QQ(0))

    def validate(self, pres: AlgebraPresentation) -> None:
        """Raises BusinessError unless every ρ̃_i is nonzero and every relation acts by zero."""
        for covector in self.covectors:
            if len(covector) != pres.num_generators:
                raise BusinessError("covector length does not match the number of generators")
            if not any(covector):
                raise BusinessError("a structure covector is zero")
        for relation in pres.relations:
            for start in range(len(self.covectors) - relation.degree + 1):
                if self.evaluate(relation, start):
                    raise BusinessError(
                        f"module does not satisfy relation {relation.format(pres.names)} from degree {start}")


def _check_shape(pres: AlgebraPresentation, d: int, factors: Sequence[Sequence]) -> None:
    if len(factors) != d or any(len(f) != pres.num_generators for f in factors):
        raise BusinessError(f"expected {d} factors of length {pres.num_generators}")


def verify_point(pres: AlgebraPresentation, d: int, p: ProjectivePointTuple) -> bool:
    """True iff every generator σ^m ι(r) of K(d) vanishes at p."""
    _check_shape(pres, d, p.factors)
    module = TruncatedPointModule(p.factors)
    return all(
        not module.evaluate(relation, start)
        for relation in pres.relations
        for start in range(d - relation.degree + 1)
    )


def point_to_module(p: ProjectivePointTuple, pres: AlgebraPresentation | None = None) -> TruncatedPointModule:
    """Δ: the i-th structure covector is the i-th coordinate vector."""
    module = TruncatedPointModule(p.factors)
    if pres is not None:
        module.validate(pres)
    return module


def module_to_point(module: TruncatedPointModule) -> ProjectivePointTuple:
    """∇: read the covectors back as a canonical point tuple."""
    return ProjectivePointTuple.of(module.covectors)


def module_annihilator(module: TruncatedPointModule, pres: AlgebraPresentation, d: int) -> SubspaceBasis:
    """Kernel of f ↦ m_0·f on A_d, in the normal-word basis."""
    module.validate(pres)
    words = nc_groebner(pres, max(d, 2), NCOrder.declaration(pres.num_generators)).normal_words(d)
    functional = {i: module.act(word) for i, word in enumerate(words) if module.act(word)}
    return SubspaceBasis.span(nullspace([functional], len(words)), len(words), words)


def point_vanishing_check(pres: AlgebraPresentation, d: int, p: ProjectivePointTuple, order: str = "degrevlex",
                          cache=None) -> bool:
    """ι̃(ann(p)) equals the degree-one part of the vanishing ideal of p in U_d(A)."""
    ud = ud_algebra(pres, d, order, cache)
    annihilator = module_annihilator(point_to_module(p, pres), pres, d)
    columns = ud.iota_tilde_columns()
    size = ud.dim(1)
    values = []
    for monomial in ud.basis(1):
        value = QQ(1)
        for variable, exponent in zip(ud.layout.positioned, monomial):
            if exponent:
                value *= p.factors[variable.position][variable.generator] ** exponent
        values.append(value)
    vanishing = SubspaceBasis.span(nullspace([{j: v for j, v in enumerate(values) if v}], size), size)
    image = []
    for row in annihilator.rows:
        vector: dict = {}
        for k, coeff in row.items():
            for j, value in columns[k].items():
                vector[j] = vector.get(j, QQ(0)) + coeff * value
        image.append(vector)
    return all(vanishing.contains(v) for v in image) and annihilator.dim == vanishing.dim


# Families -----------------------------------------------------------------------------------------

def parse_parameter_polynomial(expression: str) -> PolyElement:
    """A commutative polynomial in s, t (same grammar as relations)."""
    ring = PARAMETER_ORDER.ring
    try:
        terms = parse_terms(expression, PARAMETERS)
    except PresentationError as error:
        raise BusinessError(f"family entries may only use the parameters s and t: {error}") from error
    result = ring.zero
    for coeff, letters in terms:
        term = ring.one * coeff
        for letter in letters:
            term *= ring.gens[PARAMETERS.index(letter)]
        result += term
    return result


@dataclass(frozen=True)
class ParametrizedFamily:
    """Points p(s:t) of (Pⁿ)^d whose coordinates are forms in s, t; one factor per position."""

    factors: tuple[tuple[PolyElement, ...], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        for factor in self.factors:
            nonzero = [entry for entry in factor if entry]
            if not nonzero:
                raise BusinessError(f"family {self.label!r} has an identically zero factor")
            degrees = {sum(m) for entry in nonzero for m in entry.itermonoms()}
            if len(degrees) != 1:
                raise BusinessError(f"family {self.label!r}: factor entries must be forms of one degree in s, t")
            common = nonzero[0]
            for entry in nonzero[1:]:
                common = common.gcd(entry)
            if not common.is_ground:
                raise BusinessError(f"family {self.label!r}: factor entries share the factor {common.as_expr()}")

    @classmethod
    def from_strings(cls, factors: Sequence[Sequence[str]], label: str = "") -> ParametrizedFamily:
        return cls(tuple(tuple(parse_parameter_polynomial(e) for e in f) for f in factors), label)

    @property
    def module(self) -> _FamilyModule:
        return _FamilyModule(self.factors)


class _FamilyModule:
    """Symbolic point module over QQ[s, t]."""

    def __init__(self, factors):
        self.factors = factors

    def act(self, word: Sequence[int], start: int = 0) -> PolyElement:
        value = PARAMETER_ORDER.ring.one
        for offset, letter in enumerate(word):
            value *= self.factors[start + offset][letter]
            if not value:
                break
        return value

    def evaluate(self, f: FreePolynomial, start: int = 0) -> PolyElement:
        return sum((self.act(word, start) * c for word, c in f.items()), PARAMETER_ORDER.ring.zero)


def load_families(path: str | Path) -> list[ParametrizedFamily]:
    """Families file: ``[[families]]`` with ``label`` and ``factors`` (a d-list of coordinate lists)."""
    path = Path(path)
    if not path.is_file():
        raise BusinessError(f"families file not found: {path}")
    try:
        document = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as error:
        raise BusinessError(f"invalid families file {path}: {error}") from error
    families = []
    for index, entry in enumerate(document.get("families", [])):
        factors = entry.get("factors")
        if not isinstance(factors, list):
            raise BusinessError(f"family {index} needs a factors array")
        families.append(ParametrizedFamily.from_strings(
            [[str(e) for e in factor] for factor in factors], entry.get("label", f"family{index}")))
    return families


def jd_from_families(pres: AlgebraPresentation, d: int, families: Sequence[ParametrizedFamily]) -> SubspaceBasis:
    """{f ∈ A_d : f acts by zero on every member of every family}, in the normal-word basis.

    Raises:
        BusinessError: a family is not contained in Υ_d(A); the message names the generator.
    """
    words = nc_groebner(pres, max(d, 2), NCOrder.declaration(pres.num_generators)).normal_words(d)
    rows = []
    for family in families:
        _check_shape(pres, d, family.factors)
        module = family.module
        for relation in pres.relations:
            for start in range(d - relation.degree + 1):
                if module.evaluate(relation, start):
                    raise BusinessError(
                        f"family {family.label!r} is not contained in Υ_{d}: "
                        f"σ^{start} ι({relation.format(pres.names)}) does not vanish on it")
        equations: dict = {}
        for column, word in enumerate(words):
            for monomial, coeff in module.act(word).iterterms():
                equations.setdefault(monomial, {})[column] = coeff
        rows.extend(equations.values())
    return SubspaceBasis.span(nullspace(rows, len(words)), len(words), words)


def jd_from_points(pres: AlgebraPresentation, d: int, points: Sequence[ProjectivePointTuple]) -> SubspaceBasis:
    """Intersection of the annihilators of the given points."""
    words = nc_groebner(pres, max(d, 2), NCOrder.declaration(pres.num_generators)).normal_words(d)
    rows = []
    for point in points:
        module = point_to_module(point, pres)
        rows.append({i: module.act(word) for i, word in enumerate(words) if module.act(word)})
    return SubspaceBasis.span(nullspace(rows, len(words)), len(words), words)


# Finite enumeration -------------------------------------------------------------------------------

@dataclass
class PointEnumeration:
    """Rational points of a finite Υ_d(A), or the positive-dimensional flag."""

    points: list[ProjectivePointTuple] = field(default_factory=list)
    positive_dimensional: bool = False
    non_rational_charts: int = 0

    @property
    def complete(self) -> bool:
        """Every closed point is rational and listed."""
        return not self.positive_dimensional and not self.non_rational_charts


def _chart_polynomials(pres: AlgebraPresentation, d: int, pivots: Sequence[int]):
    names = pres.names
    free = [(g, i) for i in range(d) for g in range(pres.num_generators) if g > pivots[i]]
    order = MonomialOrder("lex", tuple(f"{names[g]}_{i}" for g, i in free))
    ring = order.ring if free else None
    slot = {variable: k for k, variable in enumerate(free)}

    def coordinate(position: int, generator: int):
        if generator < pivots[position]:
            return 0
        if generator == pivots[position]:
            return 1
        return ring.gens[slot[(generator, position)]]

    polynomials = []
    for relation in pres.relations:
        for start in range(d - relation.degree + 1):
            value = ring.zero if ring else QQ(0)
            for word, coeff in relation.items():
                term = coeff
                for offset, letter in enumerate(word):
                    term = term * coordinate(start + offset, letter)
                    if not term:
                        break
                value = value + term
            polynomials.append(value)
    return free, order, polynomials


def _linear_root(factor: PolyElement, position: int):
    coefficients = {m[position]: c for m, c in factor.iterterms()}
    return -coefficients.get(0, QQ(0)) / coefficients[1]


def _solve_lex(polynomials: list[PolyElement], order: MonomialOrder, limits) -> tuple[list[dict], int]:
    """Rational solutions by back-substitution through lex bases, and the count of irrational roots."""
    basis = buchberger(polynomials, order, limits)
    if basis.is_unit:
        return [], 0
    last = len(order.variables) - 1
    univariate = [g for g in basis.elements if all(not any(m[:last]) for m in g.itermonoms()) and g.degree(last) > 0]
    if not univariate:
        raise InvariantViolation("lex basis of a zero-dimensional chart has no eliminant")
    eliminant = univariate[-1]
    _, factors = eliminant.factor_list()
    roots = []
    irrational = 0
    for factor, _ in factors:
        if factor.degree(last) == 1:
            roots.append(_linear_root(factor, last))
        elif factor.degree(last) > 1:
            irrational += 1
    solutions = []
    if last == 0:
        return [{order.variables[0]: root} for root in roots], irrational
    remaining = order.with_variables(order.variables[:last])
    gen = order.ring.gens[last]
    for root in roots:
        substituted = [g.subs(gen, root) for g in basis.elements]
        reduced = [g.set_ring(remaining.ring) for g in substituted if g]
        if any(g.is_ground for g in reduced):
            continue
        partial, extra = _solve_lex(reduced, remaining, limits)
        irrational += extra
        for solution in partial:
            solution[order.variables[last]] = root
            solutions.append(solution)
    return solutions, irrational


def enumerate_points_finite(pres: AlgebraPresentation, d: int, limits: GroebnerLimits | None = None) -> PointEnumeration:
    """All rational closed points of Υ_d(A) when it is finite.

    (Pⁿ)^d is split into the canonical charts: at each position the first nonzero coordinate is 1
    and the earlier ones are 0. Each chart is an affine system solved through lex bases.
    """
    result = PointEnumeration()
    found = set()
    for pivots in itertools.product(range(pres.num_generators), repeat=d):
        free, order, polynomials = _chart_polynomials(pres, d, pivots)
        if not free:
            if any(polynomials):
                continue
            solutions, irrational = [{}], 0
        else:
            nonzero = [p for p in polynomials if p]
            if any(p.is_ground for p in nonzero):
                continue
            graded = buchberger(nonzero, MonomialOrder("degrevlex", order.variables), limits)
            if graded.is_unit:
                continue
            if initial_dim(graded) > 0:
                result.positive_dimensional = True
                logger.debug("chart %s is positive dimensional", pivots)
                return result
            solutions, irrational = _solve_lex(nonzero, order, limits)
        if irrational:
            result.non_rational_charts += 1
        for solution in solutions:
            factors = []
            for position in range(d):
                factor = []
                for generator in range(pres.num_generators):
                    if generator < pivots[position]:
                        factor.append(QQ(0))
                    elif generator == pivots[position]:
                        factor.append(QQ(1))
                    else:
                        factor.append(solution[f"{pres.names[generator]}_{position}"])
                factors.append(factor)
            point = ProjectivePointTuple.of(factors)
            if point not in found:
                found.add(point)
                result.points.append(point)
    result.points.sort(key=ProjectivePointTuple.sort_key)
    return result
