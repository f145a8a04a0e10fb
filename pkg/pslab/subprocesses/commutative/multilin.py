"""Multilinearization: S(d) on positioned variables, the shift σ, the maps ι_n, K(d) and U_d(A).

U_d(A) is realized as the balanced part of S/K: its degree-t piece has the balanced standard
monomials of multidegree (t, ..., t) as a basis, and products are normal forms modulo K.
"""

from __future__ import annotations

import logging
import random
import threading
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement

from pslab import config
from pslab.exceptions import BusinessError, InvariantViolation
from pslab.subprocesses.algebra.freealg import NCGroebnerBasis, NCOrder, nc_groebner
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, FreePolynomial
from pslab.subprocesses.commutative.cgroebner import (
    GroebnerLimits,
    MonomialOrder,
    ReducedGB,
    buchberger,
    hilbert_function,
    to_ring,
)
from pslab.subprocesses.helper_functions import SparseVector

logger = logging.getLogger(__name__)

ML_ORDERS = ("degrevlex", "deglex")


class PositionedVariable(NamedTuple):
    """Generator ``generator`` placed at tensor position ``position``."""
    generator: int
    position: int


@dataclass(frozen=True)
class MLRing:
    """The polynomial ring S(d) on variables (g, i), 0 ≤ g ≤ n, 0 ≤ i < d.

    ``degrevlex`` orders x_0 > y_0 > z_0 > x_1 > ... (so z_{i+1} < y_{i+1} < x_{i+1} < z_i),
    ``deglex`` orders x_0 < y_0 < z_0 < x_1 < ....
    """

    names: tuple[str, ...]
    d: int
    kind: str = "degrevlex"

    def __post_init__(self):
        if self.kind not in ML_ORDERS:
            raise BusinessError(f"unknown monomial order '{self.kind}', expected one of {', '.join(ML_ORDERS)}")

    @property
    def num_generators(self) -> int:
        return len(self.names)

    def name(self, generator: int, position: int) -> str:
        return f"{self.names[generator]}_{position}"

    @cached_property
    def positioned(self) -> tuple[PositionedVariable, ...]:
        """Variables from largest to smallest."""
        ascending_positions = [PositionedVariable(g, i) for i in range(self.d) for g in range(self.num_generators)]
        if self.kind == "deglex":
            return tuple(reversed(ascending_positions))
        return tuple(ascending_positions)

    @cached_property
    def slot(self) -> dict[PositionedVariable, int]:
        return {variable: index for index, variable in enumerate(self.positioned)}

    @cached_property
    def order(self) -> MonomialOrder:
        kind = "deglex" if self.kind == "deglex" else "degrevlex"
        return MonomialOrder(kind, tuple(self.name(v.generator, v.position) for v in self.positioned))

    @property
    def ring(self):
        return self.order.ring

    def with_kind(self, kind: str) -> MLRing:
        return MLRing(self.names, self.d, kind)

    def gen(self, generator: int, position: int) -> PolyElement:
        return self.ring.gens[self.slot[PositionedVariable(generator, position)]]

    def multidegree(self, monomial: tuple[int, ...]) -> tuple[int, ...]:
        degrees = [0] * self.d
        for variable, exponent in zip(self.positioned, monomial):
            degrees[variable.position] += exponent
        return tuple(degrees)

    def is_balanced(self, monomial: tuple[int, ...]) -> bool:
        return len(set(self.multidegree(monomial))) <= 1

    def monomial(self, exponents: dict[PositionedVariable, int]) -> tuple[int, ...]:
        values = [0] * len(self.positioned)
        for variable, exponent in exponents.items():
            values[self.slot[variable]] += exponent
        return tuple(values)

    def format_monomial(self, monomial: tuple[int, ...]) -> str:
        factors = []
        for position in range(self.d):
            for generator in range(self.num_generators):
                exponent = monomial[self.slot[PositionedVariable(generator, position)]]
                if exponent:
                    name = self.name(generator, position)
                    factors.append(name if exponent == 1 else f"{name}^{exponent}")
        return "*".join(factors) or "1"


@dataclass(frozen=True)
class MLMonomial:
    """A monomial of S(d) with its position multidegree."""

    exponents: tuple[int, ...]
    layout: MLRing = field(compare=False)

    @cached_property
    def multidegree(self) -> tuple[int, ...]:
        return self.layout.multidegree(self.exponents)

    @property
    def total_degree(self) -> int:
        return sum(self.exponents)

    @property
    def is_balanced(self) -> bool:
        return len(set(self.multidegree)) <= 1

    def __str__(self) -> str:
        return self.layout.format_monomial(self.exponents)


def shift(p: PolyElement, m: int, layout: MLRing) -> PolyElement:
    """σ^m: (g, i) ↦ (g, i + m); terms touching a position ≥ d − m vanish."""
    p = to_ring(p, layout.order)
    if m == 0:
        return p
    shifted = {}
    for monomial, coeff in p.iterterms():
        exponents = {}
        for variable, exponent in zip(layout.positioned, monomial):
            if not exponent:
                continue
            if variable.position + m >= layout.d:
                break
            exponents[PositionedVariable(variable.generator, variable.position + m)] = exponent
        else:
            target = layout.monomial(exponents)
            shifted[target] = shifted.get(target, QQ(0)) + coeff
    return layout.ring.from_dict({k: v for k, v in shifted.items() if v})


def iota(r: FreePolynomial, d: int, layout: MLRing) -> PolyElement:
    """ι_n: w_0 w_1 … w_{n−1} ↦ (w_0, 0)(w_1, 1)…(w_{n−1}, n−1), extended linearly."""
    if not r.is_homogeneous:
        raise BusinessError("ι is defined on homogeneous elements only")
    if r.is_zero:
        return layout.ring.zero
    if r.degree > d:
        raise BusinessError(f"element of degree {r.degree} does not fit in S({d})")
    terms = {}
    for word, coeff in r.items():
        target = layout.monomial({PositionedVariable(g, i): 1 for i, g in enumerate(word)})
        terms[target] = terms.get(target, QQ(0)) + coeff
    return layout.ring.from_dict({k: v for k, v in terms.items() if v})


class MLIdeal:
    """K(d) with reduced Gröbner bases cached per order kind.

    Bases are filled under an exclusive lock; completed bases are read without it.
    """

    def __init__(self, layout: MLRing, generators: Sequence[PolyElement], cache=None,
                 limits: GroebnerLimits | None = None):
        self.layout = layout
        self.generators = tuple(to_ring(g, layout.order) for g in generators if g)
        self.cache = cache
        self.limits = limits
        self._bases: dict[str, ReducedGB] = {}
        self._lock = threading.Lock()

    @property
    def d(self) -> int:
        return self.layout.d

    def groebner(self, kind: str | None = None) -> ReducedGB:
        kind = kind or self.layout.kind
        basis = self._bases.get(kind)
        if basis is not None:
            return basis
        with self._lock:
            if kind not in self._bases:
                order = self.layout.with_kind(kind).order
                self._bases[kind] = buchberger(self.generators, order, self.limits, cache=self.cache)
                logger.debug("K(%d) basis in %s: %d elements", self.d, kind, len(self._bases[kind].elements))
            return self._bases[kind]


def multilinearize(pres: AlgebraPresentation, d: int, order: str = "degrevlex", cache=None,
                   limits: GroebnerLimits | None = None) -> MLIdeal:
    """K(d) generated by σ^m(ι_e(r)) for every relation r of degree e and 0 ≤ m ≤ d − e.

    Whole components I_n are not needed: ι_n(u·r·w) is the monomial ι_{|u|}(u)·σ^{|u|+|r|}(ι(w))
    times σ^{|u|}(ι_e(r)), so the shifts of the relations generate the same ideal.
    """
    if d < 1:
        raise BusinessError("degree must be at least 1")
    layout = MLRing(tuple(pres.names), d, order)
    generators = []
    for relation in pres.relations:
        base = iota(relation, d, layout) if relation.degree <= d else None
        if base is None:
            continue
        for m in range(d - relation.degree + 1):
            generators.append(shift(base, m, layout))
    return MLIdeal(layout, generators, cache, limits)


def verify_generation(K: MLIdeal, pres: AlgebraPresentation, samples: int = 12, seed: int = config.DEFAULT_SEED) -> int:
    """Check that sampled elements σ^m ι_n(u·r·w) of every component I_n, n ≤ d, lie in K.

    Returns:
        The number of sampled elements.

    Raises:
        InvariantViolation: a sample does not reduce to zero.
    """
    rng = random.Random(seed)
    basis = K.groebner()
    letters = range(pres.num_generators)
    checked = 0
    for relation in pres.relations:
        for n in range(relation.degree, K.d + 1):
            for _ in range(samples):
                left = rng.randint(0, n - relation.degree)
                prefix = FreePolynomial.word(rng.choice(list(letters)) for _ in range(left))
                suffix = FreePolynomial.word(rng.choice(list(letters)) for _ in range(n - relation.degree - left))
                element = iota(prefix * relation * suffix, K.d, K.layout)
                element = shift(element, rng.randint(0, K.d - n), K.layout)
                checked += 1
                if not basis.contains(element):
                    raise InvariantViolation(f"sampled element of ι_{n}(I_{n}) is not in K({K.d})")
    return checked


def compositions(total: int, parts: int):
    """Exponent vectors of length ``parts`` summing to ``total``, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def balanced_standard_monomials(basis: ReducedGB, layout: MLRing, t: int) -> list[tuple[int, ...]]:
    """Standard monomials of multidegree (t, ..., t), in descending order.

    Positions are filled one at a time and a partial monomial is dropped as soon as a leading
    monomial supported on the filled positions divides it.
    """
    by_position: dict[int, list[tuple[int, ...]]] = {i: [] for i in range(layout.d)}
    for lead in basis.leading_monomials:
        touched = [layout.positioned[k].position for k, e in enumerate(lead) if e]
        if not touched:
            return []
        by_position[max(touched)].append(lead)
    slots = [[layout.slot[PositionedVariable(g, i)] for g in range(layout.num_generators)] for i in range(layout.d)]
    found = []
    width = len(layout.positioned)

    def extend(position: int, values: list[int]):
        if position == layout.d:
            found.append(tuple(values))
            return
        for exponents in compositions(t, layout.num_generators):
            for slot, exponent in zip(slots[position], exponents):
                values[slot] = exponent
            if not any(all(values[k] >= e for k, e in enumerate(lead)) for lead in by_position[position]):
                extend(position + 1, values)
        for slot in slots[position]:
            values[slot] = 0

    extend(0, [0] * width)
    return sorted(found, key=basis.ring.order, reverse=True)


def balanced_dim(K: MLIdeal, t: int, order: str | None = None) -> int:
    """dim U_d(A)_t as the number of balanced standard monomials."""
    basis = K.groebner(order)
    return len(balanced_standard_monomials(basis, K.layout.with_kind(basis_kind(K, order)), t))


def basis_kind(K: MLIdeal, order: str | None) -> str:
    return order or K.layout.kind


class UdAlgebra:
    """Coordinates on U_d(A) = (S/K)_balanced.

    Degree-t elements are sparse vectors over ``basis(t)``; products are normal forms modulo K.
    """

    def __init__(self, pres: AlgebraPresentation, K: MLIdeal, order: str | None = None, nc: NCGroebnerBasis | None = None):
        self.pres = pres
        self.K = K
        self.kind = basis_kind(K, order)
        self.layout = K.layout.with_kind(self.kind)
        self.gb = K.groebner(self.kind)
        self._nc = nc
        self._bases: dict[int, list[tuple[int, ...]]] = {}
        self._indices: dict[int, dict[tuple[int, ...], int]] = {}
        self._lock = threading.Lock()

    @property
    def d(self) -> int:
        return self.K.d

    @property
    def ring(self):
        return self.layout.ring

    @property
    def nc(self) -> NCGroebnerBasis:
        if self._nc is None:
            self._nc = nc_groebner(self.pres, max(self.d, 2), NCOrder.declaration(self.pres.num_generators),
                                   self.K.cache)
        return self._nc

    def basis(self, t: int) -> list[tuple[int, ...]]:
        found = self._bases.get(t)
        if found is None:
            with self._lock:
                found = self._bases.setdefault(t, balanced_standard_monomials(self.gb, self.layout, t))
        return found

    def index(self, t: int) -> dict[tuple[int, ...], int]:
        found = self._indices.get(t)
        if found is None:
            found = {monomial: i for i, monomial in enumerate(self.basis(t))}
            self._indices[t] = found
        return found

    def dim(self, t: int) -> int:
        return len(self.basis(t))

    def monomial(self, exponents: tuple[int, ...]) -> PolyElement:
        return self.ring.from_dict({tuple(exponents): QQ(1)})

    def reduce(self, p: PolyElement) -> PolyElement:
        return self.gb.normal_form(p)

    def element(self, vector: SparseVector, t: int) -> PolyElement:
        basis = self.basis(t)
        return self.ring.from_dict({basis[i]: c for i, c in vector.items() if c})

    def vector(self, p: PolyElement, t: int) -> SparseVector:
        """Coordinates of the normal form of a degree-t element."""
        index = self.index(t)
        vector = {}
        for monomial, coeff in self.reduce(p).iterterms():
            position = index.get(monomial)
            if position is None:
                raise InvariantViolation(
                    f"normal form term {self.layout.format_monomial(monomial)} is not a balanced standard monomial of degree {t}")
            vector[position] = coeff
        return vector

    def multiplication_columns(self, g: PolyElement, t: int, columns: dict[tuple[int, ...], int]) -> list[SparseVector]:
        """Columns of b ↦ NF(b·g) on basis(t), indexed by monomials through the growing ``columns`` map."""
        g = self.reduce(g)
        result = []
        for monomial in self.basis(t):
            product = self.reduce(self.monomial(monomial) * g)
            column = {}
            for term, coeff in product.iterterms():
                column[columns.setdefault(term, len(columns))] = coeff
            result.append(column)
        return result

    def iota_tilde_columns(self, words: Sequence[tuple[int, ...]] | None = None) -> list[SparseVector]:
        """ι̃ on the given words of degree d (the normal words of A_d by default), as U_1 coordinate vectors."""
        words = self.nc.normal_words(self.d) if words is None else words
        return [self.vector(iota(FreePolynomial.word(word), self.d, self.layout), 1) for word in words]

    def format_vector(self, vector: SparseVector, t: int) -> str:
        return str(self.element(vector, t).as_expr())


@lru_cache(maxsize=32)
def ud_algebra(pres: AlgebraPresentation, d: int, order: str = "degrevlex", cache=None,
               limits: GroebnerLimits | None = None) -> UdAlgebra:
    """Shared U_d(A) coordinates for (pres, d, order)."""
    return UdAlgebra(pres, multilinearize(pres, d, order, cache, limits))


def ud_element(pres: AlgebraPresentation, d: int, f: FreePolynomial, order: str = "degrevlex",
               cache=None) -> SparseVector:
    """ι̃(f) in the balanced standard-monomial basis of U_d(A)_1."""
    if f.is_zero:
        return {}
    if not f.is_homogeneous or f.degree != d:
        raise BusinessError(f"expected an element of degree {d}")
    ud = ud_algebra(pres, d, order, cache)
    return ud.vector(iota(f, d, ud.layout), 1)


@dataclass(frozen=True)
class UdPresentation:
    """U_d(A) = k[w]/P with w_j ↦ the j-th balanced standard monomial of degree one."""

    w_order: MonomialOrder
    kernel: ReducedGB
    images: tuple[tuple[int, ...], ...]
    ud: UdAlgebra = field(compare=False, repr=False)

    @property
    def w_names(self) -> tuple[str, ...]:
        return self.w_order.variables

    @property
    def ring(self):
        return self.w_order.ring

    def hilbert_function(self, t: int) -> int:
        return hilbert_function(self.kernel, t)

    def linear_form(self, vector: SparseVector) -> PolyElement:
        gens = self.ring.gens
        return sum((gens[i] * c for i, c in vector.items()), self.ring.zero)

    def linear_vector(self, form: PolyElement) -> SparseVector:
        vector = {}
        for monomial, coeff in to_ring(form, self.w_order).iterterms():
            if sum(monomial) != 1:
                raise ValueError("not a linear form")
            vector[monomial.index(1)] = coeff
        return vector


def ud_presentation(pres: AlgebraPresentation, d: int, degree_bound: int = config.DEFAULT_UD_CHECK_DEGREE,
                    order: str = "degrevlex", cache=None, limits: GroebnerLimits | None = None) -> UdPresentation:
    """Kernel P of k[w] → S/K, w_j ↦ m_j, by eliminating the positioned variables from the graph ideal.

    The w-variables carry weight d during pair selection so the graph ideal is completed one
    weighted degree at a time. Hilbert functions of k[w]/P and of the balanced part of S/K are
    compared for t ≤ degree_bound.

    Raises:
        InvariantViolation: the two Hilbert functions disagree or P has linear elements.
    """
    ud = ud_algebra(pres, d, order, cache, limits)
    images = tuple(ud.basis(1))
    w_names = tuple(f"w{j}" for j in range(len(images)))
    positioned = ud.layout.order.variables
    graph_order = MonomialOrder("block", positioned + w_names, len(positioned), "degrevlex")
    ring = graph_order.ring
    generators = [to_ring(g, graph_order) for g in ud.gb.elements]
    for j, monomial in enumerate(images):
        image = to_ring(ud.monomial(monomial), graph_order)
        generators.append(ring.gens[len(positioned) + j] - image)
    weights = (1,) * len(positioned) + (d,) * len(w_names)
    full = buchberger(generators, graph_order, limits, weights=weights, cache=cache)
    width = len(positioned)
    kept = [g for g in full.elements if all(not any(m[:width]) for m in g.itermonoms())]
    w_order = MonomialOrder("degrevlex", w_names)
    kernel = buchberger([to_ring(g, w_order) for g in kept], w_order, limits)
    result = UdPresentation(w_order, kernel, images, ud)

    if kernel.linear_part():
        raise InvariantViolation("w-presentation has linear relations")
    for t in range(degree_bound + 1):
        if result.hilbert_function(t) != ud.dim(t):
            raise InvariantViolation(
                f"Hilbert function mismatch at t={t}: presentation {result.hilbert_function(t)}, balanced {ud.dim(t)}")
    logger.debug("U_%d presentation: %d w-variables, %d kernel generators", d, len(w_names), len(kernel.elements))
    return result


@lru_cache(maxsize=16)
def shared_presentation(pres: AlgebraPresentation, d: int, order: str = "degrevlex", cache=None,
                        limits: GroebnerLimits | None = None) -> UdPresentation:
    """ud_presentation memoized per (pres, d, order)."""
    return ud_presentation(pres, d, config.DEFAULT_UD_CHECK_DEGREE, order, cache, limits)
