"""Commutative Gröbner engine over QQ on sympy's sparse polynomial rings.

Ideals are carried as ``ReducedGB`` values. Every ring is built from a ``MonomialOrder``
descriptor, whose ``variables`` are listed from the largest to the smallest variable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from sympy.polys.domains import QQ
from sympy.polys.orderings import MonomialOrder as SympyMonomialOrder
from sympy.polys.orderings import grevlex, grlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from pslab import config
from pslab.exceptions import InvariantViolation, ResourceLimitError
from pslab.subprocesses.helper_functions import format_rational, to_qq

logger = logging.getLogger(__name__)

ORDER_KINDS = ("deglex", "degrevlex", "lex", "block")
_GRADED = {"deglex": grlex, "degrevlex": grevlex, "lex": lex}

SATURATION_VARIABLE = "_t"


class BlockOrder(SympyMonomialOrder):
    """Compare the first ``split`` exponents with ``first``, break ties on the rest with ``second``."""

    alias = "block"
    is_global = True

    def __init__(self, split: int, first: str = "degrevlex", second: str = "degrevlex"):
        self.split = split
        self.first = first
        self.second = second

    def __call__(self, monomial):
        return (_GRADED[self.first](monomial[:self.split]), _GRADED[self.second](monomial[self.split:]))

    def __repr__(self):
        return f"BlockOrder({self.split}, {self.first!r}, {self.second!r})"

    def __eq__(self, other):
        return (isinstance(other, BlockOrder)
                and (self.split, self.first, self.second) == (other.split, other.first, other.second))

    def __hash__(self):
        return hash((BlockOrder, self.split, self.first, self.second))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on named variables, largest variable first.

    ``block`` is the size of the eliminated leading block for ``kind == "block"``; ``inner`` is the
    graded order used inside both blocks.
    """

    kind: str
    variables: tuple[str, ...]
    block: int = 0
    inner: str = "degrevlex"

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variables must be distinct")
        if self.kind == "block" and not 0 <= self.block <= len(self.variables):
            raise ValueError("block size out of range")

    @cached_property
    def sympy_order(self):
        if self.kind == "block":
            return BlockOrder(self.block, self.inner, self.inner)
        return _GRADED[self.kind]

    @cached_property
    def ring(self) -> PolyRing:
        return PolyRing(self.variables, QQ, self.sympy_order)

    def describe(self) -> dict:
        return {"kind": self.kind, "variables": list(self.variables), "block": self.block, "inner": self.inner}

    def with_variables(self, variables: Sequence[str]) -> MonomialOrder:
        kind = self.inner if self.kind == "block" else self.kind
        return MonomialOrder(kind, tuple(variables))

    def eliminating(self, block: Sequence[str]) -> MonomialOrder:
        """Block order with ``block`` first and the remaining variables after, inner order kept."""
        rest = [v for v in self.variables if v not in set(block)]
        inner = self.inner if self.kind in ("block", "lex") else self.kind
        return MonomialOrder("block", tuple(block) + tuple(rest), len(block), inner)


@dataclass(frozen=True)
class GroebnerLimits:
    """Ceilings for one Buchberger run."""
    max_basis_size: int = config.MAX_BASIS_SIZE
    max_pairs: int = config.MAX_PAIRS


def to_ring(polynomial: PolyElement, order: MonomialOrder) -> PolyElement:
    """Move ``polynomial`` into the ring of ``order``, matching variables by name."""
    ring = order.ring
    if polynomial.ring == ring:
        return polynomial
    return polynomial.set_ring(ring)


def total_degree(monomial: tuple[int, ...]) -> int:
    return sum(monomial)


def is_homogeneous(polynomial: PolyElement) -> bool:
    return len({sum(m) for m in polynomial.itermonoms()}) <= 1


def is_monomial(polynomial: PolyElement) -> bool:
    return len(polynomial) == 1


@dataclass(frozen=True)
class ReducedGB:
    """Reduced Gröbner basis: monic elements sorted by descending leading monomial."""

    order: MonomialOrder
    elements: tuple[PolyElement, ...]

    @property
    def ring(self) -> PolyRing:
        return self.order.ring

    @cached_property
    def leading_monomials(self) -> tuple[tuple[int, ...], ...]:
        return tuple(g.LM for g in self.elements)

    @property
    def is_unit(self) -> bool:
        return any(total_degree(m) == 0 for m in self.leading_monomials)

    @property
    def is_zero(self) -> bool:
        return not self.elements

    @property
    def is_homogeneous(self) -> bool:
        return all(is_homogeneous(g) for g in self.elements)

    def normal_form(self, polynomial: PolyElement) -> PolyElement:
        polynomial = to_ring(polynomial, self.order)
        if not self.elements or not polynomial:
            return polynomial
        return polynomial.rem(list(self.elements))

    def contains(self, polynomial: PolyElement) -> bool:
        return not self.normal_form(polynomial)

    def is_standard(self, monomial: tuple[int, ...]) -> bool:
        return not any(all(a >= b for a, b in zip(monomial, lead)) for lead in self.leading_monomials)

    def linear_part(self) -> list[PolyElement]:
        """Basis of the degree-one component of a homogeneous ideal (graded orders only)."""
        return [g for g in self.elements if g and max(total_degree(m) for m in g.itermonoms()) == 1]

    def serialize(self) -> dict:
        return {"elements": [
            [[list(m), format_rational(c)] for m, c in g.terms()] for g in self.elements
        ]}

    @classmethod
    def deserialize(cls, order: MonomialOrder, stored: dict) -> ReducedGB:
        ring = order.ring
        elements = tuple(
            ring.from_dict({tuple(m): to_qq(c) for m, c in terms}) for terms in stored["elements"]
        )
        return cls(order, elements)


def spoly(p1: PolyElement, p2: PolyElement) -> PolyElement:
    """LCM/LM(p1)*p1 - LCM/LM(p2)*p2 for monic p1, p2."""
    ring = p1.ring
    lcm12 = ring.monomial_lcm(p1.LM, p2.LM)
    return p1.mul_monom(ring.monomial_div(lcm12, p1.LM)) - p2.mul_monom(ring.monomial_div(lcm12, p2.LM))


def _cache_payload(generators: Sequence[PolyElement], order: MonomialOrder) -> dict:
    return {
        "kind": "cgb",
        "order": order.describe(),
        "generators": sorted(str(g.monic()) for g in generators),
    }


def buchberger(generators: Iterable[PolyElement], order: MonomialOrder, limits: GroebnerLimits | None = None,
               weights: Sequence[int] | None = None, cache=None) -> ReducedGB:
    """Reduced Gröbner basis of the ideal generated by ``generators``.

    Improved Buchberger with the normal selection strategy and the two Buchberger criteria, as in
    Becker-Weispfenning GROEBNERNEWS2. Pairs are selected by the weighted degree of their lcm
    first (``weights`` default to 1), then by the order.

    Args:
        generators: Polynomials in any ring whose variables are among ``order.variables``.
        order: The monomial order.
        limits: Resource ceilings.
        weights: Per-variable weights for pair selection.
        cache: Optional GroebnerCache.

    Returns:
        The reduced basis.

    Raises:
        ResourceLimitError: a ceiling was exceeded.
    """
    limits = limits or GroebnerLimits()
    ring = order.ring
    f = [to_ring(g, order) for g in generators]
    f = [g.monic() for g in f if g]
    if not f:
        return ReducedGB(order, ())

    payload = None
    if cache is not None:
        payload = _cache_payload(f, order)
        stored = cache.load(payload)
        if stored is not None:
            return ReducedGB.deserialize(order, stored)

    key = ring.order
    weights = tuple(weights) if weights is not None else (1,) * ring.ngens
    monomial_mul = ring.monomial_mul
    monomial_div = ring.monomial_div
    monomial_lcm = ring.monomial_lcm

    def weighted(monomial):
        return sum(w * e for w, e in zip(weights, monomial))

    def select(pairs):
        def pair_key(pair):
            lcm = monomial_lcm(f[pair[0]].LM, f[pair[1]].LM)
            return weighted(lcm), key(lcm), pair
        return min(pairs, key=pair_key)

    def normal(g, indices):
        h = g.rem([f[j] for j in indices]) if indices else g
        if not h:
            return None
        h = h.monic()
        if h not in index_of:
            index_of[h] = len(f)
            f.append(h)
        return h.LM, index_of[h]

    def update(basis, pairs, ih):
        h = f[ih]
        mh = h.LM

        candidates = basis.copy()
        kept = set()
        while candidates:
            ig = candidates.pop()
            mg = f[ig].LM
            lcm_hg = monomial_lcm(mh, mg)

            def lcm_divides(ip):
                return monomial_div(lcm_hg, monomial_lcm(mh, f[ip].LM))

            if monomial_mul(mh, mg) == lcm_hg or (
                    not any(lcm_divides(ipx) for ipx in candidates)
                    and not any(lcm_divides(pr[1]) for pr in kept)):
                kept.add((ih, ig))

        fresh = set()
        while kept:
            ih_, ig = kept.pop()
            mg = f[ig].LM
            if monomial_mul(mh, mg) != monomial_lcm(mh, mg):
                fresh.add((ih_, ig))

        surviving = set()
        while pairs:
            ig1, ig2 = pairs.pop()
            mg1, mg2 = f[ig1].LM, f[ig2].LM
            lcm12 = monomial_lcm(mg1, mg2)
            if (not monomial_div(lcm12, mh)
                    or monomial_lcm(mg1, mh) == lcm12
                    or monomial_lcm(mg2, mh) == lcm12):
                surviving.add((ig1, ig2))
        surviving |= fresh

        new_basis = {ig for ig in basis if not monomial_div(f[ig].LM, mh)}
        new_basis.add(ih)
        return new_basis, surviving

    # interreduce the input
    reduced = f[:]
    while True:
        f = reduced[:]
        reduced = []
        for i, p in enumerate(f):
            r = p.rem(f[:i]) if i else p
            if r:
                reduced.append(r.monic())
        if f == reduced:
            break

    index_of = {h: i for i, h in enumerate(f)}
    pending = set(range(len(f)))
    basis: set[int] = set()
    pairs: set[tuple[int, int]] = set()

    while pending:
        ih = min(pending, key=lambda i: (key(f[i].LM), i))
        pending.remove(ih)
        basis, pairs = update(basis, pairs, ih)

    processed = 0
    while pairs:
        pair = select(pairs)
        pairs.remove(pair)
        processed += 1
        if processed > limits.max_pairs or len(basis) > limits.max_basis_size:
            raise ResourceLimitError("Gröbner completion exceeded its ceiling", len(basis), processed)
        s = spoly(f[pair[0]], f[pair[1]])
        divisors = sorted(basis, key=lambda g: key(f[g].LM))
        found = normal(s, divisors)
        if found:
            basis, pairs = update(basis, pairs, found[1])
        if processed % 5000 == 0:
            logger.debug("%d pairs processed, basis size %d, %d pending", processed, len(basis), len(pairs))

    final = set()
    for ig in basis:
        found = normal(f[ig], sorted(basis - {ig}))
        if found:
            final.add(found[1])
    elements = tuple(sorted((f[i] for i in final), key=lambda g: key(g.LM), reverse=True))
    result = ReducedGB(order, elements)
    if cache is not None:
        cache.store(payload, result.serialize())
    return result


def groebner_of(J: ReducedGB, extra: Iterable[PolyElement] = (), order: MonomialOrder | None = None,
                **kwargs) -> ReducedGB:
    """Basis of J + ⟨extra⟩, optionally in another order on a superset of variables."""
    order = order or J.order
    return buchberger(list(J.elements) + list(extra), order, **kwargs)


def _extended(order: MonomialOrder, name: str = SATURATION_VARIABLE) -> MonomialOrder:
    """Block order eliminating one fresh variable ahead of ``order``'s variables."""
    inner = order.inner if order.kind in ("block", "lex") else order.kind
    return MonomialOrder("block", (name,) + order.variables, 1, inner)


def eliminate(J: ReducedGB, block: Sequence[str], limits: GroebnerLimits | None = None, cache=None) -> ReducedGB:
    """J ∩ k[variables not in ``block``], as a reduced basis in the restricted order."""
    block = [v for v in J.order.variables if v in set(block)]
    if not block:
        return J
    rest = [v for v in J.order.variables if v not in set(block)]
    elimination = J.order.eliminating(block)
    full = buchberger(J.elements, elimination, limits, cache=cache)
    width = len(block)
    kept = [g for g in full.elements if all(not any(m[:width]) for m in g.itermonoms())]
    target = J.order.with_variables(rest)
    return buchberger([to_ring(g, target) for g in kept], target, limits)


def _eliminate_fresh(generators: Sequence[PolyElement], order: MonomialOrder, limits, cache=None) -> ReducedGB:
    extended = _extended(order)
    full = buchberger(generators, extended, limits, cache=cache)
    kept = [g for g in full.elements if all(m[0] == 0 for m in g.itermonoms())]
    return buchberger([to_ring(g, order) for g in kept], order, limits)


def ideal_intersection(J: ReducedGB, L: ReducedGB, limits: GroebnerLimits | None = None) -> ReducedGB:
    """J ∩ L via ⟨t·J, (1 − t)·L⟩ ∩ k[x]."""
    extended = _extended(J.order)
    t = extended.ring.gens[0]
    generators = [t * to_ring(g, extended) for g in J.elements]
    generators += [(1 - t) * to_ring(g, extended) for g in L.elements]
    return _eliminate_fresh(generators, J.order, limits)


def ideal_quotient(J: ReducedGB, f: PolyElement, limits: GroebnerLimits | None = None) -> ReducedGB:
    """(J : f) = (J ∩ ⟨f⟩)/f."""
    f = to_ring(f, J.order)
    if not f:
        raise ValueError("colon by the zero polynomial")
    if J.contains(f):
        return buchberger([J.ring.one], J.order)
    if f.is_ground:
        return J
    principal = ReducedGB(J.order, (f.monic(),))
    meet = ideal_intersection(J, principal, limits)
    quotients = [g.exquo(f) for g in meet.elements]
    return buchberger(quotients, J.order, limits)


def saturate_variable(J: ReducedGB, variable: str, limits: GroebnerLimits | None = None, cache=None) -> ReducedGB:
    """(J : v^∞) for a single variable v.

    For homogeneous J the basis in degrevlex with v smallest gives the saturation by dividing
    every element by its largest power of v. Inhomogeneous input falls back to elimination.
    """
    if not J.is_homogeneous:
        return saturation(J, J.ring.gens[J.order.variables.index(variable)], limits, cache=cache)
    if J.is_zero or J.is_unit:
        return J
    rest = [v for v in J.order.variables if v != variable]
    last = MonomialOrder("degrevlex", tuple(rest) + (variable,))
    basis = buchberger(J.elements, last, limits, cache=cache)
    position = len(rest)
    divided = []
    for g in basis.elements:
        power = min(m[position] for m in g.itermonoms())
        divisor = list((0,) * last.ring.ngens)
        divisor[position] = power
        divided.append(g.quo_term((tuple(divisor), QQ(1))) if power else g)
    return buchberger([to_ring(g, J.order) for g in divided], J.order, limits)


def saturation(J: ReducedGB, f: PolyElement, limits: GroebnerLimits | None = None, verify: bool = False,
               cache=None) -> ReducedGB:
    """(J : f^∞).

    Monomial f over homogeneous J saturates one variable at a time; otherwise the fresh variable
    t is eliminated from J + ⟨1 − t·f⟩. With ``verify`` the result is compared with the fixed
    point of iterated ideal quotients.
    """
    f = to_ring(f, J.order)
    if not f:
        raise ValueError("saturation by the zero polynomial")
    if f.is_ground:
        return J
    if is_monomial(f) and J.is_homogeneous:
        result = J
        (monomial,) = f.itermonoms()
        for position, exponent in enumerate(monomial):
            if exponent:
                result = saturate_variable(result, J.order.variables[position], limits, cache)
    else:
        extended = _extended(J.order)
        t = extended.ring.gens[0]
        generators = [to_ring(g, extended) for g in J.elements] + [1 - t * to_ring(f, extended)]
        result = _eliminate_fresh(generators, J.order, limits, cache)
    if verify:
        chain = J
        while True:
            following = ideal_quotient(chain, f, limits)
            if following.elements == chain.elements:
                break
            chain = following
        if chain.elements != result.elements:
            raise InvariantViolation("saturation disagrees with iterated ideal quotients")
    return result


def saturate_irrelevant(J: ReducedGB, limits: GroebnerLimits | None = None, cache=None) -> ReducedGB:
    """(J : m^∞) for m generated by all variables, as ∩_i (J : x_i^∞)."""
    result = None
    for variable in J.order.variables:
        part = saturate_variable(J, variable, limits, cache)
        result = part if result is None else ideal_intersection(result, part, limits)
    return result if result is not None else J


def radical_membership(f: PolyElement, J: ReducedGB, limits: GroebnerLimits | None = None, cache=None) -> bool:
    """True iff f ∈ √J, decided by 1 ∈ J + ⟨1 − t·f⟩."""
    f = to_ring(f, J.order)
    if not f or J.contains(f):
        return True
    if J.is_unit:
        return True
    extended = MonomialOrder("degrevlex", (SATURATION_VARIABLE,) + J.order.variables)
    t = extended.ring.gens[0]
    generators = [to_ring(g, extended) for g in J.elements] + [1 - t * to_ring(f, extended)]
    return buchberger(generators, extended, limits, cache=cache).is_unit


def initial_dim(J: ReducedGB) -> int:
    """Dimension of k[x]/in(J): the largest variable set containing no leading-monomial support.

    The unit ideal has dimension -1.
    """
    if J.is_unit:
        return -1
    count = J.ring.ngens
    supports = {sum(1 << i for i, e in enumerate(m) if e) for m in J.leading_monomials}
    # drop supports that contain another support
    minimal = [s for s in supports if not any(o != s and o & s == o for o in supports)]
    best = 0

    def search(position: int, chosen: int, size: int):
        nonlocal best
        if size + (count - position) <= best:
            return
        if position == count:
            best = size
            return
        extended = chosen | (1 << position)
        if not any(s & extended == s for s in minimal):
            search(position + 1, extended, size + 1)
        search(position + 1, chosen, size)

    search(0, 0, 0)
    return best


def standard_monomials(J: ReducedGB, degree: int) -> list[tuple[int, ...]]:
    """Monomials of the given total degree outside in(J), in descending order."""
    count = J.ring.ngens
    found = []

    def extend(prefix: list[int], remaining: int):
        if len(prefix) == count - 1:
            monomial = tuple(prefix + [remaining])
            if J.is_standard(monomial):
                found.append(monomial)
            return
        for exponent in range(remaining, -1, -1):
            extend(prefix + [exponent], remaining - exponent)

    if count == 0:
        return [()] if degree == 0 and not J.is_unit else []
    extend([], degree)
    return sorted(found, key=J.ring.order, reverse=True)


def hilbert_function(J: ReducedGB, degree: int) -> int:
    """dim (k[x]/J)_degree for homogeneous J under a graded order."""
    return len(standard_monomials(J, degree))


def quotient_dimension(J: ReducedGB, ceiling: int = 10_000) -> int | None:
    """dim_k k[x]/J when it is finite, else None."""
    if J.is_unit:
        return 0
    if initial_dim(J) != 0:
        return None
    count = J.ring.ngens
    leads = J.leading_monomials
    total = 0
    stack = [tuple([0] * count)]
    seen = set(stack)
    while stack:
        monomial = stack.pop()
        if not J.is_standard(monomial):
            continue
        total += 1
        if total > ceiling:
            raise ResourceLimitError("standard monomial count exceeded its ceiling", len(leads), total)
        for i in range(count):
            following = monomial[:i] + (monomial[i] + 1,) + monomial[i + 1:]
            if following not in seen:
                seen.add(following)
                stack.append(following)
    return total
