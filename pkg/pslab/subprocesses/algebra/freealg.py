"""Graded pieces of the free algebra: I_d, truncated two-sided Gröbner bases and dim A_d."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from sympy.polys.domains import QQ

from pslab.exceptions import PresentationError
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, FreePolynomial, FreeWord
from pslab.subprocesses.helper_functions import SparseVector, format_rational, row_reduce, to_qq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TensorDegreeBasis:
    """All (n+1)^d words of length d, enumerated lexicographically by letter index."""

    num_generators: int
    degree: int

    @cached_property
    def words(self) -> list[FreeWord]:
        return list(itertools.product(range(self.num_generators), repeat=self.degree))

    @cached_property
    def index(self) -> dict[FreeWord, int]:
        return {word: i for i, word in enumerate(self.words)}

    def __len__(self) -> int:
        return self.num_generators ** self.degree

    def vector(self, polynomial: FreePolynomial) -> SparseVector:
        return {self.index[word]: coeff for word, coeff in polynomial.items()}


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of k^size given by reduced row-echelon rows.

    ``labels`` names the ambient basis vectors (words, monomials) when that is meaningful.
    """

    size: int
    rows: tuple[dict, ...]
    pivots: tuple[int, ...]
    labels: tuple = field(default=(), compare=False)

    @classmethod
    def span(cls, vectors: Sequence[SparseVector], size: int, labels: Sequence = ()) -> SubspaceBasis:
        rows, pivots = row_reduce(vectors, size)
        return cls(size, tuple(rows), tuple(pivots), tuple(labels))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, vector: SparseVector) -> bool:
        """Reduce ``vector`` against the pivot rows; zero remainder means membership."""
        remainder = {col: val for col, val in vector.items() if val}
        for pivot, row in zip(self.pivots, self.rows):
            factor = remainder.get(pivot)
            if not factor:
                continue
            for col, val in row.items():
                updated = remainder.get(col, QQ(0)) - factor * val
                if updated:
                    remainder[col] = updated
                else:
                    remainder.pop(col, None)
        return not remainder

    def contains_subspace(self, other: SubspaceBasis) -> bool:
        return all(self.contains(row) for row in other.rows)


def ideal_component_basis(pres: AlgebraPresentation, d: int) -> SubspaceBasis:
    """Row-reduced basis of I_d = Σ V^{⊗i}·r·V^{⊗j} inside V^{⊗d}."""
    ambient = TensorDegreeBasis(pres.num_generators, d)
    spanning = []
    for relation in pres.relations:
        room = d - relation.degree
        if room < 0:
            continue
        for left in range(room + 1):
            for prefix in itertools.product(range(pres.num_generators), repeat=left):
                for suffix in itertools.product(range(pres.num_generators), repeat=room - left):
                    spanning.append({
                        ambient.index[prefix + word + suffix]: coeff for word, coeff in relation.items()
                    })
    return SubspaceBasis.span(spanning, len(ambient), ambient.words)


@dataclass(frozen=True)
class NCOrder:
    """Left degree-lexicographic order; ``ranks[g]`` is the rank of generator g (0 = smallest)."""

    ranks: tuple[int, ...]

    @classmethod
    def declaration(cls, num_generators: int) -> NCOrder:
        return cls(tuple(range(num_generators)))

    @classmethod
    def from_chain(cls, pres: AlgebraPresentation, chain: str) -> NCOrder:
        """Parse ``"x<y<z"``; every generator appears exactly once."""
        names = [part.strip() for part in chain.split("<")]
        if sorted(names) != sorted(pres.names):
            raise PresentationError("order chain must list every generator once", chain)
        ranks = [0] * pres.num_generators
        for rank, name in enumerate(names):
            ranks[pres.index_of(name)] = rank
        return cls(tuple(ranks))

    def key(self, word: FreeWord) -> tuple:
        return len(word), tuple(self.ranks[letter] for letter in word)

    def leading(self, polynomial: FreePolynomial) -> FreeWord:
        return max(polynomial, key=self.key)

    def describe(self, names: list[str]) -> str:
        return "<".join(sorted(names, key=lambda name: self.ranks[names.index(name)]))


@dataclass(frozen=True)
class NCGroebnerBasis:
    """Reduced two-sided Gröbner basis of I, truncated at degree ``degree``.

    Elements are monic. Every overlap of total degree at most ``degree`` reduces to zero, so the
    normal words of degree at most ``degree`` form a basis of A in those degrees.
    """

    order: NCOrder
    degree: int
    elements: tuple[FreePolynomial, ...]
    complete_degrees: tuple[int, ...]

    @cached_property
    def leading_words(self) -> dict[FreeWord, FreePolynomial]:
        return {self.order.leading(g): g for g in self.elements}

    @cached_property
    def _lengths(self) -> tuple[int, ...]:
        return tuple(sorted({len(word) for word in self.leading_words}))

    def _divisor(self, word: FreeWord) -> tuple[int, FreeWord] | None:
        for length in self._lengths:
            for start in range(len(word) - length + 1):
                piece = word[start:start + length]
                if piece in self.leading_words:
                    return start, piece
        return None

    def is_normal(self, word: FreeWord) -> bool:
        return self._divisor(word) is None

    def normal_form(self, polynomial: FreePolynomial) -> FreePolynomial:
        """Fully reduce ``polynomial`` modulo the basis (valid through degree ``degree``)."""
        terms = dict(polynomial.items())
        normal: dict[FreeWord, object] = {}
        while terms:
            word = max(terms, key=self.order.key)
            coeff = terms.pop(word)
            hit = self._divisor(word)
            if hit is None:
                normal[word] = coeff
                continue
            start, piece = hit
            prefix, suffix = word[:start], word[start + len(piece):]
            for other, value in self.leading_words[piece].items():
                if other == piece:
                    continue
                target = prefix + other + suffix
                updated = terms.get(target, QQ(0)) - coeff * value
                if updated:
                    terms[target] = updated
                else:
                    terms.pop(target, None)
        return FreePolynomial(normal)

    def normal_words(self, d: int) -> list[FreeWord]:
        """Normal words of length d in lexicographic letter-index order."""
        if d > self.degree:
            raise ValueError(f"basis truncated at degree {self.degree}, asked for {d}")
        letters = range(len(self.order.ranks))
        found: list[FreeWord] = []

        def extend(prefix: FreeWord):
            if len(prefix) == d:
                found.append(prefix)
                return
            for letter in letters:
                word = prefix + (letter,)
                if any(len(word) >= length and word[-length:] in self.leading_words for length in self._lengths):
                    continue
                extend(word)

        extend(())
        return found

    def dim(self, d: int) -> int:
        return len(self.normal_words(d))

    def coordinates(self, polynomial: FreePolynomial, d: int) -> SparseVector:
        """Coordinates of the normal form of a degree-d element over ``normal_words(d)``."""
        index = {word: i for i, word in enumerate(self.normal_words(d))}
        return {index[word]: coeff for word, coeff in self.normal_form(polynomial).items()}


def _monic(polynomial: FreePolynomial, order: NCOrder) -> FreePolynomial:
    return polynomial.scale(1 / polynomial[order.leading(polynomial)])


def _overlaps(first: FreePolynomial, second: FreePolynomial, order: NCOrder, degree: int):
    """S-polynomials of the overlaps lw(first) = a·b, lw(second) = b·c with |a·b·c| = degree."""
    left, right = order.leading(first), order.leading(second)
    for shared in range(1, min(len(left), len(right))):
        if len(left) + len(right) - shared != degree:
            continue
        if left[len(left) - shared:] == right[:shared]:
            head = FreePolynomial.word(left[:len(left) - shared])
            tail = FreePolynomial.word(right[shared:])
            yield first * tail - head * second


def nc_groebner(pres: AlgebraPresentation, D: int, order: NCOrder | None = None, cache=None) -> NCGroebnerBasis:
    """Truncated Buchberger completion in the free algebra, one degree at a time.

    At degree δ the candidates are the relations of degree δ and every overlap S-polynomial of
    degree δ between basis elements found so far (self-overlaps included). Candidates are reduced
    modulo the current basis and then row reduced among themselves with columns sorted by
    descending word, which leaves the basis reduced.

    Args:
        pres: The presentation.
        D: Truncation degree.
        order: Word order; declaration order when omitted.
        cache: Optional GroebnerCache.

    Returns:
        The truncated basis.
    """
    order = order or NCOrder.declaration(pres.num_generators)
    payload = None
    if cache is not None:
        payload = {
            "kind": "nc",
            "generators": pres.names,
            "relations": [r.format(pres.names) for r in pres.relations],
            "degree": D,
            "order": list(order.ranks),
        }
        stored = cache.load(payload)
        if stored is not None:
            elements = tuple(
                FreePolynomial((tuple(word), to_qq(coeff)) for word, coeff in terms)
                for terms in stored["elements"]
            )
            return NCGroebnerBasis(order, D, elements, tuple(range(D + 1)))

    basis: list[FreePolynomial] = []
    for delta in range(2, D + 1):
        current = NCGroebnerBasis(order, D, tuple(basis), ())
        candidates = [r for r in pres.relations if r.degree == delta]
        for first, second in itertools.product(basis, repeat=2):
            candidates.extend(_overlaps(first, second, order, delta))
        reduced = [current.normal_form(c) for c in candidates]
        reduced = [c for c in reduced if not c.is_zero]
        if not reduced:
            continue
        columns = sorted({w for c in reduced for w in c}, key=order.key, reverse=True)
        position = {word: i for i, word in enumerate(columns)}
        rows, _ = row_reduce([{position[w]: v for w, v in c.items()} for c in reduced], len(columns))
        fresh = [FreePolynomial({columns[i]: v for i, v in row.items()}) for row in rows]
        basis.extend(_monic(g, order) for g in fresh)
        logger.debug("degree %d: %d candidates, %d new basis elements", delta, len(candidates), len(fresh))

    result = NCGroebnerBasis(order, D, tuple(basis), tuple(range(D + 1)))
    if cache is not None:
        cache.store(payload, {"elements": [
            [[list(word), format_rational(coeff)] for word, coeff in g.items()] for g in basis
        ]})
    return result


def algebra_dim(pres: AlgebraPresentation, d: int, order: NCOrder | None = None, cache=None) -> int:
    """dim A_d as the number of normal words of degree d."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return nc_groebner(pres, max(d, 2), order, cache).dim(d)
