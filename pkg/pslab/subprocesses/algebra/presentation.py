"""Presentations A = T(V)/I of connected graded algebras generated in degree 1 over QQ.

The algebra file is TOML::

    [algebra]
    name = "example"
    generators = ["x", "y", "z"]
    char_not = [2]

    [[relations]]
    expr = "x^2 - x*y"

Relation expressions use explicit ``*`` for the (noncommutative) product.
"""

from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

from sympy.polys.domains import QQ

from pslab.exceptions import BusinessError, PresentationError
from pslab.subprocesses.helper_functions import format_rational

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9]*")

FreeWord = tuple[int, ...]


class GeneratorSymbol(NamedTuple):
    """A degree-one generator and its position in the declared order."""
    name: str
    index: int


class FreePolynomial(Mapping):
    """An element of the free algebra: a finite map from words to nonzero rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[FreeWord, object] | Iterable[tuple[FreeWord, object]] = ()):
        collected: dict[FreeWord, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, coeff in items:
            word = tuple(word)
            collected[word] = collected.get(word, QQ(0)) + QQ.convert(coeff)
        self._terms = {word: coeff for word, coeff in sorted(collected.items()) if coeff}
        self._hash = None

    @classmethod
    def word(cls, word: Iterable[int], coeff=1) -> FreePolynomial:
        return cls({tuple(word): coeff})

    def __getitem__(self, word):
        return self._terms[word]

    def __iter__(self) -> Iterator[FreeWord]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, FreePolynomial):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: FreePolynomial) -> FreePolynomial:
        return FreePolynomial(list(self._terms.items()) + list(other.items()))

    def __sub__(self, other: FreePolynomial) -> FreePolynomial:
        return self + other.scale(-1)

    def __mul__(self, other: FreePolynomial) -> FreePolynomial:
        return FreePolynomial(
            (left + right, a * b) for left, a in self._terms.items() for right, b in other.items()
        )

    def __repr__(self) -> str:
        return f"FreePolynomial({self._terms!r})"

    def scale(self, factor) -> FreePolynomial:
        factor = QQ.convert(factor)
        return FreePolynomial((word, coeff * factor) for word, coeff in self._terms.items())

    def degrees(self) -> set[int]:
        return {len(word) for word in self._terms}

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int:
        """Degree of a homogeneous polynomial; -1 for zero."""
        degrees = self.degrees()
        if not degrees:
            return -1
        if len(degrees) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degrees.pop()

    def format(self, names: list[str]) -> str:
        """Render in the input grammar, collapsing runs of a letter into powers."""
        if not self._terms:
            return "0"
        pieces = []
        for word, coeff in self._terms.items():
            sign = "-" if coeff < 0 else "+"
            magnitude = -coeff if coeff < 0 else coeff
            factors = _format_word(word, names)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = factors
            else:
                body = f"{format_rational(magnitude)}*{factors}"
            pieces.append((sign, body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text


def _format_word(word: FreeWord, names: list[str]) -> str:
    factors = []
    index = 0
    while index < len(word):
        run = 1
        while index + run < len(word) and word[index + run] == word[index]:
            run += 1
        factors.append(names[word[index]] if run == 1 else f"{names[word[index]]}^{run}")
        index += run
    return "*".join(factors)


@dataclass(frozen=True)
class AlgebraPresentation:
    """A = T(V)/I given by degree-one generators and homogeneous relations of degree ≥ 2.

    ``char_not`` records characteristic exclusions from the input; the field is always QQ.
    """

    name: str
    generators: tuple[GeneratorSymbol, ...]
    relations: tuple[FreePolynomial, ...] = ()
    char_not: tuple[int, ...] = field(default=())

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate generator name")
        if [g.index for g in self.generators] != list(range(len(names))):
            raise PresentationError("generator indices must follow declaration order")
        for relation in self.relations:
            if relation.is_zero:
                raise PresentationError("relation is zero")
            if not relation.is_homogeneous:
                raise PresentationError("non-homogeneous relation", relation.format(names))
            if relation.degree < 2:
                raise PresentationError("relation of degree < 2", relation.format(names))

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    @property
    def num_generators(self) -> int:
        """n + 1"""
        return len(self.generators)

    def index_of(self, name: str) -> int:
        for generator in self.generators:
            if generator.name == name:
                return generator.index
        raise PresentationError(f"unknown generator '{name}'")

    def word(self, text: str) -> FreeWord:
        """Parse a monomial such as ``"x*y^2"`` into a word."""
        polynomial = parse_free_polynomial(text, self.names)
        if len(polynomial) != 1:
            raise PresentationError("expected a single word", text)
        return next(iter(polynomial))

    def polynomial(self, text: str) -> FreePolynomial:
        return parse_free_polynomial(text, self.names)


# Expression grammar -------------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^]))")


def _tokenize(expression: str) -> list[tuple[str, str, int]]:
    tokens = []
    position = 0
    while position < len(expression):
        if expression[position:].strip() == "":
            break
        match = _TOKEN.match(expression, position)
        if not match:
            offset = position + len(expression[position:]) - len(expression[position:].lstrip())
            raise PresentationError(f"unexpected character '{expression[offset]}'", expression, offset)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    return tokens


class _TermParser:
    """Recursive descent over ``expr := term (("+"|"-") term)*``.

    Produces (coefficient, letters) pairs with powers expanded. A term may also be a bare rational,
    which lets parameter polynomials contain constants.
    """

    def __init__(self, expression: str, names: Iterable[str]):
        self.expression = expression
        self.names = set(names)
        self.tokens = _tokenize(expression)
        self.index = 0

    def _peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _position(self) -> int:
        token = self._peek()
        return token[2] if token else len(self.expression)

    def _error(self, reason: str):
        raise PresentationError(reason, self.expression, self._position())

    def _take(self, kind: str, value: str | None = None):
        token = self._peek()
        if token is None or token[0] != kind or (value is not None and token[1] != value):
            self._error(f"expected {value or kind}")
        self.index += 1
        return token

    def parse(self) -> list[tuple[object, tuple[str, ...]]]:
        if not self.tokens:
            self._error("empty expression")
        terms = []
        sign = 1
        token = self._peek()
        if token[0] == "op" and token[1] in "+-":
            sign = -1 if token[1] == "-" else 1
            self.index += 1
        terms.append(self._term(sign))
        while self._peek() is not None:
            token = self._take("op")
            if token[1] not in "+-":
                self.index -= 1
                self._error("expected '+' or '-'")
            terms.append(self._term(-1 if token[1] == "-" else 1))
        return terms

    def _term(self, sign: int):
        coeff = QQ(sign)
        token = self._peek()
        if token is None:
            self._error("expected a term")
        if token[0] == "op" and token[1] == "-":
            self.index += 1
            coeff = -coeff
            token = self._peek()
            if token is None or token[0] != "num":
                self._error("expected an integer")
        if token[0] == "num":
            self.index += 1
            value = QQ(int(token[1]))
            following = self._peek()
            if following is not None and following[0] == "op" and following[1] == "/":
                self.index += 1
                denominator = int(self._take("num")[1])
                if denominator == 0:
                    self.index -= 1
                    self._error("zero denominator")
                value = value / denominator
            coeff *= value
            following = self._peek()
            if following is None or (following[0] == "op" and following[1] in "+-"):
                return coeff, ()
            if following[0] == "name":
                self._error("juxtaposition is not permitted, expected '*'")
            self._take("op", "*")
        return coeff, self._word()

    def _word(self) -> tuple[str, ...]:
        letters = list(self._factor())
        while True:
            token = self._peek()
            if token is not None and token[0] == "op" and token[1] == "*":
                self.index += 1
                letters.extend(self._factor())
            else:
                break
        return tuple(letters)

    def _factor(self) -> tuple[str, ...]:
        token = self._peek()
        if token is None or token[0] != "name":
            self._error("expected a generator")
        if token[1] not in self.names:
            self._error(f"unknown generator '{token[1]}'")
        self.index += 1
        power = 1
        following = self._peek()
        if following is not None and following[0] == "op" and following[1] == "^":
            self.index += 1
            power = int(self._take("num")[1])
            if power < 1:
                self.index -= 1
                self._error("exponent must be positive")
        following = self._peek()
        if following is not None and following[0] == "name":
            self._error("juxtaposition is not permitted, expected '*'")
        return (token[1],) * power


def parse_terms(expression: str, names: Iterable[str]) -> list[tuple[object, tuple[str, ...]]]:
    """Parse an expression into (coefficient, letter sequence) pairs."""
    return _TermParser(expression, names).parse()


def parse_free_polynomial(expression: str, names: list[str]) -> FreePolynomial:
    """Parse a noncommutative expression over the named generators."""
    positions = {name: index for index, name in enumerate(names)}
    return FreePolynomial(
        (tuple(positions[letter] for letter in letters), coeff)
        for coeff, letters in parse_terms(expression, names)
    )


# Documents ----------------------------------------------------------------------------------------

def build_presentation(name: str, generators: list[str], relations: list[str],
                       char_not: Iterable[int] = ()) -> AlgebraPresentation:
    """Validate generator names and parse relation expressions."""
    seen = set()
    for generator in generators:
        if not isinstance(generator, str) or not IDENTIFIER.fullmatch(generator):
            raise PresentationError(f"invalid generator name {generator!r}")
        if generator in seen:
            raise PresentationError(f"duplicate generator name '{generator}'")
        seen.add(generator)
    symbols = tuple(GeneratorSymbol(n, i) for i, n in enumerate(generators))
    parsed = []
    for expression in relations:
        polynomial = parse_free_polynomial(expression, generators)
        if polynomial.is_zero:
            raise PresentationError("relation is zero", expression)
        if not polynomial.is_homogeneous:
            raise PresentationError("non-homogeneous relation", expression)
        if polynomial.degree < 2:
            raise PresentationError("relation of degree < 2", expression)
        parsed.append(polynomial)
    return AlgebraPresentation(name, symbols, tuple(parsed), tuple(int(p) for p in char_not))


def parse_presentation(text: str) -> AlgebraPresentation:
    """Parse an algebra document (TOML) into a validated presentation."""
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as error:
        raise PresentationError(f"syntax error: {error}") from error

    algebra = document.get("algebra")
    if not isinstance(algebra, dict):
        raise PresentationError("missing [algebra] section")
    generators = algebra.get("generators")
    if not isinstance(generators, list) or not generators:
        raise PresentationError("[algebra] generators must be a nonempty array")
    relations = []
    for entry in document.get("relations", []):
        if not isinstance(entry, dict) or not isinstance(entry.get("expr"), str):
            raise PresentationError("each [[relations]] entry needs an expr string")
        relations.append(entry["expr"])
    char_not = algebra.get("char_not", [])
    if not all(isinstance(p, int) for p in char_not):
        raise PresentationError("char_not must be an array of integers")
    return build_presentation(str(algebra.get("name", "")), generators, relations, char_not)


def load_presentation(path: str | Path) -> AlgebraPresentation:
    """Read and parse an algebra file."""
    path = Path(path)
    if not path.is_file():
        raise BusinessError(f"algebra file not found: {path}")
    return parse_presentation(path.read_text(encoding="utf-8"))


def format_presentation(pres: AlgebraPresentation) -> str:
    """Print a presentation in the algebra document format."""
    lines = ["[algebra]", f'name = "{pres.name}"']
    lines.append("generators = [" + ", ".join(f'"{n}"' for n in pres.names) + "]")
    if pres.char_not:
        lines.append("char_not = [" + ", ".join(str(p) for p in pres.char_not) + "]")
    for relation in pres.relations:
        lines += ["", "[[relations]]", f'expr = "{relation.format(pres.names)}"']
    return "\n".join(lines) + "\n"


def relation_degrees(pres: AlgebraPresentation) -> list[int]:
    """Degrees of all relations, sorted."""
    return sorted(relation.degree for relation in pres.relations)
