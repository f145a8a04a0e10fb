"""Shared fixtures: algebra files from algebras/ and a throwaway cache."""

from functools import lru_cache
from pathlib import Path

import pytest

from pslab.subprocesses.algebra.presentation import AlgebraPresentation, load_presentation
from pslab.subprocesses.cache_utils import GroebnerCache

ALGEBRAS = Path(__file__).resolve().parent.parent / "algebras"

# every algebra document under algebras/
ALGEBRA_NAMES = (
    "commutative",
    "depth_two",
    "finite_points",
    "free2",
    "free3",
    "line_cycle",
    "nilpotent_monomial",
    "x2_xy",
)


@lru_cache(maxsize=None)
def _load(name: str) -> AlgebraPresentation:
    return load_presentation(ALGEBRAS / f"{name}.toml")


@pytest.fixture(scope="session")
def algebras_dir() -> Path:
    return ALGEBRAS


@pytest.fixture(scope="session")
def algebra():
    """Load a fixture algebra by file stem, e.g. ``algebra("finite_points")``."""
    return _load


@pytest.fixture
def cache(tmp_path) -> GroebnerCache:
    return GroebnerCache(tmp_path / "cache")


def proportional(first, second) -> bool:
    """Two FreePolynomials (or sparse vectors) that differ by a nonzero scalar."""
    first, second = dict(first.items()), dict(second.items())
    if set(first) != set(second) or not first:
        return False
    key = next(iter(first))
    ratio = first[key] / second[key]
    return all(first[k] == ratio * second[k] for k in first)
