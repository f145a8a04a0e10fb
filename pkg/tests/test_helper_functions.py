import random

from sympy.polys.domains import QQ

from pslab import config
from pslab.subprocesses.helper_functions import (
    format_rational,
    in_span,
    intersect_subspaces,
    nullspace,
    random_sample,
    rank,
    row_reduce,
    solve_columns,
    to_qq,
)


def test_to_qq_and_format():
    assert to_qq("3/6") == QQ(1, 2)
    assert to_qq(-4) == QQ(-4)
    assert format_rational(QQ(-3, 4)) == "-3/4"
    assert format_rational(QQ(5)) == "5"


def test_row_reduce_drops_dependent_rows():
    rows, pivots = row_reduce([{0: QQ(1), 1: QQ(2)}, {0: QQ(2), 1: QQ(4)}, {2: QQ(3)}], 3)
    assert pivots == [0, 2]
    assert rows[0] == {0: QQ(1), 1: QQ(2)}
    assert rows[1] == {2: QQ(1)}


def test_nullspace_is_orthogonal_to_rows():
    rows = [{0: QQ(1), 1: QQ(1), 2: QQ(1)}]
    kernel = nullspace(rows, 3)
    assert len(kernel) == 2
    for vector in kernel:
        assert sum(rows[0].get(i, 0) * v for i, v in vector.items()) == 0


def test_intersection_of_planes_is_a_line():
    first = [{0: QQ(1)}, {1: QQ(1)}]
    second = [{1: QQ(1)}, {2: QQ(1)}]
    assert intersect_subspaces([first, second], 3) == [{1: QQ(1)}]


def test_span_and_rank():
    basis = [{0: QQ(1), 1: QQ(1)}]
    assert in_span({0: QQ(3), 1: QQ(3)}, basis, 2)
    assert not in_span({0: QQ(1)}, basis, 2)
    assert rank(basis + [{1: QQ(1)}], 2) == 2


def test_solve_columns():
    columns = [{0: QQ(1)}, {0: QQ(1), 1: QQ(1)}]
    solution = solve_columns(columns, {0: QQ(3), 1: QQ(2)})
    assert solution == {0: QQ(1), 1: QQ(2)}
    assert solve_columns([{0: QQ(1)}], {1: QQ(1)}) is None


def test_random_sample_is_seeded_and_nonzero():
    first = random_sample(random.Random(7), [0, 3, 5])
    second = random_sample(random.Random(7), [0, 3, 5])
    assert first == second
    assert all(value and abs(value) <= config.SAMPLE_RANGE for value in first.values())
