import random
from fractions import Fraction

import pytest

from cubewalls import shapes
from cubewalls.coloring import (
    build_gamma,
    class_of_vertex,
    enumerate_colorings,
    exact_invariant_measure,
    vertex_classes_partition,
)
from cubewalls.complexes import trivial_action
from cubewalls.gluing import (
    PartitionError,
    PieceTemplate,
    SolverError,
    build_system,
    nonneg_integer_kernel,
    parse_matrix,
    parse_vector,
    rational_kernel_basis,
    seed_alpha,
)
from cubewalls.walls import compute_walls


def test_kernel_basis_simple():
    basis = rational_kernel_basis([[1, -1]], 2)
    assert len(basis) == 1
    assert basis[0][0] == basis[0][1]
    basis = rational_kernel_basis([[2, -3]], 2)
    assert len(basis) == 1
    a, b = basis[0]
    assert 2 * a == 3 * b


def test_kernel_basis_rank_checks():
    # oracle: brute-force verification that A v = 0 for every basis vector
    A = [[1, 2, 3, 0], [0, 1, 1, -1]]
    basis = rational_kernel_basis(A, 4)
    assert len(basis) == 2
    for v in basis:
        for row in A:
            assert sum(Fraction(c) * x for c, x in zip(row, v)) == 0


def test_nonneg_integer_kernel_spec_examples():
    sol = nonneg_integer_kernel([[1, -1]], [Fraction(1), Fraction(1)])
    assert sol.vector == (1, 1)

    sol = nonneg_integer_kernel([[2, -3]], [Fraction(3, 2), Fraction(1)])
    assert sol.vector == (3, 2)

    sol = nonneg_integer_kernel(
        [[1, 1, -1], [0, 1, -1]], [Fraction(0), Fraction(1), Fraction(1)]
    )
    assert sol.vector == (0, 1, 1)
    assert sol.support == (1, 2)


def test_nonneg_integer_kernel_rejects_bad_hints():
    with pytest.raises(SolverError):
        nonneg_integer_kernel([[1, -1]], [Fraction(1), Fraction(2)])
    with pytest.raises(SolverError):
        nonneg_integer_kernel([[1, -1]], [Fraction(0), Fraction(0)])
    with pytest.raises(SolverError):
        nonneg_integer_kernel([[1, -1]], [Fraction(-1), Fraction(-1)])


def test_nonneg_integer_kernel_purifies_to_a_ray():
    # two independent balanced blocks; an interior point purifies onto one block
    A = [[1, -1, 0, 0], [0, 0, 1, -1]]
    sol = nonneg_integer_kernel(A, [Fraction(1, 2)] * 4)
    assert sol.vector in ((1, 1, 0, 0), (0, 0, 1, 1))


def planted_instance(rng, nrows, ncols):
    """A random integer matrix with a planted positive kernel vector."""
    w = [rng.randint(1, 3) for _ in range(ncols)]
    pos = rng.randrange(ncols)
    w[pos] = 1
    rows = []
    while len(rows) < nrows:
        row = [rng.randint(-5, 5) for _ in range(ncols)]
        row[pos] = 0
        s = sum(r * x for r, x in zip(row, w))
        # solve the planted orthogonality through the coordinate with w == 1
        row[pos] = -s
        if abs(row[pos]) <= 5:
            rows.append(row)
    return rows, w


def test_solver_on_planted_instances():
    rng = random.Random(7)
    for _ in range(50):
        nrows = rng.randint(1, 8)
        ncols = rng.randint(2, 12)
        rows, w = planted_instance(rng, nrows, ncols)
        sol = nonneg_integer_kernel(rows, [Fraction(v, 2) for v in w])
        for row in rows:
            assert sum(r * x for r, x in zip(row, sol.vector)) == 0
        assert any(sol.vector)
        assert all(v >= 0 for v in sol.vector)


def test_parse_matrix_and_vector():
    assert parse_matrix("1 -2 3\n0 4 5\n") == [[1, -2, 3], [0, 4, 5]]
    assert parse_vector("1/2 3 -7/4") == [Fraction(1, 2), Fraction(3), Fraction(-7, 4)]


def anchored_classes(gamma, anchors):
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    out = []
    for x in anchors:
        parts = vertex_classes_partition(gamma, colorings, x)
        out.append((x, [cls for cls, _ in parts]))
    return out


def test_seed_alpha_segment():
    seg = shapes.segment()
    gamma = build_gamma(seg)
    mu = exact_invariant_measure(gamma)
    anchors = anchored_classes(gamma, seg.vertices)
    alpha = seed_alpha(mu, anchors, {v: 1 for v in seg.vertices})
    assert alpha.entries == (Fraction(1), Fraction(1))


def test_seed_alpha_square_halves():
    sq = shapes.square()
    gamma = build_gamma(sq)
    mu = exact_invariant_measure(gamma)
    anchors = anchored_classes(gamma, ["00"])
    alpha = seed_alpha(mu, anchors, {"00": 1})
    assert alpha.entries == (Fraction(1, 2), Fraction(1, 2))


def test_seed_alpha_divides_by_stabilizer():
    seg = shapes.segment()
    gamma = build_gamma(seg)
    mu = exact_invariant_measure(gamma)
    anchors = anchored_classes(gamma, ["a"])
    alpha = seed_alpha(mu, anchors, {"a": 2})
    assert alpha.entries == (Fraction(1, 2),)


def test_seed_alpha_partition_error():
    sq = shapes.square()
    gamma = build_gamma(sq)
    mu = exact_invariant_measure(gamma)
    anchors = anchored_classes(gamma, ["00"])
    broken = [(a, classes[:1]) for a, classes in anchors]
    with pytest.raises(PartitionError):
        seed_alpha(mu, broken, {"00": 1})


def segment_system():
    seg = shapes.segment()
    gamma = build_gamma(seg)
    walls = gamma.walls
    action = trivial_action(seg)
    sides = {w.id: walls.half_spaces(w) for w in walls}
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    templates = []
    for v in seg.vertices:
        for cls, members in vertex_classes_partition(gamma, colorings, v):
            templates.append(PieceTemplate(v, members[0], cls))
    return build_system(templates, action, sides), templates


def test_build_system_segment_single_equation():
    system, templates = segment_system()
    assert len(templates) == 2
    assert len(system.rows) == 1
    row = system.rows[0]
    assert row.net() in ({0: 1, 1: -1}, {0: -1, 1: 1})
    assert system.balanced([1, 1])
    assert not system.balanced([2, 1])


def test_build_system_square_balances_opposite_corners():
    sq = shapes.square()
    gamma = build_gamma(sq)
    walls = gamma.walls
    action = trivial_action(sq)
    sides = {w.id: walls.half_spaces(w) for w in walls}
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    templates = []
    for v in sq.vertices:
        for cls, members in vertex_classes_partition(gamma, colorings, v):
            templates.append(PieceTemplate(v, members[0], cls))
    system = build_system(templates, action, sides)
    assert len(templates) == 8
    # every row pairs one + template with one - template
    for row in system.rows:
        assert sum(row.plus.values()) == 1
        assert sum(row.minus.values()) == 1
    assert system.balanced([1] * 8)


def test_build_system_empty():
    system = build_system([], trivial_action(shapes.segment()), {})
    assert system.rows == []
