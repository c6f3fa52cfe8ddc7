import itertools
from fractions import Fraction

import pytest

from cubewalls import shapes
from cubewalls.coloring import (
    ColoringClass,
    InvariantMeasure,
    WallColoring,
    WallGraph,
    apply_to_coloring,
    build_gamma,
    class_of_vertex,
    class_of_wall,
    class_orbits,
    default_radius,
    edge_orbit_representatives,
    enumerate_colorings,
    exact_invariant_measure,
    greedy_coloring,
    induced_wall_permutations,
    push_forward,
    reduce_coloring,
    uniform_product_measure,
    vertex_classes_partition,
    weight,
)
from cubewalls.complexes import GroupAction
from cubewalls.walls import compute_walls


def k_graph(n):
    return WallGraph(range(n), itertools.combinations(range(n), 2))


def test_build_gamma_square_is_k2():
    g = build_gamma(shapes.square(), radius=1)
    assert len(g.nodes) == 2
    assert len(g.edges) == 1
    assert g.max_degree == 1


def test_build_gamma_3_cube_radius_0_is_k3():
    g = build_gamma(shapes.cube(3), radius=0)
    assert len(g.nodes) == 3
    assert len(g.edges) == 3
    assert g.max_degree == 2


def test_build_gamma_path3_radius_0_is_path():
    g = build_gamma(shapes.path_complex(3), radius=0)
    assert len(g.nodes) == 3
    assert g.max_degree == 2
    assert len(g.edges) == 2
    degrees = sorted(len(g.adj[v]) for v in g.nodes)
    assert degrees == [1, 1, 2]


def test_intersecting_walls_always_adjacent():
    for name, cx in shapes.cat0_fixtures().items():
        ws = compute_walls(cx)
        g = build_gamma(cx, radius=0, walls=ws)
        eset = set(g.edges)
        for i, w1 in enumerate(ws):
            for w2 in ws.walls[i + 1:]:
                if ws.intersects(w1, w2):
                    assert tuple(sorted((w1.id, w2.id))) in eset, name


def test_greedy_coloring_examples():
    assert greedy_coloring(k_graph(2)).colors == {0: 1, 1: 2}
    assert greedy_coloring(k_graph(3)).colors == {0: 1, 1: 2, 2: 3}
    path = WallGraph([0, 1, 2], [(0, 1), (1, 2)])
    assert greedy_coloring(path).colors == {0: 1, 1: 2, 2: 1}


def test_greedy_coloring_proper_with_bounded_palette_on_fixtures():
    for name, cx in shapes.cat0_fixtures().items():
        g = build_gamma(cx, radius=default_radius(cx))
        c = greedy_coloring(g)
        assert c.is_proper(), name
        assert max(c.colors.values()) <= g.max_degree + 1, name


def test_reduce_coloring_k2_examples():
    g = k_graph(2)
    c = WallColoring(g, 3, {0: 3, 1: 3})
    assert reduce_coloring(c).colors == {0: 1, 1: 1}
    c = WallColoring(g, 3, {0: 1, 1: 3})
    assert reduce_coloring(c).colors == {0: 1, 1: 2}
    c = WallColoring(g, 3, {0: 1, 1: 2})
    assert reduce_coloring(c).colors == {0: 1, 1: 2}


def test_reduce_coloring_requires_headroom():
    g = k_graph(2)
    with pytest.raises(ValueError):
        reduce_coloring(WallColoring(g, 2, {0: 1, 1: 2}))


def test_reduction_monochromatic_containment_exhaustive_k2_k3():
    for g in (k_graph(2), k_graph(3)):
        k = g.max_degree
        for n in (k + 2, k + 3):
            for c in enumerate_colorings(g, n, proper=False):
                r = reduce_coloring(c)
                for a, b in g.edges:
                    if r.colors[a] == r.colors[b]:
                        assert c.colors[a] == c.colors[b]
                if c.is_proper():
                    assert r.is_proper()


def test_weight_of_uniform_product_measure_is_m_over_n():
    for g, n in ((k_graph(2), 3), (k_graph(3), 4), (WallGraph([0, 1, 2], [(0, 1), (1, 2)]), 3)):
        mu = uniform_product_measure(g, n)
        m = len(g.edges)
        assert weight(mu, g, g.edges) == Fraction(m, n)


def test_weight_point_mass_on_proper_coloring_is_zero():
    g = k_graph(2)
    mu = InvariantMeasure(g, 2, {(1, 2): Fraction(1)})
    assert weight(mu, g, g.edges) == 0


def test_weight_uniform_on_2_colourings_of_k2():
    g = k_graph(2)
    mu = uniform_product_measure(g, 2)
    assert weight(mu, g, g.edges) == Fraction(1, 2)


def test_pushforward_weight_never_increases():
    for g in (k_graph(2), k_graph(3), WallGraph([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3)])):
        k = g.max_degree
        for n in (k + 2, k + 3):
            mu = uniform_product_measure(g, n)
            before = weight(mu, g, g.edges)
            after = weight(push_forward(mu, reduce_coloring), g, g.edges)
            assert after <= before


def test_reduction_is_equivariant():
    g = k_graph(3)
    perms = [{0: 1, 1: 2, 2: 0}, {0: 1, 1: 0, 2: 2}]
    for perm in perms:
        for c in enumerate_colorings(g, 5, proper=False):
            left = reduce_coloring(apply_to_coloring(perm, c))
            right = apply_to_coloring(perm, reduce_coloring(c))
            assert left.colors == right.colors


def test_exact_invariant_measure_k2_and_k3():
    g = k_graph(2)
    mu = exact_invariant_measure(g)
    assert len(mu.weights) == 2
    assert set(mu.weights.values()) == {Fraction(1, 2)}
    swap = {0: 1, 1: 0}
    mu2 = exact_invariant_measure(g, [swap])
    assert mu2.is_invariant_under(swap)

    g3 = k_graph(3)
    cyc = {0: 1, 1: 2, 2: 0}
    mu3 = exact_invariant_measure(g3, [cyc])
    assert len(mu3.weights) == 6
    assert weight(mu3, g3, g3.edges) == 0


def test_exact_invariant_measure_with_complex_action():
    g, rot = shapes.rotation_grid()
    action = GroupAction(g, [rot])
    gamma = build_gamma(g, radius=default_radius(g))
    mu = exact_invariant_measure(gamma, action)
    perms = induced_wall_permutations(action, gamma.walls)
    for perm in perms:
        assert mu.is_invariant_under(perm)
    assert weight(mu, gamma, edge_orbit_representatives(gamma, perms)) == 0


def test_class_of_wall_radius_equals_colour():
    path = WallGraph([0, 1, 2], [(0, 1), (1, 2)])
    c = WallColoring(path, 3, {0: 1, 1: 2, 2: 1})
    cls = class_of_wall(c, 0)
    assert cls.support == frozenset({0, 1})  # radius 1 ball
    cls2 = class_of_wall(c, 1)
    assert cls2.support == frozenset({0, 1, 2})  # radius 2 ball

    g3 = k_graph(3)
    c3 = WallColoring(g3, 3, {0: 1, 1: 2, 2: 3})
    assert class_of_wall(c3, 2).support == frozenset({0, 1, 2})

    isolated = WallGraph([0, 1], [])
    ci = WallColoring(isolated, 1, {0: 1, 1: 1})
    assert class_of_wall(ci, 0).support == frozenset({0})


def test_class_coherence_membership_pins_wall_colour():
    g = k_graph(2)
    for c in enumerate_colorings(g, 2):
        cls = class_of_wall(c, 0)
        for c2 in enumerate_colorings(g, 2):
            if cls.contains(c2):
                assert c2.colors[0] == c.colors[0]


def test_class_of_vertex_on_square():
    sq = shapes.square()
    gamma = build_gamma(sq)
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    c = colorings[0]
    cls = class_of_vertex(c, "00")
    # the corner's two dual walls both pin the whole K2
    assert cls.support == frozenset(gamma.nodes)
    # degree-1 vertex: equals the single edge's wall class
    seg = shapes.path_complex(1)
    gseg = build_gamma(seg)
    cseg = enumerate_colorings(gseg, 1)[0]
    clsv = class_of_vertex(cseg, "v0")
    clsw = class_of_wall(cseg, 0)
    assert clsv.pattern == clsw.pattern


def test_vertex_classes_partition_covers_all_colorings():
    sq = shapes.square()
    gamma = build_gamma(sq)
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    parts = vertex_classes_partition(gamma, colorings, "00")
    total = sum(len(members) for _, members in parts)
    assert total == len(colorings)


def test_adjacent_edges_get_distinct_colours():
    for name, cx in shapes.cat0_fixtures().items():
        gamma = build_gamma(cx)
        assert gamma.radius >= 1 or len(cx.edges) <= 1
        ws = gamma.walls
        c = greedy_coloring(gamma)
        for v in cx.vertices:
            walls_here = [ws.wall_of_edge[e.index] for e in cx.edges_at(v)]
            for w1, w2 in itertools.combinations(walls_here, 2):
                if w1 != w2:
                    assert c.colors[w1] != c.colors[w2], (name, v)


def test_class_orbits_trivial_and_rotation():
    sq = shapes.square()
    gamma = build_gamma(sq)
    colorings = enumerate_colorings(gamma, gamma.max_degree + 1)
    assert len(colorings) == 2
    pairs = []
    for v in sq.vertices:
        for c in colorings:
            pairs.append((v, class_of_vertex(c, v)))
    ident = ({v: v for v in sq.vertices}, {n: n for n in gamma.nodes})
    orbits = class_orbits(gamma, [ident], pairs)
    assert all(len(o) == 1 for o in orbits)
    assert len(orbits) == 8

    action = GroupAction(sq, [{"00": "10", "10": "11", "11": "01", "01": "00"}])
    wall_perms = induced_wall_permutations(action, gamma.walls)
    elements = [
        (action.vertex_map(el), perm)
        for el, perm in zip(action.elements, wall_perms)
    ]
    orbits = class_orbits(gamma, elements, pairs)
    assert sorted(len(o) for o in orbits) == [4, 4]


def test_class_orbits_k2_swap():
    g = k_graph(2)
    colorings = enumerate_colorings(g, 2)
    pairs = [(0, class_of_wall(colorings[0], 0)), (1, class_of_wall(apply_to_coloring({0: 1, 1: 0}, colorings[0]), 1))]
    swap = ({0: 1, 1: 0}, {0: 1, 1: 0})
    orbits = class_orbits(g, [swap], pairs)
    assert len(orbits) == 1
