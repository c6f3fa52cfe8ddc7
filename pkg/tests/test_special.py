import pytest

from cubewalls import shapes
from cubewalls.special import (
    CellularMap,
    check_c_special,
    identity_map,
    is_covering,
    wedge,
)
from cubewalls.walls import compute_walls


def test_single_cubes_are_c_special():
    for n in (1, 2, 3, 4):
        report = check_c_special(shapes.cube(n))
        assert report.verdict, n


def test_path_of_3_edges_is_c_special():
    assert check_c_special(shapes.path_complex(3)).verdict


def test_cat0_fixtures_are_c_special():
    for name, cx in shapes.cat0_fixtures().items():
        assert check_c_special(cx).verdict, name


def test_torus_fails_simplicity_and_wall_repetition():
    report = check_c_special(shapes.torus_one_vertex())
    assert not report.verdict
    assert not report.simple
    # both loop edges repeat their wall at the single vertex
    assert len(report.cond1_violations) >= 2
    walls_cited = {w for (_, _, _, w) in report.cond1_violations}
    assert len(walls_cited) == 2
    assert not report.bipartite


def test_mobius_band_fails_bipartiteness_only():
    report = check_c_special(shapes.mobius_square())
    assert not report.verdict
    assert report.simple
    assert not report.cond1_violations
    assert not report.cond2_violations
    assert not report.bipartite
    assert len(report.odd_cycle) % 2 == 1


def test_interosculation_witnesses_are_sound():
    cx = shapes.inter_osculation()
    report = check_c_special(cx)
    assert not report.verdict
    assert report.simple
    assert not report.cond1_violations
    assert report.bipartite
    assert report.cond2_violations
    ws = compute_walls(cx)
    for v, e1, e2, w1, w2 in report.cond2_violations:
        # the walls genuinely intersect ...
        assert ws.intersects(ws[w1], ws[w2])
        # ... and genuinely span no square corner at the vertex
        for sq in cx.squares:
            for i in sq.corners_at(v):
                r1 = cx.resolve(1, sq.edge_at_corner(i, 0)[0])
                r2 = cx.resolve(1, sq.edge_at_corner(i, 1)[0])
                assert {r1, r2} != {e1, e2}


def test_wedge_of_two_segments():
    w = wedge([shapes.segment(), shapes.segment()], ["b", "a"])
    assert len(w.vertices) == 3
    assert len(w.edges) == 2


def test_wedge_of_two_squares():
    w = wedge([shapes.square(), shapes.square()], ["00", "11"])
    assert len(w.vertices) == 7
    assert len(w.edges) == 8
    assert len(w.squares) == 2


def test_wedge_cube_and_segment():
    w = wedge([shapes.cube(3), shapes.segment()], ["000", "a"])
    assert len(w.vertices) == 9


def test_wedge_requires_valid_basepoint():
    with pytest.raises(ValueError):
        wedge([shapes.square()], ["nope"])


def test_wedge_preserves_c_specialness():
    w = wedge(
        [shapes.square(), shapes.path_complex(2), shapes.cube(3)],
        ["00", "v0", "000"],
    )
    assert check_c_special(w).verdict


def test_identity_is_covering():
    assert is_covering(identity_map(shapes.square()))


def test_double_wrap_of_4_cycle_is_covering():
    c8 = shapes.cycle_complex(8)
    c4 = shapes.cycle_complex(4)
    vmap = {"v%d" % i: "v%d" % (i % 4) for i in range(8)}
    assert is_covering(CellularMap(c8, c4, vmap))


def test_constant_map_is_not_covering():
    sq = shapes.square()
    dot = shapes.segment()  # map everything onto one edge: not a local iso
    vmap = {v: "a" if v in ("00", "11") else "b" for v in sq.vertices}
    with pytest.raises(ValueError):
        # the square has no image cube: not even cellular
        CellularMap(sq, dot, vmap)


def test_non_surjective_map_is_not_covering():
    seg = shapes.segment()
    path = shapes.path_complex(2)
    vmap = {"a": "v0", "b": "v1"}
    assert not is_covering(CellularMap(seg, path, vmap))


def test_coverings_preserve_c_specialness_on_fixture_pairs():
    # closure under covers, on an even cycle pair (C-special base)
    c12 = shapes.cycle_complex(12)
    c6 = shapes.cycle_complex(6)
    vmap = {"v%d" % i: "v%d" % (i % 6) for i in range(12)}
    cmap = CellularMap(c12, c6, vmap)
    assert is_covering(cmap)
    assert check_c_special(c6).verdict
    assert check_c_special(c12).verdict
