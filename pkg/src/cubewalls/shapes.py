"""Constructors for the small complexes used throughout the test corpus."""

from __future__ import annotations

import itertools

from .complexes import CubeComplex


def segment():
    return CubeComplex(["a", "b"], [(1, ("a", "b"))])


def path_complex(k):
    """A path of k edges on vertices v0..vk."""
    verts = ["v%d" % i for i in range(k + 1)]
    return CubeComplex(verts, [(1, ("v%d" % i, "v%d" % (i + 1))) for i in range(k)])


def cycle_complex(k):
    """A k-cycle (1-complex)."""
    verts = ["v%d" % i for i in range(k)]
    return CubeComplex(verts, [(1, ("v%d" % i, "v%d" % ((i + 1) % k))) for i in range(k)])


def star(n):
    """A star with n edges around a central vertex ('tripod' is star(3))."""
    verts = ["c"] + ["t%d" % i for i in range(n)]
    return CubeComplex(verts, [(1, ("c", "t%d" % i)) for i in range(n)])


def tripod():
    return star(3)


def spider():
    """A tripod with one leg lengthened to two edges."""
    verts = ["c", "a1", "a2", "b", "b2"]
    cubes = [(1, ("c", "a1")), (1, ("a1", "a2")), (1, ("c", "b")), (1, ("c", "b2"))]
    return CubeComplex(verts, cubes)


def cube(d):
    """A single solid d-cube with its full face lattice."""
    verts = ["".join(map(str, bits)) for bits in itertools.product((0, 1), repeat=d)]

    def name(i):
        return "".join(str((i >> j) & 1) for j in range(d))

    top = (d, tuple(name(i) for i in range(1 << d)))
    return CubeComplex(verts, [top]).auto_close()


def square():
    return cube(2)


def grid(m, n):
    """An m x n grid of squares."""
    verts = ["%d,%d" % (i, j) for j in range(n + 1) for i in range(m + 1)]
    cubes = []
    for i in range(m + 1):
        for j in range(n + 1):
            if i < m:
                cubes.append((1, ("%d,%d" % (i, j), "%d,%d" % (i + 1, j))))
            if j < n:
                cubes.append((1, ("%d,%d" % (i, j), "%d,%d" % (i, j + 1))))
    for i in range(m):
        for j in range(n):
            cubes.append(
                (2, ("%d,%d" % (i, j), "%d,%d" % (i + 1, j), "%d,%d" % (i, j + 1), "%d,%d" % (i + 1, j + 1)))
            )
    return CubeComplex(verts, cubes)


def product(x, y, sep="*"):
    """Cube-complex product: cells are pairs of cells, dims add."""
    def pv(a, b):
        return "%s%s%s" % (a, sep, b)

    verts = [pv(a, b) for a in x.vertices for b in y.vertices]
    cubes = []
    # vertex x cube and cube x vertex and cube x cube
    for b in y.vertices:
        for c in x.cubes:
            cubes.append((c.dim, tuple(pv(v, b) for v in c.verts)))
    for a in x.vertices:
        for c in y.cubes:
            cubes.append((c.dim, tuple(pv(a, v) for v in c.verts)))
    for cx in x.cubes:
        for cy in y.cubes:
            d = cx.dim + cy.dim
            arr = []
            for i in range(1 << d):
                ix = i & ((1 << cx.dim) - 1)
                iy = i >> cx.dim
                arr.append(pv(cx.verts[ix], cy.verts[iy]))
            cubes.append((d, tuple(arr)))
    return CubeComplex(verts, cubes)


def tripod_segment():
    return product(tripod(), segment())


def torus_one_vertex():
    """One vertex, two loop edges, one square: the classic non-simple fixture."""
    return CubeComplex(["v"], [(1, ("v", "v")), (1, ("v", "v")), (2, ("v", "v", "v", "v"))])


def mobius_square():
    """A Moebius band: a strip of two squares whose ends are glued with a flip.

    The wall running along the core circle is one-sided; the 1-skeleton
    contains odd cycles.
    """
    cubes = [
        (2, ("a", "c", "b", "d")),
        (2, ("c", "b", "d", "a")),
    ]
    return CubeComplex(["a", "b", "c", "d"], cubes).auto_close()


def rose(n):
    """Wedge of n loop edges at a single vertex."""
    return CubeComplex(["v"], [(1, ("v", "v")) for _ in range(n)])


def inter_osculation():
    """Three squares arranged so two crossing walls also osculate at a vertex.

    The walls dual to {ab, cd, ey} and {ac, bd, b'y} cross inside the middle
    square and meet again at y with no square corner there.
    """
    verts = ["a", "b", "c", "d", "e", "y", "b'"]
    cubes = [
        (2, ("a", "b", "c", "d")),
        (2, ("c", "d", "e", "y")),
        (2, ("b", "b'", "d", "y")),
    ]
    return CubeComplex(verts, cubes).auto_close()


def rotation_grid():
    """The 2x2 grid together with its order-4 rotation (as a generator map)."""
    g = grid(2, 2)
    rot = {}
    for i in range(3):
        for j in range(3):
            rot["%d,%d" % (i, j)] = "%d,%d" % (j, 2 - i)
    return g, rot


def cat0_fixtures():
    """Simply connected NPC fixtures used across the property tests."""
    return {
        "segment": segment(),
        "square": square(),
        "cube3": cube(3),
        "path4": path_complex(4),
        "tripod": tripod(),
        "tripod_segment": tripod_segment(),
        "grid22": grid(2, 2),
        "spider": spider(),
        "tripod_tripod": product(tripod(), tripod()),
    }


def pathology_fixtures():
    return {
        "torus1v": torus_one_vertex(),
        "mobius": mobius_square(),
        "interosc": inter_osculation(),
    }
