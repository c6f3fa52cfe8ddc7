"""C-specialness: simplicity, wall behaviour at vertices, bipartiteness.

A simple complex is C-special when no two distinct edges at a vertex are
dual to one wall (no self-intersection or self-osculation), every pair of
edges at a vertex with intersecting walls spans a square corner (no
inter-osculation), and the 1-skeleton is bipartite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .complexes import CubeComplex
from .walls import compute_walls


@dataclass
class SpecialnessReport:
    simple: bool
    simple_witness: object
    cond1_violations: list        # (vertex, edge1, edge2, wall id)
    cond2_violations: list        # (vertex, edge1, edge2, wall1, wall2)
    bipartite: bool
    odd_cycle: list

    @property
    def verdict(self):
        return (
            self.simple
            and not self.cond1_violations
            and not self.cond2_violations
            and self.bipartite
        )

    def lines(self):
        out = ["simple: %s" % self.simple]
        if not self.simple:
            out.append("  witness: vertex %r simplex %s" % (self.simple_witness[0], list(self.simple_witness[1])))
        out.append("wall-repetition violations: %d" % len(self.cond1_violations))
        for v, e1, e2, w in self.cond1_violations:
            out.append("  vertex %r: edges %d,%d both dual to wall %d" % (v, e1, e2, w))
        out.append("inter-osculation violations: %d" % len(self.cond2_violations))
        for v, e1, e2, w1, w2 in self.cond2_violations:
            out.append(
                "  vertex %r: edges %d,%d dual to crossing walls %d,%d span no square"
                % (v, e1, e2, w1, w2)
            )
        out.append("bipartite: %s" % self.bipartite)
        if not self.bipartite:
            out.append("  odd cycle: %s" % (self.odd_cycle,))
        out.append("verdict: %s" % self.verdict)
        return out


def square_corners_at(complex, v):
    """Unordered edge-record pairs spanning a square corner at v."""
    corners = set()
    for sq in complex.squares:
        for i in sq.corners_at(v):
            e0verts, _ = sq.edge_at_corner(i, 0)
            e1verts, _ = sq.edge_at_corner(i, 1)
            r0 = complex.resolve(1, e0verts)
            r1 = complex.resolve(1, e1verts)
            corners.add(frozenset((r0, r1)))
    return corners


def bipartition_with_witness(complex):
    """BFS 2-colouring; returns (colouring, None) or (None, odd closed walk)."""
    adj = {v: [] for v in complex.vertices}
    for e in complex.edges:
        a, b = e.verts
        if a == b:
            return None, [a, a]
        adj[a].append(b)
        adj[b].append(a)
    colour = {}
    parent = {}
    for root in complex.vertices:
        if root in colour:
            continue
        colour[root] = 0
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in sorted(adj[u]):
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    parent[w] = u
                    queue.append(w)
                elif colour[w] == colour[u]:
                    left = [u]
                    while parent[left[-1]] is not None:
                        left.append(parent[left[-1]])
                    right = [w]
                    while parent[right[-1]] is not None:
                        right.append(parent[right[-1]])
                    lset = {x: i for i, x in enumerate(left)}
                    meet = next(x for x in right if x in lset)
                    cycle = left[: lset[meet] + 1] + list(reversed(right[: right.index(meet)]))
                    return None, cycle
    return colour, None


def check_c_special(complex, walls=None):
    """Full specialness report with concrete witnesses per failed condition."""
    if walls is None:
        walls = compute_walls(complex)
    simple, simple_witness = complex.is_simple()

    cond1 = []
    cond2 = []
    for v in complex.vertices:
        incident = [e for e in complex.edges if v in e.verts]
        for e in incident:
            if e.verts[0] == e.verts[1]:
                # a loop presents both its ends, dual to one wall, at v
                cond1.append((v, e.index, e.index, walls.wall_of_edge[e.index]))
        corners = square_corners_at(complex, v)
        for i, e1 in enumerate(incident):
            for e2 in incident[i + 1:]:
                w1 = walls.wall_of_edge[e1.index]
                w2 = walls.wall_of_edge[e2.index]
                if w1 == w2:
                    cond1.append((v, e1.index, e2.index, w1))
                    continue
                if walls.intersects(walls[w1], walls[w2]):
                    if frozenset((e1.index, e2.index)) not in corners:
                        cond2.append((v, e1.index, e2.index, w1, w2))

    colouring, odd_cycle = bipartition_with_witness(complex)
    return SpecialnessReport(
        simple=simple,
        simple_witness=simple_witness,
        cond1_violations=cond1,
        cond2_violations=cond2,
        bipartite=colouring is not None,
        odd_cycle=odd_cycle or [],
    )


def wedge(complexes, basepoints, joint="w"):
    """Disjoint union with the basepoints identified to a single vertex."""
    if len(complexes) != len(basepoints):
        raise ValueError("one basepoint per complex")
    for cx, b in zip(complexes, basepoints):
        if not cx.has_vertex(b):
            raise ValueError("basepoint %r not in its complex" % (b,))
    verts = [joint]
    cubes = []
    for n, (cx, b) in enumerate(zip(complexes, basepoints)):
        def rename(v, n=n, b=b):
            return joint if v == b else "%d:%s" % (n, v)

        verts.extend(rename(v) for v in cx.vertices if v != b)
        for c in cx.cubes:
            cubes.append((c.dim, tuple(rename(v) for v in c.verts)))
    return CubeComplex(verts, cubes)


@dataclass
class CellularMap:
    """A combinatorial map of complexes: vertex images plus induced cube images."""

    source: CubeComplex
    target: CubeComplex
    vertex_map: dict
    cube_map: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in self.source.vertices:
            if v not in self.vertex_map:
                raise ValueError("vertex %r has no image" % (v,))
            if not self.target.has_vertex(self.vertex_map[v]):
                raise ValueError("image of %r is not a vertex" % (v,))
        for c in self.source.cubes:
            image = tuple(self.vertex_map[v] for v in c.verts)
            if c.index in self.cube_map:
                t = self.target.cubes[self.cube_map[c.index]]
                from .complexes import canonical_array

                if t.dim != c.dim or canonical_array(t.verts) != canonical_array(image):
                    raise ValueError("cube_map entry for %d is not the array image" % c.index)
            else:
                r = self.target.resolve(c.dim, image)
                if r is None:
                    raise ValueError(
                        "cube %d does not map to a cube (image %s)" % (c.index, list(image))
                    )
                self.cube_map[c.index] = r


def identity_map(complex):
    return CellularMap(complex, complex, {v: v for v in complex.vertices})


def is_covering(cmap):
    """True iff the map is surjective and a local isomorphism on links."""
    src, dst = cmap.source, cmap.target
    if set(cmap.vertex_map.values()) != set(dst.vertices):
        return False
    if set(cmap.cube_map.values()) != {c.index for c in dst.cubes}:
        return False
    for v in src.vertices:
        lk = src.link(v)
        target_lk = dst.link(cmap.vertex_map[v])

        def end_image(end):
            eidx, bit = end
            e = src.cubes[eidx]
            timg = dst.cubes[cmap.cube_map[eidx]]
            w = cmap.vertex_map[e.verts[bit]]
            if timg.verts[0] == timg.verts[1]:
                return (timg.index, bit)
            return (timg.index, timg.verts.index(w))

        image_vertices = [end_image(end) for end in sorted(lk.vertices)]
        if len(set(image_vertices)) != len(image_vertices):
            return False
        if set(image_vertices) != set(target_lk.vertices):
            return False
        image_simplices = sorted(
            tuple(sorted(end_image(end) for end in s)) for s in lk.simplices
        )
        if image_simplices != sorted(target_lk.simplices):
            return False
    return True
