"""Walls (hyperplanes) of a cube complex: duals, carriers, sides, separation.

Edges are partitioned into walls by the transitive closure of "opposite
edges of a square".  A wall records its dual edges, its midcubes (cube,
coordinate) and its carrier.  Wall-to-wall distance is the edge-path
distance between carrier vertex sets, so intersecting walls sit at
distance 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


class NonSeparatingWallError(ValueError):
    """A wall failed to separate: the complex is not simply connected."""


@dataclass(frozen=True)
class Wall:
    id: int
    dual_edges: frozenset          # edge record indices
    midcubes: frozenset            # (cube record index, coordinate) pairs
    carrier_cubes: frozenset      # record indices of cubes meeting the wall
    carrier_vertices: frozenset


@dataclass(frozen=True)
class SidePartition:
    wall: Wall
    classes: tuple                 # one or two frozensets of carrier vertices

    @property
    def two_sided(self):
        return len(self.classes) == 2

    @property
    def plus(self):
        return self.classes[0]

    @property
    def minus(self):
        return self.classes[1]


@dataclass(frozen=True)
class HalfSpacePair:
    wall: Wall
    plus: frozenset
    minus: frozenset

    def side_of(self, v):
        if v in self.plus:
            return "+"
        if v in self.minus:
            return "-"
        raise KeyError(v)

    def separates(self, x, y):
        return self.side_of(x) != self.side_of(y)


class WallSystem:
    """All walls of a complex, with the derived distance and side structure."""

    def __init__(self, complex):
        self.complex = complex
        self.walls = _compute_walls(complex)
        self.wall_of_edge = {}
        for w in self.walls:
            for e in w.dual_edges:
                self.wall_of_edge[e] = w.id
        self._halves = {}
        self._sides = {}
        self._dist = {}

    def __iter__(self):
        return iter(self.walls)

    def __len__(self):
        return len(self.walls)

    def __getitem__(self, wall_id):
        return self.walls[wall_id]

    def wall_of(self, edge_index):
        return self.walls[self.wall_of_edge[edge_index]]

    def crossing_walls(self, cube):
        """Walls with a midcube in the given cube record."""
        ids = set()
        for j in range(cube.dim):
            if cube.dim == 1:
                ridx = cube.index
            else:
                everts, _ = cube.edge_at_corner(0, j)
                ridx = self.complex.resolve(1, everts)
            ids.add(self.wall_of_edge[ridx])
        return sorted(ids)

    def intersects(self, w1, w2):
        """Walls intersect iff some cube carries midcubes of both."""
        if w1.id == w2.id:
            return True
        cubes1 = {c for c, _ in w1.midcubes}
        return any(c in cubes1 for c, _ in w2.midcubes)

    def distance(self, w1, w2):
        """Edge-path distance between carrier vertex sets (0 when intersecting)."""
        key = (min(w1.id, w2.id), max(w1.id, w2.id))
        if key not in self._dist:
            if w1.carrier_vertices & w2.carrier_vertices:
                self._dist[key] = 0
            else:
                adj = self.complex.adjacency()
                dist = {v: 0 for v in w1.carrier_vertices}
                queue = deque(sorted(dist))
                best = None
                while queue:
                    u = queue.popleft()
                    if u in w2.carrier_vertices:
                        best = dist[u]
                        break
                    for x in adj[u]:
                        if x not in dist:
                            dist[x] = dist[u] + 1
                            queue.append(x)
                self._dist[key] = best if best is not None else float("inf")
        return self._dist[key]

    # -- sides --------------------------------------------------------------

    def side_partition(self, wall):
        """The one or two carrier-vertex classes reachable without crossing the wall."""
        if wall.id not in self._sides:
            cx = self.complex
            carrier_edge_records = set()
            for cidx in wall.carrier_cubes:
                cube = cx.cubes[cidx]
                if cube.dim == 1:
                    carrier_edge_records.add(cube.index)
                    continue
                for j in range(cube.dim):
                    for i in range(1 << cube.dim):
                        everts, _ = cube.edge_at_corner(i, j)
                        r = cx.resolve(1, everts)
                        if r is not None:
                            carrier_edge_records.add(r)
            parent = {v: v for v in wall.carrier_vertices}

            def find(v):
                while parent[v] != v:
                    parent[v] = parent[parent[v]]
                    v = parent[v]
                return v

            for r in carrier_edge_records:
                if r in wall.dual_edges:
                    continue
                a, b = cx.cubes[r].verts
                if a in parent and b in parent:
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
            classes = {}
            for v in wall.carrier_vertices:
                classes.setdefault(find(v), set()).add(v)
            parts = sorted((frozenset(s) for s in classes.values()), key=sorted)
            self._sides[wall.id] = SidePartition(wall, tuple(parts))
        return self._sides[wall.id]

    def half_spaces(self, wall):
        """Global vertex bipartition whose only crossing edges are the duals.

        Raises NonSeparatingWallError when some non-dual path joins the two
        sides, which certifies that the complex was not simply connected.
        """
        if wall.id not in self._halves:
            cx = self.complex
            start = None
            for e in sorted(wall.dual_edges):
                a, b = cx.cubes[e].verts
                start = (a, b)
                break
            plus = self._flood(start[0], wall)
            minus = self._flood(start[1], wall)
            if start[0] in minus or start[1] in plus or (plus & minus):
                raise NonSeparatingWallError(
                    "wall %d does not separate; a non-dual path joins its sides"
                    % wall.id
                )
            rest = set(cx.vertices) - plus - minus
            if rest:
                # components not adjacent to the wall at all; attach by reachability
                raise NonSeparatingWallError(
                    "wall %d leaves vertices unreached; complex disconnected?" % wall.id
                )
            for e in wall.dual_edges:
                a, b = cx.cubes[e].verts
                if not ((a in plus and b in minus) or (a in minus and b in plus)):
                    raise NonSeparatingWallError(
                        "dual edge %d of wall %d does not cross the bipartition"
                        % (e, wall.id)
                    )
            part = self.side_partition(wall)
            if part.two_sided and part.classes[0] <= minus:
                plus, minus = minus, plus
            self._halves[wall.id] = HalfSpacePair(wall, frozenset(plus), frozenset(minus))
        return self._halves[wall.id]

    def _flood(self, start, wall):
        cx = self.complex
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for e in cx.edges:
                if e.index in wall.dual_edges:
                    continue
                a, b = e.verts
                other = None
                if a == u:
                    other = b
                elif b == u:
                    other = a
                if other is not None and other not in seen:
                    seen.add(other)
                    queue.append(other)
        return seen

    def relabel_sides(self, wall_id, plus, minus):
        """Install an externally chosen +/- labelling (orbit-equivariant labelling)."""
        wall = self.walls[wall_id]
        current = self.half_spaces(wall)
        if frozenset(plus) == current.plus:
            return
        if frozenset(plus) != current.minus:
            raise ValueError("labelling does not match the computed bipartition")
        self._halves[wall_id] = HalfSpacePair(wall, frozenset(plus), frozenset(minus))

    # -- separation and geodesics --------------------------------------------

    def separating_walls(self, x, y):
        """Walls whose half-space pair puts x and y on opposite sides."""
        out = []
        for w in self.walls:
            if self.half_spaces(w).separates(x, y):
                out.append(w)
        return out

    def check_geodesic(self, path, start=None):
        """Decide whether an edge path is a shortest path between its endpoints.

        `path` is a sequence of edge record indices; `start` disambiguates the
        initial vertex when the first edge's orientation matters.
        Returns (flag, report dict).
        """
        cx = self.complex
        if not path:
            return True, {"length": 0, "crossings": {}}
        first = cx.cubes[path[0]]
        if start is None:
            start = first.verts[0]
        if start not in first.verts:
            raise ValueError("start vertex not on the first edge")
        at = start
        crossings = {}
        for eidx in path:
            e = cx.cubes[eidx]
            a, b = e.verts
            if at == a:
                at = b
            elif at == b:
                at = a
            else:
                raise ValueError("path is not connected at edge %d" % eidx)
            wid = self.wall_of_edge[eidx]
            crossings[wid] = crossings.get(wid, 0) + 1
        end = at
        separating = {w.id for w in self.separating_walls(start, end)}
        ok = (
            len(path) == len(separating)
            and set(crossings) == separating
            and all(n == 1 for n in crossings.values())
        )
        report = {
            "length": len(path),
            "endpoints": (start, end),
            "crossings": crossings,
            "separating": sorted(separating),
            "repeated": sorted(w for w, n in crossings.items() if n > 1),
            "non_separating_crossed": sorted(set(crossings) - separating),
        }
        return ok, report

    def check_helly(self, walls):
        """Find a cube carrying a midcube of every wall in the family.

        Preconditions: the walls intersect pairwise (error otherwise).
        Returns (True, cube record index) or (False, None).
        """
        walls = list(walls)
        for i, w1 in enumerate(walls):
            for w2 in walls[i + 1:]:
                if not self.intersects(w1, w2):
                    raise ValueError(
                        "walls %d and %d do not intersect" % (w1.id, w2.id)
                    )
        want = {w.id for w in walls}
        for cube in self.complex.cubes:
            if cube.dim < len(want):
                continue
            if want <= set(self.crossing_walls(cube)):
                return True, cube.index
        return False, None


def _compute_walls(complex):
    edges = complex.edges
    if not edges:
        return []
    parent = {e.index: e.index for e in edges}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for sq in complex.squares:
        for j in (0, 1):
            a = complex.resolve(1, sq.face_verts(1 - j, 0))
            b = complex.resolve(1, sq.face_verts(1 - j, 1))
            if a is None or b is None:
                raise ValueError(
                    "square %d lacks resolved edge faces; close the complex first"
                    % sq.index
                )
            union(a, b)

    groups = {}
    for e in edges:
        groups.setdefault(find(e.index), set()).add(e.index)

    # midcube (cube, j) belongs to the wall of the cube's direction-j edges
    direction_wall = {}
    for cube in complex.cubes:
        for j in range(cube.dim):
            if cube.dim == 1:
                ridx = cube.index
            else:
                everts, _ = cube.edge_at_corner(0, j)
                ridx = complex.resolve(1, everts)
            direction_wall[(cube.index, j)] = find(ridx)

    walls = []
    order = sorted(groups.items(), key=lambda kv: min(kv[1]))
    for wid, (root, dual) in enumerate(order):
        midcubes = {mc for mc, r in direction_wall.items() if r == root}
        carrier_cubes = {c for c, _ in midcubes}
        carrier_vertices = set()
        for cidx in carrier_cubes:
            carrier_vertices.update(complex.cubes[cidx].verts)
        walls.append(
            Wall(
                id=wid,
                dual_edges=frozenset(dual),
                midcubes=frozenset(midcubes),
                carrier_cubes=frozenset(carrier_cubes),
                carrier_vertices=frozenset(carrier_vertices),
            )
        )
    return walls


def compute_walls(complex):
    """The walls of a complex, as a WallSystem (iterable of Wall)."""
    return WallSystem(complex)
