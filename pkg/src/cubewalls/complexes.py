"""Finite cube complexes given by coordinate-indexed vertex arrays.

A d-cube is stored as an array of 2^d vertex names indexed by binary
coordinate tuples, least significant bit = coordinate 0.  Cubes are
identified up to hypercube symmetry by a canonical (lexicographically
minimal) relabelling of the array.  Several records may share the same
canonical array: parallel cells (multi-edges, loops) are legal data and
are what the pathology checkers feed on.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache


class StructuralError(ValueError):
    """The data cannot be interpreted as a cube complex."""


class AutoCloseError(StructuralError):
    """Derived face data contradicts an existing cube."""


@lru_cache(maxsize=None)
def hypercube_symmetries(d):
    """Index maps phi of the symmetry group of {0,1}^d: new[i] = old[phi[i]]."""
    maps = []
    for perm in itertools.permutations(range(d)):
        for flips in range(1 << d):
            phi = []
            for i in range(1 << d):
                m = 0
                for j in range(d):
                    bit = ((i >> perm[j]) & 1) ^ ((flips >> j) & 1)
                    m |= bit << j
                phi.append(m)
            maps.append(tuple(phi))
    return tuple(sorted(set(maps)))


def canonical_array(verts):
    """Lexicographically minimal relabelling of a cube's vertex array."""
    d = (len(verts) - 1).bit_length()
    best = None
    for phi in hypercube_symmetries(d):
        cand = tuple(verts[phi[i]] for i in range(len(verts)))
        if best is None or cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class Cube:
    dim: int
    verts: tuple
    index: int

    def face_verts(self, j, side):
        """Vertex array of the face fixing coordinate j to side."""
        d = self.dim
        out = []
        for f in range(1 << (d - 1)):
            low = f & ((1 << j) - 1)
            high = f >> j
            i = low | (side << j) | (high << (j + 1))
            out.append(self.verts[i])
        return tuple(out)

    def corners_at(self, v):
        return [i for i, u in enumerate(self.verts) if u == v]

    def edge_at_corner(self, i, j):
        """The 1-face through corner i in direction j: ((v0, v1), end of corner i)."""
        a = self.verts[i & ~(1 << j)]
        b = self.verts[i | (1 << j)]
        return (a, b), (i >> j) & 1


@dataclass(frozen=True)
class VertexLink:
    """Link of a vertex: one k-simplex per (k+1)-cube corner at the base.

    Link vertices are edge-ends (edge record index, end bit); a loop at the
    base contributes both of its ends.  Simplices are stored as sorted
    tuples, so repeats inside a simplex (degenerate corner) survive.
    """

    base: str
    vertices: frozenset
    simplices: tuple


class ValidationReport:
    def __init__(self):
        self.problems = []

    def add(self, kind, detail):
        self.problems.append((kind, detail))

    @property
    def ok(self):
        return not self.problems

    def kinds(self):
        return sorted({k for k, _ in self.problems})

    def lines(self):
        return ["%s: %s" % (kind, detail) for kind, detail in self.problems]

    def __repr__(self):
        return "ValidationReport(ok=%s, problems=%d)" % (self.ok, len(self.problems))


class CubeComplex:
    """An immutable finite cube complex.

    `vertices` is an ordered sequence of names; `cubes` an ordered sequence
    of (dim, verts) pairs.  Dimension-0 cells are implicit (the vertices).
    """

    def __init__(self, vertices, cubes):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise StructuralError("repeated vertex name in vertex list")
        self._vset = frozenset(self.vertices)
        records = []
        for idx, cube in enumerate(cubes):
            if isinstance(cube, Cube):
                dim, verts = cube.dim, cube.verts
            else:
                dim, verts = cube
            verts = tuple(verts)
            if dim < 1:
                raise StructuralError("cube %d: dimension must be >= 1" % idx)
            if len(verts) != (1 << dim):
                raise StructuralError(
                    "cube %d: vertex array has length %d, expected 2^%d"
                    % (idx, len(verts), dim)
                )
            records.append(Cube(dim, verts, idx))
        self.cubes = tuple(records)
        self._by_key = {}
        for c in self.cubes:
            self._by_key.setdefault((c.dim, canonical_array(c.verts)), []).append(c.index)
        self._adj = None

    # -- basic queries ---------------------------------------------------

    @property
    def dimension(self):
        return max((c.dim for c in self.cubes), default=0)

    def cubes_of_dim(self, d):
        return [c for c in self.cubes if c.dim == d]

    @property
    def edges(self):
        return self.cubes_of_dim(1)

    @property
    def squares(self):
        return self.cubes_of_dim(2)

    def has_vertex(self, v):
        return v in self._vset

    def resolve(self, dim, verts):
        """Lowest-index cube record matching (dim, verts) up to symmetry."""
        hits = self._by_key.get((dim, canonical_array(tuple(verts))))
        return None if not hits else hits[0]

    def resolution_unique(self):
        """True when no two records share a canonical array (no parallel cells)."""
        return all(len(v) == 1 for v in self._by_key.values())

    def face_record(self, cube, j, side):
        """Resolve the face of `cube` fixing coordinate j to side; None if absent."""
        if cube.dim == 1:
            raise ValueError("faces of edges are vertices")
        return self.resolve(cube.dim - 1, cube.face_verts(j, side))

    # -- 1-skeleton ------------------------------------------------------

    def adjacency(self):
        """1-skeleton adjacency: vertex -> sorted tuple of neighbours."""
        if self._adj is None:
            nbrs = {v: set() for v in self.vertices}
            for e in self.edges:
                a, b = e.verts
                if a in nbrs and b in nbrs:
                    nbrs[a].add(b)
                    nbrs[b].add(a)
            self._adj = {v: tuple(sorted(s)) for v, s in nbrs.items()}
        return self._adj

    def edges_at(self, v):
        """Edge records with an endpoint at v (a loop appears once)."""
        return [e for e in self.edges if v in e.verts]

    def edge_ends_at(self, v):
        """Edge-ends (record index, end bit) incident at v; loops give both ends."""
        ends = []
        for e in self.edges:
            for end in (0, 1):
                if e.verts[end] == v:
                    ends.append((e.index, end))
        return ends

    def bfs_distances(self, start):
        adj = self.adjacency()
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def skeleton_diameter(self):
        best = 0
        for v in self.vertices:
            dist = self.bfs_distances(v)
            if len(dist) != len(self.vertices):
                raise StructuralError("complex is not connected")
            best = max(best, max(dist.values(), default=0))
        return best

    def is_connected(self):
        if not self.vertices:
            return True
        return len(self.bfs_distances(self.vertices[0])) == len(self.vertices)

    # -- validation and closure -------------------------------------------

    def validate(self):
        """Report face-closure violations, duplicates, dangling references."""
        report = ValidationReport()
        for c in self.cubes:
            for v in c.verts:
                if v not in self._vset:
                    report.add("unknown_vertex", "cube %d references %r" % (c.index, v))
        for key, hits in sorted(self._by_key.items(), key=lambda kv: kv[1]):
            if len(hits) > 1:
                report.add(
                    "duplicate_cube",
                    "cubes %s share dim %d and vertex array %s"
                    % (hits, key[0], list(key[1])),
                )
        for c in self.cubes:
            if c.dim == 1:
                continue
            for j in range(c.dim):
                for side in (0, 1):
                    verts = c.face_verts(j, side)
                    if self.resolve(c.dim - 1, verts) is None:
                        report.add(
                            "missing_face",
                            "cube %d lacks face (coordinate %d = %d): %s"
                            % (c.index, j, side, list(verts)),
                        )
        used = set()
        for c in self.cubes:
            used.update(c.verts)
        if self.cubes:
            for v in self.vertices:
                if v not in used:
                    report.add("isolated_vertex", "vertex %r lies in no cube" % (v,))
        return report

    def well_formed(self):
        """No dangling references and face-closed; parallel cells still allowed."""
        bad = {"unknown_vertex", "missing_face"}
        return not any(k in bad for k in self.validate().kinds())

    def auto_close(self):
        """Add all derived faces; idempotent on closed complexes."""
        for c in self.cubes:
            for v in c.verts:
                if v not in self._vset:
                    raise StructuralError(
                        "cube %d references unknown vertex %r" % (c.index, v)
                    )
        records = [(c.dim, c.verts) for c in self.cubes]
        seen = {}
        vsets = {}
        for dim, verts in records:
            key = (dim, canonical_array(verts))
            seen.setdefault(key, True)
            vsets.setdefault((dim, frozenset(verts)), set()).add(key[1])
        queue = list(records)
        while queue:
            dim, verts = queue.pop()
            if dim == 1:
                continue
            cube = Cube(dim, verts, -1)
            for j in range(dim):
                for side in (0, 1):
                    fverts = cube.face_verts(j, side)
                    key = (dim - 1, canonical_array(fverts))
                    if key in seen:
                        continue
                    vkey = (dim - 1, frozenset(fverts))
                    if vsets.get(vkey):
                        raise AutoCloseError(
                            "derived dim-%d face %s conflicts with existing cube on "
                            "the same vertices" % (dim - 1, list(fverts))
                        )
                    seen[key] = True
                    vsets.setdefault(vkey, set()).add(key[1])
                    records.append((dim - 1, fverts))
                    queue.append((dim - 1, fverts))
        original = [(c.dim, c.verts) for c in self.cubes]
        derived = sorted(set(records) - set(original), key=lambda r: (-r[0], r[1]))
        return CubeComplex(self.vertices, original + derived)

    # -- links, simplicity, curvature -------------------------------------

    def link(self, v):
        """One k-simplex per (k+1)-cube corner at v, on edge-end vertices."""
        if v not in self._vset:
            raise StructuralError("unknown vertex %r" % (v,))
        simplices = []
        verts = set()
        for c in self.cubes:
            for i in c.corners_at(v):
                ends = []
                for j in range(c.dim):
                    everts, end = c.edge_at_corner(i, j)
                    # an edge is its own corner cell; resolution would conflate
                    # parallel edges
                    ridx = c.index if c.dim == 1 else self.resolve(1, everts)
                    if ridx is None:
                        raise StructuralError(
                            "cube %d: edge face %s missing (complex not closed)"
                            % (c.index, list(everts))
                        )
                    rec = self.cubes[ridx]
                    if rec.verts == everts:
                        rend = end
                    elif rec.verts == (everts[1], everts[0]):
                        rend = 1 - end
                    else:
                        rend = end
                    ends.append((ridx, rend))
                simplex = tuple(sorted(ends))
                simplices.append(simplex)
                verts.update(ends)
        simplices.sort()
        return VertexLink(v, frozenset(verts), tuple(simplices))

    def is_simple(self):
        """True iff every vertex link is a simplicial complex.

        Returns (flag, witness); the witness names the vertex and the
        repeated or degenerate simplex.
        """
        for v in self.vertices:
            lk = self.link(v)
            seen = {}
            for s in lk.simplices:
                if len(set(s)) != len(s):
                    return False, (v, s, s)
                if s in seen:
                    return False, (v, s, s)
                seen[s] = True
        return True, None

    def is_npc(self):
        """Flag condition: every clique in every link spans a simplex.

        Returns (flag, witness); witness = (vertex, empty clique) on failure.
        """
        for v in self.vertices:
            lk = self.link(v)
            adj = {}
            for s in lk.simplices:
                if len(s) == 2 and s[0] != s[1]:
                    a, b = s
                    adj.setdefault(a, set()).add(b)
                    adj.setdefault(b, set()).add(a)
            simplex_sets = {frozenset(s) for s in lk.simplices}
            nodes = sorted(lk.vertices)
            missing = self._find_unspanned_clique(nodes, adj, simplex_sets)
            if missing is not None:
                return False, (v, missing)
        return True, None

    @staticmethod
    def _find_unspanned_clique(nodes, adj, simplex_sets):
        def extend(clique, candidates):
            if len(clique) >= 3 and frozenset(clique) not in simplex_sets:
                return tuple(clique)
            for idx, u in enumerate(candidates):
                out = extend(clique + [u], [w for w in candidates[idx + 1:] if w in adj.get(u, ())])
                if out is not None:
                    return out
            return None

        return extend([], nodes)

    # -- cubical subdivision ----------------------------------------------

    def subdivide(self):
        """Cubical subdivision: each d-cube splits into 2^d cubes at its barycenter.

        Requires unambiguous face resolution (no parallel cells); new vertex
        names are 'v[name]' for old vertices and 'c[i]' for the barycenter of
        cube record i.
        """
        if not self.resolution_unique():
            raise StructuralError("subdivision needs unambiguous faces (no parallel cells)")
        for c in self.cubes:
            if len(set(c.verts)) != len(c.verts):
                raise StructuralError("subdivision not defined with loop cells")
        report = self.validate()
        if any(k in ("unknown_vertex", "missing_face") for k in report.kinds()):
            raise StructuralError("subdivision needs a well-formed complex: %s" % report.lines())

        def bary(dim, verts):
            if dim == 0:
                return "v[%s]" % verts[0]
            ridx = self.resolve(dim, verts)
            return "c[%d]" % ridx

        new_vertices = ["v[%s]" % v for v in self.vertices]
        new_vertices += ["c[%d]" % c.index for c in self.cubes]
        new_cubes = []
        for c in self.cubes:
            d = c.dim
            for corner in range(1 << d):
                arr = []
                for mask in range(1 << d):
                    # face of c through `corner` varying exactly the directions in mask
                    fdim = bin(mask).count("1")
                    fverts = []
                    for fi in range(1 << fdim):
                        i = corner
                        bit = 0
                        for j in range(d):
                            if (mask >> j) & 1:
                                if (fi >> bit) & 1:
                                    i |= 1 << j
                                else:
                                    i &= ~(1 << j)
                                bit += 1
                        fverts.append(c.verts[i])
                    if fdim == 0:
                        arr.append(bary(0, (fverts[0],)))
                    else:
                        arr.append(bary(fdim, tuple(fverts)))
                new_cubes.append((d, tuple(arr)))
        seen = set()
        unique = []
        for dim, verts in new_cubes:
            key = (dim, canonical_array(verts))
            if key in seen:
                continue
            seen.add(key)
            unique.append((dim, verts))
        unique.sort(key=lambda r: (-r[0],))
        return CubeComplex(new_vertices, unique).auto_close()

    # -- comparisons -------------------------------------------------------

    def cell_census(self):
        """Multiset of canonical cube keys per dimension, plus the vertex set."""
        census = {}
        for c in self.cubes:
            key = (c.dim, canonical_array(c.verts))
            census[key] = census.get(key, 0) + 1
        return frozenset(self._vset), tuple(sorted(census.items()))

    def same_complex(self, other):
        """Equality as complexes over identical vertex names."""
        return self.cell_census() == other.cell_census()

    def __repr__(self):
        per_dim = {}
        for c in self.cubes:
            per_dim[c.dim] = per_dim.get(c.dim, 0) + 1
        shape = ", ".join("%d:%d" % (d, n) for d, n in sorted(per_dim.items()))
        return "CubeComplex(%d vertices; cells %s)" % (len(self.vertices), shape or "none")


class GroupActionError(ValueError):
    pass


class GroupAction:
    """A finite group of cubical automorphisms, generated by vertex permutations."""

    def __init__(self, complex, generators, max_elements=100_000):
        self.complex = complex
        self.generators = [dict(g) for g in generators]
        base = tuple(complex.vertices)
        for k, g in enumerate(self.generators):
            if sorted(g) != sorted(base) or sorted(g.values()) != sorted(base):
                raise GroupActionError("generator %d is not a vertex permutation" % k)
            self._check_cubical(g, k)
        ident = base
        elements = {ident}
        frontier = [ident]
        gen_tuples = [tuple(g[v] for v in base) for g in self.generators]
        index = {v: i for i, v in enumerate(base)}
        while frontier:
            nxt = []
            for el in frontier:
                for gt in gen_tuples:
                    comp = tuple(gt[index[v]] for v in el)
                    if comp not in elements:
                        elements.add(comp)
                        nxt.append(comp)
                        if len(elements) > max_elements:
                            raise GroupActionError(
                                "group closure exceeded %d elements" % max_elements
                            )
            frontier = nxt
        self.base = base
        self.elements = sorted(elements)

    def _check_cubical(self, g, k):
        cx = self.complex
        for c in cx.cubes:
            image = tuple(g[v] for v in c.verts)
            if cx.resolve(c.dim, image) is None:
                raise GroupActionError(
                    "generator %d does not map cube %d to a cube" % (k, c.index)
                )

    def __len__(self):
        return len(self.elements)

    def is_trivial(self):
        return len(self.elements) == 1

    def vertex_map(self, element):
        return dict(zip(self.base, element))

    def apply_vertex(self, element, v):
        return element[self.base.index(v)]

    def cube_map(self, element):
        """Record permutation induced by a group element.

        Needs unambiguous resolution; raises otherwise.
        """
        if not self.complex.resolution_unique():
            raise GroupActionError("cube permutation needs unambiguous face resolution")
        vmap = self.vertex_map(element)
        out = {}
        for c in self.complex.cubes:
            image = tuple(vmap[v] for v in c.verts)
            out[c.index] = self.complex.resolve(c.dim, image)
        return out

    def vertex_orbits(self):
        seen = set()
        orbits = []
        for v in self.complex.vertices:
            if v in seen:
                continue
            orbit = sorted({self.apply_vertex(el, v) for el in self.elements})
            seen.update(orbit)
            orbits.append(tuple(orbit))
        return orbits

    def vertex_stabilizer_order(self, v):
        return sum(1 for el in self.elements if self.apply_vertex(el, v) == v)


def trivial_action(complex):
    return GroupAction(complex, [])
