"""The wall graph, proper colourings, colour reduction and invariant measures.

The wall graph joins two walls when their edge-path distance is at most R.
Colourings use palette [n] = {1..n}; a colouring is proper when adjacent
walls receive distinct colours.  With degrees bounded by k the palette
[k+1] always admits proper colourings, and the reduction map recolours
every vertex coloured n to the smallest colour unused by its neighbours.
All measures are exact rational distributions on finite colouring spaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .walls import compute_walls


class WallGraph:
    """A finite graph on wall ids (or arbitrary hashable nodes)."""

    def __init__(self, nodes, edges, radius=None, complex=None, walls=None):
        self.nodes = tuple(sorted(nodes))
        self.radius = radius
        self.complex = complex
        self.walls = walls
        adj = {v: set() for v in self.nodes}
        eset = set()
        for a, b in edges:
            if a == b:
                raise ValueError("the wall graph has no loops")
            adj[a].add(b)
            adj[b].add(a)
            eset.add(frozenset((a, b)))
        self.adj = {v: tuple(sorted(s)) for v, s in adj.items()}
        self.edges = tuple(sorted(tuple(sorted(e)) for e in eset))

    @property
    def max_degree(self):
        return max((len(self.adj[v]) for v in self.nodes), default=0)

    def ball(self, node, r):
        """Closed ball of graph-metric radius r."""
        seen = {node: 0}
        frontier = [node]
        while frontier:
            nxt = []
            for u in frontier:
                if seen[u] == r:
                    continue
                for w in self.adj[u]:
                    if w not in seen:
                        seen[w] = seen[u] + 1
                        nxt.append(w)
            frontier = nxt
        return frozenset(seen)

    def __repr__(self):
        return "WallGraph(%d nodes, %d edges, R=%s)" % (
            len(self.nodes),
            len(self.edges),
            self.radius,
        )


def default_radius(complex):
    """The 1-skeleton diameter: a conservative radius making the graph dense."""
    return complex.skeleton_diameter()


def build_gamma(complex, radius=None, walls=None):
    """Wall graph of a complex: walls within edge-path distance R are adjacent."""
    if walls is None:
        walls = compute_walls(complex)
    if radius is None:
        radius = default_radius(complex)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    nodes = [w.id for w in walls]
    edges = []
    for i, w1 in enumerate(walls):
        for w2 in walls.walls[i + 1:]:
            if walls.distance(w1, w2) <= radius:
                edges.append((w1.id, w2.id))
    return WallGraph(nodes, edges, radius=radius, complex=complex, walls=walls)


@dataclass(frozen=True)
class WallColoring:
    graph: WallGraph
    n: int
    colors: dict

    def __post_init__(self):
        for v in self.graph.nodes:
            c = self.colors.get(v)
            if not isinstance(c, int) or not (1 <= c <= self.n):
                raise ValueError("node %r needs a colour in 1..%d" % (v, self.n))

    def is_proper(self):
        return all(self.colors[a] != self.colors[b] for a, b in self.graph.edges)

    def as_tuple(self):
        return tuple(self.colors[v] for v in self.graph.nodes)

    def __call__(self, node):
        return self.colors[node]


def greedy_coloring(graph):
    """Proper colouring with at most max_degree+1 colours, ascending node order."""
    colors = {}
    for v in graph.nodes:
        used = {colors[u] for u in graph.adj[v] if u in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    n = graph.max_degree + 1
    return WallColoring(graph, max(n, 1), colors)


def reduce_coloring(coloring):
    """Recolour every node coloured n to the least colour missing from its
    neighbours (under the original colours); other nodes keep their colour."""
    graph, n = coloring.graph, coloring.n
    if n <= graph.max_degree + 1:
        raise ValueError(
            "reduction needs palette size > max degree + 1 (n=%d, k=%d)"
            % (n, graph.max_degree)
        )
    new = {}
    for v in graph.nodes:
        c = coloring.colors[v]
        if c < n:
            new[v] = c
        else:
            used = {coloring.colors[u] for u in graph.adj[v]}
            m = 1
            while m in used:
                m += 1
            new[v] = m
    return WallColoring(graph, n - 1, new)


def enumerate_colorings(graph, n, proper=True):
    """All colourings V -> [n] in lexicographic node order (proper ones by default)."""
    nodes = graph.nodes
    out = []

    def backtrack(i, assigned):
        if i == len(nodes):
            out.append(dict(assigned))
            return
        v = nodes[i]
        for c in range(1, n + 1):
            if proper and any(assigned.get(u) == c for u in graph.adj[v]):
                continue
            assigned[v] = c
            backtrack(i + 1, assigned)
            del assigned[v]

    backtrack(0, {})
    return [WallColoring(graph, n, cs) for cs in out]


# -- colouring classes ------------------------------------------------------


@dataclass(frozen=True)
class ColoringClass:
    """All colourings matching a fixed pattern on a support ball.

    A wall class pins the colours on the ball of radius c(W) around W; a
    vertex class intersects the wall classes of the walls dual to the
    edges at the vertex.
    """

    kind: str                # "wall" or "vertex"
    anchor: object
    pattern: tuple           # sorted ((node, colour), ...)
    graph: WallGraph

    def contains(self, coloring):
        return all(coloring.colors[v] == c for v, c in self.pattern)

    @property
    def support(self):
        return frozenset(v for v, _ in self.pattern)

    @property
    def key(self):
        return (self.kind, self.anchor, self.pattern)

    def pattern_dict(self):
        return dict(self.pattern)


def class_of_wall(coloring, wall_id):
    """The equivalence class of the colouring at a wall: agreement on the
    ball whose radius is the wall's own colour."""
    graph = coloring.graph
    radius = coloring.colors[wall_id]
    support = graph.ball(wall_id, radius)
    pattern = tuple(sorted((v, coloring.colors[v]) for v in support))
    return ColoringClass("wall", wall_id, pattern, graph)


def class_of_edge(coloring, edge_index):
    """Wall class of the wall dual to a complex edge, anchored at the edge."""
    graph = coloring.graph
    if graph.walls is None:
        raise ValueError("graph carries no wall system")
    wall_id = graph.walls.wall_of_edge[edge_index]
    cls = class_of_wall(coloring, wall_id)
    return ColoringClass("edge", edge_index, cls.pattern, graph)


def class_of_vertex(coloring, x):
    """Intersection of the wall classes over the edges incident at x."""
    graph = coloring.graph
    if graph.complex is None or graph.walls is None:
        raise ValueError("graph carries no complex")
    cx = graph.complex
    if not cx.has_vertex(x):
        raise ValueError("unknown vertex %r" % (x,))
    pattern = {}
    for e in cx.edges_at(x):
        wcls = class_of_wall(coloring, graph.walls.wall_of_edge[e.index])
        for v, c in wcls.pattern:
            pattern[v] = c
    return ColoringClass("vertex", x, tuple(sorted(pattern.items())), graph)


def vertex_classes_partition(graph, colorings, x):
    """Partition a set of colourings into vertex classes at x."""
    classes = {}
    for c in colorings:
        cls = class_of_vertex(c, x)
        classes.setdefault(cls.key, (cls, []))[1].append(c)
    return [classes[k] for k in sorted(classes)]


# -- group actions on the wall graph -----------------------------------------


def induced_wall_permutations(action, walls):
    """Node permutations of the wall graph induced by a complex action."""
    perms = []
    for el in action.elements:
        vmap = action.vertex_map(el)
        perm = {}
        for w in walls:
            eidx = min(w.dual_edges)
            e = walls.complex.cubes[eidx]
            image = (vmap[e.verts[0]], vmap[e.verts[1]])
            ridx = walls.complex.resolve(1, image)
            perm[w.id] = walls.wall_of_edge[ridx]
        perms.append(perm)
    return perms


def apply_to_coloring(perm, coloring):
    """Push a colouring through a node permutation: (g.c)(v) = c(g^-1 v)."""
    moved = {perm[v]: coloring.colors[v] for v in coloring.graph.nodes}
    return WallColoring(coloring.graph, coloring.n, moved)


def is_graph_automorphism(graph, perm):
    return all(
        tuple(sorted((perm[a], perm[b]))) in set(graph.edges) for a, b in graph.edges
    ) and sorted(perm.values()) == list(graph.nodes)


# -- exact measures -----------------------------------------------------------


@dataclass
class InvariantMeasure:
    """An exact rational distribution on a finite set of colourings."""

    graph: WallGraph
    n: int
    weights: dict            # colouring tuple (node order) -> Fraction

    def __post_init__(self):
        total = sum(self.weights.values(), Fraction(0))
        if total != 1:
            raise ValueError("probabilities sum to %s, expected 1" % (total,))

    def support(self):
        return [
            WallColoring(self.graph, self.n, dict(zip(self.graph.nodes, t)))
            for t in sorted(self.weights)
        ]

    def mass(self, predicate):
        out = Fraction(0)
        for t, p in self.weights.items():
            c = WallColoring(self.graph, self.n, dict(zip(self.graph.nodes, t)))
            if predicate(c):
                out += p
        return out

    def class_mass(self, cls):
        return self.mass(cls.contains)

    def is_invariant_under(self, perm):
        moved = {}
        idx = {v: i for i, v in enumerate(self.graph.nodes)}
        for t, p in self.weights.items():
            image = [None] * len(t)
            for v in self.graph.nodes:
                image[idx[perm[v]]] = t[idx[v]]
            moved[tuple(image)] = moved.get(tuple(image), Fraction(0)) + p
        return moved == self.weights


def uniform_product_measure(graph, n):
    """The product of uniform palette choices: every map V -> [n] equally likely."""
    total = n ** len(graph.nodes)
    p = Fraction(1, total)
    weights = {t: p for t in itertools.product(range(1, n + 1), repeat=len(graph.nodes))}
    return InvariantMeasure(graph, n, weights)


def exact_invariant_measure(graph, action=None):
    """Uniform measure on the proper (k+1)-colourings.

    Invariance under any automorphism action is automatic (the action
    permutes the support); it is asserted against the supplied action.
    """
    n = graph.max_degree + 1
    proper = enumerate_colorings(graph, n, proper=True)
    if not proper:
        raise AssertionError("degree-bounded graph has no proper (k+1)-colouring")
    p = Fraction(1, len(proper))
    weights = {c.as_tuple(): p for c in proper}
    measure = InvariantMeasure(graph, n, weights)
    for perm in _action_perms(graph, action):
        if not measure.is_invariant_under(perm):
            raise AssertionError("uniform proper-colouring measure not invariant")
    return measure


def _action_perms(graph, action):
    if action is None:
        return []
    if hasattr(action, "elements") and graph.walls is not None:
        return induced_wall_permutations(action, graph.walls)
    return list(action)


def push_forward(measure, fn):
    """Push a measure through a colouring map such as reduce_coloring."""
    graph = measure.graph
    out = {}
    for t, p in measure.weights.items():
        c = WallColoring(graph, measure.n, dict(zip(graph.nodes, t)))
        image = fn(c)
        out[image.as_tuple()] = out.get(image.as_tuple(), Fraction(0)) + p
        new_n = image.n
    return InvariantMeasure(graph, new_n, out)


def weight(measure, graph, edge_orbit_reps):
    """Total mass of the monochromatic events over the orbit representatives."""
    total = Fraction(0)
    for (a, b) in edge_orbit_reps:
        total += measure.mass(lambda c: c.colors[a] == c.colors[b])
    return total


def edge_orbit_representatives(graph, perms):
    """Orbit representatives of the graph's edges under node permutations."""
    seen = set()
    reps = []
    for e in graph.edges:
        if e in seen:
            continue
        orbit = {e}
        frontier = [e]
        while frontier:
            nxt = []
            for (a, b) in frontier:
                for perm in perms:
                    img = tuple(sorted((perm[a], perm[b])))
                    if img not in orbit:
                        orbit.add(img)
                        nxt.append(img)
            frontier = nxt
        seen |= orbit
        reps.append(e)
    return reps


def class_orbits(graph, elements, anchored_classes):
    """Orbits of (anchor, class) pairs under g.(x, [c]) = (gx, [gc]).

    `elements` is a sequence of (anchor map, node permutation) pairs.
    """
    keyed = {}
    for anchor, cls in anchored_classes:
        keyed[(anchor, cls.key)] = (anchor, cls)
    orbits = []
    seen = set()
    for key in sorted(keyed, key=repr):
        if key in seen:
            continue
        anchor, cls = keyed[key]
        orbit = set()
        frontier = [(anchor, cls.pattern)]
        orbit.add((anchor, cls.pattern))
        while frontier:
            nxt = []
            for (a, pattern) in frontier:
                for amap, perm in elements:
                    a2 = amap[a]
                    p2 = tuple(sorted((perm[v], c) for v, c in pattern))
                    if (a2, p2) not in orbit:
                        orbit.add((a2, p2))
                        nxt.append((a2, p2))
            frontier = nxt
        for a2, p2 in orbit:
            seen.add((a2, (cls.kind, a2, p2)))
        orbits.append(sorted(orbit, key=repr))
    return orbits
