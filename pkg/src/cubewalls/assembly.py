"""The cut-and-reglue hierarchy: pieces, portals, teleports and gluing.

A piece is a convex subspace of a certified ambient complex, stored as
half-space constraints (one chosen side per constrained wall) and realized
as barycentric cells of the subdivided complex, together with a wall
colouring per vertex it contains.  The hierarchy starts from one-vertex
pieces with multiplicities solving the balance system, then glues pieces
along same-coloured boundary walls one colour at a time, from the top
colour down, until the ambient complex is reassembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import trivial_action
from .coloring import (
    WallColoring,
    build_gamma,
    class_of_wall,
    enumerate_colorings,
    exact_invariant_measure,
    induced_wall_permutations,
    vertex_classes_partition,
)
from .covers import certify_simply_connected
from .gluing import PieceTemplate, build_system, nonneg_integer_kernel, seed_alpha
from .walls import HalfSpacePair, compute_walls


class IntegrityError(RuntimeError):
    """A structural law of the construction failed; indicates an upstream bug."""


class SideSwapError(ValueError):
    """A symmetry exchanges the sides of a wall it stabilises; subdivide first."""


class Ambient:
    """The certified ambient complex with its walls, graph, sides and action."""

    def __init__(self, complex, action=None, radius=None, certify=True):
        if not complex.well_formed():
            raise ValueError("ambient complex is not well formed")
        flag, witness = complex.is_npc()
        if not flag:
            raise ValueError("ambient complex is not nonpositively curved: %s" % (witness,))
        if certify and not certify_simply_connected(complex):
            raise ValueError("ambient complex is not simply connected")
        self.X = complex
        self.action = action if action is not None else trivial_action(complex)
        self.walls = compute_walls(complex)
        self.gamma = build_gamma(complex, radius, walls=self.walls)
        self.sub = complex.subdivide()
        self.cells = {}
        for v in complex.vertices:
            self.cells["v[%s]" % v] = ("v", v)
        for c in complex.cubes:
            self.cells["c[%d]" % c.index] = ("c", c.index)
        assert set(self.cells) == set(self.sub.vertices)
        self.crossing = {
            c.index: frozenset(self.walls.crossing_walls(c)) for c in complex.cubes
        }
        self.elements = self.action.elements
        self.vmaps = [self.action.vertex_map(el) for el in self.elements]
        self.cmaps = [self.action.cube_map(el) for el in self.elements]
        self.inv_cmaps = [{v: k for k, v in cm.items()} for cm in self.cmaps]
        self.wperms = induced_wall_permutations(self.action, self.walls)
        self.inv_wperms = [{v: k for k, v in wp.items()} for wp in self.wperms]
        self.identity = self._find_identity()
        self.compose_table = self._compose_table()
        self.inverse_of = self._inverses()
        self.sides = self._equivariant_sides()
        self.measure = exact_invariant_measure(self.gamma, self.action)
        self.proper = self.measure.support()
        self._realized_cache = {}
        self._class_cache = {}

    # -- group bookkeeping -------------------------------------------------

    def _find_identity(self):
        base = self.action.base
        for i, el in enumerate(self.elements):
            if el == base:
                return i
        raise AssertionError("group closure lost the identity")

    def _compose_table(self):
        base = self.action.base
        index = {el: i for i, el in enumerate(self.elements)}
        pos = {v: i for i, v in enumerate(base)}
        table = {}
        for i, g in enumerate(self.elements):
            for j, h in enumerate(self.elements):
                comp = tuple(g[pos[h[pos[v]]]] for v in base)
                table[(i, j)] = index[comp]
        return table

    def _inverses(self):
        inv = {}
        for i in range(len(self.elements)):
            for j in range(len(self.elements)):
                if self.compose_table[(i, j)] == self.identity:
                    inv[i] = j
                    break
        return inv

    def compose(self, g, h):
        """Index of the element acting as 'apply h, then g'."""
        return self.compose_table[(g, h)]

    # -- sides ---------------------------------------------------------------

    def _equivariant_sides(self):
        sides = {}
        for w in self.walls:
            if w.id in sides:
                continue
            base = self.walls.half_spaces(w)
            for g in range(len(self.elements)):
                wid2 = self.wperms[g][w.id]
                plus2 = frozenset(self.vmaps[g][v] for v in base.plus)
                minus2 = frozenset(self.vmaps[g][v] for v in base.minus)
                if wid2 in sides:
                    if sides[wid2].plus != plus2:
                        raise SideSwapError(
                            "a symmetry exchanges the sides of wall %d; "
                            "pass the subdivided complex instead" % wid2
                        )
                else:
                    check = self.walls.half_spaces(self.walls[wid2])
                    if {check.plus, check.minus} != {plus2, minus2}:
                        raise AssertionError("side transport broke a bipartition")
                    sides[wid2] = HalfSpacePair(self.walls[wid2], plus2, minus2)
        return sides

    def side_of_vertex(self, v, wall_id):
        return self.sides[wall_id].side_of(v)

    def side_of_cell(self, name, wall_id):
        kind, payload = self.cells[name]
        if kind == "v":
            return self.side_of_vertex(payload, wall_id)
        if wall_id in self.crossing[payload]:
            return "on"
        return self.side_of_vertex(self.X.cubes[payload].verts[0], wall_id)

    # -- realization ----------------------------------------------------------

    def realized(self, constraints):
        """Sub-vertices satisfying every half-space constraint."""
        key = tuple(sorted(constraints))
        if key not in self._realized_cache:
            out = set()
            for name in self.sub.vertices:
                ok = True
                for wid, s in key:
                    side = self.side_of_cell(name, wid)
                    if side != "on" and side != s:
                        ok = False
                        break
                if ok:
                    out.add(name)
            self._realized_cache[key] = frozenset(out)
        return self._realized_cache[key]

    def x_vertices(self, constraints):
        return frozenset(
            self.cells[name][1]
            for name in self.realized(constraints)
            if self.cells[name][0] == "v"
        )

    def star_constraints(self, x):
        """Constraints of the intersection of all half-spaces containing x."""
        return tuple(
            sorted((w.id, self.side_of_vertex(x, w.id)) for w in self.walls)
        )

    def wall_class_pattern(self, coloring, wall_id):
        key = (coloring.as_tuple(), wall_id)
        if key not in self._class_cache:
            self._class_cache[key] = class_of_wall(coloring, wall_id).pattern
        return self._class_cache[key]

    def transport_pattern(self, g, pattern):
        return tuple(sorted((self.wperms[g][v], c) for v, c in pattern))

    def transport_coloring(self, g, coloring):
        inv = self.inv_wperms[g]
        moved = {w: coloring.colors[inv[w]] for w in coloring.graph.nodes}
        return WallColoring(coloring.graph, coloring.n, moved)

    def transport_cells(self, g, cells):
        out = set()
        for name in cells:
            kind, payload = self.cells[name]
            if kind == "v":
                out.add("v[%s]" % self.vmaps[g][payload])
            else:
                out.add("c[%d]" % self.cmaps[g][payload])
        return frozenset(out)


@dataclass(frozen=True)
class Piece:
    """A half-space intersection with per-vertex colourings and a multiplicity."""

    constraints: tuple         # sorted ((wall id, '+'|'-'), ...)
    colorings: tuple           # sorted ((vertex, WallColoring), ...)
    multiplicity: int = 1

    def coloring_at(self, x):
        for v, c in self.colorings:
            if v == x:
                return c
        raise KeyError(x)

    @property
    def vertices(self):
        return tuple(v for v, _ in self.colorings)

    def key(self):
        return (
            self.constraints,
            tuple((v, c.as_tuple()) for v, c in self.colorings),
        )


@dataclass(frozen=True)
class Portal:
    """A piece's gluing interface inside one of its colour-j boundary walls."""

    piece_instance: int        # index into the expanded instance list
    wall_id: int
    side: str                  # side of the piece's space relative to the wall
    dual_edges: tuple          # edge records crossing out of the piece
    klass: tuple               # the common wall-class pattern (zipped)
    cells: frozenset           # wall cells of the subdivided complex inside the piece

    def class_set(self):
        return frozenset((e, self.klass) for e in self.dual_edges)


@dataclass(frozen=True)
class Teleport:
    source: int                # portal index
    target: int                # portal index
    g: int                     # group element index: class(source) = g . class(target)


def make_piece(ambient, constraints, colorings, multiplicity=1):
    cons = tuple(sorted(constraints))
    cols = tuple(sorted(colorings.items(), key=lambda vc: vc[0]))
    piece = Piece(cons, cols, multiplicity)
    verts = ambient.x_vertices(cons)
    if verts != frozenset(v for v, _ in cols):
        raise IntegrityError(
            "colouring data does not match the realized vertex set: %s vs %s"
            % (sorted(verts), [v for v, _ in cols])
        )
    return piece


# -- level construction -------------------------------------------------------


def initial_pieces(ambient):
    """The top-level piece list: one-vertex pieces with solved multiplicities."""
    orbit_reps = [min(orbit) for orbit in ambient.action.vertex_orbits()]
    anchored = []
    templates = []
    for x in orbit_reps:
        parts = vertex_classes_partition(ambient.gamma, ambient.proper, x)
        anchored.append((x, [cls for cls, _ in parts]))
        for cls, members in parts:
            templates.append(PieceTemplate(x, members[0], cls))
    stab = {x: ambient.action.vertex_stabilizer_order(x) for x in orbit_reps}
    alpha = seed_alpha(ambient.measure, anchored, stab)
    system = build_system(templates, ambient.action, ambient.sides)
    solution = nonneg_integer_kernel(system.matrix(), alpha.entries)
    pieces = []
    for t, mult in zip(templates, solution.vector):
        if mult == 0:
            continue
        cons = ambient.star_constraints(t.anchor)
        pieces.append(make_piece(ambient, cons, {t.anchor: t.coloring}, mult))
    return pieces, {"alpha": alpha, "system": system, "solution": solution}


def edges_crossing_out(ambient, piece):
    """(edge record, inside vertex, outside vertex) triples leaving the piece."""
    inside = ambient.x_vertices(piece.constraints)
    out = []
    for e in ambient.X.edges:
        a, b = e.verts
        if a in inside and b not in inside:
            out.append((e.index, a, b))
        elif b in inside and a not in inside:
            out.append((e.index, b, a))
    return out


def boundary_walls(ambient, piece, j=None):
    """All boundary walls, plus the subset of colour j when j is given.

    A boundary wall is the wall of an edge crossing out of the piece; its
    colour is the zipped colour of its dual edges.
    """
    crossing = edges_crossing_out(ambient, piece)
    walls = {}
    for eidx, x, _ in crossing:
        wid = ambient.walls.wall_of_edge[eidx]
        colour = piece.coloring_at(x).colors[wid]
        walls.setdefault(wid, set()).add(colour)
        if colour > (j if j is not None else float("inf")):
            raise IntegrityError(
                "edge %d crosses out of the piece but its wall %d has colour %d > %s"
                % (eidx, wid, colour, j)
            )
    for wid, colours in walls.items():
        if len(colours) != 1:
            raise IntegrityError(
                "boundary wall %d receives several colours %s" % (wid, sorted(colours))
            )
    all_walls = sorted(walls)
    if j is None:
        return all_walls, None
    return all_walls, sorted(w for w, cs in walls.items() if cs == {j})


def zipping_check(ambient, piece, wall_id):
    """All dual edges of a boundary wall must induce one wall class."""
    crossing = [t for t in edges_crossing_out(ambient, piece)
                if ambient.walls.wall_of_edge[t[0]] == wall_id]
    if not crossing:
        raise ValueError("wall %d is not a boundary wall of the piece" % wall_id)
    patterns = {}
    for eidx, x, _ in crossing:
        patterns[eidx] = ambient.wall_class_pattern(piece.coloring_at(x), wall_id)
    distinct = set(patterns.values())
    if len(distinct) != 1:
        e1, e2 = sorted(patterns)[:2]
        raise IntegrityError(
            "dual edges %d and %d of wall %d induce different classes"
            % (e1, e2, wall_id)
        )
    return distinct.pop()


def portal_cells(ambient, piece, wall_id):
    realized = ambient.realized(piece.constraints)
    return frozenset(
        name
        for name in realized
        if ambient.cells[name][0] == "c"
        and wall_id in ambient.crossing[ambient.cells[name][1]]
    )


def split_wall_along_coloring(ambient, wall_id, coloring, j, cell):
    """Component, through `cell`, of the wall minus its intersections with
    other walls coloured <= j."""
    wall = ambient.walls[wall_id]
    low = {w for w in coloring.graph.nodes if coloring.colors[w] <= j and w != wall_id}
    nodes = set()
    for cidx, _ in wall.midcubes:
        if not (ambient.crossing[cidx] & low):
            nodes.add("c[%d]" % cidx)
    if cell not in nodes:
        raise ValueError("cell %r is not on the split wall" % (cell,))
    adj = {n: set() for n in nodes}
    for n in nodes:
        cube = ambient.X.cubes[ambient.cells[n][1]]
        if cube.dim < 2:
            continue
        for jj in range(cube.dim):
            for side in (0, 1):
                f = ambient.X.face_record(cube, jj, side)
                if f is None:
                    continue
                fname = "c[%d]" % f
                if fname in nodes and wall_id in ambient.crossing[f]:
                    adj[n].add(fname)
                    adj[fname].add(n)
    seen = {cell}
    frontier = [cell]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(seen)


def portal_cover_check(ambient, piece, wall_id, j):
    """The portal's interior must match the split-wall component of any dual
    edge's colouring, independently of the edge chosen."""
    all_bw, _ = boundary_walls(ambient, piece, j)
    others = set(all_bw) - {wall_id}
    cells = portal_cells(ambient, piece, wall_id)
    interior = frozenset(
        name for name in cells
        if not (ambient.crossing[ambient.cells[name][1]] & others)
    )
    crossing = [t for t in edges_crossing_out(ambient, piece)
                if ambient.walls.wall_of_edge[t[0]] == wall_id]
    components = set()
    for eidx, x, _ in crossing:
        comp = split_wall_along_coloring(
            ambient, wall_id, piece.coloring_at(x), j, "c[%d]" % eidx
        )
        components.add(comp)
    if len(components) != 1:
        raise IntegrityError(
            "split-wall component of wall %d depends on the dual edge" % wall_id
        )
    return components.pop() == interior


def expand_instances(pieces):
    """One instance per multiplicity unit."""
    instances = []
    for idx, p in enumerate(pieces):
        for _ in range(p.multiplicity):
            instances.append((idx, p))
    return instances


def compute_portals(ambient, instances, j):
    portals = []
    for inst_index, (_, piece) in enumerate(instances):
        _, jwalls = boundary_walls(ambient, piece, j)
        for wid in jwalls:
            klass = zipping_check(ambient, piece, wid)
            duals = tuple(
                sorted(
                    t[0]
                    for t in edges_crossing_out(ambient, piece)
                    if ambient.walls.wall_of_edge[t[0]] == wid
                )
            )
            side = dict(piece.constraints)[wid]
            portals.append(
                Portal(inst_index, wid, side, duals, klass, portal_cells(ambient, piece, wid))
            )
    return portals


def compatibility_classes(ambient, portals):
    """Partition portals into compatibility classes, with witness teleports.

    Two portals are compatible when some symmetry carries one's dual-edge
    class set onto the other's.
    """
    teleports = []
    n = len(portals)
    class_sets = [p.class_set() for p in portals]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i, n):
            for g in range(len(ambient.elements)):
                moved = frozenset(
                    (ambient.cmaps[g][e], ambient.transport_pattern(g, pat))
                    for e, pat in class_sets[k]
                )
                if moved == class_sets[i]:
                    teleports.append(Teleport(i, k, g))
                    pa, pb = find(i), find(k)
                    if pa != pb:
                        parent[max(pa, pb)] = min(pa, pb)
                    if i != k:
                        teleports.append(Teleport(k, i, ambient.inverse_of[g]))
    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return [classes[r] for r in sorted(classes)], teleports


def verify_teleport_groupoid(ambient, portals, teleports):
    """Identity, inverse and composition laws on the computed teleports."""
    by_pair = {}
    for t in teleports:
        by_pair.setdefault((t.source, t.target), set()).add(t.g)
    for i in range(len(portals)):
        if ambient.identity not in by_pair.get((i, i), set()):
            raise IntegrityError("portal %d is not a 1-teleport of itself" % i)
    for t in teleports:
        if ambient.inverse_of[t.g] not in by_pair.get((t.target, t.source), set()):
            raise IntegrityError("teleport inverse missing for %s" % (t,))
    for t1 in teleports:
        for t2 in teleports:
            if t1.target != t2.source:
                continue
            comp = ambient.compose(t1.g, t2.g)
            if comp not in by_pair.get((t1.source, t2.target), set()):
                raise IntegrityError("teleport composition missing")
    return True


def match_portals(ambient, portals, classes, teleports):
    """Within each class, pair +-side portals with --side portals canonically.

    A count mismatch contradicts the balance equations and is an integrity
    failure.  Returns (portal+, portal-, g) triples with class(portal+) =
    g . class(portal-).
    """
    by_pair = {}
    for t in teleports:
        by_pair.setdefault((t.source, t.target), []).append(t.g)
    matching = []
    for cls in classes:
        plus = sorted(i for i in cls if portals[i].side == "+")
        minus = sorted(i for i in cls if portals[i].side == "-")
        if len(plus) != len(minus):
            raise IntegrityError(
                "compatibility class has %d plus portals but %d minus portals"
                % (len(plus), len(minus))
            )
        for a, b in zip(plus, minus):
            gs = sorted(by_pair.get((a, b), []))
            if not gs:
                raise IntegrityError("no teleport between matched portals %d, %d" % (a, b))
            matching.append((a, b, gs[0]))
    return matching


def glue(ambient, pieces, j, check_overlaps=True):
    """Glue the colour-j portals of the pieces; returns the next piece list."""
    instances = expand_instances(pieces)
    portals = compute_portals(ambient, instances, j)
    classes, teleports = compatibility_classes(ambient, portals)
    matching = match_portals(ambient, portals, classes, teleports)

    # graph of spaces on instances; develop each component inside the complex
    adjacency = {}
    for a, b, g in matching:
        pa, pb = portals[a], portals[b]
        adjacency.setdefault(pa.piece_instance, []).append((pb.piece_instance, g, a, b))
        adjacency.setdefault(pb.piece_instance, []).append(
            (pa.piece_instance, ambient.inverse_of[g], b, a)
        )

    assigned = set()
    new_pieces = []
    for seed in range(len(instances)):
        if seed in assigned:
            continue
        states = {(seed, ambient.identity)}
        frontier = [(seed, ambient.identity)]
        component_instances = {seed}
        while frontier:
            nxt = []
            for (inst, g) in frontier:
                for (other, g_tel, pa, pb) in adjacency.get(inst, ()):
                    state = (other, ambient.compose(g, g_tel))
                    if state not in states:
                        states.add(state)
                        component_instances.add(other)
                        nxt.append(state)
            frontier = nxt
        assigned |= component_instances

        translated = []
        for (inst, g) in sorted(states):
            piece = instances[inst][1]
            cells = ambient.transport_cells(g, ambient.realized(piece.constraints))
            translated.append((inst, g, piece, cells))

        union_cells = set()
        for _, _, _, cells in translated:
            union_cells |= cells
        if check_overlaps:
            _check_overlaps(ambient, translated, portals, matching, states)

        colorings = {}
        for (inst, g, piece, _) in translated:
            for (x, c) in piece.colorings:
                gx = ambient.vmaps[g][x]
                gc = ambient.transport_coloring(g, c)
                if gx in colorings and colorings[gx].colors != gc.colors:
                    raise IntegrityError(
                        "glued colourings disagree at vertex %r" % (gx,)
                    )
                colorings[gx] = gc

        constraints = []
        verts = sorted(colorings)
        for w in ambient.walls:
            sides = {ambient.side_of_vertex(v, w.id) for v in verts}
            if len(sides) == 1:
                constraints.append((w.id, sides.pop()))
        cons = tuple(sorted(constraints))
        if ambient.realized(cons) != frozenset(union_cells):
            raise IntegrityError(
                "glued space is not the intersection of its half-spaces"
            )
        new_pieces.append(make_piece(ambient, cons, colorings, 1))

    return _aggregate(new_pieces)


def _check_overlaps(ambient, translated, portals, matching, states):
    """Distinct translates may only meet along matched portal translates."""
    allowed = set()
    state_of = {}
    for (inst, g, piece, cells) in translated:
        state_of[(inst, g)] = cells
    for a, b, g_tel in matching:
        pa, pb = portals[a], portals[b]
        for (inst, g) in states:
            if inst == pa.piece_instance:
                allowed.add(frozenset(ambient.transport_cells(g, pa.cells)))
    items = sorted(state_of)
    for i in range(len(items)):
        for k in range(i + 1, len(items)):
            inter = state_of[items[i]] & state_of[items[k]]
            if not inter:
                continue
            if frozenset(inter) not in allowed:
                raise IntegrityError(
                    "piece translates overlap away from a matched portal"
                )


def _aggregate(pieces):
    agg = {}
    order = []
    for p in pieces:
        k = p.key()
        if k in agg:
            agg[k] = Piece(p.constraints, p.colorings, agg[k].multiplicity + p.multiplicity)
        else:
            agg[k] = p
            order.append(k)
    return [agg[k] for k in order]


# -- per-level verification -----------------------------------------------------


def verify_properties(ambient, pieces, j):
    """Adjacent-colouring agreement and the interior/boundary colour law."""
    for p in pieces:
        inside = ambient.x_vertices(p.constraints)
        for e in ambient.X.edges:
            a, b = e.verts
            wid = ambient.walls.wall_of_edge[e.index]
            if a in inside and b in inside:
                pa = ambient.wall_class_pattern(p.coloring_at(a), wid)
                pb = ambient.wall_class_pattern(p.coloring_at(b), wid)
                if pa != pb:
                    raise IntegrityError(
                        "edge %d joins vertices with different classes" % e.index
                    )
            for x, y in ((a, b), (b, a)):
                if x in inside:
                    colour = p.coloring_at(x).colors[wid]
                    if (y in inside) != (colour > j):
                        if a == b:
                            continue
                        raise IntegrityError(
                            "interior/boundary law fails at edge %d (colour %d, level %d)"
                            % (e.index, colour, j)
                        )
    return True


def count_v_sets(ambient, pieces, fidx, pattern, side):
    """Brute-force size of the side set: (edge orbit, piece) pairs carried by
    some symmetry onto the reference edge with matching class, with the piece
    continuing on the given side of the reference wall."""
    hs = ambient.sides[ambient.walls.wall_of_edge[fidx]]
    total = 0
    for p in pieces:
        inside = ambient.x_vertices(p.constraints)
        for e in ambient.X.edges:
            a, b = e.verts
            ends = [v for v in (a, b) if v in inside]
            if not ends:
                continue
            cx = p.coloring_at(ends[0])
            if len(ends) == 2:
                pat_a = ambient.wall_class_pattern(p.coloring_at(a), ambient.walls.wall_of_edge[e.index])
                pat_b = ambient.wall_class_pattern(p.coloring_at(b), ambient.walls.wall_of_edge[e.index])
                if pat_a != pat_b:
                    raise IntegrityError("edge class ill-defined inside a piece")
            wid = ambient.walls.wall_of_edge[e.index]
            pat = ambient.wall_class_pattern(cx, wid)
            hit = False
            for g in range(len(ambient.elements)):
                if ambient.cmaps[g][e.index] != fidx:
                    continue
                if ambient.transport_pattern(g, pat) != pattern:
                    continue
                image_verts = {ambient.vmaps[g][v] for v in inside}
                target = hs.plus if side == "+" else hs.minus
                if image_verts & target:
                    hit = True
                    break
            if hit:
                total += p.multiplicity
    return total


def gluing_equation_keys(ambient):
    """Orbit representatives of (edge record, wall class pattern)."""
    keys = set()
    for e in ambient.X.edges:
        wid = ambient.walls.wall_of_edge[e.index]
        for c in ambient.proper:
            keys.add((e.index, ambient.wall_class_pattern(c, wid)))
    reps = []
    seen = set()
    for key in sorted(keys):
        if key in seen:
            continue
        orbit = {key}
        frontier = [key]
        while frontier:
            nxt = []
            for (fidx, pat) in frontier:
                for g in range(len(ambient.elements)):
                    img = (ambient.cmaps[g][fidx], ambient.transport_pattern(g, pat))
                    if img not in orbit:
                        orbit.add(img)
                        nxt.append(img)
            frontier = nxt
        seen |= orbit
        reps.append(min(orbit))
    return reps


def verify_gluing_equations(ambient, pieces):
    for (fidx, pattern) in gluing_equation_keys(ambient):
        plus = count_v_sets(ambient, pieces, fidx, pattern, "+")
        minus = count_v_sets(ambient, pieces, fidx, pattern, "-")
        if plus != minus:
            raise IntegrityError(
                "balance fails at edge %d: %d vs %d" % (fidx, plus, minus)
            )
    return True


def verify_portal_disjointness(ambient, pieces, j):
    """Colour-j boundary walls of one piece are pairwise disjoint, and no
    vertex meets two of them."""
    for p in pieces:
        _, jwalls = boundary_walls(ambient, p, j)
        for i, w1 in enumerate(jwalls):
            for w2 in jwalls[i + 1:]:
                if ambient.walls.intersects(ambient.walls[w1], ambient.walls[w2]):
                    raise IntegrityError(
                        "colour-%d boundary walls %d and %d intersect" % (j, w1, w2)
                    )
        inside = ambient.x_vertices(p.constraints)
        crossing = edges_crossing_out(ambient, p)
        for v in inside:
            duals_here = {
                ambient.walls.wall_of_edge[eidx]
                for eidx, x, _ in crossing
                if x == v and ambient.walls.wall_of_edge[eidx] in jwalls
            }
            if len(duals_here) > 1:
                raise IntegrityError(
                    "vertex %r meets two colour-%d boundary walls" % (v, j)
                )
    return True


def verify_level(ambient, pieces, j):
    verify_properties(ambient, pieces, j)
    verify_gluing_equations(ambient, pieces)
    verify_portal_disjointness(ambient, pieces, j)
    checks = {"properties": True, "gluing_equations": True, "portal_disjointness": True}
    zipped = 0
    covers_ok = True
    for p in pieces:
        _, jwalls = boundary_walls(ambient, p, j)
        for wid in jwalls:
            zipping_check(ambient, p, wid)
            zipped += 1
            if not portal_cover_check(ambient, p, wid, j):
                covers_ok = False
    if not covers_ok:
        raise IntegrityError("a portal does not match its split-wall component")
    checks["zipping"] = zipped
    checks["portal_covers"] = True
    return checks


# -- the hierarchy ----------------------------------------------------------------


@dataclass
class LevelRecord:
    level: int
    pieces: list
    checks: dict
    portals: int
    classes: int
    matched: int


@dataclass
class HierarchyResult:
    ambient: Ambient
    seed: dict
    levels: list
    final_pieces: list

    @property
    def reassembled(self):
        """The distinct final spaces, as realized cell sets."""
        return {p.constraints for p in self.final_pieces}

    def final_is_ambient(self):
        whole = frozenset(self.ambient.sub.vertices)
        return all(
            self.ambient.realized(p.constraints) == whole for p in self.final_pieces
        ) and len(self.reassembled) == 1


class HierarchyError(RuntimeError):
    def __init__(self, message, levels):
        super().__init__(message)
        self.levels = levels


def run_hierarchy(complex, action=None, radius=None, verify=True):
    """Cut the ambient complex into vertex pieces and reglue colour by colour.

    Verifies the construction laws at every level when `verify` is set;
    returns the full trace.
    """
    ambient = Ambient(complex, action=action, radius=radius)
    pieces, seed = initial_pieces(ambient)
    levels = []
    k = ambient.gamma.max_degree
    for j in range(k + 1, 0, -1):
        try:
            checks = verify_level(ambient, pieces, j) if verify else {}
            instances = expand_instances(pieces)
            portals = compute_portals(ambient, instances, j)
            classes, teleports = compatibility_classes(ambient, portals)
            if verify:
                verify_teleport_groupoid(ambient, portals, teleports)
            matching = match_portals(ambient, portals, classes, teleports)
            levels.append(
                LevelRecord(j, pieces, checks, len(portals), len(classes), len(matching))
            )
            pieces = glue(ambient, pieces, j, check_overlaps=verify)
        except IntegrityError as err:
            raise HierarchyError("level %d: %s" % (j, err), levels) from err
    if verify:
        verify_properties(ambient, pieces, 0)
        verify_gluing_equations(ambient, pieces)
    return HierarchyResult(ambient, seed, levels, pieces)
