"""Universal-cover balls, simple-connectedness certification, double covers.

A ball of radius r around a basepoint is developed by frontier expansion:
every missing edge-end at an inner vertex is given a fresh lift, then lifts
are folded (two lifts of one edge-end at a vertex merge) and squares are
completed (the two routes around a lifted square corner end at one vertex).
The result is the radius-r ball in the universal cover.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .complexes import CubeComplex, canonical_array


def _edge_end(complex, cube, corner, j):
    """Resolve the direction-j edge at a corner to (record index, end at corner)."""
    (a, b), end = cube.edge_at_corner(corner, j)
    ridx = complex.resolve(1, (a, b))
    rec = complex.cubes[ridx]
    if rec.verts == (a, b):
        return ridx, end
    if rec.verts == (b, a):
        return ridx, 1 - end
    return ridx, end


class _Development:
    def __init__(self, complex, basepoint, radius):
        self.cx = complex
        self.radius = radius
        self.parent = [0]
        self.base = [basepoint]
        self.dist = [0]
        self.out = {}     # (root vid, edge record, end bit at vid) -> vid
        self._ends_at = {v: tuple(sorted(complex.edge_ends_at(v))) for v in complex.vertices}
        self._corner_data = self._square_corners()

    def _square_corners(self):
        data = {}
        for sq in self.cx.squares:
            for i in range(4):
                v = sq.verts[i]
                e0 = _edge_end(self.cx, sq, i, 0)
                e1 = _edge_end(self.cx, sq, i, 1)
                o0 = _edge_end(self.cx, sq, i ^ 1, 1)   # dir-1 edge at the dir-0 neighbour
                o1 = _edge_end(self.cx, sq, i ^ 2, 0)   # dir-0 edge at the dir-1 neighbour
                data.setdefault(v, []).append((e0, e1, o0, o1))
        return data

    def find(self, v):
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def _new_vertex(self, base, dist):
        vid = len(self.parent)
        self.parent.append(vid)
        self.base.append(base)
        self.dist.append(dist)
        return vid

    def _set_out(self, u, key, w, merges):
        if key in self.out:
            old = self.find(self.out[key])
            w = self.find(w)
            if old != w:
                merges.append((old, w))
        else:
            self.out[key] = w

    def _merge_all(self, merges):
        while merges:
            a, b = merges.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            keep, drop = min(a, b), max(a, b)
            if self.base[keep] != self.base[drop]:
                raise RuntimeError("development merged vertices over different fibres")
            self.dist[keep] = min(self.dist[keep], self.dist[drop])
            self.parent[drop] = keep
            moved = [(k, w) for k, w in self.out.items() if k[0] == drop]
            for k, w in moved:
                del self.out[k]
            for (_, e, bit), w in moved:
                self._set_out(keep, (keep, e, bit), self.find(w), merges)

    def _close(self):
        changed = True
        while changed:
            changed = False
            merges = []
            # refresh stale keys/values after earlier merges
            stale = [(k, w) for k, w in self.out.items() if self.find(k[0]) != k[0] or self.find(w) != w]
            for k, w in stale:
                del self.out[k]
            for (u, e, bit), w in stale:
                self._set_out(self.find(u), (self.find(u), e, bit), self.find(w), merges)
            if merges:
                self._merge_all(merges)
                changed = True
                continue
            for u in range(len(self.parent)):
                if self.find(u) != u:
                    continue
                for e0, e1, o0, o1 in self._corner_data.get(self.base[u], ()):
                    k0 = (u, e0[0], e0[1])
                    k1 = (u, e1[0], e1[1])
                    if k0 not in self.out or k1 not in self.out:
                        continue
                    u0 = self.find(self.out[k0])
                    u1 = self.find(self.out[k1])
                    ka = (u0, o0[0], o0[1])
                    kb = (u1, o1[0], o1[1])
                    wa = self.find(self.out[ka]) if ka in self.out else None
                    wb = self.find(self.out[kb]) if kb in self.out else None
                    if wa is not None and wb is not None:
                        if wa != wb:
                            self._merge_all([(wa, wb)])
                            changed = True
                    elif wa is not None and wb is None:
                        self._set_out(u1, kb, wa, merges)
                        self._set_out(wa, (wa, o1[0], 1 - o1[1]), u1, merges)
                        changed = True
                    elif wb is not None and wa is None:
                        self._set_out(u0, ka, wb, merges)
                        self._set_out(wb, (wb, o0[0], 1 - o0[1]), u0, merges)
                        changed = True
                    if merges:
                        self._merge_all(merges)
                        merges = []
                if changed:
                    break

    def run(self):
        for layer in range(self.radius):
            frontier = sorted(
                u for u in range(len(self.parent))
                if self.find(u) == u and self.dist[u] == layer
            )
            for u in frontier:
                u = self.find(u)
                if self.dist[u] != layer:
                    continue
                for (eidx, bit) in self._ends_at[self.base[u]]:
                    key = (u, eidx, bit)
                    if key in self.out:
                        continue
                    e = self.cx.cubes[eidx]
                    w = self._new_vertex(e.verts[1 - bit], layer + 1)
                    merges = []
                    self._set_out(u, key, w, merges)
                    self._set_out(w, (w, eidx, 1 - bit), u, merges)
                    self._merge_all(merges)
                self._close()
        self._close()
        return self._extract()

    def _extract(self):
        roots = sorted(u for u in range(len(self.parent)) if self.find(u) == u)
        # canonical names: lexicographically least shortest token path from the base
        start = self.find(0)
        rep = {start: ()}
        arcs = sorted(
            (self.find(k[0]), k[1], k[2], self.find(w)) for k, w in self.out.items()
        )
        changed = True
        while changed:
            changed = False
            for (u, e, bit, w) in arcs:
                if u not in rep:
                    continue
                cand = rep[u] + ((e, bit),)
                if w not in rep or (len(cand), cand) < (len(rep[w]), rep[w]):
                    rep[w] = cand
                    changed = True

        def name(u):
            toks = rep[u]
            return "p[%s]" % ",".join("%d.%d" % t for t in toks)

        names = {u: name(u) for u in roots}
        vertices = sorted(names.values())
        projection = {names[u]: self.base[u] for u in roots}
        distances = {names[u]: self.dist[u] for u in roots}

        edge_lifts = {}
        for (u, e, bit), w in self.out.items():
            u, w = self.find(u), self.find(w)
            if bit == 0:
                arr = (names[u], names[w])
            else:
                arr = (names[w], names[u])
            edge_lifts.setdefault((e, arr), True)
        cubes = [(1, arr) for (e, arr) in sorted(edge_lifts)]
        cube_proj = {i: e for i, (e, arr) in enumerate(sorted(edge_lifts))}

        # lift higher cubes wherever the whole corner pattern is present
        seen = set()
        for c in sorted(self.cx.cubes, key=lambda c: c.dim):
            if c.dim < 2:
                continue
            anchors = [u for u in roots if self.base[u] == c.verts[0]]
            for u0 in anchors:
                phi = {0: u0}
                ok = True
                queue = deque([0])
                visited = {0}
                while queue and ok:
                    i = queue.popleft()
                    for j in range(c.dim):
                        i2 = i ^ (1 << j)
                        r, end = _edge_end(self.cx, c, i, j)
                        key = (phi[i], r, end)
                        if key not in self.out:
                            ok = False
                            break
                        w = self.find(self.out[key])
                        if i2 in phi:
                            if phi[i2] != w:
                                ok = False
                                break
                        else:
                            phi[i2] = w
                            if i2 not in visited:
                                visited.add(i2)
                                queue.append(i2)
                # cubes embed in the cover: corner images must be distinct
                if ok and len(phi) == (1 << c.dim) and len(set(phi.values())) == (1 << c.dim):
                    arr = tuple(names[phi[i]] for i in range(1 << c.dim))
                    keyc = (c.dim, canonical_array(arr))
                    if keyc not in seen:
                        seen.add(keyc)
                        cubes.append((c.dim, arr))
                        cube_proj[len(cubes) - 1] = c.index
        ball = CubeComplex(vertices, cubes)
        # remap cube projection to the ball's record indexing
        proj_by_key = {}
        for i, (dim, arr) in enumerate(cubes):
            proj_by_key[(dim, canonical_array(arr))] = cube_proj[i]
        cube_projection = {
            rec.index: proj_by_key[(rec.dim, canonical_array(rec.verts))]
            for rec in ball.cubes
        }
        return ball, projection, cube_projection, distances


@dataclass
class DevelopedBall:
    base_complex: CubeComplex
    basepoint: str
    radius: int
    ball: CubeComplex
    projection: dict
    cube_projection: dict
    distances: dict

    def interior_vertices(self):
        return {v for v, d in self.distances.items() if d < self.radius}

    def projects_isomorphically(self):
        """True when the covering projection is a bijection on cells."""
        base = self.base_complex
        if len(self.ball.vertices) != len(base.vertices):
            return False
        if len(set(self.projection.values())) != len(base.vertices):
            return False
        if len(self.ball.cubes) != len(base.cubes):
            return False
        return len(set(self.cube_projection.values())) == len(base.cubes)


def develop(complex, basepoint, radius):
    """The radius-r ball of the universal cover, with its projection."""
    flag, witness = complex.is_npc()
    if not flag:
        raise ValueError("development needs a nonpositively curved complex: %s" % (witness,))
    if not complex.has_vertex(basepoint):
        raise ValueError("unknown basepoint %r" % (basepoint,))
    if radius < 0:
        raise ValueError("radius must be non-negative")
    ball, projection, cube_projection, distances = _Development(
        complex, basepoint, radius
    ).run()
    return DevelopedBall(complex, basepoint, radius, ball, projection, cube_projection, distances)


def certify_simply_connected(complex, basepoint=None):
    """Certify that the complex equals its own universal cover.

    Develops a ball of radius (skeleton diameter + 1) and checks the
    projection is an isomorphism.
    """
    if not complex.is_connected():
        raise ValueError("certification needs a connected complex")
    if basepoint is None:
        basepoint = complex.vertices[0]
    d = complex.skeleton_diameter()
    ball = develop(complex, basepoint, d + 1)
    return ball.projects_isomorphically()


def double_cover_bipartite(complex):
    """The parity double cover of the 1-skeleton with all cubes lifted.

    Output has bipartite 1-skeleton; a bipartite input yields two disjoint
    copies.  Returns (cover, covering map).
    """
    from .special import CellularMap

    def nm(v, p):
        return "%s@%d" % (v, p)

    vertices = [nm(v, p) for v in complex.vertices for p in (0, 1)]
    cubes = []
    for c in complex.cubes:
        for p in (0, 1):
            arr = tuple(
                nm(c.verts[i], (p + bin(i).count("1")) % 2) for i in range(len(c.verts))
            )
            cubes.append((c.dim, arr))
    cover = CubeComplex(vertices, cubes)
    vmap = {nm(v, p): v for v in complex.vertices for p in (0, 1)}
    cmap = {}
    for i, c in enumerate(complex.cubes):
        cmap[2 * i] = c.index
        cmap[2 * i + 1] = c.index
    return cover, CellularMap(cover, complex, vmap, cmap)
