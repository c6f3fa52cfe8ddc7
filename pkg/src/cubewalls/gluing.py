"""Exact integer balance systems for wall gluing, and their solutions.

The balance system has one variable per piece template and one row per
orbit of (edge, wall-class) pairs; a row asserts that the weighted count
of templates continuing on the + side equals the count on the - side.
Solving means finding a non-negative, non-zero integer kernel vector.
All arithmetic is exact (fractions.Fraction); no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .coloring import class_of_wall, enumerate_colorings


class SolverError(ValueError):
    pass


class PartitionError(ValueError):
    pass


# -- exact sparse linear algebra ---------------------------------------------


def _to_sparse_rows(matrix):
    rows = []
    for row in matrix:
        if isinstance(row, dict):
            rows.append({c: Fraction(v) for c, v in row.items() if v})
        else:
            rows.append({c: Fraction(v) for c, v in enumerate(row) if v})
    return rows


def rational_kernel_basis(matrix, ncols):
    """Exact kernel basis via sparse fraction Gaussian elimination.

    Basis vectors correspond to free columns in ascending order; each is a
    tuple of Fractions of length ncols.
    """
    pivot_of_col = {}
    for r in _to_sparse_rows(matrix):
        row = dict(r)
        while row:
            c = min(row)
            if c in pivot_of_col:
                prow = pivot_of_col[c]
                factor = row[c]
                for cc, vv in prow.items():
                    nv = row.get(cc, Fraction(0)) - factor * vv
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
            else:
                inv = row[c]
                pivot_of_col[c] = {cc: vv / inv for cc, vv in row.items()}
                break
    for c in sorted(pivot_of_col, reverse=True):
        prow = pivot_of_col[c]
        for c2, row2 in pivot_of_col.items():
            if c2 == c or c not in row2:
                continue
            factor = row2[c]
            for cc, vv in prow.items():
                nv = row2.get(cc, Fraction(0)) - factor * vv
                if nv:
                    row2[cc] = nv
                else:
                    row2.pop(cc, None)
    free = [c for c in range(ncols) if c not in pivot_of_col]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for pc, prow in pivot_of_col.items():
            if fc in prow:
                vec[pc] = -prow[fc]
        basis.append(tuple(vec))
    return basis


def _dot(row, vec):
    return sum((Fraction(v) * vec[c] for c, v in row.items()), Fraction(0))


def _proportional(a, b):
    """Whether vectors a, b (same length) are rational multiples of each other."""
    ratio = None
    for x, y in zip(a, b):
        if x == 0 and y == 0:
            continue
        if x == 0 or y == 0:
            return False
        r = Fraction(x) / Fraction(y)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def _extreme_ray(rows, ncols, start):
    """Shrink a non-negative kernel point onto an extreme ray of the cone
    {x in ker A : x >= 0}, deterministically."""
    x = [Fraction(v) for v in start]
    while True:
        support = [j for j in range(ncols) if x[j] != 0]
        colmap = {c: i for i, c in enumerate(support)}
        sub = []
        for row in rows:
            r = {colmap[c]: v for c, v in row.items() if c in support}
            if r:
                sub.append(r)
        basis = rational_kernel_basis(sub, len(support))
        xr = [x[j] for j in support]
        direction = None
        for b in basis:
            if not _proportional(list(b), xr):
                direction = list(b)
                break
        if direction is None:
            return x
        if any(v > 0 for v in direction):
            t = min(xr[i] / direction[i] for i in range(len(support)) if direction[i] > 0)
            new = [xr[i] - t * direction[i] for i in range(len(support))]
        else:
            t = min(xr[i] / -direction[i] for i in range(len(support)) if direction[i] < 0)
            new = [xr[i] + t * direction[i] for i in range(len(support))]
        x = [Fraction(0)] * ncols
        for i, j in enumerate(support):
            x[j] = new[i]


@dataclass(frozen=True)
class KernelSolution:
    vector: tuple             # non-negative integers
    support: tuple            # indices of the non-zero entries

    def __iter__(self):
        return iter(self.vector)

    def __len__(self):
        return len(self.vector)

    def __getitem__(self, i):
        return self.vector[i]


def nonneg_integer_kernel(matrix, hint):
    """A non-negative, non-zero integer kernel vector, derived from the hint.

    The hint must itself be an exact non-negative, non-zero rational kernel
    point (checked; error otherwise).  Zero entries of the hint stay zero.
    The hint is purified onto a canonical extreme ray of the non-negative
    kernel cone, then denominators are cleared.
    """
    rows = _to_sparse_rows(matrix)
    hint = [Fraction(v) for v in hint]
    ncols = len(hint)
    if all(v == 0 for v in hint):
        raise SolverError("hint is the zero vector")
    if any(v < 0 for v in hint):
        raise SolverError("hint has a negative entry")
    for i, row in enumerate(rows):
        if _dot(row, hint) != 0:
            raise SolverError("hint is not in the kernel (row %d)" % i)
    x = _extreme_ray(rows, ncols, hint)
    denom = lcm(*[v.denominator for v in x]) if x else 1
    ints = [int(v * denom) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    for i, row in enumerate(rows):
        if sum(v * ints[c] for c, v in row.items()) != 0:
            raise AssertionError("solver output fails exact verification (row %d)" % i)
    if all(v == 0 for v in ints) or any(v < 0 for v in ints):
        raise AssertionError("solver output is not a non-negative non-zero vector")
    return KernelSolution(tuple(ints), tuple(i for i, v in enumerate(ints) if v))


# -- the seed vector from an invariant measure --------------------------------


@dataclass(frozen=True)
class RationalVector:
    entries: tuple
    labels: tuple = None

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def seed_alpha(measure, anchors, stabilizer_orders):
    """Seed multiplicities: per (anchor, class), class mass over stabiliser order.

    `anchors` is a sequence of (anchor, classes) with the classes expected
    to partition the measure's support; `stabilizer_orders` maps each
    anchor to the order of its stabiliser.
    """
    support = measure.support()
    entries = []
    labels = []
    for anchor, classes in anchors:
        for c in support:
            hits = [cls for cls in classes if cls.contains(c)]
            if len(hits) != 1:
                raise PartitionError(
                    "colouring %s lies in %d classes at anchor %r"
                    % (c.colors, len(hits), anchor)
                )
        order = stabilizer_orders[anchor]
        for cls in classes:
            entries.append(measure.class_mass(cls) / order)
            labels.append((anchor, cls.pattern))
    vec = RationalVector(tuple(entries), tuple(labels))
    if all(v == 0 for v in vec.entries):
        raise PartitionError("classes carry no mass; partition cannot be exhaustive")
    return vec


# -- the balance system --------------------------------------------------------


@dataclass(frozen=True)
class PieceTemplate:
    """A one-vertex piece template: an anchor vertex with a colouring class."""

    anchor: str
    coloring: object          # representative WallColoring
    vertex_class: object      # ColoringClass at the anchor


@dataclass
class SystemRow:
    key: tuple                # (edge record index, wall-class pattern)
    plus: dict                # variable index -> non-negative integer coefficient
    minus: dict
    stabilizer_order: int

    def net(self):
        out = dict(self.plus)
        for c, v in self.minus.items():
            out[c] = out.get(c, 0) - v
            if not out[c]:
                del out[c]
        return out


@dataclass
class GluingSystem:
    variables: tuple          # (anchor, class pattern) labels
    rows: list                # SystemRow per (edge, class) orbit representative

    def matrix(self):
        return [r.net() for r in self.rows]

    def evaluate(self, multiplicities, side):
        out = {}
        for r in self.rows:
            coeffs = r.plus if side == "+" else r.minus
            out[r.key] = sum(coeffs.get(i, 0) * m for i, m in enumerate(multiplicities))
        return out

    def balanced(self, multiplicities):
        plus = self.evaluate(multiplicities, "+")
        minus = self.evaluate(multiplicities, "-")
        return all(plus[k] == minus[k] for k in plus)


def build_system(templates, action, sides):
    """Rows of the balance system over orbit representatives of (edge, class).

    `sides` supplies the equivariant +/- vertex sets per wall.  Coefficients
    count, per template, the group elements carrying the template's anchor
    onto the corresponding endpoint with matching transported class.
    """
    if not templates:
        return GluingSystem((), [])
    gamma = templates[0].coloring.graph
    cx, walls = gamma.complex, gamma.walls
    elements = action.elements
    vmaps = [action.vertex_map(el) for el in elements]
    cmaps = [action.cube_map(el) for el in elements]
    wperms = _wall_perms(action, walls)
    inv_cmaps = [{v: k for k, v in cm.items()} for cm in cmaps]

    proper = enumerate_colorings(gamma, gamma.max_degree + 1)

    # orbit representatives of (edge record, wall-class pattern)
    keys = {}
    for e in cx.edges:
        wid = walls.wall_of_edge[e.index]
        for c in proper:
            cls = class_of_wall(c, wid)
            keys[(e.index, cls.pattern)] = True
    reps = []
    seen = set()
    for key in sorted(keys):
        if key in seen:
            continue
        orbit = _class_orbit(key, cmaps, wperms)
        seen |= orbit
        reps.append(min(orbit))

    rows = []
    for (fidx, pattern) in reps:
        f = cx.cubes[fidx]
        hs = sides[walls.wall_of_edge[fidx]]
        x_plus = f.verts[0] if f.verts[0] in hs.plus else f.verts[1]
        x_minus = f.verts[1] if x_plus == f.verts[0] else f.verts[0]
        stab = sum(
            1
            for g in range(len(elements))
            if cmaps[g][fidx] == fidx
            and tuple(sorted((wperms[g][v], c) for v, c in pattern)) == pattern
        )
        plus = {}
        minus = {}
        for t_index, t in enumerate(templates):
            for g in range(len(elements)):
                e_l = inv_cmaps[g][fidx]
                el_rec = cx.cubes[e_l]
                if t.anchor not in el_rec.verts:
                    continue
                wid = walls.wall_of_edge[e_l]
                cls = class_of_wall(t.coloring, wid)
                transported = tuple(
                    sorted((wperms[g][v], c) for v, c in cls.pattern)
                )
                if transported != pattern:
                    continue
                if vmaps[g][t.anchor] == x_plus:
                    plus[t_index] = plus.get(t_index, 0) + 1
                elif vmaps[g][t.anchor] == x_minus:
                    minus[t_index] = minus.get(t_index, 0) + 1
        rows.append(SystemRow((fidx, pattern), plus, minus, stab))
    labels = tuple((t.anchor, t.vertex_class.pattern) for t in templates)
    return GluingSystem(labels, rows)


def _wall_perms(action, walls):
    from .coloring import induced_wall_permutations

    return induced_wall_permutations(action, walls)


def _class_orbit(key, cmaps, wperms):
    orbit = {key}
    frontier = [key]
    while frontier:
        nxt = []
        for (fidx, pattern) in frontier:
            for g in range(len(cmaps)):
                image = (
                    cmaps[g][fidx],
                    tuple(sorted((wperms[g][v], c) for v, c in pattern)),
                )
                if image not in orbit:
                    orbit.add(image)
                    nxt.append(image)
        frontier = nxt
    return orbit


# -- text formats ---------------------------------------------------------------


def parse_matrix(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([int(tok) for tok in line.split()])
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def parse_vector(text):
    out = []
    for tok in text.split():
        if "/" in tok:
            p, q = tok.split("/")
            out.append(Fraction(int(p), int(q)))
        else:
            out.append(Fraction(int(tok)))
    return out
