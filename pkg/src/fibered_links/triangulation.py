"""
Ideal triangulations, and the drilled-complement builder.

Tetrahedra have vertices 0..3; face ``k`` is the face opposite vertex ``k``.
``gluings[t][f] = (t2, perm)`` glues face ``f`` of tetrahedron ``t`` to face
``perm[f]`` of ``t2`` sending vertex ``v`` to ``perm[v]``.

Drilled complement
------------------
For a lift with winding 0 over a filling diagram with ``c`` crossings, the
4-valent graph ``G`` of the diagram has ``2c`` edges.  Over each edge the
vertical annulus, with the link arc collapsed to a point ``P`` and one
diagonal joining the other link points ``q_start``, ``q_end`` of the two
crossing fibres, splits into a lower and an upper ideal triangle.  Each
triangle is coned to the cusps of the two faces on either side of the
edge, giving ``2c * 2 * 2 = 8c`` tetrahedra labelled

    vertex 0: face cusp (apex), 1: P, 2: q_start, 3: q_end.

The lower triangle of an annulus holds the long arc of a crossing fibre
(the one avoiding the slab between the two strands) exactly when the
annulus strand is the over strand there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .curves import end_position, filling_check
from .lifts import LiftDiagram

Perm = Tuple[int, int, int, int]


class TriangulationError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * 4
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_compose(p: Perm, q: Perm) -> Perm:
    """``p ∘ q``."""
    return tuple(p[q[i]] for i in range(4))


def perm_sign(p: Perm) -> int:
    sign = 1
    p = list(p)
    for i in range(4):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class IdealTriangulation:
    """Face-paired tetrahedra with one label per ideal-vertex class.

    Cusp ``i`` labels the ``i``-th vertex class in order of first
    appearance when scanning ``(tet, vertex)`` lexicographically."""
    gluings: Tuple[Tuple[Optional[Tuple[int, Perm]], ...], ...]
    cusp_labels: Tuple[str, ...] = ()

    @property
    def num_tetrahedra(self) -> int:
        return len(self.gluings)

    def vertex_classes(self) -> List[List[Tuple[int, int]]]:
        parent = {}

        def find(u):
            parent.setdefault(u, u)
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for t, faces in enumerate(self.gluings):
            for f, g in enumerate(faces):
                for v in range(4):
                    find((t, v))
                if g is None:
                    continue
                t2, p = g
                for v in range(4):
                    if v != f:
                        a, b = find((t, v)), find((t2, p[v]))
                        if a != b:
                            parent[max(a, b)] = min(a, b)
        classes: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
        for t in range(self.num_tetrahedra):
            for v in range(4):
                classes.setdefault(find((t, v)), []).append((t, v))
        return sorted(classes.values())

    def cusp_of_vertex(self) -> Dict[Tuple[int, int], int]:
        return {tv: i for i, cls in enumerate(self.vertex_classes()) for tv in cls}

    def edge_classes(self) -> List[List[Tuple[int, Tuple[int, int]]]]:
        """Edge classes as cyclic lists of ``(tet, (i, j))`` around the edge."""
        seen = set()
        classes = []
        for t in range(self.num_tetrahedra):
            for i in range(4):
                for j in range(i + 1, 4):
                    if (t, (i, j)) in seen or (t, (j, i)) in seen:
                        continue
                    cycle = self.walk_edge(t, i, j)
                    for tt, (a, b) in cycle:
                        seen.add((tt, (a, b)))
                    classes.append(cycle)
        return classes

    def walk_edge(self, t, i, j):
        k, l = [v for v in range(4) if v not in (i, j)]
        start = (t, i, j, k, l)
        state = start
        cycle = []
        for _ in range(6 * self.num_tetrahedra + 1):
            t0, a, b, c, d = state
            cycle.append((t0, (a, b)))
            g = self.gluings[t0][d]
            if g is None:
                raise TriangulationError("unglued face %d of tetrahedron %d" % (d, t0))
            t1, p = g
            state = (t1, p[a], p[b], p[d], p[c])
            if state == start:
                return cycle
            if state[0] == t and {state[1], state[2]} == {i, j} and state[1] != i:
                raise TriangulationError("edge of tetrahedron %d identified with its reverse" % t)
            if (state[0], (state[1], state[2])) in cycle and state != start:
                # came back around with a different face order
                if state[1:3] == (i, j) and state[0] == t:
                    return cycle
                raise TriangulationError("inconsistent edge cycle at tetrahedron %d" % t)
        raise TriangulationError("edge walk did not close")


# ------------------------------------------------------------ validation

@dataclass
class ValidationReport:
    ok: bool
    num_tetrahedra: int
    num_edges: int
    num_cusps: int
    link_genera: List[int] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    def as_dict(self):
        return {
            "ok": self.ok,
            "T": self.num_tetrahedra,
            "E": self.num_edges,
            "cusps": self.num_cusps,
            "link_genera": self.link_genera,
            "failures": self.failures,
        }


def vertex_link_genera(t: IdealTriangulation) -> List[int]:
    """Genus of each vertex link, from its corner-triangle surface."""
    parent = {}

    def find(u):
        parent.setdefault(u, u)
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for tet, faces in enumerate(t.gluings):
        for f, (t2, p) in enumerate(faces):
            for v in range(4):
                if v == f:
                    continue
                for u in range(4):
                    if u in (v, f):
                        continue
                    a, b = find((tet, v, u)), find((t2, p[v], p[u]))
                    if a != b:
                        parent[a] = b
    genera = []
    for cls in t.vertex_classes():
        triangles = len(cls)
        edges = 3 * triangles // 2
        verts = len({find((tet, v, u)) for tet, v in cls for u in range(4) if u != v})
        chi = verts - edges + triangles
        genera.append((2 - chi) // 2)
    return genera


def validate(t: IdealTriangulation) -> ValidationReport:
    failures = []
    T = t.num_tetrahedra
    for tet, faces in enumerate(t.gluings):
        if len(faces) != 4:
            failures.append("tetrahedron %d does not have 4 faces" % tet)
            continue
        for f, g in enumerate(faces):
            if g is None:
                failures.append("unglued face %d of tetrahedron %d" % (f, tet))
                continue
            t2, p = g
            if sorted(p) != [0, 1, 2, 3] or not 0 <= t2 < T:
                failures.append("bad gluing at tetrahedron %d face %d" % (tet, f))
                continue
            if (t2, p[f]) == (tet, f):
                failures.append("face %d of tetrahedron %d glued to itself" % (f, tet))
            back = t.gluings[t2][p[f]] if len(t.gluings[t2]) == 4 else None
            if back is None or back[0] != tet or back[1] != perm_inverse(p):
                failures.append("gluing at tetrahedron %d face %d is not involutive" % (tet, f))
            if perm_sign(p) != -1:
                failures.append("gluing at tetrahedron %d face %d preserves orientation" % (tet, f))
    if failures:
        return ValidationReport(False, T, 0, 0, [], failures)
    try:
        edges = t.edge_classes()
    except TriangulationError as e:
        return ValidationReport(False, T, 0, 0, [], [str(e)])
    for cycle in edges:
        if len(cycle) < 3:
            failures.append("edge class of valence %d" % len(cycle))
    classes = t.vertex_classes()
    genera = vertex_link_genera(t)
    for i, g in enumerate(genera):
        if g != 1:
            failures.append("vertex link %d has genus %d" % (i, g))
    if len(edges) != T:
        failures.append("E = %d but T = %d" % (len(edges), T))
    if t.cusp_labels and len(t.cusp_labels) != len(classes):
        failures.append("%d cusp labels for %d vertex classes" % (len(t.cusp_labels), len(classes)))
    return ValidationReport(not failures, T, len(edges), len(classes), genera, failures)


# ------------------------------------------------------------ orientation

def orient(gluings) -> List[List[Tuple[int, Perm]]]:
    """Relabel tetrahedra (swap vertices 2 and 3) so every gluing is odd."""
    T = len(gluings)
    flip = [None] * T
    swap = (0, 1, 3, 2)
    for root in range(T):
        if flip[root] is not None:
            continue
        flip[root] = False
        stack = [root]
        while stack:
            t = stack.pop()
            for f, (t2, p) in enumerate(gluings[t]):
                want = (perm_sign(p) == 1) ^ flip[t]
                if flip[t2] is None:
                    flip[t2] = want
                    stack.append(t2)
                elif flip[t2] != want:
                    raise TriangulationError("triangulation is not orientable")
    out = []
    for t in range(T):
        row = [None] * 4
        for f, (t2, p) in enumerate(gluings[t]):
            q = p
            if flip[t]:
                q = perm_compose(q, swap)
            if flip[t2]:
                q = perm_compose(swap, q)
            ff = swap[f] if flip[t] else f
            row[ff] = (t2, q)
        out.append(row)
    return out


# ------------------------------------------------------------ builder

def face_label(face) -> str:
    dec = face.decoration
    if dec.kind == "puncture":
        return "puncture:%s" % face.canonical_key
    if dec.kind == "cone":
        return "cone:%d:%s" % (dec.order, face.canonical_key)
    return "disk:%s" % face.canonical_key


def build_drilled_complement(l: LiftDiagram) -> IdealTriangulation:
    d = l.base
    if any(w != 0 for w in l.winding.values()):
        raise TriangulationError("unsupported winding (v1)")
    rep = filling_check(d)
    if not (rep.is_filling and rep.is_taut):
        raise TriangulationError("lift must be filling and taut")

    face_of = {}
    for fi, face in enumerate(d.faces):
        for c in face.corners:
            face_of[c] = fi

    # edges of G: (component, start passage, end passage)
    edges = []
    end_owner = {}
    for name, word in d.components.items():
        n = len(word)
        for k in range(n):
            (x, s), (y, s2) = word[k], word[(k + 1) % n]
            r = end_position(d.crossings[x], s, "out")
            r2 = end_position(d.crossings[y], s2, "in")
            e = len(edges)
            edges.append({
                "component": name,
                0: (x, r, l.over[x] == s),    # start: crossing, position, strand over?
                1: (y, r2, l.over[y] == s2),  # end
            })
            end_owner[(x, r)] = (e, 0)
            end_owner[(y, r2)] = (e, 1)

    def side_corner(e, z, sigma):
        x, r, _ = edges[e][z]
        if z == 0:
            return (x, r) if sigma == 0 else (x, (r - 1) % 4)
        return (x, (r - 1) % 4) if sigma == 0 else (x, r)

    def neighbour_position(e, z, sigma):
        x, r, _ = edges[e][z]
        if (z == 0) == (sigma == 0):
            return (x, (r + 1) % 4)
        return (x, (r - 1) % 4)

    def holds_long(tri, e, z):
        return (tri == 0) == edges[e][z][2]

    def tet(e, tri, sigma):
        return 4 * e + 2 * tri + sigma

    T = 4 * len(edges)
    gluings = [[None] * 4 for _ in range(T)]
    ident = (0, 1, 2, 3)
    for e in range(len(edges)):
        for tri in (0, 1):
            for sigma in (0, 1):
                t = tet(e, tri, sigma)
                gluings[t][0] = (tet(e, tri, 1 - sigma), ident)
                gluings[t][1] = (tet(e, 1 - tri, sigma), ident)
                for z in (0, 1):
                    corner = side_corner(e, z, sigma)
                    e2, z2 = end_owner[neighbour_position(e, z, sigma)]
                    sigma2 = 0 if side_corner(e2, z2, 0) == corner else 1
                    if side_corner(e2, z2, sigma2) != corner:
                        raise TriangulationError("corner mismatch at edge %d" % e)
                    tri2 = tri if holds_long(tri, e, z) == holds_long(tri, e2, z2) else 1 - tri
                    q, opp = (2, 3) if z == 0 else (3, 2)
                    q2, opp2 = (2, 3) if z2 == 0 else (3, 2)
                    p = [0] * 4
                    p[0], p[1], p[q], p[opp] = 0, q2, 1, opp2
                    gluings[t][opp] = (tet(e2, tri2, sigma2), tuple(p))

    gluings = orient(gluings)
    tri = IdealTriangulation(tuple(tuple(row) for row in gluings))

    labels = []
    for cls in tri.vertex_classes():
        kinds = set()
        for t, v in cls:
            e, sigma = t // 4, t % 2
            if v == 0:
                kinds.add(face_label(d.faces[face_of[side_corner(e, 0, sigma)]]))
            else:
                kinds.add(None)
        if len(kinds) != 1:
            raise TriangulationError("mixed vertex class")
        label = kinds.pop()
        if label is None:
            label = _component_label(cls, edges, d)
        labels.append(label)
    return IdealTriangulation(tri.gluings, tuple(labels))


def _component_label(cls, edges, d):
    # vertex 1 of a tetrahedron is the collapsed arc of its own edge
    names = set()
    for t, v in cls:
        if v == 1:
            names.add(edges[t // 4]["component"])
    if len(names) != 1:
        raise TriangulationError("link vertex class spans %d components" % len(names))
    return "component:%s" % names.pop()


# ------------------------------------------------------------ file format

def write_tri(t: IdealTriangulation) -> str:
    out = ["tri v1", "ntet %d" % t.num_tetrahedra]
    for tet, faces in enumerate(t.gluings):
        for f, (t2, p) in enumerate(faces):
            out.append("glue %d %d %d %s" % (tet, f, t2, "".join(map(str, p))))
    for i, label in enumerate(t.cusp_labels):
        out.append("cusp %d %s" % (i, label))
    return "\n".join(out) + "\n"


_LABEL_KINDS = ("component", "disk", "cone", "puncture")


def parse_tri(text: str) -> IdealTriangulation:
    lines = [(n, raw.split("#", 1)[0].split()) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, toks) for n, toks in lines if toks]
    if not lines or lines[0][1] != ["tri", "v1"]:
        raise TriangulationError("missing 'tri v1' header", lines[0][0] if lines else 1)
    if len(lines) < 2 or len(lines[1][1]) != 2 or lines[1][1][0] != "ntet":
        raise TriangulationError("missing 'ntet <T>' line", lines[1][0] if len(lines) > 1 else 2)
    try:
        T = int(lines[1][1][1])
    except ValueError:
        raise TriangulationError("bad tetrahedron count", lines[1][0])
    gluings = [[None] * 4 for _ in range(T)]
    labels = {}
    last = lines[-1][0]
    for n, toks in lines[2:]:
        if toks[0] == "glue":
            if len(toks) != 5 or len(toks[4]) != 4 or not toks[4].isdigit():
                raise TriangulationError("expected 'glue <t> <f> <t2> <perm>'", n)
            try:
                t, f, t2 = int(toks[1]), int(toks[2]), int(toks[3])
            except ValueError:
                raise TriangulationError("bad integers in glue line", n)
            p = tuple(int(ch) for ch in toks[4])
            if sorted(p) != [0, 1, 2, 3] or not (0 <= t < T and 0 <= t2 < T and 0 <= f < 4):
                raise TriangulationError("bad gluing", n)
            if gluings[t][f] is not None:
                raise TriangulationError("face %d of tetrahedron %d glued twice" % (f, t), n)
            gluings[t][f] = (t2, p)
        elif toks[0] == "cusp":
            if len(toks) != 3 or not toks[1].isdigit():
                raise TriangulationError("expected 'cusp <index> <label>'", n)
            if toks[2].split(":", 1)[0] not in _LABEL_KINDS:
                raise TriangulationError("unknown cusp label %r" % toks[2], n)
            labels[int(toks[1])] = toks[2]
        else:
            raise TriangulationError("unknown keyword %r" % toks[0], n)
    for t in range(T):
        for f in range(4):
            if gluings[t][f] is None:
                raise TriangulationError(
                    "unexpected end of file: face %d of tetrahedron %d unglued" % (f, t), last)
    for t in range(T):
        for f in range(4):
            t2, p = gluings[t][f]
            back = gluings[t2][p[f]]
            if back is None or back != (t, perm_inverse(p)):
                raise TriangulationError(
                    "gluing of tetrahedron %d face %d is not involutive" % (t, f), last)
    if sorted(labels) != list(range(len(labels))):
        raise TriangulationError("cusp indices must be 0..n-1", last)
    return IdealTriangulation(tuple(tuple(r) for r in gluings),
                              tuple(labels[i] for i in range(len(labels))))


def to_snappea(t: IdealTriangulation, name="fibered_links") -> str:
    """SnapPea triangulation text, for handing the cusped manifold to
    external tools (e.g. to Dehn fill the drilled fibres)."""
    cusp = t.cusp_of_vertex()
    n = len(t.vertex_classes())
    out = ["% Triangulation", name, "not_attempted 0.0", "oriented_manifold",
           "CS_unknown", "", "%d 0" % n]
    out += ["    torus   0.000000000000   0.000000000000"] * n
    out += ["", "%d" % t.num_tetrahedra]
    zeros = " ".join(["0"] * 16)
    for tet, faces in enumerate(t.gluings):
        out.append(" ".join("%4d" % t2 for t2, _ in faces))
        out.append(" " + " ".join("".join(map(str, p)) for _, p in faces))
        out.append(" ".join("%4d" % cusp[(tet, v)] for v in range(4)))
        out += [zeros] * 4
        out += ["0.0 0.0", ""]
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ fixtures

FIGURE_EIGHT = """\
tri v1
ntet 2
glue 0 0 1 0132
glue 0 1 1 1230
glue 0 2 1 2310
glue 0 3 1 2103
glue 1 0 0 0132
glue 1 1 0 3201
glue 1 2 0 3012
glue 1 3 0 2103
cusp 0 component:K
"""

# Whitehead link: four quarters of the regular ideal octahedron, each
# labelled so that its edge 01 carries the shape i.
WHITEHEAD = None  # filled in below


def _relabel_tets(gluings, relabel):
    """Apply vertex relabellings ``relabel[t]`` (old vertex -> new vertex)."""
    out = []
    for t, faces in enumerate(gluings):
        row = [None] * 4
        for f, (t2, p) in enumerate(faces):
            q = perm_compose(relabel[t2], perm_compose(p, perm_inverse(relabel[t])))
            row[relabel[t][f]] = (t2, q)
        out.append(tuple(row))
    return tuple(out)


def _whitehead():
    raw = [
        ((1, "0132"), (2, "0132"), (3, "0132"), (1, "3201")),
        ((0, "0132"), (0, "2310"), (3, "3120"), (2, "3120")),
        ((1, "3120"), (0, "0132"), (3, "0213"), (3, "3120")),
        ((2, "3120"), (2, "0213"), (1, "3120"), (0, "0132")),
    ]
    gl = tuple(tuple((t2, tuple(int(ch) for ch in p)) for t2, p in row) for row in raw)
    # census shapes at edge 01 are 1+i, (1+i)/2, (1+i)/2, (1+i)/2, so i sits
    # on edge 02 of the first tetrahedron and on edge 03 of the others;
    # even relabellings move that edge to 01
    from_02 = (0, 3, 1, 2)
    from_03 = (0, 2, 3, 1)
    relabel = [from_02, from_03, from_03, from_03]
    return write_tri(IdealTriangulation(_relabel_tets(gl, relabel),
                                        ("component:K1", "component:K2")))


def figure_eight() -> IdealTriangulation:
    return parse_tri(FIGURE_EIGHT)


def whitehead() -> IdealTriangulation:
    return parse_tri(WHITEHEAD)


WHITEHEAD = _whitehead()
