"""
Lifts of multi-curves into a circle bundle over the surface.

A lift is a curve diagram plus, for each crossing, the slot whose strand
is higher in the fibre, and for each component an integer fibre winding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .curves import (
    DISK, PUNCTURE, CurveDiagram, DiagramError, _content_lines, end_position,
    filling_check, genus, other_slot, parse_curve_lines, write_diagram,
)


class LiftError(DiagramError):
    pass


@dataclass(frozen=True, eq=False)
class LiftDiagram:
    base: CurveDiagram
    over: Dict[str, str]
    winding: Dict[str, int]

    def __post_init__(self):
        over = dict(self.over)
        winding = dict(self.winding)
        for x in self.base.crossings:
            if x not in over:
                raise LiftError("crossing %s missing from over map" % x)
        for x, slot in over.items():
            if x not in self.base.crossings:
                raise LiftError("over map names unknown crossing %s" % x)
            if slot not in ("a", "b"):
                raise LiftError("over slot for %s must be a or b" % x)
        for name in winding:
            if name not in self.base.components:
                raise LiftError("unknown component %s in winding" % name)
        for name in self.base.components:
            winding.setdefault(name, 0)
        object.__setattr__(self, "over", over)
        object.__setattr__(self, "winding", winding)

    def __eq__(self, other):
        if not isinstance(other, LiftDiagram):
            return NotImplemented
        return (self.base == other.base and self.over == other.over
                and self.winding == other.winding)

    def __hash__(self):
        return hash(self.base)

    def is_over(self, passage) -> bool:
        x, slot = passage
        return self.over[x] == slot

    def flipped(self, crossings=None) -> "LiftDiagram":
        crossings = self.base.crossings if crossings is None else crossings
        over = {x: (other_slot(s) if x in crossings else s) for x, s in self.over.items()}
        return LiftDiagram(self.base, over, self.winding)


def attach_lift(d: CurveDiagram, over, winding=None) -> LiftDiagram:
    winding = {} if winding is None else dict(winding)
    for name in winding:
        if name not in d.components:
            raise LiftError("unknown component %s in winding" % name)
    return LiftDiagram(d, dict(over), winding)


def is_alternating(l: LiftDiagram) -> bool:
    for word in l.base.components.values():
        flags = [l.is_over(p) for p in word]
        n = len(flags)
        if any(flags[k] == flags[(k + 1) % n] for k in range(n)):
            return False
    return True


def make_alternating(l: LiftDiagram) -> Optional[LiftDiagram]:
    """Change crossings so the lift alternates; ``None`` if impossible.

    Each component contributes one unknown bit (is its first passage over).
    A crossing whose passages sit at indices ``i`` and ``j`` forces the two
    bits to differ by ``1 + i + j`` mod 2; this is a parity-constrained
    graph colouring solved by breadth-first search.  Roots keep the
    original over/under of their first passage so alternating input comes
    back unchanged.
    """
    d = l.base
    where = {}
    for name, word in d.components.items():
        if len(word) % 2:
            return None
        for k, p in enumerate(word):
            where[p] = (name, k)
    adj = {name: [] for name in d.components}
    for x in d.crossings:
        (ca, ia), (cb, ib) = where[(x, "a")], where[(x, "b")]
        parity = (1 + ia + ib) % 2
        adj[ca].append((cb, parity))
        adj[cb].append((ca, parity))
    bit = {}
    for root in d.components:
        if root in bit:
            continue
        bit[root] = int(l.is_over(d.components[root][0]))
        queue = [root]
        while queue:
            u = queue.pop()
            for v, parity in adj[u]:
                want = bit[u] ^ parity
                if v not in bit:
                    bit[v] = want
                    queue.append(v)
                elif bit[v] != want:
                    return None
    over = {}
    for x in d.crossings:
        name, k = where[(x, "a")]
        a_is_over = bit[name] ^ (k % 2)
        over[x] = "a" if a_is_over else "b"
    return LiftDiagram(d, over, l.winding)


# ------------------------------------------------------------ twist family

def twist_word(n: int):
    """Gauss code of the n-th member of the twist family.

    On the torus cut along a simple closed curve ``s`` into an annulus,
    ``γ_n`` consists of two straight arcs: ``α`` from ``(0, 0)`` to
    ``(1/2, 1)`` and ``β`` from ``(1/2, 0)`` to ``(-2n, 1)``.  Each pair of
    twists of ``β`` along ``s`` adds two crossings to the block, so the
    member has ``2n + 1`` crossings, all positive, met in the same order
    along both arcs.  The base ``n = 0`` is the one-crossing loop
    ``α ∪ β`` which does not fill.
    """
    c = 2 * n + 1
    crossings = {str(i): 1 for i in range(1, c + 1)}
    word = tuple((str(i), "a") for i in range(1, c + 1)) + \
        tuple((str(i), "b") for i in range(1, c + 1))
    return crossings, {"g": word}


def _puncture_bigon(faces):
    bigons = [f.canonical_key for f in faces if len(f) == 2]
    return {f.canonical_key: (PUNCTURE if f.canonical_key == bigons[0] else DISK)
            for f in faces}


def gen_twist_family(n: int) -> LiftDiagram:
    if n < 1:
        raise ValueError("twist family index must be >= 1")
    crossings, components = twist_word(n)
    base = CurveDiagram.decorated(crossings, components, _puncture_bigon)
    over = {x: ("a" if int(x) % 2 else "b") for x in crossings}
    return LiftDiagram(base, over, {"g": 0})


def family_index(l: LiftDiagram) -> int:
    """Recover ``n`` from a lift produced by :func:`gen_twist_family`."""
    c = len(l.base.crossings)
    if c % 2 == 0 or c < 3:
        raise LiftError("input not from the twist family")
    n = (c - 1) // 2
    if l != gen_twist_family(n):
        raise LiftError("input not from the twist family")
    return n


def add_puncture(l: LiftDiagram, face_key=None) -> LiftDiagram:
    """Puncture one more plain face (default: the largest, then smallest key)."""
    plain = [f for f in l.base.faces if f.decoration.kind == "disk"]
    if not plain:
        raise LiftError("no plain face left to puncture")
    if face_key is None:
        face_key = min(plain, key=lambda f: (-len(f), f.canonical_key)).canonical_key
    decorations = dict(l.base.decorations)
    if decorations.get(face_key) != DISK:
        raise LiftError("face %s is not a plain disk" % face_key)
    decorations[face_key] = PUNCTURE
    return LiftDiagram(l.base.with_decorations(decorations), l.over, l.winding)


# ------------------------------------------------------------ star sum

def _relabel(l: LiftDiagram, tag: str, start: int):
    ids = {x: str(start + i) for i, x in enumerate(l.base.crossings)}
    crossings = {ids[x]: s for x, s in l.base.crossings.items()}
    components = {"%s%s" % (tag, n): tuple((ids[x], s) for x, s in w)
                  for n, w in l.base.components.items()}
    over = {ids[x]: s for x, s in l.over.items()}
    return ids, crossings, components, over


def _punctured_faces(l: LiftDiagram):
    return [f for f in l.base.faces if f.decoration.kind == "puncture"]


def _check_star_input(l: LiftDiagram, name: str, punctures: int):
    rep = filling_check(l.base)
    if not (rep.is_filling and rep.is_taut and is_alternating(l)):
        raise LiftError("%s must be filling, taut and alternating" % name)
    if len(_punctured_faces(l)) < punctures:
        raise LiftError("%s needs at least %d punctured faces" % (name, punctures))
    if any(w != 0 for w in l.winding.values()):
        raise LiftError("%s has nonzero winding" % name)


def _out_edges(d: CurveDiagram, face):
    """Passages ``(name, k)`` whose outgoing edge the face runs along forwards."""
    comp_of = {}
    for name, word in d.components.items():
        for k, (x, s) in enumerate(word):
            comp_of[(x, end_position(d.crossings[x], s, "out"))] = (name, k)
    return [comp_of[c] for c in face.corners if c in comp_of]


def star_sum(l1: LiftDiagram, l2: LiftDiagram) -> LiftDiagram:
    """Band-sum two alternating filling lifts across a glued puncture.

    The punctured face ``f1`` of ``l1`` and ``f2`` of ``l2`` (smallest
    canonical keys) are glued along their puncture circles, and one edge
    of each on those faces is joined by a band.  The two glued faces merge
    into one plain disk; the faces across the two cut edges merge through
    the band.  If the band breaks alternation, every crossing of ``l2`` is
    switched.
    """
    _check_star_input(l1, "l1", 1)
    _check_star_input(l2, "l2", 2)
    f1 = _punctured_faces(l1)[0]
    f2 = _punctured_faces(l2)[0]
    ids1, cr1, comp1, over1 = _relabel(l1, "L", 1)
    ids2, cr2, comp2, over2 = _relabel(l2, "R", len(cr1) + 1)
    crossings = {**cr1, **cr2}
    g1, g2 = genus(l1.base), genus(l2.base)
    decor1 = {tuple(_rekey(k, ids1)): v for k, v in l1.base.decorations.items()}
    decor2 = {tuple(_rekey(k, ids2)): v for k, v in l2.base.decorations.items()}
    key1, key2 = _rekey(f1.canonical_key, ids1), _rekey(f2.canonical_key, ids2)

    for n1, k1 in _out_edges(l1.base, f1):
        for n2, k2 in _out_edges(l2.base, f2):
            w1, w2 = comp1["L" + n1], comp2["R" + n2]
            # w1 = [.. P, Q ..] with P at k1; w2 = [.. R, S ..] with R at k2
            a = w1[k1 + 1:] + w1[:k1 + 1]      # Q ... P
            b = w2[k2 + 1:] + w2[:k2 + 1]      # S ... R
            components = {n: w for n, w in {**comp1, **comp2}.items()
                          if n not in ("L" + n1, "R" + n2)}
            components["L%s.R%s" % (n1, n2)] = a + b
            try:
                result = _decorate_star(crossings, components, decor1, decor2, key1, key2)
            except (DiagramError, _Retry):
                continue
            if genus(result) != g1 + g2:
                continue
            lift = LiftDiagram(result, {**over1, **over2},
                               {n: 0 for n in components})
            if not is_alternating(lift):
                lift = lift.flipped(cr2)
            rep = filling_check(result)
            if rep.is_filling and rep.is_taut and is_alternating(lift):
                return lift
    raise LiftError("no band splice produced a filling alternating diagram")


class _Retry(Exception):
    pass


def _rekey(key, ids):
    parts = []
    for label in key.split("-"):
        x, q = label.rsplit(".", 1)
        parts.append((ids[x], int(q)))
    return parts


def _decorate_star(crossings, components, decor1, decor2, key1, key2):
    """Decorate the spliced diagram from the decorations of its parents.

    Every new face is a union of old faces (by corners).  The two glued
    punctured faces must merge into exactly one plain face; any other new
    face may absorb at most one non-plain old face."""
    owner = {}
    for table in (decor1, decor2):
        for i, (corners, dec) in enumerate(table.items()):
            for c in corners:
                owner[c] = (id(table), i, dec)
    glued = set(key1) | set(key2)

    def rule(faces):
        out = {}
        merged = 0
        for f in faces:
            corners = set(f.corners)
            if corners & glued:
                if corners != glued:
                    raise _Retry()
                merged += 1
                out[f.canonical_key] = DISK
                continue
            olds = {owner[c] for c in corners}
            special = [dec for _, _, dec in olds if dec != DISK]
            if len(special) > 1:
                raise _Retry()
            out[f.canonical_key] = special[0] if special else DISK
        if merged != 1:
            raise _Retry()
        return out

    return CurveDiagram.decorated(crossings, components, rule)


# ------------------------------------------------------------ pants arcs

def export_pants_arcs(member: LiftDiagram):
    """Arcs of a twist-family member in the pants ``Σ_{1,1}`` cut along ``s``.

    Boundary 1 is the bottom copy of ``s``, boundary 2 the top copy and
    boundary 3 the puncture, which sits in the bigon face just above ``s``
    between the starts of ``α`` and ``β``.  Each arc crosses the annulus
    from boundary 1 to boundary 2; its word is read off from where it
    passes the lifts of the puncture (see :func:`arc_word_in_strip`).
    """
    from .bounds import PantsArcs

    n = family_index(member)
    c = 2 * n + 1
    puncture = (Fraction(1, 4), Fraction(1, 8 * c))
    arcs = [
        (1, 2, arc_word_in_strip((Fraction(0), Fraction(1, 2)), puncture)),
        (1, 2, arc_word_in_strip((Fraction(1, 2), Fraction(-2 * n)), puncture)),
    ]
    return PantsArcs([("s", arcs)])


def arc_word_in_strip(ends, puncture) -> str:
    """Word of a straight arc across the once-punctured annulus.

    The annulus is ``R/Z × [0, 1]`` with basepoint at the bottom of
    ``x = 0``; ``A`` runs once along the bottom boundary in the positive
    direction and ``B`` once along the top boundary in the negative
    direction, so ``AB`` encircles the puncture.  An arc from ``(x0, 0)``
    to ``(x1, 1)`` that passes the puncture's height at ``t`` has word
    ``A^(j+1) B^(j+1)`` with ``j = floor(t - px)``.
    """
    x0, x1 = ends
    px, py = puncture
    t = x0 + (x1 - x0) * py
    j = (t - px).__floor__()
    e = j + 1
    if e >= 0:
        return "A" * e + "B" * e
    return "a" * (-e) + "b" * (-e)


# ------------------------------------------------------------ file format

def parse_lift(text: str) -> LiftDiagram:
    crossings, components, decorations, rest = parse_curve_lines(_content_lines(text))
    over, winding = {}, {}
    for lineno, tokens in rest:
        if tokens[0] == "over":
            if len(tokens) != 3 or tokens[2] not in ("a", "b"):
                raise LiftError("expected 'over <crossing> <a|b>'", lineno)
            over[tokens[1]] = tokens[2]
        elif tokens[0] == "winding":
            if len(tokens) != 3:
                raise LiftError("expected 'winding <component> <integer>'", lineno)
            try:
                winding[tokens[1]] = int(tokens[2])
            except ValueError:
                raise LiftError("bad winding %r" % tokens[2], lineno)
        else:
            raise LiftError("unknown keyword %r" % tokens[0], lineno)
    return attach_lift(CurveDiagram(crossings, components, decorations), over, winding)


def write_lift(l: LiftDiagram) -> str:
    lines = [write_diagram(l.base).rstrip("\n")]
    for x in l.base.crossings:
        lines.append("over %s %s" % (x, l.over[x]))
    for name in l.base.components:
        lines.append("winding %s %d" % (name, l.winding[name]))
    return "\n".join(lines) + "\n"
