"""
Combinatorial multi-curves on surfaces and orbifolds.

A multi-curve is stored as a signed Gauss code with a ribbon structure:

* every crossing has two strands, slot ``a`` and slot ``b``, and a sign;
* every component is a cyclic word of passages ``(crossing, slot)``;
* every complementary face carries a decoration (plain disk, punctured
  disk or disk with one cone point).

The ends of the four half-edges at a crossing are numbered by their
counterclockwise position.  At a ``+1`` crossing the order is
``(a-in, b-in, a-out, b-out)``, at a ``-1`` crossing it is
``(a-in, b-out, a-out, b-in)``.  Quadrant ``q`` is the corner between the
ends in positions ``q`` and ``q + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

Passage = Tuple[str, str]
Corner = Tuple[str, int]

SLOTS = ("a", "b")

ROTATION = {
    1: (("a", "in"), ("b", "in"), ("a", "out"), ("b", "out")),
    -1: (("a", "in"), ("b", "out"), ("a", "out"), ("b", "in")),
}


class DiagramError(ValueError):
    """Raised for malformed or inconsistent curve diagrams."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def other_slot(slot: str) -> str:
    return "b" if slot == "a" else "a"


def end_position(sign: int, slot: str, direction: str) -> int:
    return ROTATION[sign].index((slot, direction))


@dataclass(frozen=True)
class Decoration:
    kind: str  # 'disk' | 'puncture' | 'cone'
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("disk", "puncture", "cone"):
            raise DiagramError("unknown face decoration %r" % self.kind)
        if self.kind == "cone" and self.order < 2:
            raise DiagramError("cone order must be >= 2, got %d" % self.order)
        if self.kind != "cone" and self.order != 0:
            raise DiagramError("only cone faces carry an order")

    def euler_defect(self) -> Fraction:
        if self.kind == "puncture":
            return Fraction(1)
        if self.kind == "cone":
            return 1 - Fraction(1, self.order)
        return Fraction(0)

    def __str__(self):
        return "cone %d" % self.order if self.kind == "cone" else self.kind


DISK = Decoration("disk")
PUNCTURE = Decoration("puncture")


def corner_label(corner: Corner) -> str:
    return "%s.%d" % corner


def canonical_rotation(corners: Sequence[Corner]) -> Tuple[Corner, ...]:
    labels = [corner_label(c) for c in corners]
    n = len(labels)
    best = min(range(n), key=lambda i: labels[i:] + labels[:i])
    return tuple(corners[best:]) + tuple(corners[:best])


@dataclass(frozen=True)
class Face:
    corners: Tuple[Corner, ...]
    decoration: Optional[Decoration] = None

    @property
    def canonical_key(self) -> str:
        return "-".join(corner_label(c) for c in self.corners)

    def __len__(self):
        return len(self.corners)


def _check_structure(crossings, components):
    if not crossings:
        raise DiagramError("diagram has no crossings")
    seen = {}
    for name, word in components.items():
        if not word:
            raise DiagramError("component %s has no passages" % name)
        for x, slot in word:
            if x not in crossings:
                raise DiagramError("passage %s%s refers to an unknown crossing" % (x, slot))
            if slot not in SLOTS:
                raise DiagramError("bad slot %r" % slot)
            if (x, slot) in seen:
                raise DiagramError("duplicate passage %s%s" % (x, slot))
            seen[(x, slot)] = name
    for x in crossings:
        used = sum((x, s) in seen for s in SLOTS)
        if used != 2:
            raise DiagramError(
                "crossing %s referenced by %d passages, expected 2" % (x, used))
    # connectivity of the 4-valent graph
    parent = {name: name for name in components}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for x in crossings:
        parent[find(seen[(x, "a")])] = find(seen[(x, "b")])
    if len({find(n) for n in components}) > 1:
        raise DiagramError("diagram is disconnected")


def edge_involution(crossings: Mapping[str, int],
                    components: Mapping[str, Sequence[Passage]]) -> Dict[Corner, Corner]:
    """Pair up the half-edge ends ``(crossing, position)`` joined by an edge."""
    iota = {}
    for word in components.values():
        n = len(word)
        for k in range(n):
            x, s = word[k]
            y, t = word[(k + 1) % n]
            out_end = (x, end_position(crossings[x], s, "out"))
            in_end = (y, end_position(crossings[y], t, "in"))
            iota[out_end] = in_end
            iota[in_end] = out_end
    return iota


def _trace(crossings, components) -> List[Tuple[Corner, ...]]:
    iota = edge_involution(crossings, components)
    seen = set()
    faces = []
    for start in sorted(iota, key=corner_label):
        if start in seen:
            continue
        face = []
        c = start
        while c not in seen:
            seen.add(c)
            face.append(c)
            y, p = iota[c]
            c = (y, (p - 1) % 4)
        faces.append(canonical_rotation(face))
    faces.sort(key=lambda f: [corner_label(c) for c in f])
    return faces


@dataclass(frozen=True, eq=False)
class CurveDiagram:
    """
    Signed Gauss code of a multi-curve together with face decorations.

    ``crossings`` maps crossing ids to signs, ``components`` maps component
    names to tuples of passages and ``decorations`` maps canonical face
    keys to :class:`Decoration` values.
    """
    crossings: Dict[str, int]
    components: Dict[str, Tuple[Passage, ...]]
    decorations: Dict[str, Decoration]
    _faces: Tuple[Face, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        crossings = dict(self.crossings)
        components = {n: tuple((str(x), s) for x, s in w) for n, w in self.components.items()}
        for x, sign in crossings.items():
            if sign not in (1, -1):
                raise DiagramError("crossing %s has sign %r" % (x, sign))
        _check_structure(crossings, components)
        object.__setattr__(self, "crossings", crossings)
        object.__setattr__(self, "components", components)
        raw = _trace(crossings, components)
        decorations = dict(self.decorations)
        keys = ["-".join(corner_label(c) for c in f) for f in raw]
        for key in decorations:
            if key not in keys:
                raise DiagramError("unknown face key %s in decorations" % key)
        missing = [k for k in keys if k not in decorations]
        if missing:
            raise DiagramError("undecorated face %s" % missing[0])
        object.__setattr__(self, "decorations", decorations)
        object.__setattr__(self, "_faces",
                           tuple(Face(f, decorations[k]) for f, k in zip(raw, keys)))

    @classmethod
    def decorated(cls, crossings, components, rule) -> "CurveDiagram":
        """Build a diagram whose decorations are chosen by ``rule(faces)``.

        ``rule`` receives the traced faces (undecorated) and returns a
        mapping from canonical key to decoration."""
        crossings = dict(crossings)
        components = {n: tuple(w) for n, w in components.items()}
        _check_structure(crossings, components)
        faces = [Face(f) for f in _trace(crossings, components)]
        return cls(crossings, components, dict(rule(faces)))

    def __eq__(self, other):
        if not isinstance(other, CurveDiagram):
            return NotImplemented
        return (self.crossings == other.crossings
                and self.components == other.components
                and self.decorations == other.decorations)

    def __hash__(self):
        return hash((tuple(sorted(self.crossings.items())),
                     tuple(sorted(self.components.items()))))

    @property
    def faces(self) -> Tuple[Face, ...]:
        return self._faces

    def passages(self):
        for name, word in self.components.items():
            for p in word:
                yield name, p

    def component_of(self) -> Dict[Passage, str]:
        return {p: name for name, p in self.passages()}

    def with_decorations(self, decorations) -> "CurveDiagram":
        return CurveDiagram(self.crossings, self.components, decorations)


def trace_faces(d: CurveDiagram) -> List[Face]:
    """Complementary faces of the diagram, sorted by canonical key."""
    return list(d.faces)


def genus(d: CurveDiagram) -> int:
    twice = 2 - len(d.faces) + len(d.crossings)
    if twice % 2:
        raise DiagramError("non-integral genus: inconsistent ribbon structure")
    return twice // 2


@dataclass(frozen=True)
class FillingReport:
    is_filling: bool
    is_taut: bool
    genus: int
    num_faces: int
    orbifold_euler: Fraction
    offending_faces: Tuple[Tuple[str, str], ...] = ()

    def as_dict(self):
        return {
            "is_filling": self.is_filling,
            "is_taut": self.is_taut,
            "genus": self.genus,
            "num_faces": self.num_faces,
            "orbifold_euler": str(self.orbifold_euler),
            "offending_faces": [{"face": k, "reason": r} for k, r in self.offending_faces],
        }


def orbifold_euler(d: CurveDiagram) -> Fraction:
    chi = Fraction(2 - 2 * genus(d))
    for face in d.faces:
        chi -= face.decoration.euler_defect()
    return chi


def filling_check(d: CurveDiagram) -> FillingReport:
    g = genus(d)
    chi = orbifold_euler(d)
    offending = []
    for face in d.faces:
        if face.decoration.kind == "disk" and len(face) <= 2:
            offending.append((face.canonical_key,
                              "monogon" if len(face) == 1 else "bigon"))
    if chi >= 0:
        offending.append(("", "orbifold Euler characteristic %s is not negative" % chi))
    return FillingReport(
        is_filling=chi < 0,
        is_taut=not any(r in ("monogon", "bigon") for _, r in offending),
        genus=g,
        num_faces=len(d.faces),
        orbifold_euler=chi,
        offending_faces=tuple(offending),
    )


def self_intersection(d: CurveDiagram) -> int:
    if not filling_check(d).is_taut:
        raise DiagramError("diagram not in minimal position; crossing count is not i(γ,γ)")
    return len(d.crossings)


def _minimal_period(word) -> int:
    n = len(word)
    for p in range(1, n):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return p
    return n


def _rotation_class(word):
    n = len(word)
    return min(tuple(word[i:] + word[:i]) for i in range(n))


def validate_components(d: CurveDiagram) -> List[str]:
    """Heuristic warnings: proper-power components and repeated components.

    Passages are unique, so a literal repetition can never occur; the
    checks compare crossing-free shapes, i.e. the cyclic sequence of
    (slot, sign) symbols along each component.
    """
    warnings = []
    shapes = {}
    for name, word in d.components.items():
        shape = [(s, d.crossings[x]) for x, s in word]
        p = _minimal_period(shape)
        if p < len(shape):
            warnings.append("component %s looks like a proper power (period %d of %d)"
                            % (name, p, len(shape)))
        shapes[name] = _rotation_class(shape)
    names = sorted(shapes)
    for i, n1 in enumerate(names):
        for n2 in names[i + 1:]:
            if shapes[n1] == shapes[n2]:
                warnings.append("components %s and %s have rotation-equal words" % (n1, n2))
    return warnings


# ---------------------------------------------------------------- file format

_PASSAGE = re.compile(r"^(\S+)([ab])$")


def parse_passage(token: str, line=None) -> Passage:
    m = _PASSAGE.match(token)
    if not m:
        raise DiagramError("bad passage token %r" % token, line)
    return m.group(1), m.group(2)


def parse_decoration(tokens, line=None) -> Decoration:
    if not tokens:
        raise DiagramError("missing face decoration", line)
    kind = tokens[0]
    if kind == "cone":
        if len(tokens) != 2:
            raise DiagramError("cone decoration needs an order", line)
        try:
            order = int(tokens[1])
        except ValueError:
            raise DiagramError("bad cone order %r" % tokens[1], line)
        try:
            return Decoration("cone", order)
        except DiagramError as e:
            raise DiagramError(str(e), line)
    if kind in ("disk", "puncture") and len(tokens) == 1:
        return Decoration(kind)
    raise DiagramError("bad face decoration %r" % " ".join(tokens), line)


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_curve_lines(lines):
    """Parse curve-file lines; return (crossings, components, decorations, rest).

    ``rest`` collects ``(lineno, tokens)`` for keywords this parser does not
    know, so that the lift format can extend the curve format."""
    crossings, components, decorations, rest = {}, {}, {}, []
    seen_passages = set()
    for lineno, line in lines:
        tokens = line.split()
        key = tokens[0]
        if key == "crossing":
            if len(tokens) != 3 or tokens[2] not in "+-" or len(tokens[2]) != 1:
                raise DiagramError("expected 'crossing <id> <+|->'", lineno)
            if tokens[1] in crossings:
                raise DiagramError("duplicate crossing %s" % tokens[1], lineno)
            crossings[tokens[1]] = 1 if tokens[2] == "+" else -1
        elif key == "component":
            m = re.match(r"^component\s+(\S+?)\s*:\s*(.*)$", line)
            if not m:
                raise DiagramError("expected 'component <name>: <passages>'", lineno)
            name = m.group(1)
            if name in components:
                raise DiagramError("duplicate component %s" % name, lineno)
            word = []
            for tok in m.group(2).split():
                p = parse_passage(tok, lineno)
                if p in seen_passages:
                    raise DiagramError("duplicate passage %s%s" % p, lineno)
                seen_passages.add(p)
                word.append(p)
            components[name] = tuple(word)
        elif key == "face":
            if len(tokens) < 3:
                raise DiagramError("expected 'face <key> <decoration>'", lineno)
            if tokens[1] in decorations:
                raise DiagramError("duplicate face %s" % tokens[1], lineno)
            decorations[tokens[1]] = parse_decoration(tokens[2:], lineno)
        else:
            rest.append((lineno, tokens))
    return crossings, components, decorations, rest


def parse_diagram(text: str) -> CurveDiagram:
    crossings, components, decorations, rest = parse_curve_lines(_content_lines(text))
    if rest:
        lineno, tokens = rest[0]
        raise DiagramError("unknown keyword %r" % tokens[0], lineno)
    return CurveDiagram(crossings, components, decorations)


def write_diagram(d: CurveDiagram) -> str:
    out = []
    for x, sign in d.crossings.items():
        out.append("crossing %s %s" % (x, "+" if sign > 0 else "-"))
    for name, word in d.components.items():
        out.append("component %s: %s" % (name, " ".join(x + s for x, s in word)))
    for face in d.faces:
        out.append("face %s %s" % (face.canonical_key, face.decoration))
    return "\n".join(out) + "\n"
