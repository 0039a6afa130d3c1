"""
Volume bounds, and counting arc classes in pairs of pants.

Words live in the free group on ``A, B``; a lowercase letter is the
inverse of its uppercase partner and the empty word is ``""`` (written
``-`` in files).  The three boundary curves of a pair of pants read
``x1 = A``, ``x2 = B`` and ``x3 = (AB)^-1 = ba``.  Two arcs with endpoints
on boundaries ``i`` and ``j`` are homotopic with sliding endpoints exactly
when their words lie in the same double coset ``<x_i> w <x_j>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .geometry import V3, V8

LETTERS = "AaBb"
BOUNDARY_WORDS = {1: "A", 2: "B", 3: "ba"}


class WordError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def _check_word(word: str):
    bad = set(word) - set(LETTERS)
    if bad:
        raise WordError("letters %s not in {A, a, B, b}" % "".join(sorted(bad)))


def inverse(word: str) -> str:
    return word[::-1].swapcase()


def reduce_word(word: str) -> str:
    _check_word(word)
    out = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def is_reduced(word: str) -> bool:
    return all(word[k] != word[k + 1].swapcase() for k in range(len(word) - 1))


def power(word: str, m: int) -> str:
    return word * m if m >= 0 else inverse(word) * (-m)


def shortlex_key(word: str):
    return len(word), [LETTERS.index(ch) for ch in word]


def _boundary(i: int) -> str:
    if i not in BOUNDARY_WORDS:
        raise WordError("boundary label %r not in 1, 2, 3" % (i,))
    return BOUNDARY_WORDS[i]


def canonical_arc_class(word: str, i: int, j: int) -> str:
    """Shortlex-least word of the double coset ``<x_i> word <x_j>``."""
    _check_word(word)
    if not is_reduced(word):
        raise WordError("word %r is not freely reduced" % word)
    xi, xj = _boundary(i), _boundary(j)
    w = word
    # strip boundary powers while that shortens the word
    changed = True
    while changed:
        changed = False
        for left, right in ((xi, ""), (inverse(xi), ""), ("", xj), ("", inverse(xj))):
            trial = reduce_word(left + w + right)
            if len(trial) < len(w):
                w, changed = trial, True
    if i == j and _is_power_of(w, xi):
        return ""
    # boundary words have length <= 2, so once no single factor shortens w
    # the shortest representatives are within one factor on either side
    best = w
    for m in range(-2, 3):
        for n in range(-2, 3):
            trial = reduce_word(power(xi, m) + w + power(xj, n))
            if shortlex_key(trial) < shortlex_key(best):
                best = trial
    return best


def _is_power_of(w: str, x: str) -> bool:
    for m in range(-len(w), len(w) + 1):
        if reduce_word(power(x, m)) == w:
            return True
    return False


def arc_class(i: int, j: int, word: str):
    """Class key of an arc; endpoint pairs are unordered."""
    if i > j:
        i, j, word = j, i, inverse(word)
    return (i, j, canonical_arc_class(word, i, j))


def six_simple_classes() -> List[Tuple[int, int, str]]:
    """The three arcs joining distinct boundaries and the three returning
    arcs, each going once around one of the other boundaries."""
    raw = [(1, 2, ""), (1, 3, ""), (2, 3, ""), (1, 1, "B"), (2, 2, "A"), (3, 3, "A")]
    return [arc_class(i, j, w) for i, j, w in raw]


@dataclass
class PantsArcs:
    """``pants`` is a list of ``(name, arcs)`` with arcs ``(i, j, word)``."""
    pants: List[Tuple[str, List[Tuple[int, int, str]]]] = field(default_factory=list)

    def __post_init__(self):
        for name, arcs in self.pants:
            for i, j, word in arcs:
                _boundary(i)
                _boundary(j)
                _check_word(word)
                if not is_reduced(word):
                    raise WordError("arc word %r in pants %s is not reduced" % (word, name))


def count_classes(p: PantsArcs) -> List[int]:
    return [len({arc_class(i, j, w) for i, j, w in arcs}) for _, arcs in p.pants]


def parse_pants(text: str) -> PantsArcs:
    pants = []
    for n, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] == "pants":
            if len(toks) != 2:
                raise WordError("expected 'pants <name>'", n)
            pants.append((toks[1], []))
        elif toks[0] == "arc":
            if not pants:
                raise WordError("arc before any 'pants' line", n)
            if len(toks) != 4 or toks[1] not in "123" or toks[2] not in "123" \
                    or len(toks[1]) != 1 or len(toks[2]) != 1:
                raise WordError("expected 'arc <i> <j> <word>' with i, j in 1..3", n)
            word = "" if toks[3] == "-" else toks[3]
            if set(word) - set(LETTERS):
                raise WordError("bad letters in word %r" % toks[3], n)
            if not is_reduced(word):
                raise WordError("word %r is not freely reduced" % toks[3], n)
            pants[-1][1].append((int(toks[1]), int(toks[2]), word))
        else:
            raise WordError("unknown keyword %r" % toks[0], n)
    return PantsArcs(pants)


def write_pants(p: PantsArcs) -> str:
    out = []
    for name, arcs in p.pants:
        out.append("pants %s" % name)
        for i, j, w in arcs:
            out.append("arc %d %d %s" % (i, j, w or "-"))
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ bounds

def upper_bound(c: int) -> float:
    if c < 1:
        raise ValueError("crossing count must be at least 1, got %d" % c)
    return 8 * V3 * c


def family_lower_bound(g: int, i: int) -> float:
    return V8 / 2 * (i - (2 - 2 * g))


def pants_lower_bound(counts: Sequence[int]) -> Tuple[float, float]:
    """``(literal, clamped)`` versions of ``(v3/2) * sum(k - 3)``."""
    if any(k < 0 for k in counts):
        raise ValueError("class counts must be nonnegative")
    literal = V3 / 2 * sum(k - 3 for k in counts)
    clamped = V3 / 2 * sum(max(0, k - 3) for k in counts)
    return literal, clamped


@dataclass
class BoundsReport:
    upper: float
    family_lower: Optional[float] = None
    pants_lower: Optional[float] = None
    pants_lower_clamped: Optional[float] = None
    per_pants_counts: List[int] = field(default_factory=list)

    def as_dict(self):
        return {
            "upper": self.upper,
            "family_lower": self.family_lower,
            "pants_lower": self.pants_lower,
            "pants_lower_clamped": self.pants_lower_clamped,
            "per_pants_counts": self.per_pants_counts,
        }


def bounds_report(c: int, genus: Optional[int] = None,
                  arcs: Optional[PantsArcs] = None) -> BoundsReport:
    rep = BoundsReport(upper_bound(c))
    if genus is not None:
        rep.family_lower = family_lower_bound(genus, c)
    if arcs is not None:
        rep.per_pants_counts = count_classes(arcs)
        rep.pants_lower, rep.pants_lower_clamped = pants_lower_bound(rep.per_pants_counts)
    return rep


__all__ = [
    "LETTERS", "BOUNDARY_WORDS", "WordError", "inverse", "reduce_word", "is_reduced",
    "power", "shortlex_key", "canonical_arc_class", "arc_class", "six_simple_classes",
    "PantsArcs", "count_classes", "parse_pants", "write_pants", "upper_bound",
    "family_lower_bound", "pants_lower_bound", "BoundsReport", "bounds_report",
]
