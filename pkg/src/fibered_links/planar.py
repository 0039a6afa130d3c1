"""
Curve diagrams read off from closed polygons in the plane.

Used to produce genus-0 diagrams whose ribbon structure comes from an
actual embedding, independent of any hand-written Gauss code.
"""

from __future__ import annotations

import random
from typing import Sequence, Tuple

from .curves import CurveDiagram, DiagramError, PUNCTURE

Point = Tuple[float, float]


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _segment_hit(p, p2, q, q2):
    r = (p2[0] - p[0], p2[1] - p[1])
    s = (q2[0] - q[0], q2[1] - q[1])
    denom = _cross(r, s)
    if denom == 0:
        return None
    qp = (q[0] - p[0], q[1] - p[1])
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    if 0 < t < 1 and 0 < u < 1:
        return t, u
    return None


def polygon_crossings(polygons: Sequence[Sequence[Point]]):
    """All transverse crossings between edges of the closed polygons.

    Returns a list of ``((comp, pos), (comp2, pos2), sign)`` where ``pos`` is
    the arc-length-like parameter ``segment index + t`` and ``sign`` is the
    sign of the cross product of the first strand's direction with the
    second strand's direction.
    """
    segs = []
    for ci, poly in enumerate(polygons):
        n = len(poly)
        for k in range(n):
            segs.append((ci, k, poly[k], poly[(k + 1) % n]))
    hits = []
    for i in range(len(segs)):
        ci, ki, p, p2 = segs[i]
        for j in range(i + 1, len(segs)):
            cj, kj, q, q2 = segs[j]
            if ci == cj:
                n = len(polygons[ci])
                if abs(ki - kj) in (1, n - 1) or ki == kj:
                    continue
            hit = _segment_hit(p, p2, q, q2)
            if hit is None:
                continue
            t, u = hit
            dp = (p2[0] - p[0], p2[1] - p[1])
            dq = (q2[0] - q[0], q2[1] - q[1])
            sign = 1 if _cross(dp, dq) > 0 else -1
            hits.append(((ci, ki + t), (cj, kj + u), sign))
    return hits


def diagram_from_polygons(polygons: Sequence[Sequence[Point]],
                          decoration=PUNCTURE) -> CurveDiagram:
    """Planar diagram of the polygons; every face gets ``decoration``."""
    hits = polygon_crossings(polygons)
    events = {ci: [] for ci in range(len(polygons))}
    crossings = {}
    for idx, (pa, pb, sign) in enumerate(hits, 1):
        x = str(idx)
        crossings[x] = sign
        events[pa[0]].append((pa[1], (x, "a")))
        events[pb[0]].append((pb[1], (x, "b")))
    components = {}
    for ci, ev in events.items():
        ev.sort()
        components["c%d" % ci] = tuple(p for _, p in ev)
    return CurveDiagram.decorated(
        crossings, components, lambda faces: {f.canonical_key: decoration for f in faces})


def random_planar_diagram(rng: random.Random, max_components=3, max_vertices=7,
                          decoration=PUNCTURE, tries=1000) -> CurveDiagram:
    """A random connected planar multi-curve diagram (genus 0)."""
    for _ in range(tries):
        k = rng.randint(1, max_components)
        polys = []
        for _ in range(k):
            n = rng.randint(3, max_vertices)
            polys.append([(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)])
        try:
            return diagram_from_polygons(polys, decoration)
        except DiagramError:
            continue
    raise RuntimeError("could not generate a connected planar diagram")


__all__ = ["polygon_crossings", "diagram_from_polygons", "random_planar_diagram"]
