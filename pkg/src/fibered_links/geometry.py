"""
Gluing equations, a Newton shape solver and hyperbolic volume.

Shape convention: a tetrahedron with shape ``z`` carries ``z`` on edges 01
and 23, ``1/(1-z)`` on 02 and 13 and ``(z-1)/z`` on 03 and 12.  An equation
row holds exponents ``(a_j, b_j, c_j)`` of these three parameters; in log
form with ``w = log z`` it reads

    sum_j (a_j - c_j) w_j + (c_j - b_j) log(1 - e^w_j) + i*pi*c_j = target

which is the principal-branch bookkeeping for shapes in the upper half
plane.  Edge equations have target ``2*pi*i`` and cusp holonomies ``0``.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import bernoulli, spence

from .triangulation import IdealTriangulation, TriangulationError, perm_sign, validate

# edge (i, j) of a tetrahedron -> parameter index 0 (z), 1 (z'), 2 (z'')
EDGE_PARAM = {
    (0, 1): 0, (2, 3): 0,
    (0, 2): 1, (1, 3): 1,
    (0, 3): 2, (1, 2): 2,
}


def edge_param(i, j) -> int:
    return EDGE_PARAM[(min(i, j), max(i, j))]


# ------------------------------------------------------------ constants

_BERNOULLI = [abs(b) for b in bernoulli(60)]


def _clausen2(x: float) -> float:
    """Cl2(x) for x in [-pi, pi], by its Bernoulli series."""
    if x == 0.0:
        return 0.0
    total = x - x * math.log(abs(x))
    x2 = x * x
    power = x
    for k in range(1, 30):
        power *= x2
        term = _BERNOULLI[2 * k] * power / (2 * k * math.factorial(2 * k + 1))
        total += term
        if abs(term) < 1e-18:
            break
    return total


def lobachevsky(theta: float) -> float:
    """Lobachevsky function, ``(1/2) sum_n sin(2 n theta) / n^2``."""
    # pi-periodic: reduce to (-pi/2, pi/2] so that 2*theta lies in (-pi, pi]
    t = math.remainder(theta, math.pi)
    return 0.5 * _clausen2(2.0 * t)


V3 = 3.0 * lobachevsky(math.pi / 3)
V8 = 8.0 * lobachevsky(math.pi / 4)


def dilog(z: complex) -> complex:
    return complex(spence(1.0 - complex(z)))


def bloch_wigner(z: complex) -> float:
    z = complex(z)
    if z == 0 or z == 1:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


# ------------------------------------------------------------ equations

@dataclass
class GluingSystem:
    """Integer exponent rows ``(a, b, c)`` per tetrahedron plus targets.

    ``targets`` are in units of ``pi*i``: 2 for edge equations, 0 for cusp
    holonomies.  The first ``num_edges`` rows are edge equations, then two
    rows (meridian, longitude) per cusp."""
    num_tetrahedra: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    targets: np.ndarray
    num_edges: int
    num_cusps: int

    @property
    def num_equations(self) -> int:
        return len(self.targets)

    def rows(self):
        for k in range(self.num_equations):
            yield self.a[k], self.b[k], self.c[k], self.targets[k]

    def with_targets(self, targets) -> "GluingSystem":
        return GluingSystem(self.num_tetrahedra, self.a, self.b, self.c,
                            np.asarray(targets, dtype=float), self.num_edges, self.num_cusps)

    def residual_vector(self, w: np.ndarray) -> np.ndarray:
        log1mz = np.log(1 - np.exp(w))
        return ((self.a - self.c) @ w + (self.c - self.b) @ log1mz
                + 1j * math.pi * (self.c.sum(axis=1) - self.targets))

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        z = np.exp(w)
        return (self.a - self.c) + (self.c - self.b) * (z / (z - 1))


def _cusp_curves(t: IdealTriangulation):
    """Two normal curves per cusp, each a list of ``(tet, vertex, corner, turn)``.

    ``turn`` is +1 when the cut-off corner lies to the left of the curve.
    The curves come from a tree-cotree decomposition of each vertex-link
    torus."""
    parent = {}

    def find(u):
        parent.setdefault(u, u)
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def partner(side):
        tet, v, f = side
        t2, p = t.gluings[tet][f]
        return (t2, p[v], p[f])

    curves = []
    for cls in t.vertex_classes():
        triangles = set(cls)
        # dual spanning tree by BFS
        root = cls[0]
        came = {root: None}
        order = [root]
        tree_sides = set()
        for tri in order:
            tet, v = tri
            for f in range(4):
                if f == v:
                    continue
                other = partner((tet, v, f))
                nxt = other[:2]
                if nxt not in came:
                    came[nxt] = ((tet, v, f), other)
                    order.append(nxt)
                    tree_sides.add(min((tet, v, f), other))
        assert set(came) == triangles
        # primal spanning tree among the remaining sides
        parent.clear()
        for tet, v in cls:
            for u in range(4):
                if u != v:
                    find((tet, v, u))
        for tet, v, f in _sides(cls):
            t2, v2, f2 = partner((tet, v, f))
            for u in range(4):
                if u not in (v, f):
                    a, b = find((tet, v, u)), find((t2, v2, t.gluings[tet][f][1][u]))
                    if a != b:
                        parent[a] = b
        parent_v = {}

        def findv(u):
            parent_v.setdefault(u, u)
            while parent_v[u] != u:
                parent_v[u] = parent_v[parent_v[u]]
                u = parent_v[u]
            return u

        generators = []
        for side in sorted(_sides(cls)):
            key = min(side, partner(side))
            if key != side or key in tree_sides:
                continue
            tet, v, f = side
            ends = [find((tet, v, u)) for u in range(4) if u not in (v, f)]
            a, b = findv(ends[0]), findv(ends[1])
            if a != b:
                parent_v[a] = b
            else:
                generators.append(side)
        if len(generators) != 2:
            raise TriangulationError("vertex link is not a torus")
        for side in generators:
            curves.append(_dual_loop(side, partner(side), came))
    return curves


def _sides(cls):
    return [(tet, v, f) for tet, v in cls for f in range(4) if f != v]


def _tree_path(tri, came):
    """Sides crossed going from the root down to ``tri``, as (exit, entry)."""
    path = []
    while came[tri] is not None:
        exit_side, entry_side = came[tri]
        path.append((exit_side, entry_side))
        tri = exit_side[:2]
    path.reverse()
    return path


def _dual_loop(side, other, came):
    """Corner data along the loop: cross ``side`` then return through the tree."""
    start, end = side[:2], other[:2]
    down_start = _tree_path(start, came)
    down_end = _tree_path(end, came)
    k = 0
    while k < min(len(down_start), len(down_end)) and down_start[k] == down_end[k]:
        k += 1
    # crossings: side -> other, then up from end to the common ancestor,
    # then down to start
    crossings = [(side, other)]
    for exit_side, entry_side in reversed(down_end[k:]):
        crossings.append((entry_side, exit_side))
    for exit_side, entry_side in down_start[k:]:
        crossings.append((exit_side, entry_side))
    # the triangle entered by crossing j is left by crossing j + 1
    loop = []
    n = len(crossings)
    for j in range(n):
        entry = crossings[j][1]
        leave = crossings[(j + 1) % n][0]
        tet, v, f_in = entry
        tet2, v2, f_out = leave
        assert (tet, v) == (tet2, v2) and f_in != f_out
        u = ({0, 1, 2, 3} - {v, f_in, f_out}).pop()
        # corners (u, f_in, f_out) counter-clockwise puts u on the right
        ccw = perm_sign((v, u, f_in, f_out)) == 1
        loop.append((tet, v, u, -1 if ccw else 1))
    return loop


def build_gluing_system(t: IdealTriangulation) -> GluingSystem:
    report = validate(t)
    if not report.ok:
        raise TriangulationError("invalid triangulation: " + "; ".join(report.failures))
    T = t.num_tetrahedra
    rows = []
    targets = []
    for cycle in t.edge_classes():
        row = np.zeros((3, T), dtype=int)
        for tet, (i, j) in cycle:
            row[edge_param(i, j), tet] += 1
        rows.append(row)
        targets.append(2.0)
    num_edges = len(rows)
    for curve in _cusp_curves(t):
        row = np.zeros((3, T), dtype=int)
        for tet, v, u, turn in curve:
            row[edge_param(v, u), tet] += turn
        rows.append(row)
        targets.append(0.0)
    arr = np.array(rows)
    return GluingSystem(T, arr[:, 0, :], arr[:, 1, :], arr[:, 2, :],
                        np.array(targets), num_edges, len(t.vertex_classes()))


# ------------------------------------------------------------ solver

@dataclass
class ShapeSolution:
    shapes: List[complex]
    residual: float
    geometric: bool
    iterations: int
    status: str = "geometric"
    residual_history: List[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status in ("geometric", "solved-non-geometric")

    def as_dict(self):
        return {
            "status": self.status,
            "geometric": self.geometric,
            "residual": self.residual,
            "iterations": self.iterations,
            "shapes": [[z.real, z.imag] for z in self.shapes],
        }


def default_max_iters() -> int:
    raw = os.environ.get("FIBERED_LINKS_MAX_ITERS")
    if raw:
        try:
            return max(0, int(raw))
        except ValueError:
            pass
    return 200


def _max_norm(v) -> float:
    return float(np.max(np.abs(v))) if len(v) else 0.0


def solve_shapes(s: GluingSystem, initial=None, tol=1e-12,
                 max_iters: Optional[int] = None, min_step=2.0 ** -20) -> ShapeSolution:
    """Damped Newton iteration (least squares) on log-shapes."""
    if max_iters is None:
        max_iters = default_max_iters()
    T = s.num_tetrahedra
    if initial is None:
        initial = [cmath.exp(1j * math.pi / 3)] * T
    w = np.log(np.asarray(initial, dtype=complex))
    with np.errstate(all="ignore"):
        res = _max_norm(s.residual_vector(w))
    history = [res]
    status = None
    it = 0
    while res >= tol and it < max_iters:
        it += 1
        with np.errstate(all="ignore"):
            J = s.jacobian(w)
            F = s.residual_vector(w)
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(F))):
            status = "degenerate"
            break
        step, _, rank, _ = np.linalg.lstsq(J, -F, rcond=None)
        if rank < T:
            status = "degenerate"
            break
        lam = 1.0
        while lam >= min_step:
            trial = w + lam * step
            with np.errstate(all="ignore"):
                r = _max_norm(s.residual_vector(trial))
            if np.isfinite(r) and r < res:
                break
            lam /= 2
        else:
            status = "failed"
            break
        w, res = trial, r
        history.append(res)
    shapes = [complex(z) for z in np.exp(w)]
    geometric = all(z.imag > 0 for z in shapes)
    if status is None:
        if res < tol:
            status = "geometric" if geometric else "solved-non-geometric"
        else:
            status = "failed"
    return ShapeSolution(shapes, res, geometric, it, status, history)


def volume(sol: ShapeSolution) -> float:
    if not sol.converged:
        raise ValueError("shape solution did not converge (status %s)" % sol.status)
    return sum(bloch_wigner(z) for z in sol.shapes)


__all__ = [
    "EDGE_PARAM", "edge_param", "lobachevsky", "V3", "V8", "dilog", "bloch_wigner",
    "GluingSystem", "build_gluing_system", "ShapeSolution", "solve_shapes", "volume",
    "default_max_iters",
]
