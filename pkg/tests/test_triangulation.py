import pytest
from hypothesis import given, settings, strategies as st

from fibered_links.curves import DISK
from fibered_links.lifts import LiftDiagram, add_puncture, attach_lift, gen_twist_family, star_sum
from fibered_links.triangulation import (IdealTriangulation, TriangulationError,
                                         build_drilled_complement, face_label, figure_eight,
                                         orient, parse_tri, perm_compose, perm_inverse,
                                         perm_sign, to_snappea, validate, whitehead, write_tri)

from conftest import torus_one_crossing


def expected_labels(l):
    return sorted(["component:%s" % n for n in l.base.components]
                  + [face_label(f) for f in l.base.faces])


@pytest.mark.parametrize("n", range(1, 7))
def test_twist_family_triangulation(n):
    l = gen_twist_family(n)
    t = build_drilled_complement(l)
    c = 2 * n + 1
    assert t.num_tetrahedra == 8 * c
    rep = validate(t)
    assert rep.ok, rep.failures
    assert rep.num_edges == rep.num_tetrahedra
    assert rep.num_cusps == len(l.base.components) + len(l.base.faces)
    assert rep.link_genera == [1] * rep.num_cusps
    assert sorted(t.cusp_labels) == expected_labels(l)
    assert parse_tri(write_tri(t)) == t
    assert write_tri(build_drilled_complement(l)) == write_tri(t)


def test_star_sum_triangulation():
    l = star_sum(gen_twist_family(1), add_puncture(gen_twist_family(2)))
    t = build_drilled_complement(l)
    assert t.num_tetrahedra == 8 * len(l.base.crossings)
    assert validate(t).ok
    assert sorted(t.cusp_labels) == expected_labels(l)


def test_one_crossing_filling_lift():
    # the one-crossing filling diagram has two components and one face
    l = attach_lift(torus_one_crossing(), {"1": "a"})
    t = build_drilled_complement(l)
    assert t.num_tetrahedra == 8
    rep = validate(t)
    assert rep.ok and rep.num_cusps == 3


def test_over_choice_does_not_change_combinatorics():
    l = gen_twist_family(2)
    flipped = LiftDiagram(l.base, {x: "a" for x in l.base.crossings}, l.winding)
    assert validate(build_drilled_complement(flipped)).ok


def test_builder_preconditions():
    l = gen_twist_family(1)
    with pytest.raises(TriangulationError, match="unsupported winding"):
        build_drilled_complement(LiftDiagram(l.base, l.over, {"g": 1}))
    plain = l.base.with_decorations({k: DISK for k in l.base.decorations})
    with pytest.raises(TriangulationError, match="filling and taut"):
        build_drilled_complement(LiftDiagram(plain, l.over, l.winding))


@pytest.mark.parametrize("make", [figure_eight, whitehead])
def test_fixtures_valid(make):
    t = make()
    rep = validate(t)
    assert rep.ok and rep.num_edges == t.num_tetrahedra
    assert rep.link_genera == [1] * len(t.cusp_labels)


def test_figure_eight_fixture_file(fixtures_dir):
    t = parse_tri((fixtures_dir / "fig8.tri").read_text())
    assert t.num_tetrahedra == 2 and t == figure_eight()
    assert validate(t).num_cusps == 1


def test_unglued_face_reported():
    t = figure_eight()
    rows = [list(r) for r in t.gluings]
    rows[0][1] = None
    broken = IdealTriangulation(tuple(tuple(r) for r in rows), t.cusp_labels)
    rep = validate(broken)
    assert not rep.ok
    assert any("unglued face 1 of tetrahedron 0" in f for f in rep.failures)


def test_orientation_preserving_gluing_reported():
    t = figure_eight()
    rows = [list(r) for r in t.gluings]
    t2, p = rows[0][0]
    rows[0][0] = (t2, perm_compose((1, 0, 2, 3), p))
    rep = validate(IdealTriangulation(tuple(tuple(r) for r in rows)))
    assert not rep.ok


def test_truncated_file_reports_line():
    text = write_tri(figure_eight())
    cut = "\n".join(text.splitlines()[:6]) + "\n"
    with pytest.raises(TriangulationError, match=r"line 6: unexpected end of file"):
        parse_tri(cut)


@pytest.mark.parametrize("text, message", [
    ("", "missing 'tri v1'"),
    ("tri v1\nntet x\n", "bad tetrahedron count"),
    ("tri v1\nntet 1\nglue 0 0 0 01\n", "line 3"),
    ("tri v1\nntet 1\nfoo\n", "unknown keyword"),
    ("tri v1\nntet 2\ncusp 0 nonsense\n", "unknown cusp label"),
])
def test_parse_errors(text, message):
    with pytest.raises(TriangulationError, match=message):
        parse_tri(text)


def test_edge_cycles_close_up():
    # going once round an edge class returns every tetrahedron edge to itself
    t = build_drilled_complement(gen_twist_family(1))
    for cycle in t.edge_classes():
        assert len(cycle) >= 3
        tet, (i, j) = cycle[0]
        i0, j0 = i, j
        k, l = [v for v in range(4) if v not in (i, j)]
        total = (0, 1, 2, 3)
        for _ in cycle:
            t2, p = t.gluings[tet][l]
            total = perm_compose(p, total)
            tet, i, j, k, l = t2, p[i], p[j], p[l], p[k]
        assert (tet, (i, j)) == cycle[0]
        assert (total[i0], total[j0]) == (i0, j0)


def test_orient_makes_every_gluing_odd():
    t = figure_eight()
    swap = (0, 1, 3, 2)
    # relabel tetrahedron 0 so its gluings become even, then repair
    rows = []
    for tet, faces in enumerate(t.gluings):
        row = [None] * 4
        for f, (t2, p) in enumerate(faces):
            q = p
            if tet == 0:
                q = perm_compose(q, swap)
            if t2 == 0:
                q = perm_compose(swap, q)
            row[swap[f] if tet == 0 else f] = (t2, q)
        rows.append(row)
    assert any(perm_sign(p) == 1 for r in rows for _, p in r)
    fixed = orient(rows)
    assert all(perm_sign(p) == -1 for r in fixed for _, p in r)
    assert validate(IdealTriangulation(tuple(tuple(r) for r in fixed))).ok


def test_perm_helpers():
    p = (2, 0, 3, 1)
    assert perm_compose(p, perm_inverse(p)) == (0, 1, 2, 3)
    assert perm_sign((1, 0, 2, 3)) == -1 and perm_sign((1, 2, 0, 3)) == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 23), st.integers(0, 3), st.sampled_from([(1, 0, 2, 3), (0, 2, 1, 3)]))
def test_random_corruption_detected(tet, face, twist):
    t = build_drilled_complement(gen_twist_family(1))
    rows = [list(r) for r in t.gluings]
    t2, p = rows[tet][face]
    rows[tet][face] = (t2, perm_compose(p, twist))
    assert not validate(IdealTriangulation(tuple(tuple(r) for r in rows))).ok


def test_snappea_export_matches_external_oracle():
    snappy = pytest.importorskip("snappy")
    t = build_drilled_complement(gen_twist_family(1))
    m = snappy.Manifold(to_snappea(t))
    assert m.num_cusps() == 4
    assert "positively oriented" in m.solution_type()
    assert abs(float(m.volume()) - 21.983174260253268) < 1e-8
