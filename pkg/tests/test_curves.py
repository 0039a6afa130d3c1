import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fibered_links.curves import (DISK, CurveDiagram, Decoration, DiagramError,
                                  filling_check, genus, orbifold_euler, parse_diagram,
                                  self_intersection, trace_faces, validate_components,
                                  write_diagram)
from fibered_links.lifts import gen_twist_family
from fibered_links.planar import diagram_from_polygons, random_planar_diagram

from conftest import all_punctured, torus_one_crossing

FIGURE_EIGHT_CURVE = """\
# one closed curve with a single self-crossing
crossing 1 +
component g: 1a 1b
face 1.0-1.2 puncture
face 1.1 puncture
face 1.3 puncture
"""


def test_single_component_one_crossing_is_planar():
    # a curve crossing itself once always bounds two lobes: 3 faces, genus 0
    d = parse_diagram(FIGURE_EIGHT_CURVE)
    assert len(d.crossings) == 1 and len(d.components["g"]) == 2
    assert sorted(len(f) for f in d.faces) == [1, 1, 2]
    assert genus(d) == 0


def test_torus_one_crossing_has_one_square_face():
    d = torus_one_crossing()
    faces = trace_faces(d)
    assert len(faces) == 1 and len(faces[0]) == 4
    assert genus(d) == 1
    rep = filling_check(d)
    assert rep.is_filling and rep.is_taut
    assert rep.orbifold_euler == -1
    assert self_intersection(d) == 1


def test_torus_plain_face_is_not_filling():
    d = torus_one_crossing()
    d = d.with_decorations({k: DISK for k in d.decorations})
    rep = filling_check(d)
    assert not rep.is_filling and rep.orbifold_euler == 0
    assert rep.is_taut


def test_duplicate_passage_rejected():
    text = FIGURE_EIGHT_CURVE.replace("1a 1b", "1a 1a")
    with pytest.raises(DiagramError, match="duplicate passage"):
        parse_diagram(text)


@pytest.mark.parametrize("text, message", [
    ("crossing 1 +\ncrossing 2 +\ncomponent g: 1a 1b\n", "referenced by 0 passages"),
    ("crossing 1 +\ncomponent g: 1a\n", "referenced by 1 passages"),
    ("crossing 1 +\ncomponent g: 1a 1b\nface 9.9 disk\n", "unknown face key"),
    ("crossing 1 +\ncomponent g: 1a 1b\nface 1.1 disk\n", "undecorated face"),
    ("crossing 1 +\ncomponent g: 1a 1b\nface 1.0 cone 1\n", "cone order"),
    ("crossing 1 *\n", "line 1"),
    ("crossing 1 +\ncomponent g: 1a 1b\nbogus\n", "unknown keyword"),
    ("component g:\n", "no crossings"),
])
def test_parse_errors(text, message):
    with pytest.raises(DiagramError, match=message):
        parse_diagram(text)


def test_disconnected_diagram_rejected():
    # two figure-eight curves far apart share no crossing
    polys = [[(0, 0), (2, 2), (2, 0), (0, 2)], [(10, 0), (12, 2), (12, 0), (10, 2)]]
    with pytest.raises(DiagramError, match="connected"):
        diagram_from_polygons(polys)


def test_bigon_fixture_not_taut(fixtures_dir):
    d = parse_diagram((fixtures_dir / "bigon.curve").read_text())
    rep = filling_check(d)
    assert rep.is_filling and not rep.is_taut
    assert [r for _, r in rep.offending_faces] == ["bigon"]
    with pytest.raises(DiagramError, match="not in minimal position"):
        self_intersection(d)


def test_cone_faces_enter_euler_characteristic():
    d = torus_one_crossing()
    key = d.faces[0].canonical_key
    assert orbifold_euler(d.with_decorations({key: Decoration("cone", 3)})) == Fraction(-2, 3)


def test_twist_family_genus_one():
    for n in range(1, 6):
        d = gen_twist_family(n).base
        assert len(d.faces) == len(d.crossings)
        assert genus(d) == 1


def test_gamma1_round_trip():
    d = gen_twist_family(1).base
    assert parse_diagram(write_diagram(d)) == d
    assert write_diagram(parse_diagram(write_diagram(d))) == write_diagram(d)


def test_validate_components():
    word = [("1", "a"), ("2", "a"), ("1", "b"), ("2", "b")]
    d = CurveDiagram.decorated({"1": 1, "2": 1}, {"g": word}, all_punctured)
    assert validate_components(d) == []
    # two components with the same (slot, sign) shape up to rotation
    twins = CurveDiagram.decorated(
        {"1": 1, "2": 1}, {"p": [("1", "a"), ("2", "b")], "q": [("2", "a"), ("1", "b")]},
        all_punctured)
    assert any("rotation-equal" in w for w in validate_components(twins))


def test_planar_polygons_trace_to_spheres():
    # oracle: a diagram read off an actual plane embedding has genus 0
    rng = random.Random(7)
    for _ in range(200):
        d = random_planar_diagram(rng)
        assert genus(d) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_corner_partition_and_parity(seed):
    d = random_planar_diagram(random.Random(seed))
    corners = [c for f in d.faces for c in f.corners]
    assert len(corners) == len(set(corners)) == 4 * len(d.crossings)
    assert (len(d.faces) - len(d.crossings)) % 2 == 0
    assert parse_diagram(write_diagram(d)) == d


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_tracing_independent_of_component_order(seed):
    d = random_planar_diagram(random.Random(seed))
    names = list(d.components)
    random.Random(seed).shuffle(names)
    shuffled = CurveDiagram(d.crossings, {n: d.components[n] for n in names}, d.decorations)
    assert sorted(f.canonical_key for f in shuffled.faces) == \
        sorted(f.canonical_key for f in d.faces)
    assert genus(shuffled) == genus(d)
