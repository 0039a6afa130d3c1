import pathlib

import pytest

from fibered_links.curves import PUNCTURE, CurveDiagram

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def all_punctured(faces):
    return {f.canonical_key: PUNCTURE for f in faces}


def torus_one_crossing():
    """Meridian and longitude of the torus, crossing once; one square face."""
    return CurveDiagram.decorated({"1": 1}, {"A": (("1", "a"),), "B": (("1", "b"),)},
                                  all_punctured)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
