import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from roilens import FacetSchema, GeoPoint, POI, Viewport


@pytest.fixture
def schema():
    return FacetSchema([
        ("kind", ("apartment", "house")),
        ("rooms", ("1", "2", "3")),
    ])


@pytest.fixture
def viewport():
    return Viewport(48.85, 2.35, 0.001)


def make_poi(poi_id, lat, lon, **attrs):
    return POI(poi_id, GeoPoint(lat, lon), {k: str(v) for k, v in attrs.items()})


@pytest.fixture
def poi_factory():
    return make_poi


def rng_for(seed):
    return np.random.default_rng(seed)
