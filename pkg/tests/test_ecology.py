"""Ecological (bio, geo, anthro) projection and its weight tables."""

import json
import warnings
from collections import Counter

import numpy as np
import pytest

from soundscape_align import (
    CATEGORIES,
    BGAMatrix,
    BGAVector,
    ClassDistribution,
    ConfigurationError,
    FormatError,
    LabelProbabilities,
    audio_bga_vector,
    bga_matrix_for_view,
    bga_vector,
    load_bga_matrix,
)

# every (class, (bio, geo, anthro)) constant, spelled out in full so a
# change in either table is caught literally
AERIAL_TABLE = {
    "Grassland": (1.0, 0.3, 0.0),
    "Forest/Vegetation": (1.0, 0.3, 0.0),
    "Wetlands": (1.0, 0.3, 0.0),
    "Waterbody": (0.3, 1.0, 0.0),
    "Bare Land": (0.1, 0.1, 1.0),
    "Road/Sidewalk": (0.1, 0.0, 1.0),
    "Building": (0.1, 0.0, 1.0),
    "Vehicles": (0.0, 0.0, 1.0),
    "Cropland": (1.0, 0.0, 0.3),
}

STREET_TABLE = {
    "Road": (0.0, 0.0, 1.0),
    "Sidewalk": (0.3, 0.0, 1.0),
    "Building": (0.3, 0.0, 1.0),
    "Vegetation": (1.0, 0.3, 0.0),
    "Waterbody": (1.0, 1.0, 0.0),
    "Person": (0.0, 0.0, 1.0),
    "Car, Truck, Bus, etc": (0.0, 0.0, 1.0),
}


def dist(**proportions):
    return ClassDistribution(proportions, total_pixels=100)


def test_builtin_tables_hold_all_48_constants():
    aerial = bga_matrix_for_view("aerial")
    street = bga_matrix_for_view("street")
    assert dict(aerial.weights) == AERIAL_TABLE
    assert dict(street.weights) == STREET_TABLE
    assert len(aerial.weights) == 9
    assert len(street.weights) == 7
    assert sum(len(t) for t in aerial.weights.values()) + sum(
        len(t) for t in street.weights.values()
    ) == 48


def test_one_hot_grassland():
    v = bga_vector(dist(Grassland=1.0), bga_matrix_for_view("aerial"))
    assert (v.bio, v.geo, v.anthro) == (1.0, 0.3, 0.0)


def test_half_grassland_half_building():
    v = bga_vector(
        dist(Grassland=0.5, Building=0.5), bga_matrix_for_view("aerial")
    )
    assert np.allclose(v.as_array(), [0.55, 0.15, 0.5], atol=1e-15)


def test_projection_is_linear():
    m = bga_matrix_for_view("street")
    a = dist(Road=0.6, Vegetation=0.4)
    b = dist(Road=0.2, Vegetation=0.8)
    mixed = dist(Road=0.6 * 0.5 + 0.2 * 0.5, Vegetation=0.4 * 0.5 + 0.8 * 0.5)
    want = 0.5 * bga_vector(a, m).as_array() + 0.5 * bga_vector(b, m).as_array()
    assert np.allclose(bga_vector(mixed, m).as_array(), want, atol=1e-12)


def test_builtin_projection_stays_in_unit_cube():
    rng = np.random.default_rng(0)
    m = bga_matrix_for_view("aerial")
    names = list(AERIAL_TABLE)
    for _ in range(50):
        p = rng.dirichlet(np.ones(len(names)))
        v = bga_vector(
            ClassDistribution(dict(zip(names, p)), total_pixels=1000), m
        )
        assert np.all(v.as_array() >= 0.0)
        assert np.all(v.as_array() <= 1.0 + 1e-12)


def test_vehicle_aliases_hit_the_grouped_row():
    m = bga_matrix_for_view("street")
    for name in ("Car", "Truck", "Bus", "Motorcycle", "Train", "Bicycle"):
        assert m.lookup(name) == (0.0, 0.0, 1.0)
    v = bga_vector(dist(Car=0.5, Road=0.5), m)
    assert (v.bio, v.geo, v.anthro) == (0.0, 0.0, 1.0)


def test_unmapped_classes_are_tallied():
    tally = Counter()
    v = bga_vector(
        dist(Sky=0.5, Road=0.5), bga_matrix_for_view("street"), tally
    )
    assert tally == Counter({"Sky": 1})
    assert (v.bio, v.geo, v.anthro) == (0.0, 0.0, 0.5)


def test_unmapped_classes_warn_without_tally():
    with pytest.warns(UserWarning, match="Sky"):
        bga_vector(dist(Sky=0.5, Road=0.5), bga_matrix_for_view("street"))


def test_mapped_classes_do_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bga_vector(dist(Road=1.0), bga_matrix_for_view("street"))


def test_fully_unmapped_scene_projects_to_zero():
    tally = Counter()
    v = bga_vector(dist(Sky=1.0), bga_matrix_for_view("street"), tally)
    assert (v.bio, v.geo, v.anthro) == (0.0, 0.0, 0.0)
    assert tally == Counter({"Sky": 1})


def test_audio_projection_examples():
    table = BGAMatrix(
        view="audio_custom",
        weights={
            "bird": (1.0, 0.0, 0.0),
            "wind": (0.0, 1.0, 0.0),
            "traffic": (0.0, 0.0, 1.0),
            "water": (0.3, 1.0, 0.0),
        },
    )
    lp = LabelProbabilities("A", {"bird": 0.8, "traffic": 0.4, "water": 0.5})
    v = audio_bga_vector(lp, table)
    assert np.allclose(v.as_array(), [0.8 + 0.15, 0.5, 0.4])


def test_audio_empty_table_is_configuration_error():
    table = BGAMatrix(view="audio_custom", weights={})
    with pytest.raises(ConfigurationError, match="empty"):
        audio_bga_vector(LabelProbabilities("A", {"bird": 1.0}), table)


def test_audio_unmapped_labels_tallied():
    table = BGAMatrix(view="audio_custom", weights={"bird": (1.0, 0.0, 0.0)})
    tally = Counter()
    audio_bga_vector(
        LabelProbabilities("A", {"bird": 0.5, "hum": 0.9}), table, tally
    )
    assert tally == Counter({"hum": 1})


def test_matrix_validation():
    with pytest.raises(ValueError, match="view"):
        BGAMatrix(view="satellite", weights={})
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        BGAMatrix(view="audio_custom", weights={"x": (1.5, 0.0, 0.0)})
    with pytest.raises(ValueError, match="3 weights"):
        BGAMatrix(view="audio_custom", weights={"x": (1.0, 0.0)})
    with pytest.raises(ValueError, match="unknown class"):
        BGAMatrix(
            view="audio_custom",
            weights={"x": (1.0, 0.0, 0.0)},
            aliases={"y": "z"},
        )


def test_vector_validation():
    with pytest.raises(ValueError, match=">= 0"):
        BGAVector(bio=-0.1, geo=0.0, anthro=0.0)
    v = BGAVector(bio=0.5, geo=0.25, anthro=1.0)
    assert v.component("geo") == 0.25
    with pytest.raises(ValueError, match="category"):
        v.component("chem")
    assert CATEGORIES == ("bio", "geo", "anthro")


def test_load_custom_table(tmp_path):
    doc = {
        "view": "audio_custom",
        "weights": {"bird": [1.0, 0.0, 0.0], "rain": [0.0, 1.0, 0.0]},
        "aliases": {"birdsong": "bird"},
    }
    path = tmp_path / "table.json"
    path.write_text(json.dumps(doc))
    m = load_bga_matrix(path)
    assert m.view == "audio_custom"
    assert m.lookup("birdsong") == (1.0, 0.0, 0.0)
    assert m.lookup("rain") == (0.0, 1.0, 0.0)
    assert m.lookup("hum") is None


def test_load_rejects_malformed_table(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"view":"audio_custom"}')
    with pytest.raises(FormatError, match="malformed"):
        load_bga_matrix(path)
    path.write_text("{nope")
    with pytest.raises(FormatError, match="invalid JSON"):
        load_bga_matrix(path)


def test_no_builtin_table_for_audio():
    with pytest.raises(ValueError, match="no built-in"):
        bga_matrix_for_view("audio_custom")
