"""Site manifest parsing, validation, and exclusion filtering."""

import io

import pytest

from soundscape_align import (
    ALL_EXCLUSION_FLAGS,
    ExclusionFlag,
    Manifest,
    ManifestError,
    SiteRecord,
    filter_sites,
    load_manifest,
    save_manifest,
    validate_manifest,
)

HEADER = "site_id,city,lat,lon,audio_path,street_image_path,aerial_image_path,flags"


def manifest_text(*rows: str) -> str:
    return HEADER + "\n" + "\n".join(rows) + "\n"


GOOD = manifest_text(
    "L001,London,51.5074,-0.1278,audio/L001.wav,street/L001.jpg,aerial/L001.png,",
    "L002,London,51.51,-0.12,audio/L002.wav,street/L002.jpg,aerial/L002.png,speech_dominated",
    "N001,NewYork,40.7128,-74.006,audio/N001.wav,street/N001.jpg,aerial/N001.png,indoor;transient_event",
)


def test_load_round_trip(tmp_path):
    src = tmp_path / "manifest.csv"
    src.write_text(GOOD)
    m = load_manifest(src)
    assert m.site_ids() == ["L001", "L002", "N001"]
    assert m.cities() == ["London", "NewYork"]
    assert m.get("L002").flags == frozenset({ExclusionFlag.SPEECH_DOMINATED})
    assert m.get("N001").flags == frozenset(
        {ExclusionFlag.INDOOR, ExclusionFlag.TRANSIENT_EVENT}
    )

    out = tmp_path / "copy.csv"
    save_manifest(m, out)
    assert load_manifest(out).sites == m.sites


def test_load_from_stream():
    m = load_manifest(io.StringIO(GOOD))
    assert m.get("L001").lat == 51.5074
    assert m.get("L001").lon == -0.1278
    assert m.get("L001").modality_paths() == {
        "audio": "audio/L001.wav",
        "street": "street/L001.jpg",
        "aerial": "aerial/L001.png",
    }


def test_save_sorts_flags_and_uses_lf_endings(tmp_path):
    rec = SiteRecord(
        site_id="A",
        city="X",
        lat=0.0,
        lon=0.0,
        audio_path="a.wav",
        flags=frozenset({ExclusionFlag.TRANSIENT_EVENT, ExclusionFlag.INDOOR}),
    )
    out = tmp_path / "m.csv"
    save_manifest(Manifest(sites=(rec,)), out)
    text = out.read_text()
    assert "indoor;transient_event" in text
    assert text.endswith("\n")
    assert "\r" not in text


def test_unknown_flag_is_row_numbered_error():
    bad = manifest_text(
        "A,X,0,0,a.wav,,,",
        "B,X,0,0,b.wav,,,bogus",
    )
    with pytest.raises(ManifestError, match=r"unknown exclusion flag 'bogus', row 3"):
        load_manifest(io.StringIO(bad))


def test_unparseable_coordinate_is_row_numbered_error():
    bad = manifest_text(
        "A,X,0,0,a.wav,,,",
        "B,X,abc,0,b.wav,,,",
    )
    with pytest.raises(ManifestError, match=r"unparseable coordinate, row 3"):
        load_manifest(io.StringIO(bad))


def test_out_of_range_latitude_is_error():
    bad = manifest_text("A,X,91.0,0,a.wav,,,")
    with pytest.raises(ManifestError, match=r"latitude out of range, row 2"):
        load_manifest(io.StringIO(bad))


def test_out_of_range_longitude_is_error():
    bad = manifest_text("A,X,0,-180.5,a.wav,,,")
    with pytest.raises(ManifestError, match=r"longitude out of range, row 2"):
        load_manifest(io.StringIO(bad))


def test_wrong_column_count_is_error():
    bad = HEADER + "\nA,X,0,0,a.wav,,\n"
    with pytest.raises(ManifestError, match=r"columns.*row 2"):
        load_manifest(io.StringIO(bad))


def test_wrong_header_is_error():
    bad = GOOD.replace("site_id", "site")
    with pytest.raises(ManifestError, match="header"):
        load_manifest(io.StringIO(bad))


def test_empty_file_is_error():
    with pytest.raises(ManifestError, match="empty"):
        load_manifest(io.StringIO(""))


def test_missing_file_is_error(tmp_path):
    with pytest.raises(ManifestError, match="cannot read"):
        load_manifest(tmp_path / "nope.csv")


def test_validate_accepts_good_manifest():
    assert validate_manifest(load_manifest(io.StringIO(GOOD))) == []


def test_validate_flags_duplicates_and_bad_ids():
    m = Manifest(
        sites=(
            SiteRecord("A", "X", 0.0, 0.0, "a.wav"),
            SiteRecord("A", "X", 1.0, 1.0, "b.wav"),
            SiteRecord("B#1", "X", 0.0, 0.0, "c.wav"),
            SiteRecord("", "X", 0.0, 0.0, "d.wav"),
        )
    )
    text = "\n".join(validate_manifest(m))
    assert "duplicate site_id 'A'" in text
    assert "reserved character '#'" in text
    assert "empty site_id" in text


def test_validate_requires_some_modality():
    m = Manifest(sites=(SiteRecord("A", "X", 0.0, 0.0),))
    assert any("no modality" in v for v in validate_manifest(m))


def test_validate_strict_files_checks_existence(tmp_path):
    (tmp_path / "a.wav").write_bytes(b"")
    path = tmp_path / "manifest.csv"
    path.write_text(manifest_text("A,X,0,0,a.wav,missing.jpg,,"))
    m = load_manifest(path)
    assert validate_manifest(m, strict_files=False) == []
    strict = validate_manifest(m, strict_files=True)
    assert len(strict) == 1
    assert "missing.jpg" in strict[0]


def test_validate_strict_files_resolves_against_base_dir(tmp_path):
    (tmp_path / "a.wav").write_bytes(b"")
    m = load_manifest(io.StringIO(manifest_text("A,X,0,0,a.wav,,,")))
    assert validate_manifest(m, strict_files=True, base_dir=tmp_path) == []


def test_filter_sites_drops_flagged():
    m = load_manifest(io.StringIO(GOOD))
    assert filter_sites(m, ALL_EXCLUSION_FLAGS).site_ids() == ["L001"]
    assert filter_sites(m, frozenset()).site_ids() == ["L001", "L002", "N001"]
    assert filter_sites(m, {ExclusionFlag.INDOOR}).site_ids() == ["L001", "L002"]


def test_filter_sites_is_idempotent():
    m = load_manifest(io.StringIO(GOOD))
    once = filter_sites(m, ALL_EXCLUSION_FLAGS)
    assert filter_sites(once, ALL_EXCLUSION_FLAGS).sites == once.sites


def test_cities_in_first_appearance_order():
    text = manifest_text(
        "T1,Tokyo,35.0,139.0,a.wav,,,",
        "L1,London,51.0,0.0,b.wav,,,",
        "T2,Tokyo,35.1,139.1,c.wav,,,",
    )
    assert load_manifest(io.StringIO(text)).cities() == ["Tokyo", "London"]
