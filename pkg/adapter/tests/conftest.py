import pytest

MANIFEST = """site_id,city,lat,lon,audio_path,street_image_path,aerial_image_path,flags
A1,CityA,51.5,-0.12,audio/A1.wav,street/A1.jpg,aerial/A1.png,
A2,CityA,51.6,-0.13,audio/A2.wav,street/A2.jpg,aerial/A2.png,
B1,CityB,40.7,-74.0,audio/B1.wav,street/B1.jpg,aerial/B1.png,
B2,CityB,40.8,-74.1,audio/B2.wav,street/B2.jpg,aerial/B2.png,
"""

SITE_IDS = ("A1", "A2", "B1", "B2")


@pytest.fixture()
def manifest_path(tmp_path):
    path = tmp_path / "manifest.csv"
    path.write_text(MANIFEST, encoding="utf-8")
    return path
