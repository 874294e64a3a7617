"""Generate the committed 12-site synthetic pipeline fixture.

Twelve usable sites across three pseudo-cities (plus one flagged site
that default exclusion removes). All features derive from two latent
per-site quantities:

* a unit vector z_i driving every embedding modality: street carries
  it with little noise, aerial with much more, so the street~sound
  correlation is higher than aerial~sound by construction;
* an "urbanness" scalar u_i driving raster class mixes and audio label
  probabilities, so ecological comparisons are nonzero.

One Tokyo site has no aerial embedding (exercises complete-case
filtering), street rasters use the "Car" alias and an unmapped "Sky"
class, and the audio labels include an unmapped "hum".

Run from this directory: python make_pipeline12.py
The output tree (pipeline12/) is committed; regeneration is only needed
if the construction itself changes, after which the golden report must
be re-frozen (see golden/README inside the tree).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from soundscape_align.store import (
    EmbeddingRecord,
    LabelProbabilities,
    LabelRaster,
    clip_record_id,
    write_embeddings,
    write_label_probabilities,
    write_label_raster,
)

HERE = Path(__file__).parent
OUT = HERE / "pipeline12"

SITES = [
    # (site_id, city, lat, lon, flags)
    ("L001", "London", 51.501, -0.141, ""),
    ("L002", "London", 51.513, -0.089, ""),
    ("L003", "London", 51.476, -0.163, ""),
    ("L004", "London", 51.528, -0.058, ""),
    ("L005", "London", 51.494, -0.183, ""),
    ("N001", "NewYork", 40.712, -74.006, ""),
    ("N002", "NewYork", 40.748, -73.986, ""),
    ("N003", "NewYork", 40.730, -73.997, ""),
    ("N004", "NewYork", 40.758, -73.978, ""),
    ("T001", "Tokyo", 35.681, 139.767, ""),
    ("T002", "Tokyo", 35.659, 139.700, ""),
    ("T003", "Tokyo", 35.689, 139.692, ""),
    ("X001", "London", 51.507, -0.128, "speech_dominated;indoor"),
]

LATENT_DIM = 8
SOUND_DIM = 24
VIEW_DIM = 32
CLIPS_PER_SITE = 3
RASTER_SIDE = 24

STREET_LEGEND = {
    0: "Road",
    1: "Sidewalk",
    2: "Building",
    3: "Vegetation",
    4: "Waterbody",
    5: "Person",
    6: "Car",  # resolves through the vehicle alias
    7: "Sky",  # deliberately unmapped
}

AERIAL_LEGEND = {
    0: "Grassland",
    1: "Forest/Vegetation",
    2: "Wetlands",
    3: "Waterbody",
    4: "Bare Land",
    5: "Road/Sidewalk",
    6: "Building",
    7: "Vehicles",
    8: "Cropland",
    9: "Clouds",  # deliberately unmapped
}

AUDIO_BGA_TABLE = {
    "view": "audio_custom",
    "weights": {
        "bird": [1.0, 0.0, 0.0],
        "insect": [1.0, 0.0, 0.0],
        "wind": [0.0, 1.0, 0.0],
        "rain": [0.0, 1.0, 0.0],
        "water": [0.3, 1.0, 0.0],
        "traffic": [0.0, 0.0, 1.0],
        "speech": [0.0, 0.0, 1.0],
        "construction": [0.0, 0.0, 1.0],
    },
}


def street_probs(u: float) -> np.ndarray:
    raw = np.array(
        [
            0.20 + 0.30 * u,  # Road
            0.10,  # Sidewalk
            0.10 + 0.25 * u,  # Building
            0.45 * (1 - u),  # Vegetation
            0.05 * (1 - u),  # Waterbody
            0.03,  # Person
            0.05 + 0.05 * u,  # Car
            0.04,  # Sky
        ]
    )
    return raw / raw.sum()


def aerial_probs(u: float) -> np.ndarray:
    raw = np.array(
        [
            0.20 * (1 - u),  # Grassland
            0.30 * (1 - u),  # Forest/Vegetation
            0.02,  # Wetlands
            0.05,  # Waterbody
            0.03,  # Bare Land
            0.25 * u,  # Road/Sidewalk
            0.30 * u,  # Building
            0.05 * u,  # Vehicles
            0.08 * (1 - u),  # Cropland
            0.02,  # Clouds
        ]
    )
    return raw / raw.sum()


def main() -> None:
    rng = np.random.default_rng(20240917)
    (OUT / "features" / "rasters").mkdir(parents=True, exist_ok=True)

    manifest_lines = [
        "site_id,city,lat,lon,audio_path,street_image_path,aerial_image_path,flags"
    ]
    for site_id, city, lat, lon, flags in SITES:
        manifest_lines.append(
            f"{site_id},{city},{lat},{lon},audio/{site_id}.wav,"
            f"street/{site_id}.jpg,aerial/{site_id}.png,{flags}"
        )
    (OUT / "manifest.csv").write_text(
        "\n".join(manifest_lines) + "\n", encoding="utf-8"
    )

    records = []
    probs = []
    for site_id, city, lat, lon, flags in SITES:
        z = rng.normal(size=LATENT_DIM)
        u = float(rng.uniform(0.1, 0.9))
        # Weave urbanness into the embedding latent so the raster-based
        # comparisons against sound come out positive too.
        z[0] = 1.8 * (2.0 * u - 1.0) + 0.4 * z[0]
        z /= np.linalg.norm(z)

        sound_base = np.tile(z, SOUND_DIM // LATENT_DIM)
        for k in range(CLIPS_PER_SITE):
            clip = sound_base + 0.25 * rng.normal(size=SOUND_DIM)
            records.append(
                EmbeddingRecord(
                    site_id=clip_record_id(site_id, k),
                    modality="sound",
                    model_id="ast-stub",
                    vector=clip,
                )
            )
        street_vec = np.tile(z, VIEW_DIM // LATENT_DIM) + 0.35 * rng.normal(
            size=VIEW_DIM
        )
        records.append(
            EmbeddingRecord(
                site_id=site_id,
                modality="street",
                model_id="clip-stub",
                vector=street_vec,
            )
        )
        aerial_vec = np.tile(z, VIEW_DIM // LATENT_DIM) + 0.6 * rng.normal(
            size=VIEW_DIM
        )
        if site_id != "T003":  # exercises complete-case filtering
            records.append(
                EmbeddingRecord(
                    site_id=site_id,
                    modality="aerial",
                    model_id="remoteclip-stub",
                    vector=aerial_vec,
                )
            )

        street_cells = rng.choice(
            len(STREET_LEGEND), size=(RASTER_SIDE, RASTER_SIDE), p=street_probs(u)
        ).astype(np.int64)
        write_label_raster(
            LabelRaster(
                width=RASTER_SIDE,
                height=RASTER_SIDE,
                legend=STREET_LEGEND,
                cells=street_cells,
            ),
            OUT / "features" / "rasters" / f"{site_id}.street.json",
        )
        aerial_cells = rng.choice(
            len(AERIAL_LEGEND), size=(RASTER_SIDE, RASTER_SIDE), p=aerial_probs(u)
        ).astype(np.int64)
        write_label_raster(
            LabelRaster(
                width=RASTER_SIDE,
                height=RASTER_SIDE,
                legend=AERIAL_LEGEND,
                cells=aerial_cells,
            ),
            OUT / "features" / "rasters" / f"{site_id}.aerial.json",
        )

        def bounded(x: float) -> float:
            return float(np.clip(x, 0.0, 1.0))

        probs.append(
            LabelProbabilities(
                site_id=site_id,
                labels={
                    "bird": bounded(0.7 * (1 - u) + 0.1 * rng.normal()),
                    "insect": bounded(0.3 * (1 - u) + 0.05 * rng.normal()),
                    "wind": bounded(0.3 + 0.1 * rng.normal()),
                    "rain": bounded(0.15 + 0.05 * rng.normal()),
                    "traffic": bounded(0.6 * u + 0.1 * rng.normal()),
                    "speech": bounded(0.3 * u + 0.05 * rng.normal()),
                    "construction": bounded(0.2 * u + 0.05 * rng.normal()),
                    "hum": 0.1,  # deliberately unmapped
                },
            )
        )

    write_embeddings(records, OUT / "features" / "embeddings.jsonl")
    write_label_probabilities(probs, OUT / "features" / "label_probabilities.jsonl")
    (OUT / "features" / "audio_bga.json").write_text(
        json.dumps(AUDIO_BGA_TABLE, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"fixture written under {OUT}")


if __name__ == "__main__":
    main()
