"""Opt-in checks against real checkpoints.

Run with SOUNDSCAPE_ADAPTER_REAL_MODELS=1 on a machine where the
configured checkpoints are already cached (or reachable); nothing here
downloads implicitly in CI.
"""

import os

import numpy as np
import pytest

pytestmark = pytest.mark.skipif(
    os.environ.get("SOUNDSCAPE_ADAPTER_REAL_MODELS") != "1",
    reason="real checkpoints are a manual opt-in; set SOUNDSCAPE_ADAPTER_REAL_MODELS=1",
)


def test_street_clip_vit_l14_embedding_has_dim_768(manifest_path, tmp_path):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    from PIL import Image

    from soundscape_adapter import AdapterConfig
    from soundscape_adapter.real import EmbeddingBackend

    cfg = AdapterConfig(
        manifest_path=str(manifest_path), out_dir=str(tmp_path / "out")
    )
    backend = EmbeddingBackend(cfg)
    image_path = tmp_path / "street.png"
    rng = np.random.default_rng(0)
    Image.fromarray(
        rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
    ).save(image_path)
    vector = backend.street_vector(image_path)
    assert vector.shape == (768,)
