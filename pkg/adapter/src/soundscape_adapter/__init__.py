"""Bridge pretrained sound/vision models to soundscape-align feature files.

Real mode wraps Hugging Face checkpoints (CLIP-architecture image
encoders, AST for sound, CLIPSeg for prompt segmentation) and is a
manual opt-in: checkpoints must already be cached or given as local
paths. Stub mode needs no weights and no media; every output is a pure
function of (record id, modality, stub seed), so runs are byte-identical.
"""

from .config import (
    AERIAL_CLASSES,
    DEFAULT_AERIAL_MODEL,
    DEFAULT_AERIAL_SEG_MODEL,
    DEFAULT_SOUND_MODEL,
    DEFAULT_STREET_MODEL,
    DEFAULT_STREET_SEG_MODEL,
    STREET_CLASSES,
    AdapterConfig,
)
from .errors import AdapterError
from .extract import (
    EMBEDDINGS_FILE,
    ERRORS_FILE,
    LABEL_PROBABILITIES_FILE,
    RASTER_DIR,
    ExtractOutcome,
    SiteError,
    extract_all,
    extract_embeddings,
    segment_images,
)
from .stub import (
    AUDIO_STUB_LABELS,
    STUB_DIM,
    STUB_RASTER_SIZE,
    stub_label_probabilities,
    stub_raster,
    stub_unit_vector,
)

__all__ = [
    "AERIAL_CLASSES",
    "AUDIO_STUB_LABELS",
    "AdapterConfig",
    "AdapterError",
    "DEFAULT_AERIAL_MODEL",
    "DEFAULT_AERIAL_SEG_MODEL",
    "DEFAULT_SOUND_MODEL",
    "DEFAULT_STREET_MODEL",
    "DEFAULT_STREET_SEG_MODEL",
    "EMBEDDINGS_FILE",
    "ERRORS_FILE",
    "ExtractOutcome",
    "LABEL_PROBABILITIES_FILE",
    "RASTER_DIR",
    "STREET_CLASSES",
    "STUB_DIM",
    "STUB_RASTER_SIZE",
    "SiteError",
    "extract_all",
    "extract_embeddings",
    "segment_images",
    "stub_label_probabilities",
    "stub_raster",
    "stub_unit_vector",
]
