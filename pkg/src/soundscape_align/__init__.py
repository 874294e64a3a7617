"""Quantify alignment between urban soundscapes and visual scene features.

The library turns per-site features (sound embeddings, street and
aerial imagery embeddings, semantic segmentation rasters, audio label
probabilities) into pairwise similarity series over a site set and
correlates them, with deterministic permutation-based significance.
"""

from ._version import __version__
from .audio import (
    DEFAULT_SAMPLE_RATE,
    LogMelSpectrogram,
    PatchGrid,
    SpectrogramConfig,
    Waveform,
    hz_to_mel,
    load_waveform,
    log_mel_spectrogram,
    mel_filterbank,
    mel_to_hz,
    patchify,
    periodic_hann,
    segment_waveform,
    stft_power,
    unpatchify,
)
from .ecology import (
    CATEGORIES,
    BGAMatrix,
    BGAVector,
    audio_bga_vector,
    bga_matrix_for_view,
    bga_vector,
    load_bga_matrix,
)
from .errors import (
    ConfigurationError,
    DegenerateSeriesError,
    DegenerateVectorError,
    FormatError,
    ManifestError,
    SoundscapeAlignError,
)
from .estimators import (
    BGAProjector,
    ClassProportionExtractor,
    ClipSegmenter,
    LogMelExtractor,
    Patchifier,
)
from .manifest import (
    ALL_EXCLUSION_FLAGS,
    ExclusionFlag,
    Manifest,
    SiteRecord,
    filter_sites,
    load_manifest,
    save_manifest,
    validate_manifest,
)
from .pipeline import (
    Report,
    RunConfig,
    RunResult,
    emit_report,
    run_pipeline,
)
from .segmentation import ClassDistribution, class_distribution
from .similarity import (
    PairIndex,
    PairVector,
    bga_category_pair_similarity,
    cosine,
    pairwise_similarity,
    write_pair_vector_csv,
)
from .stats import (
    MIN_POSITIVE_P,
    CorrelationResult,
    correlate,
    mantel_permutation_test,
    p_value_t,
    pearson_r,
    pearson_r_values,
    stratify_by_city,
)
from .store import (
    EmbeddingRecord,
    LabelProbabilities,
    LabelRaster,
    aggregate_clip_embeddings,
    clip_record_id,
    collect_site_vectors,
    combine_views,
    is_clip_record,
    l2_normalize,
    parent_site_id,
    read_embeddings,
    read_label_probabilities,
    read_label_raster,
    write_embeddings,
    write_label_probabilities,
    write_label_raster,
)

__all__ = [
    "__version__",
    "ALL_EXCLUSION_FLAGS",
    "CATEGORIES",
    "DEFAULT_SAMPLE_RATE",
    "MIN_POSITIVE_P",
    "BGAMatrix",
    "BGAProjector",
    "BGAVector",
    "ClassDistribution",
    "ClassProportionExtractor",
    "ClipSegmenter",
    "ConfigurationError",
    "CorrelationResult",
    "DegenerateSeriesError",
    "DegenerateVectorError",
    "EmbeddingRecord",
    "ExclusionFlag",
    "FormatError",
    "LabelProbabilities",
    "LabelRaster",
    "LogMelExtractor",
    "LogMelSpectrogram",
    "Manifest",
    "ManifestError",
    "PairIndex",
    "PairVector",
    "PatchGrid",
    "Patchifier",
    "Report",
    "RunConfig",
    "RunResult",
    "SiteRecord",
    "SoundscapeAlignError",
    "SpectrogramConfig",
    "Waveform",
    "aggregate_clip_embeddings",
    "audio_bga_vector",
    "bga_category_pair_similarity",
    "bga_matrix_for_view",
    "bga_vector",
    "class_distribution",
    "clip_record_id",
    "collect_site_vectors",
    "combine_views",
    "correlate",
    "cosine",
    "emit_report",
    "filter_sites",
    "is_clip_record",
    "hz_to_mel",
    "l2_normalize",
    "load_bga_matrix",
    "load_manifest",
    "load_waveform",
    "log_mel_spectrogram",
    "mantel_permutation_test",
    "mel_filterbank",
    "mel_to_hz",
    "p_value_t",
    "pairwise_similarity",
    "parent_site_id",
    "patchify",
    "pearson_r",
    "pearson_r_values",
    "periodic_hann",
    "read_embeddings",
    "read_label_probabilities",
    "read_label_raster",
    "run_pipeline",
    "save_manifest",
    "segment_waveform",
    "stft_power",
    "stratify_by_city",
    "unpatchify",
    "validate_manifest",
    "write_embeddings",
    "write_label_probabilities",
    "write_label_raster",
    "write_pair_vector_csv",
]
