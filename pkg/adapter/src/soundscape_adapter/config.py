"""Adapter run configuration.

Model ids are Hugging Face checkpoint names; any CLIP-architecture
checkpoint works for the two image encoders and any CLIPSeg-compatible
checkpoint for prompt segmentation. Stub mode touches no media and no
weights, so every field except the stub seed is inert there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from soundscape_align import bga_matrix_for_view

#: Street scene class names, reused as default segmentation prompts so
#: the emitted legends resolve in the ecological weight table without
#: aliases.
STREET_CLASSES: tuple[str, ...] = tuple(bga_matrix_for_view("street").weights)

#: Aerial land-cover class names, the target legend for aerial rasters.
AERIAL_CLASSES: tuple[str, ...] = tuple(bga_matrix_for_view("aerial").weights)

DEFAULT_SOUND_MODEL = "MIT/ast-finetuned-audioset-10-10-0.4593"
DEFAULT_STREET_MODEL = "openai/clip-vit-large-patch14"
DEFAULT_AERIAL_MODEL = "openai/clip-vit-large-patch14"
DEFAULT_STREET_SEG_MODEL = "CIDAS/clipseg-rd64-refined"
DEFAULT_AERIAL_SEG_MODEL = "CIDAS/clipseg-rd64-refined"


@dataclass(frozen=True)
class AdapterConfig:
    """Everything one extraction run needs.

    ``media_root`` resolves relative media paths from the manifest;
    empty means the manifest's own directory. ``stub_mode`` swaps model
    inference for deterministic keyed-hash outputs that are pure
    functions of (record id, modality, stub_seed).
    """

    manifest_path: str
    out_dir: str
    media_root: str = ""
    device: str = "cpu"
    stub_mode: bool = False
    stub_seed: int = 0
    clips_per_site: int = 3
    clip_seconds: float = 10.0
    audio_labels: bool = True
    sound_model: str = DEFAULT_SOUND_MODEL
    street_model: str = DEFAULT_STREET_MODEL
    aerial_model: str = DEFAULT_AERIAL_MODEL
    street_seg_model: str = DEFAULT_STREET_SEG_MODEL
    aerial_seg_model: str = DEFAULT_AERIAL_SEG_MODEL
    street_prompts: tuple[str, ...] = field(default=STREET_CLASSES)

    def __post_init__(self) -> None:
        if not self.manifest_path:
            raise ValueError("manifest_path is required")
        if not self.out_dir:
            raise ValueError("out_dir is required")
        if self.clips_per_site < 1:
            raise ValueError("clips_per_site must be at least 1")
        if not self.clip_seconds > 0.0:
            raise ValueError("clip_seconds must be positive")
        if not self.device:
            raise ValueError("device must be non-empty")
        prompts = tuple(str(p) for p in self.street_prompts)
        if not prompts:
            raise ValueError("street_prompts must be non-empty")
        object.__setattr__(self, "street_prompts", prompts)
