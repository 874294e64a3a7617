"""Inference against pretrained checkpoints (manual opt-in).

All heavy imports are deferred into the backends so the package works
without torch or transformers installed; constructing a backend is the
moment weights are required. No checkpoint is ever downloaded silently:
whatever Hugging Face id or local path the config names must already be
resolvable in the local cache or filesystem.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from soundscape_align import load_waveform, segment_waveform

from .config import AdapterConfig
from .errors import AdapterError

AST_SAMPLE_RATE = 16_000


def _import_models():
    try:
        import torch
        import transformers
    except ImportError as exc:
        raise AdapterError(
            "real mode needs torch and transformers; install "
            "soundscape-adapter[models] or run with --stub"
        ) from exc
    return torch, transformers


def _load(loader, model_id: str, what: str):
    try:
        return loader(model_id)
    except Exception as exc:
        raise AdapterError(
            f"cannot load {what} checkpoint {model_id!r}: {exc}; "
            "fetch it manually (see README) or run with --stub"
        ) from exc


class EmbeddingBackend:
    """CLIP image towers for street/aerial, AST for sound."""

    def __init__(self, cfg: AdapterConfig):
        torch, transformers = _import_models()
        self._torch = torch
        self.cfg = cfg
        self.device = torch.device(cfg.device)
        self._clip = {}
        for view, model_id in (("street", cfg.street_model), ("aerial", cfg.aerial_model)):
            model = _load(
                transformers.CLIPModel.from_pretrained, model_id, f"{view} encoder"
            )
            processor = _load(
                transformers.CLIPProcessor.from_pretrained, model_id, f"{view} processor"
            )
            self._clip[view] = (model.to(self.device).eval(), processor)
        self._ast = _load(
            transformers.ASTModel.from_pretrained, cfg.sound_model, "sound encoder"
        ).to(self.device).eval()
        self._ast_extractor = _load(
            transformers.ASTFeatureExtractor.from_pretrained,
            cfg.sound_model,
            "sound feature extractor",
        )

    def _image_vector(self, view: str, image_path: Path) -> np.ndarray:
        from PIL import Image

        model, processor = self._clip[view]
        with Image.open(image_path) as img:
            inputs = processor(images=img.convert("RGB"), return_tensors="pt")
        with self._torch.no_grad():
            features = model.get_image_features(
                pixel_values=inputs["pixel_values"].to(self.device)
            )
        return features[0].cpu().numpy().astype(np.float64)

    def street_vector(self, image_path: str | Path) -> np.ndarray:
        return self._image_vector("street", Path(image_path))

    def aerial_vector(self, image_path: str | Path) -> np.ndarray:
        return self._image_vector("aerial", Path(image_path))

    def sound_clip_vectors(self, audio_path: str | Path) -> list[np.ndarray]:
        """One mean-pooled vector per fixed-length clip of the recording."""
        waveform = load_waveform(audio_path, expected_rate_hz=AST_SAMPLE_RATE)
        clips = segment_waveform(waveform, clip_seconds=self.cfg.clip_seconds)
        out = []
        for clip in clips:
            inputs = self._ast_extractor(
                clip.samples, sampling_rate=AST_SAMPLE_RATE, return_tensors="pt"
            )
            with self._torch.no_grad():
                hidden = self._ast(
                    input_values=inputs["input_values"].to(self.device)
                ).last_hidden_state
            out.append(hidden[0].mean(dim=0).cpu().numpy().astype(np.float64))
        return out


class SegmentationBackend:
    """Prompt-based dense segmentation; per-pixel argmax over prompts."""

    def __init__(self, cfg: AdapterConfig):
        torch, transformers = _import_models()
        self._torch = torch
        self.cfg = cfg
        self.device = torch.device(cfg.device)
        self._models = {}
        for view, model_id in (
            ("street", cfg.street_seg_model),
            ("aerial", cfg.aerial_seg_model),
        ):
            model = _load(
                transformers.CLIPSegForImageSegmentation.from_pretrained,
                model_id,
                f"{view} segmentation",
            )
            processor = _load(
                transformers.CLIPSegProcessor.from_pretrained,
                model_id,
                f"{view} segmentation processor",
            )
            self._models[view] = (model.to(self.device).eval(), processor)

    def raster(self, view: str, image_path: str | Path, class_names) -> "np.ndarray":
        from PIL import Image

        model, processor = self._models[view]
        names = list(class_names)
        with Image.open(image_path) as img:
            image = img.convert("RGB")
            inputs = processor(
                text=names, images=[image] * len(names), return_tensors="pt"
            )
        with self._torch.no_grad():
            logits = model(
                input_ids=inputs["input_ids"].to(self.device),
                pixel_values=inputs["pixel_values"].to(self.device),
                attention_mask=inputs.get("attention_mask", None),
            ).logits
        if logits.ndim == 2:  # single prompt collapses the class axis
            logits = logits[None]
        return logits.argmax(dim=0).cpu().numpy().astype(np.int64)


class AudioTagBackend:
    """Classifier-head label scores from the sound checkpoint."""

    def __init__(self, cfg: AdapterConfig):
        torch, transformers = _import_models()
        self._torch = torch
        self.cfg = cfg
        self.device = torch.device(cfg.device)
        self._model = _load(
            transformers.AutoModelForAudioClassification.from_pretrained,
            cfg.sound_model,
            "audio classifier",
        ).to(self.device).eval()
        self._extractor = _load(
            transformers.ASTFeatureExtractor.from_pretrained,
            cfg.sound_model,
            "sound feature extractor",
        )

    def label_scores(self, audio_path: str | Path) -> dict[str, float]:
        waveform = load_waveform(audio_path, expected_rate_hz=AST_SAMPLE_RATE)
        inputs = self._extractor(
            waveform.samples, sampling_rate=AST_SAMPLE_RATE, return_tensors="pt"
        )
        with self._torch.no_grad():
            logits = self._model(
                input_values=inputs["input_values"].to(self.device)
            ).logits[0]
        scores = self._torch.sigmoid(logits).cpu().numpy()
        id2label = self._model.config.id2label
        return {id2label[i]: float(scores[i]) for i in range(len(scores))}
