"""Dataset manifest: the CSV that anchors every sample site.

Each row ties a site id and geographic coordinate to the audio clip,
street-level image, and aerial image recorded there, plus curation flags
describing why a site should be excluded from analysis. The header is
fixed::

    site_id,city,lat,lon,audio_path,street_image_path,aerial_image_path,flags

``flags`` is a semicolon-separated subset of the four exclusion flags;
empty path cells mean the modality is absent for that site.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .errors import ManifestError

MANIFEST_HEADER = (
    "site_id",
    "city",
    "lat",
    "lon",
    "audio_path",
    "street_image_path",
    "aerial_image_path",
    "flags",
)

#: Reserved separator: embedding stores use "<site_id>#<clip>" ids for
#: clip-level records, so site ids themselves must not contain it.
CLIP_ID_SEPARATOR = "#"


class ExclusionFlag(str, Enum):
    """Closed set of curation reasons for dropping a site."""

    SPEECH_DOMINATED = "speech_dominated"
    INDOOR = "indoor"
    TRANSIENT_EVENT = "transient_event"
    ADVERSE_CONDITIONS = "adverse_conditions"


ALL_EXCLUSION_FLAGS = frozenset(ExclusionFlag)


@dataclass(frozen=True)
class SiteRecord:
    site_id: str
    city: str
    lat: float
    lon: float
    audio_path: str | None = None
    street_image_path: str | None = None
    aerial_image_path: str | None = None
    flags: frozenset[ExclusionFlag] = field(default_factory=frozenset)

    def modality_paths(self) -> dict[str, str]:
        """Present modality file references, keyed by modality name."""
        paths = {
            "audio": self.audio_path,
            "street": self.street_image_path,
            "aerial": self.aerial_image_path,
        }
        return {k: v for k, v in paths.items() if v}


@dataclass(frozen=True)
class Manifest:
    sites: tuple[SiteRecord, ...]
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.sites)

    def site_ids(self) -> list[str]:
        return [s.site_id for s in self.sites]

    def cities(self) -> list[str]:
        """Distinct city labels in first-appearance order."""
        seen: dict[str, None] = {}
        for s in self.sites:
            seen.setdefault(s.city, None)
        return list(seen)

    def get(self, site_id: str) -> SiteRecord:
        for s in self.sites:
            if s.site_id == site_id:
                return s
        raise KeyError(site_id)


def _parse_flags(cell: str, row_num: int) -> frozenset[ExclusionFlag]:
    flags = set()
    for token in cell.split(";"):
        token = token.strip()
        if not token:
            continue
        try:
            flags.add(ExclusionFlag(token))
        except ValueError:
            raise ManifestError(
                f"unknown exclusion flag {token!r}, row {row_num}"
            ) from None
    return frozenset(flags)


def _parse_coord(cell: str, name: str, row_num: int, bound: float) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ManifestError(f"unparseable coordinate, row {row_num}") from None
    if not math.isfinite(value) or abs(value) > bound:
        kind = "latitude" if name == "lat" else "longitude"
        raise ManifestError(f"{kind} out of range, row {row_num}")
    return value


def load_manifest(source: str | Path | IO[str]) -> Manifest:
    """Parse a manifest CSV from a path or text stream.

    Row order is preserved. Raises ManifestError naming the offending row
    for malformed CSV, a wrong header, unparseable or out-of-range
    coordinates, and unknown flags.
    """
    if hasattr(source, "read"):
        return _load_from_stream(source, source_path="")
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return _load_from_stream(io.StringIO(text), source_path=str(path))


def _load_from_stream(stream: IO[str], source_path: str) -> Manifest:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("manifest is empty, expected a header row") from None
    if tuple(h.strip() for h in header) != MANIFEST_HEADER:
        raise ManifestError(
            "bad manifest header: expected "
            + ",".join(MANIFEST_HEADER)
            + ", got "
            + ",".join(header)
        )
    sites = []
    for row in reader:
        row_num = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(MANIFEST_HEADER):
            raise ManifestError(
                f"expected {len(MANIFEST_HEADER)} columns, got {len(row)}, row {row_num}"
            )
        site_id, city, lat, lon, audio, street, aerial, flags = (
            cell.strip() for cell in row
        )
        sites.append(
            SiteRecord(
                site_id=site_id,
                city=city,
                lat=_parse_coord(lat, "lat", row_num, 90.0),
                lon=_parse_coord(lon, "lon", row_num, 180.0),
                audio_path=audio or None,
                street_image_path=street or None,
                aerial_image_path=aerial or None,
                flags=_parse_flags(flags, row_num),
            )
        )
    return Manifest(sites=tuple(sites), source_path=source_path)


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    """Write the manifest back to CSV; load(save(m)) == m."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for s in manifest.sites:
            writer.writerow(
                [
                    s.site_id,
                    s.city,
                    repr(s.lat),
                    repr(s.lon),
                    s.audio_path or "",
                    s.street_image_path or "",
                    s.aerial_image_path or "",
                    ";".join(sorted(f.value for f in s.flags)),
                ]
            )


def validate_manifest(
    manifest: Manifest,
    strict_files: bool = False,
    base_dir: str | Path | None = None,
) -> list[str]:
    """Check every site invariant; returns violations (empty means valid).

    Violations are data, not exceptions: callers decide whether to abort.
    With ``strict_files``, referenced modality files must exist on disk;
    relative paths resolve against ``base_dir`` (default: the manifest's
    own directory, else the working directory).
    """
    violations = []
    if base_dir is None:
        base_dir = Path(manifest.source_path).parent if manifest.source_path else Path(".")
    base_dir = Path(base_dir)

    seen: dict[str, int] = {}
    for s in manifest.sites:
        seen[s.site_id] = seen.get(s.site_id, 0) + 1
    for site_id, count in seen.items():
        if count > 1:
            violations.append(f"duplicate site_id {site_id!r} ({count} rows)")

    for s in manifest.sites:
        if not s.site_id:
            violations.append("empty site_id")
        elif CLIP_ID_SEPARATOR in s.site_id:
            violations.append(
                f"site_id {s.site_id!r} contains reserved character "
                f"{CLIP_ID_SEPARATOR!r}"
            )
        if not (math.isfinite(s.lat) and -90.0 <= s.lat <= 90.0):
            violations.append(f"site {s.site_id!r}: latitude out of range")
        if not (math.isfinite(s.lon) and -180.0 <= s.lon <= 180.0):
            violations.append(f"site {s.site_id!r}: longitude out of range")
        paths = s.modality_paths()
        if not paths:
            violations.append(f"site {s.site_id!r}: no modality path present")
        if strict_files:
            for modality, ref in paths.items():
                p = Path(ref)
                if not p.is_absolute():
                    p = base_dir / p
                if not p.exists():
                    violations.append(
                        f"site {s.site_id!r}: {modality} file not found: {ref}"
                    )
    return violations


def filter_sites(
    manifest: Manifest, policy: Iterable[ExclusionFlag] = ALL_EXCLUSION_FLAGS
) -> Manifest:
    """Drop sites carrying any flag in ``policy``; order is preserved.

    Idempotent; an empty policy is the identity.
    """
    policy = frozenset(ExclusionFlag(p) for p in policy)
    kept = tuple(s for s in manifest.sites if not (s.flags & policy))
    return replace(manifest, sites=kept)
