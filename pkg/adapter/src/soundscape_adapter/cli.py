"""Command-line front end.

``soundscape-adapter extract`` walks a manifest and writes the feature
files the core pipeline consumes. Exit codes match the core tool:
0 success, 1 problem with the inputs (including usage errors),
2 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from soundscape_align import SoundscapeAlignError

from .config import AdapterConfig
from .errors import AdapterError
from .extract import extract_all


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for bugs."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="soundscape-adapter",
        description=(
            "Bridge pretrained sound/vision checkpoints to the "
            "soundscape-align feature-file formats."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="emit embeddings, rasters, label scores")
    p.add_argument("--manifest", required=True, help="manifest CSV path")
    p.add_argument("--out", required=True, help="output feature directory")
    p.add_argument(
        "--stub",
        action="store_true",
        help="deterministic keyed-hash outputs; no media, no weights",
    )
    p.add_argument("--stub-seed", type=int, default=0, help="stub stream seed")
    p.add_argument(
        "--clips",
        type=int,
        default=3,
        help="sound clips per site in stub mode (real mode derives it "
        "from the recording length)",
    )
    p.add_argument(
        "--clip-seconds", type=float, default=10.0, help="clip length in seconds"
    )
    p.add_argument(
        "--media-root",
        default="",
        help="base directory for relative media paths (default: manifest dir)",
    )
    p.add_argument("--device", default="cpu", help="torch device for real mode")
    p.add_argument(
        "--no-audio-labels",
        dest="audio_labels",
        action="store_false",
        help="skip the audio label-probability file",
    )
    p.set_defaults(func=_cmd_extract)
    return parser


def _cmd_extract(args: argparse.Namespace) -> int:
    cfg = AdapterConfig(
        manifest_path=args.manifest,
        out_dir=args.out,
        media_root=args.media_root,
        device=args.device,
        stub_mode=args.stub,
        stub_seed=args.stub_seed,
        clips_per_site=args.clips,
        clip_seconds=args.clip_seconds,
        audio_labels=args.audio_labels,
    )
    outcome = extract_all(cfg)
    for path in outcome.written:
        print(f"wrote {path}")
    if outcome.errors:
        for err in outcome.errors:
            print(f"error [{err.site_id}/{err.stage}]: {err.message}", file=sys.stderr)
        print(f"{len(outcome.errors)} site error(s); see errors.jsonl", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AdapterError, SoundscapeAlignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
