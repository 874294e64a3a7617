"""Command-line front end.

Subcommands mirror the pipeline stages so each is runnable alone:

* ``validate``     check a manifest and report violations
* ``spectrogram``  WAV -> log-Mel debug JSON
* ``features``     rasters and label scores -> distribution/BGA tables
* ``similarity``   features -> per-comparison pair-series CSVs
* ``correlate``    features -> correlation report (CSV + JSON)
* ``pipeline``     all of the above into one output directory

Exit codes: 0 success, 1 problem with the inputs (including usage
errors), 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from .audio import SpectrogramConfig, load_waveform, log_mel_spectrogram
from .errors import SoundscapeAlignError
from .manifest import (
    ALL_EXCLUSION_FLAGS,
    ExclusionFlag,
    load_manifest,
    validate_manifest,
)
from .pipeline import (
    RunConfig,
    build_pair_vectors,
    emit_features,
    emit_pair_csvs,
    emit_report,
    load_inputs,
    run_pipeline,
)
from .store import write_spectrogram_json

_FLAG_NAMES = sorted(f.value for f in ExclusionFlag)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for bugs."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_exclude(text: str) -> frozenset[ExclusionFlag]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return frozenset(ExclusionFlag(n) for n in names)
    except ValueError:
        bad = sorted(set(names) - {f.value for f in ExclusionFlag})
        raise argparse.ArgumentTypeError(
            f"unknown exclusion flags {bad}; choose from {_FLAG_NAMES}"
        ) from None


def _add_run_arguments(parser: _Parser, with_stats: bool) -> None:
    parser.add_argument("--manifest", required=True, help="manifest CSV path")
    parser.add_argument(
        "--features", required=True, help="feature directory (see docs for layout)"
    )
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--exclude",
        type=_parse_exclude,
        default=ALL_EXCLUSION_FLAGS,
        metavar="FLAGS",
        help=f"comma-separated flags to exclude, from {_FLAG_NAMES} "
        '(default: all four; pass "" to keep every site)',
    )
    parser.add_argument(
        "--city",
        action="append",
        default=[],
        metavar="NAME",
        help="restrict the run to this city (repeatable)",
    )
    parser.add_argument(
        "--strict-files",
        action="store_true",
        help="require every referenced media file to exist",
    )
    if with_stats:
        parser.add_argument("--seed", type=int, default=42, help="permutation seed")
        parser.add_argument(
            "--permutations",
            type=int,
            default=9999,
            metavar="B",
            help="Mantel permutation count (min 99)",
        )


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        manifest_path=args.manifest,
        features_dir=args.features,
        out_dir=args.out,
        seed=getattr(args, "seed", 42),
        permutations=getattr(args, "permutations", 9999),
        exclude=args.exclude,
        cities=tuple(args.city),
        strict_files=args.strict_files,
    )


def _cmd_validate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    violations = validate_manifest(manifest, strict_files=args.strict_files)
    if violations:
        for violation in violations:
            print(violation, file=sys.stderr)
        print(f"{len(violations)} violation(s) in {args.manifest}", file=sys.stderr)
        return 1
    print(f"manifest OK: {len(manifest)} sites, {len(manifest.cities())} cities")
    return 0


def _cmd_spectrogram(args: argparse.Namespace) -> int:
    cfg = SpectrogramConfig(
        n_fft=args.n_fft,
        hop=args.hop,
        n_mels=args.n_mels,
        fmin_hz=args.fmin,
        fmax_hz=args.fmax,
        log_floor=args.log_floor,
    )
    waveform = load_waveform(args.audio, expected_rate_hz=args.rate)
    spectrogram = log_mel_spectrogram(waveform, cfg)
    write_spectrogram_json(spectrogram, args.out)
    print(
        f"wrote {args.out}: {spectrogram.n_mels} bands x "
        f"{spectrogram.n_frames} frames from {waveform.duration_seconds:.3f} s"
    )
    return 0


def _print_skips(skipped) -> None:
    for skip in skipped:
        print(
            f"skipped {skip.comparison_id} [{skip.scope}]: {skip.reason}",
            file=sys.stderr,
        )


def _cmd_features(args: argparse.Namespace) -> int:
    inputs = load_inputs(_run_config(args))
    for path in emit_features(inputs, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_similarity(args: argparse.Namespace) -> int:
    inputs = load_inputs(_run_config(args))
    pair_vectors, skipped = build_pair_vectors(inputs)
    _print_skips(skipped)
    for path in emit_pair_csvs(pair_vectors, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_correlate(args: argparse.Namespace) -> int:
    result = run_pipeline(_run_config(args))
    _print_skips(result.report.skipped)
    for path in emit_report(result.report, args.out):
        print(f"wrote {path}")
    print(f"{len(result.report.rows)} correlation rows")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    result = run_pipeline(_run_config(args))
    _print_skips(result.report.skipped)
    written = emit_features(result.inputs, args.out)
    written += emit_pair_csvs(result.pair_vectors, args.out)
    written += emit_report(result.report, args.out)
    for path in written:
        print(f"wrote {path}")
    print(f"{len(result.report.rows)} correlation rows")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="soundscape-align",
        description=(
            "Quantify how well visual scene representations align with "
            "urban soundscapes via pairwise similarity correlation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "validate", parents=[], help="check a manifest", add_help=True
    )
    p.add_argument("--manifest", required=True, help="manifest CSV path")
    p.add_argument("--strict-files", action="store_true")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("spectrogram", help="WAV to log-Mel debug JSON")
    p.add_argument("--audio", required=True, help="input WAV file")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--rate", type=int, default=16_000, help="required sample rate")
    p.add_argument("--n-fft", type=int, default=400)
    p.add_argument("--hop", type=int, default=160)
    p.add_argument("--n-mels", type=int, default=128)
    p.add_argument("--fmin", type=float, default=0.0)
    p.add_argument("--fmax", type=float, default=8_000.0)
    p.add_argument("--log-floor", type=float, default=1e-10)
    p.set_defaults(func=_cmd_spectrogram)

    p = sub.add_parser("features", help="emit distribution and BGA tables")
    _add_run_arguments(p, with_stats=False)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("similarity", help="emit pair-series CSVs")
    _add_run_arguments(p, with_stats=False)
    p.set_defaults(func=_cmd_similarity)

    p = sub.add_parser("correlate", help="emit the correlation report")
    _add_run_arguments(p, with_stats=True)
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("pipeline", help="run every stage")
    _add_run_arguments(p, with_stats=True)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SoundscapeAlignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
