"""CLI behavior and exit codes."""

import pytest

from soundscape_adapter import cli


def run(argv):
    return cli.main(argv)


def test_extract_stub_succeeds(manifest_path, tmp_path, capsys):
    out = tmp_path / "features"
    code = run(
        ["extract", "--manifest", str(manifest_path), "--out", str(out), "--stub"]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "embeddings.jsonl" in stdout
    assert (out / "embeddings.jsonl").exists()
    assert (out / "rasters" / "A1.street.json").exists()
    assert (out / "label_probabilities.jsonl").exists()


def test_cli_stub_runs_are_byte_identical(manifest_path, tmp_path):
    dirs = [tmp_path / "one", tmp_path / "two"]
    for out in dirs:
        assert (
            run(
                [
                    "extract",
                    "--manifest",
                    str(manifest_path),
                    "--out",
                    str(out),
                    "--stub",
                    "--stub-seed",
                    "5",
                ]
            )
            == 0
        )
    files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    assert files
    for rel in files:
        assert (dirs[0] / rel).read_bytes() == (dirs[1] / rel).read_bytes(), rel


def test_missing_manifest_exits_1(tmp_path, capsys):
    code = run(
        [
            "extract",
            "--manifest",
            str(tmp_path / "nope.csv"),
            "--out",
            str(tmp_path / "out"),
            "--stub",
        ]
    )
    assert code == 1
    assert "nope.csv" in capsys.readouterr().err


def test_bad_clip_count_exits_1(manifest_path, tmp_path, capsys):
    code = run(
        [
            "extract",
            "--manifest",
            str(manifest_path),
            "--out",
            str(tmp_path / "out"),
            "--stub",
            "--clips",
            "0",
        ]
    )
    assert code == 1
    assert "clips_per_site" in capsys.readouterr().err


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as excinfo:
        run(["extract"])
    assert excinfo.value.code == 1


def test_internal_error_exits_2(manifest_path, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(
        cli, "extract_all", lambda cfg: (_ for _ in ()).throw(RuntimeError("boom"))
    )
    code = run(
        [
            "extract",
            "--manifest",
            str(manifest_path),
            "--out",
            str(tmp_path / "out"),
            "--stub",
        ]
    )
    assert code == 2
    assert "internal error" in capsys.readouterr().err


def test_help_exits_0():
    with pytest.raises(SystemExit) as excinfo:
        run(["extract", "--help"])
    assert excinfo.value.code == 0
