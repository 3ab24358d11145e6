import json
import math
import sys

import pytest

import batch_run
import veech_cli
from reference.reproduce_families import family_row
from src.constructions import FamilyKind, regular_octagon_surface, square_torus
from src.surface_io import save_json, save_surface

INCONGRUENT = {
    "format_version": 1,
    "polygons": [[[0, 0], [2, 0], [1.5, 1], [0.5, 1]]],
    "pairing": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
}


def run_cli(monkeypatch, *argv):
    monkeypatch.setattr(sys, "argv", ["veech_cli.py", *map(str, argv)])
    with pytest.raises(SystemExit) as info:
        veech_cli.main()
    return info.value.code


def test_build_then_analyze(monkeypatch, tmp_path, capsys):
    path = tmp_path / "dihedral_4.json"
    assert run_cli(monkeypatch, "build", "dihedral", 4, "-o", path) == 0
    out = capsys.readouterr().out
    assert "genus 5" in out
    assert "<->" in out
    assert run_cli(monkeypatch, "analyze", path, "--no-veech", "--no-copies") == 0
    report = json.loads((tmp_path / "dihedral_4_report.json").read_text(encoding="utf-8"))
    assert report["genus"] == 5
    assert report["veech"] is None


def test_analyze_writes_the_requested_report(monkeypatch, tmp_path):
    source = tmp_path / "octagon.json"
    save_surface(regular_octagon_surface(), source, verbose=False)
    target = tmp_path / "reports" / "octagon.json"
    assert run_cli(monkeypatch, "--epsilon", "1e-9", "analyze", source, "--report", target) == 0
    report = json.loads(target.read_text(encoding="utf-8"))
    assert report["veech"]["order"] == 16


def test_exit_codes(monkeypatch, tmp_path):
    assert run_cli(monkeypatch, "analyze", tmp_path / "missing.json") == 2
    bad = tmp_path / "bad.json"
    save_json(bad, INCONGRUENT, verbose=False)
    assert run_cli(monkeypatch, "analyze", bad) == 1
    torus = tmp_path / "torus.json"
    save_surface(square_torus(), torus, verbose=False)
    assert run_cli(monkeypatch, "analyze", torus) == 1
    assert run_cli(monkeypatch, "build", "cyclic", 4, "--l3", 0.5, "-o", tmp_path / "c.json") == 1


def test_render_command(monkeypatch, tmp_path):
    source = tmp_path / "dihedral_3.json"
    assert run_cli(monkeypatch, "build", "dihedral", 3, "-o", source) == 0
    figure = tmp_path / "fig" / "dihedral_3.svg"
    assert run_cli(monkeypatch, "render", source, "-o", figure, "--overlay", "segments") == 0
    assert figure.exists()
    torus = tmp_path / "torus.json"
    save_surface(square_torus(), torus, verbose=False)
    assert run_cli(monkeypatch, "render", torus, "-o", tmp_path / "torus.svg", "--overlay", "copies") == 0


@pytest.fixture
def surface_dir(tmp_path):
    root = tmp_path / "surfaces"
    root.mkdir()
    save_surface(regular_octagon_surface(), root / "octagon.json", verbose=False)
    save_json(root / "bad.json", INCONGRUENT, verbose=False)
    (root / "notes_report.json").write_text("{}", encoding="utf-8")
    return root


def test_collect_batches(surface_dir, tmp_path):
    batches = batch_run.collect_batches(surface_dir)
    assert list(batches) == ["_root"]
    assert [p.name for p in batches["_root"]] == ["bad.json", "octagon.json"]
    nested = tmp_path / "nested"
    (nested / "a").mkdir(parents=True)
    save_surface(regular_octagon_surface(), nested / "a" / "octagon.json", verbose=False)
    assert list(batch_run.collect_batches(nested)) == ["a"]


def test_process_single_file(surface_dir, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    ok = batch_run.process_single_file(surface_dir / "octagon.json", out, veech=False)
    assert ok["status"] == "success"
    assert batch_run.is_file_completed(surface_dir / "octagon.json", out)
    failed = batch_run.process_single_file(surface_dir / "bad.json", out)
    assert failed["status"] == "failed"
    assert failed["error"].startswith("ValidationError")
    skipped = batch_run.process_single_file(surface_dir / "octagon.json", out, resume=True)
    assert skipped["status"] == "skipped"


def test_filter_completed_files(surface_dir, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    batches = batch_run.collect_batches(surface_dir)
    batch_run.process_single_file(surface_dir / "octagon.json", out, veech=False)
    pending, n_skipped = batch_run.filter_completed_files(batches, out)
    assert n_skipped == 1
    assert [p.name for p in pending["_root"]] == ["bad.json"]


def test_batch_main(monkeypatch, surface_dir, tmp_path):
    out = tmp_path / "out"
    monkeypatch.setattr(
        sys,
        "argv",
        ["batch_run.py", "-i", str(surface_dir), "-o", str(out), "--no-veech", "--max-workers", "2"],
    )
    with pytest.raises(SystemExit) as info:
        batch_run.main()
    assert info.value.code == 0
    summary = json.loads((out / "_batch_summary.json").read_text(encoding="utf-8"))
    assert summary["success"] == 1
    assert summary["failed"] == 1
    assert (out / "octagon_report.json").exists()


def test_family_row():
    row = family_row(FamilyKind.DIHEDRAL, 4)
    assert row["genus"] == 5
    assert row["shortest_saddle"] == pytest.approx(0.2718281828)
    assert row["group"] == "Dihedral(4)"
    assert row["order"] == 8
    assert row["o_distance"] == pytest.approx(math.hypot(0.5, 0.2718281828 / 2))
    assert family_row(FamilyKind.CYCLIC, 3, veech=False)["group"] is None
