import json
import logging
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from cli.commands import build_config, build_parser, main
from cli.report import parse_structured
from cli.settings import default_settings, load_settings, save_settings
from cli.svg_plot import amoeba_points, tentacle_directions
from preprocessor import NOISY, Status, parse_poly, preprocess, tropicalization, tropism_intersection

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
WORKED = [str(SAMPLES / "worked_f.txt"), str(SAMPLES / "worked_g.txt")]
DISJOINT = [str(SAMPLES / "disjoint_f.txt"), str(SAMPLES / "disjoint_g.txt")]


@pytest.fixture
def run(tmp_path):
    """main() with a settings file inside tmp_path, so the home directory is never touched."""
    settings = tmp_path / "settings.json"

    def _run(*argv: str) -> int:
        return main(["--settings", str(settings), *argv])

    _run.settings = settings
    return _run


def classes(svg_path: Path):
    root = ET.parse(svg_path).getroot()
    return [el.get("class") for el in root.iter() if el.get("class")]


def write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_analyze_worked_pair(run, capsys):
    assert run("analyze", *WORKED) == 0
    out = capsys.readouterr().out
    assert "status: FactorLikely" in out
    assert "(1,0)" in out
    assert "-0.222222222" in out
    assert "-0.11111111" in out


def test_analyze_disjoint_pair(run, capsys):
    assert run("analyze", *DISJOINT) == 1
    out = capsys.readouterr().out
    assert "status: NoTropism" in out
    assert "tropisms: none" in out


def test_empty_file_writes_nothing(run, tmp_path, capsys):
    empty = write(tmp_path, "empty.txt", "  \n")
    report = tmp_path / "report.txt"
    assert run("analyze", empty, WORKED[1], "--out", str(report)) == 2
    assert not report.exists()
    assert "empty file" in capsys.readouterr().err


def test_syntax_error_shows_the_position(run, tmp_path, capsys):
    bad = write(tmp_path, "bad.txt", "2*x + * y")
    assert run("analyze", bad, WORKED[1]) == 2
    err = capsys.readouterr().err
    assert "error: " in err
    assert f"{bad}:6" in err
    assert "position 6" in err


def test_coefficient_out_of_double_range(run, tmp_path, capsys):
    big = write(tmp_path, "big.txt", "1e400*x + 1")
    assert run("analyze", big, WORKED[1]) == 2
    err = capsys.readouterr().err
    assert big in err
    assert "double precision" in err


def test_missing_file(run, tmp_path, capsys):
    assert run("analyze", str(tmp_path / "nowhere.txt"), WORKED[1]) == 2
    assert "nowhere.txt" in capsys.readouterr().err


def test_structured_report_round_trips(run, tmp_path, worked_pair):
    report = tmp_path / "report.json"
    assert run("analyze", *WORKED, "--format", "structured", "--out", str(report)) == 0
    certificate = parse_structured(report.read_text(encoding="utf-8"))
    assert certificate == preprocess(*worked_pair)
    assert "timings" not in json.loads(report.read_text(encoding="utf-8"))


def test_timings_are_opt_in(run, tmp_path):
    report = tmp_path / "report.json"
    assert run("analyze", *WORKED, "--format", "structured", "--timings", "--out", str(report)) == 0
    assert "timings" in json.loads(report.read_text(encoding="utf-8"))


def test_format_from_the_settings_file(run, capsys):
    run.settings.write_text(json.dumps({"format": "structured"}), encoding="utf-8")
    assert run("analyze", *DISJOINT) == 1
    assert parse_structured(capsys.readouterr().out).status is Status.NO_TROPISM


def test_invalid_settings_value(run, capsys):
    run.settings.write_text(json.dumps({"rank_tolerance": -1}), encoding="utf-8")
    assert run("analyze", *WORKED) == 2
    assert "rank_tolerance" in capsys.readouterr().err


def test_gen_is_reproducible(run, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for prefix in (first, second):
        assert run("gen", "--deg-factor", "2", "--deg-cofactor", "3", "--seed", "7", "--out", str(prefix)) == 0
    for suffix in ("_f.txt", "_g.txt", "_truth.json"):
        assert Path(f"{first}{suffix}").read_bytes() == Path(f"{second}{suffix}").read_bytes()
    truth = json.loads(Path(f"{first}_truth.json").read_text(encoding="utf-8"))
    assert truth["planted"] and truth["seed"] == 7
    assert parse_poly(truth["factor"]).total_degree() == 2


def test_gen_then_analyze(run, tmp_path):
    prefix = tmp_path / "case"
    assert run("gen", "--deg-factor", "2", "--deg-cofactor", "3", "--seed", "7", "--out", str(prefix)) == 0
    assert run("analyze", f"{prefix}_f.txt", f"{prefix}_g.txt") == 0


def test_gen_rejects_bad_degrees(run, tmp_path, capsys):
    assert run("gen", "--deg-factor", "0", "--out", str(tmp_path / "case")) == 2
    assert "degrees" in capsys.readouterr().err
    assert not (tmp_path / "case_f.txt").exists()


def test_gen_writes_nothing_when_one_output_fails(run, tmp_path):
    prefix = tmp_path / "case"
    (tmp_path / "case_truth.json").mkdir()
    assert run("gen", "--deg-factor", "2", "--deg-cofactor", "3", "--out", str(prefix)) == 2
    assert sorted(p.name for p in tmp_path.iterdir()) == ["case_truth.json"]


def test_gen_into_a_missing_directory(run, tmp_path):
    prefix = tmp_path / "nowhere" / "case"
    assert run("gen", "--deg-factor", "2", "--deg-cofactor", "3", "--out", str(prefix)) == 2
    assert not (tmp_path / "nowhere").exists()


def test_plot_pentagon(run, tmp_path):
    out = tmp_path / "pentagon.svg"
    assert run("plot", str(SAMPLES / "pentagon.txt"), "--out", str(out)) == 0
    found = classes(out)
    assert found.count("vertex") == 5
    assert found.count("ray") == 5
    assert found.count("support") == 6
    assert found.count("hull") == 1


def test_plot_monomial(run, tmp_path):
    out = tmp_path / "monomial.svg"
    assert run("plot", write(tmp_path, "m.txt", "x^2*y^3"), "--out", str(out)) == 0
    found = classes(out)
    assert found.count("vertex") == 1
    assert "ray" not in found
    assert "hull" not in found


def test_plot_highlights_common_rays(run, tmp_path, worked_pair):
    out = tmp_path / "fan.svg"
    assert run("plot", *WORKED, "--what", "fan", "--out", str(out)) == 0
    f, g = worked_pair
    common = tropism_intersection(tropicalization(f), tropicalization(g))
    found = classes(out)
    assert found.count("common-ray") == len(common)
    assert "vertex" not in found


def test_demo_amoeba(run, tmp_path):
    out = tmp_path / "amoeba.svg"
    assert run("demo-amoeba", "--out", str(out), "--radii", "20", "--angles", "8") == 0
    found = classes(out)
    assert found.count("tentacle") == 3
    assert found.count("sample") > 0


def test_tentacles_of_the_unit_triangle():
    assert sorted(tentacle_directions()) == [(-1, 0), (0, -1), (1, 1)]


def test_far_amoeba_points_follow_the_tentacles():
    points = amoeba_points()
    far = points[np.linalg.norm(points, axis=1) > 10]
    assert len(far) > 0
    directions = np.array(tentacle_directions(), dtype=float)
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    cosines = (far / np.linalg.norm(far, axis=1)[:, None]) @ directions.T
    assert np.all(cosines.max(axis=1) >= 0.95)
    # every tentacle is reached
    assert set(np.argmax(cosines, axis=1)) == {0, 1, 2}


def test_save_and_load_settings(run, tmp_path):
    assert run("--save-settings", "analyze", *DISJOINT, "--tolerance-rank", "1e-7") == 1
    settings = load_settings(run.settings)
    assert settings["rank_tolerance"] == 1e-7
    assert settings["format"] == "text"


def test_settings_round_trip(tmp_path):
    settings = default_settings()
    settings["root_tolerance"] = 1e-4
    path = save_settings(settings, tmp_path / "nested" / "settings.json")
    assert load_settings(path) == settings


def test_bad_settings_file_is_ignored(tmp_path, caplog):
    path = tmp_path / "settings.json"
    path.write_text("{not json", encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        assert load_settings(path) == default_settings()
    assert "error loading settings" in caplog.text


def test_flags_beat_the_settings_file():
    settings = default_settings()
    settings["rank_tolerance"] = 1e-5
    args = build_parser().parse_args(["analyze", "f.txt", "g.txt", "--tolerance-rank", "1e-7"])
    assert build_config(args, settings).rank_tolerance == 1e-7
    args = build_parser().parse_args(["analyze", "f.txt", "g.txt"])
    assert build_config(args, settings).rank_tolerance == 1e-5


def test_noisy_preset():
    args = build_parser().parse_args(["analyze", "f.txt", "g.txt", "--noisy"])
    config = build_config(args, default_settings())
    assert config.rank_tolerance == NOISY.rank_tolerance
    assert config.root_tolerance == NOISY.root_tolerance
    args = build_parser().parse_args(["analyze", "f.txt", "g.txt", "--noisy", "--tolerance-rank", "1e-3"])
    assert build_config(args, default_settings()).rank_tolerance == 1e-3
