import csv
import io
import json

import numpy as np
import pytest

from pixinterp.cli import main
from pixinterp.raster import RasterImage, read_pgm, write_pgm
from pixinterp.report import COLUMNS, records_from_csv
from pixinterp.synth import ShapeKind, ShapeSpec, generate_shape, textured_image


def write_mask(path, mask, textured=False):
    px = textured_image(mask, seed=1) if textured else mask.astype(np.uint8) * 255
    path.write_bytes(write_pgm(RasterImage(px)))
    return path


def rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


@pytest.fixture
def disk_pgm(tmp_path):
    return write_mask(tmp_path / "disk.pgm", generate_shape(ShapeSpec(ShapeKind.DISK, 25)))


@pytest.fixture
def star_pgm(tmp_path):
    spec = ShapeSpec(ShapeKind.SPICULATED, 30, lobes=8, amplitude=0.5)
    return write_mask(tmp_path / "star.pgm", generate_shape(spec), textured=True)


# -- analyze / render ------------------------------------------------------------------

def test_analyze_disk(disk_pgm, tmp_path, capsys):
    out = tmp_path / "disk.csv"
    assert main(["analyze", str(disk_pgm), "--out", str(out)]) == 0
    (row,) = rows(out)
    assert float(row["fill_ratio"]) <= 0.05 and row["degenerate_flags"] == ""
    assert json.loads((tmp_path / "disk.csv.config.json").read_text())["n_bins"] == 360
    assert "fill_count" in capsys.readouterr().out


def test_analyze_star(star_pgm, tmp_path):
    out = tmp_path / "star.csv"
    overlay = tmp_path / "star.overlay.pgm"
    assert main(["analyze", str(star_pgm), "--out", str(out), "--overlay", str(overlay), "--label", "M"]) == 0
    (row,) = rows(out)
    assert int(row["n_extrema"]) == 8 and float(row["fill_ratio"]) >= 0.15
    assert row["label"] == "Malignant"
    assert read_pgm(overlay.read_bytes()).pixels.max() == 255


def test_analyze_with_roi(tmp_path):
    mask = np.zeros((200, 200), bool)
    mask[50:50 + 61, 100:100 + 61] = generate_shape(ShapeSpec(ShapeKind.DISK, 25), 61, 61)
    path = write_mask(tmp_path / "roi.pgm", mask, textured=True)
    out = tmp_path / "roi.csv"
    # disk centre at row 80, col 130 -> MIAS y = 199 - 80
    assert main(["analyze", str(path), "--roi", "130", "119", "26", "--out", str(out)]) == 0
    (row,) = rows(out)
    assert abs(float(row["region_centroid_x"]) - 130) < 1 and abs(float(row["region_centroid_y"]) - 80) < 1


def test_unreadable_image(tmp_path):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5 10 10 255\n\x00\x01")
    out = tmp_path / "bad.csv"
    assert main(["analyze", str(bad), "--out", str(out)]) == 2
    assert not out.exists()


def test_blank_image_is_detection_error(tmp_path):
    blank = write_mask(tmp_path / "blank.pgm", np.zeros((40, 40), bool))
    assert main(["analyze", str(blank), "--out", str(tmp_path / "b.csv")]) == 3


def test_bad_config_exit_code(disk_pgm, tmp_path):
    assert main(["analyze", str(disk_pgm), "--n-bins", "2"]) == 4
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"unknown_field": 1}))
    assert main(["analyze", str(disk_pgm), "--config", str(cfg)]) == 4


def test_config_file_and_flag_precedence(disk_pgm, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_bins": 180, "prominence": 3.0}))
    out = tmp_path / "o.csv"
    assert main(["analyze", str(disk_pgm), "--config", str(cfg), "--prominence", "1.5", "--out", str(out)]) == 0
    saved = json.loads((tmp_path / "o.csv.config.json").read_text())
    assert saved["n_bins"] == 180 and saved["prominence"] == 1.5


def test_render_exports(star_pgm, tmp_path):
    args = ["render", str(star_pgm), "--out", str(tmp_path / "r.pgm"),
            "--signature-csv", str(tmp_path / "sig.csv"), "--extrema-csv", str(tmp_path / "ext.csv"),
            "--geometry-json", str(tmp_path / "geo.json")]
    assert main(args) == 0
    assert len((tmp_path / "sig.csv").read_text().strip().splitlines()) == 361
    assert len((tmp_path / "ext.csv").read_text().strip().splitlines()) == 9
    assert len(json.loads((tmp_path / "geo.json").read_text())["vertices"]) == 8
    assert (tmp_path / "r.pgm.config.json").exists()


# -- batch -----------------------------------------------------------------------------

def make_batch_dir(tmp_path, corrupt="img2"):
    d = tmp_path / "imgs"
    d.mkdir()
    lines = []
    for i, (kind, amp, sev) in enumerate([(ShapeKind.DISK, 0.0, "B"), (ShapeKind.SPICULATED, 0.5, "M"),
                                          (ShapeKind.LOBULAR, 0.08, "B")]):
        name = f"img{i}"
        spec = ShapeSpec(kind, 20, lobes=8 if kind is not ShapeKind.DISK else 0, amplitude=amp)
        mask = np.zeros((128, 128), bool)
        m = generate_shape(spec)
        mask[30:30 + m.shape[0], 40:40 + m.shape[1]] = m
        write_mask(d / f"{name}.pgm", mask, textured=True)
        cy, cx = 30 + (m.shape[0] - 1) / 2, 40 + (m.shape[1] - 1) / 2
        lines.append(f"{name} F CIRC {sev} {round(cx)} {round(127 - cy)} {round(spec.max_radius)}")
    if corrupt:
        (d / f"{corrupt}.pgm").write_bytes(b"P5 128 128 255\n")
    lines.append("img9 F NORM")
    info = tmp_path / "info.txt"
    info.write_text("\n".join(reversed(lines)) + "\n")
    return d, info


def test_batch_flags_corrupt_image(tmp_path):
    d, info = make_batch_dir(tmp_path)
    out = tmp_path / "feat.csv"
    assert main(["batch", "--images", str(d), "--info", str(info), "--out", str(out),
                 "--overlays", str(tmp_path / "ov")]) == 0
    got = rows(out)
    assert [r["image_id"] for r in got] == ["img0", "img1", "img2"]
    assert got[2]["degenerate_flags"] == "error:decode" and got[2]["fill_count"] == ""
    assert got[0]["degenerate_flags"] == "" and got[1]["degenerate_flags"] == ""
    assert sorted(p.name for p in (tmp_path / "ov").iterdir()) == ["img0.overlay.pgm", "img1.overlay.pgm"]
    assert (tmp_path / "feat.csv.config.json").exists()


def test_batch_is_byte_identical_and_parallel_safe(tmp_path):
    d, info = make_batch_dir(tmp_path)
    outs = [tmp_path / f"f{i}.csv" for i in range(3)]
    main(["batch", "--images", str(d), "--info", str(info), "--out", str(outs[0])])
    main(["batch", "--images", str(d), "--info", str(info), "--out", str(outs[1])])
    main(["batch", "--images", str(d), "--info", str(info), "--out", str(outs[2]), "--jobs", "2"])
    assert outs[0].read_bytes() == outs[1].read_bytes() == outs[2].read_bytes()


def test_batch_empty_directory(tmp_path):
    d = tmp_path / "empty"
    d.mkdir()
    info = tmp_path / "info.txt"
    info.write_text("mdb001 G CIRC B 535 425 197\n")
    out = tmp_path / "f.csv"
    assert main(["batch", "--images", str(d), "--info", str(info), "--out", str(out)]) == 0
    assert out.read_text() == ",".join(COLUMNS) + "\n"


def test_batch_missing_info_file(tmp_path):
    assert main(["batch", "--images", str(tmp_path), "--info", str(tmp_path / "nope.txt"),
                 "--out", str(tmp_path / "f.csv")]) == 2


# -- train / eval ----------------------------------------------------------------------

def test_synth_train_eval(tmp_path):
    corpus = tmp_path / "corpus"
    assert main(["synth", "--out", str(corpus), "--n-per-class", "10", "--textured", "--canvas", "128"]) == 0
    assert len(list(corpus.glob("*.pgm"))) == 20
    labels = rows(corpus / "labels.csv")
    assert {r["label"] for r in labels} == {"Benign", "Malignant"}
    feats, model, report = tmp_path / "f.csv", tmp_path / "m.json", tmp_path / "rep.json"
    assert main(["batch", "--images", str(corpus), "--info", str(corpus / "info.txt"), "--out", str(feats)]) == 0
    assert not any(r.failed for r in records_from_csv(feats.read_text()))
    assert main(["train", "--features", str(feats), "--model", str(model)]) == 0
    doc = json.loads(model.read_text())
    assert doc["format_version"] == 1 and len(doc["test_ids"]) == 6 and doc["config"]["seed"] == 0
    assert main(["eval", "--features", str(feats), "--model", str(model), "--report", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["subset"] == "test" and rep["metrics"]["accuracy"] >= 95
    assert report.with_suffix(".txt").read_text().startswith("Scheme")


def test_eval_table_two_predictions(tmp_path, capsys):
    path = tmp_path / "pred.csv"
    pairs = [("M", "M")] * 51 + [("B", "B")] * 61 + [("B", "M")] * 5 + [("M", "B")] * 1
    path.write_text("label,prediction\n" + "".join(f"{t},{p}\n" for t, p in pairs))
    report = tmp_path / "rep.json"
    assert main(["eval", "--predictions", str(path), "--report", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["confusion_matrix"] == {"tp": 51, "fp": 5, "tn": 61, "fn": 1}
    assert rep["metrics"]["accuracy"] == pytest.approx(94.92, abs=0.05)
    assert "94.92" in capsys.readouterr().out


def test_train_rejects_unlabeled_csv(tmp_path, disk_pgm):
    out = tmp_path / "u.csv"
    main(["analyze", str(disk_pgm), "--out", str(out)])
    assert main(["train", "--features", str(out), "--model", str(tmp_path / "m.json")]) == 2


def test_train_rejects_single_class(tmp_path, disk_pgm):
    out = tmp_path / "b.csv"
    main(["analyze", str(disk_pgm), "--out", str(out), "--label", "B"])
    assert main(["train", "--features", str(out), "--model", str(tmp_path / "m.json")]) == 4
