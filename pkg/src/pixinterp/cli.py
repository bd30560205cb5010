"""Command-line front end.

Subcommands: analyze, batch, train, eval, synth, render. Every output file
gets its RunConfig alongside it (``<output>.config.json``) or embedded in it.
Exit codes: 0 success, 2 input/decode, 3 detection/degeneracy, 4 config.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import classifier as clf
from .classifier import Label, LinearModel, Sample
from .dataset import MiasRecord, extract_roi, parse_mias_info
from .errors import ConfigError, DecodeError, DetectionError, PixInterpError
from .interp import overlay
from .pipeline import Analysis, RunConfig, analyze_mask, feature_vector, segment
from .polygeom import geometry_json
from .raster import RasterImage, read_pgm, write_pgm
from .report import FeatureRecord, records_from_csv, records_to_csv
from .signature import extrema_csv, signature_csv
from .synth import generate_corpus, textured_image

log = logging.getLogger("pixinterp")

_CONFIG_FLAGS = {
    "n_bins": int,
    "smoothing_window": int,
    "prominence": float,
    "min_separation": int,
    "se_side": int,
    "min_area": int,
    "margin_factor": float,
    "regularization": float,
    "epochs": int,
    "seed": int,
    "feature_mode": str,
    "train_fraction": float,
}


# -- helpers -----------------------------------------------------------------

def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _write_with_config(path: Path, text: str, config: RunConfig) -> None:
    _write_text(path, text)
    _write_text(path.with_name(path.name + ".config.json"), config.to_json() + "\n")


def _load_config(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    return RunConfig.from_dict(data)


def _read_image(path: Path) -> RasterImage:
    try:
        return read_pgm(path.read_bytes())
    except OSError as exc:
        raise DecodeError(f"cannot read {path}: {exc}") from None


def _analyze_image(img: RasterImage, record: MiasRecord | None, config: RunConfig) -> Analysis:
    if record is not None:
        mask = extract_roi(img, record, config.margin_factor, config.se_side, config.min_area)
    else:
        mask = segment(img, config)
    return analyze_mask(mask, config)


def _write_overlay(path: Path, a: Analysis) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(write_pgm(overlay(a.mask, a.circle, a.edges)))


def _stage_of(exc: Exception) -> str:
    if isinstance(exc, DecodeError):
        return "decode"
    if isinstance(exc, DetectionError):
        return "detection"
    if isinstance(exc, PixInterpError):
        return "degenerate"
    return "internal"


def _roi_record(args, image_id: str) -> MiasRecord | None:
    if args.roi:
        x, y, r = args.roi
        return MiasRecord(image_id, "F", "MISC", None, x, y, r)
    if args.info:
        info = parse_mias_info(Path(args.info).read_text())
        for rec in info.records:
            if rec.refnum == (args.refnum or image_id) and rec.has_coordinates:
                return rec
        raise DetectionError(f"no annotated record for {args.refnum or image_id}")
    return None


# -- analyze / render --------------------------------------------------------

def cmd_analyze(args) -> int:
    config = _load_config(args)
    path = Path(args.image)
    img = _read_image(path)
    record = _roi_record(args, path.stem)
    a = _analyze_image(img, record, config)
    label = Label.parse(args.label) if args.label else (record.severity if record else None)
    rec = FeatureRecord.from_analysis(path.stem, a, label)
    out = Path(args.out) if args.out else path.with_suffix(".features.csv")
    _write_with_config(out, records_to_csv([rec]), config)
    if args.overlay:
        _write_overlay(Path(args.overlay), a)
    print(records_to_csv([rec]), end="")
    return 0


def cmd_render(args) -> int:
    config = _load_config(args)
    path = Path(args.image)
    img = _read_image(path)
    a = _analyze_image(img, _roi_record(args, path.stem), config)
    _write_overlay(Path(args.out), a)
    _write_text(Path(args.out).with_name(Path(args.out).name + ".config.json"), config.to_json() + "\n")
    if args.signature_csv:
        _write_text(Path(args.signature_csv), signature_csv(a.smoothed))
    if args.extrema_csv:
        _write_text(Path(args.extrema_csv), extrema_csv(a.vertex_extrema, a.centroid))
    if args.geometry_json:
        _write_text(Path(args.geometry_json), geometry_json(a.polygon, a.circle) + "\n")
    return 0


# -- batch -------------------------------------------------------------------

def _batch_one(job) -> FeatureRecord:
    image_id, path, record, label, config, overlay_dir = job
    try:
        img = _read_image(Path(path))
        a = _analyze_image(img, record, config)
    except Exception as exc:  # one bad image never aborts the batch
        log.warning("%s: %s", image_id, exc)
        return FeatureRecord.failure(image_id, _stage_of(exc), label)
    if overlay_dir:
        _write_overlay(Path(overlay_dir) / f"{image_id}.overlay.pgm", a)
    return FeatureRecord.from_analysis(image_id, a, label)


def batch_jobs(image_dir: Path, records: list[MiasRecord], config: RunConfig,
               overlay_dir: str | None, auto_detect: bool = False) -> list[tuple]:
    jobs, seen = [], {}
    for rec in sorted(records, key=lambda r: r.refnum):
        if not rec.has_coordinates and not auto_detect:
            continue
        path = image_dir / f"{rec.refnum}.pgm"
        if not path.exists():
            log.info("%s: no image file, skipped", rec.refnum)
            continue
        seen[rec.refnum] = seen.get(rec.refnum, 0) + 1
        image_id = rec.refnum if seen[rec.refnum] == 1 else f"{rec.refnum}_{seen[rec.refnum]}"
        jobs.append((image_id, str(path), None if auto_detect else rec, rec.severity, config, overlay_dir))
    return jobs


def cmd_batch(args) -> int:
    config = _load_config(args)
    image_dir = Path(args.images)
    if not image_dir.is_dir():
        raise DecodeError(f"{image_dir} is not a directory")
    try:
        info = parse_mias_info(Path(args.info).read_text())
    except OSError as exc:
        raise DecodeError(f"cannot read annotation file: {exc}") from None
    for lineno, line in info.rejects:
        log.warning("info line %d rejected: %s", lineno, line.strip())
    jobs = batch_jobs(image_dir, info.records, config, args.overlays, args.detect == "auto")
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_batch_one, jobs))
    else:
        rows = [_batch_one(job) for job in jobs]
    _write_with_config(Path(args.out), records_to_csv(rows), config)
    failed = sum(r.failed for r in rows)
    print(f"{len(rows)} rows written to {args.out} ({failed} flagged)")
    return 0


# -- train / eval ------------------------------------------------------------

def _labeled_samples(records: list[FeatureRecord], mode: str):
    usable = [r for r in records if r.label is not None and not r.failed and r.fill_count is not None]
    if not usable:
        raise DecodeError("no labeled, analyzable rows in the feature CSV")
    samples = [Sample(feature_vector(r.fill_count, r.fill_ratio, r.symmetric_diff, mode), r.label)
               for r in usable]
    return usable, samples


def cmd_train(args) -> int:
    config = _load_config(args)
    records = records_from_csv(Path(args.features).read_text())
    usable, samples = _labeled_samples(records, config.feature_mode)
    labels = [s.label for s in samples]
    if len(set(labels)) < 2:
        raise ConfigError("training set contains a single class")
    if config.train_fraction < 1:
        train_idx, test_idx = clf.stratified_split(labels, config.train_fraction, config.seed)
    else:
        train_idx, test_idx = list(range(len(samples))), []
    try:
        model = clf.train_svm([samples[i] for i in train_idx], config.regularization,
                              config.epochs, config.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    doc = json.loads(model.to_json())
    doc["feature_mode"] = config.feature_mode
    doc["train_ids"] = [usable[i].image_id for i in train_idx]
    doc["test_ids"] = [usable[i].image_id for i in test_idx]
    doc["config"] = asdict(config)
    _write_text(Path(args.model), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"model trained on {len(train_idx)} rows, {len(test_idx)} held out -> {args.model}")
    return 0


def _read_predictions(path: Path) -> tuple[list[Label], list[Label]]:
    reader = csv.DictReader(io.StringIO(path.read_text()))
    if not reader.fieldnames or not {"label", "prediction"} <= set(reader.fieldnames):
        raise DecodeError("predictions CSV needs label and prediction columns")
    truth, preds = [], []
    for row in reader:
        try:
            truth.append(Label.parse(row["label"]))
            preds.append(Label.parse(row["prediction"]))
        except ValueError as exc:
            raise DecodeError(str(exc)) from None
    return preds, truth


def metrics_report(cm: clf.ConfusionMatrix, config: RunConfig, **extra) -> dict:
    m = clf.compute_metrics(cm)
    return {"confusion_matrix": asdict(cm), "metrics": asdict(m), "config": asdict(config), **extra}


def cmd_eval(args) -> int:
    config = _load_config(args)
    extra = {}
    if args.predictions:
        preds, truth = _read_predictions(Path(args.predictions))
        extra["source"] = str(args.predictions)
    else:
        if not (args.features and args.model):
            raise ConfigError("eval needs --predictions, or --features with --model")
        doc = json.loads(Path(args.model).read_text())
        model = LinearModel.from_json(json.dumps(doc))
        mode = doc.get("feature_mode", config.feature_mode)
        records = records_from_csv(Path(args.features).read_text())
        usable, samples = _labeled_samples(records, mode)
        subset = args.subset
        if subset == "test" and not doc.get("test_ids"):
            subset = "all"
        if subset != "all":
            wanted = set(doc.get(f"{subset}_ids", []))
            chosen = [i for i, r in enumerate(usable) if r.image_id in wanted]
        else:
            chosen = list(range(len(usable)))
        if not chosen:
            raise DecodeError(f"no rows in the {subset} subset")
        preds = [clf.predict(model, samples[i].features)[0] for i in chosen]
        truth = [samples[i].label for i in chosen]
        extra.update(subset=subset, model=str(args.model), feature_mode=mode)
    cm = clf.confusion_matrix(preds, truth)
    report = metrics_report(cm, config, **extra)
    table = clf.metrics_table(cm, clf.compute_metrics(cm))
    if args.report:
        out = Path(args.report)
        _write_text(out, json.dumps(report, indent=2, sort_keys=True) + "\n")
        _write_text(out.with_suffix(".txt"), table)
    print(table, end="")
    return 0


# -- synth -------------------------------------------------------------------

def _place(mask: np.ndarray, canvas: int, rng: np.random.Generator) -> tuple[np.ndarray, int, int]:
    h, w = mask.shape
    if h > canvas or w > canvas:
        raise ConfigError(f"canvas {canvas} smaller than shape {h}x{w}")
    r0 = int(rng.integers(0, canvas - h + 1))
    c0 = int(rng.integers(0, canvas - w + 1))
    out = np.zeros((canvas, canvas), dtype=bool)
    out[r0 : r0 + h, c0 : c0 + w] = mask
    return out, r0, c0


def cmd_synth(args) -> int:
    config = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    items = generate_corpus(args.n_per_class, config.seed)
    rng = np.random.default_rng(config.seed + 1)
    spec_cols = [f for f in items[0].spec.to_row()]
    label_rows, info_lines = [], []
    for i, item in enumerate(items):
        mask, r0, c0 = item.mask, 0, 0
        if args.canvas:
            mask, r0, c0 = _place(mask, args.canvas, rng)
        pixels = textured_image(mask, seed=config.seed + i) if args.textured else mask.astype(np.uint8) * 255
        fname = f"{item.name}.pgm"
        (out_dir / fname).write_bytes(write_pgm(RasterImage(pixels)))
        cx, cy = item.spec.center
        height = mask.shape[0]
        x, y = round(cx + c0), round(height - 1 - (cy + r0))
        radius = math.ceil(item.spec.max_radius)
        abn = "SPIC" if item.label is Label.MALIGNANT else "CIRC"
        info_lines.append(f"{item.name} F {abn} {item.label.value[0]} {x} {y} {radius}")
        label_rows.append([fname, item.label.value] + [item.spec.to_row()[c] for c in spec_cols])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["filename", "label"] + spec_cols)
    for row in label_rows:
        w.writerow([f"{v:.6g}" if isinstance(v, float) else v for v in row])
    _write_with_config(out_dir / "labels.csv", buf.getvalue(), config)
    _write_text(out_dir / "info.txt", "\n".join(info_lines) + "\n")
    print(f"{len(items)} images written to {out_dir}")
    return 0


# -- argument parsing ----------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (overrides --config)")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    for name, typ in _CONFIG_FLAGS.items():
        flag = "--" + name.replace("_", "-")
        if name == "feature_mode":
            g.add_argument("--feature", dest=name, choices=["count-ratio", "count-only", "symdiff"])
        elif name == "regularization":
            g.add_argument(flag, "--lambda", dest=name, type=typ)
        else:
            g.add_argument(flag, dest=name, type=typ)


def _add_roi_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--roi", nargs=3, type=int, metavar=("X", "Y", "R"),
                   help="annotated centre and radius in MIAS coordinates (origin bottom-left)")
    p.add_argument("--info", help="MIAS annotation file to look the image up in")
    p.add_argument("--refnum", help="record to use from --info (default: image file stem)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pixinterp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one PGM image")
    p.add_argument("image")
    p.add_argument("--out", help="feature CSV path (default: <image>.features.csv)")
    p.add_argument("--overlay", help="write the interpolation overlay PGM here")
    p.add_argument("--label", help="ground-truth label to record (B/M)")
    _add_roi_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="write overlay and signature/geometry exports")
    p.add_argument("image")
    p.add_argument("--out", required=True, help="overlay PGM path")
    p.add_argument("--signature-csv")
    p.add_argument("--extrema-csv")
    p.add_argument("--geometry-json")
    _add_roi_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("batch", help="analyze every annotated image of a MIAS-style directory")
    p.add_argument("--images", required=True, help="directory of <refnum>.pgm files")
    p.add_argument("--info", required=True, help="MIAS annotation file")
    p.add_argument("--out", required=True, help="feature CSV path")
    p.add_argument("--overlays", help="directory for overlay PGMs")
    p.add_argument("--detect", choices=["annotated", "auto"], default="annotated")
    p.add_argument("--jobs", type=int, default=1)
    _add_config_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("train", help="train the linear SVM on a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="model JSON output path")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="confusion matrix and metrics")
    p.add_argument("--features")
    p.add_argument("--model")
    p.add_argument("--predictions", help="CSV with label,prediction columns instead of a model")
    p.add_argument("--subset", choices=["test", "train", "all"], default="test")
    p.add_argument("--report", help="metrics JSON path (a .txt table is written beside it)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic benign/malignant corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-per-class", type=int, default=40)
    p.add_argument("--textured", action="store_true", help="gray-level render instead of binary masks")
    p.add_argument("--canvas", type=int, help="embed each shape in a square canvas of this side")
    _add_config_flags(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except PixInterpError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
