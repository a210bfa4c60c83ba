"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bandselect import score_bands, select_top_bands
from .config import load_config
from .errors import DomwaveError, InvariantViolation
from .features import class_scatter_report, extract_features
from .harness import format_report, leave_one_out
from .imageio import ORL_LAYOUT, GENERIC_LAYOUT, load_dataset, load_grayscale_image, scan_layout
from .pca import project
from .preprocess import adjust_illumination, circular_ncc, similarity_report
from .recognize import build_template_db, load_template_db, recognize_image, save_template_db
from .wavelet import dwt2d

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def _num(x) -> str:
    return format(float(x), ".17g")


def _resolve_layout(root, layout: str) -> str:
    if layout != "auto":
        return layout
    return ORL_LAYOUT if scan_layout(root, ORL_LAYOUT) else GENERIC_LAYOUT


def _dataset(args):
    return load_dataset(args.root, _resolve_layout(args.root, args.layout))


def cmd_extract(args, out):
    if args.db:
        db = load_template_db(args.db)
        if args.config and load_config(args.config).fingerprint() != db.config.fingerprint():
            raise DomwaveError(f"--config does not match the configuration stored in {args.db}")
        img = load_grayscale_image(args.image)
        fv = extract_features(img, db.config)
        coords = project(db.pca_model, fv)
        print(f"fingerprint\t{fv.config_fingerprint}", file=out)
        print(f"retained_dim\t{coords.size}", file=out)
        print("component\tvalue", file=out)
        for i, v in enumerate(coords):
            print(f"{i}\t{_num(v)}", file=out)
        return EXIT_OK
    if not args.config:
        raise UsageError("extract: one of --config or --db is required")
    cfg = load_config(args.config)
    fv = extract_features(load_grayscale_image(args.image), cfg)
    print(f"fingerprint\t{fv.config_fingerprint}", file=out)
    print(f"length\t{len(fv)}", file=out)
    for b in fv.bands:
        print(f"band\t{b.rank}\t{b.row_start}\t{b.row_end}\t{_num(b.entropy)}", file=out)
    print("band_rank\tmodule\tsubband\tposition\tvalue", file=out)
    pos = 0
    for entry in fv.layout:
        for j in range(entry.count):
            print(f"{entry.band_rank}\t{entry.module_index}\t{entry.subband}\t{j}\t{_num(fv.values[pos])}", file=out)
            pos += 1
    return EXIT_OK


def cmd_enroll(args, out):
    cfg = load_config(args.config)
    ds = _dataset(args)
    db = build_template_db(ds, cfg)
    save_template_db(db, args.out)
    print(f"enrolled {ds.p} classes, {len(ds)} images, retained_dim {db.pca_model.retained_dim} -> {args.out}", file=out)
    return EXIT_OK


def cmd_recognize(args, out):
    db = load_template_db(args.db)
    match = recognize_image(db, load_grayscale_image(args.image))
    labels = {c.class_id: c.label for c in db.classes}
    print(f"predicted_class\t{match.predicted_class}", file=out)
    print(f"label\t{labels[match.predicted_class]}", file=out)
    print(f"margin\t{_num(match.margin)}", file=out)
    print("class_id\tlabel\tdistance", file=out)
    for cid, d in match.distances:
        print(f"{cid}\t{labels[cid]}\t{_num(d)}", file=out)
    return EXIT_OK


def cmd_evaluate(args, out):
    cfg = load_config(args.config)
    ds = _dataset(args)
    report = leave_one_out(ds, cfg, jobs=args.jobs)
    text = format_report(report)
    if args.report:
        with open(args.report, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        print(f"accuracy\t{_num(report.accuracy)}\t({report.correct}/{report.total_probes})", file=out)
    else:
        out.write(text)
    print(f"wall_time\t{report.wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK


def cmd_inspect_entropy(args, out):
    cfg = load_config(args.config)
    norm = adjust_illumination(load_grayscale_image(args.image), cfg.target_mean, cfg.target_std)
    ranks = {b.row_start: b.rank for b in select_top_bands(norm, cfg.n_bands, cfg.band_height, cfg.num_bins)}
    print("band_index\trow_start\trow_end\tentropy\tselected_rank", file=out)
    for i, b in enumerate(score_bands(norm, cfg.band_height, cfg.num_bins)):
        print(f"{i}\t{b.row_start}\t{b.row_end}\t{_num(b.entropy)}\t{ranks.get(b.row_start, 0)}", file=out)
    return EXIT_OK


def _approx_coefficients(img, cfg, illum: bool) -> np.ndarray:
    data = adjust_illumination(img, cfg.target_mean, cfg.target_std).values if illum else img.pixels
    return dwt2d(data, cfg.wavelet).approx.ravel()


def cmd_inspect_similarity(args, out):
    cfg = load_config(args.config)
    a_img, b_img = load_grayscale_image(args.image_a), load_grayscale_image(args.image_b)
    if a_img.shape != b_img.shape:
        raise DomwaveError(f"image sizes differ: {a_img.width}x{a_img.height} vs {b_img.width}x{b_img.height}")
    a = _approx_coefficients(a_img, cfg, not args.no_illum)
    b = _approx_coefficients(b_img, cfg, not args.no_illum)
    rep = similarity_report(a, b)
    print(f"illumination_adjusted\t{str(not args.no_illum).lower()}", file=out)
    print(f"length\t{rep.length}", file=out)
    print(f"ncc_peak\t{'undefined' if rep.ncc_peak is None else _num(rep.ncc_peak)}", file=out)
    print(f"peak_lag\t{'undefined' if rep.peak_lag is None else rep.peak_lag}", file=out)
    print(f"euclidean_distance\t{_num(rep.euclidean_distance)}", file=out)
    if rep.ncc_peak is not None:
        print("lag\tncc", file=out)
        for lag, v in enumerate(circular_ncc(a, b)):
            print(f"{lag}\t{_num(v)}", file=out)
    return EXIT_OK


def cmd_inspect_separability(args, out):
    cfg = load_config(args.config)
    ds = _dataset(args)
    if args.no_modularize:
        cfg = cfg.with_(module_width=ds.geometry[0])
    feats = {rec.class_id: [extract_features(img, cfg) for img in rec.poses] for rec in ds.persons}
    rep = class_scatter_report(feats)
    print(f"modularized\t{str(not args.no_modularize).lower()}", file=out)
    print(f"module_width\t{cfg.module_width}", file=out)
    print(f"feature_length\t{len(rep.centroids[ds.persons[0].class_id])}", file=out)
    print(f"median_fisher_ratio\t{_num(rep.median_fisher_ratio())}", file=out)
    print("class_id\twithin_class_scatter", file=out)
    for cid, s in rep.within_class_scatter.items():
        print(f"{cid}\t{_num(s)}", file=out)
    print("class_a\tclass_b\tbetween_class_separation\tfisher_ratio", file=out)
    for (a, b), sep in rep.between_class_separation.items():
        print(f"{a}\t{b}\t{_num(sep)}\t{_num(rep.fisher_ratio[(a, b)])}", file=out)
    print("class_id\tindex\tcentroid", file=out)
    for cid, c in rep.centroids.items():
        for i, v in enumerate(c):
            print(f"{cid}\t{i}\t{_num(v)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="domwave", description="Entropy-guided dominant wavelet feature face recognition.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    cfg_help = "config file, or a bundled profile name (orl, yale)"
    layout_help = "dataset layout template with <class> and <pose> (default: auto-detect s<class>/<pose>.pgm or <class>/<pose>.pgm)"

    s = sub.add_parser("extract", help="print the feature vector of one image")
    s.add_argument("image")
    s.add_argument("--config", help=cfg_help)
    s.add_argument("--db", help="project into the PCA space of this template database")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("enroll", help="build a template database from a dataset")
    s.add_argument("root")
    s.add_argument("--config", required=True, help=cfg_help)
    s.add_argument("--out", required=True)
    s.add_argument("--layout", default="auto", help=layout_help)
    s.set_defaults(func=cmd_enroll)

    s = sub.add_parser("recognize", help="classify one image against a template database")
    s.add_argument("image")
    s.add_argument("--db", required=True)
    s.set_defaults(func=cmd_recognize)

    s = sub.add_parser("evaluate", help="leave-one-out evaluation on a dataset")
    s.add_argument("root")
    s.add_argument("--config", required=True, help=cfg_help)
    s.add_argument("--report", help="write the tab-delimited report here instead of stdout")
    s.add_argument("--layout", default="auto", help=layout_help)
    s.add_argument("--jobs", type=int, default=1, help="folds evaluated concurrently")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("inspect-entropy", help="per-band entropy table of one image")
    s.add_argument("image")
    s.add_argument("--config", required=True, help=cfg_help)
    s.set_defaults(func=cmd_inspect_entropy)

    s = sub.add_parser("inspect-similarity", help="compare approximation coefficients of two images")
    s.add_argument("image_a")
    s.add_argument("image_b")
    s.add_argument("--config", required=True, help=cfg_help)
    s.add_argument("--no-illum", action="store_true", help="skip illumination adjustment")
    s.set_defaults(func=cmd_inspect_similarity)

    s = sub.add_parser("inspect-separability", help="class centroid / scatter report over a dataset")
    s.add_argument("root")
    s.add_argument("--config", required=True, help=cfg_help)
    s.add_argument("--no-modularize", action="store_true", help="use the whole band as one module")
    s.add_argument("--layout", default="auto", help=layout_help)
    s.set_defaults(func=cmd_inspect_separability)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"domwave: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (DomwaveError, OSError) as exc:
        print(f"domwave: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"domwave: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main():  # pragma: no cover
    sys.exit(run_cli())
