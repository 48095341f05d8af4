"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for data errors.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from . import accuracy, classify, indices, oif, raster, rules
from .errors import LandcoverError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _band_list(text: str) -> tuple[int, ...]:
    try:
        bands = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad band list {text!r}; use e.g. 3,4,5")
    if not bands or min(bands) < 1:
        raise argparse.ArgumentTypeError(f"bad band list {text!r}; bands are 1-based")
    return bands


def _box_rule(text: str):
    if text == "minmax":
        return classify.MinMax()
    name, _, k = text.partition(":")
    if name == "meansigma" and k:
        try:
            return classify.MeanSigma(float(k))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"bad box rule {text!r}; use minmax or meansigma:<k>")


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def parse_method(text: str) -> classify.ClassifierConfig:
    """``mindist``, ``mindist/<max-distance>`` or ``parallelepiped[/<box>[/<overlap>]]``."""
    parts = text.split("/")
    try:
        if parts[0] == "mindist" and len(parts) <= 2:
            md = _nonneg(parts[1]) if len(parts) == 2 else None
            return classify.ClassifierConfig(classify.MINIMUM_DISTANCE, max_distance=md)
        if parts[0] == "parallelepiped" and len(parts) <= 3:
            box = _box_rule(parts[1]) if len(parts) > 1 else classify.MinMax()
            overlap = parts[2] if len(parts) > 2 else "nearest"
            return classify.ClassifierConfig(classify.PARALLELEPIPED, box, overlap)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    raise argparse.ArgumentTypeError(
        f"bad method {text!r}; use mindist[/<d>] or parallelepiped[/minmax|meansigma:<k>[/nearest|first|none]]"
    )


def _stem_path(header: Path, suffix: str) -> Path:
    return header.with_name(header.stem + suffix + header.suffix)


def read_scene_spec_csv(path, width: int, height: int, seed: int) -> raster.SceneSpec:
    """Read ``label,fraction,mean_1..mean_N,sigma_1..sigma_N`` class rows."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and "".join(r).strip()]
    if len(rows) < 2:
        raise LandcoverError(f"{path}: scene spec needs a header and at least one class row")
    header = [h.strip() for h in rows[0]]
    n = (len(header) - 2) // 2
    expected = ["label", "fraction"] + [f"mean_{i}" for i in range(1, n + 1)] + [
        f"sigma_{i}" for i in range(1, n + 1)
    ]
    if n < 1 or header != expected:
        raise LandcoverError(
            f"{path}: header must be label,fraction,mean_1..mean_N,sigma_1..sigma_N"
        )
    classes = []
    for lineno, r in enumerate(rows[1:], 2):
        if len(r) != len(header):
            raise LandcoverError(f"{path}:{lineno}: expected {len(header)} fields")
        try:
            vals = [float(v) for v in r]
        except ValueError as exc:
            raise LandcoverError(f"{path}:{lineno}: {exc}")
        classes.append(
            raster.SceneClass(int(vals[0]), tuple(vals[2 : 2 + n]), tuple(vals[2 + n :]), vals[1])
        )
    return raster.SceneSpec(tuple(classes), width, height, seed)


# ------------------------------------------------------------------ subcommands


def cmd_synth(a, out):
    spec = read_scene_spec_csv(a.spec, a.width, a.height, a.seed)
    image, truth = raster.generate_scene(spec)
    header = Path(a.out)
    raster.write_raster(image, header)
    truth_path = Path(a.truth_out) if a.truth_out else _stem_path(header, "_truth")
    raster.write_labels(truth, truth_path)
    print(f"scene,{header}", file=out)
    print(f"truth,{truth_path}", file=out)


def cmd_index(a, out):
    image = raster.read_raster(a.input)
    if a.mask == "water":
        raster.write_labels(indices.water_mask(image, a.water_rule, a.threshold), a.out)
    elif a.mask == "vegetation":
        raster.write_labels(indices.vegetation_mask(image), a.out)
    else:
        kind = indices.IndexKind(a.kind)
        idx = indices.compute_index_raster(image, kind, a.savi_l)
        idx.write(a.out)
        print(f"{kind.value},valid={int((~idx.mask).sum())},nodata={int(idx.mask.sum())}", file=out)
        return
    print(f"mask,{a.mask},{a.out}", file=out)


def cmd_oif(a, out):
    if a.from_table:
        if a.from_table in ("builtin:table4", "builtin:table5"):
            records = oif.load_fixture(a.from_table.split(":")[1])
        else:
            records = oif.read_oif_table(a.from_table)
        ranking, membership = oif.rank_from_table(records, a.order, a.top)
    else:
        image = raster.read_raster(a.input)
        ranking = oif.rank_combinations(image, a.r, a.order)
        membership = ranking.band_membership(a.top, image.n_bands)
    for line in oif.ranking_rows(ranking)[: a.top]:
        print(line, file=out)
    for band, count in sorted(membership.items()):
        print(f"band{band},{count}", file=out)
    if a.out:
        oif.write_ranking_csv(ranking, a.out)
    if a.membership_out:
        oif.write_membership_csv(membership, a.membership_out)


def _config_from_args(a) -> classify.ClassifierConfig:
    method = classify.MINIMUM_DISTANCE if a.method == "mindist" else classify.PARALLELEPIPED
    return classify.ClassifierConfig(method, a.box, a.overlap, a.max_distance)


def cmd_classify(a, out):
    config = _config_from_args(a)
    training = classify.read_training_csv(a.train, a.bands)
    image = raster.read_raster(a.input)
    sigs = classify.train_signatures(
        training, config.box_rule if config.method == classify.PARALLELEPIPED else None
    )
    labels = classify.classify(image, sigs, config)
    raster.write_labels(labels, a.out)
    if a.signatures_out:
        classify.write_signatures_csv(sigs, a.signatures_out)
    for label, count in classify.classification_map_stats(labels).items():
        print(f"label{label},{count}", file=out)


def cmd_assess(a, out):
    pred = raster.read_labels(a.pred)
    truth = raster.read_labels(a.truth)
    cm = accuracy.confusion_matrix(truth, pred, a.ignore_zero_ref, a.ignore_unclassified)
    report = accuracy.accuracy_report(cm)
    accuracy.write_matrix_csv(cm, a.out)
    if a.report:
        accuracy.write_report_csv(report, a.report)
    print(f"overall_accuracy,{report.overall_accuracy!r}", file=out)
    print(f"kappa,{'' if report.kappa is None else repr(report.kappa)}", file=out)


def cmd_compare(a, out):
    training = classify.read_training_csv(a.train, a.bands)
    image = raster.read_raster(a.input)
    truth = raster.read_labels(a.truth)
    rows = accuracy.compare_methods(
        image, training, truth, a.methods, a.ignore_zero_ref, a.ignore_unclassified
    )
    print("method,overall_accuracy", file=out)
    for name, oa in rows:
        print(f"{name},{oa!r}", file=out)


def cmd_recommend(a, out):
    recs = (
        rules.all_recommendations()
        if a.object == "all"
        else [rules.recommend(rules.LandcoverObject(a.object))]
    )
    if a.csv:
        print("object,combos,indices,source", file=out)
        for rec in recs:
            print(rec.csv_row(), file=out)
    else:
        for rec in recs:
            print(rec.describe(), file=out)
    if a.prevalence:
        prev = rules.band_prevalence()
        for band, count in prev.counts.items():
            print(f"band{band},{count},{prev.fraction(band)!r}", file=out)


def build_parser() -> argparse.ArgumentParser:
    version = f"%(prog)s {__version__}"
    p = _Parser(prog="tmlandcover", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=version)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def add(name, help_text, func):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--version", action="version", version=version)
        sp.set_defaults(func=func)
        return sp

    sp = add("synth", "generate a seeded synthetic scene and its ground truth", cmd_synth)
    sp.add_argument("--spec", required=True, help="class CSV: label,fraction,mean_1..N,sigma_1..N")
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="scene header path")
    sp.add_argument("--truth-out", help="truth header path (default <out stem>_truth.hdr)")

    sp = add("index", "compute a spectral index raster or a water/vegetation mask", cmd_index)
    what = sp.add_mutually_exclusive_group(required=True)
    what.add_argument("--kind", choices=[k.value for k in indices.IndexKind])
    what.add_argument("--mask", choices=["water", "vegetation"])
    sp.add_argument("--savi-l", type=_nonneg, default=indices.DEFAULT_SAVI_L)
    sp.add_argument("--water-rule", choices=["ratio25", "index"], default="ratio25")
    sp.add_argument("--threshold", type=float, default=1.0, help="water mask threshold")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)

    sp = add("oif", "rank band combinations by optimum index factor", cmd_oif)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input", help="raster header")
    src.add_argument("--from-table", help="combo,oif CSV (or builtin:table4 / builtin:table5)")
    sp.add_argument("--r", type=int, default=3, help="bands per combination")
    sp.add_argument("--order", choices=[oif.ASC, oif.DESC], default=oif.DESC)
    sp.add_argument("--top", type=int, default=10)
    sp.add_argument("--out", help="full ranking CSV")
    sp.add_argument("--membership-out", help="band membership CSV")

    sp = add("classify", "supervised classification of a raster", cmd_classify)
    sp.add_argument("--method", choices=["parallelepiped", "mindist"], required=True)
    sp.add_argument("--train", required=True, help="training CSV label,b1..bN")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--box", type=_box_rule, default=classify.MinMax())
    sp.add_argument("--overlap", choices=list(classify.OVERLAP_RULES), default="nearest")
    sp.add_argument("--max-distance", type=_nonneg)
    sp.add_argument("--bands", type=_band_list)
    sp.add_argument("--signatures-out")

    sp = add("assess", "confusion matrix and accuracy against ground truth", cmd_assess)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--out", required=True, help="confusion matrix CSV")
    sp.add_argument("--report", help="metric,label,value CSV")
    sp.add_argument("--ignore-zero-ref", action="store_true")
    sp.add_argument("--ignore-unclassified", action="store_true")

    sp = add("compare", "compare classifier configurations on one scene", cmd_compare)
    sp.add_argument("--train", required=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--methods", type=parse_method, nargs="+", required=True)
    sp.add_argument("--bands", type=_band_list)
    sp.add_argument("--ignore-zero-ref", action="store_true")
    sp.add_argument("--ignore-unclassified", action="store_true")

    sp = add("recommend", "band combinations and indices for a landcover object", cmd_recommend)
    sp.add_argument("--object", required=True,
                    choices=[o.value for o in rules.LandcoverObject] + ["all"])
    sp.add_argument("--csv", action="store_true")
    sp.add_argument("--prevalence", action="store_true", help="also print per-band counts")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        args.func(args, out)
    except (LandcoverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
