"""Command line interface.

Subcommands: cluster, eval, plot, montage, synth, ablate. All randomness
flows from --seed through the PCG64 generator named in every report, so a
run is fully reproducible from its report.json. Exit codes: 0 success,
1 configuration error, 2 I/O error, 3 numerical failure; failures print a
machine-readable JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .imposition import (
    ManifestError,
    build_units,
    gold_labels_for_units,
    load_manifest,
)
from .io import atomic_write, quantized_titles_csv, read_unit_label_csv
from .kernel import save_distances_csv
from .metrics import evaluate
from .pipeline import RunConfig, run_cluster
from .plots import montage, staircase_svg
from .spectral import PRNG_ID, load_labels_csv, save_labels_csv
from .synth import generate_book, spec_from_json, write_book

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


def _fail(code: int, err: BaseException) -> int:
    payload = {"error": {"code": code, "type": type(err).__name__, "message": str(err)}}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _classify(err: BaseException) -> int:
    if isinstance(err, np.linalg.LinAlgError):
        return EXIT_NUMERIC
    if isinstance(err, (FileNotFoundError, OSError)):
        return EXIT_IO
    return EXIT_CONFIG


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="sheet_sides",
                   choices=["all_pages", "recto_pages", "sheet_sides"])
    p.add_argument("--bins", type=int, default=5, help="quantization bins (default 5)")
    p.add_argument("--strategy", default="quantile", choices=["uniform", "quantile", "kmeans"])
    p.add_argument("--bin-scope", default="per_image", choices=["per_image", "per_book"],
                   help="compute bin edges per title image or once per book")
    p.add_argument("--no-height-normalize", dest="height_normalize", action="store_false",
                   help="use raw column sums instead of per-height means")
    p.add_argument("--p", default="4", help="slot reduction norm order, number or 'inf'")
    p.add_argument("--knn", type=int, default=5, help="graph neighbors (default 5)")
    p.add_argument("--k", type=int, default=None,
                   help="number of clusters (default: count of gold labels)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1,
                   help="run N consecutive seeds and report mean scores")
    p.add_argument("--no-binarize", dest="binarize", action="store_false")
    p.add_argument("--normalize", action="store_true",
                   help="normalize title distances by the longer length")
    p.add_argument("--restarts", type=int, default=5, help="k-means restarts (default 5)")
    p.add_argument("--workers", type=int, default=None,
                   help="threads for the pairwise distance fill")


def _config_from_args(args, seed: int) -> RunConfig:
    p = float("inf") if str(args.p).lower() in ("inf", "max") else float(args.p)
    return RunConfig(
        scheme=args.scheme,
        n_bins=args.bins,
        bin_strategy=args.strategy,
        bin_scope=args.bin_scope,
        p=p,
        k_neighbors=args.knn,
        n_clusters=args.k,
        seed=seed,
        binarize=args.binarize,
        height_normalize=args.height_normalize,
        normalize=args.normalize,
        n_restarts=args.restarts,
        workers=args.workers,
    )


def _mean_eval(reports) -> dict:
    keys = ("v_measure", "one_to_one", "many_to_one")
    return {k: float(np.mean([getattr(r, k) for r in reports])) for k in keys}


def cmd_cluster(args) -> int:
    manifest = load_manifest(args.manifest)
    base_dir = Path(args.manifest).parent
    out = Path(args.output)
    seeds = [args.seed + i for i in range(args.seeds)]

    results = []
    for seed in seeds:
        config = _config_from_args(args, seed)
        results.append(run_cluster(manifest, config, base_dir=base_dir))
    first = results[0]

    save_labels_csv(first.assignment, out / "labels.csv")
    save_distances_csv(first.distances, out / "distances.csv")
    atomic_write(out / "quantized.csv", quantized_titles_csv(first.units))

    report = first.report_dict()
    if len(results) > 1:
        report["runs"] = [
            {"seed": r.config.seed,
             "labels": [int(v) for v in r.assignment.labels],
             "eval": None if r.eval_report is None else r.eval_report.as_dict()}
            for r in results
        ]
        if all(r.eval_report is not None for r in results):
            report["mean_eval"] = _mean_eval([r.eval_report for r in results])
    atomic_write(out / "report.json", json.dumps(report, indent=2) + "\n")

    print(f"{manifest.title}: {len(first.units)} units ({args.scheme}), wrote {out}/")
    if first.eval_report is not None:
        for line in first.eval_report.percent_lines():
            print(line)
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = read_unit_label_csv(args.gold, value_column=args.gold_column)
    pred_assignment = load_labels_csv(args.pred)
    pred = dict(zip(pred_assignment.unit_ids, pred_assignment.labels))
    if set(gold) != set(pred):
        missing = sorted(set(gold) ^ set(pred))[:5]
        raise ManifestError(f"unit-id mismatch between gold and predictions, e.g. {missing}")
    ids = list(pred_assignment.unit_ids)
    report = evaluate([gold[u] for u in ids], [int(pred[u]) for u in ids])
    for line in report.percent_lines():
        print(line)
    if args.output:
        atomic_write(args.output, report.to_json())
    return EXIT_OK


def _units_and_gold(manifest, scheme):
    units = build_units(manifest, scheme)
    return units, gold_labels_for_units(manifest, units)


def cmd_plot(args) -> int:
    manifest = load_manifest(args.manifest)
    assignment = load_labels_csv(args.labels)
    units, gold = _units_and_gold(manifest, args.scheme)
    by_id = {u.id: u for u in units}
    if set(assignment.unit_ids) != set(by_id):
        raise ManifestError("labels CSV does not cover the manifest's units")
    gatherings = [
        manifest.page(min(s.page_index for s in by_id[uid].slots)).gathering_id
        for uid in assignment.unit_ids
    ]
    gold_list = None
    if gold is not None:
        order = {u.id: i for i, u in enumerate(units)}
        gold_list = [gold[order[uid]] for uid in assignment.unit_ids]
    svg = staircase_svg(assignment.unit_ids, assignment.labels, gatherings, gold=gold_list)
    atomic_write(args.output, svg)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_montage(args) -> int:
    from .profiling import load_title_image

    manifest = load_manifest(args.manifest)
    base = Path(args.manifest).parent
    units, _ = _units_and_gold(manifest, args.scheme)
    rows = []
    for u in units:
        row = []
        for slot in u.slots:
            page = manifest.page(slot.page_index)
            if page.image_path is None:
                row.append(None)
            else:
                path = Path(page.image_path)
                row.append(load_title_image(path if path.is_absolute() else base / path))
        rows.append(row)
    img = montage(rows)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    img.save(args.output)
    print(f"wrote {args.output} ({len(rows)} rows x {max(len(r) for r in rows)} cols)")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = spec_from_json(Path(args.spec).read_bytes())
    book = generate_book(spec, seed=args.seed)
    write_book(book, args.output)
    print(
        f"wrote {args.output}: {book.manifest.n_pages} pages, "
        f"{len(book.units)} sheet sides, {len(set(book.unit_gold.values()))} formes"
    )
    return EXIT_OK


def cmd_ablate(args) -> int:
    manifest = load_manifest(args.manifest)
    base_dir = Path(args.manifest).parent
    out = Path(args.output)
    schemes = ["all_pages", "recto_pages", "sheet_sides"]
    lines = ["scheme,v_measure,one_to_one,many_to_one"]
    summary = {}
    for scheme in schemes:
        reports = []
        for i in range(args.seeds):
            config = _config_from_args(args, args.seed + i)
            config.scheme = scheme
            result = run_cluster(manifest, config, base_dir=base_dir)
            if result.eval_report is None:
                raise ManifestError("ablation requires gold labels in the manifest")
            reports.append(result.eval_report)
        mean = _mean_eval(reports)
        summary[scheme] = mean
        lines.append(
            f"{scheme},{100 * mean['v_measure']:.1f},"
            f"{100 * mean['one_to_one']:.1f},{100 * mean['many_to_one']:.1f}"
        )
    atomic_write(out / "ablation.csv", "\n".join(lines) + "\n")
    atomic_write(out / "ablation.json",
                 json.dumps({"prng": PRNG_ID, "seeds": args.seeds, "schemes": summary},
                            indent=2) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="formeclust",
        description="Cluster running titles of early modern books into skeleton formes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run the full clustering pipeline on a book")
    p.add_argument("--manifest", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_run_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a labels CSV against a gold CSV")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--gold-column", default="forme_id",
                   help="value column name in the gold CSV (default forme_id)")
    p.add_argument("-o", "--output", default=None, help="also write the report JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="staircase plot of cluster ids in book order")
    p.add_argument("--manifest", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--scheme", default="sheet_sides",
                   choices=["all_pages", "recto_pages", "sheet_sides"])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("montage", help="grid of title crops, one unit per row")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scheme", default="sheet_sides",
                   choices=["all_pages", "recto_pages", "sheet_sides"])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_montage)

    p = sub.add_parser("synth", help="generate a synthetic annotated book")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ablate", help="compare all three unit schemes on one book")
    p.add_argument("--manifest", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_run_flags(p)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except BaseException as err:  # noqa: BLE001 - map every failure to an exit code
        if isinstance(err, (KeyboardInterrupt, SystemExit)):
            raise
        return _fail(_classify(err), err)


if __name__ == "__main__":
    sys.exit(main())
