"""Command-line entry point: ``bkflow {validate,compute,pair,generate,top}``.

Exit codes: 0 success, 1 data or semantic error, 2 environment / IO error.
Log verbosity comes from ``BKFLOW_LOG`` (e.g. ``INFO``, ``DEBUG``).
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from bkflow import ingest, report
from bkflow.aggregate import top_bottom_fields
from bkflow.attribution import attribute_corpus
from bkflow.flows import iter_gain_records
from bkflow.model import AnalysisConfig, ConfigError, CorpusError, ValidationReport, build_corpus
from bkflow.pipeline import run
from bkflow.specialization import top_specializations

log = logging.getLogger("bkflow")

EXIT_OK, EXIT_DATA, EXIT_ENV = 0, 1, 2


class UsageError(Exception):
    """Semantic problem with the command line (exit 1)."""


def _load_config(args) -> tuple[AnalysisConfig, dict[str, str]]:
    with open(args.config, encoding="utf-8") as fh:
        values = ingest.parse_kv(fh)
    config = ingest.config_from_kv(values)
    overrides = {}
    if getattr(args, "countries", None):
        overrides["countries"] = tuple(c.strip().upper() for c in args.countries.split(",") if c.strip())
    if getattr(args, "cutoff", None):
        overrides["citation_cutoff"] = ingest.parse_date(args.cutoff)
    if getattr(args, "threshold", None):
        overrides["made_in_threshold"] = ingest.parse_threshold(args.threshold)
    if overrides:
        config = replace(config, **overrides)
    return config, values


def _prepare_out(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    probe = path / ".bkflow-write-test"
    probe.write_text("")
    probe.unlink()
    return path


def _input_digests(data_dir: Path, config_path: str) -> dict[str, str]:
    files = [data_dir / n for n in (ingest.PUBLICATIONS_FILE, ingest.CITATIONS_FILE, ingest.JOURNALS_FILE, ingest.AREAS_FILE)]
    files.append(Path(config_path))
    return {str(p): report.sha256(p) for p in files}


def _load_results(args):
    config, _ = _load_config(args)
    data_dir = Path(args.data)
    diag = ValidationReport()
    start = time.perf_counter()
    pubs, links, categories = ingest.read_dataset(data_dir, diag)
    parse_time = time.perf_counter() - start
    results = run(pubs, links, categories, config, diag, jobs=args.jobs)
    results.timings = {"parse": parse_time, **results.timings}
    return results


def cmd_validate(args) -> int:
    config, _ = _load_config(args)
    out = _prepare_out(args.out)
    diag = ValidationReport(max_examples=args.max_examples)
    pubs, links, categories = ingest.read_dataset(Path(args.data), diag)
    try:
        corpus = build_corpus(pubs, links, categories, config, diag)
        attribute_corpus(corpus, config, diag)
    except CorpusError as exc:
        diag.errors.append(str(exc))
    print(diag.render())
    (out / "validation.json").write_text(json.dumps(diag.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK if diag.ok else EXIT_DATA


def cmd_compute(args) -> int:
    out = _prepare_out(args.out)
    results = _load_results(args)
    start = time.perf_counter()
    paths = report.write_reports(results, out)
    if args.dump_gains:
        paths.append(report.write_gain_dump(iter_gain_records(results.corpus, results.attribution), out / "gains.csv"))
    if args.figures:
        paths.extend(report.write_figures(results, out))
    results.timings["write"] = time.perf_counter() - start
    manifest = {
        "created": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "config": results.config.to_dict(),
        "inputs": _input_digests(Path(args.data), args.config),
        "diagnostics": results.report.to_dict(),
        "outputs": {str(p.relative_to(out)): report.sha256(p) for p in paths},
        "timings_s": {k: round(v, 3) for k, v in results.timings.items()},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for row in results.bkf:
        print(f"{row.country}\tgenerated {row.foreign_gains_generated}\tearned {row.earned_gains}\tBKF {row.balance:+d}")
    return EXIT_OK


def _check_pair(config: AnalysisConfig, k: str, l: str) -> None:
    for c in (k, l):
        if c not in config.countries:
            raise UsageError(f"country {c!r} is not in the analysis set {','.join(config.countries)}")
    if k == l:
        raise UsageError("pair needs two different countries")


def cmd_pair(args) -> int:
    k, l = args.k.upper(), args.l.upper()
    config, _ = _load_config(args)
    _check_pair(config, k, l)
    out = _prepare_out(args.out)
    results = _load_results(args)
    path = report.write_bilateral(results.ledger.tally, k, l, results.corpus.categories, out)
    print(path)
    return EXIT_OK


def cmd_generate(args) -> int:
    from bkflow import synth

    config, values = _load_config(args)
    out = _prepare_out(args.out)
    if args.seed is not None:
        values["gen.seed"] = str(args.seed)
    if args.publications is not None:
        values["gen.publications"] = str(args.publications)
    params = synth.params_from_kv(values, config)
    if args.citations is not None:
        total = params.total_publications
        params = replace(params, citation_density=args.citations / total if total else 0.0)
    gen = synth.generate_corpus(params)
    paths = ingest.write_dataset(out, gen.publications, gen.citations, gen.categories)
    (out / "config.txt").write_text(ingest.format_config(config), encoding="utf-8")
    print(f"{len(gen.publications)} publications, {len(gen.citations)} citation links -> {out}")
    for p in paths:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_top(args) -> int:
    country = args.country.upper()
    config, _ = _load_config(args)
    if country not in config.countries:
        raise UsageError(f"country {country!r} is not in the analysis set")
    results = _load_results(args)
    if args.kind == "bkf":
        lowest, highest = top_bottom_fields(results.by_sc[country], args.n)
        print("lowest BKF")
        for r in lowest:
            print(f"  {r.sc_code}\t{r.macro_area}\t{r.foreign_gains_generated}\t{r.earned_gains}\t{r.balance:+d}")
        print("highest BKF")
        for r in highest:
            print(f"  {r.sc_code}\t{r.macro_area}\t{r.foreign_gains_generated}\t{r.earned_gains}\t{r.balance:+d}")
    else:
        table = results.kosi if args.kind == "kosi" else results.kisi
        for sc, value in top_specializations(table, country, args.n):
            print(f"{sc}\t{report.fmt_index(value)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bkflow", description="Balance of knowledge flows from citation data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        if data:
            p.add_argument("data", help="directory holding publications.jsonl, citations.csv, journals.csv, sc_areas.csv")
        p.add_argument("--config", required=True, help="key-value analysis config file")
        p.add_argument("--countries", help="comma-separated override of the analysis countries")
        p.add_argument("--cutoff", help="override citation cutoff (ISO date)")
        p.add_argument("--threshold", help="override made-in threshold, e.g. 1/2")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for gain accumulation")

    p = sub.add_parser("validate", help="parse inputs and report data problems")
    common(p)
    p.add_argument("--out", default=".", help="directory for validation.json")
    p.add_argument("--max-examples", type=int, default=20)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compute", help="write all report tables")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--figures", action="store_true", help="also render PNG figures into OUT/figures")
    p.add_argument("--dump-gains", action="store_true", help="also write every gain record to gains.csv")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("pair", help="bilateral balance between two countries")
    common(p)
    p.add_argument("k")
    p.add_argument("l")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("generate", help="write a synthetic corpus")
    common(p, data=False)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--publications", type=int, help="total publications, split over the countries")
    p.add_argument("--citations", type=int, help="target number of citation links")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("top", help="ranked subject categories by BKF, KOSI or KISI")
    common(p)
    p.add_argument("--country", required=True)
    p.add_argument("--kind", choices=("bkf", "kosi", "kisi"), default="bkf")
    p.add_argument("-n", type=int, default=10)
    p.set_defaults(func=cmd_top)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("BKFLOW_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except (ConfigError, CorpusError, UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
