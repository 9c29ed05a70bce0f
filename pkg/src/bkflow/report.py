"""CSV / JSON serialization of the report tables.

Rounding happens here and nowhere else. Every table is written with a
header row and a fixed column order; rows are sorted so that identical
inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

from bkflow.aggregate import (
    ALL,
    BilateralRow,
    BkfRow,
    CountrySummary,
    FieldBkfRow,
    bilateral_area_rollup,
    bilateral_bkf,
    fmt_balance,
    fmt_pct,
    fmt_ratio,
)
from bkflow.flows import FlowMatrix, GainRecord
from bkflow.model import JournalCategoryMap
from bkflow.pipeline import Results
from bkflow.specialization import UNDEFINED, SpecializationTable

SUMMARY_HEADER = [
    "country",
    "publications",
    "made_in",
    "made_in_pct",
    "cited_made_in",
    "cited_pct",
    "benefits",
    "avg_benefits_per_cited",
    "gains",
    "domestic_gains",
    "domestic_pct",
    "avg_gains_per_benefit",
]
BKF_HEADER = [
    "country",
    "foreign_gains_generated",
    "generated_pct",
    "cited_foreign_publications",
    "foreign_gains_by_others",
    "earned_gains",
    "earned_pct",
    "bkf",
]
MATRIX_HEADER = ["generator", "earner", "gains", "pct_of_generator"]
FIELD_HEADER = ["country", "sc_code", "macro_area", "foreign_gains_generated", "earned_gains", "bkf"]
AREA_HEADER = ["country", "macro_area", "foreign_gains_generated", "earned_gains", "bkf"]
SPEC_HEADER = ["country", "sc_code", "value"]
BILATERAL_HEADER = ["level", "sc_code", "macro_area", "gains_k_to_l", "gains_l_to_k", "bkf"]
GAIN_HEADER = ["cited_id", "citing_id", "generator", "earner", "domestic", "sc_codes"]

REPORT_FILES = (
    "summary.csv",
    "bkf.csv",
    "flow_matrix.csv",
    "bkf_by_sc.csv",
    "bkf_by_area.csv",
    "kosi.csv",
    "kisi.csv",
)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return Path(path)


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def fmt_index(value) -> str:
    return str(UNDEFINED) if value is UNDEFINED else f"{value:.1f}"


def summary_rows(summary: Sequence[CountrySummary]) -> list[list]:
    return [
        [
            s.country,
            s.publications,
            s.made_in_count,
            fmt_pct(s.made_in_share),
            s.cited_made_in_count,
            fmt_pct(s.cited_share),
            s.total_benefits,
            fmt_ratio(s.avg_benefits_per_cited),
            s.total_gains,
            s.domestic_gains,
            fmt_pct(s.domestic_share),
            fmt_ratio(s.avg_gains_per_benefit),
        ]
        for s in summary
    ]


def bkf_rows(rows: Sequence[BkfRow]) -> list[list]:
    return [
        [
            r.country,
            r.foreign_gains_generated,
            fmt_pct(r.generated_share),
            "" if r.cited_foreign_publications is None else r.cited_foreign_publications,
            r.foreign_gains_by_others,
            r.earned_gains,
            fmt_pct(r.earned_share),
            fmt_balance(r.balance),
        ]
        for r in rows
    ]


def matrix_rows(matrix: FlowMatrix) -> list[list]:
    return [
        [g, e, matrix.cell(g, e), fmt_pct(matrix.row_share(g, e))]
        for g in matrix.countries
        for e in matrix.countries
    ]


def field_rows(by_country: dict[str, list[FieldBkfRow]], with_area: bool = True) -> list[list]:
    out = []
    for country, rows in by_country.items():
        for r in rows:
            lead = [country, r.sc_code, r.macro_area] if with_area else [country, r.sc_code]
            out.append(lead + [r.foreign_gains_generated, r.earned_gains, fmt_balance(r.balance)])
    return out


def spec_rows(table: SpecializationTable) -> list[list]:
    return [[k, j, fmt_index(v)] for k, j, v in table.rows()]


def bilateral_rows(overall: BilateralRow, areas: Sequence[BilateralRow], scs: Sequence[BilateralRow]) -> list[list]:
    out = [["overall", ALL, ALL, overall.k_to_l, overall.l_to_k, fmt_balance(overall.balance)]]
    for level, rows in (("area", areas), ("sc", scs)):
        for r in rows:
            out.append([level, r.sc_code, r.macro_area, r.k_to_l, r.l_to_k, fmt_balance(r.balance)])
    return out


def _num(value) -> float | None:
    return None if value is UNDEFINED or value is None else float(value)


def bundle(results: Results) -> dict:
    """Every table in one JSON-ready dict; exact counts plus formatted ratios."""
    return {
        "config": results.config.to_dict(),
        "summary": [dict(zip(SUMMARY_HEADER, r)) for r in summary_rows(results.summary)],
        "bkf": [dict(zip(BKF_HEADER, r)) for r in bkf_rows(results.bkf)],
        "flow_matrix": {
            "countries": list(results.matrix.countries),
            "cells": [list(r) for r in results.matrix.cells],
        },
        "bkf_by_sc": [dict(zip(FIELD_HEADER, r)) for r in field_rows(results.by_sc)],
        "bkf_by_area": [
            dict(zip(AREA_HEADER, r)) for r in field_rows(results.by_area, with_area=False)
        ],
        "kosi": [{"country": k, "sc_code": j, "value": _num(v)} for k, j, v in results.kosi.rows()],
        "kisi": [{"country": k, "sc_code": j, "value": _num(v)} for k, j, v in results.kisi.rows()],
        "diagnostics": results.report.to_dict()["counts"],
    }


def write_reports(results: Results, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        write_csv(out_dir / "summary.csv", SUMMARY_HEADER, summary_rows(results.summary)),
        write_csv(out_dir / "bkf.csv", BKF_HEADER, bkf_rows(results.bkf)),
        write_csv(out_dir / "flow_matrix.csv", MATRIX_HEADER, matrix_rows(results.matrix)),
        write_csv(out_dir / "bkf_by_sc.csv", FIELD_HEADER, field_rows(results.by_sc)),
        write_csv(out_dir / "bkf_by_area.csv", AREA_HEADER, field_rows(results.by_area, with_area=False)),
        write_csv(out_dir / "kosi.csv", SPEC_HEADER, spec_rows(results.kosi)),
        write_csv(out_dir / "kisi.csv", SPEC_HEADER, spec_rows(results.kisi)),
    ]
    bundle_path = out_dir / "bundle.json"
    bundle_path.write_text(json.dumps(bundle(results), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths.append(bundle_path)
    return paths


def write_bilateral(gains, k: str, l: str, categories: JournalCategoryMap, out_dir: Path) -> Path:
    (overall,) = bilateral_bkf(gains, k, l, categories, "overall")
    scs = bilateral_bkf(gains, k, l, categories, "sc")
    areas = bilateral_area_rollup(scs, categories)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return write_csv(out_dir / f"bilateral_{k}_{l}.csv", BILATERAL_HEADER, bilateral_rows(overall, areas, scs))


def write_gain_dump(records: Iterable[GainRecord], path: Path) -> Path:
    rows = (
        [r.cited_id, r.citing_id, r.generator, r.earner, int(r.domestic), ";".join(sorted(r.sc_codes))]
        for r in records
    )
    return write_csv(path, GAIN_HEADER, rows)


def write_figures(results: Results, out_dir: Path) -> list[Path]:
    from bkflow import plotting

    fig_dir = Path(out_dir) / "figures"
    paths = [
        plotting.plot_bkf(results.bkf, fig_dir / "bkf.png"),
        plotting.plot_flow_matrix(results.matrix, fig_dir / "flow_matrix.png"),
        plotting.plot_specialization(results.kosi, fig_dir / "kosi.png"),
        plotting.plot_specialization(results.kisi, fig_dir / "kisi.png"),
    ]
    for country, rows in results.by_sc.items():
        if rows:
            paths.append(plotting.plot_field_extremes(rows, country, fig_dir / f"bkf_by_sc_{country}.png"))
    return paths
