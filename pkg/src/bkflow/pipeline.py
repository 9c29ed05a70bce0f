"""End-to-end computation from raw records to every report table."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

from bkflow.aggregate import (
    BkfRow,
    CountrySummary,
    FieldBkfRow,
    bkf_by_field,
    bkf_overall,
    country_summary,
    macro_area_rollup,
)
from bkflow.attribution import MadeInResult, attribute_corpus
from bkflow.flows import FlowMatrix, GainLedger, tally_gains
from bkflow.model import (
    AnalysisConfig,
    CitationLink,
    Corpus,
    JournalCategoryMap,
    PublicationRecord,
    ValidationReport,
    build_corpus,
)
from bkflow.specialization import SpecializationTable, kisi_table, kosi_table

log = logging.getLogger(__name__)


@dataclass
class Results:
    corpus: Corpus
    attribution: dict[str, MadeInResult]
    ledger: GainLedger
    matrix: FlowMatrix
    summary: list[CountrySummary]
    bkf: list[BkfRow]
    by_sc: dict[str, list[FieldBkfRow]]
    by_area: dict[str, list[FieldBkfRow]]
    kosi: SpecializationTable
    kisi: SpecializationTable
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def config(self) -> AnalysisConfig:
        return self.corpus.config

    @property
    def report(self) -> ValidationReport:
        return self.corpus.report


@contextmanager
def _stage(timings: dict[str, float], name: str):
    start = time.perf_counter()
    yield
    timings[name] = time.perf_counter() - start
    log.info("%s: %.2fs", name, timings[name])


def run(
    publications: Sequence[PublicationRecord],
    citations: Sequence[CitationLink],
    categories: JournalCategoryMap,
    config: AnalysisConfig,
    report: ValidationReport | None = None,
    jobs: int = 1,
) -> Results:
    timings: dict[str, float] = {}
    with _stage(timings, "build_corpus"):
        corpus = build_corpus(publications, citations, categories, config, report)
    with _stage(timings, "attribution"):
        attribution = attribute_corpus(corpus, config, corpus.report)
    with _stage(timings, "flows"):
        ledger = tally_gains(corpus, attribution, config, jobs)
        matrix = ledger.matrix()
    with _stage(timings, "aggregate"):
        summary = country_summary(corpus, attribution, ledger, config)
        cited = {s.country: s.cited_made_in_count for s in summary}
        bkf = bkf_overall(matrix, cited)
        by_sc = {k: bkf_by_field(ledger.tally, categories, k, config) for k in config.countries}
        by_area = {k: macro_area_rollup(rows, categories) for k, rows in by_sc.items()}
    with _stage(timings, "specialization"):
        kosi = kosi_table(ledger.tally, config, categories.sc_codes)
        kisi = kisi_table(ledger.tally, config, categories.sc_codes)
    return Results(corpus, attribution, ledger, matrix, summary, bkf, by_sc, by_area, kosi, kisi, timings)
