"""Domain types and the indexed, immutable corpus shared by every pipeline stage."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

UNASSIGNED = "unassigned"


class CorpusError(ValueError):
    """Structural problem in the input data that makes the corpus unusable."""


class ConfigError(ValueError):
    """Invalid analysis configuration."""


class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    LETTER = "letter"
    PROCEEDINGS = "proceedings"
    OTHER = "other"


DEFAULT_DOC_TYPES = frozenset(
    {DocType.ARTICLE, DocType.REVIEW, DocType.LETTER, DocType.PROCEEDINGS}
)


def check_country(code: str) -> str:
    if not code or not isinstance(code, str) or code != code.upper() or not code.strip():
        raise ValueError(f"invalid country code {code!r}")
    return code


@dataclass(frozen=True, slots=True)
class Affiliation:
    institution_id: str
    country: str

    def __post_init__(self) -> None:
        if not self.institution_id:
            raise ValueError("institution_id must be non-empty")
        check_country(self.country)


@dataclass(frozen=True, slots=True)
class PublicationRecord:
    id: str
    year: int
    doc_type: DocType
    journal_id: str
    affiliations: tuple[Affiliation, ...]
    date: dt.date | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("publication id must be non-empty")
        if not self.affiliations:
            raise ValueError(f"{self.id}: empty affiliation list")
        seen = set()
        for aff in self.affiliations:
            if aff.institution_id in seen:
                raise ValueError(f"{self.id}: duplicate institution {aff.institution_id!r}")
            seen.add(aff.institution_id)

    @property
    def countries(self) -> frozenset[str]:
        return frozenset(a.country for a in self.affiliations)

    def issued_on_or_before(self, cutoff: dt.date) -> bool:
        # year granularity unless a full date is carried
        if self.date is not None:
            return self.date <= cutoff
        return self.year <= cutoff.year


@dataclass(frozen=True, slots=True)
class CitationLink:
    citing_id: str
    cited_id: str


@dataclass(frozen=True)
class JournalCategoryMap:
    """Journal -> subject categories, and subject category -> macro-area.

    Journals absent from the map have no categories. Categories without a
    macro-area fall into ``UNASSIGNED``.
    """

    journals: Mapping[str, frozenset[str]] = field(default_factory=dict)
    areas: Mapping[str, str] = field(default_factory=dict)

    def lookup(self, journal_id: str) -> frozenset[str]:
        return self.journals.get(journal_id, frozenset())

    def area_of(self, sc_code: str) -> str:
        return self.areas.get(sc_code, UNASSIGNED)

    @property
    def sc_codes(self) -> list[str]:
        codes = set(self.areas)
        for scs in self.journals.values():
            codes.update(scs)
        return sorted(codes)

    @property
    def macro_areas(self) -> list[str]:
        found = {self.area_of(sc) for sc in self.sc_codes}
        return sorted(found)

    def members(self, area: str) -> list[str]:
        return [sc for sc in self.sc_codes if self.area_of(sc) == area]


@dataclass(frozen=True)
class AnalysisConfig:
    countries: tuple[str, ...]
    period: tuple[int, int]
    citation_cutoff: dt.date
    doc_types: frozenset[DocType] = DEFAULT_DOC_TYPES
    made_in_threshold: Fraction = Fraction(1, 2)
    # specialization switches; see bkflow.specialization
    rca_include_domestic: bool = False
    rca_exclude_own_sc: bool = False

    def __post_init__(self) -> None:
        countries = tuple(self.countries)
        for c in countries:
            try:
                check_country(c)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if len(countries) < 2:
            raise ConfigError("at least two countries are required")
        if len(set(countries)) != len(countries):
            raise ConfigError(f"duplicate countries in {countries}")
        object.__setattr__(self, "countries", countries)
        lo, hi = self.period
        if lo > hi:
            raise ConfigError(f"period start {lo} after end {hi}")
        threshold = Fraction(self.made_in_threshold)
        if not 0 < threshold <= 1:
            raise ConfigError(f"made-in threshold must lie in (0, 1], got {threshold}")
        object.__setattr__(self, "made_in_threshold", threshold)
        object.__setattr__(self, "doc_types", frozenset(DocType(d) for d in self.doc_types))

    def in_production_window(self, pub: PublicationRecord) -> bool:
        return self.period[0] <= pub.year <= self.period[1] and pub.doc_type in self.doc_types

    def to_dict(self) -> dict:
        return {
            "countries": list(self.countries),
            "period": list(self.period),
            "cutoff": self.citation_cutoff.isoformat(),
            "doc_types": sorted(d.value for d in self.doc_types),
            "threshold": str(self.made_in_threshold),
            "rca_include_domestic": self.rca_include_domestic,
            "rca_exclude_own_sc": self.rca_exclude_own_sc,
        }


DIAGNOSTIC_CLASSES = (
    "dangling_links",
    "duplicate_links",
    "self_citations",
    "unassigned_journals",
    "tie_attributions",
    "rejected_records",
)


@dataclass
class ValidationReport:
    """Counts of lenient data problems, with the first few offending ids per class."""

    max_examples: int = 20
    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(DIAGNOSTIC_CLASSES, 0))
    examples: dict[str, list[str]] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def record(self, kind: str, ident: object = None, n: int = 1) -> None:
        self.counts[kind] = self.counts.get(kind, 0) + n
        if ident is not None:
            bucket = self.examples.setdefault(kind, [])
            if len(bucket) < self.max_examples:
                bucket.append(str(ident))

    def merge(self, other: ValidationReport) -> None:
        for kind, n in other.counts.items():
            self.counts[kind] = self.counts.get(kind, 0) + n
        for kind, ids in other.examples.items():
            bucket = self.examples.setdefault(kind, [])
            bucket.extend(ids[: self.max_examples - len(bucket)])
        self.errors.extend(other.errors)

    def __getattr__(self, name: str) -> int:
        # report.dangling_links etc.
        counts = self.__dict__.get("counts")
        if counts is not None and name in counts:
            return counts[name]
        raise AttributeError(name)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "examples": {k: list(v) for k, v in sorted(self.examples.items())},
            "errors": list(self.errors),
        }

    def render(self) -> str:
        lines = [f"{kind:<20} {n}" for kind, n in sorted(self.counts.items())]
        for kind, ids in sorted(self.examples.items()):
            lines.append(f"  {kind}: {', '.join(ids)}")
        for err in self.errors:
            lines.append(f"ERROR {err}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Corpus:
    publications: Mapping[str, PublicationRecord]
    citing_index: Mapping[str, frozenset[str]]
    categories: JournalCategoryMap
    config: AnalysisConfig
    report: ValidationReport

    def citing(self, cited_id: str) -> frozenset[str]:
        return self.citing_index.get(cited_id, frozenset())

    def sc_codes(self, pub_id: str) -> frozenset[str]:
        return self.categories.lookup(self.publications[pub_id].journal_id)

    @property
    def n_links(self) -> int:
        return sum(len(v) for v in self.citing_index.values())

    def links(self) -> list[CitationLink]:
        return [
            CitationLink(q, p)
            for p in sorted(self.citing_index)
            for q in sorted(self.citing_index[p])
        ]


def build_corpus(
    publications: Iterable[PublicationRecord],
    citations: Iterable[CitationLink],
    categories: JournalCategoryMap,
    config: AnalysisConfig,
    report: ValidationReport | None = None,
) -> Corpus:
    """Index publications and citation links.

    Duplicate publication ids are fatal. Self-citations, dangling and
    duplicate links are dropped and counted in the returned report.
    """
    report = report if report is not None else ValidationReport()
    pubs: dict[str, PublicationRecord] = {}
    for pub in publications:
        if pub.id in pubs:
            raise CorpusError(f"duplicate publication id {pub.id!r}")
        pubs[pub.id] = pub

    index: dict[str, set[str]] = {}
    for link in citations:
        q, p = link.citing_id, link.cited_id
        if q == p:
            report.record("self_citations", q)
            continue
        if q not in pubs or p not in pubs:
            report.record("dangling_links", f"{q}->{p}")
            continue
        bucket = index.get(p)
        if bucket is None:
            index[p] = bucket = set()
        if q in bucket:
            report.record("duplicate_links", f"{q}->{p}")
            continue
        bucket.add(q)

    missing = sorted(
        {
            pub.journal_id
            for pub in pubs.values()
            if config.in_production_window(pub) and not categories.lookup(pub.journal_id)
        }
    )
    for journal in missing:
        report.record("unassigned_journals", journal)

    return Corpus(
        publications=pubs,
        citing_index={p: frozenset(qs) for p, qs in index.items()},
        categories=categories,
        config=config,
        report=report,
    )
