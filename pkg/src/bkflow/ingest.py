"""Readers and writers for the on-disk corpus formats and the key-value config file.

Data rows are parsed leniently: a bad line is recorded in the
:class:`~bkflow.model.ValidationReport` and skipped. Structural problems
(config errors, a subject category mapped to two macro-areas) raise.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from bkflow.model import (
    DEFAULT_DOC_TYPES,
    Affiliation,
    AnalysisConfig,
    CitationLink,
    ConfigError,
    CorpusError,
    DocType,
    JournalCategoryMap,
    PublicationRecord,
    ValidationReport,
)

Source = Union[IO[bytes], IO[str], Iterable[str], Iterable[bytes]]

PUBLICATIONS_FILE = "publications.jsonl"
CITATIONS_FILE = "citations.csv"
JOURNALS_FILE = "journals.csv"
AREAS_FILE = "sc_areas.csv"

CITATION_HEADER = ["citing_id", "cited_id"]
JOURNAL_HEADER = ["journal_id", "sc_codes"]
AREA_HEADER = ["sc_code", "macro_area"]


def _lines(stream: Source) -> Iterator[str]:
    if isinstance(stream, (io.BufferedIOBase, io.RawIOBase)):
        stream = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    for chunk in stream:
        if isinstance(chunk, bytes):
            chunk = chunk.decode("utf-8")
        parts = chunk.split("\n")
        if len(parts) == 1 or parts[1:] == [""]:
            yield chunk
            continue
        # an in-memory blob rather than a single line
        for part in parts[:-1]:
            yield part + "\n"
        if parts[-1]:
            yield parts[-1]


def _publication_from_obj(obj: dict) -> PublicationRecord:
    affs = tuple(Affiliation(str(a["institution_id"]), str(a["country"])) for a in obj["affiliations"])
    year = obj["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        raise ValueError(f"year must be an integer, got {year!r}")
    journal = obj["journal_id"]
    if not isinstance(journal, str):
        raise ValueError("journal_id must be a string")
    date = obj.get("date")
    return PublicationRecord(
        id=str(obj["id"]),
        year=year,
        doc_type=DocType(obj["doc_type"]),
        journal_id=journal,
        affiliations=affs,
        date=dt.date.fromisoformat(date) if date else None,
    )


def parse_publications(
    stream: Source, report: ValidationReport | None = None, source: str = PUBLICATIONS_FILE
) -> list[PublicationRecord]:
    """One :class:`PublicationRecord` per valid JSON line.

    Rejected lines are recorded as ``"<source>:<line number>"``.
    """
    report = report if report is not None else ValidationReport()
    records = []
    for lineno, line in enumerate(_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            records.append(_publication_from_obj(json.loads(line)))
        except (ValueError, KeyError, TypeError) as exc:
            report.record("rejected_records", f"{source}:{lineno}")
            report.examples.setdefault("rejected_reasons", [])
            if len(report.examples["rejected_reasons"]) < report.max_examples:
                report.examples["rejected_reasons"].append(f"{source}:{lineno}: {exc}")
    return records


def _csv_rows(stream: Source) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(_lines(stream))
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        yield reader.line_num, [c.strip() for c in row]


def parse_citations(
    stream: Source, report: ValidationReport | None = None, source: str = CITATIONS_FILE
) -> list[CitationLink]:
    """Citing/cited pairs from a two-column CSV, header optional."""
    report = report if report is not None else ValidationReport()
    links = []
    first = True
    for lineno, row in _csv_rows(stream):
        if first:
            first = False
            if row == CITATION_HEADER:
                continue
        if len(row) != 2 or not row[0] or not row[1]:
            report.record("rejected_records", f"{source}:{lineno}")
            continue
        links.append(CitationLink(row[0], row[1]))
    return links


def parse_journal_categories(
    journals: Source, areas: Source, report: ValidationReport | None = None
) -> JournalCategoryMap:
    report = report if report is not None else ValidationReport()
    area_of: dict[str, str] = {}
    first = True
    for lineno, row in _csv_rows(areas):
        if first:
            first = False
            if row == AREA_HEADER:
                continue
        if len(row) != 2 or not row[0] or not row[1]:
            report.record("rejected_records", f"{AREAS_FILE}:{lineno}")
            continue
        sc, area = row
        prev = area_of.setdefault(sc, area)
        if prev != area:
            raise CorpusError(f"subject category {sc!r} assigned to two macro-areas: {prev!r}, {area!r}")

    journal_scs: dict[str, set[str]] = {}
    first = True
    for lineno, row in _csv_rows(journals):
        if first:
            first = False
            if row == JOURNAL_HEADER:
                continue
        if len(row) not in (1, 2) or not row[0]:
            report.record("rejected_records", f"{JOURNALS_FILE}:{lineno}")
            continue
        codes = row[1].split(";") if len(row) == 2 else []
        journal_scs.setdefault(row[0], set()).update(c.strip() for c in codes if c.strip())

    return JournalCategoryMap(
        journals={j: frozenset(s) for j, s in journal_scs.items()},
        areas=area_of,
    )


def parse_kv(stream: Source) -> dict[str, str]:
    """Flat ``key = value`` text; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(_lines(stream), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        values[key.lower()] = value
    return values


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]


def _parse_bool(key: str, value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_period(value: str) -> tuple[int, int]:
    parts = value.replace("..", " ").replace(",", " ").replace("-", " ").split()
    try:
        years = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"period: expected two integer years, got {value!r}") from None
    if len(years) != 2:
        raise ConfigError(f"period: expected two integer years, got {value!r}")
    return years[0], years[1]


def parse_threshold(value: str) -> Fraction:
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"threshold: cannot parse {value!r}") from None


def parse_date(value: str) -> dt.date:
    try:
        return dt.date.fromisoformat(value.strip())
    except ValueError:
        raise ConfigError(f"cutoff: malformed date {value!r}") from None


CONFIG_KEYS = {
    "countries",
    "period",
    "cutoff",
    "doc_types",
    "threshold",
    "rca_include_domestic",
    "rca_exclude_own_sc",
}


def config_from_kv(values: dict[str, str]) -> AnalysisConfig:
    unknown = sorted(k for k in values if k not in CONFIG_KEYS and not k.startswith("gen."))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("countries", "period", "cutoff"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    doc_types = DEFAULT_DOC_TYPES
    if "doc_types" in values:
        try:
            doc_types = frozenset(DocType(d) for d in _split_list(values["doc_types"]))
        except ValueError as exc:
            raise ConfigError(f"doc_types: {exc}") from None
    return AnalysisConfig(
        countries=tuple(c.upper() for c in _split_list(values["countries"])),
        period=_parse_period(values["period"]),
        citation_cutoff=parse_date(values["cutoff"]),
        doc_types=doc_types,
        made_in_threshold=parse_threshold(values.get("threshold", "1/2")),
        rca_include_domestic=_parse_bool("rca_include_domestic", values.get("rca_include_domestic", "false")),
        rca_exclude_own_sc=_parse_bool("rca_exclude_own_sc", values.get("rca_exclude_own_sc", "false")),
    )


def parse_config(stream: Source) -> AnalysisConfig:
    return config_from_kv(parse_kv(stream))


# -- writers -----------------------------------------------------------------


def publication_to_obj(pub: PublicationRecord) -> dict:
    obj = {
        "id": pub.id,
        "year": pub.year,
        "doc_type": pub.doc_type.value,
        "journal_id": pub.journal_id,
        "affiliations": [
            {"institution_id": a.institution_id, "country": a.country} for a in pub.affiliations
        ],
    }
    if pub.date is not None:
        obj["date"] = pub.date.isoformat()
    return obj


def write_publications(pubs: Iterable[PublicationRecord], out: IO[str]) -> None:
    for pub in pubs:
        out.write(json.dumps(publication_to_obj(pub), separators=(",", ":")))
        out.write("\n")


def write_citations(links: Iterable[CitationLink], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CITATION_HEADER)
    writer.writerows((link.citing_id, link.cited_id) for link in links)


def write_journal_categories(categories: JournalCategoryMap, journals_out: IO[str], areas_out: IO[str]) -> None:
    writer = csv.writer(journals_out, lineterminator="\n")
    writer.writerow(JOURNAL_HEADER)
    for journal in sorted(categories.journals):
        writer.writerow((journal, ";".join(sorted(categories.journals[journal]))))
    writer = csv.writer(areas_out, lineterminator="\n")
    writer.writerow(AREA_HEADER)
    for sc in sorted(categories.areas):
        writer.writerow((sc, categories.areas[sc]))


def format_config(config: AnalysisConfig) -> str:
    lines = [
        f"countries = {','.join(config.countries)}",
        f"period = {config.period[0]} {config.period[1]}",
        f"cutoff = {config.citation_cutoff.isoformat()}",
        f"doc_types = {','.join(sorted(d.value for d in config.doc_types))}",
        f"threshold = {config.made_in_threshold}",
        f"rca_include_domestic = {str(config.rca_include_domestic).lower()}",
        f"rca_exclude_own_sc = {str(config.rca_exclude_own_sc).lower()}",
    ]
    return "\n".join(lines) + "\n"


# -- directory helpers -------------------------------------------------------


def read_dataset(
    data_dir: Path, report: ValidationReport | None = None
) -> tuple[list[PublicationRecord], list[CitationLink], JournalCategoryMap]:
    """Read the four canonical files from ``data_dir``.

    Raises ``FileNotFoundError`` if any is missing.
    """
    data_dir = Path(data_dir)
    report = report if report is not None else ValidationReport()
    paths = [data_dir / name for name in (PUBLICATIONS_FILE, CITATIONS_FILE, JOURNALS_FILE, AREAS_FILE)]
    for path in paths:
        if not path.is_file():
            raise FileNotFoundError(str(path))
    with open(paths[0], encoding="utf-8") as fh:
        pubs = parse_publications(fh, report)
    with open(paths[1], encoding="utf-8", newline="") as fh:
        links = parse_citations(fh, report)
    with open(paths[2], encoding="utf-8", newline="") as jf, open(paths[3], encoding="utf-8", newline="") as af:
        categories = parse_journal_categories(jf, af, report)
    return pubs, links, categories


def write_dataset(
    data_dir: Path,
    pubs: Iterable[PublicationRecord],
    links: Iterable[CitationLink],
    categories: JournalCategoryMap,
) -> list[Path]:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    paths = [data_dir / name for name in (PUBLICATIONS_FILE, CITATIONS_FILE, JOURNALS_FILE, AREAS_FILE)]
    with open(paths[0], "w", encoding="utf-8", newline="\n") as fh:
        write_publications(pubs, fh)
    with open(paths[1], "w", encoding="utf-8", newline="") as fh:
        write_citations(links, fh)
    with open(paths[2], "w", encoding="utf-8", newline="") as jf, open(paths[3], "w", encoding="utf-8", newline="") as af:
        write_journal_categories(categories, jf, af)
    return paths
