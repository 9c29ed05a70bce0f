from __future__ import annotations

import datetime as dt
from contextlib import contextmanager
from fractions import Fraction

import pytest

from bkflow.model import (
    Affiliation,
    AnalysisConfig,
    CitationLink,
    DocType,
    JournalCategoryMap,
    PublicationRecord,
)

ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(label: str):
    """Record one PASS/FAIL line for the acceptance summary."""
    try:
        yield
    except BaseException:
        ACCEPTANCE_LINES.append(f"FAIL  {label}")
        raise
    ACCEPTANCE_LINES.append(f"PASS  {label}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pub(pid, *countries, year=2005, journal="J1", doc_type=DocType.ARTICLE, institutions=None):
    """Publication with one institution per listed country (ids made unique)."""
    if institutions is None:
        institutions = [f"{c}-inst{i}" for i, c in enumerate(countries)]
    affs = tuple(Affiliation(inst, c) for inst, c in zip(institutions, countries))
    return PublicationRecord(pid, year, doc_type, journal, affs)


def link(citing, cited):
    return CitationLink(citing, cited)


def config(countries=("A", "B"), **kwargs):
    kwargs.setdefault("period", (2004, 2008))
    kwargs.setdefault("citation_cutoff", dt.date(2017, 6, 10))
    return AnalysisConfig(countries=tuple(countries), **kwargs)


def categories(journals=None, areas=None):
    journals = journals if journals is not None else {"J1": {"S1"}}
    return JournalCategoryMap(
        journals={j: frozenset(s) for j, s in journals.items()},
        areas=areas if areas is not None else {},
    )


@pytest.fixture
def cfg_ab():
    return config()


HALF = Fraction(1, 2)
