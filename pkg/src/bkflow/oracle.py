"""Brute-force reference counts for small corpora.

Works on the raw publication and link lists, not on a built corpus, and
re-derives every counting rule with plain nested loops over
(cited publication, citing publication, country). Nothing here touches the
indexes or tallies used by :mod:`bkflow.flows`; the point is to disagree
loudly if those ever go wrong.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from bkflow.aggregate import ALL, BilateralRow, FieldBkfRow
from bkflow.flows import FlowMatrix
from bkflow.model import (
    UNASSIGNED,
    AnalysisConfig,
    CitationLink,
    JournalCategoryMap,
    PublicationRecord,
)

DEFAULT_SIZE_BOUND = 10_000


class OracleSizeError(ValueError):
    pass


def _check(pubs: Sequence[PublicationRecord], max_publications: int) -> None:
    if len(pubs) > max_publications:
        raise OracleSizeError(f"{len(pubs)} publications exceed the oracle bound of {max_publications}")
    ids = [p.id for p in pubs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate publication ids")


def _made_in_countries(pub: PublicationRecord, config: AnalysisConfig) -> list[str]:
    if not (config.period[0] <= pub.year <= config.period[1]):
        return []
    if pub.doc_type not in config.doc_types:
        return []
    out = []
    for country in config.countries:
        institutions_there = 0
        for aff in pub.affiliations:
            if aff.country == country:
                institutions_there += 1
        if Fraction(institutions_there, len(pub.affiliations)) >= config.made_in_threshold:
            out.append(country)
    return out


def _within_cutoff(pub: PublicationRecord, config: AnalysisConfig) -> bool:
    if pub.date is not None:
        return pub.date <= config.citation_cutoff
    return pub.year <= config.citation_cutoff.year


def _country_present(pub: PublicationRecord, country: str) -> bool:
    for aff in pub.affiliations:
        if aff.country == country:
            return True
    return False


def _each_gain(pubs, links, config):
    """Yield ``(cited, citing, generator, earner)`` for every gain."""
    cites = set()
    for link in links:
        cites.add((link.citing_id, link.cited_id))
    for cited in pubs:
        generators = _made_in_countries(cited, config)
        if not generators:
            continue
        for citing in pubs:
            if citing.id == cited.id:
                continue
            if (citing.id, cited.id) not in cites:
                continue
            if not _within_cutoff(citing, config):
                continue
            for earner in config.countries:
                if not _country_present(citing, earner):
                    continue
                for generator in generators:
                    yield cited, citing, generator, earner


def oracle_flow_matrix(
    pubs: Sequence[PublicationRecord],
    links: Sequence[CitationLink],
    config: AnalysisConfig,
    max_publications: int = DEFAULT_SIZE_BOUND,
) -> FlowMatrix:
    _check(pubs, max_publications)
    countries = list(config.countries)
    grid = [[0 for _ in countries] for _ in countries]
    for _cited, _citing, g, e in _each_gain(pubs, links, config):
        grid[countries.index(g)][countries.index(e)] += 1
    return FlowMatrix.from_rows(countries, grid)


def oracle_benefits(
    pubs: Sequence[PublicationRecord],
    links: Sequence[CitationLink],
    config: AnalysisConfig,
    max_publications: int = DEFAULT_SIZE_BOUND,
) -> dict[str, int]:
    """Citations from in-cutoff publications with an analysis-country address, per made-in publication."""
    _check(pubs, max_publications)
    cites = {(link.citing_id, link.cited_id) for link in links}
    out = {}
    for cited in pubs:
        if not _made_in_countries(cited, config):
            continue
        out[cited.id] = 0
        for citing in pubs:
            if citing.id == cited.id or not _within_cutoff(citing, config):
                continue
            if not any(_country_present(citing, c) for c in config.countries):
                continue
            if (citing.id, cited.id) in cites:
                out[cited.id] += 1
    return out


def _sc_labels(pub: PublicationRecord, categories: JournalCategoryMap) -> list[str]:
    scs = categories.journals.get(pub.journal_id)
    if not scs:
        return [UNASSIGNED]
    return sorted(scs)


def _all_sc_codes(categories: JournalCategoryMap) -> set[str]:
    codes = set(categories.areas)
    for scs in categories.journals.values():
        codes |= set(scs)
    return codes


def oracle_field_table(
    pubs: Sequence[PublicationRecord],
    links: Sequence[CitationLink],
    categories: JournalCategoryMap,
    config: AnalysisConfig,
    country: str,
    max_publications: int = DEFAULT_SIZE_BOUND,
) -> list[FieldBkfRow]:
    _check(pubs, max_publications)
    generated: dict[str, int] = {}
    earned: dict[str, int] = {}
    for cited, _citing, g, e in _each_gain(pubs, links, config):
        if g == e:
            continue
        for sc in _sc_labels(cited, categories):
            if g == country:
                generated[sc] = generated.get(sc, 0) + 1
            if e == country:
                earned[sc] = earned.get(sc, 0) + 1
    codes = _all_sc_codes(categories) | set(generated) | set(earned)
    return [
        FieldBkfRow(sc, categories.areas.get(sc, UNASSIGNED), generated.get(sc, 0), earned.get(sc, 0))
        for sc in sorted(codes)
    ]


def oracle_bilateral(
    pubs: Sequence[PublicationRecord],
    links: Sequence[CitationLink],
    categories: JournalCategoryMap,
    config: AnalysisConfig,
    k: str,
    l: str,
    max_publications: int = DEFAULT_SIZE_BOUND,
) -> tuple[BilateralRow, list[BilateralRow]]:
    """Overall row and per-SC rows of the k/l balance."""
    _check(pubs, max_publications)
    total_out = total_in = 0
    out_sc: dict[str, int] = {}
    in_sc: dict[str, int] = {}
    for cited, _citing, g, e in _each_gain(pubs, links, config):
        if g == k and e == l:
            total_out += 1
            for sc in _sc_labels(cited, categories):
                out_sc[sc] = out_sc.get(sc, 0) + 1
        elif g == l and e == k:
            total_in += 1
            for sc in _sc_labels(cited, categories):
                in_sc[sc] = in_sc.get(sc, 0) + 1
    codes = _all_sc_codes(categories) | set(out_sc) | set(in_sc)
    rows = [
        BilateralRow(sc, categories.areas.get(sc, UNASSIGNED), out_sc.get(sc, 0), in_sc.get(sc, 0))
        for sc in sorted(codes)
    ]
    return BilateralRow(ALL, ALL, total_out, total_in), rows
