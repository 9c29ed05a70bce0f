import datetime as dt
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkflow.model import (
    Affiliation,
    AnalysisConfig,
    ConfigError,
    CorpusError,
    DocType,
    PublicationRecord,
    build_corpus,
)

from conftest import categories, config, link, pub


def test_minimal_corpus(cfg_ab):
    corpus = build_corpus([pub("P1", "A"), pub("Q1", "B")], [link("Q1", "P1")], categories(), cfg_ab)
    assert corpus.citing_index == {"P1": frozenset({"Q1"})}
    assert corpus.n_links == 1


def test_dangling_link_is_dropped_and_counted(cfg_ab):
    corpus = build_corpus([pub("P1", "A")], [link("Q9", "P1")], categories(), cfg_ab)
    assert corpus.report.dangling_links == 1
    assert corpus.n_links == 0


def test_duplicate_link_stored_once(cfg_ab):
    pubs = [pub("P1", "A"), pub("Q1", "B")]
    corpus = build_corpus(pubs, [link("Q1", "P1"), link("Q1", "P1")], categories(), cfg_ab)
    assert corpus.citing("P1") == frozenset({"Q1"})
    assert corpus.report.duplicate_links == 1


def test_self_citation_dropped(cfg_ab):
    corpus = build_corpus([pub("P1", "A")], [link("P1", "P1")], categories(), cfg_ab)
    assert corpus.n_links == 0
    assert corpus.report.self_citations == 1


def test_duplicate_publication_id_is_fatal(cfg_ab):
    with pytest.raises(CorpusError, match="P1"):
        build_corpus([pub("P1", "A"), pub("P1", "B")], [], categories(), cfg_ab)


def test_unassigned_journal_counted(cfg_ab):
    corpus = build_corpus([pub("P1", "A", journal="J9")], [], categories(), cfg_ab)
    assert corpus.report.unassigned_journals == 1
    assert corpus.sc_codes("P1") == frozenset()


def test_publication_invariants():
    with pytest.raises(ValueError, match="empty affiliation"):
        PublicationRecord("P1", 2005, DocType.ARTICLE, "J1", ())
    with pytest.raises(ValueError, match="duplicate institution"):
        PublicationRecord("P1", 2005, DocType.ARTICLE, "J1", (Affiliation("u", "A"), Affiliation("u", "B")))
    with pytest.raises(ValueError):
        Affiliation("u", "it")
    with pytest.raises(ValueError):
        Affiliation("", "IT")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(countries=("A",)),
        dict(countries=("A", "A")),
        dict(period=(2009, 2004)),
        dict(made_in_threshold=Fraction(0)),
        dict(made_in_threshold=Fraction(3, 2)),
    ],
)
def test_config_invariants(kwargs):
    base = dict(countries=("A", "B"), period=(2004, 2008), citation_cutoff=dt.date(2017, 6, 10))
    base.update(kwargs)
    with pytest.raises(ConfigError):
        AnalysisConfig(**base)


def test_period_and_doc_type_only_restrict_cited_side(cfg_ab):
    late = pub("L1", "A", year=2015)
    other = pub("O1", "A", doc_type=DocType.OTHER)
    assert not cfg_ab.in_production_window(late)
    assert not cfg_ab.in_production_window(other)
    corpus = build_corpus([pub("P1", "B"), late, other], [link("L1", "P1"), link("O1", "P1")], categories(), cfg_ab)
    assert corpus.citing("P1") == {"L1", "O1"}


ids = st.sampled_from([f"P{i}" for i in range(8)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(ids, ids), max_size=30), st.randoms(use_true_random=False))
def test_build_is_permutation_invariant(pairs, rnd):
    pubs = [pub(f"P{i}", "A" if i % 2 else "B") for i in range(6)]
    links = [link(q, p) for q, p in pairs]
    first = build_corpus(pubs, links, categories(), config())
    rnd.shuffle(pubs)
    rnd.shuffle(links)
    second = build_corpus(pubs, links, categories(), config())
    assert first.citing_index == second.citing_index
    assert first.publications == second.publications
    for cited, citing in first.citing_index.items():
        assert cited in first.publications
        assert all(q in first.publications and q != cited for q in citing)
    assert first.report.counts == second.report.counts
