import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkflow.aggregate import CountrySummary, fmt_pct, fmt_ratio
from bkflow.attribution import attribute_corpus
from bkflow.flows import (
    FlowMatrix,
    benefits_of,
    compute_flow_matrix,
    domestic_split,
    gains_of,
    iter_gain_records,
    tally_gains,
    tally_records,
)
from bkflow.model import build_corpus
from bkflow.synth import generate_corpus, simple_params

import published_tables as published
from conftest import categories, config, link, pub


def corpus_of(pubs, links, cfg=None, cats=None):
    cfg = cfg or config(("A", "B"))
    return build_corpus(pubs, links, cats or categories(), cfg)


def test_benefits_count_distinct_citers():
    pubs = [pub("P1", "A"), pub("Q1", "A"), pub("Q2", "B"), pub("Q3", "A", "B")]
    c = corpus_of(pubs, [link("Q1", "P1"), link("Q2", "P1"), link("Q3", "P1"), link("Q3", "P1")])
    assert benefits_of("P1", c) == 3
    assert benefits_of("Q1", c) == 0
    with pytest.raises(KeyError):
        benefits_of("nope", c)


def test_cutoff_is_inclusive_at_year_granularity():
    cfg = config(("A", "B"), citation_cutoff=dt.date(2017, 6, 10))
    pubs = [pub("P1", "A"), pub("Q1", "B", year=2017), pub("Q2", "B", year=2018)]
    c = corpus_of(pubs, [link("Q1", "P1"), link("Q2", "P1")], cfg)
    assert benefits_of("P1", c) == 1


def test_gains_two_countries_one_benefit():
    c = corpus_of([pub("P1", "A"), pub("Q1", "A", "B")], [link("Q1", "P1")])
    gains = gains_of("P1", c)
    assert benefits_of("P1", c) == 1
    assert [(g.generator, g.earner, g.domestic) for g in gains] == [("A", "A", True), ("A", "B", False)]


def test_distinct_country_rule():
    c = corpus_of([pub("P1", "A"), pub("Q1", "B", "B", "B")], [link("Q1", "P1")])
    assert [(g.generator, g.earner) for g in gains_of("P1", c)] == [("A", "B")]


def test_outside_countries_earn_nothing():
    c = corpus_of([pub("P1", "A"), pub("Q1", "Z", "B")], [link("Q1", "P1")])
    assert [(g.generator, g.earner) for g in gains_of("P1", c)] == [("A", "B")]


def test_tie_generates_full_set_per_generator():
    c = corpus_of([pub("P1", "A", "B"), pub("Q1", "A")], [link("Q1", "P1")])
    assert {(g.generator, g.earner) for g in gains_of("P1", c)} == {("A", "A"), ("B", "A")}


def test_gain_records_carry_cited_scs():
    cats = categories({"J1": {"S1", "S2"}, "J2": {"S3"}})
    c = corpus_of([pub("P1", "A"), pub("Q1", "B", journal="J2")], [link("Q1", "P1")], cats=cats)
    (g,) = gains_of("P1", c)
    assert g.sc_codes == {"S1", "S2"}


def test_single_country_world():
    cfg = config(("A", "B"))
    pubs = [pub("P1", "A"), pub("P2", "A"), pub("Q1", "A")]
    c = corpus_of(pubs, [link("Q1", "P1"), link("Q1", "P2"), link("P2", "P1")], cfg)
    m = compute_flow_matrix(c, attribute_corpus(c), cfg)
    assert m.cells == ((3, 0), (0, 0))
    assert fmt_pct(m.row_share("A", "A")) == "100.0"
    assert m.row_share("B", "A") is None


def test_published_averages():
    il = CountrySummary("IL", *published.TABLE1["IL"])
    assert fmt_ratio(il.avg_benefits_per_cited) == "6.70"
    assert fmt_ratio(il.avg_gains_per_benefit) == "1.04"
    assert il.total_gains * 100 // il.total_benefits == 103  # 1.038...


def test_published_israel_row():
    m = FlowMatrix.from_rows(published.COUNTRIES, published.table3_completed())
    assert m.cell("IL", "IL") == 164_688
    assert fmt_pct(m.row_share("IL", "IL")) == "66.6"
    assert m.cell("IL", "IT") == 50_675 and m.cell("IL", "NZ") == 4_777
    assert m.row_total("IL") - m.cell("IL", "IL") - 50_675 - 4_777 == 26_988
    assert m.row_total("IL") == 247_128


def test_published_domestic_split():
    split = domestic_split(FlowMatrix.from_rows(published.COUNTRIES, published.table3_completed()))
    assert split["IL"].foreign_gains_generated == 82_440
    assert split["IL"].gains_earned == 43_819 + 3_403 + 28_266 == 75_488
    assert split["IT"].gains_earned == 50_675 + 18_153 + 148_890 == 217_718
    assert split["IL"].domestic_gains == 164_688


def test_zero_matrix_split():
    split = domestic_split(FlowMatrix.zeros(("A", "B", "C")))
    assert all(s == (0, 0, 0) for s in split.values())


def test_matrix_rejects_negative_and_ragged():
    with pytest.raises(ValueError):
        FlowMatrix.from_rows(("A", "B"), [[1, -1], [0, 0]])
    with pytest.raises(ValueError):
        FlowMatrix.from_rows(("A", "B"), [[1, 1]])


def generated(seed, n=150, **kw):
    gen = generate_corpus(simple_params(seed=seed, publications=n, **kw))
    cfg = gen.params.analysis_config()
    corpus = build_corpus(gen.publications, gen.citations, gen.categories, cfg)
    return gen, corpus, cfg


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_flow_invariants(seed):
    _gen, corpus, cfg = generated(seed)
    attribution = attribute_corpus(corpus, cfg)
    ledger = tally_gains(corpus, attribution, cfg)
    m = ledger.matrix()
    records = list(iter_gain_records(corpus, attribution, cfg))
    assert m.total == len(records) == ledger.total_gains
    assert tally_records(records) == +ledger.tally
    split = domestic_split(m)
    assert sum(s.foreign_gains_generated for s in split.values()) == sum(s.gains_earned for s in split.values())
    n = len(cfg.countries)
    for pid, res in attribution.items():
        b = ledger.benefits[pid]
        for g in res.generators(cfg.countries):
            count = sum(1 for r in records if r.cited_id == pid and r.generator == g)
            assert b <= count <= b * n


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_removing_a_citer_subtracts_its_contribution(seed, data):
    gen, corpus, cfg = generated(seed, n=120)
    citers = sorted({l.citing_id for l in gen.citations})
    if not citers:
        return
    victim = data.draw(st.sampled_from(citers))
    before = compute_flow_matrix(corpus, attribute_corpus(corpus, cfg), cfg)
    attribution = attribute_corpus(corpus, cfg)
    contribution = tally_records(r for r in iter_gain_records(corpus, attribution, cfg) if r.citing_id == victim)
    delta = FlowMatrix.from_tally(cfg.countries, contribution)
    links = [l for l in gen.citations if l.citing_id != victim]
    reduced = build_corpus(gen.publications, links, gen.categories, cfg)
    after = compute_flow_matrix(reduced, attribute_corpus(reduced, cfg), cfg)
    for g in cfg.countries:
        for e in cfg.countries:
            assert before.cell(g, e) - after.cell(g, e) == delta.cell(g, e)


def test_parallel_tally_matches_serial():
    _gen, corpus, cfg = generated(11, n=400)
    attribution = attribute_corpus(corpus, cfg)
    serial = tally_gains(corpus, attribution, cfg, jobs=1)
    parallel = tally_gains(corpus, attribution, cfg, jobs=3)
    assert +serial.tally == +parallel.tally
    assert serial.benefits == parallel.benefits
