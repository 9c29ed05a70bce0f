import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkflow.aggregate import bilateral_bkf, bkf_by_field
from bkflow.attribution import attribute_corpus, tie_count
from bkflow.flows import compute_flow_matrix, tally_gains
from bkflow.ingest import read_dataset, write_dataset
from bkflow.model import ConfigError, ValidationReport, build_corpus
from bkflow.oracle import (
    OracleSizeError,
    oracle_benefits,
    oracle_bilateral,
    oracle_field_table,
    oracle_flow_matrix,
)
from bkflow.synth import CountryProfile, GeneratorParams, generate_corpus, params_from_kv, simple_params

from conftest import categories, config, link, pub


def build(gen, cfg=None):
    cfg = cfg or gen.params.analysis_config()
    corpus = build_corpus(gen.publications, gen.citations, gen.categories, cfg)
    return corpus, cfg


# -- generator -----------------------------------------------------------------


def test_same_seed_same_bytes(tmp_path):
    for name in ("a", "b"):
        gen = generate_corpus(simple_params(seed=42, publications=300))
        write_dataset(tmp_path / name, gen.publications, gen.citations, gen.categories)
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_different_seeds_differ():
    a = generate_corpus(simple_params(seed=1, publications=100))
    b = generate_corpus(simple_params(seed=2, publications=100))
    assert a.citations != b.citations


def test_counts_and_round_trip(tmp_path):
    gen = generate_corpus(simple_params(seed=5, publications=250, citations=1000))
    assert len(gen.publications) == 250
    assert 0 < len(gen.citations) <= 1000
    write_dataset(tmp_path, gen.publications, gen.citations, gen.categories)
    report = ValidationReport()
    pubs, links, cats = read_dataset(tmp_path, report)
    assert report.rejected_records == 0
    assert pubs == gen.publications and links == gen.citations
    assert cats.journals == gen.categories.journals and dict(cats.areas) == dict(gen.categories.areas)


def test_full_home_bias_keeps_gains_domestic():
    gen = generate_corpus(simple_params(seed=3, publications=400, home_bias=1.0))
    corpus, cfg = build(gen)
    m = compute_flow_matrix(corpus, attribute_corpus(corpus, cfg), cfg)
    assert m.total > 0
    assert all(m.cells[i][j] == 0 for i in range(4) for j in range(4) if i != j)


def test_no_ties_when_tie_rate_zero():
    gen = generate_corpus(simple_params(seed=9, publications=400, tie_rate=0.0))
    corpus, cfg = build(gen)
    assert tie_count(attribute_corpus(corpus, cfg)) == 0


def test_ties_present_at_high_rate():
    gen = generate_corpus(simple_params(seed=9, publications=400, tie_rate=0.5, mixed_rate=0.0))
    corpus, cfg = build(gen)
    assert tie_count(attribute_corpus(corpus, cfg)) > 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"home_bias": 1.5},
        {"tie_rate": 0.7, "mixed_rate": 0.5},
        {"seed": -1},
        {"journals": 0},
        {"institutions_per_country": 2},
    ],
)
def test_bad_params(kwargs):
    with pytest.raises(ConfigError):
        simple_params(**{"seed": 0, **kwargs})


def test_citations_need_publications():
    with pytest.raises(ConfigError):
        GeneratorParams(seed=0, countries=(CountryProfile("AA", 0),), citation_density=1.0)


def test_params_from_config_keys():
    cfg = config(("AA", "BB"))
    p = params_from_kv({"gen.seed": "7", "gen.publications": "AA:10,BB:5", "gen.home_bias": "0.9"}, cfg)
    assert (p.seed, p.home_bias, [c.publications for c in p.countries]) == (7, 0.9, [10, 5])
    with pytest.raises(ConfigError):
        params_from_kv({"gen.bogus": "1"}, cfg)
    with pytest.raises(ConfigError):
        params_from_kv({"gen.seed": "x"}, cfg)


# -- oracle --------------------------------------------------------------------


def test_oracle_hand_fixture():
    cfg = config(("A", "B"))
    pubs = [pub("P1", "A"), pub("P2", "A", "B"), pub("Q1", "A", "B"), pub("Q2", "B", year=2019)]
    links = [link("Q1", "P1"), link("Q1", "P2"), link("Q2", "P1")]
    m = oracle_flow_matrix(pubs, links, cfg)
    # P1 -> A,B ; P2 (tie) -> A,B from A and from B
    assert m.cells == ((2, 2), (1, 1))
    assert oracle_benefits(pubs, links, cfg) == {"P1": 1, "P2": 1, "Q1": 0}


def test_oracle_empty_and_bound():
    cfg = config(("A", "B"))
    assert oracle_flow_matrix([], [], cfg).total == 0
    with pytest.raises(OracleSizeError):
        oracle_flow_matrix([pub(f"P{i}", "A") for i in range(6)], [], cfg, max_publications=5)


def check_against_oracle(seed, n):
    gen = generate_corpus(simple_params(seed=seed, publications=n, outside_publications=n // 10))
    corpus, cfg = build(gen)
    attribution = attribute_corpus(corpus, cfg)
    ledger = tally_gains(corpus, attribution, cfg)
    pubs, links, cats = gen.publications, gen.citations, gen.categories
    assert ledger.matrix() == oracle_flow_matrix(pubs, links, cfg)
    assert ledger.benefits == oracle_benefits(pubs, links, cfg)
    for k in cfg.countries:
        assert bkf_by_field(ledger.tally, cats, k) == oracle_field_table(pubs, links, cats, cfg, k)
    k, l = cfg.countries[:2]
    overall, rows = oracle_bilateral(pubs, links, cats, cfg, k, l)
    assert bilateral_bkf(ledger.tally, k, l, cats, "overall") == [overall]
    assert bilateral_bkf(ledger.tally, k, l, cats, "sc") == rows


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 180))
def test_pipeline_matches_oracle(seed, n):
    check_against_oracle(seed, n)


def test_oracle_respects_cutoff_date():
    import datetime as dt
    from dataclasses import replace

    cfg = config(("A", "B"), citation_cutoff=dt.date(2017, 6, 10))
    early = replace(pub("Q1", "B", year=2017), date=dt.date(2017, 6, 10))
    late = replace(pub("Q2", "B", year=2017), date=dt.date(2017, 6, 11))
    pubs = [pub("P1", "A"), early, late]
    links = [link("Q1", "P1"), link("Q2", "P1")]
    corpus = build_corpus(pubs, links, categories(), cfg)
    m = compute_flow_matrix(corpus, attribute_corpus(corpus, cfg), cfg)
    assert m == oracle_flow_matrix(pubs, links, cfg)
    assert m.cell("A", "B") == 1
