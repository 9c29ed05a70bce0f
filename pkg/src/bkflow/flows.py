"""Benefits, gains and the country x country flow matrix.

A citation is one benefit for the cited publication. Each distinct analysis
country in the citing publication's address list earns one gain from it,
once per made-in country of the cited publication. A gain is domestic when
earner and generator coincide.

Gains are accumulated into a tally keyed by ``(generator, earner, sc_codes)``
where ``sc_codes`` is the frozen subject-category set of the cited journal.
Every report table is a marginal of that tally.
"""

from __future__ import annotations

import multiprocessing as mp
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

from bkflow.attribution import MadeInResult, made_in
from bkflow.model import AnalysisConfig, Corpus

GainKey = tuple[str, str, frozenset[str]]


@dataclass(frozen=True, slots=True)
class GainRecord:
    cited_id: str
    citing_id: str
    generator: str
    earner: str
    domestic: bool
    sc_codes: frozenset[str]


@dataclass
class GainLedger:
    """Aggregated gains plus the per-publication benefit counts behind them."""

    countries: tuple[str, ...]
    tally: Counter = field(default_factory=Counter)
    benefits: dict[str, int] = field(default_factory=dict)

    def merge(self, other: GainLedger) -> None:
        self.tally.update(other.tally)
        self.benefits.update(other.benefits)

    @property
    def total_gains(self) -> int:
        return sum(self.tally.values())

    def matrix(self) -> FlowMatrix:
        return FlowMatrix.from_tally(self.countries, self.tally)


def tally_records(records: Iterable[GainRecord]) -> Counter:
    tally: Counter = Counter()
    for r in records:
        tally[(r.generator, r.earner, r.sc_codes)] += 1
    return tally


def earner_table(corpus: Corpus, config: AnalysisConfig) -> dict[str, tuple[str, ...]]:
    """Citing-eligible publications mapped to their distinct analysis countries.

    Eligible means issued on or before the cutoff and carrying at least one
    analysis-country affiliation; anything else earns nothing and brings no
    benefit inside the closed world.
    """
    cutoff = config.citation_cutoff
    interned: dict[frozenset, tuple[str, ...]] = {}
    table = {}
    for pid, pub in corpus.publications.items():
        if not pub.issued_on_or_before(cutoff):
            continue
        present = frozenset(a.country for a in pub.affiliations)
        key = interned.get(present)
        if key is None:
            key = interned[present] = tuple(c for c in config.countries if c in present)
        if key:
            table[pid] = key
    return table


def _generators(pid: str, corpus: Corpus, config: AnalysisConfig) -> tuple[str, ...]:
    pub = corpus.publications[pid]
    if not config.in_production_window(pub):
        return ()
    return made_in(pub, config.made_in_threshold).generators(config.countries)


def benefits_of(cited_id: str, corpus: Corpus, config: AnalysisConfig | None = None) -> int:
    """Citations received from eligible citing publications."""
    config = config or corpus.config
    if cited_id not in corpus.publications:
        raise KeyError(f"unknown publication {cited_id!r}")
    earners = earner_table(corpus, config)
    return sum(1 for q in corpus.citing(cited_id) if q in earners)


def gains_of(cited_id: str, corpus: Corpus, config: AnalysisConfig | None = None) -> list[GainRecord]:
    config = config or corpus.config
    if cited_id not in corpus.publications:
        raise KeyError(f"unknown publication {cited_id!r}")
    gens = _generators(cited_id, corpus, config)
    if not gens:
        return []
    earners = earner_table(corpus, config)
    scs = corpus.sc_codes(cited_id)
    out = []
    for q in sorted(corpus.citing(cited_id)):
        for g in gens:
            for e in earners.get(q, ()):
                out.append(GainRecord(cited_id, q, g, e, g == e, scs))
    return out


def iter_gain_records(
    corpus: Corpus, attribution: dict[str, MadeInResult], config: AnalysisConfig | None = None
) -> Iterator[GainRecord]:
    """Every gain, ordered by cited id, citing id, generator, earner."""
    config = config or corpus.config
    earners = earner_table(corpus, config)
    for p in sorted(attribution):
        gens = attribution[p].generators(config.countries)
        scs = corpus.sc_codes(p)
        for q in sorted(corpus.citing(p)):
            for g in gens:
                for e in earners.get(q, ()):
                    yield GainRecord(p, q, g, e, g == e, scs)


def _tally_chunk(
    pids: list[str],
    corpus: Corpus,
    attribution: dict[str, MadeInResult],
    earners: dict[str, tuple[str, ...]],
    countries: tuple[str, ...],
) -> GainLedger:
    ledger = GainLedger(countries)
    tally = ledger.tally
    index = corpus.citing_index
    pubs = corpus.publications
    lookup = corpus.categories.lookup
    for p in pids:
        gens = attribution[p].generators(countries)
        citing = index.get(p)
        if not citing:
            ledger.benefits[p] = 0
            continue
        per_key = Counter(map(earners.get, citing))
        per_key.pop(None, None)
        ledger.benefits[p] = sum(per_key.values())
        scs = lookup(pubs[p].journal_id)
        for ekey, n in per_key.items():
            for g in gens:
                for e in ekey:
                    tally[(g, e, scs)] += n
    return ledger


_SHARED: tuple | None = None


def _worker(pids: list[str]) -> GainLedger:
    assert _SHARED is not None
    return _tally_chunk(pids, *_SHARED)


def tally_gains(
    corpus: Corpus,
    attribution: dict[str, MadeInResult],
    config: AnalysisConfig | None = None,
    jobs: int = 1,
) -> GainLedger:
    """Accumulate all gains of the attributed publications.

    With ``jobs > 1`` the cited publications are split into chunks handled by
    forked worker processes; partial ledgers are merged by addition, so the
    result does not depend on scheduling.
    """
    global _SHARED
    config = config or corpus.config
    earners = earner_table(corpus, config)
    pids = sorted(attribution)
    if jobs <= 1 or len(pids) < 2 or "fork" not in mp.get_all_start_methods():
        return _tally_chunk(pids, corpus, attribution, earners, config.countries)

    chunks = [pids[i::jobs] for i in range(jobs)]
    _SHARED = (corpus, attribution, earners, config.countries)
    try:
        with ProcessPoolExecutor(jobs, mp_context=mp.get_context("fork")) as pool:
            parts = list(pool.map(_worker, chunks))
    finally:
        _SHARED = None
    ledger = GainLedger(config.countries)
    for part in parts:
        ledger.merge(part)
    return ledger


@dataclass(frozen=True)
class FlowMatrix:
    """Gains by generating country (rows) and earning country (columns)."""

    countries: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.countries)
        if len(self.cells) != n or any(len(row) != n for row in self.cells):
            raise ValueError("flow matrix must be square over the country list")
        if any(v < 0 for row in self.cells for v in row):
            raise ValueError("flow matrix cells must be non-negative")

    @classmethod
    def from_tally(cls, countries: tuple[str, ...], tally: Counter) -> FlowMatrix:
        pos = {c: i for i, c in enumerate(countries)}
        grid = [[0] * len(countries) for _ in countries]
        for (g, e, _scs), n in tally.items():
            grid[pos[g]][pos[e]] += n
        return cls(tuple(countries), tuple(tuple(r) for r in grid))

    @classmethod
    def from_rows(cls, countries: Iterable[str], rows: Iterable[Iterable[int]]) -> FlowMatrix:
        return cls(tuple(countries), tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def zeros(cls, countries: Iterable[str]) -> FlowMatrix:
        countries = tuple(countries)
        return cls(countries, tuple((0,) * len(countries) for _ in countries))

    def _i(self, country: str) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise KeyError(f"country {country!r} not in matrix") from None

    def cell(self, generator: str, earner: str) -> int:
        return self.cells[self._i(generator)][self._i(earner)]

    def row_total(self, generator: str) -> int:
        return sum(self.cells[self._i(generator)])

    def column_total(self, earner: str) -> int:
        j = self._i(earner)
        return sum(row[j] for row in self.cells)

    @property
    def total(self) -> int:
        return sum(map(sum, self.cells))

    def row_share(self, generator: str, earner: str) -> Fraction | None:
        """Cell as a fraction of its generator row; ``None`` for an empty row."""
        total = self.row_total(generator)
        return Fraction(self.cell(generator, earner), total) if total else None


class DomesticSplit(NamedTuple):
    domestic_gains: int
    foreign_gains_generated: int
    gains_earned: int


def domestic_split(matrix: FlowMatrix) -> dict[str, DomesticSplit]:
    out = {}
    for i, k in enumerate(matrix.countries):
        diag = matrix.cells[i][i]
        out[k] = DomesticSplit(
            diag,
            sum(matrix.cells[i]) - diag,
            sum(row[i] for row in matrix.cells) - diag,
        )
    return out


def compute_flow_matrix(
    corpus: Corpus,
    attribution: dict[str, MadeInResult],
    config: AnalysisConfig | None = None,
    jobs: int = 1,
) -> FlowMatrix:
    return tally_gains(corpus, attribution, config, jobs).matrix()
