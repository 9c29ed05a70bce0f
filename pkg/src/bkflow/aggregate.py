"""Report tables built from the gain tally: country summaries, overall and
field-level balances, bilateral balances and macro-area rollups.

All counts are exact integers; ratios are kept as ``Fraction`` (``None`` when
the denominator is zero) and only rounded when formatted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from bkflow.attribution import MadeInResult
from bkflow.flows import FlowMatrix, GainLedger, GainRecord, domestic_split, tally_records
from bkflow.model import UNASSIGNED, AnalysisConfig, Corpus, JournalCategoryMap

ALL = "ALL"
UNDEFINED_MARK = "undefined"


def ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


def round_half_up(value: Fraction, places: int) -> Decimal:
    q = Decimal(1).scaleb(-places)
    # exact: scale, round the integer part half-up, scale back
    scaled = value * 10**places
    n, d = scaled.numerator, scaled.denominator
    rounded = (2 * abs(n) + d) // (2 * d)
    rounded = rounded if n >= 0 else -rounded
    return (Decimal(rounded) * q).quantize(q)


def fmt_ratio(value: Fraction | None, places: int = 2) -> str:
    return UNDEFINED_MARK if value is None else str(round_half_up(value, places))


def fmt_pct(value: Fraction | None, places: int = 1) -> str:
    return UNDEFINED_MARK if value is None else str(round_half_up(value * 100, places))


def fmt_balance(value: int) -> str:
    return f"{value:+d}" if value else "0"


def _as_tally(gains: Counter | Iterable[GainRecord]) -> Mapping:
    return gains if isinstance(gains, Mapping) else tally_records(gains)


# -- country summary -----------------------------------------------------------


@dataclass(frozen=True)
class CountrySummary:
    country: str
    publications: int
    made_in_count: int
    cited_made_in_count: int
    total_benefits: int
    total_gains: int
    domestic_gains: int

    @property
    def made_in_share(self) -> Fraction | None:
        return ratio(self.made_in_count, self.publications)

    @property
    def cited_share(self) -> Fraction | None:
        return ratio(self.cited_made_in_count, self.made_in_count)

    @property
    def avg_benefits_per_cited(self) -> Fraction | None:
        return ratio(self.total_benefits, self.cited_made_in_count)

    @property
    def domestic_share(self) -> Fraction | None:
        return ratio(self.domestic_gains, self.total_gains)

    @property
    def avg_gains_per_benefit(self) -> Fraction | None:
        return ratio(self.total_gains, self.total_benefits)


def country_summary(
    corpus: Corpus,
    attribution: Mapping[str, MadeInResult],
    ledger: GainLedger,
    config: AnalysisConfig | None = None,
) -> list[CountrySummary]:
    config = config or corpus.config
    matrix = ledger.matrix()
    pubs = Counter()
    for pub in corpus.publications.values():
        if config.in_production_window(pub):
            for c in {a.country for a in pub.affiliations}:
                pubs[c] += 1
    made, cited, benefits = Counter(), Counter(), Counter()
    for pid, res in attribution.items():
        b = ledger.benefits.get(pid, 0)
        for c in res.countries:
            made[c] += 1
            benefits[c] += b
            if b:
                cited[c] += 1
    return [
        CountrySummary(
            country=k,
            publications=pubs[k],
            made_in_count=made[k],
            cited_made_in_count=cited[k],
            total_benefits=benefits[k],
            total_gains=matrix.row_total(k),
            domestic_gains=matrix.cell(k, k),
        )
        for k in config.countries
    ]


# -- overall balance -----------------------------------------------------------


@dataclass(frozen=True)
class BkfRow:
    country: str
    foreign_gains_generated: int
    earned_gains: int
    total_gains: int
    foreign_gains_by_others: int
    cited_foreign_publications: int | None = None

    @property
    def balance(self) -> int:
        return self.foreign_gains_generated - self.earned_gains

    @property
    def generated_share(self) -> Fraction | None:
        """Foreign gains generated as a share of all gains generated."""
        return ratio(self.foreign_gains_generated, self.total_gains)

    @property
    def earned_share(self) -> Fraction | None:
        """Earned gains as a share of the foreign gains the other countries generate."""
        return ratio(self.earned_gains, self.foreign_gains_by_others)


def bkf_overall(matrix: FlowMatrix, cited_counts: Mapping[str, int] | None = None) -> list[BkfRow]:
    """One balance row per country, in matrix order.

    ``cited_counts`` (cited made-in publications per country) fills the
    optional cited-foreign-publications column.
    """
    split = domestic_split(matrix)
    foreign_total = sum(s.foreign_gains_generated for s in split.values())
    rows = []
    for k in matrix.countries:
        s = split[k]
        cited_foreign = None
        if cited_counts is not None:
            cited_foreign = sum(n for c, n in cited_counts.items() if c != k and c in split)
        rows.append(
            BkfRow(
                country=k,
                foreign_gains_generated=s.foreign_gains_generated,
                earned_gains=s.gains_earned,
                total_gains=s.domestic_gains + s.foreign_gains_generated,
                foreign_gains_by_others=foreign_total - s.foreign_gains_generated,
                cited_foreign_publications=cited_foreign,
            )
        )
    return rows


def solve_missing_cell(
    rows: Sequence[Sequence[int | None]],
    countries: Sequence[str],
    generator: str,
    earner: str,
    foreign_generated: Mapping[str, int],
    earned: Mapping[str, int],
) -> tuple[int, int]:
    """Recover one off-diagonal cell from the row and column balance totals.

    Returns the value implied by the generator's foreign total and the value
    implied by the earner's earned total; a consistent table gives two equal
    numbers.
    """
    g, e = countries.index(generator), countries.index(earner)
    if g == e:
        raise ValueError("only off-diagonal cells can be recovered")
    row_known = sum(v for j, v in enumerate(rows[g]) if j not in (g, e))
    col_known = sum(rows[i][e] for i in range(len(countries)) if i not in (g, e))
    return foreign_generated[generator] - row_known, earned[earner] - col_known


# -- field level ---------------------------------------------------------------


@dataclass(frozen=True)
class FieldBkfRow:
    sc_code: str
    macro_area: str
    foreign_gains_generated: int
    earned_gains: int

    @property
    def balance(self) -> int:
        return self.foreign_gains_generated - self.earned_gains


def _sc_universe(categories: JournalCategoryMap, seen: Iterable[str]) -> list[str]:
    return sorted(set(categories.sc_codes) | set(seen))


def field_totals(gains, country: str) -> tuple[Counter, Counter]:
    """Per-SC foreign gains generated and earned by ``country`` (full counting)."""
    generated, earned = Counter(), Counter()
    for (g, e, scs), n in _as_tally(gains).items():
        if g == e or country not in (g, e):
            continue
        target = generated if g == country else earned
        for sc in scs or (UNASSIGNED,):
            target[sc] += n
    return generated, earned


def bkf_by_field(
    gains, categories: JournalCategoryMap, country: str, config: AnalysisConfig | None = None
) -> list[FieldBkfRow]:
    """Per-SC balance of ``country``.

    Each gain counts once for every subject category of the cited journal;
    gains from journals without categories land in ``"unassigned"``. Rows
    come back in SC-code order and include explicit zeros.
    """
    if config is not None and country not in config.countries:
        raise KeyError(f"country {country!r} not in analysis set")
    generated, earned = field_totals(gains, country)
    return [
        FieldBkfRow(sc, categories.area_of(sc), generated[sc], earned[sc])
        for sc in _sc_universe(categories, list(generated) + list(earned))
    ]


def macro_area_rollup(field_rows: Iterable[FieldBkfRow], categories: JournalCategoryMap) -> list[FieldBkfRow]:
    gen, earn = Counter(), Counter()
    areas = set(categories.macro_areas)
    for row in field_rows:
        area = categories.area_of(row.sc_code)
        areas.add(area)
        gen[area] += row.foreign_gains_generated
        earn[area] += row.earned_gains
    return [FieldBkfRow(a, a, gen[a], earn[a]) for a in sorted(areas)]


def top_bottom_fields(field_rows: Iterable[FieldBkfRow], n: int) -> tuple[list[FieldBkfRow], list[FieldBkfRow]]:
    """``n`` largest deficits (ascending) and ``n`` largest surpluses (descending).

    Equal balances are ordered by SC code.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rows = list(field_rows)
    lowest = sorted(rows, key=lambda r: (r.balance, r.sc_code))[:n]
    highest = sorted(rows, key=lambda r: (-r.balance, r.sc_code))[:n]
    return lowest, highest


# -- bilateral -----------------------------------------------------------------


@dataclass(frozen=True)
class BilateralRow:
    sc_code: str
    macro_area: str
    k_to_l: int
    l_to_k: int

    @property
    def balance(self) -> int:
        return self.k_to_l - self.l_to_k


def bilateral_bkf(
    gains, k: str, l: str, categories: JournalCategoryMap, level: str = "overall"
) -> list[BilateralRow]:
    """Flows between ``k`` and ``l`` from ``k``'s perspective.

    ``level="overall"`` gives a single ``"ALL"`` row; ``level="sc"`` gives one
    row per subject category under full counting.
    """
    if k == l:
        raise ValueError("bilateral balance needs two different countries")
    if level not in ("overall", "sc"):
        raise ValueError(f"unknown level {level!r}")
    tally = _as_tally(gains)
    if level == "overall":
        out_ = sum(n for (g, e, _), n in tally.items() if g == k and e == l)
        in_ = sum(n for (g, e, _), n in tally.items() if g == l and e == k)
        return [BilateralRow(ALL, ALL, out_, in_)]
    out_, in_ = Counter(), Counter()
    for (g, e, scs), n in tally.items():
        if (g, e) == (k, l):
            target = out_
        elif (g, e) == (l, k):
            target = in_
        else:
            continue
        for sc in scs or (UNASSIGNED,):
            target[sc] += n
    return [
        BilateralRow(sc, categories.area_of(sc), out_[sc], in_[sc])
        for sc in _sc_universe(categories, list(out_) + list(in_))
    ]


def bilateral_area_rollup(rows: Iterable[BilateralRow], categories: JournalCategoryMap) -> list[BilateralRow]:
    out_, in_ = Counter(), Counter()
    areas = set(categories.macro_areas)
    for row in rows:
        area = categories.area_of(row.sc_code)
        areas.add(area)
        out_[area] += row.k_to_l
        in_[area] += row.l_to_k
    return [BilateralRow(a, a, out_[a], in_[a]) for a in sorted(areas)]
