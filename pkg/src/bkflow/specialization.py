"""Knowledge outflow / inflow specialization indexes (KOSI / KISI).

Both indexes are the Balassa revealed-comparative-advantage ratio of a
country's subject-category share against the rest of the world, mapped onto
[-100, 100] by ``100 * tanh(ln r)``. KOSI uses the gains a country generates
for other countries, KISI the gains it earns from them.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from bkflow.model import UNASSIGNED, AnalysisConfig

OUTFLOW = "outflow"
INFLOW = "inflow"


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __str__(self) -> str:
        return "undefined"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

Ratio = Union[Fraction, float, _Undefined]
GainsTable = Mapping[str, Mapping[str, int]]


def gains_table(
    tally: Mapping,
    countries: Iterable[str],
    direction: str = OUTFLOW,
    include_domestic: bool = False,
    sc_codes: Iterable[str] = (),
) -> dict[str, dict[str, int]]:
    """Country x SC gains under full counting.

    ``direction="outflow"`` sums gains by generator, ``"inflow"`` by earner.
    Domestic gains are left out unless ``include_domestic``.
    """
    if direction not in (OUTFLOW, INFLOW):
        raise ValueError(f"unknown direction {direction!r}")
    countries = tuple(countries)
    acc = {k: Counter() for k in countries}
    scs_seen = set(sc_codes)
    for (g, e, scs), n in tally.items():
        if g == e and not include_domestic:
            continue
        k = g if direction == OUTFLOW else e
        if k not in acc:
            continue
        for sc in scs or (UNASSIGNED,):
            acc[k][sc] += n
            scs_seen.add(sc)
    return {k: {sc: acc[k][sc] for sc in sorted(scs_seen)} for k in countries}


def balassa_ratio(G: GainsTable, k: str, j: str, exclude_own_sc: bool = False) -> Ratio:
    """``(G[k][j] / row_k) / (rest_j / rest_total)``, with rest = all countries but ``k``.

    Row totals run over every SC, or every SC except ``j`` with
    ``exclude_own_sc``. Returns ``UNDEFINED`` for an empty row or an empty
    rest of world, and ``math.inf`` when only ``k`` has gains in ``j``.
    """
    if k not in G:
        raise KeyError(f"unknown country {k!r}")
    if j not in G[k]:
        raise KeyError(f"unknown subject category {j!r}")

    def row(z: str) -> int:
        total = sum(G[z].values())
        return total - G[z].get(j, 0) if exclude_own_sc else total

    g_kj = G[k][j]
    row_k = row(k)
    others = [z for z in G if z != k]
    rest_j = sum(G[z].get(j, 0) for z in others)
    rest_total = sum(row(z) for z in others)
    if row_k == 0 or rest_total == 0:
        return UNDEFINED
    if rest_j == 0:
        return math.inf if g_kj > 0 else UNDEFINED
    return Fraction(g_kj * rest_total, row_k * rest_j)


def specialization_index(r: Ratio) -> Union[float, _Undefined]:
    """``100 * tanh(ln r)`` via the identity ``tanh(ln r) = (r^2 - 1) / (r^2 + 1)``."""
    if r is UNDEFINED:
        return UNDEFINED
    if r < 0:
        raise ValueError(f"ratio must be non-negative, got {r}")
    if r == math.inf:
        return 100.0
    if isinstance(r, (Fraction, int)):
        r = Fraction(r)
        return float(100 - Fraction(200) / (r * r + 1))
    sq = float(r) * float(r)
    return 100.0 - 200.0 / (sq + 1.0)


@dataclass(frozen=True)
class SpecializationTable:
    direction: str
    countries: tuple[str, ...]
    sc_codes: tuple[str, ...]
    ratios: Mapping[tuple[str, str], Ratio]
    values: Mapping[tuple[str, str], Union[float, _Undefined]]

    @property
    def label(self) -> str:
        return "KOSI" if self.direction == OUTFLOW else "KISI"

    def value(self, country: str, sc: str) -> Union[float, _Undefined]:
        return self.values[(country, sc)]

    def rows(self) -> list[tuple[str, str, Union[float, _Undefined]]]:
        return [(k, j, self.values[(k, j)]) for k in self.countries for j in self.sc_codes]


def specialization_table(G: GainsTable, direction: str = OUTFLOW, exclude_own_sc: bool = False) -> SpecializationTable:
    countries = tuple(G)
    scs = tuple(sorted({j for row in G.values() for j in row}))
    full = {k: {j: G[k].get(j, 0) for j in scs} for k in countries}
    ratios = {(k, j): balassa_ratio(full, k, j, exclude_own_sc) for k in countries for j in scs}
    values = {key: specialization_index(r) for key, r in ratios.items()}
    return SpecializationTable(direction, countries, scs, ratios, values)


def _table(gains: Mapping, config: AnalysisConfig, direction: str, sc_codes, include_domestic, exclude_own_sc):
    include_domestic = config.rca_include_domestic if include_domestic is None else include_domestic
    exclude_own_sc = config.rca_exclude_own_sc if exclude_own_sc is None else exclude_own_sc
    G = gains_table(gains, config.countries, direction, include_domestic, sc_codes)
    return specialization_table(G, direction, exclude_own_sc)


def kosi_table(
    gains: Mapping,
    config: AnalysisConfig,
    sc_codes: Iterable[str] = (),
    include_domestic: bool | None = None,
    exclude_own_sc: bool | None = None,
) -> SpecializationTable:
    """Outflow specialization from a gain tally (foreign gains generated by default)."""
    return _table(gains, config, OUTFLOW, sc_codes, include_domestic, exclude_own_sc)


def kisi_table(
    gains: Mapping,
    config: AnalysisConfig,
    sc_codes: Iterable[str] = (),
    include_domestic: bool | None = None,
    exclude_own_sc: bool | None = None,
) -> SpecializationTable:
    """Inflow specialization from a gain tally (foreign gains earned by default)."""
    return _table(gains, config, INFLOW, sc_codes, include_domestic, exclude_own_sc)


def top_specializations(table: SpecializationTable, country: str, n: int) -> list[tuple[str, float]]:
    """Highest defined index values of ``country``, ties broken by SC code."""
    if country not in table.countries:
        raise KeyError(f"unknown country {country!r}")
    defined = [(j, v) for (k, j), v in table.values.items() if k == country and v is not UNDEFINED]
    defined.sort(key=lambda item: (-item[1], item[0]))
    return defined[:n]
