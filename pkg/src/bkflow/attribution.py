"""Made-in attribution: which countries a publication counts as produced by."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from bkflow.model import AnalysisConfig, Corpus, PublicationRecord, ValidationReport


@dataclass(frozen=True, slots=True)
class MadeInResult:
    publication_id: str
    countries: frozenset[str]
    tie: bool

    def generators(self, analysis_countries: tuple[str, ...]) -> tuple[str, ...]:
        """Made-in countries that belong to the analysis set, in config order."""
        return tuple(c for c in analysis_countries if c in self.countries)


def made_in(pub: PublicationRecord, threshold: Fraction = Fraction(1, 2)) -> MadeInResult:
    """Countries holding at least ``threshold`` of the publication's institutions.

    Every institution in the address list counts, including those from
    countries outside the analysis set. Comparison is exact.
    """
    threshold = Fraction(threshold)
    per_country = Counter(aff.country for aff in pub.affiliations)
    total = len(pub.affiliations)
    num, den = threshold.numerator, threshold.denominator
    chosen = frozenset(c for c, n in per_country.items() if n * den >= num * total)
    return MadeInResult(pub.id, chosen, len(chosen) >= 2)


def attribute_corpus(
    corpus: Corpus,
    config: AnalysisConfig | None = None,
    report: ValidationReport | None = None,
) -> dict[str, MadeInResult]:
    """Made-in results for every cited-side candidate made in an analysis country.

    Candidates are publications inside the configured period and document
    types. Publications made in no analysis country are left out; they can
    still act as citing publications. Ties are recorded in ``report`` if given.
    """
    config = config or corpus.config
    wanted = set(config.countries)
    threshold = config.made_in_threshold
    result: dict[str, MadeInResult] = {}
    for pid in sorted(corpus.publications):
        pub = corpus.publications[pid]
        if not config.in_production_window(pub):
            continue
        res = made_in(pub, threshold)
        if res.countries & wanted:
            result[pid] = res
            if res.tie and report is not None:
                report.record("tie_attributions", pid)
    return result


def tie_count(attribution: dict[str, MadeInResult]) -> int:
    return sum(1 for r in attribution.values() if r.tie)
