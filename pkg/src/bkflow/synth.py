"""Seeded synthetic corpora in the canonical ingest formats.

Randomness comes from NumPy's PCG64 bit generator seeded directly with
``params.seed``; only bulk ``random``/``integers``/``choice`` draws are used,
always in the same order, so a seed fixes the output byte for byte.

``home_bias`` controls insularity: it is the probability that a citation
stays inside the citing publication's home country, and it scales down
cross-border co-authorship (collaborations, ties, mixed address lists) by
``1 - home_bias``. With ``home_bias = 1`` every gain is domestic.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from bkflow.model import (
    Affiliation,
    AnalysisConfig,
    CitationLink,
    ConfigError,
    DocType,
    JournalCategoryMap,
    PublicationRecord,
)

PRODUCTION_DOC_TYPES = (DocType.ARTICLE, DocType.REVIEW, DocType.LETTER, DocType.PROCEEDINGS)


@dataclass(frozen=True)
class CountryProfile:
    code: str
    publications: int
    home_bias: float | None = None
    sc_mix: Mapping[str, float] | None = None


@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    countries: tuple[CountryProfile, ...]
    outside_countries: tuple[str, ...] = ("XA", "XB")
    outside_publications: int = 0
    journals: int = 40
    sc_count: int = 20
    areas: int = 5
    unassigned_journal_rate: float = 0.05
    citation_density: float = 5.0
    home_bias: float = 0.5
    collab_rate: float = 0.3
    tie_rate: float = 0.05
    mixed_rate: float = 0.05
    other_doc_rate: float = 0.05
    institutions_per_country: int = 50
    period: tuple[int, int] = (2004, 2008)
    cutoff_year: int = 2017
    in_period_share: float = 0.6

    def __post_init__(self) -> None:
        probs = {
            "unassigned_journal_rate": self.unassigned_journal_rate,
            "home_bias": self.home_bias,
            "collab_rate": self.collab_rate,
            "tie_rate": self.tie_rate,
            "mixed_rate": self.mixed_rate,
            "other_doc_rate": self.other_doc_rate,
            "in_period_share": self.in_period_share,
        }
        for p in self.countries:
            if p.home_bias is not None:
                probs[f"{p.code}.home_bias"] = p.home_bias
            if p.publications < 0:
                raise ConfigError(f"{p.code}: negative publication count")
        for name, v in probs.items():
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.tie_rate + self.mixed_rate > 1.0:
            raise ConfigError("tie_rate + mixed_rate must not exceed 1")
        for name in ("outside_publications", "journals", "sc_count", "areas", "citation_density"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.total_publications == 0 and self.citation_density > 0:
            raise ConfigError("citations requested but no publications to link")
        if self.total_publications > 0 and (self.journals < 1 or self.sc_count < 1 or self.areas < 1):
            raise ConfigError("publications need at least one journal, subject category and area")
        if self.institutions_per_country < 4:
            raise ConfigError("institutions_per_country must be at least 4")
        if len({p.code for p in self.countries} | set(self.outside_countries)) != len(self.countries) + len(
            self.outside_countries
        ):
            raise ConfigError("country codes must be distinct")
        if self.outside_publications and not self.outside_countries:
            raise ConfigError("outside publications need outside countries")

    @property
    def total_publications(self) -> int:
        return sum(p.publications for p in self.countries) + self.outside_publications

    def analysis_config(self, **overrides) -> AnalysisConfig:
        kwargs = dict(
            countries=tuple(p.code for p in self.countries),
            period=self.period,
            citation_cutoff=dt.date(self.cutoff_year, 12, 31),
        )
        kwargs.update(overrides)
        return AnalysisConfig(**kwargs)


@dataclass
class GeneratedCorpus:
    publications: list[PublicationRecord]
    citations: list[CitationLink]
    categories: JournalCategoryMap
    params: GeneratorParams = field(repr=False, default=None)


def simple_params(
    seed: int,
    countries: tuple[str, ...] = ("AA", "BB", "CC", "DD"),
    publications: int = 200,
    citations: int | None = None,
    **kwargs,
) -> GeneratorParams:
    """Split ``publications`` evenly over ``countries``; ``citations`` sets the density."""
    per, extra = divmod(publications, len(countries))
    profiles = tuple(CountryProfile(c, per + (1 if i < extra else 0)) for i, c in enumerate(countries))
    if citations is not None:
        kwargs["citation_density"] = citations / publications if publications else 0.0
    return GeneratorParams(seed=seed, countries=profiles, **kwargs)


def _categories(params: GeneratorParams, rng: np.random.Generator) -> tuple[JournalCategoryMap, list[str]]:
    scs = [f"SC{i:03d}" for i in range(params.sc_count)]
    areas = {sc: f"AREA{int(a):02d}" for sc, a in zip(scs, rng.integers(0, params.areas, size=len(scs)))}
    n_cats = rng.choice([1, 2, 3], size=params.journals, p=[0.6, 0.3, 0.1])
    unassigned = rng.random(params.journals) < params.unassigned_journal_rate
    picks = rng.integers(0, params.sc_count, size=(params.journals, 3))
    journals: dict[str, frozenset[str]] = {}
    primary = []
    for j in range(params.journals):
        jid = f"J{j:04d}"
        codes = []
        for s in picks[j][: n_cats[j]]:
            if scs[s] not in codes:
                codes.append(scs[s])
        primary.append(codes[0])
        if not unassigned[j]:
            journals[jid] = frozenset(codes)
    return JournalCategoryMap(journals=journals, areas=areas), primary


def _journal_weights(profile_mix, primary: list[str], rng: np.random.Generator, sc_count: int) -> np.ndarray:
    if profile_mix:
        sc_w = {sc: float(w) for sc, w in profile_mix.items()}
        w = np.array([sc_w.get(sc, 0.0) for sc in primary])
        if w.sum() <= 0:
            raise ConfigError("sc_mix gives zero weight to every journal")
    else:
        draw = rng.dirichlet(np.ones(sc_count))
        w = np.array([draw[int(sc[2:])] for sc in primary])
    return w / w.sum()


def generate_corpus(params: GeneratorParams) -> GeneratedCorpus:
    rng = np.random.Generator(np.random.PCG64(params.seed))
    categories, primary = _categories(params, rng) if params.journals else (JournalCategoryMap(), [])

    homes: list[str] = []
    biases: list[float] = []
    journal_ids: list[int] = []
    for prof in params.countries:
        weights = _journal_weights(prof.sc_mix, primary, rng, params.sc_count) if prof.publications else None
        if prof.publications:
            journal_ids.extend(rng.choice(params.journals, size=prof.publications, p=weights).tolist())
        homes.extend([prof.code] * prof.publications)
        biases.extend([params.home_bias if prof.home_bias is None else prof.home_bias] * prof.publications)
    if params.outside_publications:
        outside = rng.integers(0, len(params.outside_countries), size=params.outside_publications)
        homes.extend(params.outside_countries[i] for i in outside)
        biases.extend([params.home_bias] * params.outside_publications)
        journal_ids.extend(rng.integers(0, params.journals, size=params.outside_publications).tolist())

    n = len(homes)
    all_countries = [p.code for p in params.countries] + list(params.outside_countries)
    u = rng.random((n, 6))
    ints = rng.integers(0, 2**31, size=(n, 6))
    pool = params.institutions_per_country

    pubs: list[PublicationRecord] = []
    pure = np.zeros(n, dtype=bool)
    for i in range(n):
        home = homes[i]
        openness = 1.0 - biases[i]
        others = [c for c in all_countries if c != home]
        r = u[i, 0]
        tie_p = params.tie_rate * openness
        mixed_p = params.mixed_rate * openness
        if others and r < tie_p:
            k = 1 + int(u[i, 1] < 0.3)
            partner = others[ints[i, 0] % len(others)]
            plan = [(home, k), (partner, k)]
        elif len(others) >= 2 and r < tie_p + mixed_p:
            a = ints[i, 0] % len(others)
            b = (a + 1 + ints[i, 1] % (len(others) - 1)) % len(others)
            plan = [(home, 1), (others[a], 1), (others[b], 1)]
        else:
            size = 1 + int(u[i, 1] * 4)
            if others and u[i, 2] < params.collab_rate * openness:
                size = max(size, 3)
                n_foreign = 1 + ints[i, 2] % ((size - 1) // 2)
                plan = [(home, size - n_foreign)]
                for t in range(n_foreign):
                    plan.append((others[(ints[i, 3] + t * 7) % len(others)], 1))
            else:
                plan = [(home, size)]
        affs = []
        used: set[str] = set()
        for t, (country, count) in enumerate(plan):
            base = int(ints[i, 4 + (t % 2)])
            for s in range(count):
                inst = f"{country}-I{(base + s + t * 11) % pool:03d}"
                step = 0
                while inst in used:
                    step += 1
                    inst = f"{country}-I{(base + s + t * 11 + step) % pool:03d}"
                used.add(inst)
                affs.append(Affiliation(inst, country))
        pure[i] = len(plan) == 1
        if u[i, 3] < params.in_period_share:
            year = params.period[0] + int(u[i, 4] * (params.period[1] - params.period[0] + 1))
        else:
            year = params.period[1] + 1 + int(u[i, 4] * (params.cutoff_year - params.period[1] + 1))
        if u[i, 5] < params.other_doc_rate:
            doc_type = DocType.OTHER
        else:
            doc_type = PRODUCTION_DOC_TYPES[ints[i, 0] % 4]
        pubs.append(
            PublicationRecord(
                id=f"P{i:07d}",
                year=year,
                doc_type=doc_type,
                journal_id=f"J{journal_ids[i]:04d}",
                affiliations=tuple(affs),
            )
        )

    links = _citations(params, rng, homes, biases, pure, n)
    return GeneratedCorpus(pubs, [CitationLink(f"P{q:07d}", f"P{p:07d}") for q, p in links], categories, params)


def _citations(params, rng, homes, biases, pure, n) -> np.ndarray:
    n_links = int(round(params.citation_density * n))
    if n_links == 0 or n < 2:
        return np.empty((0, 2), dtype=np.int64)
    homes_arr = np.array(homes)
    citing = rng.integers(0, n, size=n_links)
    cited = rng.integers(0, n, size=n_links)
    stay = rng.random(n_links) < np.asarray(biases)[citing]
    for country in np.unique(homes_arr):
        pool = np.flatnonzero((homes_arr == country) & pure)
        sel = np.flatnonzero(stay & (homes_arr[citing] == country))
        if len(sel) == 0:
            continue
        if len(pool) == 0:
            # nothing purely domestic to cite; the citation is dropped
            cited[sel] = citing[sel]
            continue
        cited[sel] = pool[rng.integers(0, len(pool), size=len(sel))]
    keep = citing != cited
    pairs = np.stack([citing[keep], cited[keep]], axis=1)
    return np.unique(pairs, axis=0)


# -- key-value params ----------------------------------------------------------


def params_from_kv(values: Mapping[str, str], config: AnalysisConfig | None = None) -> GeneratorParams:
    """Generator params from ``gen.*`` keys of a config file.

    ``gen.publications`` is either a total split over the analysis countries
    or a ``CODE:count`` list.
    """
    gen = {k[4:]: v for k, v in values.items() if k.startswith("gen.")}
    countries = config.countries if config else ("AA", "BB", "CC", "DD")
    raw = gen.pop("publications", "200")
    if ":" in raw:
        counts = {}
        for item in raw.split(","):
            code, _, num = item.partition(":")
            counts[code.strip().upper()] = int(num)
        profiles = tuple(CountryProfile(c, counts.get(c, 0)) for c in countries)
    else:
        total = int(raw)
        per, extra = divmod(total, len(countries))
        profiles = tuple(CountryProfile(c, per + (1 if i < extra else 0)) for i, c in enumerate(countries))
    kwargs: dict = {}
    int_keys = {"seed", "outside_publications", "journals", "sc_count", "areas", "institutions_per_country", "cutoff_year"}
    float_keys = {
        "unassigned_journal_rate",
        "citation_density",
        "home_bias",
        "collab_rate",
        "tie_rate",
        "mixed_rate",
        "other_doc_rate",
        "in_period_share",
    }
    for key, raw in gen.items():
        try:
            if key in int_keys:
                kwargs[key] = int(raw)
            elif key in float_keys:
                kwargs[key] = float(raw)
            elif key == "outside_countries":
                kwargs[key] = tuple(c.strip().upper() for c in raw.split(",") if c.strip())
            else:
                raise ConfigError(f"unknown generator key gen.{key}")
        except ValueError:
            raise ConfigError(f"gen.{key}: cannot parse {raw!r}") from None
    if config is not None:
        kwargs.setdefault("period", config.period)
        kwargs.setdefault("cutoff_year", config.citation_cutoff.year)
    kwargs.setdefault("seed", 0)
    return GeneratorParams(countries=profiles, **kwargs)
