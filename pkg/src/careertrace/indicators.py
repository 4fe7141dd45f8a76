"""Citation-impact and collaboration indicators.

Counting conventions used throughout:

* fractional: a record's unit weight is split equally over its authorships;
  within an authorship, over its affiliation countries. A population with a
  region filter takes each qualifying authorship's weight on that region; a
  population without one takes the authorship's whole weight.
* full: a record counts once toward every population with at least one
  qualifying authorship.

FWCI is the record's citation count divided by the mean expected citations
of its (field, year, doc_type) cohorts; multi-field records average their
field cohorts. Top-10% flags use the nearest-rank 90th percentile of the
publication-year cohort with strict exceedance, on FWCI (field-normalized)
and on raw citation counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

from .corpus import Corpus, PublicationRecord, RegionScheme, regionalize
from .errors import EmptyReference, MissingCohort, NoStateForYear
from .mobility import (
    DOMESTIC,
    OVERSEAS,
    RETURNEE_RESIDENT,
    MobilityClass,
    MobilityState,
    domestic,
    overseas,
    returnee_resident,
)

CohortKey = tuple[str, int, str]


@dataclass(slots=True)
class CitationBaselines:
    """Mean citation counts per (field, year, doc_type) cohort."""

    expected: dict[CohortKey, float]
    sizes: dict[CohortKey, int]

    def cohort(self, field: str, year: int, doc_type: str) -> tuple[float, int]:
        key = (field, year, doc_type)
        if key not in self.expected:
            raise MissingCohort(field, year, doc_type)
        return self.expected[key], self.sizes[key]


def citation_baselines(corpus: Corpus) -> CitationBaselines:
    """Cohort means; a record with k fields joins each of its k cohorts."""
    totals: dict[CohortKey, int] = {}
    sizes: dict[CohortKey, int] = {}
    for rec in corpus.records:
        for f in rec.field_codes:
            key = (f, rec.year, rec.doc_type)
            totals[key] = totals.get(key, 0) + rec.citation_count
            sizes[key] = sizes.get(key, 0) + 1
    expected = {key: totals[key] / sizes[key] for key in totals}
    return CitationBaselines(expected=expected, sizes=sizes)


def fwci(record: PublicationRecord, baselines: CitationBaselines) -> float:
    """Citations over the mean of the record's field-cohort expectations.

    A zero denominator yields 0.0 for uncited records and the +inf sentinel
    otherwise; sentinel records are excluded from top-10% ranking.
    """
    total = 0.0
    for f in record.field_codes:
        expected, _ = baselines.cohort(f, record.year, record.doc_type)
        total += expected
    denom = total / len(record.field_codes)
    if denom == 0.0:
        return 0.0 if record.citation_count == 0 else math.inf
    return record.citation_count / denom


def nearest_rank_90th(values: list[float]) -> float:
    """Nearest-rank 90th percentile of a non-empty value list."""
    ordered = sorted(values)
    rank = math.ceil(0.9 * len(ordered))
    return ordered[rank - 1]


@dataclass(frozen=True, slots=True)
class PubScore:
    pub_id: str
    fwci: float
    top10_fwci: bool
    top10_cits: bool
    zero_baseline: bool


def top10_flags(corpus: Corpus, baselines: CitationBaselines) -> dict[str, PubScore]:
    """Per-record FWCI plus strict top-decile flags within the year cohort.

    FWCI flags rank field-normalized scores pooled across fields; citation
    flags rank raw counts. Ties at the threshold are not flagged, which
    keeps the world share at 10% up to cohort granularity.
    """
    fwci_by_year: dict[int, list[float]] = {}
    cits_by_year: dict[int, list[int]] = {}
    scores: dict[str, float] = {}
    for rec in corpus.records:
        score = fwci(rec, baselines)
        scores[rec.pub_id] = score
        if not math.isinf(score):
            fwci_by_year.setdefault(rec.year, []).append(score)
        cits_by_year.setdefault(rec.year, []).append(rec.citation_count)
    fwci_thresholds = {y: nearest_rank_90th(v) for y, v in fwci_by_year.items()}
    cits_thresholds = {y: nearest_rank_90th(v) for y, v in cits_by_year.items()}
    out: dict[str, PubScore] = {}
    for rec in corpus.records:
        score = scores[rec.pub_id]
        sentinel = math.isinf(score)
        fwci_thr = fwci_thresholds.get(rec.year)
        out[rec.pub_id] = PubScore(
            pub_id=rec.pub_id,
            fwci=score,
            top10_fwci=(not sentinel and fwci_thr is not None and score > fwci_thr),
            top10_cits=rec.citation_count > cits_thresholds[rec.year],
            zero_baseline=sentinel,
        )
    return out


class StateIndex:
    """Lookup of an author's mobility class per publication year."""

    def __init__(self, states: Mapping[str, list[MobilityState]]):
        self._by_author: dict[str, dict[int, MobilityClass]] = {
            author: {st.year: st.klass for st in sts} for author, sts in states.items()
        }

    def class_at(self, author_id: str, year: int) -> MobilityClass:
        try:
            return self._by_author[author_id][year]
        except KeyError:
            raise NoStateForYear(author_id, year) from None


# A selector maps a record to (full-counting membership, fractional weight).
Selector = Callable[[PublicationRecord], "tuple[bool, float]"]


class _WeightCache:
    """regionalize() memoized on the affiliation-country tuple."""

    def __init__(self, scheme: RegionScheme):
        self._scheme = scheme
        self._cache: dict[tuple[str, ...], dict[str, float]] = {}

    def __call__(self, countries: tuple[str, ...]) -> dict[str, float]:
        w = self._cache.get(countries)
        if w is None:
            w = regionalize(countries, self._scheme)
            self._cache[countries] = w
        return w


def world_selector() -> Selector:
    def select(record: PublicationRecord) -> tuple[bool, float]:
        return True, 1.0

    return select


def region_selector(scheme: RegionScheme, region: str) -> Selector:
    """Output of a region under both counting schemes."""
    weights = _WeightCache(scheme)

    def select(record: PublicationRecord) -> tuple[bool, float]:
        n = len(record.authorships)
        frac = 0.0
        for a in record.authorships:
            frac += weights(a.countries).get(region, 0.0) / n
        return frac > 0.0, frac

    return select


def class_selector(
    scheme: RegionScheme,
    index: StateIndex,
    pred: Callable[[MobilityClass], bool],
    region: str | None = None,
) -> Selector:
    """Output attributed to authors whose mobility class satisfies ``pred``.

    With a ``region`` filter only the qualifying authorships' weight on that
    region counts, so authors publishing without a foothold there contribute
    nothing regardless of class history.
    """
    weights = _WeightCache(scheme)

    def select(record: PublicationRecord) -> tuple[bool, float]:
        n = len(record.authorships)
        frac = 0.0
        for a in record.authorships:
            if not pred(index.class_at(a.author_id, record.year)):
                continue
            if region is None:
                frac += 1.0 / n
            else:
                frac += weights(a.countries).get(region, 0.0) / n
        return frac > 0.0, frac

    return select


def output_share(
    corpus: Corpus,
    population: Selector,
    reference: Selector,
    year: int,
    counting: str,
) -> float:
    """Population weight over reference weight among records of ``year``."""
    if counting not in ("full", "frac"):
        raise ValueError(f"counting must be 'full' or 'frac', got {counting!r}")
    pop = ref = 0.0
    for rec in corpus.records:
        if rec.year != year:
            continue
        p_full, p_frac = population(rec)
        r_full, r_frac = reference(rec)
        if counting == "full":
            pop += 1.0 if p_full else 0.0
            ref += 1.0 if r_full else 0.0
        else:
            pop += p_frac
            ref += r_frac
    if ref == 0.0:
        raise EmptyReference(f"reference population has zero weight in {year}")
    return pop / ref


def intl_copub(
    record: PublicationRecord,
    scheme: RegionScheme,
    require_distinct_authors: bool = False,
) -> tuple[bool, set[tuple[str, str]]]:
    """International flag plus the record's cross-region pair set.

    A record is international when its affiliation countries span at least
    two distinct countries; with ``require_distinct_authors`` a single
    multi-country author is not enough. Pairs are unordered region pairs
    spanned by distinct countries, ordered by the scheme's label order.
    """
    countries: set[str] = set()
    for a in record.authorships:
        countries.update(a.countries)
    international = len(countries) >= 2 and (
        len(record.authorships) >= 2 or not require_distinct_authors
    )
    if not international:
        return False, set()
    regions = sorted({scheme.region_of(c) for c in countries}, key=scheme.rank)
    pairs = {
        (regions[i], regions[j])
        for i in range(len(regions))
        for j in range(i + 1, len(regions))
    }
    return True, pairs


def class_intl_share(
    corpus: Corpus,
    index: StateIndex,
    pred: Callable[[MobilityClass], bool],
    home: str,
    year: int,
    counting: str,
    require_distinct_authors: bool = False,
    unfiltered: bool = False,
) -> float:
    """Class share of the home region's international co-publications.

    The reference is the home-region weight (or record count, full counting)
    of international records with a home-side authorship. By default the
    numerator is the part of that home-side weight carried by authorships
    whose class satisfies ``pred``; ``unfiltered`` counts the class
    authorships' whole weight instead, which is how populations publishing
    from outside home (overseas stayers) participate in home's
    co-publications.
    """
    if counting not in ("full", "frac"):
        raise ValueError(f"counting must be 'full' or 'frac', got {counting!r}")
    scheme = corpus.scheme
    weights = _WeightCache(scheme)
    num = den = 0.0
    for rec in corpus.records:
        if rec.year != year:
            continue
        international, _ = intl_copub(rec, scheme, require_distinct_authors)
        if not international:
            continue
        n = len(rec.authorships)
        home_frac = 0.0
        class_frac = 0.0
        for a in rec.authorships:
            share = weights(a.countries).get(home, 0.0) / n
            home_frac += share
            if pred(index.class_at(a.author_id, rec.year)):
                class_frac += (1.0 / n) if unfiltered else share
        if home_frac == 0.0:
            continue
        if counting == "full":
            den += 1.0
            num += 1.0 if class_frac > 0.0 else 0.0
        else:
            den += home_frac
            num += class_frac
    if den == 0.0:
        raise EmptyReference(f"no international home-region records in {year}")
    return num / den


def copub_direction(
    corpus: Corpus,
    index: StateIndex,
    pred: Callable[[MobilityClass], bool],
    home: str,
    partner: str,
    year: int | None = None,
    require_distinct_authors: bool = False,
) -> float:
    """Class-held authorship fraction of the (home, partner) co-publication series.

    Every record whose cross-region pairs include {home, partner} counts one
    unit, split fractionally over its authorships; the share is the part
    held by authors whose class satisfies ``pred``. ``year=None`` pools all
    years. Computing the same class against both partners exposes whether
    collaboration leans toward the former host.
    """
    scheme = corpus.scheme
    pair = tuple(sorted((home, partner), key=scheme.rank))
    num = den = 0.0
    for rec in corpus.records:
        if year is not None and rec.year != year:
            continue
        international, pairs = intl_copub(rec, scheme, require_distinct_authors)
        if not international or pair not in pairs:
            continue
        den += 1.0
        n = len(rec.authorships)
        for a in rec.authorships:
            if pred(index.class_at(a.author_id, rec.year)):
                num += 1.0 / n
    if den == 0.0:
        raise EmptyReference(
            f"no {pair[0]}-{pair[1]} co-publications" + (f" in {year}" if year else "")
        )
    return num / den


def record_region_weights(record: PublicationRecord, scheme: RegionScheme) -> dict[str, float]:
    """Fractional region weights of one record; they sum to 1."""
    out: dict[str, float] = {}
    n = len(record.authorships)
    for a in record.authorships:
        for region, w in regionalize(a.countries, scheme).items():
            out[region] = out.get(region, 0.0) + w / n
    return out


@dataclass(frozen=True, slots=True)
class IndicatorRow:
    population: str
    year: int
    metric: str
    counting: str
    value: float


def class_predicate(home: str, series: str) -> Callable[[MobilityClass], bool]:
    """Predicate for a reporting series name.

    ``DOM`` is the home region's never-entered population, ``{home}->{F}``
    the overseas population hosted by F, ``{F}->{home}`` resident returnees
    whose attributed host is F, ``ALL->{home}`` all resident returnees.
    """
    if series == "DOM":
        target = domestic(home)
        return lambda c: c == target
    if series == f"ALL->{home}":
        return lambda c: c.kind == RETURNEE_RESIDENT and c.first == home
    if "->" in series:
        src, _, dst = series.partition("->")
        if src == home:
            target = overseas(home, dst)
            return lambda c: c == target
        if dst == home:
            target = returnee_resident(home, src)
            return lambda c: c == target
    raise ValueError(f"unknown population series {series!r}")


# accumulator slots per (year, series)
_FRAC, _FULL, _T10F_FRAC, _T10F_FULL, _T10C_FRAC, _T10C_FULL, _INTL_FRAC, _INTL_FULL = range(8)


class IndicatorEngine:
    """Single-pass computation of every reported indicator family.

    Populations reported: WLD (everything), the home region, DOM, plus for
    each foreign region F the overseas series ``home->F`` and returnee
    series ``F->home``, and the pooled ``ALL->home``. The engine is a
    faster equivalent of the per-operation functions above and is held to
    them by the test suite.
    """

    def __init__(
        self,
        corpus: Corpus,
        states: Mapping[str, list[MobilityState]],
        home: str,
        require_distinct_authors: bool = False,
    ):
        self.corpus = corpus
        self.scheme = corpus.scheme
        self.home = home
        self.require_distinct_authors = require_distinct_authors
        self.index = StateIndex(states)
        self.baselines = citation_baselines(corpus)
        self.scores = top10_flags(corpus, self.baselines)
        self.foreign = [r for r in self.scheme.labels if r != home]
        self.class_series = (
            ["DOM"]
            + [f"{home}->{f}" for f in self.foreign]
            + [f"{f}->{home}" for f in self.foreign]
            + [f"ALL->{home}"]
        )
        self.all_series = ["WLD", home] + self.class_series
        self._run()

    def _series_of(self, klass: MobilityClass) -> tuple[tuple[str, bool], ...]:
        """Reporting series a class feeds, with use-whole-weight flag."""
        home = self.home
        if klass.kind == DOMESTIC and klass.first == home:
            return (("DOM", False),)
        if klass.kind == OVERSEAS and klass.first == home:
            return ((f"{home}->{klass.second}", True),)
        if klass.kind == RETURNEE_RESIDENT and klass.first == home:
            return ((f"{klass.second}->{home}", False), (f"ALL->{home}", False))
        return ()

    def _run(self) -> None:
        home = self.home
        scheme = self.scheme
        weights = _WeightCache(scheme)
        series_cache: dict[MobilityClass, tuple[tuple[str, bool], ...]] = {}
        acc: dict[int, dict[str, list[float]]] = {}
        pair_acc: dict[tuple[str, str], dict[int, list[float]]] = {}  # [full, frac]
        dir_num: dict[tuple[str, str], dict[int, float]] = {}
        dir_den: dict[str, dict[int, float]] = {}
        home_pairs = {f: tuple(sorted((home, f), key=scheme.rank)) for f in self.foreign}
        for rec in self.corpus.records:
            year = rec.year
            n = len(rec.authorships)
            score = self.scores[rec.pub_id]
            international, pairs = intl_copub(rec, scheme, self.require_distinct_authors)
            frac: dict[str, float] = {"WLD": 1.0}
            held: dict[str, float] = {}  # class series -> whole authorship weight held
            rec_region_w: dict[str, float] = {}
            for a in rec.authorships:
                auth_regions = weights(a.countries)
                auth_w = 1.0 / n
                home_share = auth_regions.get(home, 0.0) * auth_w
                for region, w in auth_regions.items():
                    rec_region_w[region] = rec_region_w.get(region, 0.0) + w * auth_w
                klass = self.index.class_at(a.author_id, year)
                targets = series_cache.get(klass)
                if targets is None:
                    targets = self._series_of(klass)
                    series_cache[klass] = targets
                for series, whole in targets:
                    w = auth_w if whole else home_share
                    if w:
                        frac[series] = frac.get(series, 0.0) + w
                    held[series] = held.get(series, 0.0) + auth_w
            home_w = rec_region_w.get(home, 0.0)
            if home_w:
                frac[home] = home_w
            # INTL slots count home-side international records only: a
            # co-publication without a home authorship is not part of the
            # home region's international output.
            intl_home = international and home_w > 0.0
            by_year = acc.setdefault(year, {})
            for series, f in frac.items():
                if f == 0.0:
                    continue
                slot = by_year.get(series)
                if slot is None:
                    slot = by_year[series] = [0.0] * 8
                slot[_FRAC] += f
                slot[_FULL] += 1.0
                if score.top10_fwci:
                    slot[_T10F_FRAC] += f
                    slot[_T10F_FULL] += 1.0
                if score.top10_cits:
                    slot[_T10C_FRAC] += f
                    slot[_T10C_FULL] += 1.0
                if intl_home:
                    slot[_INTL_FRAC] += f
                    slot[_INTL_FULL] += 1.0
            if international:
                for pair in pairs:
                    p = pair_acc.setdefault(pair, {}).setdefault(year, [0.0, 0.0])
                    p[0] += 1.0
                    p[1] += rec_region_w.get(pair[0], 0.0) + rec_region_w.get(pair[1], 0.0)
                for f_region in self.foreign:
                    if home_pairs[f_region] not in pairs:
                        continue
                    den = dir_den.setdefault(f_region, {})
                    den[year] = den.get(year, 0.0) + 1.0
                    for series, w in held.items():
                        if w:
                            d = dir_num.setdefault((series, f_region), {})
                            d[year] = d.get(year, 0.0) + w
        self._acc = acc
        self._pair_acc = pair_acc
        self._dir_num = dir_num
        self._dir_den = dir_den

    def years(self) -> list[int]:
        return sorted(self._acc)

    def _slot(self, year: int, series: str) -> list[float]:
        return self._acc.get(year, {}).get(series, [0.0] * 8)

    def pp10_rows(self) -> list[IndicatorRow]:
        rows = []
        for year in self.years():
            for series in self.all_series:
                slot = self._slot(year, series)
                for counting, wi, fi, ci in (
                    ("full", _FULL, _T10F_FULL, _T10C_FULL),
                    ("frac", _FRAC, _T10F_FRAC, _T10C_FRAC),
                ):
                    base = slot[wi]
                    if base == 0.0:
                        continue
                    rows.append(IndicatorRow(series, year, "pp10_fwci", counting, slot[fi] / base))
                    rows.append(IndicatorRow(series, year, "pp10_cits", counting, slot[ci] / base))
        return rows

    def share_rows(self) -> list[IndicatorRow]:
        """World share of home output, home's international share, and class
        output shares relative to home output."""
        rows = []
        for year in self.years():
            for counting, wi, ii in (("full", _FULL, _INTL_FULL), ("frac", _FRAC, _INTL_FRAC)):
                world = self._slot(year, "WLD")[wi]
                home_slot = self._slot(year, self.home)
                home_w = home_slot[wi]
                if world > 0.0:
                    rows.append(IndicatorRow(self.home, year, "world_share", counting, home_w / world))
                if home_w > 0.0:
                    rows.append(IndicatorRow(self.home, year, "intl_share", counting, home_slot[ii] / home_w))
                    for series in self.class_series:
                        rows.append(
                            IndicatorRow(
                                series, year, "output_share", counting,
                                self._slot(year, series)[wi] / home_w,
                            )
                        )
        return rows

    def intl_rows(self) -> list[IndicatorRow]:
        """Co-publication volume per cross-region pair, by year."""
        rows = []
        for pair in sorted(self._pair_acc, key=lambda p: (self.scheme.rank(p[0]), self.scheme.rank(p[1]))):
            label = f"{pair[0]}-{pair[1]}"
            for year in sorted(self._pair_acc[pair]):
                full, frac = self._pair_acc[pair][year]
                rows.append(IndicatorRow(label, year, "copub_count", "full", full))
                rows.append(IndicatorRow(label, year, "copub_count", "frac", frac))
        return rows

    def class_intl_rows(self) -> list[IndicatorRow]:
        """Class shares of home's international co-publications, by year."""
        rows = []
        for year in self.years():
            for counting, ii in (("full", _INTL_FULL), ("frac", _INTL_FRAC)):
                den = self._slot(year, self.home)[ii]
                if den == 0.0:
                    continue
                for series in self.class_series:
                    rows.append(
                        IndicatorRow(
                            series, year, "class_intl_share", counting,
                            self._slot(year, series)[ii] / den,
                        )
                    )
        return rows

    def direction_rows(self) -> list[IndicatorRow]:
        """Class participation in each (home, partner) pair series, by year."""
        rows = []
        for f in self.foreign:
            if f not in self._dir_den:
                continue
            for year in sorted(self._dir_den[f]):
                den = self._dir_den[f][year]
                for series in self.class_series:
                    num = self._dir_num.get((series, f), {}).get(year, 0.0)
                    rows.append(
                        IndicatorRow(series, year, f"direction_{self.home}-{f}", "frac", num / den)
                    )
        return rows

    def direction_share(self, series: str, partner: str, year: int | None = None) -> float:
        """Pooled or per-year direction share for one class series."""
        den_by_year = self._dir_den.get(partner, {})
        num_by_year = self._dir_num.get((series, partner), {})
        if year is not None:
            den = den_by_year.get(year, 0.0)
            num = num_by_year.get(year, 0.0)
        else:
            den = sum(den_by_year.values())
            num = sum(num_by_year.values())
        if den == 0.0:
            raise EmptyReference(f"no {self.home}-{partner} co-publications")
        return num / den
