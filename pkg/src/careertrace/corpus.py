"""Bibliographic data model, corpus parsing and the country-to-region scheme.

A corpus is line-delimited JSON, one record per line, with exactly these
fields:

    pub_id    string, unique within the corpus
    year      int publication year
    seq       int within-year ordering key (optional, default 0)
    fields    non-empty array of subject-field identifiers
    doc_type  document-type label
    cites     non-negative citation count
    authors   non-empty array of {"id": string, "countries": [codes]}

Country codes are 3-letter uppercase identifiers. A region scheme maps
countries to reporting regions; codes not covered by any region fall into
the scheme's catch-all label (``OTHER`` by default).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    DuplicatePubId,
    EmptyAuthorList,
    MalformedLine,
    SchemeError,
    YearOutOfWindow,
)

_RECORD_KEYS = {"pub_id", "year", "seq", "fields", "doc_type", "cites", "authors"}
_AUTHOR_KEYS = {"id", "countries"}


def is_country_code(code: object) -> bool:
    """True iff ``code`` is a 3-letter uppercase country identifier."""
    return (
        isinstance(code, str)
        and len(code) == 3
        and all("A" <= c <= "Z" for c in code)
    )


class RegionScheme:
    """Disjoint grouping of country codes into named reporting regions.

    ``label_order`` is a total order over region labels; it breaks exact
    ties deterministically wherever a single region must be chosen.
    Countries not listed under any region map to ``other_label``.
    """

    def __init__(
        self,
        regions: dict[str, Iterable[str]],
        label_order: Iterable[str],
        other_label: str = "OTHER",
    ):
        self.regions: dict[str, frozenset[str]] = {
            label: frozenset(codes) for label, codes in regions.items()
        }
        self.label_order: tuple[str, ...] = tuple(label_order)
        self.other_label = other_label
        self._validate()
        self._country_to_region: dict[str, str] = {}
        for label, codes in self.regions.items():
            for code in codes:
                self._country_to_region[code] = label
        self._rank = {label: i for i, label in enumerate(self.label_order)}

    def _validate(self) -> None:
        seen: dict[str, str] = {}
        for label, codes in self.regions.items():
            for code in codes:
                if not is_country_code(code):
                    raise SchemeError(f"region {label!r} lists invalid country code {code!r}")
                if code in seen:
                    raise SchemeError(
                        f"country {code!r} appears in regions {seen[code]!r} and {label!r}"
                    )
                seen[code] = label
        labels = set(self.regions) | {self.other_label}
        order = list(self.label_order)
        if len(order) != len(set(order)):
            raise SchemeError("label_order contains duplicates")
        if set(order) != labels:
            missing = labels - set(order)
            extra = set(order) - labels
            raise SchemeError(
                f"label_order must list every region label exactly once"
                f" (missing {sorted(missing)}, unknown {sorted(extra)})"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        return self.label_order

    def region_of(self, country: str) -> str:
        """Region label for a country code; unmapped codes go to the catch-all."""
        return self._country_to_region.get(country, self.other_label)

    def rank(self, label: str) -> int:
        """Position of ``label`` in the deterministic tie-break order."""
        return self._rank[label]

    def countries_of(self, label: str) -> frozenset[str]:
        return self.regions.get(label, frozenset())


def load_scheme(path: str | Path) -> RegionScheme:
    """Load a region scheme from its JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemeError(f"{path}: not valid JSON ({exc.msg})") from None
    if not isinstance(raw, dict) or "regions" not in raw or "label_order" not in raw:
        raise SchemeError(f"{path}: scheme file needs 'regions' and 'label_order'")
    return RegionScheme(
        regions=raw["regions"],
        label_order=raw["label_order"],
        other_label=raw.get("other_label", "OTHER"),
    )


def default_scheme() -> RegionScheme:
    """The packaged default scheme: CHN, USA, EU28 (2013-2020 membership), OTHER."""
    return load_scheme(Path(__file__).parent / "data" / "default_scheme.json")


def default_scheme_path() -> Path:
    return Path(__file__).parent / "data" / "default_scheme.json"


@dataclass(frozen=True, slots=True)
class Authorship:
    """One author on one record, with one country per listed affiliation."""

    author_id: str
    countries: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class PublicationRecord:
    pub_id: str
    year: int
    seq: int
    field_codes: tuple[str, ...]
    doc_type: str
    citation_count: int
    authorships: tuple[Authorship, ...]

    def sort_key(self) -> tuple[int, int, str]:
        return (self.year, self.seq, self.pub_id)


@dataclass(slots=True)
class Corpus:
    """Validated records in canonical (year, seq, pub_id) order."""

    records: list[PublicationRecord]
    scheme: RegionScheme
    window: tuple[int, int]

    def __len__(self) -> int:
        return len(self.records)

    def dump_lines(self) -> Iterator[str]:
        """Canonical line serialization; independent of ingestion order."""
        for rec in self.records:
            yield dump_record(rec)


def dump_record(rec: PublicationRecord) -> str:
    obj = {
        "pub_id": rec.pub_id,
        "year": rec.year,
        "seq": rec.seq,
        "fields": list(rec.field_codes),
        "doc_type": rec.doc_type,
        "cites": rec.citation_count,
        "authors": [
            {"id": a.author_id, "countries": list(a.countries)} for a in rec.authorships
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


class _Intern:
    """Per-parse string pool so repeated codes share one object."""

    def __init__(self) -> None:
        self._pool: dict[str, str] = {}

    def __call__(self, s: str) -> str:
        return self._pool.setdefault(s, s)


def _parse_record(obj: object, line_no: int, intern: _Intern) -> PublicationRecord:
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "record must be an object")
    unknown = set(obj) - _RECORD_KEYS
    if unknown:
        raise MalformedLine(line_no, f"unknown keys {sorted(unknown)}")
    try:
        pub_id = obj["pub_id"]
        year = obj["year"]
        fields = obj["fields"]
        doc_type = obj["doc_type"]
        cites = obj["cites"]
        authors = obj["authors"]
    except KeyError as exc:
        raise MalformedLine(line_no, f"missing key {exc.args[0]!r}") from None
    seq = obj.get("seq", 0)
    if not isinstance(pub_id, str) or not pub_id:
        raise MalformedLine(line_no, "pub_id must be a non-empty string")
    if not isinstance(year, int) or isinstance(year, bool):
        raise MalformedLine(line_no, "year must be an integer")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise MalformedLine(line_no, "seq must be an integer")
    if not isinstance(fields, list) or not fields or not all(
        isinstance(f, str) and f for f in fields
    ):
        raise MalformedLine(line_no, "fields must be a non-empty array of strings")
    if not isinstance(doc_type, str):
        raise MalformedLine(line_no, "doc_type must be a string")
    if not isinstance(cites, int) or isinstance(cites, bool) or cites < 0:
        raise MalformedLine(line_no, "cites must be a non-negative integer")
    if not isinstance(authors, list):
        raise MalformedLine(line_no, "authors must be an array")
    if not authors:
        raise EmptyAuthorList(pub_id, line_no)

    # de-duplicate fields, first occurrence wins
    seen_fields: dict[str, None] = {}
    for f in fields:
        seen_fields.setdefault(intern(f), None)

    authorships = []
    seen_authors: set[str] = set()
    for a in authors:
        if not isinstance(a, dict) or set(a) - _AUTHOR_KEYS or "id" not in a or "countries" not in a:
            raise MalformedLine(line_no, "each author must be {id, countries}")
        aid, countries = a["id"], a["countries"]
        if not isinstance(aid, str) or not aid:
            raise MalformedLine(line_no, "author id must be a non-empty string")
        if aid in seen_authors:
            raise MalformedLine(line_no, f"author {aid!r} listed twice on {pub_id!r}")
        seen_authors.add(aid)
        if not isinstance(countries, list) or not countries:
            raise MalformedLine(line_no, f"author {aid!r} has no affiliation countries")
        for c in countries:
            if not is_country_code(c):
                raise MalformedLine(line_no, f"invalid country code {c!r}")
        authorships.append(
            Authorship(intern(aid), tuple(intern(c) for c in countries))
        )
    return PublicationRecord(
        pub_id=pub_id,
        year=year,
        seq=seq,
        field_codes=tuple(seen_fields),
        doc_type=intern(doc_type),
        citation_count=cites,
        authorships=tuple(authorships),
    )


def iter_diagnostics(
    lines: Iterable[str],
    scheme: RegionScheme,
    window: tuple[int, int] | None = None,
) -> Iterator[Exception]:
    """Yield every validation problem in the stream (used by ``validate``)."""
    intern = _Intern()
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = _load_line(line, line_no, intern)
        except (MalformedLine, EmptyAuthorList) as exc:
            yield exc
            continue
        if rec.pub_id in seen:
            yield DuplicatePubId(rec.pub_id, line_no)
            continue
        seen.add(rec.pub_id)
        if window is not None and not (window[0] <= rec.year <= window[1]):
            yield YearOutOfWindow(rec.pub_id, rec.year, window)


def _load_line(line: str, line_no: int, intern: _Intern) -> PublicationRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(line_no, f"invalid JSON ({exc.msg})") from None
    return _parse_record(obj, line_no, intern)


def parse_corpus(
    lines: Iterable[str],
    scheme: RegionScheme,
    window: tuple[int, int] | None = None,
) -> Corpus:
    """Parse and validate a line-delimited record stream into a Corpus.

    Raises on the first invalid line. The result is independent of input
    line order: records are sorted by (year, seq, pub_id) after ingestion.
    When ``window`` is omitted it is inferred from the data.
    """
    intern = _Intern()
    records: list[PublicationRecord] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        rec = _load_line(line, line_no, intern)
        if rec.pub_id in seen:
            raise DuplicatePubId(rec.pub_id, line_no)
        seen.add(rec.pub_id)
        if window is not None and not (window[0] <= rec.year <= window[1]):
            raise YearOutOfWindow(rec.pub_id, rec.year, window)
        records.append(rec)
    records.sort(key=PublicationRecord.sort_key)
    if window is None:
        if records:
            window = (min(r.year for r in records), max(r.year for r in records))
        else:
            window = (0, 0)
    return Corpus(records=records, scheme=scheme, window=window)


def load_corpus(
    path: str | Path,
    scheme: RegionScheme,
    window: tuple[int, int] | None = None,
) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, scheme, window)


def regionalize(countries: Iterable[str], scheme: RegionScheme) -> dict[str, float]:
    """Fractional region weights of an affiliation-country list.

    Each listed country contributes 1/n; duplicates count separately.
    Weights are grouped by region and sum to 1.
    """
    counts: dict[str, int] = {}
    n = 0
    for c in countries:
        region = scheme.region_of(c)
        counts[region] = counts.get(region, 0) + 1
        n += 1
    if n == 0:
        raise ValueError("countries must be non-empty")
    return {region: k / n for region, k in counts.items()}
