"""Yearly stocks of researchers per mobility class.

Authors stay countable through publication gaps: interior gaps (a later
publication exists) are always carried forward from the last known
position, and trailing silence is kept for ``grace`` further years (default
2), after which the author is retired and excluded. Each stock cell splits
into authors entering the class that year (new movement) and authors who
entered earlier and are still active (preceding stock).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BeforeCareer, UndefinedRatio
from .mobility import MobilityState, overseas, returnee_resident
from .timeline import CareerTimeline

ACTIVE = "Active"
GAP_FILLED = "GapFilled"
RETIRED = "Retired"

DEFAULT_GRACE_YEARS = 2


@dataclass(frozen=True, slots=True)
class ActivityStatus:
    author_id: str
    year: int
    status: str


def activity_status(
    timeline: CareerTimeline,
    year: int,
    dataset_end: int,
    grace: int = DEFAULT_GRACE_YEARS,
) -> ActivityStatus:
    """Active / GapFilled / Retired for one author-year.

    Active when a position exists for the year. Interior gaps are filled
    regardless of length; trailing years are filled up to ``grace`` years
    past the last publication, then the author counts as retired.
    ``dataset_end`` is the observation horizon the trailing rule is relative
    to; queries beyond it follow the same rule.
    """
    if year < timeline.first_year:
        raise BeforeCareer(timeline.author_id, year, timeline.first_year)
    if timeline.has_position(year):
        status = ACTIVE
    elif year < timeline.last_year or year <= timeline.last_year + grace:
        status = GAP_FILLED
    else:
        status = RETIRED
    return ActivityStatus(author_id=timeline.author_id, year=year, status=status)


def build_statuses(
    timelines: Mapping[str, CareerTimeline],
    year_range: tuple[int, int],
    dataset_end: int,
    grace: int = DEFAULT_GRACE_YEARS,
) -> dict[tuple[str, int], ActivityStatus]:
    """Statuses for every author-year in range, starting at each career's first year."""
    statuses: dict[tuple[str, int], ActivityStatus] = {}
    y0, y1 = year_range
    for author_id, tl in timelines.items():
        for year in range(max(y0, tl.first_year), y1 + 1):
            statuses[(author_id, year)] = activity_status(tl, year, dataset_end, grace)
    return statuses


@dataclass(frozen=True, slots=True)
class StockCell:
    class_key: str
    year: int
    preceding: int
    new_movement: int

    @property
    def total(self) -> int:
        return self.preceding + self.new_movement


def stock_table(
    states: Mapping[str, list[MobilityState]],
    statuses: Mapping[tuple[str, int], ActivityStatus],
    year_range: tuple[int, int],
) -> list[StockCell]:
    """Counts per (class, year), split into preceding stock and new movement.

    During gap-filled years an author keeps the class and entry year of the
    last known position. Retired author-years are excluded. Every author
    contributes to at most one class per year. Cells with zero counts are
    omitted.
    """
    y0, y1 = year_range
    new_counts: dict[tuple[str, int], int] = {}
    prec_counts: dict[tuple[str, int], int] = {}
    for author_id, author_states in states.items():
        if not author_states:
            continue
        idx = 0
        current: MobilityState | None = None
        for year in range(max(y0, author_states[0].year), y1 + 1):
            while idx < len(author_states) and author_states[idx].year <= year:
                current = author_states[idx]
                idx += 1
            status = statuses.get((author_id, year))
            if status is None or status.status == RETIRED or current is None:
                continue
            cell = (current.klass.key(), year)
            if current.since_year == year:
                new_counts[cell] = new_counts.get(cell, 0) + 1
            else:
                prec_counts[cell] = prec_counts.get(cell, 0) + 1
    cells = [
        StockCell(class_key=key, year=year, preceding=prec_counts.get((key, year), 0),
                  new_movement=new_counts.get((key, year), 0))
        for key, year in sorted(set(new_counts) | set(prec_counts))
    ]
    return cells


def stock_lookup(cells: Iterable[StockCell]) -> dict[tuple[str, int], StockCell]:
    return {(c.class_key, c.year): c for c in cells}


def return_ratio(
    cells: Iterable[StockCell] | dict[tuple[str, int], StockCell],
    home: str,
    host: str,
    year: int,
) -> float:
    """Overseas(home, host) stock divided by ReturneeResident(home, host) stock.

    Infinite when nobody has returned; undefined (raises) when both stocks
    are empty.
    """
    table = cells if isinstance(cells, dict) else stock_lookup(cells)
    out_cell = table.get((overseas(home, host).key(), year))
    ret_cell = table.get((returnee_resident(home, host).key(), year))
    out_total = out_cell.total if out_cell else 0
    ret_total = ret_cell.total if ret_cell else 0
    if out_total == 0 and ret_total == 0:
        raise UndefinedRatio(f"no {home}->{host} overseas or returnee stock in {year}")
    if ret_total == 0:
        return math.inf
    return out_total / ret_total
