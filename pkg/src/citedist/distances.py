"""Per-year citation distances and the count ledgers built from them.

The distance of one citation event is the minimum collaboration distance
between any author of the cited paper and any author of the citing
paper, measured on the citing year's window network.  A shared author
makes it a self-citation at distance 0.  Full counting applies: every
coauthor of the cited paper is credited the whole citation at the event
distance.

Ledgers store, per scholar and per year, how many credited citations
fell at each finite distance, how many had no path at all (the infinite
bucket), and, for capped runs, how many were only resolved as "farther
than the cap".  A capped run (cap = n) is sufficient for the x-index,
whose weights saturate at n; exact runs are required for the c-index,
N_w, and the maximum finite distance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping

from .collab import BFSSearcher, CollabNetwork, Distance, build_window
from .config import Config
from .corpus import CitationEvent, CorpusStore
from .errors import IncompleteStateError

INF_CODE = -1
EXCEEDS_CODE = -2


@dataclass
class DistanceTally:
    """Distance-count vector for one scholar (or one event stream)."""

    finite: dict[int, int] = field(default_factory=dict)
    infinite: int = 0
    exceeds: int = 0
    cap: int | None = None

    def add(self, dist: Distance, count: int = 1) -> None:
        if dist.is_finite:
            self.finite[dist.hops] = self.finite.get(dist.hops, 0) + count
        elif dist.exceeds_cap:
            self.exceeds += count
            self.cap = dist.cap if self.cap is None else min(self.cap, dist.cap)
        else:
            self.infinite += count

    def add_code(self, code: int, count: int = 1) -> None:
        if code >= 0:
            self.finite[code] = self.finite.get(code, 0) + count
        elif code == INF_CODE:
            self.infinite += count
        else:
            self.exceeds += count

    def copy(self) -> "DistanceTally":
        return DistanceTally(dict(self.finite), self.infinite, self.exceeds, self.cap)

    def update(self, other: "DistanceTally") -> None:
        for d, c in other.finite.items():
            self.finite[d] = self.finite.get(d, 0) + c
        self.infinite += other.infinite
        self.exceeds += other.exceeds
        if other.exceeds or other.cap is not None:
            if other.cap is not None:
                self.cap = other.cap if self.cap is None else min(self.cap, other.cap)

    def total(self) -> int:
        return sum(self.finite.values()) + self.infinite + self.exceeds

    def max_finite(self) -> int | None:
        """Largest finite distance with a nonzero count (D_f); None if none."""
        return max((d for d, c in self.finite.items() if c), default=None)

    def is_exact(self) -> bool:
        return self.exceeds == 0


class YearLedger:
    """Distance counts for one citing year.

    ``scholars`` maps interned author id -> credited tally; ``events``
    tallies each citation event exactly once (used for distance
    distributions, where coauthor multiplicity must not inflate bins).
    """

    def __init__(self, year: int, cap: int | None = None):
        self.year = year
        self.cap = cap
        self.scholars: dict[int, DistanceTally] = {}
        self.events = DistanceTally(cap=cap)

    def credit(self, cited_authors: Iterable[int], code: int) -> None:
        self.events.add_code(code)
        for author in cited_authors:
            tally = self.scholars.get(author)
            if tally is None:
                tally = self.scholars[author] = DistanceTally(cap=self.cap)
            tally.add_code(code)

    def merge(self, other: "YearLedger") -> None:
        if other.year != self.year or other.cap != self.cap:
            raise ValueError("can only merge ledgers for the same year and cap")
        self.events.update(other.events)
        for author, tally in other.scholars.items():
            mine = self.scholars.get(author)
            if mine is None:
                self.scholars[author] = tally.copy()
            else:
                mine.update(tally)

    def total_credited(self) -> int:
        return sum(t.total() for t in self.scholars.values())

    # -- persistence (line-delimited JSON) ------------------------------

    def write(self, fp: IO[str], store: CorpusStore, config_hash: str) -> None:
        head = {"kind": "header", "year": self.year, "cap": self.cap, "config": config_hash}
        fp.write(json.dumps(head, sort_keys=True) + "\n")
        fp.write(json.dumps(_tally_obj("events", None, self.events), sort_keys=True) + "\n")
        for author in sorted(self.scholars):
            obj = _tally_obj("scholar", store.author_labels[author], self.scholars[author])
            fp.write(json.dumps(obj, sort_keys=True) + "\n")

    @classmethod
    def read(cls, fp: IO[str], store: CorpusStore) -> tuple["YearLedger", str]:
        head = json.loads(next(fp))
        if head.get("kind") != "header":
            raise ValueError("ledger file missing header line")
        ledger = cls(year=head["year"], cap=head["cap"])
        for line in fp:
            obj = json.loads(line)
            tally = DistanceTally(
                finite={int(k): v for k, v in obj["counts"].items()},
                infinite=obj["infinite"],
                exceeds=obj["exceeds"],
                cap=ledger.cap if obj["exceeds"] else None,
            )
            if obj["kind"] == "events":
                ledger.events = tally
                ledger.events.cap = ledger.cap
            else:
                ledger.scholars[store.author_index[obj["id"]]] = tally
        return ledger, head["config"]


def _tally_obj(kind: str, label: str | None, tally: DistanceTally) -> dict:
    obj = {
        "kind": kind,
        "counts": {str(d): c for d, c in sorted(tally.finite.items())},
        "infinite": tally.infinite,
        "exceeds": tally.exceeds,
    }
    if label is not None:
        obj["id"] = label
    return obj


class LedgerSeries:
    """Ordered collection of yearly ledgers for multi-year lookups."""

    def __init__(self, ledgers: Mapping[int, YearLedger] | Iterable[YearLedger]):
        if isinstance(ledgers, Mapping):
            self._by_year = dict(ledgers)
        else:
            self._by_year = {ledger.year: ledger for ledger in ledgers}

    @property
    def years(self) -> list[int]:
        return sorted(self._by_year)

    def ledger(self, year: int) -> YearLedger | None:
        return self._by_year.get(year)

    def ensure_contiguous_through(self, year: int) -> None:
        if not self._by_year:
            raise IncompleteStateError("no ledger years available")
        start = min(self._by_year)
        missing = [y for y in range(start, year + 1) if y not in self._by_year]
        if missing:
            raise IncompleteStateError(f"missing ledger years: {missing}")

    def is_exact(self) -> bool:
        return all(ledger.cap is None for ledger in self._by_year.values())

    def year_slices(self, scholar: int, up_to_year: int) -> Iterator[tuple[int, DistanceTally]]:
        for year in self.years:
            if year > up_to_year:
                break
            tally = self._by_year[year].scholars.get(scholar)
            if tally is not None:
                yield year, tally

    def pooled_tally(self, scholar: int, up_to_year: int) -> DistanceTally:
        pooled = DistanceTally()
        for _, tally in self.year_slices(scholar, up_to_year):
            pooled.update(tally)
        return pooled

    def scholars(self, up_to_year: int) -> set[int]:
        out: set[int] = set()
        for year in self.years:
            if year > up_to_year:
                break
            out.update(self._by_year[year].scholars)
        return out


# -- distance computation ----------------------------------------------------


def citation_distance(net: CollabNetwork, event: CitationEvent,
                      cap: int | None = None) -> Distance:
    """Distance of one citation event on the citing year's network."""
    if net.year != event.citing_year:
        raise ValueError(
            f"network is for year {net.year}, event cites in {event.citing_year}"
        )
    if not event.cited_authors or not event.citing_authors:
        raise ValueError("citation event with empty author set")
    if event.cited_authors & event.citing_authors:
        return Distance.finite(0)
    return BFSSearcher(net).set_distance(event.citing_authors, event.cited_authors, cap)


def compute_event_distances(store: CorpusStore, net: CollabNetwork, year: int,
                            cap: int | None = None,
                            searcher: BFSSearcher | None = None,
                            papers: Iterable[int] | None = None) -> list[tuple[int, int, int]]:
    """(cited paper, citing paper, distance code) for the year's events.

    One breadth-first expansion per citing paper resolves all of its
    references: the search runs from the citing author set and records
    the level at which each needed cited author appears, stopping early
    once every one is found.  Codes >= 0 are exact hop counts, INF_CODE
    marks proven unreachability, EXCEEDS_CODE a capped give-up.
    """
    if searcher is None:
        searcher = BFSSearcher(net)
    out: list[tuple[int, int, int]] = []
    paper_authors = store.paper_authors
    paper_refs = store.paper_refs
    if papers is None:
        papers = store.papers_in_year(year)
    for pid in papers:
        refs = paper_refs[pid]
        if not refs:
            continue
        citing = paper_authors[pid]
        jset = set(citing)
        pending: list[tuple[int, tuple[int, ...]]] = []
        targets: set[int] = set()
        for ref in refs:
            cited = paper_authors[ref]
            if jset.intersection(cited):
                out.append((ref, pid, 0))
            else:
                pending.append((ref, cited))
                targets.update(cited)
        if not pending:
            continue
        found, exhausted = searcher.distances_to(citing, targets, cap)
        for ref, cited in pending:
            best = -1
            for author in cited:
                hops = found.get(author)
                if hops is not None and (best < 0 or hops < best):
                    best = hops
            if best >= 0:
                out.append((ref, pid, best))
            elif exhausted:
                out.append((ref, pid, INF_CODE))
            else:
                out.append((ref, pid, EXCEEDS_CODE))
    return out


def batch_year_distances(store: CorpusStore, year: int, cfg: Config,
                         net: CollabNetwork | None = None) -> YearLedger:
    """Distance every citation event of ``year`` and credit the ledger.

    Uses the capped search when the configuration only needs the x-index
    (cap = n) and exact search otherwise.
    """
    if net is None:
        net = build_window(store, year, cfg.window_length)
    cap = cfg.distance_cap
    ledger = YearLedger(year, cap=cap)
    codes = compute_event_distances(store, net, year, cap)
    paper_authors = store.paper_authors
    for cited_pid, _citing_pid, code in codes:
        ledger.credit(paper_authors[cited_pid], code)
    return ledger


def paper_distance_tallies(store: CorpusStore, years: Iterable[int],
                           cfg: Config) -> dict[int, DistanceTally]:
    """Distance tallies keyed by *cited paper* over the given years.

    The per-paper view backs paper-level index computation; a scholar's
    credited counts are exactly the union of the tallies of the papers
    they authored.
    """
    cap = cfg.distance_cap
    tallies: dict[int, DistanceTally] = {}
    for year in years:
        net = build_window(store, year, cfg.window_length)
        for cited_pid, _citing_pid, code in compute_event_distances(store, net, year, cap):
            tally = tallies.get(cited_pid)
            if tally is None:
                tally = tallies[cited_pid] = DistanceTally(cap=cap)
            tally.add_code(code)
    return tallies


# -- distributions -----------------------------------------------------------


@dataclass(frozen=True)
class YearHistogram:
    year: int
    bins: tuple[tuple[str, float], ...]  # (label, proportion); labels "0".."k", ">cap", "INF"
    within_max: float
    max_bin: int
    total: int


@dataclass(frozen=True)
class HistogramResult:
    per_year: dict[int, YearHistogram]
    notices: list[str]

    def csv_rows(self) -> list[str]:
        rows = ["year,distance,proportion"]
        for year in sorted(self.per_year):
            hist = self.per_year[year]
            for label, proportion in hist.bins:
                rows.append(f"{year},{label},{proportion:.6f}")
            rows.append(f"{year},<={hist.max_bin},{hist.within_max:.6f}")
        return rows


def distance_histogram(ledgers: Mapping[int, YearLedger] | LedgerSeries,
                       years: Iterable[int], max_bin: int = 12) -> HistogramResult:
    """Per-year distribution of event distances, infinite bucket included.

    Proportions over all bins sum to 1; ``within_max`` is the share of
    citations at finite distance <= ``max_bin``.  Years without
    citations are omitted with a notice.
    """
    if isinstance(ledgers, LedgerSeries):
        ledgers = {year: ledgers.ledger(year) for year in ledgers.years}
    per_year: dict[int, YearHistogram] = {}
    notices: list[str] = []
    for year in years:
        ledger = ledgers.get(year)
        total = ledger.events.total() if ledger is not None else 0
        if total == 0:
            notices.append(f"year {year}: no citations; omitted")
            continue
        tally = ledger.events
        bins: list[tuple[str, float]] = []
        within = 0
        for d in sorted(tally.finite):
            count = tally.finite[d]
            if count:
                bins.append((str(d), count / total))
                if d <= max_bin:
                    within += count
        if tally.exceeds:
            bins.append((f">{tally.cap}", tally.exceeds / total))
        if tally.infinite:
            bins.append(("INF", tally.infinite / total))
        per_year[year] = YearHistogram(
            year=year,
            bins=tuple(bins),
            within_max=within / total,
            max_bin=max_bin,
            total=total,
        )
    return HistogramResult(per_year=per_year, notices=notices)
