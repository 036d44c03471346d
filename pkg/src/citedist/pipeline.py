"""Year-by-year pipeline: network build, distance batch, x-index update.

For each year the pipeline builds the window network, distances every
citation event of the year (optionally fanned out over worker
processes), credits the ledger, and advances each cited scholar's
running x by the year's weighted count.  Ledger and state snapshots are
persisted per year, so an interrupted run resumes at the first
incomplete year and replays to the same final state.

Years must be processed consecutively: the x state of year y is defined
in terms of year y-1 plus year y's ledger alone.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .collab import build_window
from .config import Config
from .corpus import CorpusStore
from .distances import (
    EXCEEDS_CODE,
    INF_CODE,
    LedgerSeries,
    YearLedger,
    compute_event_distances,
)
from .errors import IncompleteStateError, WorkspaceError
from .indices import IndexRecord, WeightConfig, scholar_snapshot
from .workspace import Workspace

log = logging.getLogger("citedist")

_MP_STATE: dict = {}


def planned_years(store: CorpusStore, cfg: Config) -> list[int]:
    """Years the pipeline processes: the corpus span, with the leading
    years dropped when strict windowing demands a full window."""
    lo, hi = store.year_span()
    start = lo + cfg.window_length - 1 if cfg.strict_window else lo
    return list(range(start, hi + 1))


def _scaled_code_weight(code: int, n: int) -> int:
    if n == 0:
        return 1
    if code < 0:  # unreachable or beyond the cap: full weight
        return n
    return code if code < n else n


def _mp_init(store, cfg_window, cap):
    _MP_STATE["store"] = store
    _MP_STATE["window"] = cfg_window
    _MP_STATE["cap"] = cap
    _MP_STATE["nets"] = {}


def _mp_chunk(args):
    year, papers = args
    store = _MP_STATE["store"]
    net = _MP_STATE["nets"].get(year)
    if net is None:
        net = build_window(store, year, _MP_STATE["window"])
        _MP_STATE["nets"] = {year: net}
    return compute_event_distances(store, net, year, _MP_STATE["cap"], papers=papers)


def year_ledger(store: CorpusStore, year: int, cfg: Config, jobs: int = 1,
                pool=None) -> YearLedger:
    """Compute one year's ledger, optionally splitting the citing papers
    across a process pool.  Results are identical for any job count."""
    cap = cfg.distance_cap
    ledger = YearLedger(year, cap=cap)
    papers = [p for p in store.papers_in_year(year) if store.paper_refs[p]]
    if not papers:
        return ledger
    if pool is not None and jobs > 1 and len(papers) > jobs:
        size = (len(papers) + jobs - 1) // jobs
        chunks = [(year, papers[i:i + size]) for i in range(0, len(papers), size)]
        results = pool.map(_mp_chunk, chunks)
        codes = [item for chunk in results for item in chunk]
    else:
        net = build_window(store, year, cfg.window_length)
        codes = compute_event_distances(store, net, year, cap, papers=papers)
    for cited_pid, _citing_pid, code in codes:
        ledger.credit(store.paper_authors[cited_pid], code)
    return ledger


@dataclass
class RunResult:
    years_processed: list[int]
    years_skipped: list[int]


def run_pipeline(ws: Workspace, cfg: Config, year_range: tuple[int, int] | None = None,
                 jobs: int = 1) -> RunResult:
    """Process (or resume) the yearly pipeline over the workspace corpus."""
    store = ws.load_store(cfg)
    cfg_hash = cfg.config_hash()
    years = planned_years(store, cfg)
    if year_range is not None:
        lo, hi = year_range
        years = [y for y in years if lo <= y <= hi]
    if not years:
        return RunResult([], [])

    pool = None
    if jobs > 1:
        import multiprocessing as mp

        pool = mp.get_context("fork").Pool(
            jobs, initializer=_mp_init, initargs=(store, cfg.window_length, cfg.distance_cap)
        )

    processed: list[int] = []
    skipped: list[int] = []
    states: dict[int, int] | None = None
    try:
        for year in years:
            if (
                ws.read_ledger(year, store, cfg_hash) is not None
                and ws.read_states(year, store, cfg_hash) is not None
            ):
                skipped.append(year)
                states = None  # reload lazily from the last completed snapshot
                continue
            if states is None:
                states = _load_chain_state(ws, store, cfg, cfg_hash, year, years)
            started = time.perf_counter()
            ledger = year_ledger(store, year, cfg, jobs=jobs, pool=pool)
            n = cfg.n
            for author, tally in ledger.scholars.items():
                delta = 0
                for d, count in tally.finite.items():
                    delta += _scaled_code_weight(d, n) * count
                delta += _scaled_code_weight(INF_CODE, n) * tally.infinite
                delta += _scaled_code_weight(EXCEEDS_CODE, n) * tally.exceeds
                if delta:
                    states[author] = states.get(author, 0) + delta
            ws.write_ledger(ledger, store, cfg_hash)
            ws.write_states(year, states, store, cfg, cfg_hash)
            processed.append(year)
            log.info(
                "year %d: %d citation events, %d scholars credited (%.2fs)",
                year, ledger.events.total(), len(ledger.scholars),
                time.perf_counter() - started,
            )
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return RunResult(processed, skipped)


def _load_chain_state(ws: Workspace, store: CorpusStore, cfg: Config, cfg_hash: str,
                      year: int, years: list[int]) -> dict[int, int]:
    if year == years[0] and year == planned_years(store, cfg)[0]:
        return {}
    prior = ws.read_states(year - 1, store, cfg_hash)
    if prior is None:
        raise WorkspaceError(
            f"year {year} needs the year-{year - 1} state snapshot; "
            f"run the preceding years first"
        )
    return prior


# -- report assembly ---------------------------------------------------------


def load_series(ws: Workspace, store: CorpusStore, cfg: Config,
                up_to_year: int) -> LedgerSeries:
    """All persisted ledgers up to a year, verified against the config."""
    cfg_hash = cfg.config_hash()
    ledgers = {}
    for year in ws.completed_years():
        if year > up_to_year:
            continue
        ledger = ws.read_ledger(year, store, cfg_hash)
        if ledger is None:
            raise WorkspaceError(
                f"ledger for year {year} was produced by a different configuration; re-run"
            )
        ledgers[year] = ledger
    if not ledgers:
        raise WorkspaceError("no ledgers in workspace; run the pipeline first")
    return LedgerSeries(ledgers)


def build_index_records(store: CorpusStore, series: LedgerSeries, year: int,
                        cfg: Config) -> list[IndexRecord]:
    """Index snapshot for every scholar with at least one credited
    citation up to ``year``.  Requires exact (uncapped) ledgers."""
    if not series.is_exact():
        raise IncompleteStateError(
            "index reports need exact distances; re-run with exact_distances = true"
        )
    wcfg = WeightConfig(n=cfg.n, alpha=cfg.alpha, window_length=cfg.window_length,
                        cap=cfg.distance_cap)
    paper_counts = store.paper_citation_counts(year)
    records = []
    for scholar in sorted(series.scholars(year)):
        per_paper = [paper_counts[p] for p in store.author_papers[scholar]]
        records.append(
            scholar_snapshot(
                scholar, year, series, per_paper, wcfg,
                label=store.author_labels[scholar],
            )
        )
    records.sort(key=lambda r: r.scholar)
    return records
