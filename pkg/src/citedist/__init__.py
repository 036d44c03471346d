"""Citation-distance analytics over windowed co-authorship networks."""

from .collab import (
    INFINITE,
    CollabNetwork,
    Distance,
    NetworkStats,
    assortativity,
    avg_clustering,
    build_window,
    connected_components,
    network_report,
    shortest_distance,
)
from .config import Config, load_config, parse_config_text
from .corpus import (
    CitationEvent,
    CorpusStore,
    PaperRecord,
    citations_in_year,
    load_corpus,
    parse_records,
    yearly_counts,
)
from .distances import (
    DistanceTally,
    LedgerSeries,
    YearLedger,
    batch_year_distances,
    citation_distance,
    distance_histogram,
    paper_distance_tallies,
)
from .indices import (
    IndexRecord,
    ScholarIndexState,
    WeightConfig,
    c_index,
    g_index,
    h_index,
    scholar_snapshot,
    update_x,
    weight,
    x_increment,
)

__version__ = "0.1.0"

__all__ = [
    "CitationEvent",
    "CollabNetwork",
    "Config",
    "CorpusStore",
    "Distance",
    "DistanceTally",
    "INFINITE",
    "IndexRecord",
    "LedgerSeries",
    "NetworkStats",
    "PaperRecord",
    "ScholarIndexState",
    "WeightConfig",
    "YearLedger",
    "assortativity",
    "avg_clustering",
    "batch_year_distances",
    "build_window",
    "c_index",
    "citation_distance",
    "citations_in_year",
    "connected_components",
    "distance_histogram",
    "g_index",
    "h_index",
    "load_config",
    "load_corpus",
    "network_report",
    "paper_distance_tallies",
    "parse_config_text",
    "parse_records",
    "scholar_snapshot",
    "shortest_distance",
    "update_x",
    "weight",
    "x_increment",
    "yearly_counts",
]
