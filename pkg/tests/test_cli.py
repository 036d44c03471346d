"""End-to-end CLI: ingest, run, report, exit codes, idempotence, resume."""

import json
import random
from fractions import Fraction

import pytest

from citedist.cli import main
from citedist.config import Config
from citedist.corpus import parse_records
from citedist.pipeline import build_index_records, load_series, run_pipeline
from citedist.workspace import Workspace

from synthcorpus import random_corpus_lines, record_line, table1_lines


@pytest.fixture
def table1_file(tmp_path):
    path = tmp_path / "seven.jsonl"
    path.write_text("\n".join(table1_lines()) + "\n")
    return path


def write_config(tmp_path, **overrides):
    lines = []
    for key, value in overrides.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    path = tmp_path / "engine.cfg"
    path.write_text("\n".join(lines) + "\n")
    return path


def tree_bytes(root):
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_validate_table1(table1_file, capsys):
    assert main(["validate", str(table1_file)]) == 0
    out = capsys.readouterr().out
    assert "7 papers, 9 authors, 0 citations" in out


def test_ingest_and_run_table1(table1_file, tmp_path, capsys):
    ws = tmp_path / "ws"
    assert main(["ingest", str(table1_file), "--workspace", str(ws)]) == 0
    out = capsys.readouterr().out
    assert "7 papers, 9 authors, 0 citations" in out
    assert main(["run", "--workspace", str(ws)]) == 0
    # no citations anywhere: every yearly state snapshot is empty
    store = parse_records(table1_lines(), Config())
    workspace = Workspace(ws)
    for year in range(2012, 2019):
        states = workspace.read_states(year, store, Config().config_hash())
        assert states == {}


def test_ingest_malformed_line_exits_2(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    path.write_text(record_line("p1", 2000, ["a"]) + "\nnot json\n")
    ws = tmp_path / "ws"
    assert main(["ingest", str(path), "--workspace", str(ws)]) == 2
    assert "skipped_lines = 1" in capsys.readouterr().out
    assert (ws / "corpus.jsonl").exists()  # lossy but successful


def test_missing_input_exits_2(tmp_path, capsys):
    assert main(["ingest", str(tmp_path / "absent.jsonl"), "--workspace", str(tmp_path / "ws")]) == 2
    assert "absent.jsonl" in capsys.readouterr().err


def test_usage_error_exits_1(capsys):
    assert main(["report", "no-such-report", "--workspace", "x"]) == 1
    err = capsys.readouterr().err
    assert "index-table" in err  # usage message lists valid names


def test_run_before_ingest_exits_3(tmp_path, capsys):
    assert main(["run", "--workspace", str(tmp_path / "ws")]) == 3
    assert "ingest" in capsys.readouterr().err


def test_two_paper_pipeline_hand_computed(tmp_path):
    # bridge c: cited paper {a, c}, citing paper {b}, path b-c-a of length 1
    # via the shared co-authorship window
    lines = [
        record_line("p0", 2000, ["a", "c"]),
        record_line("p1", 2001, ["b", "c"]),
        record_line("p2", 2002, ["b"], ["p0"]),
    ]
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws = tmp_path / "ws"
    assert main(["ingest", str(src), "--workspace", str(ws)]) == 0
    assert main(["run", "--workspace", str(ws)]) == 0
    store = parse_records(lines, Config())
    states = Workspace(ws).read_states(2002, store, Config().config_hash())
    a = store.author_index
    # citing author b: d(b, a) = 2 (b-c, c-a), d(b, c) = 1 -> event distance 1
    # each coauthor of p0 is credited weight 1/6 (scaled by n = 6 -> 1)
    assert states[a["a"]] == 1
    assert states[a["c"]] == 1
    assert a["b"] not in states


def test_disconnected_citation_gives_full_weight(tmp_path):
    lines = [
        record_line("p0", 2000, ["a"]),
        record_line("p1", 2001, ["b"], ["p0"]),
    ]
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws)])
    main(["run", "--workspace", str(ws)])
    store = parse_records(lines, Config())
    states = Workspace(ws).read_states(2001, store, Config().config_hash())
    # no path between a and b: weight 1, stored scaled by n = 6
    assert states[store.author_index["a"]] == 6


def test_rerun_is_byte_identical(tmp_path):
    rng = random.Random(19)
    lines = random_corpus_lines(rng, 120, 25, 2000, 2008)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws = tmp_path / "ws"
    assert main(["ingest", str(src), "--workspace", str(ws)]) == 0
    assert main(["run", "--workspace", str(ws)]) == 0
    before = tree_bytes(ws)
    assert main(["run", "--workspace", str(ws)]) == 0
    assert tree_bytes(ws) == before


def test_resume_matches_uninterrupted(tmp_path):
    rng = random.Random(29)
    lines = random_corpus_lines(rng, 150, 30, 2000, 2009)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")

    ws_full = tmp_path / "full"
    main(["ingest", str(src), "--workspace", str(ws_full)])
    main(["run", "--workspace", str(ws_full)])

    ws_part = tmp_path / "part"
    main(["ingest", str(src), "--workspace", str(ws_part)])
    # run the first half, as if the process died mid-way, then resume
    assert main(["run", "--workspace", str(ws_part), "--years", "2000:2004"]) == 0
    assert main(["run", "--workspace", str(ws_part)]) == 0
    assert tree_bytes(ws_part / "ledgers") == tree_bytes(ws_full / "ledgers")
    assert tree_bytes(ws_part / "states") == tree_bytes(ws_full / "states")


def test_run_gap_exits_3(tmp_path, capsys):
    rng = random.Random(3)
    lines = random_corpus_lines(rng, 60, 10, 2000, 2006)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws)])
    assert main(["run", "--workspace", str(ws), "--years", "2003:2006"]) == 3
    assert "snapshot" in capsys.readouterr().err


def test_report_network_stats_table1(table1_file, tmp_path, capsys):
    ws = tmp_path / "ws"
    main(["ingest", str(table1_file), "--workspace", str(ws)])
    assert main(["report", "network-stats", "--workspace", str(ws), "--year", "2018"]) == 0
    path = ws / "reports" / "network-stats.csv"
    rows = path.read_text().splitlines()
    assert rows[0].startswith("year,nodes,edges")
    assert rows[1].startswith("2018,7,8,")
    manifest = json.loads(path.with_suffix(".manifest.json").read_text())
    assert manifest["report"] == "network-stats"
    assert manifest["params"]["year"] == 2018


def test_report_edges(table1_file, tmp_path):
    ws = tmp_path / "ws"
    main(["ingest", str(table1_file), "--workspace", str(ws)])
    main(["report", "edges", "--workspace", str(ws), "--year", "2018"])
    rows = (ws / "reports" / "edges.csv").read_text().splitlines()
    assert rows[0] == "author_a,author_b"
    assert "2,9" in rows and len(rows) == 9


def test_report_index_table_schema(tmp_path):
    rng = random.Random(43)
    lines = random_corpus_lines(rng, 80, 15, 2000, 2006)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    cfg = write_config(tmp_path, exact_distances=True)
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws), "--config", str(cfg)])
    main(["run", "--workspace", str(ws), "--config", str(cfg)])
    assert main(["report", "index-table", "--workspace", str(ws),
                 "--config", str(cfg), "--year", "2006"]) == 0
    rows = (ws / "reports" / "index-table.csv").read_text().splitlines()
    assert rows[0] == "scholar,year,Q,h,g,c,N_w,x"
    assert len(rows) > 1
    # x column is rendered with two decimals
    assert all(r.rsplit(",", 1)[1].count(".") == 1 for r in rows[1:])


def test_index_reports_need_exact_mode(tmp_path, capsys):
    rng = random.Random(47)
    lines = random_corpus_lines(rng, 60, 12, 2000, 2004)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws)])
    main(["run", "--workspace", str(ws)])  # default capped mode
    assert main(["report", "index-table", "--workspace", str(ws), "--year", "2004"]) == 3
    assert "exact" in capsys.readouterr().err


def test_report_before_run_exits_3(table1_file, tmp_path, capsys):
    ws = tmp_path / "ws"
    main(["ingest", str(table1_file), "--workspace", str(ws)])
    assert main(["report", "distance-histogram", "--workspace", str(ws)]) == 3
    assert "run" in capsys.readouterr().err


def test_rank_and_histogram_reports(tmp_path):
    rng = random.Random(53)
    lines = random_corpus_lines(rng, 120, 20, 2000, 2007)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    cfg = write_config(tmp_path, exact_distances=True)
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws), "--config", str(cfg)])
    main(["run", "--workspace", str(ws), "--config", str(cfg)])
    assert main(["report", "rank", "--workspace", str(ws), "--config", str(cfg),
                 "--year", "2007", "--index", "x"]) == 0
    rows = (ws / "reports" / "rank.csv").read_text().splitlines()
    assert rows[0] == "rank,scholar,x,Q"
    positions = [int(r.split(",")[0]) for r in rows[1:]]
    assert positions == list(range(1, len(positions) + 1))

    assert main(["report", "distance-histogram", "--workspace", str(ws),
                 "--config", str(cfg), "--years", "2000:2007"]) == 0
    hist_rows = (ws / "reports" / "distance-histogram.csv").read_text().splitlines()
    assert hist_rows[0] == "year,distance,proportion"

    assert main(["report", "heatmap", "--workspace", str(ws), "--config", str(cfg),
                 "--years", "2000:2007"]) == 0
    heat_rows = (ws / "reports" / "heatmap.csv").read_text().splitlines()
    assert heat_rows[0] == "repeats,distance,pairs"

    assert main(["report", "scatter", "--workspace", str(ws), "--config", str(cfg),
                 "--year", "2007", "--q-max", "1000", "--size", "10"]) == 0
    scatter_rows = (ws / "reports" / "scatter.csv").read_text().splitlines()
    assert scatter_rows[0] == "Q,x"
    for row in scatter_rows[1:]:
        q, x = row.split(",")
        assert float(x) <= float(q)

    assert main(["report", "c-eq-nw", "--workspace", str(ws), "--config", str(cfg),
                 "--year", "2007", "--bins", "0,10,100"]) == 0
    cn_rows = (ws / "reports" / "c-eq-nw.csv").read_text().splitlines()
    assert cn_rows[0] == "q_lo,q_hi,scholars,degenerate,ratio"


def test_pipeline_states_match_index_records(tmp_path):
    """The incremental run and the one-shot snapshot agree exactly."""
    rng = random.Random(61)
    lines = random_corpus_lines(rng, 200, 30, 1998, 2006)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    cfg = Config(exact_distances=True)
    ws = Workspace(tmp_path / "ws")
    store = parse_records(lines, cfg)
    ws.write_corpus(store, cfg)
    run_pipeline(ws, cfg)
    states = ws.read_states(2006, store, cfg.config_hash())
    series = load_series(ws, store, cfg, 2006)
    records = build_index_records(store, series, 2006, cfg)
    by_label = {r.scholar: r for r in records}
    for author, scaled in states.items():
        label = store.author_labels[author]
        assert by_label[label].x == Fraction(scaled, 6)
    for record in records:
        scaled = states.get(store.author_index[record.scholar], 0)
        assert record.x == Fraction(scaled, 6)


def test_jobs_parallel_matches_serial(tmp_path):
    rng = random.Random(67)
    lines = random_corpus_lines(rng, 200, 30, 2000, 2005)
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    ws1 = tmp_path / "ws1"
    ws2 = tmp_path / "ws2"
    main(["ingest", str(src), "--workspace", str(ws1)])
    main(["ingest", str(src), "--workspace", str(ws2)])
    assert main(["run", "--workspace", str(ws1), "--jobs", "1"]) == 0
    assert main(["run", "--workspace", str(ws2), "--jobs", "3"]) == 0
    assert tree_bytes(ws1 / "ledgers") == tree_bytes(ws2 / "ledgers")
    assert tree_bytes(ws1 / "states") == tree_bytes(ws2 / "states")


def test_strict_window_skips_leading_years(tmp_path):
    lines = [
        record_line("p0", 2000, ["a"]),
        record_line("p1", 2001, ["b"], ["p0"]),
        record_line("p2", 2005, ["c"], ["p0"]),
    ]
    src = tmp_path / "c.jsonl"
    src.write_text("\n".join(lines) + "\n")
    cfg = write_config(tmp_path, strict_window=True)
    ws = tmp_path / "ws"
    main(["ingest", str(src), "--workspace", str(ws), "--config", str(cfg)])
    assert main(["run", "--workspace", str(ws), "--config", str(cfg)]) == 0
    workspace = Workspace(ws)
    # first full window ends at 2004: years 2000-2003 are not processed
    assert not workspace.ledger_path(2001).exists()
    assert workspace.ledger_path(2004).exists()
    assert workspace.ledger_path(2005).exists()
