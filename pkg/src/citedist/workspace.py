"""On-disk workspace shared by the pipeline stages.

Layout under the workspace root:

    corpus.jsonl          normalized corpus snapshot (canonical format)
    corpus.meta.json      validation summary + corpus/config hashes
    ledgers/<year>.jsonl  per-year distance ledgers
    states/<year>.jsonl   per-year x-index state snapshots (append-only history)
    reports/              CSV reports with JSON manifests

Artifacts embed the hash of the configuration that produced them and
are written atomically (temp file + rename), so an interrupted stage
never leaves a half-written year behind and re-running a stage with the
same inputs produces byte-identical files.  State snapshots store x
scaled by n as an exact integer.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .config import Config
from .corpus import CorpusStore, load_corpus
from .distances import YearLedger
from .errors import WorkspaceError
from .indices import x_scale


def _atomic_write(path: Path, writer) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fp:
        writer(fp)
    os.replace(tmp, path)


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.corpus_path = self.root / "corpus.jsonl"
        self.meta_path = self.root / "corpus.meta.json"
        self.ledger_dir = self.root / "ledgers"
        self.state_dir = self.root / "states"
        self.report_dir = self.root / "reports"

    def ensure_dirs(self) -> None:
        for d in (self.root, self.ledger_dir, self.state_dir, self.report_dir):
            d.mkdir(parents=True, exist_ok=True)

    # -- corpus snapshot -------------------------------------------------

    def write_corpus(self, store: CorpusStore, cfg: Config) -> dict:
        self.ensure_dirs()
        _atomic_write(self.corpus_path, store.dump)
        digest = hashlib.sha256(self.corpus_path.read_bytes()).hexdigest()
        lo, hi = store.year_span()
        meta = {
            "summary": store.summary.as_dict(),
            "corpus_sha256": digest,
            "config": cfg.config_hash(),
            "year_min": lo,
            "year_max": hi,
        }
        _atomic_write(self.meta_path, lambda fp: fp.write(json.dumps(meta, indent=2, sort_keys=True) + "\n"))
        return meta

    def load_meta(self) -> dict:
        if not self.meta_path.exists():
            raise WorkspaceError(f"no ingested corpus in {self.root}; run 'ingest' first")
        return json.loads(self.meta_path.read_text(encoding="utf-8"))

    def load_store(self, cfg: Config) -> CorpusStore:
        if not self.corpus_path.exists():
            raise WorkspaceError(f"no ingested corpus in {self.root}; run 'ingest' first")
        return load_corpus(self.corpus_path, cfg)

    def corpus_hash(self) -> str:
        return self.load_meta()["corpus_sha256"]

    # -- ledgers ---------------------------------------------------------

    def ledger_path(self, year: int) -> Path:
        return self.ledger_dir / f"{year}.jsonl"

    def write_ledger(self, ledger: YearLedger, store: CorpusStore, config_hash: str) -> None:
        _atomic_write(self.ledger_path(ledger.year), lambda fp: ledger.write(fp, store, config_hash))

    def read_ledger(self, year: int, store: CorpusStore, config_hash: str) -> YearLedger | None:
        """The year's ledger, or None when absent or built by another config."""
        path = self.ledger_path(year)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fp:
            ledger, recorded = YearLedger.read(fp, store)
        if recorded != config_hash:
            return None
        return ledger

    # -- x-index states ---------------------------------------------------

    def state_path(self, year: int) -> Path:
        return self.state_dir / f"{year}.jsonl"

    def write_states(self, year: int, states: dict[int, int], store: CorpusStore,
                     cfg: Config, config_hash: str) -> None:
        """Snapshot the running x of every scholar with x > 0 after ``year``."""

        def writer(fp):
            head = {
                "kind": "header",
                "year": year,
                "n": cfg.n,
                "scale": x_scale(cfg.n),
                "config": config_hash,
            }
            fp.write(json.dumps(head, sort_keys=True) + "\n")
            for author in sorted(states):
                if states[author]:
                    obj = {"kind": "state", "id": store.author_labels[author], "xn": states[author]}
                    fp.write(json.dumps(obj, sort_keys=True) + "\n")

        _atomic_write(self.state_path(year), writer)

    def read_states(self, year: int, store: CorpusStore, config_hash: str) -> dict[int, int] | None:
        path = self.state_path(year)
        if not path.exists():
            return None
        states: dict[int, int] = {}
        with open(path, encoding="utf-8") as fp:
            head = json.loads(next(fp))
            if head.get("config") != config_hash:
                return None
            for line in fp:
                obj = json.loads(line)
                states[store.author_index[obj["id"]]] = obj["xn"]
        return states

    def year_complete(self, year: int) -> bool:
        return self.ledger_path(year).exists() and self.state_path(year).exists()

    def completed_years(self) -> list[int]:
        years = []
        for path in self.ledger_dir.glob("*.jsonl"):
            try:
                year = int(path.stem)
            except ValueError:
                continue
            if self.state_path(year).exists():
                years.append(year)
        return sorted(years)

    # -- reports -----------------------------------------------------------

    def write_report(self, name: str, rows: list[str], manifest: dict,
                     out: str | Path | None = None) -> Path:
        self.ensure_dirs()
        path = Path(out) if out else self.report_dir / f"{name}.csv"
        _atomic_write(path, lambda fp: fp.write("\n".join(rows) + "\n"))
        manifest_path = path.with_suffix(".manifest.json")
        _atomic_write(
            manifest_path,
            lambda fp: fp.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n"),
        )
        return path
