"""Engine configuration.

Config files are plain text, one ``key = value`` per line, ``#`` comments
allowed.  Recognized keys and defaults:

    year_start      = 1000    # papers outside [year_start, year_end] are skipped
    year_end        = 9999
    window_length   = 5       # co-authorship window, in years
    n               = 6       # weight mapping threshold (citations at distance >= n weigh 1)
    alpha           = 1       # slope used by the c-index
    exact_distances = false   # true: exact distances (required for c-index / N_w reports);
                              # false: breadth-first search capped at n (x-index only)
    strict_window   = false   # true: the pipeline skips years without a full window;
                              # false: the window is truncated at the corpus start

Every persisted artifact records the hash of the configuration that
produced it, so stages can detect stale or mismatched state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .errors import CiteDistError

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


class ConfigError(CiteDistError):
    """Malformed configuration file or invalid value."""


@dataclass(frozen=True)
class Config:
    year_start: int = 1000
    year_end: int = 9999
    window_length: int = 5
    n: int = 6
    alpha: Fraction = Fraction(1)
    exact_distances: bool = False
    strict_window: bool = False

    def __post_init__(self):
        if self.year_start > self.year_end:
            raise ConfigError("year_start must not exceed year_end")
        if self.window_length < 1:
            raise ConfigError("window_length must be >= 1")
        if self.n < 0:
            raise ConfigError("n must be >= 0")
        if self.alpha <= 0:
            raise ConfigError("alpha must be > 0")

    @property
    def distance_cap(self) -> int | None:
        """Search cap for the yearly distance batch; None means exact."""
        return None if self.exact_distances else self.n

    def canonical_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def parse_config_text(text: str) -> Config:
    known = {f.name: f for f in fields(Config)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value, lineno)
    return Config(**values)


def _convert(key: str, value: str, lineno: int):
    try:
        if key in ("year_start", "year_end", "window_length", "n"):
            return int(value)
        if key == "alpha":
            return Fraction(value)
        if key in ("exact_distances", "strict_window"):
            word = value.lower()
            if word not in _BOOL_WORDS:
                raise ValueError(value)
            return _BOOL_WORDS[word]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"line {lineno}: bad value {value!r} for {key}") from None
    raise ConfigError(f"line {lineno}: unknown key {key!r}")


def load_config(path: str | Path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)
