"""Analysis configuration from key=value files and CLI flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from lexeff.frontier import default_beta_grid
from lexeff.lexicon import (HEAD_FINAL, HEAD_INITIAL, LENGTH_ORTHOGRAPHIC,
                            LENGTH_PROVIDED)


class ConfigError(ValueError):
    """A configuration value or key is invalid."""


def parse_beta_grid(text: str) -> tuple[float, ...]:
    """Grid spec: "start:stop:step" or an explicit comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            return default_beta_grid(float(start_s), float(stop_s), float(step_s))
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"invalid beta grid spec {text!r}: {exc}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"invalid boolean value {text!r}")


def _parse_separator(text: str) -> str:
    # A bare space does not survive key=value stripping; accept the token.
    if text == "space":
        return " "
    return text


@dataclass
class AnalysisConfig:
    """Everything a pipeline run needs: inputs, model knobs, outputs."""

    concepts: Path | None = None
    embeddings: Path | None = None
    lexicon: Path | None = None
    encoding: Path | None = None
    taxonomy: Path | None = None
    antonyms: Path | None = None
    gamma: float = 10.0
    beta_grid: tuple[float, ...] = field(default_factory=default_beta_grid)
    separator: str = " "
    head_position: str = HEAD_FINAL
    length_mode: str = LENGTH_ORTHOGRAPHIC
    mode: str = "corpus"
    smoothing: bool = True
    k: int = 5
    replicates: int = 100_000
    seed: int = 0
    bootstrap_resamples: int = 1000
    search_mode: str = "greedy"
    threads: int = 1
    out_dir: Path = Path("lexeff-out")
    plot: bool = False

    def validate(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.bootstrap_resamples < 1:
            raise ConfigError("bootstrap_resamples must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not (-2**63 <= self.seed < 2**63):
            raise ConfigError("seed must fit in 64 bits")
        if len(self.separator) != 1:
            raise ConfigError("separator must be a single character")
        if self.head_position not in (HEAD_FINAL, HEAD_INITIAL):
            raise ConfigError(f"unknown head_position {self.head_position!r}")
        if self.length_mode not in (LENGTH_ORTHOGRAPHIC, LENGTH_PROVIDED):
            raise ConfigError(f"unknown length_mode {self.length_mode!r}")
        if self.mode not in ("corpus", "relabeled"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.search_mode not in ("greedy", "exhaustive"):
            raise ConfigError(f"unknown search_mode {self.search_mode!r}")
        grid = self.beta_grid
        if not grid or any(b < 0 for b in grid) or \
                any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
            raise ConfigError("beta grid must be strictly increasing and >= 0")
        return self


_PARSERS = {
    "concepts": Path,
    "embeddings": Path,
    "lexicon": Path,
    "encoding": Path,
    "taxonomy": Path,
    "antonyms": Path,
    "gamma": float,
    "beta_grid": parse_beta_grid,
    "separator": _parse_separator,
    "head_position": str,
    "length_mode": str,
    "mode": str,
    "smoothing": _parse_bool,
    "k": int,
    "replicates": int,
    "seed": int,
    "bootstrap_resamples": int,
    "search_mode": str,
    "threads": int,
    "out_dir": Path,
    "plot": _parse_bool,
}


def read_config_file(path) -> dict[str, str]:
    """key=value lines, '#' comments; unknown keys are rejected by name."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in _PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def build_config(file_values: dict[str, str] | None = None,
                 overrides: dict | None = None) -> AnalysisConfig:
    """Merge config-file values and already-typed overrides over defaults."""
    config = AnalysisConfig()
    known = {f.name for f in fields(AnalysisConfig)}
    for key, raw in (file_values or {}).items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            setattr(config, key, _PARSERS[key](raw))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key!r}: {raw!r} ({exc})") from None
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(config, key, value)
    return config.validate()
