"""Run configuration: plain ``key=value`` files overridden by CLI flags."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError
from .mollifier import DEFAULT_SUPPORT_CAP, Thresholds


@dataclass
class RunConfig:
    cache_dir: Path | None = None
    precision_bits: int = 128
    mollifier_M: int = 1
    mollifier_A: float = 1.0
    support_cap: int = DEFAULT_SUPPORT_CAP
    thread_count: int | str = 1
    output_format: str = "csv"
    thresholds: Thresholds = field(default_factory=Thresholds)

    def validate(self) -> "RunConfig":
        if self.precision_bits < 64:
            raise DomainError("precision_bits must be >= 64")
        if self.mollifier_M < 1 or self.mollifier_A <= 0 or self.support_cap < 1:
            raise DomainError("mollifier.M, mollifier.A and support_cap must be positive")
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"output_format must be csv or json, got {self.output_format!r}")
        if self.thread_count != "auto" and (not isinstance(self.thread_count, int) or self.thread_count < 1):
            raise DomainError("thread_count must be a positive integer or 'auto'")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            if not os.access(self.cache_dir, os.W_OK):
                raise DomainError(f"cache_dir {self.cache_dir} is not writable")
        return self

    @property
    def workers(self) -> int:
        if self.thread_count == "auto":
            return os.cpu_count() or 1
        return int(self.thread_count)


_KEYS = {
    "cache_dir": ("cache_dir", Path),
    "precision_bits": ("precision_bits", int),
    "mollifier.M": ("mollifier_M", int),
    "mollifier.A": ("mollifier_A", float),
    "mollifier.support_cap": ("support_cap", int),
    "support_cap": ("support_cap", int),
    "thread_count": ("thread_count", lambda v: v if v == "auto" else int(v)),
    "output_format": ("output_format", str),
}


def _parse_thresholds(text: str) -> Thresholds:
    vals = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, _, val = part.partition(":") if ":" in part else part.partition("=")
        key = key.strip()
        if key not in {f.name for f in dataclasses.fields(Thresholds)}:
            raise DomainError(f"unknown classify threshold {key!r}")
        vals[key] = float(val)
    return Thresholds(**vals)


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = dataclasses.replace(base) if base else RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep:
            raise DomainError(f"config line {lineno}: expected key=value")
        if key == "classify.threshold_overrides":
            cfg.thresholds = _parse_thresholds(val)
            continue
        if key not in _KEYS:
            raise DomainError(f"config line {lineno}: unknown key {key!r}")
        attr, conv = _KEYS[key]
        try:
            setattr(cfg, attr, conv(val))
        except ValueError as exc:
            raise DomainError(f"config line {lineno}: bad value for {key}: {val!r}") from exc
    return cfg


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    """Defaults, then the file at ``path`` (if any), then ``CACHE_DIR``."""
    cfg = RunConfig()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read config {path}: {exc}") from exc
        cfg = parse_config_text(text, cfg)
    env = os.environ.get("CACHE_DIR")
    if env:
        cfg.cache_dir = Path(env)
    return cfg
