"""Run configuration shared by the CLI and the property suites."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

DEFAULT_SEED = 42
SEED_ENV = "LOCEFF_SEED"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    step_bound: int = 10_000
    size_factor: int = 4
    oracle_depth: int = 3
    universe_cap: int = 100_000
    seed: int = DEFAULT_SEED
    output: str = "human"
    corpus_count: int = 1000
    adequacy_count: int = 500
    square_count: int = 200
    size_budget: int = 12

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "output":
                if v not in ("human", "json"):
                    raise ConfigError(f"output must be 'human' or 'json', not {v!r}")
            elif f.name != "seed" and (not isinstance(v, int) or v <= 0):
                raise ConfigError(f"{f.name} must be a positive integer, not {v!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, not {self.seed!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: Optional[str | Path] = None, env: Optional[dict] = None, **overrides) -> Config:
    """Defaults, then a JSON file, then ``LOCEFF_SEED``, then explicit overrides."""
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        known = {f.name for f in fields(Config)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"{path}: unknown keys {unknown}")
    if SEED_ENV in env:
        try:
            data["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, not {env[SEED_ENV]!r}") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    return replace(Config(), **data)
