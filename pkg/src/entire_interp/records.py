"""Canonical JSON documents for configurations and stage records."""

from __future__ import annotations

import json
import os
from pathlib import Path

from .exact_algebra import Poly
from .stage_builder import ConfigError, ConstructionConfig, ConstructionState, StageRecord, base_function

FORMAT = "entire-interp-records/1"


def dumps(obj) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def write_json(path, obj) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(obj))
    os.replace(tmp, path)


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def records_document(state: ConstructionState) -> dict:
    cfg = state.config
    return {
        "format": FORMAT,
        "config": cfg.to_json(),
        "base": base_function(cfg.x_p, cfg.y_p).to_json(),
        "stages": [r.to_json() for r in state.records],
    }


def load_records(doc: dict) -> tuple[ConstructionConfig, Poly, list[StageRecord]]:
    """Parse a records document; raises ConfigError on malformed content."""
    if not isinstance(doc, dict) or "stages" not in doc or "config" not in doc:
        raise ConfigError("not a records document (missing config or stages)")
    cfg = ConstructionConfig.from_json(doc["config"])
    try:
        base = Poly.from_json(doc["base"], "base")
        stages = [StageRecord.from_json(s) for s in doc["stages"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed records: {exc}") from None
    return cfg, base, stages


def load_config(path) -> ConstructionConfig:
    try:
        data = read_json(path)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return ConstructionConfig.from_json(data)
