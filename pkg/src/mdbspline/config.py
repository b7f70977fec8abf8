"""JSON space configuration files.

::

    {
      "segments": [{"degree": 3, "knots": [0, 0, 0, 0, 2, 2, 2, 2]}, ...],
      "continuity": [2, 2],
      "periodic_order": 3,
      "origin": 0.0
    }

``periodic_order`` and ``origin`` are optional. Unknown keys are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .core_bspline import OpenKnotVector
from .errors import ConfigError
from .md_space import SegmentConfiguration

TOP_KEYS = {"segments", "continuity", "periodic_order", "origin"}
SEGMENT_KEYS = {"degree", "knots"}


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _real(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def config_from_dict(doc: Any) -> SegmentConfiguration:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ConfigError(f"top level: unknown field(s) {sorted(unknown)}")
    for key in ("segments", "continuity"):
        if key not in doc:
            raise ConfigError(f"top level: missing field '{key}'")

    if not isinstance(doc["segments"], list) or not doc["segments"]:
        raise ConfigError("segments: expected a non-empty array")
    segments = []
    for i, seg in enumerate(doc["segments"]):
        where = f"segments[{i}]"
        if not isinstance(seg, dict):
            raise ConfigError(f"{where}: expected an object")
        unknown = set(seg) - SEGMENT_KEYS
        if unknown:
            raise ConfigError(f"{where}: unknown field(s) {sorted(unknown)}")
        missing = SEGMENT_KEYS - set(seg)
        if missing:
            raise ConfigError(f"{where}: missing field(s) {sorted(missing)}")
        degree = _int(seg["degree"], f"{where}.degree")
        if not isinstance(seg["knots"], list):
            raise ConfigError(f"{where}.knots: expected an array")
        knots = [_real(u, f"{where}.knots[{j}]") for j, u in enumerate(seg["knots"])]
        try:
            segments.append(OpenKnotVector(knots, degree))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None

    if not isinstance(doc["continuity"], list):
        raise ConfigError("continuity: expected an array")
    continuity = [_int(k, f"continuity[{j}]") for j, k in enumerate(doc["continuity"])]
    periodic = doc.get("periodic_order")
    if periodic is not None:
        periodic = _int(periodic, "periodic_order")
    origin = _real(doc.get("origin", 0.0), "origin")
    try:
        return SegmentConfiguration(tuple(segments), tuple(continuity), origin, periodic)
    except ConfigError as exc:
        raise ConfigError(f"configuration: {exc}") from None


def config_to_dict(cfg: SegmentConfiguration) -> dict:
    doc: dict[str, Any] = {
        "segments": [{"degree": s.degree, "knots": s.knots.tolist()} for s in cfg.segments],
        "continuity": list(cfg.continuity),
    }
    if cfg.periodic:
        doc["periodic_order"] = cfg.periodic_order
    if cfg.origin != 0.0:
        doc["origin"] = cfg.origin
    return doc


def load_config(path) -> SegmentConfiguration:
    """Read a configuration file; raises :class:`ConfigError` (or ``OSError``)."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def save_config(path, cfg: SegmentConfiguration) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
