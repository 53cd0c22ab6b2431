"""Flat ``key = value`` and JSON renderings of result records, and their readers."""

from __future__ import annotations

import json
import math


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_kv(record: dict) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in record.items())


def _coerce(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_kv(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a key = value line: {line!r}")
        out[key.strip()] = _coerce(value.strip())
    return out


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def format_json(record: dict) -> str:
    return json.dumps({k: _json_safe(v) for k, v in record.items()}, indent=2, sort_keys=False) + "\n"


def parse_report(text: str) -> dict:
    """Read back either rendering."""
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return json.loads(text)
    return parse_kv(text)
