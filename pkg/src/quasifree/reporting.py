"""Deterministic CSV/JSON emission with provenance headers."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .policy import DEFAULT_POLICY


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def header_lines(chash=None, policy=DEFAULT_POLICY, extra=None):
    lines = []
    if chash is not None:
        lines.append(f"# config_sha256: {chash}")
    lines.append(f"# policy: {canonical_json(policy.as_dict())}")
    for k, v in (extra or {}).items():
        lines.append(f"# {k}: {v}")
    return lines


def csv_text(columns, rows, chash=None, policy=DEFAULT_POLICY, extra=None) -> str:
    out = header_lines(chash, policy, extra)
    out.append(",".join(columns))
    for r in rows:
        out.append(",".join(fmt(v) for v in r))
    return "\n".join(out) + "\n"


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_text(path, text):
    Path(path).write_text(text)
