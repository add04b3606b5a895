"""Canonical JSON: sorted keys, minimal separators, trailing newline.

Fixed formatting makes result documents diffable: identical inputs must
produce byte-identical files across processes and platforms. Floats use
repr (shortest round-trip form), which is stable for IEEE doubles.
"""

from __future__ import annotations

import hashlib
import json


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def canonical_json_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def digest(obj) -> str:
    return hashlib.sha256(canonical_json_bytes(obj)).hexdigest()
