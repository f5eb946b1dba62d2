"""Canonical JSON serialization.

Every JSON document the service and CLI emit goes through
:func:`canonical_json` so that identical inputs produce byte-identical
output: keys sorted, minimal separators, no NaN/Infinity (undefined
numeric results must be ``None`` before serialization).
"""

import json
import math


def _reject_nonfinite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite float {obj!r} in JSON payload; use None instead")
    if isinstance(obj, dict):
        for v in obj.values():
            _reject_nonfinite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _reject_nonfinite(v)


def canonical_json(payload) -> str:
    """Serialize ``payload`` deterministically (sorted keys, compact separators)."""
    _reject_nonfinite(payload)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_json_bytes(payload) -> bytes:
    return canonical_json(payload).encode("utf-8")
