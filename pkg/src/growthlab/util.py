"""Small shared helpers: canonical JSON, digests, seed derivation."""

import hashlib
import json

import numpy as np


def _plain(obj):
    """Convert numpy scalars/arrays to plain python values for JSON."""
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Canonical JSON text: sorted keys, no whitespace, round-trip floats."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_hex(data) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def digest_of(obj) -> str:
    """SHA-256 of the canonical JSON form of `obj`."""
    return sha256_hex(canonical_json(obj))


def derive_seed(base: int, *keys: int) -> int:
    """Stable 64-bit sub-seed from a base seed and integer keys.

    Built on numpy's SeedSequence so parallel path draws never share a
    stream: derive_seed(s, i) != derive_seed(s, j) for i != j.
    """
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])
