"""
Compute configuration fingerprints.

Every metrics record and checkpoint carries the hash of the configuration that
produced it, so results can be traced back to their exact inputs.
"""

import hashlib
import json
from typing import Any, Dict


def canonicalize(data: Any) -> Any:
    """Canonicalize a config value for consistent hashing.

    - Sorts dict keys
    - Converts tuples to lists
    """
    if isinstance(data, dict):
        return {str(k): canonicalize(data[k]) for k in sorted(data.keys())}
    if isinstance(data, (list, tuple)):
        return [canonicalize(v) for v in data]
    return data


def canonical_json(data: Any) -> str:
    """Stable JSON representation (sorted keys, compact separators)."""
    return json.dumps(canonicalize(data), sort_keys=True, separators=(',', ':'))


def compute_config_fingerprint(config_data: Dict[str, Any]) -> str:
    """SHA-256 hex digest of the canonical JSON form of a config dict."""
    return hashlib.sha256(canonical_json(config_data).encode('utf-8')).hexdigest()


def git_blob_hash(content: bytes) -> str:
    """Content hash computed the way `git hash-object` does for a blob."""
    header = f"blob {len(content)}\0".encode('utf-8')
    return hashlib.sha1(header + content).hexdigest()
