"""Canonical JSON and content hashing.

All persisted state (documents, snapshots, log records) goes through
``canonical_json`` so that equal values always produce the same bytes:
sorted keys, no whitespace, no ASCII escaping of non-ASCII text.
"""

import hashlib
import json


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest(obj) -> str:
    """Hex digest of an object's canonical serialization."""
    return sha256_hex(canonical_bytes(obj))
