"""Append-only session event log with blob sidecar.

One newline-delimited JSON record per event: {"seq", "t_ms", "kind",
"payload"}. Binary payloads (audio PCM, PNG rasters) never go inline; they
are written to a content-addressed sidecar directory and referenced by hash,
which keeps the log human-diffable and replay byte-stable.

A reader treats a record as corrupt when its seq breaks density or its JSON
is undecodable — except for a torn trailing line without a newline, which is
what a crash mid-append leaves behind and is silently dropped.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CorruptLog
from .serialize import canonical_json, sha256_hex


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_ms: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "t_ms": self.t_ms, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionEvent":
        return cls(seq=raw["seq"], t_ms=raw["t_ms"], kind=raw["kind"], payload=raw["payload"])


class BlobStore:
    """Content-addressed binary storage; in-memory unless given a directory."""

    def __init__(self, root: str | Path | None = None):
        self._memory: dict[str, bytes] = {}
        self._root = Path(root) if root is not None else None
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes) -> str:
        blob_id = sha256_hex(data)
        if blob_id not in self._memory:
            self._memory[blob_id] = data
            if self._root is not None:
                path = self._root / blob_id
                if not path.exists():
                    path.write_bytes(data)
        return blob_id

    def get(self, blob_id: str) -> bytes:
        if blob_id in self._memory:
            return self._memory[blob_id]
        if self._root is not None:
            path = self._root / blob_id
            if path.exists():
                data = path.read_bytes()
                self._memory[blob_id] = data
                return data
        raise CorruptLog(f"missing blob {blob_id}")

    def has(self, blob_id: str) -> bool:
        try:
            self.get(blob_id)
            return True
        except CorruptLog:
            return False


class EventLog:
    """Ordered records, appended before their effects are applied."""

    def __init__(self, sink_path: str | Path | None = None):
        self.records: list[SessionEvent] = []
        self._sink_path = Path(sink_path) if sink_path is not None else None
        self._sink = None
        if self._sink_path is not None:
            self._sink_path.parent.mkdir(parents=True, exist_ok=True)
            self._sink = open(self._sink_path, "a", encoding="utf-8")

    def append(self, kind: str, payload: dict, t_ms: int) -> SessionEvent:
        event = SessionEvent(seq=len(self.records), t_ms=t_ms, kind=kind, payload=payload)
        self.records.append(event)
        if self._sink is not None:
            self._sink.write(canonical_json(event.to_dict()) + "\n")
            self._sink.flush()
        return event

    def close(self) -> None:
        if self._sink is not None:
            self._sink.close()
            self._sink = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def read_log(path: str | Path) -> list[SessionEvent]:
    """Parse a log file, enforcing dense seq from 0.

    Raises CorruptLog naming the offending seq on a gap or undecodable
    record; tolerates exactly one torn (unterminated) trailing line.
    """
    raw = Path(path).read_text(encoding="utf-8")
    lines = raw.split("\n")
    torn_tail = lines and lines[-1] != ""
    if not torn_tail:
        lines = lines[:-1]
    events: list[SessionEvent] = []
    for i, line in enumerate(lines):
        is_last = i == len(lines) - 1
        if not line:
            if is_last:
                continue
            raise CorruptLog(f"blank record at line {i + 1}", seq=len(events))
        try:
            record = json.loads(line)
            event = SessionEvent.from_dict(record)
        except (ValueError, KeyError, TypeError) as exc:
            if is_last and torn_tail:
                break  # torn write from a crash; prefix is still valid
            raise CorruptLog(f"undecodable record at line {i + 1}: {exc}",
                             seq=len(events)) from exc
        if event.seq != len(events):
            raise CorruptLog(
                f"seq gap: expected {len(events)}, found {event.seq} at line {i + 1}",
                seq=len(events),
            )
        events.append(event)
    return events


def write_log(path: str | Path, events: list[SessionEvent]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(canonical_json(event.to_dict()) + "\n")
