"""Deterministic session reconstruction from an event log.

Replay feeds recorded events through the exact apply path a live session
uses, with provider calls disabled: responses come from the log (and its
blob sidecar), so the rebuilt snapshot is a pure function of the recorded
inputs. When mock scripts are supplied, the scripted providers are invoked
at the same points a live session would have called them, and any divergence
between scripted output and logged output raises ReplayMismatch — this is
how a recorded session proves it is reproducible.
"""

from pathlib import Path

from .config import ServiceConfig
from .errors import CorruptLog
from .eventlog import BlobStore, SessionEvent, read_log
from .providers.mock import MockScripts, build_mock_providers
from .session import SESSION_START, Session

LOG_FILENAME = "events.ndjson"
BLOB_DIRNAME = "blobs"


def replay_records(records: list[SessionEvent], blobs: BlobStore,
                   scripts: MockScripts | None = None) -> Session:
    """Rebuild a session from in-memory records; returns the final Session."""
    if not records:
        raise CorruptLog("empty event log", seq=0)
    if records[0].kind != SESSION_START:
        raise CorruptLog(f"log must start with {SESSION_START}", seq=0)
    header = records[0].payload
    config = ServiceConfig.from_dict(header["config"])
    verify = build_mock_providers(scripts) if scripts is not None else None
    session = Session(
        config,
        providers=None,
        session_id=header["session_id"],
        replay_mode=True,
        blob_store=blobs,
        verify_providers=verify,
    )
    for record in records:
        session.apply_record(record)
    return session


def replay_dir(log_dir: str | Path, scripts: MockScripts | None = None) -> Session:
    """Rebuild a session from a persisted log directory."""
    root = Path(log_dir)
    records = read_log(root / LOG_FILENAME)
    blobs = BlobStore(root / BLOB_DIRNAME)
    return replay_records(records, blobs, scripts)


def replay_path(path: str | Path, scripts: MockScripts | None = None) -> Session:
    """Accepts either a log directory or a direct path to the log file."""
    p = Path(path)
    if p.is_dir():
        return replay_dir(p, scripts)
    blobs_dir = p.parent / BLOB_DIRNAME
    return replay_records(read_log(p), BlobStore(blobs_dir), scripts)
