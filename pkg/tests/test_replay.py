import random

import pytest

from conftest import draw_stroke, make_session, pcm_chunk
from driver import run_random_session
from sketchloop import Session
from sketchloop.errors import CorruptLog, ReplayMismatch
from sketchloop.eventlog import BlobStore, SessionEvent, read_log
from sketchloop.providers import MockScripts, build_mock_providers
from sketchloop.replay import replay_dir, replay_records


def scripted_session(log_dir=None):
    scripts = MockScripts(transcribe={"0": [
        {"after_chunks": 2, "text": "thinking of something", "status": "INTERIM"},
        {"after_chunks": 4, "text": "thinking of something bold", "status": "FINAL"},
    ]})
    session = make_session(build_mock_providers(scripts), log_dir=log_dir)
    draw_stroke(session, [(3, 3), (40, 30), (80, 60)])
    for seq in range(4):
        session.handle("audio_chunk", {"seq": seq}, samples=pcm_chunk(40))
    session.handle("open_chatbot", {})
    session.handle("edit_transcript", {"text": "bold and square with a dial"})
    session.handle("chat_submit", {"mode": "TEXT", "text": "ideas?"})
    session.handle("chat_submit", {"mode": "IMAGE", "text": "render it",
                                   "attachment": [0, 0, 60, 50]})
    image_ref = session.history.turns[-1].image_ref
    session.handle("export_image", {"artifact_id": image_ref, "region": [5, 5, 60, 50]})
    session.handle("close_chatbot", {})
    draw_stroke(session, [(10, 70), (30, 80)])
    return session, scripts


def test_replay_matches_live_snapshot():
    session, _ = scripted_session()
    rebuilt = replay_records(session.log.records, session.blobs)
    assert rebuilt.snapshot_bytes() == session.snapshot_bytes()


def test_replay_is_deterministic():
    session, _ = scripted_session()
    a = replay_records(session.log.records, session.blobs).snapshot_bytes()
    b = replay_records(session.log.records, session.blobs).snapshot_bytes()
    assert a == b


def test_replay_from_disk(tmp_path):
    session, scripts = scripted_session(log_dir=str(tmp_path / "sess"))
    session.close()
    rebuilt = replay_dir(tmp_path / "sess", scripts)
    assert rebuilt.snapshot_bytes() == session.snapshot_bytes()


def test_replay_with_scripts_reproduces_provider_requests():
    session, scripts = scripted_session()
    live_fps = ([c.fingerprint for c in session.providers.insight.captured],
                [c.fingerprint for c in session.providers.chat_text.captured],
                [c.fingerprint for c in session.providers.chat_image.captured])
    rebuilt = replay_records(session.log.records, session.blobs, scripts)
    verify = rebuilt._verify
    replay_fps = ([c.fingerprint for c in verify.insight.captured],
                  [c.fingerprint for c in verify.chat_text.captured],
                  [c.fingerprint for c in verify.chat_image.captured])
    assert live_fps == replay_fps


def test_replay_detects_tampered_response():
    session, scripts = scripted_session()
    records = list(session.log.records)
    idx, original = next((i, r) for i, r in enumerate(records)
                         if r.kind == "insight_response")
    payload = dict(original.payload)
    payload["text"] = "forged response text"
    records[idx] = SessionEvent(original.seq, original.t_ms, original.kind, payload)
    with pytest.raises(ReplayMismatch):
        replay_records(records, session.blobs, scripts)


def test_replay_detects_tampered_request_inputs():
    session, _ = scripted_session()
    records = list(session.log.records)
    idx, original = next((i, r) for i, r in enumerate(records)
                         if r.kind == "insight_request")
    payload = dict(original.payload)
    payload["user_text"] = "not what the transcript said"
    records[idx] = SessionEvent(original.seq, original.t_ms, original.kind, payload)
    with pytest.raises(ReplayMismatch):
        replay_records(records, session.blobs)


def test_replay_requires_session_start():
    session, _ = scripted_session()
    with pytest.raises(CorruptLog):
        replay_records(session.log.records[1:], session.blobs)
    with pytest.raises(CorruptLog):
        replay_records([], BlobStore())


def test_truncated_prefix_replay_matches_live_state():
    # log-before-effect: state at any record boundary is reproducible
    snapshots = []

    class Snapshotting(Session):
        def _apply(self, event):
            super()._apply(event)
            snapshots.append(self.snapshot_bytes())

    providers = build_mock_providers()
    session = make_session(providers)
    session.__class__ = Snapshotting  # capture from here on
    snapshots.append(session.snapshot_bytes())  # after session_start only

    draw_stroke(session, [(1, 1), (30, 30)])
    session.handle("audio_chunk", {"seq": 0}, samples=pcm_chunk(30))
    session.handle("open_chatbot", {})
    session.handle("chat_submit", {"mode": "TEXT", "text": "hello"})
    records = session.log.records
    assert len(snapshots) == len(records)

    rng = random.Random(17)
    cuts = sorted(rng.sample(range(1, len(records) + 1), min(12, len(records))))
    for cut in cuts:
        rebuilt = replay_records(records[:cut], session.blobs)
        assert rebuilt.snapshot_bytes() == snapshots[cut - 1], f"prefix {cut} diverged"


def test_random_sessions_replay_byte_identical():
    for seed in (5, 6, 7):
        session = run_random_session(seed, steps=80)
        rebuilt = replay_records(session.log.records, session.blobs)
        assert rebuilt.snapshot_bytes() == session.snapshot_bytes()


def test_torn_log_tail_replays_as_prefix(tmp_path):
    session, _ = scripted_session(log_dir=str(tmp_path / "s"))
    session.close()
    log_file = tmp_path / "s" / "events.ndjson"
    data = log_file.read_bytes()
    log_file.write_bytes(data + b'{"seq": 9999, "t_ms": 1, "kin')
    events = read_log(log_file)
    assert len(events) == len(session.log.records)
    rebuilt = replay_records(events, session.blobs)
    assert rebuilt.snapshot_bytes() == session.snapshot_bytes()
