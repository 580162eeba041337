import pytest

from sketchloop.errors import (
    AlreadyOpen,
    GapInSequence,
    InputBlocked,
    InvalidAction,
    NotOpen,
    NotRecording,
    StaleSegment,
)
from sketchloop.speech import (
    SegmentStatus,
    SessionPhase,
    SpeechState,
    TextSource,
    Transcript,
    validate_pcm_chunk,
)


def test_sketch_activity_starts_recording():
    s = SpeechState()
    assert s.sketch_activity() is True
    assert s.phase is SessionPhase.SKETCHING_RECORDING
    assert s.recording_active
    assert s.segment_index == 0


def test_sketch_activity_idempotent_while_recording():
    s = SpeechState()
    s.sketch_activity()
    assert s.sketch_activity() is False
    assert s.segment_index == 0


def test_sketch_blocked_while_chatbot_open():
    s = SpeechState()
    s.open_chatbot()
    with pytest.raises(InputBlocked):
        s.sketch_activity()


def test_open_chatbot_stops_recording():
    s = SpeechState()
    s.sketch_activity()
    assert s.open_chatbot() is True
    assert s.phase is SessionPhase.CHATBOT_OPEN
    assert not s.recording_active


def test_open_chatbot_twice():
    s = SpeechState()
    s.open_chatbot()
    with pytest.raises(AlreadyOpen):
        s.open_chatbot()


def test_close_requires_open():
    s = SpeechState()
    with pytest.raises(NotOpen):
        s.close_chatbot()


def test_close_then_sketch_opens_fresh_segment():
    s = SpeechState()
    s.sketch_activity()
    s.accept_chunk(0)
    s.accept_chunk(1)
    s.open_chatbot()
    s.close_chatbot()
    assert s.phase is SessionPhase.IDLE
    assert not s.recording_active
    s.sketch_activity()
    assert s.segment_index == 1
    assert s.expected_seq == 0  # seq restarts per segment


def test_chunk_contiguity():
    s = SpeechState()
    s.sketch_activity()
    s.accept_chunk(0)
    s.accept_chunk(1)
    with pytest.raises(GapInSequence):
        s.accept_chunk(3)


def test_chunk_rejected_when_not_recording():
    s = SpeechState()
    with pytest.raises(NotRecording):
        s.accept_chunk(0)


def test_abort_segment_restarts_and_drops_interim():
    s = SpeechState()
    s.sketch_activity()
    s.accept_chunk(0)
    s.apply_transcript_event("a", "partial words", SegmentStatus.INTERIM, 0, 10)
    s.apply_transcript_event("b", "final words", SegmentStatus.FINAL, 0, 20)
    s.abort_segment()
    assert s.segment_index == 1
    assert s.expected_seq == 0
    assert s.transcript.full_text() == "final words"


def test_pcm_validation():
    assert validate_pcm_chunk(b"\x00\x01" * 1600) == 100
    with pytest.raises(InvalidAction):
        validate_pcm_chunk(b"")
    with pytest.raises(InvalidAction):
        validate_pcm_chunk(b"\x00\x01\x02")  # odd length
    with pytest.raises(InvalidAction):
        validate_pcm_chunk(b"\x00\x01" * 16 * 250)  # 250ms > 200ms cap


def test_interim_then_final_replaces_text():
    s = SpeechState()
    s.sketch_activity()
    s.apply_transcript_event("seg", "I'm thinking of", SegmentStatus.INTERIM, 0, 100)
    s.apply_transcript_event("seg", "I'm thinking of something bold and square",
                             SegmentStatus.FINAL, 0, 400)
    assert len(s.transcript.segments) == 1
    seg = s.transcript.segments[0]
    assert seg.status is SegmentStatus.FINAL
    assert s.transcript.full_text() == "I'm thinking of something bold and square"


def test_final_is_frozen():
    s = SpeechState()
    s.sketch_activity()
    s.apply_transcript_event("seg", "done", SegmentStatus.FINAL, 0, 10)
    with pytest.raises(StaleSegment):
        s.apply_transcript_event("seg", "late interim", SegmentStatus.INTERIM, 0, 20)
    assert s.transcript.full_text() == "done"


def test_full_text_joins_finals_with_single_spaces():
    s = SpeechState()
    s.sketch_activity()
    s.apply_transcript_event("a", "first part", SegmentStatus.FINAL, 0, 10)
    s.apply_transcript_event("b", "second part", SegmentStatus.FINAL, 20, 30)
    assert s.transcript.full_text() == "first part second part"


def test_segments_ordered_by_start_time():
    s = SpeechState()
    s.sketch_activity()
    s.apply_transcript_event("late", "world", SegmentStatus.FINAL, 100, 120)
    s.apply_transcript_event("early", "hello", SegmentStatus.FINAL, 10, 40)
    assert s.transcript.full_text() == "hello world"


def test_event_two_generations_old_is_stale():
    s = SpeechState()
    s.sketch_activity()                    # segment 0, generation 1
    s.register_segment("old")
    s.open_chatbot()
    s.close_chatbot()
    s.sketch_activity()                    # generation 2: "old" still accepted
    s.apply_transcript_event("old", "just closed", SegmentStatus.FINAL, 0, 10)
    s.open_chatbot()
    s.close_chatbot()
    s.sketch_activity()                    # generation 3: two generations old now
    s.register_segment("old2")
    s._segment_generations["old2"] = 1
    with pytest.raises(StaleSegment):
        s.apply_transcript_event("old2", "too late", SegmentStatus.INTERIM, 0, 10)


def test_user_edit_collapses_to_single_segment():
    s = SpeechState()
    s.sketch_activity()
    s.apply_transcript_event("a", "one", SegmentStatus.FINAL, 0, 10)
    s.apply_transcript_event("b", "two", SegmentStatus.FINAL, 10, 20)
    s.open_chatbot()
    s.edit_transcript("bold square toaster with retractable cord", t_ms=500)
    t = s.transcript
    assert len(t.segments) == 1
    assert t.segments[0].source is TextSource.USER_EDIT
    assert t.edited
    assert t.full_text() == "bold square toaster with retractable cord"


def test_late_asr_never_overwrites_user_edit():
    s = SpeechState()
    s.sketch_activity()
    s.register_segment("a")
    s.apply_transcript_event("a", "spoken words", SegmentStatus.INTERIM, 0, 10)
    s.open_chatbot()
    s.edit_transcript("my edit", t_ms=100)
    with pytest.raises(StaleSegment):
        s.apply_transcript_event("a", "late recognition", SegmentStatus.FINAL, 0, 50)
    assert s.transcript.full_text() == "my edit"


def test_edit_requires_open_chatbot():
    s = SpeechState()
    with pytest.raises(NotOpen):
        s.edit_transcript("nope", t_ms=0)


def test_empty_edit_accepted():
    s = SpeechState()
    s.open_chatbot()
    s.edit_transcript("", t_ms=0)
    assert s.transcript.full_text() == ""


def test_transcript_revision_strictly_increases():
    t = Transcript()
    revisions = [t.revision]
    t.apply_asr_event("a", "x", SegmentStatus.INTERIM, 0, 1, 1, 1)
    revisions.append(t.revision)
    t.apply_asr_event("a", "xy", SegmentStatus.FINAL, 0, 2, 1, 1)
    revisions.append(t.revision)
    t.replace_with_edit("z", 5)
    revisions.append(t.revision)
    assert revisions == sorted(set(revisions))
