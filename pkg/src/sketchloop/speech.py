"""Recording lifecycle and transcript assembly.

Audio capture is tied to sketching: it starts when stroke input arrives with
the chatbot closed, and stops the moment the chatbot opens. Each start opens
a new recording segment whose audio chunk sequence numbers restart at 0 and
must stay contiguous; a gap aborts the segment (interim text dropped, final
text kept) and a fresh one is opened.

Staleness uses a generation counter: opening a recording segment bumps it by
one, a user edit bumps it by two. A transcription event is accepted only for
segments registered at the current or previous generation, which both drops
events "two generations old" and guarantees a user edit is never overwritten
by late recognition results.
"""

from dataclasses import dataclass
from enum import Enum

from .errors import (
    AlreadyOpen,
    GapInSequence,
    InputBlocked,
    InvalidAction,
    NotOpen,
    NotRecording,
    StaleSegment,
)

SAMPLE_RATE = 16000
MAX_CHUNK_MS = 200


class SessionPhase(str, Enum):
    IDLE = "IDLE"
    SKETCHING_RECORDING = "SKETCHING_RECORDING"
    CHATBOT_OPEN = "CHATBOT_OPEN"


class SegmentStatus(str, Enum):
    INTERIM = "INTERIM"
    FINAL = "FINAL"


class TextSource(str, Enum):
    ASR = "ASR"
    USER_EDIT = "USER_EDIT"


def validate_pcm_chunk(samples: bytes) -> int:
    """Validate a 16-bit mono 16 kHz PCM chunk; returns its duration in ms."""
    if not samples:
        raise InvalidAction("empty audio chunk")
    if len(samples) % 2 != 0:
        raise InvalidAction("PCM16 chunk must have an even byte length")
    duration_ms = (len(samples) // 2) * 1000 // SAMPLE_RATE
    if duration_ms > MAX_CHUNK_MS:
        raise InvalidAction(f"chunk duration {duration_ms}ms exceeds {MAX_CHUNK_MS}ms")
    return duration_ms


@dataclass
class TranscriptSegment:
    segment_id: str
    text: str
    t_start_ms: int
    t_end_ms: int
    status: SegmentStatus
    source: TextSource
    generation: int = 0

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "text": self.text,
            "t_start_ms": self.t_start_ms,
            "t_end_ms": self.t_end_ms,
            "status": self.status.value,
            "source": self.source.value,
        }


class Transcript:
    def __init__(self):
        self.segments: list[TranscriptSegment] = []
        self.revision = 0
        self.edited = False
        self._arrival = 0

    def full_text(self, include_interim: bool = True) -> str:
        parts = []
        for seg in self.segments:
            if seg.status is SegmentStatus.INTERIM and not include_interim:
                continue
            if seg.text:
                parts.append(seg.text)
        return " ".join(parts)

    def find(self, segment_id: str) -> TranscriptSegment | None:
        for seg in self.segments:
            if seg.segment_id == segment_id:
                return seg
        return None

    def apply_asr_event(self, segment_id: str, text: str, status: SegmentStatus,
                        t_start_ms: int, t_end_ms: int, generation: int,
                        current_generation: int) -> TranscriptSegment:
        """Apply one recognition event; raises StaleSegment when rejected."""
        if current_generation - generation > 1:
            raise StaleSegment(f"segment {segment_id!r} is {current_generation - generation} generations old")
        seg = self.find(segment_id)
        if seg is not None:
            if seg.status is SegmentStatus.FINAL:
                raise StaleSegment(f"segment {segment_id!r} is already FINAL")
            seg.text = text
            seg.status = status
            seg.t_end_ms = t_end_ms
        else:
            seg = TranscriptSegment(segment_id, text, t_start_ms, t_end_ms,
                                    status, TextSource.ASR, generation)
            self._insert(seg)
        self.revision += 1
        return seg

    def _insert(self, seg: TranscriptSegment) -> None:
        # stable order by start time, then arrival
        i = len(self.segments)
        while i > 0 and self.segments[i - 1].t_start_ms > seg.t_start_ms:
            i -= 1
        self.segments.insert(i, seg)
        self._arrival += 1

    def interim_segments(self) -> list[TranscriptSegment]:
        return [s for s in self.segments if s.status is SegmentStatus.INTERIM]

    def drop_interim(self, generation: int) -> bool:
        """Drop interim segments of an aborted recording segment."""
        kept = [s for s in self.segments
                if not (s.status is SegmentStatus.INTERIM and s.generation == generation)]
        if len(kept) != len(self.segments):
            self.segments = kept
            self.revision += 1
            return True
        return False

    def replace_with_edit(self, text: str, t_ms: int) -> None:
        self.segments = [TranscriptSegment("user-edit", text, t_ms, t_ms,
                                           SegmentStatus.FINAL, TextSource.USER_EDIT)]
        self.edited = True
        self.revision += 1

    def to_dict(self) -> dict:
        return {
            "segments": [s.to_dict() for s in self.segments],
            "revision": self.revision,
            "edited": self.edited,
        }


class SpeechState:
    """Phase machine plus transcript for one session."""

    def __init__(self):
        self.phase = SessionPhase.IDLE
        self.recording_active = False
        self.segment_index = -1  # no segment opened yet
        self.expected_seq = 0
        self.chunks_in_segment = 0
        self.generation = 0
        self.transcript = Transcript()
        self._segment_generations: dict[str, int] = {}

    # -- phase transitions (called while applying log records) --

    def sketch_activity(self) -> bool:
        """Returns True when this started a new recording segment."""
        if self.phase is SessionPhase.CHATBOT_OPEN:
            raise InputBlocked("canvas input is blocked while the chatbot is open")
        if self.phase is SessionPhase.IDLE:
            self.phase = SessionPhase.SKETCHING_RECORDING
            self._open_segment()
            return True
        return False

    def open_chatbot(self) -> bool:
        """Returns True when a recording segment was closed by the transition."""
        if self.phase is SessionPhase.CHATBOT_OPEN:
            raise AlreadyOpen("chatbot is already open")
        closed = self.recording_active
        self.recording_active = False
        self.phase = SessionPhase.CHATBOT_OPEN
        return closed

    def close_chatbot(self) -> None:
        if self.phase is not SessionPhase.CHATBOT_OPEN:
            raise NotOpen("chatbot is not open")
        # recording resumes only on the next sketch activity
        self.phase = SessionPhase.IDLE

    def _open_segment(self) -> None:
        self.segment_index += 1
        self.expected_seq = 0
        self.chunks_in_segment = 0
        self.generation += 1
        self.recording_active = True

    def check_chunk(self, seq: int) -> None:
        """Validate an incoming chunk without mutating state."""
        if self.phase is not SessionPhase.SKETCHING_RECORDING:
            raise NotRecording("audio is only accepted while sketching")
        if seq != self.expected_seq:
            raise GapInSequence(f"expected seq {self.expected_seq}, got {seq}")

    def accept_chunk(self, seq: int) -> None:
        self.check_chunk(seq)
        self.expected_seq += 1
        self.chunks_in_segment += 1

    def abort_segment(self) -> int:
        """Abort the current segment (gap or broken stream); opens a new one.

        Returns the aborted segment's generation so interim text can be
        dropped. Only valid while recording.
        """
        aborted_generation = self.generation
        self.transcript.drop_interim(aborted_generation)
        self._open_segment()
        return aborted_generation

    # -- transcript events --

    def register_segment(self, segment_id: str) -> int:
        if segment_id not in self._segment_generations:
            self._segment_generations[segment_id] = self.generation
        return self._segment_generations[segment_id]

    def apply_transcript_event(self, segment_id: str, text: str, status: SegmentStatus,
                               t_start_ms: int, t_end_ms: int) -> TranscriptSegment:
        generation = self.register_segment(segment_id)
        return self.transcript.apply_asr_event(
            segment_id, text, status, t_start_ms, t_end_ms,
            generation, self.generation,
        )

    def edit_transcript(self, text: str, t_ms: int) -> None:
        if self.phase is not SessionPhase.CHATBOT_OPEN:
            raise NotOpen("transcript edits require the chatbot panel")
        self.transcript.replace_with_edit(text, t_ms)
        # invalidate every previously registered recognition segment
        self.generation += 2
