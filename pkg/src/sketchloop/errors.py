"""Exception hierarchy.

Every error carries a stable ``code`` string; the session layer serializes
rejected commands and provider failures as ``error`` records using that code,
so the codes are part of the wire protocol (see PROTOCOL.md).
"""


class SketchLoopError(Exception):
    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


# --- canvas ---------------------------------------------------------------

class EmptyStroke(SketchLoopError):
    code = "empty_stroke"


class UnknownTarget(SketchLoopError):
    code = "unknown_target"


class DuplicateId(SketchLoopError):
    code = "duplicate_id"


class NothingToUndo(SketchLoopError):
    code = "nothing_to_undo"


class NothingToRedo(SketchLoopError):
    code = "nothing_to_redo"


class EmptyRegion(SketchLoopError):
    code = "empty_region"


class UnknownArtifact(SketchLoopError):
    code = "unknown_artifact"


class UnknownEntry(SketchLoopError):
    code = "unknown_entry"


class InvalidAction(SketchLoopError):
    code = "invalid_action"


# --- speech session -------------------------------------------------------

class AlreadyOpen(SketchLoopError):
    code = "already_open"


class NotOpen(SketchLoopError):
    code = "not_open"


class NotRecording(SketchLoopError):
    code = "not_recording"


class GapInSequence(SketchLoopError):
    code = "gap_in_sequence"


class StaleSegment(SketchLoopError):
    code = "stale_segment"


class InputBlocked(SketchLoopError):
    code = "input_blocked"


# --- chat -----------------------------------------------------------------

class EmptyPrompt(SketchLoopError):
    code = "empty_prompt"


class WrongProvenance(SketchLoopError):
    code = "wrong_provenance"


class UnknownSession(SketchLoopError):
    code = "unknown_session"


# --- providers ------------------------------------------------------------

class ProviderError(SketchLoopError):
    code = "provider_error"


class ProviderTimeout(ProviderError):
    code = "provider_timeout"


class RateLimited(ProviderError):
    code = "rate_limited"


class MalformedResponse(ProviderError):
    code = "malformed_response"


class StreamBroken(ProviderError):
    code = "stream_broken"


# --- session / persistence ------------------------------------------------

class InvalidConfig(SketchLoopError):
    code = "invalid_config"


class CorruptLog(SketchLoopError):
    code = "corrupt_log"

    def __init__(self, message: str = "", seq: int | None = None):
        super().__init__(message)
        self.seq = seq


class ReplayMismatch(SketchLoopError):
    code = "replay_mismatch"
