"""Provider contracts shared by mock and live implementations.

Every outgoing request is summarized by a stable fingerprint over its logical
content (role, system text, user text, attachment hashes, history digest).
Fingerprints key the mock scripts and let the replay harness prove that a
rebuilt session issues byte-identical provider requests.
"""

import os
from abc import ABC, abstractmethod
from dataclasses import dataclass

from ..canvas.model import RasterImage
from ..errors import RateLimited
from ..prompts import PromptBundle
from ..serialize import canonical_bytes, sha256_hex


class ProviderRole:
    TRANSCRIBE = "TRANSCRIBE"
    INSIGHT_TEXT = "INSIGHT_TEXT"
    CHAT_TEXT = "CHAT_TEXT"
    CHAT_IMAGE = "CHAT_IMAGE"


@dataclass
class ProviderConfig:
    role: str
    endpoint: str = ""
    model: str = "mock"
    credential_env: str | None = None  # env var NAME; the secret itself is never stored
    timeout_ms: int = 30000
    max_retries: int = 3

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")

    def resolve_credential(self) -> str | None:
        if self.credential_env is None:
            return None
        return os.environ.get(self.credential_env)

    def to_dict(self) -> dict:
        # credential_env is a reference, safe to serialize; the secret is not here
        return {
            "role": self.role,
            "endpoint": self.endpoint,
            "model": self.model,
            "credential_env": self.credential_env,
            "timeout_ms": self.timeout_ms,
            "max_retries": self.max_retries,
        }


def history_digest(history: list[dict]) -> str:
    return sha256_hex(canonical_bytes(history))


def request_fingerprint(role: str, system_text: str, user_text: str,
                        attachment_hashes: list[str], history: list[dict]) -> str:
    return sha256_hex(canonical_bytes({
        "role": role,
        "system": system_text,
        "user": user_text,
        "attachments": attachment_hashes,
        "history": history_digest(history),
    }))


def bundle_fingerprint(role: str, bundle: PromptBundle) -> str:
    return request_fingerprint(
        role,
        bundle.system_text,
        bundle.user_text,
        [sha256_hex(att.data) for att in bundle.attachments],
        bundle.history,
    )


class TextProvider(ABC):
    role: str = ProviderRole.CHAT_TEXT

    @abstractmethod
    def complete(self, bundle: PromptBundle) -> str:
        """Return a non-empty completion or raise a ProviderError subclass."""


class ImageProvider(ABC):
    role: str = ProviderRole.CHAT_IMAGE

    @abstractmethod
    def generate(self, bundle: PromptBundle) -> tuple[RasterImage, str]:
        """Return (decodable raster, non-empty description) or raise."""


class TranscriptionStream(ABC):
    @abstractmethod
    def feed(self, seq: int, samples: bytes, t_ms: int) -> list[dict]:
        """Feed one PCM chunk; returns zero or more transcription events."""

    @abstractmethod
    def finish(self) -> list[dict]:
        """Close the stream, flushing any pending recognition."""


class TranscriptionProvider(ABC):
    role: str = ProviderRole.TRANSCRIBE

    @abstractmethod
    def open_stream(self, segment_index: int) -> TranscriptionStream:
        ...


def call_with_retries(fn, max_retries: int, sleep=None, base_delay: float = 0.25):
    """Run fn with exponential backoff on RateLimited.

    At most max_retries attempts total; delays are non-decreasing. Other
    provider errors propagate immediately.
    """
    import time as _time

    do_sleep = sleep if sleep is not None else _time.sleep
    attempts = max(1, max_retries)
    for attempt in range(attempts):
        try:
            return fn()
        except RateLimited:
            if attempt == attempts - 1:
                raise
            do_sleep(base_delay * (2 ** attempt))
