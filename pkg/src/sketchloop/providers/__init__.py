from .base import (
    ImageProvider,
    ProviderConfig,
    ProviderRole,
    TextProvider,
    TranscriptionProvider,
    TranscriptionStream,
    bundle_fingerprint,
    call_with_retries,
    history_digest,
    request_fingerprint,
)
from .mock import (
    CapturedRequest,
    MockImageProvider,
    MockScripts,
    MockTextProvider,
    MockTranscriber,
    ProviderSet,
    build_mock_providers,
    solid_png,
)

__all__ = [
    "CapturedRequest",
    "ImageProvider",
    "MockImageProvider",
    "MockScripts",
    "MockTextProvider",
    "MockTranscriber",
    "ProviderConfig",
    "ProviderRole",
    "ProviderSet",
    "TextProvider",
    "TranscriptionProvider",
    "TranscriptionStream",
    "build_mock_providers",
    "bundle_fingerprint",
    "call_with_retries",
    "history_digest",
    "request_fingerprint",
    "solid_png",
]
