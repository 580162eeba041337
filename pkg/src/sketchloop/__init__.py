"""sketchloop: sketch-while-talking ideation service.

Vector canvas + streaming speech capture + dual-mode multimodal chat, tied
together by an event-sourced session protocol with deterministic replay.
"""

__version__ = "0.1.0"

from .config import ServiceConfig
from .session import FakeClock, Session, SessionManager

__all__ = ["FakeClock", "ServiceConfig", "Session", "SessionManager", "__version__"]
