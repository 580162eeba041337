"""Insight prompt selection and multimodal bundle assembly.

Two system templates drive the automatic insight feature: the kickoff text
for the first insight on a canvas lifetime and the refine text for every
later one. The shipped defaults below are the templates the insight quality
was tuned against; they are configuration, and the engine guarantees the
outgoing system text byte-equals whatever is configured. Word-count phrasing
inside the templates is an instruction to the model, not enforced here.
"""

from dataclasses import dataclass, field
from enum import Enum

from .canvas.model import CanvasDocument, RasterImage

KICKOFF_TEMPLATE = (
    "Act as a design thinking expert: based on the transcript and sketch canvas, "
    "identify what the user is trying to design, then—using the Double Diamond "
    "framework—guide them through Discover and Define by highlighting potential "
    "user needs, pain points, and framing questions, and finally offer 3–4 concise "
    "design directions in an encouraging and curious tone (around 100 words)."
)

REFINE_TEMPLATE = (
    "Act as a design thinking collaborator: based on the updated transcript and "
    "sketch canvas, briefly summarise what the user is currently designing or "
    "refining, reflect their key idea in one or two sentences, suggest 1–2 small "
    "ways to expand or clarify it, and end with 1–2 open-ended questions to help "
    "further develop the concept in a supportive, conversational tone "
    "(around 80–100 words)."
)


class InsightKind(str, Enum):
    KICKOFF = "KICKOFF"
    REFINE = "REFINE"


class BundleKind(str, Enum):
    KICKOFF = "KICKOFF"
    REFINE = "REFINE"
    CHAT_TEXT = "CHAT_TEXT"
    CHAT_IMAGE = "CHAT_IMAGE"


INSIGHT_BUNDLE_KINDS = (BundleKind.KICKOFF, BundleKind.REFINE)


@dataclass
class PromptBundle:
    kind: BundleKind
    system_text: str
    user_text: str
    attachments: list[RasterImage] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)
    based_on: dict = field(default_factory=dict)

    def __post_init__(self):
        assert len(self.attachments) <= 1, "at most one raster attachment per bundle"


@dataclass
class InsightResponse:
    insight_id: str
    kind: InsightKind
    text: str
    based_on: dict
    created_at_ms: int


def select_prompt_kind(doc: CanvasDocument) -> InsightKind:
    """Kickoff only for a canvas lifetime that has never generated an insight."""
    return InsightKind.KICKOFF if doc.insight_count == 0 else InsightKind.REFINE


def insight_template(kind: InsightKind, templates: dict[str, str]) -> str:
    return templates["kickoff" if kind is InsightKind.KICKOFF else "refine"]


def build_insight_prompt(kind: InsightKind, transcript_text: str,
                         transcript_revision: int, doc_raster: RasterImage,
                         canvas_revision: int, history: list[dict],
                         templates: dict[str, str]) -> PromptBundle:
    """Assemble the multimodal insight request.

    The raster is passed in pre-rendered so callers can reuse a cached frame;
    the based_on revisions make stale responses detectable at display time.
    """
    return PromptBundle(
        kind=BundleKind(kind.value),
        system_text=insight_template(kind, templates),
        user_text=transcript_text,
        attachments=[doc_raster],
        history=history,
        based_on={
            "transcript_revision": transcript_revision,
            "canvas_revision": canvas_revision,
        },
    )


def default_templates() -> dict[str, str]:
    return {"kickoff": KICKOFF_TEMPLATE, "refine": REFINE_TEMPLATE}
