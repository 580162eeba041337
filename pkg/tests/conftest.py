import random

import pytest

from sketchloop import FakeClock, ServiceConfig, Session
from sketchloop.canvas import AddStroke, CanvasDocument, Point, Stroke
from sketchloop.providers import build_mock_providers

SMALL_CANVAS = {"canvas_width": 128.0, "canvas_height": 96.0}


def make_config(**overrides) -> ServiceConfig:
    kwargs = {**SMALL_CANVAS, **overrides}
    return ServiceConfig(**kwargs)


def make_session(providers=None, config=None, auto_pump=True, log_dir=None,
                 session_id="test-session", **cfg) -> Session:
    return Session(
        config or make_config(**cfg),
        providers or build_mock_providers(),
        session_id=session_id,
        clock=FakeClock(),
        auto_pump=auto_pump,
        log_dir=log_dir,
    )


def pcm_chunk(ms: int = 100, value: int = 257) -> bytes:
    # 16 kHz mono PCM16: 16 samples per ms
    return value.to_bytes(2, "little", signed=True) * (16 * ms)


def draw_stroke(session: Session, points, width: float = 4.0,
                color=(0, 0, 0, 255)) -> str:
    """Drive a full stroke through the command surface; returns the stroke id."""
    first, *rest = points
    records = session.handle("stroke_begin", {
        "point": {"x": first[0], "y": first[1]},
        "width": width,
        "color": list(color),
    })
    stroke_id = next(r.payload["id"] for r in records if r.kind == "stroke_begin")
    for x, y in rest:
        session.handle("stroke_append", {"point": {"x": x, "y": y}})
    session.handle("stroke_end", {})
    return stroke_id


def random_document(rng: random.Random, width: float = 160.0, height: float = 120.0,
                    max_strokes: int = 8, max_points: int = 10) -> CanvasDocument:
    doc = CanvasDocument("doc", width, height)
    for i in range(rng.randint(1, max_strokes)):
        points = [
            Point(rng.uniform(-0.2 * width, 1.2 * width),
                  rng.uniform(-0.2 * height, 1.2 * height),
                  t_ms=t * 10, pressure=rng.random())
            for t in range(rng.randint(1, max_points))
        ]
        color = (rng.randrange(256), rng.randrange(256), rng.randrange(256),
                 rng.choice([64, 160, 255]))
        doc.apply(AddStroke(Stroke(f"s{i + 1}", points,
                                   width=rng.uniform(0.5, 10.0), color=color)))
    return doc


@pytest.fixture
def providers():
    return build_mock_providers()


@pytest.fixture
def session(providers):
    return make_session(providers)
