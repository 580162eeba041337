import json

import pytest

from sketchloop.config import ServiceConfig
from sketchloop.errors import InvalidConfig, UnknownSession
from sketchloop.prompts import KICKOFF_TEMPLATE, REFINE_TEMPLATE
from sketchloop.providers import ProviderRole, build_mock_providers
from sketchloop.session import SessionManager


def test_defaults():
    config = ServiceConfig()
    assert (config.canvas_width, config.canvas_height) == (1024.0, 768.0)
    assert config.templates["kickoff"] == KICKOFF_TEMPLATE
    assert config.templates["refine"] == REFINE_TEMPLATE
    assert config.history_turn_budget == 50
    assert set(config.providers) == {
        ProviderRole.TRANSCRIBE, ProviderRole.INSIGHT_TEXT,
        ProviderRole.CHAT_TEXT, ProviderRole.CHAT_IMAGE,
    }


def test_zero_size_canvas_rejected():
    with pytest.raises(InvalidConfig):
        ServiceConfig(canvas_width=0)
    with pytest.raises(InvalidConfig):
        ServiceConfig(canvas_height=-5)


def test_bad_mode_and_templates_rejected():
    with pytest.raises(InvalidConfig):
        ServiceConfig(provider_mode="telepathy")
    with pytest.raises(InvalidConfig):
        ServiceConfig(templates={"kickoff": "", "refine": "x"})


def test_roundtrip_through_dict():
    config = ServiceConfig(canvas_width=300, history_turn_budget=10)
    clone = ServiceConfig.from_dict(config.to_dict())
    assert clone.to_dict() == config.to_dict()


def test_api_token_never_serialized():
    # to_dict feeds the logged session_start record; the token must stay out
    config = ServiceConfig(api_token="super-secret-token")
    assert "super-secret-token" not in json.dumps(config.to_dict())


def test_load_from_file_and_env(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "canvas_width": 640,
        "canvas_height": 480,
        "templates": {"kickoff": "file kickoff"},
        "providers": {"CHAT_TEXT": {"role": "CHAT_TEXT", "model": "tuned-model"}},
    }))
    monkeypatch.setenv("SKETCHLOOP_CONFIG", str(path))
    monkeypatch.setenv("SKETCHLOOP_API_TOKEN", "token-from-env")
    config = ServiceConfig.load()
    assert config.canvas_width == 640
    assert config.templates["kickoff"] == "file kickoff"
    assert config.templates["refine"] == REFINE_TEMPLATE  # default retained
    assert config.providers[ProviderRole.CHAT_TEXT].model == "tuned-model"
    assert config.api_token == "token-from-env"


def test_provider_env_overrides(monkeypatch):
    monkeypatch.setenv("SKETCHLOOP_CHAT_IMAGE_ENDPOINT", "https://img.example/v1")
    monkeypatch.setenv("SKETCHLOOP_CHAT_IMAGE_MODEL", "image-model-2")
    monkeypatch.setenv("SKETCHLOOP_TRANSCRIBE_CREDENTIAL_ENV", "ASR_KEY")
    config = ServiceConfig.load()
    assert config.providers[ProviderRole.CHAT_IMAGE].endpoint == "https://img.example/v1"
    assert config.providers[ProviderRole.CHAT_IMAGE].model == "image-model-2"
    assert config.providers[ProviderRole.TRANSCRIBE].credential_env == "ASR_KEY"
    assert config.providers[ProviderRole.CHAT_TEXT].model == "mock"  # untouched


def test_load_missing_file():
    with pytest.raises(InvalidConfig):
        ServiceConfig.load("/nonexistent/config.json")


def test_session_manager_unknown_session():
    manager = SessionManager(ServiceConfig(), build_mock_providers())
    session = manager.create()
    assert manager.get(session.session_id) is session
    assert session.history.turns == []  # fresh session, empty history
    with pytest.raises(UnknownSession):
        manager.get("sess-does-not-exist")
