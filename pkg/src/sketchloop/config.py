"""Service configuration.

Loaded from a JSON file, overridable through environment variables. The
insight templates live here (shipped defaults in prompts.py) so deployments
can tune wording without code changes; everything template-related downstream
treats the configured text as opaque bytes.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfig
from .prompts import default_templates
from .providers.base import ProviderConfig, ProviderRole

ENV_CONFIG_PATH = "SKETCHLOOP_CONFIG"
ENV_API_TOKEN = "SKETCHLOOP_API_TOKEN"


@dataclass
class ServiceConfig:
    canvas_width: float = 1024.0
    canvas_height: float = 768.0
    history_turn_budget: int = 50
    insight_raster_scale: float = 1.0
    provider_mode: str = "mock"  # mock | live
    api_token: str | None = None
    templates: dict = field(default_factory=default_templates)
    providers: dict = field(default_factory=dict)  # role -> ProviderConfig

    def __post_init__(self):
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise InvalidConfig("canvas dimensions must be positive")
        if self.history_turn_budget < 1:
            raise InvalidConfig("history_turn_budget must be at least 1")
        if self.provider_mode not in ("mock", "live"):
            raise InvalidConfig(f"unknown provider_mode {self.provider_mode!r}")
        if not self.templates.get("kickoff") or not self.templates.get("refine"):
            raise InvalidConfig("both insight templates must be configured")
        for role in (ProviderRole.TRANSCRIBE, ProviderRole.INSIGHT_TEXT,
                     ProviderRole.CHAT_TEXT, ProviderRole.CHAT_IMAGE):
            self.providers.setdefault(role, ProviderConfig(role=role))

    def to_dict(self) -> dict:
        return {
            "canvas_width": self.canvas_width,
            "canvas_height": self.canvas_height,
            "history_turn_budget": self.history_turn_budget,
            "insight_raster_scale": self.insight_raster_scale,
            "provider_mode": self.provider_mode,
            "templates": dict(self.templates),
            "providers": {role: cfg.to_dict() for role, cfg in sorted(self.providers.items())},
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        providers = {}
        for role, cfg in raw.get("providers", {}).items():
            providers[role] = ProviderConfig(**cfg)
        kwargs = {k: raw[k] for k in (
            "canvas_width", "canvas_height", "history_turn_budget",
            "insight_raster_scale", "provider_mode", "api_token",
        ) if k in raw}
        templates = default_templates()
        templates.update(raw.get("templates", {}))
        try:
            return cls(templates=templates, providers=providers, **kwargs)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ServiceConfig":
        """Load from an explicit path, $SKETCHLOOP_CONFIG, or defaults.

        Per-role provider settings can be overridden without a file through
        SKETCHLOOP_<ROLE>_{ENDPOINT,MODEL,CREDENTIAL_ENV}, e.g.
        SKETCHLOOP_CHAT_IMAGE_ENDPOINT.
        """
        if path is None:
            path = os.environ.get(ENV_CONFIG_PATH)
        if path is None:
            config = cls()
        else:
            try:
                raw = json.loads(Path(path).read_text())
            except (OSError, ValueError) as exc:
                raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
            config = cls.from_dict(raw)
        token = os.environ.get(ENV_API_TOKEN)
        if token:
            config.api_token = token
        for role, provider in config.providers.items():
            for attr in ("endpoint", "model", "credential_env"):
                value = os.environ.get(f"SKETCHLOOP_{role}_{attr.upper()}")
                if value:
                    setattr(provider, attr, value)
        return config
