"""Run configuration: JSON on disk, dataclasses in memory."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError
from .models import ModelDescriptor
from .phases import UNDEF_TOL
from .transport import TransportSettings

OUTPUT_SECTIONS = ("U", "sigmas", "gammas", "independent_set", "classification", "identities")
FORMATS = ("text", "structured")


@dataclass
class Tolerances:
    undef_tol: float = UNDEF_TOL
    dominance_factor: float = 10.0

    def __post_init__(self):
        if not (isinstance(self.undef_tol, (int, float)) and self.undef_tol > 0):
            raise ConfigError("must be positive", "tolerances.undef_tol")
        if not (isinstance(self.dominance_factor, (int, float)) and self.dominance_factor > 1):
            raise ConfigError("must exceed 1", "tolerances.dominance_factor")


@dataclass
class RunConfig:
    model: ModelDescriptor
    transport: TransportSettings = field(default_factory=TransportSettings)
    outputs: list = field(default_factory=lambda: ["U"])
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "text"

    def __post_init__(self):
        if not self.outputs:
            raise ConfigError("at least one output section is required", "outputs")
        for name in self.outputs:
            if name not in OUTPUT_SECTIONS:
                raise ConfigError(f"unknown section {name!r}; choose from {', '.join(OUTPUT_SECTIONS)}", "outputs")
        if self.format not in FORMATS:
            raise ConfigError(f"must be one of {FORMATS}", "format")

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "transport": asdict(self.transport),
            "outputs": list(self.outputs),
            "tolerances": asdict(self.tolerances),
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"model", "transport", "outputs", "tolerances", "format"}
        if unknown:
            raise ConfigError(f"unknown key(s) {sorted(unknown)}")
        if "model" not in data:
            raise ConfigError("missing", "model")
        model = ModelDescriptor.from_dict(data["model"])
        transport = _section(TransportSettings, data.get("transport", {}), "transport",
                             {"initial_steps": int, "max_steps": int, "target_tol": float, "gap_tol": float})
        tolerances = _section(Tolerances, data.get("tolerances", {}), "tolerances",
                              {"undef_tol": float, "dominance_factor": float})
        outputs = data.get("outputs", ["U"])
        if not isinstance(outputs, list):
            raise ConfigError("must be a list", "outputs")
        return cls(model, transport, list(outputs), tolerances, data.get("format", "text"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _section(cls, data, where: str, types: dict):
    if not isinstance(data, dict):
        raise ConfigError("must be a mapping", where)
    kwargs = {}
    for key, value in data.items():
        if key not in types:
            raise ConfigError("unknown key", f"{where}.{key}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", f"{where}.{key}")
        if types[key] is int and value != int(value):
            raise ConfigError("expected an integer", f"{where}.{key}")
        kwargs[key] = types[key](value)
    return cls(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return RunConfig.from_dict(data)
