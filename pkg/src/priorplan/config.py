"""Run configuration: YAML file plus environment overrides for endpoints and keys."""

from __future__ import annotations

import dataclasses
import enum
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .core import TaskId
from .learner import TrainConfig


class RunMode(str, enum.Enum):
    TRAIN = "Train"
    EVAL = "Eval"
    CHAT = "Chat"
    SIMULATE = "Simulate"


_TRAIN_FIELDS = {f.name for f in dataclasses.fields(TrainConfig)}

# environment variable -> RunConfig field
ENV_OVERRIDES = {
    "LLM_ENDPOINT": "llm_endpoint",
    "LLM_MODEL": "llm_model",
    "LLM_API_KEY": "llm_api_key",
    "ENCODER_ENDPOINT": "encoder_endpoint",
}


@dataclass
class RunConfig:
    task: TaskId = TaskId.ESCONV
    mode: RunMode = RunMode.SIMULATE
    k: int = 4
    epsilon_eval: float = 0.5
    prior_mode: str = "ListMode"
    beam_width: int = 8
    max_turns: int = 8
    dim: int = 768
    hidden: int = 256
    train: TrainConfig = field(default_factory=TrainConfig)
    eval_episodes: int = 100
    workers: int = 4
    seed: int = 0
    out_dir: str | None = None
    cases: str | None = None
    checkpoint: str | None = None

    # backends
    mock: bool = False
    script: str | None = None
    llm_endpoint: str | None = None
    llm_model: str = "default"
    llm_api_key: str | None = None
    role_endpoints: dict[str, str] = field(default_factory=dict)
    encoder_endpoint: str | None = None
    call_cap: int | None = None
    context_limit: int | None = None

    # ablations
    no_rl: bool = False
    no_prior: bool = False
    no_emotion: bool = False
    at_count_failures: bool = True

    def __post_init__(self) -> None:
        self.task = TaskId(self.task)
        self.mode = RunMode(self.mode)
        if isinstance(self.train, Mapping):
            self.train = TrainConfig(**self.train)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.epsilon_eval <= 1.0:
            raise ValueError("epsilon_eval must lie in [0, 1]")

    def with_overrides(self, **changes: Any) -> RunConfig:
        train_changes = {k: changes.pop(k) for k in list(changes) if k in _TRAIN_FIELDS}
        cfg = dataclasses.replace(self, **changes)
        if train_changes:
            cfg.train = dataclasses.replace(cfg.train, **train_changes)
        return cfg

    def train_config(self) -> TrainConfig:
        return self.train

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["task"] = self.task.value
        d["mode"] = self.mode.value
        d.pop("llm_api_key")
        return d


def from_mapping(data: Mapping[str, Any]) -> RunConfig:
    data = dict(data)
    train = dict(data.pop("train", None) or {})
    # TrainConfig keys are also accepted at top level
    for key in list(data):
        if key in _TRAIN_FIELDS:
            train[key] = data.pop(key)
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(train=TrainConfig(**train), **data)


def apply_env(cfg: RunConfig, environ: Mapping[str, str] | None = None) -> RunConfig:
    env = os.environ if environ is None else environ
    changes: dict[str, Any] = {fld: env[var] for var, fld in ENV_OVERRIDES.items() if env.get(var)}
    roles = dict(cfg.role_endpoints)
    for var, value in env.items():
        if var.startswith("LLM_ENDPOINT_") and value:
            roles[var.removeprefix("LLM_ENDPOINT_").lower()] = value
    if roles != cfg.role_endpoints:
        changes["role_endpoints"] = roles
    return cfg.with_overrides(**changes) if changes else cfg


def load_config(path: str | Path | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    data: dict[str, Any] = {}
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if loaded is not None and not isinstance(loaded, dict):
            raise ValueError("config file must hold a mapping")
        data = loaded or {}
    return apply_env(from_mapping(data), environ)
