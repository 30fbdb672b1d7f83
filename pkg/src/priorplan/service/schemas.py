from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from ..core import Speaker, TaskId


class HealthResponse(BaseModel):
    status: str
    version: str


class ActionInfo(BaseModel):
    index: int
    name: str
    strategy_prompt: str


class TaskInfo(BaseModel):
    task: TaskId
    noop_index: int
    actions: List[ActionInfo]


class CaseModel(BaseModel):
    task_id: TaskId
    background: str
    numeric_slots: Dict[str, float] = Field(default_factory=dict)
    extras: Dict[str, str] = Field(default_factory=dict)
    case_id: str = ""


class TurnModel(BaseModel):
    speaker: Speaker
    text: str


class StateRequest(BaseModel):
    """A dialogue state as seen by the planner."""

    case: CaseModel
    history: List[TurnModel] = Field(default_factory=list)
    emotions: List[str] = Field(default_factory=list)
    k: int = Field(4, ge=1)
    mode: str = Field("ListMode", json_schema_extra={"example": "ListMode"})
    no_emotion: bool = False


class PriorResponse(BaseModel):
    source: str
    candidates: List[int]
    candidate_names: List[str]
    prior: Optional[Dict[int, float]] = None
    state_text: str


class PlanRequest(StateRequest):
    epsilon: float = Field(0.0, ge=0.0, le=1.0)
    seed: int = 0


class PlanResponse(BaseModel):
    action_index: int
    action_name: str
    candidates: List[int]
    q_scores: List[float]
    probs: List[float]
    source: str


class VerdictRequest(BaseModel):
    task: TaskId
    text: str
    case: Optional[CaseModel] = None


class VerdictResponse(BaseModel):
    reward: float
    status: str
    deal_price: Optional[float] = None
    matched: Optional[str] = None


class SimulateRequest(BaseModel):
    task: TaskId = TaskId.ESCONV
    seed: int = 0
    episodes: int = Field(20, ge=1, le=5000)
    eval_episodes: int = Field(10, ge=1, le=5000)
    dim: int = Field(64, ge=1)
    hidden: int = Field(32, ge=1)
    learning_rate: float = 1e-3
    no_rl: bool = False
    no_prior: bool = False
    no_emotion: bool = False
    at_count_failures: bool = True


class MetricsModel(BaseModel):
    at: float
    sr: float
    n_episodes: int
    sl_avg: Optional[float] = None


class SimulateResponse(BaseModel):
    train: MetricsModel
    eval: MetricsModel
    updates: int


class MetricsRequest(BaseModel):
    records: List[dict]
    at_count_failures: bool = True
