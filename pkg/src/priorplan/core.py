"""Task-agnostic domain types and the canonical state serialization.

Everything here is an immutable value. ``append_turn`` and friends return new
objects instead of mutating, so states can be shared freely between threads
and kept in the replay buffer without defensive copies.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import IndexMismatch, InvalidCase

EMOTION_SEPARATOR = " -> "


class TaskId(str, enum.Enum):
    ESCONV = "ESConv"
    CIMA = "CIMA"
    CB = "CB"
    P4G = "P4G"
    EXTES = "ExTES"


class Speaker(str, enum.Enum):
    SYSTEM = "System"
    USER = "User"


# (system role, user role) as they appear in rendered conversations
ROLE_NAMES: dict[TaskId, tuple[str, str]] = {
    TaskId.ESCONV: ("Therapist", "Patient"),
    TaskId.EXTES: ("Therapist", "Patient"),
    TaskId.CIMA: ("Teacher", "Student"),
    TaskId.CB: ("Buyer", "Seller"),
    TaskId.P4G: ("Persuader", "Persuadee"),
}

CB_SLOTS = ("listed_price", "buyer_target_price", "seller_desired_price")


def _frozen_map(m: Mapping | None) -> Mapping:
    return MappingProxyType(dict(m or {}))


@dataclass(frozen=True)
class CaseInfo:
    """Case information for one dialogue.

    ``extras`` carries the free-text placeholders some role prompts need
    (emotion type, problem type, product name, sentence to translate).
    """

    task_id: TaskId
    background: str
    numeric_slots: Mapping[str, float] = field(default_factory=dict)
    extras: Mapping[str, str] = field(default_factory=dict)
    case_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "task_id", TaskId(self.task_id))
        object.__setattr__(self, "numeric_slots", _frozen_map(self.numeric_slots))
        object.__setattr__(self, "extras", _frozen_map(self.extras))

    def validate(self) -> None:
        if self.task_id is TaskId.CB:
            missing = [s for s in CB_SLOTS if s not in self.numeric_slots]
            if missing:
                raise InvalidCase(f"CB case missing price slots: {missing}")
            listed = self.numeric_slots["listed_price"]
            target = self.numeric_slots["buyer_target_price"]
            if not listed > target > 0:
                raise InvalidCase("CB case needs listed_price > buyer_target_price > 0")
        elif self.numeric_slots:
            raise InvalidCase(f"{self.task_id.value} cases carry no numeric slots")

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "task_id": self.task_id.value,
            "background": self.background,
            "numeric_slots": dict(self.numeric_slots),
            "extras": dict(self.extras),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> CaseInfo:
        return cls(
            task_id=TaskId(d["task_id"]),
            background=d["background"],
            numeric_slots={k: float(v) for k, v in (d.get("numeric_slots") or {}).items()},
            extras=d.get("extras") or {},
            case_id=d.get("case_id", ""),
        )


@dataclass(frozen=True)
class Utterance:
    speaker: Speaker
    text: str
    turn_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "speaker", Speaker(self.speaker))


@dataclass(frozen=True)
class EmotionTrace:
    labels: tuple[str, ...] = ()

    def render(self) -> str:
        return EMOTION_SEPARATOR.join(self.labels)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Action:
    index: int
    name: str
    strategy_prompt: str


@dataclass(frozen=True)
class ActionCatalog:
    task_id: TaskId
    actions: tuple[Action, ...]
    noop_index: int

    def __post_init__(self) -> None:
        idx = [a.index for a in self.actions]
        if idx != list(range(1, len(idx) + 1)):
            raise ValueError("catalog indices must be contiguous 1..n")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise ValueError("catalog action names must be unique")
        if any(not a.strategy_prompt for a in self.actions):
            raise ValueError("every action needs a strategy prompt")
        if not 1 <= self.noop_index <= len(self.actions):
            raise ValueError("noop_index outside the catalog")

    def __len__(self) -> int:
        return len(self.actions)

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and 1 <= index <= len(self.actions)

    def __getitem__(self, index: int) -> Action:
        if index not in self:
            raise KeyError(index)
        return self.actions[index - 1]

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.actions]

    @property
    def indices(self) -> list[int]:
        return [a.index for a in self.actions]


@dataclass(frozen=True)
class DialogueState:
    case: CaseInfo
    history: tuple[Utterance, ...] = ()
    emotions: EmotionTrace = EmotionTrace()
    turn: int = 0

    def last(self, speaker: Speaker) -> Utterance | None:
        for u in reversed(self.history):
            if u.speaker is speaker:
                return u
        return None


@dataclass(frozen=True)
class Transition:
    state_text: str
    action_index: int
    reward: float
    next_state_text: str
    terminal: bool
    candidate_indices_next: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not -1.0 <= self.reward <= 1.0:
            raise ValueError(f"reward {self.reward} outside [-1, 1]")
        object.__setattr__(self, "candidate_indices_next", tuple(self.candidate_indices_next))


def render_history(history: tuple[Utterance, ...] | list[Utterance], task_id: TaskId) -> str:
    sys_name, usr_name = ROLE_NAMES[TaskId(task_id)]
    lines = []
    for u in history:
        who = sys_name if u.speaker is Speaker.SYSTEM else usr_name
        lines.append(f"{who}: {u.text}")
    return "\n".join(lines)


def serialize_state(state: DialogueState, catalog: ActionCatalog, *, with_emotions: bool = True) -> str:
    """Render ``state`` in the fixed ``Case; History; Emotions; Actions`` layout.

    ``with_emotions=False`` drops the emotion segment entirely (the emotion
    ablation), rather than leaving it empty.
    """
    parts = [
        f"Case: {state.case.background}",
        f"History: {render_history(state.history, state.case.task_id)}",
    ]
    if with_emotions:
        parts.append(f"Emotions: {state.emotions.render()}")
    parts.append(f"Actions: [{', '.join(catalog.names)}]")
    parts.append("Next action:")
    return "; ".join(parts)


def append_turn(state: DialogueState, u: Utterance) -> DialogueState:
    if u.turn_index != len(state.history):
        raise IndexMismatch(
            f"utterance turn_index {u.turn_index} != history length {len(state.history)}"
        )
    turn = state.turn + 1 if u.speaker is Speaker.SYSTEM else state.turn
    return replace(state, history=state.history + (u,), turn=turn)


def with_emotion(state: DialogueState, trace: EmotionTrace) -> DialogueState:
    return replace(state, emotions=trace)


def build_state(case: CaseInfo, turns: Sequence[tuple[Speaker | str, str]] = (),
                emotions: Sequence[str] = ()) -> DialogueState:
    """Replay ``(speaker, text)`` pairs onto a fresh state."""
    state = DialogueState(case)
    for speaker, text in turns:
        state = append_turn(state, Utterance(Speaker(speaker), text, len(state.history)))
    return with_emotion(state, EmotionTrace(tuple(emotions)))
