"""Scripted LLM worlds for desk-scale runs.

Every task gets a :class:`ScriptedBackend` whose rules form a tiny dynamics
model. The system reply tags itself with the chosen action (``[a6]``); the
simulated user reacts to the tag of the *latest* system line (``[up]``,
``[down]`` or ``[flat]``); the critic counts ``[up]`` reactions in the whole
conversation. Two helpful moves complete the dialogue, so a value head that
learns which actions are helpful shortens episodes.
"""

from __future__ import annotations

from .core import TaskId
from .gateway import ChatResponse, RoleTag, ScriptedBackend, ScriptRule
from .tasks import CATALOGS

HELPFUL: dict[TaskId, tuple[int, ...]] = {
    TaskId.ESCONV: (6, 3),
    TaskId.EXTES: (3, 13),
    TaskId.CIMA: (1, 4),
    TaskId.CB: (5, 4),
    TaskId.P4G: (10, 14),
}
HARMFUL: dict[TaskId, tuple[int, ...]] = {
    TaskId.ESCONV: (7,),
    TaskId.EXTES: (12,),
    TaskId.CIMA: (3,),
    TaskId.CB: (10,),
    TaskId.P4G: (1,),
}
POLICY_REPLY: dict[TaskId, str] = {
    TaskId.ESCONV: "6,8,7,1",
    TaskId.EXTES: "3,1,12,8",
    TaskId.CIMA: "1,2,3,5",
    TaskId.CB: "4,5,10,2",
    TaskId.P4G: "10,1,14,6",
}
MOCK_DEAL_PRICE = 120

# critic replies: (two helpful reactions, one helpful, one harmful, otherwise)
_CRITIC: dict[TaskId, tuple[str, str, str, str]] = {
    TaskId.ESCONV: (
        "Yes, the patient's emotional issues have been resolved.",
        "No, but the patient feels somewhat better.",
        "No, the patient feels worse.",
        "No, the patient feels the same.",
    ),
    TaskId.EXTES: (
        "Yes, the patient's emotional issues have been resolved.",
        "No, the patient feels the same.",
        "No, the patient feels worse.",
        "No, the patient feels the same.",
    ),
    TaskId.CIMA: (
        "Yes, the Student correctly translated the whole sentence of the sentence.",
        "No, the Student only correctly translated a part of the sentence.",
        "No, the Student made an incorrect translation.",
        "No, the Student did not try to translate.",
    ),
    TaskId.CB: (
        f"They have reached a deal at {MOCK_DEAL_PRICE}",
        "They have not reached a deal.",
        "They have not reached a deal.",
        "They have not reached a deal.",
    ),
    TaskId.P4G: (
        "The persuadee has decided to donate.",
        "The persuadee has a positive attitude towards donating but hasn't decided yet.",
        "The persuadee has explicitly refused.",
        "The persuadee remains neutral about donating.",
    ),
}


def _tag_alternation(indices: tuple[int, ...]) -> str:
    return "|".join(str(i) for i in indices)


def mock_backend(task_id: TaskId | str, supports_logprobs: bool = True) -> ScriptedBackend:
    task_id = TaskId(task_id)
    catalog = CATALOGS[task_id]
    rules: list[ScriptRule] = []

    # beam-mode continuations of the serialized state
    names = [catalog[i].name for i in (*HELPFUL[task_id], *HARMFUL[task_id])]
    names += [a.name for a in catalog.actions if a.name not in names]
    names = (names * 8)[:8]
    rules.append(ScriptRule(
        RoleTag.POLICY, "Next action:",
        ChatResponse.of(*names, logprobs=[-0.5 * (i + 1) for i in range(len(names))]),
    ))

    for a in catalog.actions:
        reply = f"Emotion: attentive Response: I will go with {a.name.lower()} here. [a{a.index}]"
        rules.append(ScriptRule(RoleTag.SYSTEM, a.strategy_prompt, ChatResponse.of(reply)))

    helpful = _tag_alternation(HELPFUL[task_id])
    harmful = _tag_alternation(HARMFUL[task_id])
    rules += [
        ScriptRule(RoleTag.USER, rf"just said: [^\n]*\[a({helpful})\]",
                   ChatResponse.of("That actually helps, thank you. [up]"), regex=True),
        ScriptRule(RoleTag.USER, rf"just said: [^\n]*\[a({harmful})\]",
                   ChatResponse.of("That makes this feel worse. [down]"), regex=True),
        ScriptRule(RoleTag.EMOTION, "[up]", ChatResponse.of("Hopeful.")),
        ScriptRule(RoleTag.EMOTION, "[down]", ChatResponse.of("Emotion: upset")),
    ]

    two, one, worse, same = _CRITIC[task_id]
    rules += [
        ScriptRule(RoleTag.CRITIC, r"(?s)\[up\].*\[up\]", ChatResponse.of(two), regex=True),
        ScriptRule(RoleTag.CRITIC, r"\[down\]\n\n", ChatResponse.of(worse), regex=True),
        ScriptRule(RoleTag.CRITIC, "[up]", ChatResponse.of(one)),
    ]
    return ScriptedBackend(
        rules,
        default_response=ChatResponse.of("I am not sure."),
        role_defaults={
            RoleTag.POLICY: ChatResponse.of(POLICY_REPLY[task_id]),
            RoleTag.USER: ChatResponse.of("I am still not sure about this. [flat]"),
            RoleTag.EMOTION: ChatResponse.of("anxious"),
            RoleTag.CRITIC: ChatResponse.of(same),
        },
        supports_logprobs=supports_logprobs,
    )
