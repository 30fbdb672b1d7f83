"""Self-play: one turn is prior -> value selection -> system -> user -> emotion -> critic.

The candidate set for the next state is computed at the end of a non-terminal
turn, stored in the transition for the Bellman backup, and reused as the next
turn's candidate set. Each turn therefore costs exactly one policy call.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import (
    CaseInfo,
    DialogueState,
    Speaker,
    TaskId,
    Transition,
    Utterance,
    append_turn,
    render_history,
    serialize_state,
    with_emotion,
)
from .emotion import EmotionTracker
from .errors import InvalidCase, MalformedPrice, TurnLimitReached
from .gateway import DIALOGUE_MAX_TOKENS, ChatRequest, Gateway, RoleTag
from .learner import ReplayBuffer
from .prior import ActionPrior, CandidateSet
from .tasks import (
    CRITIC_EMOTION_LINE,
    CRITIC_EMOTION_STATES_LINE,
    RolePrompt,
    Status,
    TaskProfile,
    Verdict,
    strip_emotion_refs,
)
from .value import ScoredCandidates, ValueModel, score_candidates, select_action

logger = logging.getLogger(__name__)

# tasks whose first system turn answers the case situation as the user's opening
_OPENS_WITH_SITUATION = {TaskId.ESCONV, TaskId.EXTES}
CONVERSATION_START = "(the conversation has just started)"


# ---------------------------------------------------------------- verdicts


def _norm(text: str) -> str:
    text = text.replace("’", "'").replace("‘", "'")
    return " ".join(text.split()).lower()


def _option_stem(v: Verdict) -> str:
    """The part of the option that is fixed across cases, normalized."""
    stem = v.option.split("[", 1)[0]
    return _norm(stem).rstrip(" .")


_DEAL = re.compile(r"reached a deal at\s*(.*)", re.IGNORECASE | re.DOTALL)
_NUMBER = re.compile(r"\d[\d,]*(?:\.\d+)?|\.\d+")


def extract_deal_price(raw: str) -> float | None:
    m = _DEAL.search(raw)
    if m is None or re.search(r"not reached a deal", raw, re.IGNORECASE):
        return None
    num = _NUMBER.search(m.group(1))
    if num is None:
        raise MalformedPrice(f"deal phrase without a price: {raw!r}")
    return float(num.group(0).replace(",", ""))


def cb_reward(deal_price: float | None, case: CaseInfo) -> float:
    """Sale-to-list ratio from the buyer's side, clamped to [0, 1]; no deal gives 0."""
    try:
        listed = float(case.numeric_slots["listed_price"])
        target = float(case.numeric_slots["buyer_target_price"])
    except KeyError as exc:
        raise InvalidCase(f"CB case lacks {exc.args[0]}") from exc
    if not listed > target:
        raise InvalidCase("listed_price must exceed buyer_target_price")
    if deal_price is None:
        return 0.0
    sl = (listed - deal_price) / (listed - target)
    return min(1.0, max(0.0, sl))


@dataclass(frozen=True)
class Judgement:
    reward: float
    status: Status
    deal_price: float | None = None
    matched: str | None = None


def judge(raw: str, profile: TaskProfile, case: CaseInfo | None = None) -> Judgement:
    text = _norm(raw)
    for v in profile.verdict_map:
        if _option_stem(v) not in text:
            continue
        if v.reward is not None:
            return Judgement(v.reward, v.status, matched=v.option)
        # CB deal verdict: reward comes from the agreed price
        try:
            price = extract_deal_price(raw)
        except MalformedPrice:
            logger.warning("MalformedPrice: %r treated as no deal", raw)
            return Judgement(0.0, Status.ONGOING, matched=None)
        if price is None:
            continue
        reward = cb_reward(price, case) if case is not None else 0.0
        return Judgement(reward, v.status, price, v.option)
    logger.warning("CriticUnparseable: %r", raw)
    return Judgement(0.0, Status.ONGOING)


def map_critic_verdict(raw: str, profile: TaskProfile, case: CaseInfo | None = None) -> tuple[float, Status]:
    j = judge(raw, profile, case)
    return j.reward, j.status


# ---------------------------------------------------------------- prompts


def parse_system_reply(raw: str) -> str:
    """Keep only the ``Response:`` part of an ``Emotion: ... Response: ...`` reply."""
    m = re.search(r"response\s*:\s*(.*)", raw, re.IGNORECASE | re.DOTALL)
    if m:
        return " ".join(m.group(1).split())
    stripped = re.sub(r"^\s*emotion\s*:\s*\S+\s*", "", raw, flags=re.IGNORECASE)
    return " ".join(stripped.split())


class _Fields(dict):
    def __missing__(self, key: str) -> str:
        return ""


def _fmt_price(v: float) -> str:
    return f"{v:g}"


def prompt_fields(state: DialogueState, with_emotions: bool, skip: int = 0) -> _Fields:
    case = state.case
    f = _Fields(case.extras)
    f["background"] = case.background
    for k, v in case.numeric_slots.items():
        f[k] = _fmt_price(v)
    f["conversation"] = render_history(state.history[skip:], case.task_id)
    last_user = state.last(Speaker.USER)
    last_sys = state.last(Speaker.SYSTEM)
    if last_user is not None:
        f["last_user"] = last_user.text
    elif case.task_id in _OPENS_WITH_SITUATION:
        f["last_user"] = case.background
    else:
        f["last_user"] = CONVERSATION_START
    f["last_system"] = last_sys.text if last_sys is not None else CONVERSATION_START
    emotions = state.emotions.render()
    f["emotion_line"] = CRITIC_EMOTION_LINE.format(emotions=emotions) if with_emotions else ""
    states_line = CRITIC_EMOTION_STATES_LINE.get(case.task_id, "")
    f["emotion_states_line"] = states_line.format(emotions=emotions) if with_emotions else ""
    return f


def role_request(
    role: RoleTag,
    prompt: RolePrompt,
    state: DialogueState,
    gateway: Gateway,
    *,
    with_emotions: bool,
    extra: Mapping[str, str] | None = None,
    max_tokens: int = DIALOGUE_MAX_TOKENS,
) -> ChatRequest:
    def render(skip: int) -> str:
        f = prompt_fields(state, with_emotions, skip)
        f.update(extra or {})
        text = prompt.directive.format_map(f)
        return text if with_emotions else strip_emotion_refs(text)

    f = prompt_fields(state, with_emotions)
    f.update(extra or {})
    instruction = prompt.instruction.format_map(f)
    if not with_emotions:
        instruction = strip_emotion_refs(instruction)
    directive = gateway.fit_history(len(state.history), render)
    return ChatRequest(role, instruction, (("user", directive),), max_tokens=max_tokens)


# ---------------------------------------------------------------- self-play


@dataclass
class TurnOutcome:
    state: DialogueState
    transition: Transition
    status: Status
    record: dict
    next_candidates: CandidateSet | None
    scored: ScoredCandidates


@dataclass
class EpisodeResult:
    transcript: tuple[Utterance, ...]
    transitions: tuple[Transition, ...]
    outcome: Status
    turns: int
    deal_price: float | None = None
    sl: float | None = None
    records: tuple[dict, ...] = ()
    episode_id: str = ""


@dataclass
class UserQuit:
    """run_turn result when the human user quits; ``state`` ends on the unanswered system line."""

    state: DialogueState


UserReplyFn = Callable[[DialogueState, str], "str | None"]


@dataclass
class SelfPlay:
    """Wires the prior, value model, tracker and gateway into the turn protocol."""

    profile: TaskProfile
    prior: ActionPrior
    vm: ValueModel
    gateway: Gateway
    tracker: EmotionTracker = field(default_factory=EmotionTracker)

    @property
    def with_emotions(self) -> bool:
        return self.tracker.enabled

    def state_text(self, state: DialogueState) -> str:
        return serialize_state(state, self.profile.catalog, with_emotions=self.with_emotions)

    def initial_state(self, case: CaseInfo) -> DialogueState:
        case.validate()
        if case.task_id is not self.profile.task_id:
            raise InvalidCase(f"case is {case.task_id.value}, profile is {self.profile.task_id.value}")
        return DialogueState(case)

    def run_turn(
        self,
        state: DialogueState,
        epsilon: float,
        rng: np.random.Generator,
        candidates: CandidateSet | None = None,
        user_reply: UserReplyFn | None = None,
    ) -> TurnOutcome | UserQuit:
        """Play one system/user exchange. Returns :class:`UserQuit` if ``user_reply`` returns None."""
        if state.turn >= self.profile.max_turns:
            raise TurnLimitReached(f"turn {state.turn} >= max_turns {self.profile.max_turns}")
        catalog = self.profile.catalog
        s_text = self.state_text(state)

        if candidates is None:
            candidates = self.prior.propose(state, self.gateway)
        scored = score_candidates(self.vm, s_text, candidates)
        action = catalog[select_action(scored, epsilon, rng)]

        sys_req = role_request(
            RoleTag.SYSTEM, self.profile.system_prompt, state, self.gateway,
            with_emotions=self.with_emotions, extra={"action_prompt": action.strategy_prompt},
        )
        sys_text = parse_system_reply(self.gateway.complete(sys_req).text)
        state = append_turn(state, Utterance(Speaker.SYSTEM, sys_text, len(state.history)))

        if user_reply is not None:
            usr_text = user_reply(state, sys_text)
            if usr_text is None:
                return UserQuit(state)
        else:
            usr_req = role_request(
                RoleTag.USER, self.profile.user_prompt, state, self.gateway, with_emotions=self.with_emotions
            )
            usr_text = " ".join(self.gateway.complete(usr_req).text.split())
        state = append_turn(state, Utterance(Speaker.USER, usr_text, len(state.history)))

        trace, label = self.tracker.update(state.emotions, usr_text, self.gateway)
        state = with_emotion(state, trace)

        critic_req = role_request(
            RoleTag.CRITIC, self.profile.critic_prompt, state, self.gateway, with_emotions=self.with_emotions
        )
        raw_verdict = self.gateway.complete(critic_req).text
        j = judge(raw_verdict, self.profile, state.case)
        status = j.status
        if status is Status.ONGOING and state.turn >= self.profile.max_turns:
            status = Status.FAILED
        terminal = status is not Status.ONGOING

        next_candidates = None if terminal else self.prior.propose(state, self.gateway)
        transition = Transition(
            state_text=s_text,
            action_index=action.index,
            reward=j.reward,
            next_state_text=self.state_text(state),
            terminal=terminal,
            candidate_indices_next=next_candidates.indices if next_candidates else (),
        )
        record = {
            "turn": state.turn,
            "action_index": action.index,
            "action_name": action.name,
            "candidates": list(candidates.indices),
            "q_scores": [round(v, 12) for v in scored.raw_scores],
            "system": sys_text,
            "user": usr_text,
            "emotion": label,
            "verdict": raw_verdict,
            "reward": j.reward,
            "status": status.value,
            "terminal": terminal,
            "deal_price": j.deal_price,
        }
        return TurnOutcome(state, transition, status, record, next_candidates, scored)

    def run_episode(
        self,
        case: CaseInfo,
        epsilon: float,
        rng: np.random.Generator,
        *,
        buffer: ReplayBuffer | None = None,
        episode_id: str = "",
        on_transition: Callable[[Transition], None] | None = None,
        user_reply: UserReplyFn | None = None,
    ) -> EpisodeResult:
        """Loop turns until a Completed verdict or the turn cap.

        ``on_transition`` fires after every turn (the trainer uses it to run
        updates between turns); transitions go to ``buffer`` first.
        """
        self.vm.begin_episode()
        state = self.initial_state(case)
        transitions: list[Transition] = []
        records: list[dict] = []
        candidates: CandidateSet | None = None
        status = Status.ONGOING
        deal_price = None
        while status is Status.ONGOING:
            out = self.run_turn(state, epsilon, rng, candidates, user_reply=user_reply)
            if isinstance(out, UserQuit):
                state, status = out.state, Status.FAILED
                break
            state, candidates, status = out.state, out.next_candidates, out.status
            if out.record["deal_price"] is not None and status is Status.COMPLETED:
                deal_price = out.record["deal_price"]
            transitions.append(out.transition)
            rec = {"episode": episode_id, "task": self.profile.task_id.value, "case_id": case.case_id,
                   "max_turns": self.profile.max_turns, **out.record}
            records.append(rec)
            if buffer is not None:
                buffer.push(out.transition)
            if on_transition is not None:
                on_transition(out.transition)

        sl = None
        if self.profile.task_id is TaskId.CB:
            sl = cb_reward(deal_price, case) if status is Status.COMPLETED else 0.0
            if records:
                records[-1]["sl"] = sl
        return EpisodeResult(
            transcript=state.history,
            transitions=tuple(transitions),
            outcome=status,
            turns=state.turn,
            deal_price=deal_price if status is Status.COMPLETED else None,
            sl=sl,
            records=tuple(records),
            episode_id=episode_id,
        )


def transcript_lines(records: Sequence[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)
