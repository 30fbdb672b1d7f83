"""Emotion tracking: one LLM call per user turn, labels appended to a trace."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import EmotionTrace
from .errors import EmptyLabel
from .gateway import EMOTION_MAX_TOKENS, ChatRequest, Gateway, RoleTag
from .tasks import EMOTION_DIRECTIVE, EMOTION_INSTRUCTION

NEUTRAL = "neutral"

_PREFIX = re.compile(r"^\s*emotion\s*:\s*", re.IGNORECASE)
_WORD = re.compile(r"[A-Za-z]+")


def parse_emotion(reply: str) -> str:
    m = _WORD.search(_PREFIX.sub("", reply, count=1))
    if m is None:
        raise EmptyLabel(f"no alphabetic token in {reply!r}")
    return m.group(0).lower()


def emotion_request(user_utterance: str) -> ChatRequest:
    if not user_utterance.strip():
        raise ValueError("utterance must be non-empty")
    return ChatRequest(
        RoleTag.EMOTION,
        EMOTION_INSTRUCTION,
        (("user", EMOTION_DIRECTIVE.format(utterance=user_utterance)),),
        max_tokens=EMOTION_MAX_TOKENS,
    )


def infer_emotion(user_utterance: str, gateway: Gateway) -> str:
    """Label the utterance's emotion. Raises EmptyLabel on an unusable reply."""
    return parse_emotion(gateway.complete(emotion_request(user_utterance)).text)


def accumulate(trace: EmotionTrace, label: str) -> EmotionTrace:
    return EmotionTrace(trace.labels + (label,))


@dataclass
class EmotionTracker:
    enabled: bool = True

    def update(self, trace: EmotionTrace, user_utterance: str, gateway: Gateway) -> tuple[EmotionTrace, str | None]:
        """Return the extended trace and the new label (None when disabled)."""
        if not self.enabled:
            return trace, None
        try:
            label = infer_emotion(user_utterance, gateway)
        except EmptyLabel:
            label = NEUTRAL
        return accumulate(trace, label), label
