"""Single boundary for every LLM call.

Two backends ship with the package: :class:`OpenAIBackend` speaks the
OpenAI-compatible ``/v1/chat/completions`` protocol over httpx, and
:class:`ScriptedBackend` answers from a rule table so whole self-play runs can
be replayed bit-for-bit in tests.
"""

from __future__ import annotations

import enum
import logging
import math
import os
import re
import threading
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import httpx
import yaml

from .errors import BudgetExceeded, ProtocolError, TransportError, UnsupportedCapability

logger = logging.getLogger(__name__)

POLICY_MAX_TOKENS = 25
DIALOGUE_MAX_TOKENS = 100
EMOTION_MAX_TOKENS = 10
DEFAULT_TEMPERATURE = 1.0


class RoleTag(str, enum.Enum):
    POLICY = "Policy"
    SYSTEM = "System"
    USER = "User"
    CRITIC = "Critic"
    EMOTION = "Emotion"


@dataclass(frozen=True)
class ChatRequest:
    role_tag: RoleTag
    system_prompt: str
    messages: tuple[tuple[str, str], ...]  # (chat role, text); chat role is "user" or "assistant"
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DIALOGUE_MAX_TOKENS
    want_logprobs: bool = False
    beam_width: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "role_tag", RoleTag(self.role_tag))
        object.__setattr__(self, "messages", tuple(tuple(m) for m in self.messages))
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.beam_width is not None and self.beam_width <= 0:
            raise ValueError("beam_width must be positive")

    @property
    def last_message(self) -> str:
        return self.messages[-1][1] if self.messages else ""

    def prompt_text(self) -> str:
        return "\n\n".join([self.system_prompt, *(text for _, text in self.messages)])


@dataclass(frozen=True)
class Continuation:
    text: str
    logprob: float | None = None


@dataclass(frozen=True)
class ChatResponse:
    continuations: tuple[Continuation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "continuations", tuple(self.continuations))
        if not self.continuations:
            raise ProtocolError("response has no continuations")

    @property
    def text(self) -> str:
        return self.continuations[0].text

    @classmethod
    def of(cls, *texts: str, logprobs: Sequence[float] | None = None) -> ChatResponse:
        lps = list(logprobs) if logprobs is not None else [None] * len(texts)
        if len(lps) != len(texts):
            raise ValueError("logprobs must align with texts")
        return cls(tuple(Continuation(t, lp) for t, lp in zip(texts, lps)))


class Backend(Protocol):
    supports_logprobs: bool

    def chat(self, req: ChatRequest) -> ChatResponse: ...


def truncate_tokens(text: str, max_tokens: int) -> str:
    """Whitespace-token truncation used by the in-process backends."""
    tokens = text.split()
    if len(tokens) <= max_tokens:
        return text
    return " ".join(tokens[:max_tokens])


# ---------------------------------------------------------------- scripted


@dataclass(frozen=True)
class ScriptRule:
    role_tag: RoleTag
    key: str
    response: ChatResponse
    regex: bool = False

    def matches(self, role_tag: RoleTag, text: str) -> bool:
        if role_tag is not self.role_tag:
            return False
        if self.regex:
            return re.search(self.key, text) is not None
        return self.key in text


class ScriptedBackend:
    """Deterministic rule-table backend.

    The match key is the text of the request's last message. Rules are tried in
    order and the first one whose ``key`` occurs in it (or matches, for regex
    rules) answers; otherwise ``default_response`` does. A per-role default can
    be supplied through ``role_defaults``.
    """

    def __init__(
        self,
        rules: Iterable[ScriptRule] = (),
        default_response: ChatResponse | None = None,
        role_defaults: Mapping[RoleTag | str, ChatResponse] | None = None,
        supports_logprobs: bool = True,
    ) -> None:
        self.rules = list(rules)
        self.default_response = default_response or ChatResponse.of("")
        self.role_defaults = {RoleTag(k): v for k, v in (role_defaults or {}).items()}
        self.supports_logprobs = supports_logprobs
        self._lock = threading.Lock()
        self.log: list[ChatRequest] = []

    def lookup(self, req: ChatRequest) -> ChatResponse:
        key_text = req.last_message
        for rule in self.rules:
            if rule.matches(req.role_tag, key_text):
                return rule.response
        return self.role_defaults.get(req.role_tag, self.default_response)

    def chat(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            self.log.append(req)
        resp = self.lookup(req)
        return ChatResponse(
            tuple(replace(c, text=truncate_tokens(c.text, req.max_tokens)) for c in resp.continuations)
        )


def _response_from_entry(entry: Mapping) -> ChatResponse:
    resp = entry.get("response", "")
    texts = [resp] if isinstance(resp, str) else list(resp)
    logprobs = entry.get("logprobs")
    return ChatResponse.of(*texts, logprobs=logprobs)


def load_script(path: str | Path, supports_logprobs: bool = True) -> ScriptedBackend:
    """Build a :class:`ScriptedBackend` from a YAML script file.

    Layout::

        default: "fallback text"
        defaults:            # optional per-role fallbacks
          Policy: "1,2,3,4"
        rules:
          - role: Critic
            key: "[solved]"  # substring of the last message
            regex: false     # optional
            response: "Yes, the patient's emotional issues have been resolved."
          - role: Policy
            key: "Next action:"
            response: ["Question", "Reflection of feelings"]
            logprobs: [-0.2, -1.9]
    """
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    rules = [
        ScriptRule(RoleTag(r["role"]), str(r["key"]), _response_from_entry(r), bool(r.get("regex", False)))
        for r in data.get("rules", [])
    ]
    default = _response_from_entry({"response": data.get("default", "")})
    role_defaults = {
        RoleTag(role): _response_from_entry({"response": v} if not isinstance(v, Mapping) else v)
        for role, v in (data.get("defaults") or {}).items()
    }
    return ScriptedBackend(rules, default, role_defaults, supports_logprobs=supports_logprobs)


# ---------------------------------------------------------------- live HTTP


class _Retryable(Exception):
    pass


class OpenAIBackend:
    """OpenAI-compatible chat completions client.

    Beam requests ask for ``n`` continuations with ``use_beam_search`` (a vLLM
    extension) and token log-probabilities; a continuation's log-probability
    is the sum over its tokens.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        supports_logprobs: bool = True,
        client: httpx.Client | None = None,
    ) -> None:
        endpoint = endpoint.rstrip("/")
        if not endpoint.endswith("/chat/completions"):
            endpoint = endpoint + ("/chat/completions" if endpoint.endswith("/v1") else "/v1/chat/completions")
        self.url = endpoint
        self.model = model
        self.api_key = api_key
        self.supports_logprobs = supports_logprobs
        self._client = client or httpx.Client(timeout=timeout)

    def payload(self, req: ChatRequest) -> dict:
        messages = [{"role": "system", "content": req.system_prompt}] if req.system_prompt else []
        messages += [{"role": role, "content": text} for role, text in req.messages]
        body: dict = {
            "model": self.model,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.want_logprobs:
            body["logprobs"] = True
            body["top_logprobs"] = 1
            if req.beam_width:
                body["n"] = req.beam_width
                body["use_beam_search"] = True
        return body

    def chat(self, req: ChatRequest) -> ChatResponse:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            r = self._client.post(self.url, json=self.payload(req), headers=headers)
        except httpx.HTTPError as exc:
            raise _Retryable(f"transport failure: {exc!r}") from exc
        if r.status_code >= 500 or r.status_code == 429:
            raise _Retryable(f"HTTP {r.status_code}")
        if r.status_code >= 400:
            raise TransportError(f"HTTP {r.status_code}: {r.text[:200]}")
        try:
            body = r.json()
            choices = body["choices"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed completion body: {r.text[:200]}") from exc
        out = []
        for ch in choices:
            try:
                text = ch["message"]["content"] or ""
            except (KeyError, TypeError) as exc:
                raise ProtocolError("choice without message content") from exc
            lp = None
            content = (ch.get("logprobs") or {}).get("content") if isinstance(ch, dict) else None
            if content:
                lp = float(sum(tok["logprob"] for tok in content))
            out.append(Continuation(text, lp))
        return ChatResponse(tuple(out))


class CallableBackend:
    """Wrap a plain function ``ChatRequest -> ChatResponse | str``."""

    def __init__(self, fn: Callable[[ChatRequest], ChatResponse | str], supports_logprobs: bool = False) -> None:
        self.fn = fn
        self.supports_logprobs = supports_logprobs

    def chat(self, req: ChatRequest) -> ChatResponse:
        out = self.fn(req)
        return ChatResponse.of(out) if isinstance(out, str) else out


# ---------------------------------------------------------------- gateway


def approx_tokens(text: str) -> int:
    return len(text.split())


@dataclass
class Gateway:
    """Routes requests to per-role backends with retries and a call budget.

    ``backends`` maps a role tag to its backend; roles without an entry use
    ``default``. ``context_limit`` is in whitespace tokens and drives
    :meth:`fit_history`.
    """

    default: Backend
    backends: dict[RoleTag, Backend] = field(default_factory=dict)
    max_retries: int = 2
    backoff_base: float = 0.5
    call_cap: int | None = None
    context_limit: int | None = None
    sleep: Callable[[float], None] = time.sleep

    def __post_init__(self) -> None:
        self.backends = {RoleTag(k): v for k, v in self.backends.items()}
        self._lock = threading.Lock()
        self.calls: Counter[RoleTag] = Counter()

    @property
    def total_calls(self) -> int:
        with self._lock:
            return sum(self.calls.values())

    def backend_for(self, role: RoleTag) -> Backend:
        return self.backends.get(RoleTag(role), self.default)

    def _charge(self, role: RoleTag) -> None:
        with self._lock:
            if self.call_cap is not None and sum(self.calls.values()) >= self.call_cap:
                raise BudgetExceeded(f"call cap {self.call_cap} reached")
            self.calls[role] += 1

    def complete(self, req: ChatRequest) -> ChatResponse:
        self._charge(req.role_tag)
        backend = self.backend_for(req.role_tag)
        attempt = 0
        while True:
            try:
                resp = backend.chat(req)
                break
            except _Retryable as exc:
                if attempt >= self.max_retries:
                    raise TransportError(f"{exc} after {attempt + 1} attempts") from exc
                delay = self.backoff_base * (2**attempt)
                logger.warning("transient LLM failure (%s); retrying in %.2fs", exc, delay)
                self.sleep(delay)
                attempt += 1
        if not resp.continuations:
            raise ProtocolError("empty response")
        return resp

    def complete_beam(self, req: ChatRequest) -> ChatResponse:
        k = req.beam_width or 1
        if not self.backend_for(req.role_tag).supports_logprobs:
            raise UnsupportedCapability("backend cannot return log-probabilities")
        req = replace(req, want_logprobs=True, beam_width=k)
        resp = self.complete(req)
        conts = list(resp.continuations)
        if any(c.logprob is None for c in conts):
            raise UnsupportedCapability("backend returned continuations without log-probabilities")
        if any(not math.isfinite(c.logprob) for c in conts):
            raise ProtocolError("non-finite log-probability")
        if len(conts) < k:
            raise ProtocolError(f"asked for {k} continuations, got {len(conts)}")
        conts.sort(key=lambda c: -c.logprob)  # stable: ties keep backend order
        return ChatResponse(tuple(conts[:k]))

    def fit_history(self, n_turns: int, render: Callable[[int], str]) -> str:
        """Render with the oldest turns dropped pairwise until within the context limit.

        ``render(skip)`` must render the prompt with the first ``skip`` history
        utterances omitted.
        """
        skip = 0
        text = render(skip)
        if self.context_limit is None:
            return text
        while approx_tokens(text) > self.context_limit and skip < n_turns:
            skip = min(n_turns, skip + 2)
            text = render(skip)
        return text


def gateway_from_env(prefix: str = "LLM", **kwargs) -> Gateway:
    """Live gateway configured from ``LLM_ENDPOINT``/``LLM_MODEL``/``LLM_API_KEY``.

    Role-specific endpoints override the default, e.g. ``LLM_ENDPOINT_CRITIC``.
    """
    endpoint = os.environ.get(f"{prefix}_ENDPOINT")
    if not endpoint:
        raise ValueError(f"{prefix}_ENDPOINT is not set")
    model = os.environ.get(f"{prefix}_MODEL", "default")
    key = os.environ.get(f"{prefix}_API_KEY")
    default = OpenAIBackend(endpoint, model, key)
    backends: dict[RoleTag, Backend] = {}
    for role in RoleTag:
        ep = os.environ.get(f"{prefix}_ENDPOINT_{role.value.upper()}")
        if ep:
            m = os.environ.get(f"{prefix}_MODEL_{role.value.upper()}", model)
            backends[role] = OpenAIBackend(ep, m, key)
    return Gateway(default, backends, **kwargs)
