import json

import httpx
import pytest

from priorplan.errors import BudgetExceeded, ProtocolError, TransportError, UnsupportedCapability
from priorplan.gateway import (
    CallableBackend,
    ChatRequest,
    ChatResponse,
    Gateway,
    OpenAIBackend,
    RoleTag,
    ScriptedBackend,
    ScriptRule,
    load_script,
    truncate_tokens,
)

from conftest import no_sleep, scripted


def req(text, role=RoleTag.CRITIC, **kw):
    return ChatRequest(role, "sys", (("user", text),), **kw)


def test_scripted_match_and_default(make_gateway):
    gw = make_gateway(scripted([("Critic", "[up]", "Yes.")], default="fallback"))
    assert gw.complete(req("... [up] ...")).text == "Yes."
    assert gw.complete(req("nothing")).text == "fallback"
    assert gw.calls[RoleTag.CRITIC] == 2


def test_scripted_rules_are_role_scoped(make_gateway):
    gw = make_gateway(scripted([("User", "hi", "user reply")], default="d", Critic="critic default"))
    assert gw.complete(req("hi", RoleTag.USER)).text == "user reply"
    assert gw.complete(req("hi", RoleTag.CRITIC)).text == "critic default"
    assert gw.complete(req("hi", RoleTag.SYSTEM)).text == "d"


def test_scripted_truncates_to_max_tokens(make_gateway):
    gw = make_gateway(scripted(default="one two three four five"))
    assert gw.complete(req("x", max_tokens=3)).text == "one two three"
    assert truncate_tokens("a b", 5) == "a b"


def test_load_script(tmp_path, make_gateway):
    path = tmp_path / "script.yaml"
    path.write_text(
        "default: nope\n"
        "defaults:\n  Emotion: calm\n"
        "rules:\n"
        "  - {role: Critic, key: '[solved]', response: 'Yes, solved.'}\n"
        "  - {role: Policy, key: 'Next action:', response: [Question, Others], logprobs: [-0.1, -2.0]}\n"
        "  - {role: User, key: '^go\\b', regex: true, response: 'gone'}\n"
    )
    gw = make_gateway(load_script(path))
    assert gw.complete(req("x [solved]")).text == "Yes, solved."
    assert gw.complete(req("anything", RoleTag.EMOTION)).text == "calm"
    assert gw.complete(req("go now", RoleTag.USER)).text == "gone"
    assert gw.complete(req("ago", RoleTag.USER)).text == "nope"
    beam = gw.complete_beam(req("Next action:", RoleTag.POLICY, beam_width=2))
    assert [(c.text, c.logprob) for c in beam.continuations] == [("Question", -0.1), ("Others", -2.0)]


def _beam_backend(pairs, logprobs=True):
    texts = [t for t, _ in pairs]
    return ScriptedBackend(
        [], ChatResponse.of(*texts, logprobs=[lp for _, lp in pairs] if logprobs else None),
        supports_logprobs=logprobs,
    )


def test_beam_sorted_by_logprob(make_gateway):
    gw = make_gateway(_beam_backend([("a", -2.0), ("b", -0.5), ("c", -1.0)]))
    out = gw.complete_beam(req("s", RoleTag.POLICY, beam_width=3))
    assert [c.text for c in out.continuations] == ["b", "c", "a"]
    one = gw.complete_beam(req("s", RoleTag.POLICY, beam_width=1))
    assert [c.text for c in one.continuations] == ["b"]


def test_beam_without_logprobs(make_gateway):
    gw = make_gateway(_beam_backend([("a", 0.0)], logprobs=False))
    with pytest.raises(UnsupportedCapability):
        gw.complete_beam(req("s", RoleTag.POLICY, beam_width=1))


def test_beam_short_reply_is_protocol_error(make_gateway):
    gw = make_gateway(_beam_backend([("a", -1.0)]))
    with pytest.raises(ProtocolError):
        gw.complete_beam(req("s", RoleTag.POLICY, beam_width=2))


def test_budget(make_gateway):
    gw = make_gateway(scripted(default="ok"), call_cap=2)
    gw.complete(req("1"))
    gw.complete(req("2"))
    with pytest.raises(BudgetExceeded):
        gw.complete(req("3"))


def test_per_role_backends(make_gateway):
    gw = make_gateway(CallableBackend(lambda r: "default"), backends={"Critic": CallableBackend(lambda r: "critic")})
    assert gw.complete(req("x")).text == "critic"
    assert gw.complete(req("x", RoleTag.USER)).text == "default"


def _openai(handler):
    return OpenAIBackend("http://llm.test", "m", "key", client=httpx.Client(transport=httpx.MockTransport(handler)))


def test_http_500_three_times_exhausts_retries():
    hits = []
    delays = []

    def handler(request):
        hits.append(request)
        return httpx.Response(500, text="boom")

    gw = Gateway(_openai(handler), max_retries=2, sleep=delays.append)
    with pytest.raises(TransportError):
        gw.complete(req("x"))
    assert len(hits) == 3
    assert delays == [0.5, 1.0]  # exponential backoff


def test_http_recovers_after_transient_failure():
    status = iter([503, 200])

    def handler(request):
        code = next(status)
        if code != 200:
            return httpx.Response(code)
        return httpx.Response(200, json={"choices": [{"message": {"content": "fine"}}]})

    assert Gateway(_openai(handler), sleep=no_sleep).complete(req("x")).text == "fine"


def test_http_request_shape_and_beam_logprobs():
    seen = {}

    def handler(request):
        seen.update(json.loads(request.content))
        seen["auth"] = request.headers.get("authorization")
        seen["url"] = str(request.url)
        choices = [
            {"message": {"content": "Question"}, "logprobs": {"content": [{"logprob": -0.25}, {"logprob": -0.5}]}},
            {"message": {"content": "Others"}, "logprobs": {"content": [{"logprob": -0.1}]}},
        ]
        return httpx.Response(200, json={"choices": choices})

    gw = Gateway(_openai(handler), sleep=no_sleep)
    out = gw.complete_beam(req("state", RoleTag.POLICY, beam_width=2, max_tokens=25, temperature=1.0))
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["auth"] == "Bearer key"
    assert seen["n"] == 2 and seen["logprobs"] is True and seen["use_beam_search"] is True
    assert seen["max_tokens"] == 25 and seen["temperature"] == 1.0
    assert seen["messages"][0] == {"role": "system", "content": "sys"}
    assert [(c.text, c.logprob) for c in out.continuations] == [("Others", -0.1), ("Question", -0.75)]


def test_http_malformed_body():
    gw = Gateway(_openai(lambda r: httpx.Response(200, text="not json")), sleep=no_sleep)
    with pytest.raises(ProtocolError):
        gw.complete(req("x"))


def test_http_client_error_is_not_retried():
    hits = []

    def handler(request):
        hits.append(1)
        return httpx.Response(401, text="no")

    with pytest.raises(TransportError):
        Gateway(_openai(handler), sleep=no_sleep).complete(req("x"))
    assert len(hits) == 1


def test_fit_history_drops_oldest_pairs():
    gw = Gateway(CallableBackend(lambda r: ""), context_limit=5)
    turns = ["a a", "b b", "c c", "d d"]
    out = gw.fit_history(len(turns), lambda skip: " ".join(turns[skip:]))
    assert out == "c c d d"
    assert Gateway(CallableBackend(lambda r: "")).fit_history(4, lambda s: " ".join(turns[s:])) == " ".join(turns)
