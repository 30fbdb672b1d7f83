import numpy as np
import pytest

from priorplan.core import CaseInfo, DialogueState, TaskId
from priorplan.emotion import EmotionTracker
from priorplan.environment import (
    SelfPlay,
    cb_reward,
    extract_deal_price,
    judge,
    map_critic_verdict,
    parse_system_reply,
)
from priorplan.errors import InvalidCase, MalformedPrice, TurnLimitReached
from priorplan.gateway import CallableBackend, ChatResponse, Gateway, RoleTag, ScriptedBackend
from priorplan.learner import ReplayBuffer
from priorplan.prior import ActionPrior
from priorplan.tasks import CATALOGS, SAMPLE_CASES, Status, get_profile
from priorplan.value import HashEncoder, QHeadParams, ValueModel

ESC_PROFILE = get_profile(TaskId.ESCONV)


def test_verdict_examples():
    assert map_critic_verdict("Yes, the patient's emotional issues have been resolved.", ESC_PROFILE) == (
        1.0, Status.COMPLETED)
    assert map_critic_verdict("No, the Student did not try to translate.", get_profile("CIMA")) == (
        -0.5, Status.ONGOING)
    assert map_critic_verdict("The persuadee has a positive attitude towards donating but hasn't decided yet.",
                              get_profile("P4G")) == (0.1, Status.ONGOING)


def test_verdict_tolerates_formatting():
    raw = "  no,  the patient feels\nWORSE. "
    assert map_critic_verdict(raw, ESC_PROFILE) == (-1.0, Status.ONGOING)
    assert map_critic_verdict("Yes, the patient’s emotional issues have been resolved", ESC_PROFILE) == (
        1.0, Status.COMPLETED)


def test_cima_verdict_with_sentence_filled_in():
    raw = "No, the Student only correctly translated a part of \"The cat is on the table\"."
    assert map_critic_verdict(raw, get_profile("CIMA")) == (0.5, Status.ONGOING)


def test_unparseable_verdict_is_neutral(caplog):
    assert map_critic_verdict("Hmm, hard to say.", ESC_PROFILE) == (0.0, Status.ONGOING)
    assert "CriticUnparseable" in caplog.text


def test_deal_price_examples():
    assert extract_deal_price("They have reached a deal at 120") == 120.0
    assert extract_deal_price("They have not reached a deal.") is None
    assert extract_deal_price("They have reached a deal at $1,250") == 1250.0
    with pytest.raises(MalformedPrice):
        extract_deal_price("They have reached a deal at a fair price")


def test_cb_reward_examples(cb_case):
    assert cb_case.numeric_slots["listed_price"] == 150 and cb_case.numeric_slots["buyer_target_price"] == 100
    assert cb_reward(120, cb_case) == pytest.approx(0.6, abs=1e-15)
    assert cb_reward(100, cb_case) == 1.0
    assert cb_reward(150, cb_case) == 0.0
    assert cb_reward(None, cb_case) == 0.0
    assert cb_reward(80, cb_case) == 1.0 and cb_reward(200, cb_case) == 0.0  # clamped
    with pytest.raises(InvalidCase):
        cb_reward(120, CaseInfo(TaskId.ESCONV, "x"))


def test_cb_judge(cb_case):
    j = judge("They have reached a deal at $120.", get_profile("CB"), cb_case)
    assert (j.reward, j.status, j.deal_price) == (pytest.approx(0.6), Status.COMPLETED, 120.0)
    assert map_critic_verdict("They have not reached a deal.", get_profile("CB"), cb_case) == (0.0, Status.ONGOING)
    # a deal verdict without a readable price is treated as no deal
    assert judge("They have reached a deal at a fair price", get_profile("CB"), cb_case).status is Status.ONGOING


def test_parse_system_reply():
    assert parse_system_reply("Emotion: calm Response: How are you feeling?") == "How are you feeling?"
    assert parse_system_reply("Just text") == "Just text"


# ---------------------------------------------------------------- self-play


def world(task, critic, policy="1,2,3,4", log=None, logprobs=False):
    """Scripted world; ``critic`` is a function of the critic call number (1-based)."""
    n = {"critic": 0}

    def route(req):
        if log is not None:
            log.append(req)
        if req.role_tag is RoleTag.CRITIC:
            n["critic"] += 1
            return critic(n["critic"])
        return {
            RoleTag.POLICY: policy,
            RoleTag.SYSTEM: "Emotion: calm Response: I hear you.",
            RoleTag.USER: "I still feel low.",
            RoleTag.EMOTION: "sad",
        }[req.role_tag]

    return Gateway(CallableBackend(route, supports_logprobs=logprobs))


def selfplay(task, gateway, max_turns=8, emotions=True, k=4, seed=0):
    profile = get_profile(task, max_turns)
    vm = ValueModel(QHeadParams.init(16, (8, 8), rng=seed), HashEncoder(16), profile.catalog)
    return SelfPlay(profile, ActionPrior(profile.catalog, k=k, with_emotions=emotions), vm, gateway,
                    EmotionTracker(enabled=emotions))


SAME = "No, the patient feels the same."
SOLVED = "Yes, the patient's emotional issues have been resolved."


def test_completes_on_turn_one(esconv_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED))
    res = sp.run_episode(esconv_case, 0.0, rng)
    assert (res.turns, res.outcome) == (1, Status.COMPLETED)
    assert res.transitions[-1].terminal and res.transitions[-1].reward == 1.0
    assert res.transitions[-1].candidate_indices_next == ()


def test_completes_on_turn_three(esconv_case, rng):
    buf = ReplayBuffer(100)
    sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED if i == 3 else SAME))
    res = sp.run_episode(esconv_case, 0.5, rng, buffer=buf)
    assert (res.turns, res.outcome, len(res.transitions), len(buf)) == (3, Status.COMPLETED, 3, 3)
    assert [t.terminal for t in res.transitions] == [False, False, True]
    assert [t.reward for t in res.transitions] == [-0.5, -0.5, 1.0]
    # the stored next-state candidates are the next turn's candidate set
    assert res.transitions[0].candidate_indices_next == (1, 2, 3, 4)
    assert res.transitions[0].next_state_text == res.transitions[1].state_text


def test_never_completes_fails_at_cap(esconv_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SAME))
    res = sp.run_episode(esconv_case, 0.3, rng)
    assert (res.turns, res.outcome) == (8, Status.FAILED)
    assert res.records[-1]["status"] == "Failed" and res.transitions[-1].terminal
    assert not any(t.terminal for t in res.transitions[:-1])


def test_run_turn_refused_at_cap(esconv_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SAME), max_turns=2)
    state = DialogueState(esconv_case)
    out1 = sp.run_turn(state, 0.0, rng)
    assert out1.status is Status.ONGOING
    out2 = sp.run_turn(out1.state, 0.0, rng, out1.next_candidates)
    assert out2.status is Status.FAILED and out2.transition.terminal
    with pytest.raises(TurnLimitReached):
        sp.run_turn(out2.state, 0.0, rng)


def test_turn_call_order_and_count(esconv_case, rng):
    log = []
    sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED if i == 3 else SAME, log=log))
    res = sp.run_episode(esconv_case, 0.0, rng)
    roles = [r.role_tag.value for r in log]
    assert len(roles) == 5 * res.turns
    assert roles[:5] == ["Policy", "System", "User", "Emotion", "Critic"]
    assert roles[5:10] == ["Policy", "System", "User", "Emotion", "Critic"]
    assert roles.count("Policy") == res.turns


def test_strategy_prompt_is_injected(esconv_case, rng):
    log = []
    sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED, log=log))
    res = sp.run_episode(esconv_case, 0.0, rng)
    chosen = sp.profile.catalog[res.transitions[0].action_index]
    system_req = next(r for r in log if r.role_tag is RoleTag.SYSTEM)
    assert chosen.strategy_prompt in system_req.prompt_text()


def test_deterministic_transitions(esconv_case):
    def run():
        sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED if i == 4 else SAME))
        return sp.run_episode(esconv_case, 0.5, np.random.default_rng(9))

    a, b = run(), run()
    assert a.transitions == b.transitions and a.records == b.records


def test_emotions_flow_into_state(esconv_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SOLVED if i == 2 else SAME))
    res = sp.run_episode(esconv_case, 0.0, rng)
    assert "Emotions: sad -> sad" in res.transitions[-1].next_state_text
    assert [r["emotion"] for r in res.records] == ["sad", "sad"]


def test_cb_episode_sl(cb_case, rng):
    def critic(i):
        return "They have reached a deal at 120" if i == 2 else "They have not reached a deal."

    sp = selfplay("CB", world("CB", critic))
    res = sp.run_episode(cb_case, 0.0, rng)
    assert (res.turns, res.outcome, res.deal_price) == (2, Status.COMPLETED, 120.0)
    assert res.sl == pytest.approx(0.6)
    assert res.records[-1]["sl"] == res.sl


def test_cb_failed_episode_sl_zero(cb_case, rng):
    sp = selfplay("CB", world("CB", lambda i: "They have not reached a deal."), max_turns=3)
    res = sp.run_episode(cb_case, 0.0, rng)
    assert (res.outcome, res.sl) == (Status.FAILED, 0.0)


def test_user_quit(esconv_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SAME))
    replies = iter(["fine", None])
    res = sp.run_episode(esconv_case, 0.0, rng, user_reply=lambda state, text: next(replies))
    assert res.outcome is Status.FAILED and len(res.transitions) == 1
    assert len(res.transcript) == 3  # partial transcript keeps the unanswered system line


def test_wrong_task_case(cb_case, rng):
    sp = selfplay("ESConv", world("ESConv", lambda i: SAME))
    with pytest.raises(InvalidCase):
        sp.run_episode(cb_case, 0.0, rng)


def test_every_task_runs(rng):
    for task in TaskId:
        sp = selfplay(task, world(task, lambda i: "???"), max_turns=2)
        res = sp.run_episode(SAMPLE_CASES[task][0], 0.5, rng)
        assert res.turns == 2 and res.outcome is Status.FAILED
