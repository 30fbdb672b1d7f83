import math
import re

import pytest
from hypothesis import given, strategies as st

from priorplan.core import DialogueState, TaskId, build_state
from priorplan.errors import UnparseableOutput
from priorplan.gateway import ChatResponse, Gateway, RoleTag, ScriptedBackend, ScriptRule
from priorplan.prior import (
    ActionPrior,
    PriorDistribution,
    PriorSource,
    ProjectionTable,
    build_policy_prompt,
    default_projection_table,
    dump_projection_table,
    estimate_prior_beam,
    fallback_candidates,
    load_projection_table,
    normalize_text,
    parse_topk_list,
    project,
    top_k,
)
from priorplan.tasks import CATALOGS, SAMPLE_CASES

from conftest import scripted

ESC = CATALOGS[TaskId.ESCONV]
CB = CATALOGS[TaskId.CB]


def test_policy_prompt_esconv(esconv_case):
    p = build_policy_prompt(DialogueState(esconv_case), ESC, 4)
    assert "Choose the TOP 4 most suitable actions" in p
    assert "Reply ONLY in the given format: 1,2,4,5" in p
    assert all(f"({i}) {ESC[i].name}" in p for i in range(1, 9))
    p2 = build_policy_prompt(DialogueState(esconv_case), ESC, 2)
    assert "TOP 2" in p2 and p2.endswith("Reply ONLY in the given format: 1,2,4,5")


def test_policy_prompt_cb(cb_case):
    assert "maximize the buyer's benefit" in build_policy_prompt(DialogueState(cb_case), CB, 4)


def test_policy_prompt_emotion_toggle(esconv_case):
    state = build_state(esconv_case, [("System", "hi"), ("User", "hey")], ["sad"])
    assert "Emotion History: sad" in build_policy_prompt(state, ESC, 4)
    assert "Emotion" not in build_policy_prompt(state, ESC, 4, with_emotions=False)


def test_parse_topk_examples():
    assert parse_topk_list("6,8,3,1", ESC, 4).indices == (6, 8, 3, 1)
    assert parse_topk_list("6, 6, 8, 99, 3, 1", ESC, 4).indices == (6, 8, 3, 1)
    with pytest.raises(UnparseableOutput):
        parse_topk_list("no idea", ESC, 4)


def test_parse_topk_pads_and_truncates():
    assert parse_topk_list("7", ESC, 4).indices == (7, 1, 2, 3)
    assert parse_topk_list("1,2,3,4,5,6", ESC, 4).indices == (1, 2, 3, 4)
    assert parse_topk_list("Answer: 3, 2 then 8", ESC, 3).indices == (3, 2, 1)


def test_fallback_starts_with_noop():
    assert fallback_candidates(ESC, 4).indices == (5, 1, 2, 3)
    assert fallback_candidates(CB, 2).indices == (1, 2)


@given(st.text(max_size=60), st.integers(min_value=1, max_value=8))
def test_parse_topk_never_returns_invalid(raw, k):
    try:
        c = parse_topk_list(raw, ESC, k)
    except UnparseableOutput:
        assert not re.search(r"\d", raw)
        return
    assert len(c.indices) == k == len(set(c.indices))
    assert all(i in ESC for i in c.indices)


TABLE = default_projection_table(TaskId.ESCONV)


def test_project_examples():
    assert project("Reflection of feelings", TABLE) == 6
    assert project("qzx", TABLE) == 5
    assert project("  REFLECTION   of feelings.", TABLE) == 6
    assert project("8. paraphrase", TABLE) == 8


def test_project_restate_by_brute_force():
    text = "I would gently restate what they said"
    first = None
    for idx, pat in TABLE.patterns:  # independent scan of the matcher list
        if re.search(pat.pattern, normalize_text(text), re.IGNORECASE):
            first = idx
            break
    assert first == 8
    assert project(text, TABLE) == 8


def test_default_tables_cover_every_action():
    for task in TaskId:
        table = default_projection_table(task)
        for a in CATALOGS[task].actions:
            assert project(a.name, table) == a.index, (task, a.name)


def test_projection_table_file_round_trip(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# task, action, pattern\n" + dump_projection_table(TABLE) + "CB, 1, \\bhello\\b\n")
    loaded = load_projection_table(path, TaskId.ESCONV)
    assert [(i, p.pattern) for i, p in loaded.patterns] == [(i, p.pattern) for i, p in TABLE.patterns]
    assert loaded.noop_index == 5


def test_estimate_prior_examples():
    t = ProjectionTable.from_rules(TaskId.ESCONV, [(1, "^o1$|^o2$"), (2, "^o3$")], noop_index=5)
    p = estimate_prior_beam([("o1", math.log(0.5)), ("o2", math.log(0.25)), ("o3", math.log(0.25))], t)
    assert p.weights == pytest.approx({1: 0.75, 2: 0.25}, abs=1e-15)
    assert estimate_prior_beam([("o3", -7.0)], t).weights == {2: 1.0}
    assert estimate_prior_beam([("zz", -1.0), ("yy", -3.0)], t).weights == {5: 1.0}


def test_estimate_prior_handles_extreme_logprobs():
    t = ProjectionTable.from_rules(TaskId.ESCONV, [(1, "a"), (2, "b")], noop_index=5)
    p = estimate_prior_beam([("a", -1000.0), ("b", -1001.0)], t)
    assert p.weights[1] == pytest.approx(1 / (1 + math.exp(-1)), rel=1e-12)


def test_top_k_examples():
    cat5 = CATALOGS[TaskId.CIMA]
    assert top_k(PriorDistribution({1: 0.75, 2: 0.25}), 1, cat5).indices == (1,)
    assert top_k(PriorDistribution({1: 0.4, 2: 0.4, 3: 0.2}), 2, cat5).indices == (1, 2)
    assert top_k(PriorDistribution({2: 0.4, 1: 0.4, 3: 0.2}), 2, cat5).indices == (1, 2)
    assert top_k(PriorDistribution({1: 1.0}), 3, cat5).indices == (1, 2, 3)
    assert top_k(PriorDistribution({4: 1.0}), 3, cat5).indices == (4, 1, 2)


def _policy_gateway(reply="6,8,3,1", beam=None, logprobs=True):
    rules = []
    if beam:
        rules.append(ScriptRule(RoleTag.POLICY, "Next action:", ChatResponse.of(*[t for t, _ in beam],
                                logprobs=[lp for _, lp in beam])))
    return Gateway(ScriptedBackend(rules, role_defaults={RoleTag.POLICY: ChatResponse.of(reply)},
                                   supports_logprobs=logprobs))


def test_action_prior_list_mode(esconv_case):
    gw = _policy_gateway()
    c = ActionPrior(ESC).propose(DialogueState(esconv_case), gw)
    assert c.indices == (6, 8, 3, 1) and c.source is PriorSource.LIST
    assert gw.total_calls == 1
    sent = gw.default.log[0]
    assert sent.max_tokens == 25 and "TOP 4" in sent.last_message


def test_action_prior_unparseable_falls_back(esconv_case):
    c = ActionPrior(ESC).propose(DialogueState(esconv_case), _policy_gateway("I cannot say"))
    assert c.indices == (5, 1, 2, 3)


def test_action_prior_beam_mode(esconv_case):
    beam = [("Question", -0.1), ("Reflection of feelings", -0.2), ("ask more", -0.3), ("qq", -3.0)] * 2
    gw = _policy_gateway(beam=beam)
    c = ActionPrior(ESC, k=2, mode="BeamMode").propose(DialogueState(esconv_case), gw)
    assert c.source is PriorSource.BEAM and c.indices == (1, 6)
    assert sum(c.prior.weights.values()) == pytest.approx(1.0)
    assert gw.default.log[0].beam_width == 8


def test_action_prior_beam_falls_back_to_list(esconv_case):
    gw = _policy_gateway(logprobs=False)
    c = ActionPrior(ESC, mode="BeamMode").propose(DialogueState(esconv_case), gw)
    assert c.source is PriorSource.LIST and c.indices == (6, 8, 3, 1)


def test_action_prior_full_catalog_makes_no_call(esconv_case):
    gw = _policy_gateway()
    c = ActionPrior(ESC, mode="FullCatalog").propose(DialogueState(esconv_case), gw)
    assert c.indices == tuple(range(1, 9)) and gw.total_calls == 0
