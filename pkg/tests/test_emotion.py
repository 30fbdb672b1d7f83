import pytest

from priorplan.core import EmotionTrace
from priorplan.emotion import EmotionTracker, accumulate, infer_emotion, parse_emotion
from priorplan.errors import EmptyLabel
from priorplan.gateway import Gateway, RoleTag

from conftest import scripted


def gw(reply):
    return Gateway(scripted(Emotion=reply))


def test_infer_examples():
    assert infer_emotion("I lost my job", gw("Anxious.")) == "anxious"
    assert infer_emotion("I lost my job", gw("Emotion: fear")) == "fear"
    with pytest.raises(EmptyLabel):
        infer_emotion("I lost my job", gw("!!!"))


def test_request_shape():
    g = gw("sad")
    infer_emotion("I lost my job", g)
    sent = g.default.log[0]
    assert sent.role_tag is RoleTag.EMOTION
    assert sent.max_tokens == 10
    assert "I lost my job" in sent.last_message


def test_parse_takes_first_word():
    assert parse_emotion("  hopeful, maybe relieved") == "hopeful"


def test_accumulate_examples():
    assert accumulate(EmotionTrace(), "disgust").labels == ("disgust",)
    t = accumulate(EmotionTrace(("disgust", "betrayed")), "disoriented")
    assert t.render() == "disgust -> betrayed -> disoriented"


def test_tracker_sentinel_and_disabled():
    trace, label = EmotionTracker().update(EmotionTrace(), "hm", gw("???"))
    assert label == "neutral" and trace.labels == ("neutral",)
    g = gw("sad")
    trace, label = EmotionTracker(enabled=False).update(EmotionTrace(), "hm", g)
    assert label is None and trace.labels == () and g.total_calls == 0
