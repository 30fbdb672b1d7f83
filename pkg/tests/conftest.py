import numpy as np
import pytest

from priorplan.core import TaskId
from priorplan.gateway import ChatResponse, Gateway, RoleTag, ScriptedBackend, ScriptRule
from priorplan.tasks import SAMPLE_CASES


def scripted(rules=(), default="", **role_defaults):
    """Scripted backend from (role, key, reply) triples and per-role default replies."""
    return ScriptedBackend(
        [ScriptRule(RoleTag(r), k, v if isinstance(v, ChatResponse) else ChatResponse.of(v)) for r, k, v in rules],
        ChatResponse.of(default),
        {RoleTag(r): ChatResponse.of(v) for r, v in role_defaults.items()},
    )


def no_sleep(_):
    pass


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def esconv_case():
    return SAMPLE_CASES[TaskId.ESCONV][0]


@pytest.fixture
def cb_case():
    # listed 150, buyer target 100
    return SAMPLE_CASES[TaskId.CB][0]


@pytest.fixture
def make_gateway():
    def build(backend, **kw):
        kw.setdefault("sleep", no_sleep)
        return Gateway(backend, **kw)
    return build


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance gate")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
