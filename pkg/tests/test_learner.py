import numpy as np
import pytest

from priorplan.core import TaskId, Transition
from priorplan.errors import InsufficientData, NonFiniteLoss
from priorplan.learner import (
    Optimizer,
    ReplayBuffer,
    TrainConfig,
    bellman_target,
    epsilon_at,
    sync_target,
    td_loss_and_grads,
    td_update,
)
from priorplan.tasks import CATALOGS
from priorplan.value import QHeadParams, ValueModel

ESC = CATALOGS[TaskId.ESCONV]


class TableEncoder:
    """Maps the state text to a fixed vector, whatever the action."""

    def __init__(self, table, dim):
        self.table, self.dim = table, dim

    def encode(self, text, pair):
        return np.array(self.table[text.removeprefix("State: ")], dtype=float)


def tr(i, terminal=True, r=0.0, nxt=()):
    return Transition(f"s{i}", 1, r, f"s{i + 1}", terminal, nxt)


def test_defaults():
    cfg = TrainConfig()
    assert (cfg.gamma, cfg.batch_size, cfg.learning_rate, cfg.epochs, cfg.episodes) == (0.999, 32, 1e-6, 3, 1000)
    assert (cfg.epsilon_start, cfg.epsilon_end, cfg.target_sync_every) == (1.0, 0.1, 100)
    with pytest.raises(ValueError):
        TrainConfig(gamma=1.5)


def test_buffer_fifo():
    b = ReplayBuffer(2)
    for i in range(3):
        b.push(tr(i))
    assert [t.state_text for t in b.items] == ["s1", "s2"]


def test_buffer_sample():
    b = ReplayBuffer(10)
    b.push(tr(0))
    assert b.sample(1) == [tr(0)]
    for i in range(1, 5):
        b.push(tr(i))
    assert sorted(t.state_text for t in b.sample(5)) == [f"s{i}" for i in range(5)]
    small = ReplayBuffer(10)
    for i in range(3):
        small.push(tr(i))
    with pytest.raises(InsufficientData):
        small.sample(4)


def test_buffer_sampling_is_seeded():
    def run():
        b = ReplayBuffer(100, rng_seed=7)
        for i in range(50):
            b.push(tr(i))
        return [[t.state_text for t in b.sample(5)] for _ in range(3)]

    assert run() == run()


def _vm(params, table):
    return ValueModel(params, TableEncoder(table, params.dim), ESC)


def test_bellman_examples():
    cfg = TrainConfig()
    # target head outputs exactly 0.2 on s1 through the bias
    p = QHeadParams.zeros(1, (1, 1))
    p.target[2][1][:] = 0.2
    vm = _vm(p, {"s0": [1.0], "s1": [1.0]})
    assert bellman_target(tr(0, terminal=True, r=1.0), p, cfg, vm) == 1.0
    assert bellman_target(tr(0, terminal=False, r=0.5, nxt=(1, 2)), p, cfg, vm) == pytest.approx(0.6998, abs=1e-12)
    zero = QHeadParams.zeros(1, (1, 1))
    assert bellman_target(tr(0, terminal=False, r=-1.0, nxt=(3,)), zero, cfg, _vm(zero, {"s1": [1.0]})) == -1.0


def test_bellman_uses_target_head_not_online():
    cfg = TrainConfig()
    p = QHeadParams.zeros(1, (1, 1))
    p.layers[2][1][:] = 5.0  # online head moved, target still zero
    vm = _vm(p, {"s1": [1.0]})
    assert bellman_target(tr(0, terminal=False, r=0.5, nxt=(1,)), p, cfg, vm) == 0.5


def hand_head(w1, b1, w2, b2, w3, b3):
    L = lambda w, b: (np.array([[w]]), np.array([b]))  # noqa: E731
    return QHeadParams([L(w1, b1), L(w2, b2), L(w3, b3)])


def test_one_dimensional_gradient_by_hand():
    w1, b1, w2, b2, w3, b3 = 0.7, 0.1, -1.3, 2.0, 0.9, -0.2
    x, r = 1.5, 1.0
    p = hand_head(w1, b1, w2, b2, w3, b3)
    # hand evaluation: both rectifiers active
    z1 = w1 * x + b1
    z2 = w2 * z1 + b2
    q = w3 * z2 + b3
    e = q - r
    expect_loss = e * e
    expect = {
        "w3": 2 * e * z2, "b3": 2 * e,
        "w2": 2 * e * w3 * z1, "b2": 2 * e * w3,
        "w1": 2 * e * w3 * w2 * x, "b1": 2 * e * w3 * w2,
    }
    loss, grads = td_loss_and_grads(p, np.array([[x]]), np.array([r]))
    assert loss == pytest.approx(expect_loss, abs=1e-10)
    got = {"w1": grads[0][0][0, 0], "b1": grads[0][1][0], "w2": grads[1][0][0, 0], "b2": grads[1][1][0],
           "w3": grads[2][0][0, 0], "b3": grads[2][1][0]}
    for k in expect:
        assert got[k] == pytest.approx(expect[k], abs=1e-10), k

    # and the step td_update applies is exactly -lr * grad
    lr = 0.01
    cfg = TrainConfig(learning_rate=lr)
    vm = _vm(p, {"s0": [x]})
    before = p.flat().copy()
    assert td_update(p, [Transition("s0", 1, r, "s1", True)], cfg, vm) == pytest.approx(expect_loss, abs=1e-10)
    g = np.array([expect["w1"], expect["b1"], expect["w2"], expect["b2"], expect["w3"], expect["b3"]])
    assert np.allclose(p.flat(), before - lr * g, atol=1e-10, rtol=0)
    assert p.step == 1


def test_inactive_rectifier_blocks_gradient():
    p = hand_head(1.0, 0.0, 1.0, 0.0, 1.0, 0.0)
    _, grads = td_loss_and_grads(p, np.array([[-3.0]]), np.array([1.0]))
    assert grads[0][0][0, 0] == 0.0 and grads[1][0][0, 0] == 0.0
    assert grads[2][1][0] == -2.0


def test_zero_error_leaves_params_unchanged():
    p = QHeadParams.init(4, (3, 3), rng=1)
    table = {"a": [0.1, 0.2, 0.3, 0.4], "b": [1.0, -1.0, 0.5, 0.0]}
    vm = _vm(p, table)
    batch = [Transition(s, 1, vm.q_values(s, [1])[0], "z", True) for s in table]
    before = p.flat().copy()
    assert td_update(p, batch, TrainConfig(learning_rate=0.1), vm) == 0.0
    assert np.array_equal(p.flat(), before)


def test_target_sync_cadence():
    p = QHeadParams.init(2, (2, 2), rng=0)
    vm = _vm(p, {"s0": [1.0, 0.5]})
    cfg = TrainConfig(learning_rate=0.1, target_sync_every=3)
    batch = [Transition("s0", 1, 1.0, "s1", True)]
    start = p.flat(use_target=True).copy()
    for _ in range(2):
        td_update(p, batch, cfg, vm)
    assert np.array_equal(p.flat(use_target=True), start)
    td_update(p, batch, cfg, vm)
    assert np.array_equal(p.flat(use_target=True), p.flat())
    sync_target(p)
    assert np.array_equal(p.flat(use_target=True), p.flat())


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_loss():
    p = QHeadParams.init(1, (1, 1), rng=0)
    vm = _vm(p, {"s0": [np.nan]})
    with pytest.raises(NonFiniteLoss):
        td_update(p, [Transition("s0", 1, 0.0, "s1", True)], TrainConfig(), vm)


def test_adam_moves_toward_target():
    p = QHeadParams.init(3, (4, 4), rng=0)
    vm = _vm(p, {"s0": [1.0, -0.5, 0.25]})
    cfg = TrainConfig(learning_rate=1e-2, optimizer="adam")
    opt = Optimizer(cfg.learning_rate, "adam")
    batch = [Transition("s0", 1, 0.8, "s1", True)]
    losses = [td_update(p, batch, cfg, vm, opt) for _ in range(200)]
    assert losses[-1] < 1e-4 < losses[0]


def test_epsilon_schedule():
    cfg = TrainConfig()
    assert epsilon_at(0, 100, cfg) == 1.0
    assert epsilon_at(100, 100, cfg) == pytest.approx(0.1)
    assert epsilon_at(50, 100, cfg) == pytest.approx(0.55)
    assert epsilon_at(500, 100, cfg) == pytest.approx(0.1)
