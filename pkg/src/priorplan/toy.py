"""A five-action contextual environment with known optimal actions.

Each episode draws one context, the agent picks one of the five CIMA
strategies, receives a fixed reward and the episode ends. The optimal action
for context ``c`` is ``c % 5 + 1``. It exercises the value head, the replay
buffer and the TD update end to end without any LLM in the loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ActionCatalog, TaskId, Transition
from .learner import ReplayBuffer, TrainConfig, epsilon_at
from .prior import CandidateSet, PriorSource
from .tasks import CATALOGS
from .value import DEFAULT_DIM, DEFAULT_HIDDEN, HashEncoder, QHeadParams, ValueModel, score_candidates, select_action


@dataclass
class ContextualEnv:
    n_contexts: int = 10
    optimal_reward: float = 1.0
    other_reward: float = 0.0
    catalog: ActionCatalog = field(default_factory=lambda: CATALOGS[TaskId.CIMA])

    def state_text(self, c: int) -> str:
        return f"Case: toy context {c}; History: ; Emotions: ; Next action:"

    def optimal(self, c: int) -> int:
        return c % len(self.catalog) + 1

    def reward(self, c: int, action: int) -> float:
        return self.optimal_reward if action == self.optimal(c) else self.other_reward

    @property
    def all_candidates(self) -> CandidateSet:
        return CandidateSet(tuple(self.catalog.indices), PriorSource.FULL)

    def greedy_accuracy(self, vm: ValueModel) -> float:
        hits = 0
        for c in range(self.n_contexts):
            scored = score_candidates(vm, self.state_text(c), self.all_candidates)
            hits += scored.greedy() == self.optimal(c)
        return hits / self.n_contexts


@dataclass
class ToyRun:
    losses: list[float]
    accuracy: float
    params: QHeadParams


def train_toy(
    cfg: TrainConfig,
    seed: int = 0,
    env: ContextualEnv | None = None,
    dim: int = DEFAULT_DIM,
    hidden: tuple[int, int] = DEFAULT_HIDDEN,
) -> ToyRun:
    from .runner import Trainer  # runner imports toy-free modules only

    env = env or ContextualEnv()
    params = QHeadParams.init(dim, hidden, rng=seed)
    vm = ValueModel(params, HashEncoder(dim), env.catalog)
    trainer = Trainer(params, vm, cfg, ReplayBuffer(cfg.buffer_capacity, rng_seed=seed))
    rng = np.random.default_rng([seed, 1])
    for ep in range(cfg.episodes):
        eps = epsilon_at(ep, cfg.episodes - 1, cfg)
        c = int(rng.integers(env.n_contexts))
        s = env.state_text(c)
        scored = score_candidates(vm, s, env.all_candidates)
        a = select_action(scored, eps, rng)
        t = Transition(s, a, env.reward(c, a), s, True)
        trainer.buffer.push(t)
        trainer.observe(t)
    return ToyRun(trainer.losses, env.greedy_accuracy(vm), params)
