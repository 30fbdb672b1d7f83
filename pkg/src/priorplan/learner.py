"""Replay buffer and temporal-difference updates for the value head."""

from __future__ import annotations

import collections
import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Transition
from .errors import InsufficientData, NonFiniteLoss
from .value import Layer, QHeadParams, ValueModel, backward, forward, sync_target

__all__ = [
    "ReplayBuffer", "TrainConfig", "Optimizer", "bellman_target", "bellman_targets",
    "td_loss_and_grads", "td_update", "sync_target", "epsilon_at",
]


@dataclass
class TrainConfig:
    gamma: float = 0.999
    batch_size: int = 32
    learning_rate: float = 1e-6
    epochs: int = 3
    episodes: int = 1000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    target_sync_every: int = 100
    buffer_capacity: int = 10_000
    optimizer: str = "sgd"  # or "adam"
    updates_per_step: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.batch_size < 1 or self.buffer_capacity < 1 or self.target_sync_every < 1:
            raise ValueError("batch_size, buffer_capacity and target_sync_every must be positive")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


class ReplayBuffer:
    """FIFO ring of transitions with a private seeded sampler. Appends are thread-safe."""

    def __init__(self, capacity: int, rng_seed: int = 0) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.rng_seed = rng_seed
        self.items: collections.deque[Transition] = collections.deque(maxlen=capacity)
        self._rng = np.random.default_rng(rng_seed)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.items)

    def push(self, t: Transition) -> None:
        with self._lock:
            self.items.append(t)

    def sample(self, n: int, rng: np.random.Generator | None = None) -> list[Transition]:
        with self._lock:
            if len(self.items) < n:
                raise InsufficientData(f"buffer holds {len(self.items)} < {n}")
            picks = (rng or self._rng).choice(len(self.items), size=n, replace=False)
            return [self.items[i] for i in picks]


def bellman_target(t: Transition, params: QHeadParams, cfg: TrainConfig, vm: ValueModel) -> float:
    if t.terminal:
        return float(t.reward)
    if not t.candidate_indices_next:
        raise ValueError("non-terminal transition without next-state candidates")
    q_next = vm.q_values(t.next_state_text, t.candidate_indices_next, use_target=True)
    return float(t.reward + cfg.gamma * q_next.max())


def bellman_targets(batch: Sequence[Transition], params: QHeadParams, cfg: TrainConfig, vm: ValueModel) -> np.ndarray:
    return np.array([bellman_target(t, params, cfg, vm) for t in batch])


def td_loss_and_grads(params: QHeadParams, X: np.ndarray, y: np.ndarray) -> tuple[float, list[Layer]]:
    """Mean squared TD error over the batch and its gradient w.r.t. the online head."""
    q, tape = forward(params.layers, X)
    err = q - y
    loss = float(np.mean(err**2))
    grads = backward(params.layers, tape, 2.0 * err / len(y))
    return loss, grads


@dataclass
class Optimizer:
    """Plain gradient descent, or Adam when ``kind='adam'``."""

    lr: float
    kind: str = "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _m: list[Layer] = field(default_factory=list, repr=False)
    _v: list[Layer] = field(default_factory=list, repr=False)
    _t: int = 0

    def apply(self, params: QHeadParams, grads: list[Layer]) -> None:
        if self.kind == "sgd":
            for (W, b), (dW, db) in zip(params.layers, grads):
                W -= self.lr * dW
                b -= self.lr * db
            return
        if not self._m:
            self._m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params.layers]
            self._v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params.layers]
        self._t += 1
        c1 = 1 - self.beta1**self._t
        c2 = 1 - self.beta2**self._t
        for layer, grad, m, v in zip(params.layers, grads, self._m, self._v):
            for p, g, mp, vp in zip(layer, grad, m, v):
                mp *= self.beta1
                mp += (1 - self.beta1) * g
                vp *= self.beta2
                vp += (1 - self.beta2) * g * g
                p -= self.lr * (mp / c1) / (np.sqrt(vp / c2) + self.eps)


def td_update(
    params: QHeadParams,
    batch: Sequence[Transition],
    cfg: TrainConfig,
    vm: ValueModel,
    optimizer: Optimizer | None = None,
) -> float:
    """One gradient step on the batch; returns the loss before the step.

    Targets come from the target head and are constants for the gradient.
    """
    if not batch:
        raise ValueError("empty batch")
    y = bellman_targets(batch, params, cfg, vm)
    X = vm.embed_batch([(t.state_text, t.action_index) for t in batch])
    loss, grads = td_loss_and_grads(params, X, y)
    if not math.isfinite(loss):
        raise NonFiniteLoss(f"TD loss is {loss}")
    (optimizer or Optimizer(cfg.learning_rate, cfg.optimizer)).apply(params, grads)
    params.step += 1
    if params.step % cfg.target_sync_every == 0:
        sync_target(params)
    return loss


def epsilon_at(step: int, total_steps: int, cfg: TrainConfig) -> float:
    if total_steps <= 0:
        return cfg.epsilon_end
    frac = min(max(step, 0), total_steps) / total_steps
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)
