"""Value head over frozen pair embeddings.

Each (state, action) pair is embedded once by an external encoder; a small
rectifier MLP ``d -> h1 -> h2 -> 1`` maps the embedding to a scalar score.
The forward and backward passes are written out in numpy so the learner can
differentiate the head without an autodiff framework.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import httpx
import numpy as np

from .core import ActionCatalog
from .errors import DimensionMismatch, ProtocolError, TransportError
from .prior import CandidateSet

DEFAULT_DIM = 768
DEFAULT_HIDDEN = (256, 256)


# ---------------------------------------------------------------- encoders


class Encoder(Protocol):
    dim: int

    def encode(self, text: str, pair: str) -> np.ndarray: ...


class HashEncoder:
    """Deterministic test double: the vector is a fixed function of the input bytes."""

    def __init__(self, dim: int = DEFAULT_DIM, scale: float = 1.0) -> None:
        self.dim = dim
        self.scale = scale
        self.calls = 0

    def encode(self, text: str, pair: str) -> np.ndarray:
        self.calls += 1
        digest = hashlib.blake2b(f"{text}\x00{pair}".encode("utf-8"), digest_size=16).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return self.scale * rng.standard_normal(self.dim)


class HttpEncoder:
    """Client for a pooled-embedding service: POST ``{input, pair}`` -> ``{vector}``."""

    def __init__(self, endpoint: str, dim: int = DEFAULT_DIM, timeout: float = 30.0,
                 client: httpx.Client | None = None) -> None:
        self.endpoint = endpoint
        self.dim = dim
        self._client = client or httpx.Client(timeout=timeout)

    def encode(self, text: str, pair: str) -> np.ndarray:
        try:
            r = self._client.post(self.endpoint, json={"input": text, "pair": pair})
        except httpx.HTTPError as exc:
            raise TransportError(f"encoder unreachable: {exc!r}") from exc
        if r.status_code >= 400:
            raise TransportError(f"encoder HTTP {r.status_code}")
        try:
            vec = np.asarray(r.json()["vector"], dtype=np.float64)
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError("encoder response lacks a numeric 'vector'") from exc
        if vec.shape != (self.dim,):
            raise DimensionMismatch(f"encoder returned {vec.size} values, expected {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise ProtocolError("encoder returned non-finite values")
        return vec


@dataclass(frozen=True)
class PairEncoding:
    vector: np.ndarray
    state_action_key: str


def pair_texts(state_text: str, action_name: str) -> tuple[str, str]:
    return f"State: {state_text}", f"Action: {action_name}"


class EncodingCache:
    """Per-episode memo of pair embeddings. Never share across episodes."""

    def __init__(self) -> None:
        self._store: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def get(self, key: str) -> np.ndarray | None:
        with self._lock:
            return self._store.get(key)

    def put(self, key: str, vec: np.ndarray) -> None:
        with self._lock:
            self._store[key] = vec

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def __len__(self) -> int:
        return len(self._store)


def encode_pair(state_text: str, action_name: str, encoder: Encoder, cache: EncodingCache | None = None) -> PairEncoding:
    if not state_text or not action_name:
        raise ValueError("state and action texts must be non-empty")
    text, pair = pair_texts(state_text, action_name)
    key = f"{text}\x00{pair}"
    vec = cache.get(key) if cache is not None else None
    if vec is None:
        vec = np.asarray(encoder.encode(text, pair), dtype=np.float64)
        if vec.shape != (encoder.dim,):
            raise DimensionMismatch(f"encoder returned {vec.size} values, expected {encoder.dim}")
        vec.setflags(write=False)
        if cache is not None:
            cache.put(key, vec)
    return PairEncoding(vec, key)


# ---------------------------------------------------------------- head

Layer = tuple[np.ndarray, np.ndarray]  # (W of shape (out, in), b of shape (out,))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def glorot_layers(sizes: Sequence[int], rng: np.random.Generator) -> list[Layer]:
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        layers.append((rng.uniform(-limit, limit, size=(fan_out, fan_in)), np.zeros(fan_out)))
    return layers


def _copy(layers: Sequence[Layer]) -> list[Layer]:
    return [(W.copy(), b.copy()) for W, b in layers]


@dataclass
class QHeadParams:
    """Online head, its frozen target copy and the gradient-step counter."""

    layers: list[Layer]
    target: list[Layer] = field(default_factory=list)
    step: int = 0

    def __post_init__(self) -> None:
        if len(self.layers) != 3:
            raise ValueError("the head has exactly three layers")
        for (W1, b1), (W2, _) in zip(self.layers, self.layers[1:]):
            if W1.shape[0] != W2.shape[1] or b1.shape != (W1.shape[0],):
                raise ValueError("inconsistent layer shapes")
        if self.layers[-1][0].shape[0] != 1:
            raise ValueError("last layer must output a scalar")
        if not self.target:
            self.target = _copy(self.layers)
        elif [W.shape for W, _ in self.target] != [W.shape for W, _ in self.layers]:
            raise ValueError("target shapes differ from online shapes")

    @classmethod
    def init(cls, d: int = DEFAULT_DIM, hidden: Sequence[int] = DEFAULT_HIDDEN,
             rng: np.random.Generator | int | None = 0) -> QHeadParams:
        rng = np.random.default_rng(rng)
        return cls(glorot_layers([d, *hidden, 1], rng))

    @classmethod
    def zeros(cls, d: int, hidden: Sequence[int] = DEFAULT_HIDDEN) -> QHeadParams:
        sizes = [d, *hidden, 1]
        return cls([(np.zeros((o, i)), np.zeros(o)) for i, o in zip(sizes[:-1], sizes[1:])])

    @property
    def dim(self) -> int:
        return self.layers[0][0].shape[1]

    def flat(self, use_target: bool = False) -> np.ndarray:
        src = self.target if use_target else self.layers
        return np.concatenate([a.ravel() for W, b in src for a in (W, b)])


def sync_target(params: QHeadParams) -> None:
    params.target = _copy(params.layers)


def forward(layers: Sequence[Layer], X: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Batched forward pass. ``X`` is (n, d); returns q of shape (n,) and the tape."""
    (W1, b1), (W2, b2), (W3, b3) = layers
    z1 = X @ W1.T + b1
    a1 = relu(z1)
    z2 = a1 @ W2.T + b2
    a2 = relu(z2)
    q = (a2 @ W3.T + b3)[:, 0]
    return q, (X, z1, a1, z2, a2)


def backward(layers: Sequence[Layer], tape: tuple, dq: np.ndarray) -> list[Layer]:
    """Gradients of ``sum(dq * q)`` with respect to every (W, b)."""
    X, z1, a1, z2, a2 = tape
    (_, _), (W2, _), (W3, _) = layers
    dq = dq[:, None]
    dW3 = dq.T @ a2
    db3 = dq.sum(axis=0)
    dz2 = (dq @ W3) * (z2 > 0)
    dW2 = dz2.T @ a1
    db2 = dz2.sum(axis=0)
    dz1 = (dz2 @ W2) * (z1 > 0)
    dW1 = dz1.T @ X
    db1 = dz1.sum(axis=0)
    return [(dW1, db1), (dW2, db2), (dW3, db3)]


def q_forward(params: QHeadParams, enc: PairEncoding | np.ndarray, use_target: bool = False) -> float:
    x = enc.vector if isinstance(enc, PairEncoding) else np.asarray(enc, dtype=np.float64)
    if x.shape != (params.dim,):
        raise DimensionMismatch(f"input has shape {x.shape}, head expects ({params.dim},)")
    q, _ = forward(params.target if use_target else params.layers, x[None, :])
    return float(q[0])


# ---------------------------------------------------------------- scoring


def softmax(scores: Sequence[float]) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    e = np.exp(s - s.max())
    return e / e.sum()


@dataclass(frozen=True)
class ScoredCandidates:
    indices: tuple[int, ...]
    raw_scores: tuple[float, ...]
    probs: tuple[float, ...]

    def greedy(self) -> int:
        return self.indices[int(np.argmax(self.raw_scores))]


@dataclass
class ValueModel:
    """Head + encoder + catalog, with a per-episode encoding cache."""

    params: QHeadParams
    encoder: Encoder
    catalog: ActionCatalog
    cache: EncodingCache = field(default_factory=EncodingCache)

    def __post_init__(self) -> None:
        if self.encoder.dim != self.params.dim:
            raise DimensionMismatch(f"encoder dim {self.encoder.dim} != head input {self.params.dim}")

    def fork(self) -> ValueModel:
        """Same head and encoder, fresh cache (one per concurrently running episode)."""
        return ValueModel(self.params, self.encoder, self.catalog)

    def begin_episode(self) -> None:
        self.cache.clear()

    def encode(self, state_text: str, action_index: int) -> np.ndarray:
        return encode_pair(state_text, self.catalog[action_index].name, self.encoder, self.cache).vector

    def embed_batch(self, pairs: Sequence[tuple[str, int]]) -> np.ndarray:
        return np.stack([self.encode(s, a) for s, a in pairs])

    def q_values(self, state_text: str, indices: Sequence[int], use_target: bool = False) -> np.ndarray:
        X = self.embed_batch([(state_text, a) for a in indices])
        q, _ = forward(self.params.target if use_target else self.params.layers, X)
        return q


def score_candidates(vm: ValueModel, state_text: str, candidates: CandidateSet) -> ScoredCandidates:
    raw = vm.q_values(state_text, candidates.indices)
    return ScoredCandidates(
        tuple(candidates.indices), tuple(float(v) for v in raw), tuple(float(p) for p in softmax(raw))
    )


def select_action(scored: ScoredCandidates, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy restricted to the candidate set; ties go to the earliest candidate."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if rng.random() < epsilon:
        return scored.indices[int(rng.integers(len(scored.indices)))]
    return scored.greedy()
