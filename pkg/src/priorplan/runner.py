"""Run orchestration: training, evaluation, mock simulation and chat."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, TextIO

import numpy as np

from .checkpoint import save_checkpoint
from .config import RunConfig
from .core import CaseInfo, DialogueState, TaskId, Transition
from .emotion import EmotionTracker
from .environment import EpisodeResult, SelfPlay, transcript_lines
from .errors import InsufficientData
from .gateway import Gateway, OpenAIBackend, RoleTag, load_script
from .learner import Optimizer, ReplayBuffer, TrainConfig, epsilon_at, td_update
from .metrics import EpisodeSummary, MetricsReport, report, summarize
from .mock import mock_backend
from .prior import ActionPrior, CandidateSet, PriorSource
from .tasks import SAMPLE_CASES, get_profile
from .value import (
    Encoder,
    HashEncoder,
    HttpEncoder,
    QHeadParams,
    ScoredCandidates,
    ValueModel,
    score_candidates,
    select_action,
)

logger = logging.getLogger(__name__)


@dataclass
class Trainer:
    """Single writer for the head: buffered TD updates plus offline refinement."""

    params: QHeadParams
    vm: ValueModel
    cfg: TrainConfig
    buffer: ReplayBuffer
    learn: bool = True
    losses: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.optimizer = Optimizer(self.cfg.learning_rate, self.cfg.optimizer)

    @property
    def updates(self) -> int:
        return len(self.losses)

    def _step(self, batch: Sequence[Transition]) -> None:
        self.losses.append(td_update(self.params, batch, self.cfg, self.vm, self.optimizer))

    def observe(self, _t: Transition | None = None) -> None:
        """Called after each environment step; runs ``updates_per_step`` updates once the buffer is warm."""
        if not self.learn:
            return
        for _ in range(self.cfg.updates_per_step):
            try:
                batch = self.buffer.sample(self.cfg.batch_size)
            except InsufficientData:
                return
            self._step(batch)

    def refine(self) -> None:
        """``cfg.epochs`` shuffled passes of minibatch updates over the final buffer."""
        if not self.learn or len(self.buffer) == 0:
            return
        items = list(self.buffer.items)
        rng = np.random.default_rng(self.buffer.rng_seed + 1)
        for _ in range(self.cfg.epochs):
            order = rng.permutation(len(items))
            for start in range(0, len(items), self.cfg.batch_size):
                self.vm.begin_episode()
                self._step([items[i] for i in order[start:start + self.cfg.batch_size]])


# ---------------------------------------------------------------- building


def make_encoder(cfg: RunConfig) -> Encoder:
    if cfg.encoder_endpoint and not cfg.mock:
        return HttpEncoder(cfg.encoder_endpoint, cfg.dim)
    return HashEncoder(cfg.dim)


def make_gateway(cfg: RunConfig) -> Gateway:
    if cfg.mock:
        return Gateway(mock_backend(cfg.task, supports_logprobs=True), call_cap=cfg.call_cap)
    if cfg.script:
        return Gateway(load_script(cfg.script), call_cap=cfg.call_cap)
    if not cfg.llm_endpoint:
        raise ValueError("no LLM endpoint configured (set LLM_ENDPOINT, or use a script or the mock world)")
    roles = {tag.value.lower(): tag for tag in RoleTag}
    backends = {}
    for name, endpoint in cfg.role_endpoints.items():
        if name.lower() not in roles:
            raise ValueError(f"unknown role {name!r} in role_endpoints")
        backends[roles[name.lower()]] = OpenAIBackend(endpoint, cfg.llm_model, cfg.llm_api_key)
    return Gateway(OpenAIBackend(cfg.llm_endpoint, cfg.llm_model, cfg.llm_api_key), backends,
                   call_cap=cfg.call_cap, context_limit=cfg.context_limit)


def make_selfplay(cfg: RunConfig, params: QHeadParams | None = None, gateway: Gateway | None = None,
                  encoder: Encoder | None = None) -> SelfPlay:
    profile = get_profile(cfg.task, cfg.max_turns)
    params = params or QHeadParams.init(cfg.dim, (cfg.hidden, cfg.hidden), rng=cfg.seed)
    encoder = encoder or make_encoder(cfg)
    mode = PriorSource.FULL if cfg.no_prior else PriorSource(cfg.prior_mode)
    prior = ActionPrior(profile.catalog, k=cfg.k, mode=mode, beam_width=cfg.beam_width,
                        with_emotions=not cfg.no_emotion)
    return SelfPlay(
        profile=profile,
        prior=prior,
        vm=ValueModel(params, encoder, profile.catalog),
        gateway=gateway or make_gateway(cfg),
        tracker=EmotionTracker(enabled=not cfg.no_emotion),
    )


def load_cases(task: TaskId | str, path: str | Path | None = None) -> list[CaseInfo]:
    """Bundled sample cases, or a JSONL file of ``CaseInfo.to_dict`` records."""
    task = TaskId(task)
    if path is None:
        return list(SAMPLE_CASES[task])
    cases = [CaseInfo.from_dict(json.loads(line)) for line in Path(path).read_text().splitlines() if line.strip()]
    return [c for c in cases if c.task_id is task]


def episode_rng(seed: int, phase: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, phase, i])


@dataclass
class Plan:
    candidates: CandidateSet
    scored: ScoredCandidates
    action_index: int
    state_text: str


def plan_action(sp: SelfPlay, state: DialogueState, epsilon: float = 0.0,
                rng: np.random.Generator | None = None) -> Plan:
    """One planning step without acting: prior, value scores and the selected action."""
    candidates = sp.prior.propose(state, sp.gateway)
    s_text = sp.state_text(state)
    scored = score_candidates(sp.vm, s_text, candidates)
    action = select_action(scored, epsilon, rng if rng is not None else np.random.default_rng(0))
    return Plan(candidates, scored, action, s_text)


# ---------------------------------------------------------------- runs


@dataclass
class RunResult:
    results: list[EpisodeResult]
    records: list[dict]
    report: MetricsReport
    losses: list[float] = field(default_factory=list)
    updates: int = 0


def _summaries(sp: SelfPlay, results: Sequence[EpisodeResult]) -> list[EpisodeSummary]:
    return [summarize(r, sp.profile.task_id, sp.profile.max_turns) for r in results]


def train(sp: SelfPlay, cases: Sequence[CaseInfo], tcfg: TrainConfig, seed: int = 0, learn: bool = True,
          count_failures_at_cap: bool = True, progress: Callable[[int, EpisodeResult], None] | None = None) -> RunResult:
    buffer = ReplayBuffer(tcfg.buffer_capacity, rng_seed=seed)
    trainer = Trainer(sp.vm.params, sp.vm, tcfg, buffer, learn=learn)
    case_rng = np.random.default_rng([seed, 0])
    results, records = [], []
    for ep in range(tcfg.episodes):
        eps = epsilon_at(ep, max(tcfg.episodes - 1, 1), tcfg)
        case = cases[int(case_rng.integers(len(cases)))]
        res = sp.run_episode(case, eps, episode_rng(seed, 1, ep), buffer=buffer,
                             episode_id=f"train-{ep}", on_transition=trainer.observe)
        results.append(res)
        records.extend({"phase": "train", **r} for r in res.records)
        if progress:
            progress(ep, res)
    trainer.refine()
    return RunResult(results, records, report(_summaries(sp, results), count_failures_at_cap),
                     trainer.losses, trainer.updates)


def evaluate(sp: SelfPlay, cases: Sequence[CaseInfo], episodes: int, epsilon: float, seed: int = 0,
             workers: int = 1, count_failures_at_cap: bool = True) -> RunResult:
    """Episodes run on a bounded thread pool; results are ordered by episode index."""

    def one(i: int) -> EpisodeResult:
        local = SelfPlay(sp.profile, sp.prior, sp.vm.fork(), sp.gateway, sp.tracker)
        return local.run_episode(cases[i % len(cases)], epsilon, episode_rng(seed, 2, i), episode_id=f"eval-{i}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(episodes)))
    else:
        results = [one(i) for i in range(episodes)]
    records = [{"phase": "eval", **r} for res in results for r in res.records]
    return RunResult(results, records, report(_summaries(sp, results), count_failures_at_cap))


def write_outputs(out_dir: str | Path, run: RunResult, params: QHeadParams | None = None,
                  extra_records: Sequence[dict] = ()) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "transcripts.jsonl").write_text(transcript_lines([*extra_records, *run.records]), encoding="utf-8")
    (out / "metrics.json").write_text(run.report.to_json(), encoding="utf-8")
    if params is not None:
        save_checkpoint(params, out / "qhead.ckpt")
    return out


def simulate(cfg: RunConfig) -> tuple[RunResult, RunResult]:
    """Mock-only end to end: train on the scripted world, then evaluate."""
    cfg = cfg.with_overrides(mock=True)
    sp = make_selfplay(cfg)
    cases = load_cases(cfg.task, cfg.cases)
    tcfg = cfg.train_config()
    train_run = train(sp, cases, tcfg, seed=cfg.seed, learn=not cfg.no_rl,
                      count_failures_at_cap=cfg.at_count_failures)
    eval_run = evaluate(sp, cases, cfg.eval_episodes, cfg.epsilon_eval, seed=cfg.seed, workers=cfg.workers,
                        count_failures_at_cap=cfg.at_count_failures)
    if cfg.out_dir:
        write_outputs(cfg.out_dir, eval_run, sp.vm.params, extra_records=train_run.records)
    return train_run, eval_run


# ---------------------------------------------------------------- chat

QUIT = "/quit"


def chat_session(sp: SelfPlay, case: CaseInfo, stdin: TextIO, stdout: TextIO, epsilon: float = 0.0,
                 seed: int = 0) -> EpisodeResult:
    """Self-play with a human in the user seat. ``/quit`` (or EOF) ends the episode as Failed."""

    def reply(state, sys_text: str) -> str | None:
        stdout.write(f"[turn {state.turn}] system: {sys_text}\n")
        stdout.write("you> ")
        stdout.flush()
        line = stdin.readline()
        if not line or line.strip() == QUIT:
            return None
        return line.strip() or "..."

    def on_transition(t: Transition) -> None:
        stdout.write(f"  (action: {sp.profile.catalog[t.action_index].name}, reward {t.reward:+.2f})\n")

    stdout.write(f"Case: {case.background}\nType {QUIT} to stop.\n")
    res = sp.run_episode(case, epsilon, np.random.default_rng(seed), episode_id="chat",
                         user_reply=reply, on_transition=on_transition)
    stdout.write(f"Episode ended: {res.outcome.value} after {res.turns} turn(s).\n")
    return res
