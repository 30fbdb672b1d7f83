"""HTTP front end over the planner.

One :class:`SelfPlay` per task is built lazily from the run configuration.
The value head is read-only here; training stays in the CLI process.
"""

from __future__ import annotations

import dataclasses
import threading
from typing import Callable

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..checkpoint import load_checkpoint
from ..config import RunConfig
from ..core import CaseInfo, TaskId, build_state
from ..environment import SelfPlay, judge
from ..errors import (
    BudgetExceeded,
    EmptyInput,
    GatewayError,
    IndexMismatch,
    InvalidCase,
    PriorPlanError,
    WrongTask,
)
from ..gateway import Gateway
from ..metrics import episodes_from_records, report
from ..prior import PriorSource
from ..runner import load_cases, make_gateway, make_selfplay, plan_action, simulate
from ..tasks import CATALOGS, get_profile
from .schemas import (
    ActionInfo,
    CaseModel,
    HealthResponse,
    MetricsModel,
    MetricsRequest,
    PlanRequest,
    PlanResponse,
    PriorResponse,
    SimulateRequest,
    SimulateResponse,
    StateRequest,
    TaskInfo,
    VerdictRequest,
    VerdictResponse,
)


def _case(m: CaseModel) -> CaseInfo:
    case = CaseInfo(m.task_id, m.background, m.numeric_slots, m.extras, m.case_id)
    case.validate()
    return case


def create_app(cfg: RunConfig | None = None, gateway_factory: Callable[[TaskId], Gateway] | None = None) -> FastAPI:
    cfg = cfg or RunConfig(mock=True)
    factory = gateway_factory or (lambda task: make_gateway(cfg.with_overrides(task=task)))
    planners: dict[tuple[TaskId, str, bool], SelfPlay] = {}
    lock = threading.Lock()

    def planner(task: TaskId, mode: str, no_emotion: bool, k: int) -> SelfPlay:
        key = (task, mode, no_emotion)
        with lock:
            sp = planners.get(key)
            if sp is None:
                params = load_checkpoint(cfg.checkpoint) if cfg.checkpoint and task is cfg.task else None
                run = cfg.with_overrides(task=task, prior_mode=mode, no_emotion=no_emotion,
                                         no_prior=PriorSource(mode) is PriorSource.FULL)
                sp = planners[key] = make_selfplay(run, params=params, gateway=factory(task))
        # per-request view: shared head and gateway, private k and encoding cache
        return SelfPlay(sp.profile, dataclasses.replace(sp.prior, k=k), sp.vm.fork(), sp.gateway, sp.tracker)

    app = FastAPI(title="priorplan", version=__version__)

    @app.exception_handler(PriorPlanError)
    async def _planner_error(_: Request, exc: PriorPlanError) -> JSONResponse:
        if isinstance(exc, BudgetExceeded):
            code = 429
        elif isinstance(exc, GatewayError):
            code = 502
        elif isinstance(exc, (InvalidCase, IndexMismatch, WrongTask, EmptyInput)):
            code = 422
        else:
            code = 500
        return JSONResponse({"error": type(exc).__name__, "detail": str(exc)}, status_code=code)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/tasks", response_model=list[TaskInfo])
    def tasks() -> list[TaskInfo]:
        return [
            TaskInfo(task=t, noop_index=c.noop_index,
                     actions=[ActionInfo(index=a.index, name=a.name, strategy_prompt=a.strategy_prompt)
                              for a in c.actions])
            for t, c in CATALOGS.items()
        ]

    @app.get("/tasks/{task}/cases", response_model=list[CaseModel])
    def cases(task: TaskId) -> list[CaseModel]:
        return [CaseModel(**c.to_dict()) for c in load_cases(task)]

    def _state(req: StateRequest):
        try:
            PriorSource(req.mode)
        except ValueError:
            raise HTTPException(422, f"unknown prior mode {req.mode!r}") from None
        case = _case(req.case)
        sp = planner(case.task_id, req.mode, req.no_emotion, req.k)
        state = build_state(case, [(t.speaker, t.text) for t in req.history],
                            [] if req.no_emotion else req.emotions)
        return sp, state

    @app.post("/prior", response_model=PriorResponse)
    def prior(req: StateRequest) -> PriorResponse:
        sp, state = _state(req)
        cands = sp.prior.propose(state, sp.gateway)
        return PriorResponse(
            source=cands.source.value,
            candidates=list(cands.indices),
            candidate_names=[sp.profile.catalog[i].name for i in cands.indices],
            prior=dict(cands.prior.weights) if cands.prior else None,
            state_text=sp.state_text(state),
        )

    @app.post("/plan", response_model=PlanResponse)
    def plan(req: PlanRequest) -> PlanResponse:
        sp, state = _state(req)
        p = plan_action(sp, state, req.epsilon, np.random.default_rng(req.seed))
        return PlanResponse(
            action_index=p.action_index,
            action_name=sp.profile.catalog[p.action_index].name,
            candidates=list(p.scored.indices),
            q_scores=list(p.scored.raw_scores),
            probs=list(p.scored.probs),
            source=p.candidates.source.value,
        )

    @app.post("/verdict", response_model=VerdictResponse)
    def verdict(req: VerdictRequest) -> VerdictResponse:
        case = _case(req.case) if req.case else None
        j = judge(req.text, get_profile(req.task, cfg.max_turns), case)
        return VerdictResponse(reward=j.reward, status=j.status.value, deal_price=j.deal_price, matched=j.matched)

    @app.post("/simulate", response_model=SimulateResponse)
    def run_simulate(req: SimulateRequest) -> SimulateResponse:
        run = cfg.with_overrides(
            task=req.task, seed=req.seed, episodes=req.episodes, eval_episodes=req.eval_episodes,
            dim=req.dim, hidden=req.hidden, learning_rate=req.learning_rate, no_rl=req.no_rl,
            no_prior=req.no_prior, no_emotion=req.no_emotion, at_count_failures=req.at_count_failures,
            out_dir=None, checkpoint=None,
        )
        tr, ev = simulate(run)
        return SimulateResponse(train=MetricsModel(**vars(tr.report)), eval=MetricsModel(**vars(ev.report)),
                                updates=tr.updates)

    @app.post("/metrics", response_model=MetricsModel)
    def metrics(req: MetricsRequest) -> MetricsModel:
        try:
            rep = report(episodes_from_records(req.records), req.at_count_failures)
        except (KeyError, ValueError) as exc:
            raise HTTPException(422, f"malformed transcript records: {exc}") from None
        return MetricsModel(**vars(rep))

    return app
