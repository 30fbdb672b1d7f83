"""Command line entry point.

``train``, ``eval``, ``chat`` and ``simulate`` run in-process. ``inspect-prior``,
``plan`` and ``simulate`` also accept ``--server URL`` and then act as a thin
client of the HTTP service started with ``serve``.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click
import httpx
import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig, load_config
from .core import CaseInfo, TaskId, build_state
from .errors import PriorPlanError
from .prior import PriorSource
from .runner import (
    chat_session,
    evaluate,
    load_cases,
    make_selfplay,
    plan_action,
    simulate,
    train,
    write_outputs,
)

TASKS = [t.value for t in TaskId]


def common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="YAML run configuration."),
        click.option("--task", type=click.Choice(TASKS), help="Dialogue task."),
        click.option("--seed", type=int, help="Base random seed."),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory."),
        click.option("--mock", is_flag=True, default=None, help="Use the bundled scripted world."),
        click.option("--script", type=click.Path(exists=True, dir_okay=False), help="YAML scripted backend."),
        click.option("--checkpoint", type=click.Path(dir_okay=False), help="Value-head checkpoint."),
        click.option("--k", type=int, help="Candidate set size."),
        click.option("--dim", type=int, help="Embedding width (must match the encoder)."),
        click.option("--hidden", type=int, help="Hidden layer width."),
        click.option("--prior-mode", type=click.Choice([m.value for m in PriorSource])),
        click.option("--no-rl", is_flag=True, default=None, help="Never update the value head."),
        click.option("--no-prior", is_flag=True, default=None, help="Candidates are the full catalog."),
        click.option("--no-emotion", is_flag=True, default=None, help="Disable the emotion tracker."),
        click.option("--at-count-failures/--no-at-count-failures", default=None,
                     help="Count failed episodes at the turn cap in AT (default on)."),
        click.option("-v", "--verbose", is_flag=True, help="Debug logging."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)

    @functools.wraps(fn)
    def wrapper(config_path, verbose, **kwargs):
        logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(config_path)
        overrides = {k: kwargs.pop(k) for k in list(kwargs) if k in _CFG_KEYS}
        overrides = {k: v for k, v in overrides.items() if v is not None}
        try:
            cfg = cfg.with_overrides(**overrides)
            return fn(cfg, **kwargs)
        except (PriorPlanError, ValueError, OSError, httpx.HTTPError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


_CFG_KEYS = {
    "task", "seed", "out_dir", "mock", "script", "checkpoint", "k", "prior_mode", "no_rl", "no_prior",
    "no_emotion", "at_count_failures", "episodes", "eval_episodes", "workers", "learning_rate", "dim", "hidden",
    "epsilon_eval",
}


def _emit_report(run, out_dir: str | None) -> None:
    click.echo(run.report.table())
    if out_dir:
        click.echo(f"wrote {Path(out_dir) / 'metrics.json'}")


def _load_params(cfg: RunConfig):
    return load_checkpoint(cfg.checkpoint) if cfg.checkpoint and Path(cfg.checkpoint).exists() else None


@click.group()
@click.version_option(package_name="priorplan")
def main() -> None:
    """Plan dialogue actions with an LLM prior and a TD-trained value head."""


@main.command("train")
@common_options
@click.option("--episodes", type=int, help="Training episodes.")
@click.option("--learning-rate", type=float)
@click.option("--cases", type=click.Path(exists=True, dir_okay=False), help="JSONL case file.")
def train_cmd(cfg: RunConfig, cases: str | None) -> None:
    """Self-play training; writes transcripts, metrics and a checkpoint."""
    sp = make_selfplay(cfg, params=_load_params(cfg))
    run = train(sp, load_cases(cfg.task, cases or cfg.cases), cfg.train, seed=cfg.seed, learn=not cfg.no_rl,
                count_failures_at_cap=cfg.at_count_failures)
    out = cfg.out_dir or "runs/train"
    write_outputs(out, run, sp.vm.params)
    if cfg.checkpoint:
        save_checkpoint(sp.vm.params, cfg.checkpoint)
    click.echo(f"{run.updates} updates")
    _emit_report(run, out)


@main.command("eval")
@common_options
@click.option("--eval-episodes", type=int)
@click.option("--epsilon-eval", type=float)
@click.option("--workers", type=int, help="Concurrent episodes.")
@click.option("--cases", type=click.Path(exists=True, dir_okay=False))
def eval_cmd(cfg: RunConfig, cases: str | None) -> None:
    """Evaluate a (possibly untrained) head at the evaluation epsilon."""
    sp = make_selfplay(cfg, params=_load_params(cfg))
    run = evaluate(sp, load_cases(cfg.task, cases or cfg.cases), cfg.eval_episodes, cfg.epsilon_eval,
                   seed=cfg.seed, workers=cfg.workers, count_failures_at_cap=cfg.at_count_failures)
    out = cfg.out_dir or "runs/eval"
    write_outputs(out, run)
    _emit_report(run, out)


@main.command("simulate")
@common_options
@click.option("--episodes", type=int)
@click.option("--eval-episodes", type=int)
@click.option("--learning-rate", type=float)
@click.option("--workers", type=int)
@click.option("--server", help="Run on a planner service instead of in-process.")
def simulate_cmd(cfg: RunConfig, server: str | None) -> None:
    """Mock-only end to end run: train then evaluate on the scripted world."""
    if server:
        body = {"task": cfg.task.value, "seed": cfg.seed, "episodes": cfg.train.episodes,
                "eval_episodes": cfg.eval_episodes, "dim": cfg.dim, "hidden": cfg.hidden,
                "learning_rate": cfg.train.learning_rate, "no_rl": cfg.no_rl, "no_prior": cfg.no_prior,
                "no_emotion": cfg.no_emotion, "at_count_failures": cfg.at_count_failures}
        click.echo(json.dumps(_post(server, "/simulate", body), indent=2, sort_keys=True))
        return
    cfg = cfg.with_overrides(out_dir=cfg.out_dir or "runs/simulate")
    tr, ev = simulate(cfg)
    click.echo(f"train: {tr.updates} updates over {tr.report.n_episodes} episodes")
    _emit_report(ev, cfg.out_dir)


@main.command("chat")
@common_options
@click.option("--case-index", type=int, default=0, show_default=True, help="Which bundled case to play.")
@click.option("--cases", type=click.Path(exists=True, dir_okay=False))
def chat_cmd(cfg: RunConfig, case_index: int, cases: str | None) -> None:
    """Play the user yourself; /quit ends the dialogue."""
    sp = make_selfplay(cfg, params=_load_params(cfg))
    pool = load_cases(cfg.task, cases or cfg.cases)
    res = chat_session(sp, pool[case_index % len(pool)], sys.stdin, sys.stdout, seed=cfg.seed)
    if cfg.out_dir:
        from .environment import transcript_lines

        Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out_dir) / "chat.jsonl").write_text(transcript_lines(res.records), encoding="utf-8")


def _state_body(cfg: RunConfig, case_index: int, history: tuple[str, ...], emotions: tuple[str, ...]) -> dict:
    case = load_cases(cfg.task, cfg.cases)[case_index]
    turns = []
    for i, text in enumerate(history):
        speaker, sep, rest = text.partition(":")
        if sep and speaker.strip() in ("System", "User"):
            turns.append({"speaker": speaker.strip(), "text": rest.strip()})
        else:
            turns.append({"speaker": "System" if i % 2 == 0 else "User", "text": text})
    return {"case": case.to_dict(), "history": turns, "emotions": list(emotions), "k": cfg.k,
            "mode": PriorSource.FULL.value if cfg.no_prior else cfg.prior_mode, "no_emotion": cfg.no_emotion}


def _post(server: str, path: str, body: dict) -> dict:
    resp = httpx.post(server.rstrip("/") + path, json=body, timeout=120.0)
    if resp.status_code >= 400:
        raise httpx.HTTPStatusError(f"{resp.status_code}: {resp.text}", request=resp.request, response=resp)
    return resp.json()


def _local_state(cfg: RunConfig, body: dict):
    sp = make_selfplay(cfg, params=_load_params(cfg))
    case = CaseInfo.from_dict(body["case"])
    state = build_state(case, [(t["speaker"], t["text"]) for t in body["history"]], body["emotions"])
    return sp, state


state_options = [
    click.option("--case-index", type=int, default=0, show_default=True),
    click.option("--turn", "history", multiple=True,
                 help="History utterance, 'System: ...' or 'User: ...'; repeatable, alternates if unprefixed."),
    click.option("--emotion", "emotions", multiple=True, help="Emotion label; repeatable."),
    click.option("--server", help="Planner service URL."),
]


def _with_state_options(fn):
    for opt in reversed(state_options):
        fn = opt(fn)
    return fn


@main.command("inspect-prior")
@common_options
@_with_state_options
def inspect_prior_cmd(cfg: RunConfig, case_index: int, history, emotions, server: str | None) -> None:
    """Print the candidate set (and beam prior) for a given state."""
    body = _state_body(cfg, case_index, history, emotions)
    if server:
        out = _post(server, "/prior", body)
    else:
        sp, state = _local_state(cfg, body)
        cands = sp.prior.propose(state, sp.gateway)
        out = {"source": cands.source.value, "candidates": list(cands.indices),
               "candidate_names": [sp.profile.catalog[i].name for i in cands.indices],
               "prior": {str(a): w for a, w in cands.prior.weights.items()} if cands.prior else None,
               "state_text": sp.state_text(state)}
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@main.command("plan")
@common_options
@_with_state_options
@click.option("--epsilon", type=float, default=0.0, show_default=True)
def plan_cmd(cfg: RunConfig, case_index: int, history, emotions, server: str | None, epsilon: float) -> None:
    """Score the candidates for a state and pick the next action."""
    body = _state_body(cfg, case_index, history, emotions)
    if server:
        out = _post(server, "/plan", {**body, "epsilon": epsilon, "seed": cfg.seed})
    else:
        sp, state = _local_state(cfg, body)
        p = plan_action(sp, state, epsilon, np.random.default_rng(cfg.seed))
        out = {"action_index": p.action_index, "action_name": sp.profile.catalog[p.action_index].name,
               "candidates": list(p.scored.indices), "q_scores": list(p.scored.raw_scores),
               "probs": list(p.scored.probs), "source": p.candidates.source.value}
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@main.command("serve")
@common_options
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(cfg: RunConfig, host: str, port: int) -> None:
    """Run the planner HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(cfg), host=host, port=port)


if __name__ == "__main__":
    main()
