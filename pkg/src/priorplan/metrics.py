"""Average turns, success rate and sale-to-list ratio.

The transcript log is the source of truth: :func:`episodes_from_records`
rebuilds per-episode summaries from it so metrics can be recomputed offline.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import TaskId
from .errors import EmptyInput, WrongTask
from .tasks import Status


@dataclass(frozen=True)
class EpisodeSummary:
    """The slice of an episode the metrics need."""

    task: TaskId
    outcome: Status
    turns: int
    max_turns: int
    sl: float | None = None


def summarize(result, task: TaskId | str, max_turns: int) -> EpisodeSummary:
    return EpisodeSummary(TaskId(task), Status(result.outcome), result.turns, max_turns, result.sl)


def _check(results: Sequence) -> None:
    if not results:
        raise EmptyInput("no episodes")


def compute_at(results: Sequence[EpisodeSummary], count_failures_at_cap: bool = True) -> float:
    _check(results)
    turns = [
        r.max_turns if (count_failures_at_cap and r.outcome is not Status.COMPLETED) else r.turns
        for r in results
    ]
    return sum(turns) / len(turns)


def compute_sr(results: Sequence[EpisodeSummary]) -> float:
    _check(results)
    return sum(r.outcome is Status.COMPLETED for r in results) / len(results)


def compute_sl(results: Sequence[EpisodeSummary]) -> float:
    _check(results)
    if any(r.task is not TaskId.CB for r in results):
        raise WrongTask("sale-to-list ratio is defined for CB only")
    vals = [(r.sl or 0.0) if r.outcome is Status.COMPLETED else 0.0 for r in results]
    return sum(vals) / len(vals)


@dataclass(frozen=True)
class MetricsReport:
    at: float
    sr: float
    n_episodes: int
    sl_avg: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [("episodes", str(self.n_episodes)), ("AT", f"{self.at:.4f}"), ("SR", f"{self.sr:.4f}")]
        if self.sl_avg is not None:
            rows.append(("SL", f"{self.sl_avg:.4f}"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def report(results: Sequence[EpisodeSummary], count_failures_at_cap: bool = True) -> MetricsReport:
    _check(results)
    sl = compute_sl(results) if all(r.task is TaskId.CB for r in results) else None
    return MetricsReport(compute_at(results, count_failures_at_cap), compute_sr(results), len(results), sl)


def episodes_from_records(records: Iterable[Mapping]) -> list[EpisodeSummary]:
    """Group per-turn transcript records by episode id, preserving first-seen order."""
    grouped: dict[str, list[Mapping]] = {}
    for r in records:
        grouped.setdefault(r["episode"], []).append(r)
    out = []
    for recs in grouped.values():
        last = max(recs, key=lambda r: r["turn"])
        outcome = Status.COMPLETED if last["status"] == Status.COMPLETED.value else Status.FAILED
        out.append(EpisodeSummary(TaskId(last["task"]), outcome, int(last["turn"]), int(last["max_turns"]),
                                  last.get("sl")))
    return out


def read_transcript(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
