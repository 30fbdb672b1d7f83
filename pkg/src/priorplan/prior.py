"""Candidate action sets from a frozen LLM.

Two modes. In list mode the policy LLM is asked for its top-k option numbers
and the reply is parsed directly. In beam mode the LLM continues the
serialized state freely; each of the K beam continuations is projected onto
the catalog by a rule table and the exponentiated log-probabilities are
grouped per action, giving an estimate of the projected prior.
"""

from __future__ import annotations

import enum
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import ActionCatalog, DialogueState, TaskId, render_history, serialize_state
from .errors import UnparseableOutput, UnsupportedCapability
from .gateway import POLICY_MAX_TOKENS, ChatRequest, Gateway, RoleTag
from .tasks import CATALOGS, POLICY_DIRECTIVE, POLICY_EMOTION_LINE, POLICY_INSTRUCTIONS, strip_emotion_refs

DEFAULT_K = 4
DEFAULT_BEAM_WIDTH = 8


class PriorSource(str, enum.Enum):
    LIST = "ListMode"
    BEAM = "BeamMode"
    FULL = "FullCatalog"  # prior disabled


@dataclass(frozen=True)
class PriorDistribution:
    weights: Mapping[int, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", dict(self.weights))


@dataclass(frozen=True)
class CandidateSet:
    indices: tuple[int, ...]
    source: PriorSource
    prior: PriorDistribution | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.indices:
            raise ValueError("candidate set cannot be empty")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("candidate indices must be distinct")

    def __len__(self) -> int:
        return len(self.indices)


# ---------------------------------------------------------------- prompts


def render_options(catalog: ActionCatalog) -> str:
    return "\n".join(f"({a.index}) {a.name}" for a in catalog.actions)


def policy_messages(
    state: DialogueState, catalog: ActionCatalog, k: int, *, with_emotions: bool = True, skip: int = 0
) -> tuple[str, str]:
    """(instruction, directive) pair for the list-mode policy call."""
    if not 1 <= k <= len(catalog):
        raise ValueError(f"k={k} outside 1..{len(catalog)}")
    emotion_line = POLICY_EMOTION_LINE.format(emotions=state.emotions.render()) if with_emotions else ""
    directive = POLICY_DIRECTIVE.format(
        conversation=render_history(state.history[skip:], catalog.task_id),
        emotion_line=emotion_line,
        options=render_options(catalog),
        k=k,
    )
    instruction = POLICY_INSTRUCTIONS[catalog.task_id]
    return (instruction if with_emotions else strip_emotion_refs(instruction)), directive


def build_policy_prompt(
    state: DialogueState, catalog: ActionCatalog, k: int, *, with_emotions: bool = True
) -> str:
    instruction, directive = policy_messages(state, catalog, k, with_emotions=with_emotions)
    return f"{instruction}\n\n{directive}"


# ---------------------------------------------------------------- list mode

_INT_RUN = re.compile(r"\d+(?:\s*,\s*\d+)*")


def _pad(chosen: list[int], catalog: ActionCatalog, k: int) -> list[int]:
    for idx in catalog.indices:
        if len(chosen) >= k:
            break
        if idx not in chosen:
            chosen.append(idx)
    return chosen


def parse_topk_list(raw: str, catalog: ActionCatalog, k: int) -> CandidateSet:
    m = _INT_RUN.search(raw)
    if m is None:
        raise UnparseableOutput(f"no digits in policy output {raw!r}")
    chosen: list[int] = []
    for tok in m.group(0).split(","):
        idx = int(tok.strip())
        if idx in catalog and idx not in chosen:
            chosen.append(idx)
        if len(chosen) == k:
            break
    return CandidateSet(tuple(_pad(chosen, catalog, k)), PriorSource.LIST)


def fallback_candidates(catalog: ActionCatalog, k: int) -> CandidateSet:
    """The no-op action followed by the first k-1 other actions."""
    return CandidateSet(tuple(_pad([catalog.noop_index], catalog, k)), PriorSource.LIST)


# ---------------------------------------------------------------- projection


def normalize_text(text: str) -> str:
    return " ".join(text.split()).lower()


@dataclass(frozen=True)
class ProjectionTable:
    task_id: TaskId
    patterns: tuple[tuple[int, re.Pattern], ...]
    noop_index: int

    @classmethod
    def from_rules(cls, task_id: TaskId, rules: Iterable[tuple[int, str]], noop_index: int) -> ProjectionTable:
        compiled = tuple((idx, re.compile(pat, re.IGNORECASE)) for idx, pat in rules)
        return cls(TaskId(task_id), compiled, noop_index)

    def check(self, catalog: ActionCatalog) -> None:
        covered = {idx for idx, _ in self.patterns}
        missing = set(catalog.indices) - covered
        if missing:
            raise ValueError(f"actions without a matcher: {sorted(missing)}")
        if self.noop_index != catalog.noop_index:
            raise ValueError("noop_index differs from the catalog fallback")


def project(o: str, table: ProjectionTable) -> int:
    text = normalize_text(o)
    for idx, pat in table.patterns:
        if pat.search(text):
            return idx
    return table.noop_index


def _name_pattern(name: str) -> str:
    words = [re.escape(w.lower()) for w in re.split(r"[\s\-]+", name) if w]
    return r"\b" + r"[\s\-]*".join(words) + r"\b"


# keyword/synonym matchers, tried after exact names
SYNONYMS: dict[TaskId, dict[int, list[str]]] = {
    TaskId.ESCONV: {
        8: [r"\brestat", r"\bparaphras", r"\brephras", r"\bsummari[sz]"],
        6: [r"\breflect", r"\bvalidat", r"acknowledg\w* (their|the|your) feelings?"],
        3: [r"\baffirm", r"\breassur", r"\bencourag"],
        4: [r"\bsuggest", r"\badvi[cs]e", r"\brecommend"],
        2: [r"\bself[\s\-]?disclos", r"\bshare (my|a|an) (own )?(personal )?experience"],
        7: [r"\binform", r"\bfacts?\b", r"\bfactual"],
        1: [r"\bask", r"\bquestion", r"\belaborat", r"tell me more"],
        5: [r"\bchat\b", r"\bsmall talk", r"\bother"],
    },
    TaskId.CIMA: {
        1: [r"\bhint", r"\bclue"],
        3: [r"\bcorrect(ion|ing)?\b(?! translation)", r"\bfix", r"\bmisconception"],
        4: [r"\bconfirm", r"\bpraise", r"\bwell done"],
        2: [r"\bask", r"\bquestion", r"\bcheck understanding"],
        5: [r"\bchat\b", r"\bother"],
    },
    TaskId.CB: {
        6: [r"\bvague price", r"\bcomparativ", r"\bcheaper\b"],
        5: [r"\bcounter[\s\-]?offer", r"\bnew price", r"\blower (price|offer)"],
        4: [r"\boffer\b", r"\binitiat\w* a price", r"\bprice range"],
        11: [r"\breject\w* the price", r"\btoo (high|expensive)"],
        10: [r"\baccept", r"\bdeal\b"],
        7: [r"\bverify", r"\bdouble[\s\-]?check"],
        8: [r"\byes\b", r"\baffirmative"],
        9: [r"\bno\b", r"\bnegative"],
        2: [r"\bask", r"\bquestion", r"\binquir"],
        3: [r"\bdescrib", r"\binformation", r"\bdetails?\b"],
        1: [r"\bhello\b", r"\bhi\b", r"\bchat\b"],
    },
    TaskId.EXTES: {
        11: [r"\breframe"],
        10: [r"\bperspective", r"\bpoint of view"],
        3: [r"\bvalidat"],
        4: [r"\bempath", r"\bsympath"],
        1: [r"\breflect", r"\bparaphras", r"\brestat"],
        2: [r"\bclarif", r"\bask", r"\bquestion"],
        6: [r"\bhope", r"\boptimis"],
        7: [r"\bnon[\s\-]?judg", r"\bjudg"],
        9: [r"\bplan\b", r"\bcollaborat"],
        8: [r"\bsuggest", r"\boptions?\b", r"\badvi[cs]e"],
        13: [r"\bnormali[sz]", r"\bcommon\b"],
        14: [r"\bself[\s\-]?care", r"\brest\b", r"\bsleep"],
        15: [r"\bstress", r"\brelax", r"\bbreath"],
        12: [r"\binform", r"\bfacts?\b"],
        5: [r"\baffirm", r"\bstrength"],
        16: [r"\bchat\b", r"\bother"],
    },
    TaskId.P4G: {
        2: [r"\bamount", r"\$\s?\d"],
        3: [r"\bconfirm"],
        4: [r"\bmore donation", r"\bdonat\w* more"],
        1: [r"\bask\w* (for|them to) (a )?donat", r"\bpropos\w* (a )?donat"],
        7: [r"\bhesita", r"\bwhy not\b", r"\breason\w* for (not|refus)"],
        8: [r"\bthank"],
        9: [r"\blogic", r"\breason"],
        10: [r"\bemotion", r"\bheart"],
        11: [r"\bcredib", r"\breputation", r"\btrust"],
        12: [r"\bsmall commitment", r"\bfoot"],
        13: [r"\bi (also )?donated", r"\bmodel"],
        14: [r"\bhow donations", r"\bfacts?\b", r"\binformation"],
        15: [r"\bstory"],
        16: [r"\bsource"],
        18: [r"\bpersonal", r"\bvalues"],
        17: [r"\bexperience", r"\bpreference"],
        5: [r"\baffirm", r"\bagree with"],
        6: [r"\bgreet", r"\bhello\b", r"\bhi\b"],
        19: [r"\bask", r"\bquestion", r"\binquir"],
    },
}


def default_projection_table(task_id: TaskId | str) -> ProjectionTable:
    """Leading option number, then exact names (longest first), then synonyms."""
    task_id = TaskId(task_id)
    catalog = CATALOGS[task_id]
    rules: list[tuple[int, str]] = [(a.index, rf"^\(?{a.index}\)?(?!\d)") for a in catalog.actions]
    for a in sorted(catalog.actions, key=lambda a: -len(a.name)):
        rules.append((a.index, _name_pattern(a.name)))
    for idx, pats in SYNONYMS[task_id].items():
        rules.extend((idx, p) for p in pats)
    table = ProjectionTable.from_rules(task_id, rules, catalog.noop_index)
    table.check(catalog)
    return table


def load_projection_table(path: str | Path, task_id: TaskId | str) -> ProjectionTable:
    """Read ``task, action_index, pattern`` lines; ``#`` starts a comment line.

    The pattern is the rest of the line after the second comma, so it may
    itself contain commas. Lines for other tasks are ignored.
    """
    task_id = TaskId(task_id)
    rules = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",", 2)
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'task, action_index, pattern'")
        task, idx, pattern = (p.strip() for p in parts)
        if TaskId(task) is task_id:
            rules.append((int(idx), pattern))
    return ProjectionTable.from_rules(task_id, rules, CATALOGS[task_id].noop_index)


def dump_projection_table(table: ProjectionTable) -> str:
    buf = io.StringIO()
    for idx, pat in table.patterns:
        buf.write(f"{table.task_id.value}, {idx}, {pat.pattern}\n")
    return buf.getvalue()


# ---------------------------------------------------------------- beam mode


def estimate_prior_beam(continuations: Sequence[tuple[str, float]], table: ProjectionTable) -> PriorDistribution:
    if not continuations:
        raise ValueError("need at least one continuation")
    lps = [float(lp) for _, lp in continuations]
    if not all(math.isfinite(lp) for lp in lps):
        raise ValueError("log-probabilities must be finite")
    shift = max(lps)
    mass: dict[int, float] = {}
    for (text, _), lp in zip(continuations, lps):
        a = project(text, table)
        mass[a] = mass.get(a, 0.0) + math.exp(lp - shift)
    total = math.fsum(mass.values())
    return PriorDistribution({a: m / total for a, m in sorted(mass.items())})


def top_k(prior: PriorDistribution, k: int, catalog: ActionCatalog) -> CandidateSet:
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, len(catalog))
    ranked = sorted(((w, a) for a, w in prior.weights.items() if w > 0), key=lambda t: (-t[0], t[1]))
    chosen = [a for _, a in ranked[:k]]
    return CandidateSet(tuple(_pad(chosen, catalog, k)), PriorSource.BEAM, prior)


# ---------------------------------------------------------------- orchestration


@dataclass
class ActionPrior:
    """Produces the per-turn candidate set through the gateway."""

    catalog: ActionCatalog
    k: int = DEFAULT_K
    mode: PriorSource = PriorSource.LIST
    beam_width: int = DEFAULT_BEAM_WIDTH
    table: ProjectionTable | None = None
    with_emotions: bool = True
    temperature: float = 1.0

    def __post_init__(self) -> None:
        self.mode = PriorSource(self.mode)
        if self.table is None:
            self.table = default_projection_table(self.catalog.task_id)

    def propose(self, state: DialogueState, gateway: Gateway) -> CandidateSet:
        if self.mode is PriorSource.FULL:
            return CandidateSet(tuple(self.catalog.indices), PriorSource.FULL)
        if self.mode is PriorSource.BEAM:
            try:
                return self._propose_beam(state, gateway)
            except UnsupportedCapability:
                pass
        return self._propose_list(state, gateway)

    def list_request(self, state: DialogueState, gateway: Gateway) -> ChatRequest:
        instruction, _ = policy_messages(state, self.catalog, self.k, with_emotions=self.with_emotions)
        directive = gateway.fit_history(
            len(state.history),
            lambda skip: policy_messages(state, self.catalog, self.k, with_emotions=self.with_emotions, skip=skip)[1],
        )
        return ChatRequest(
            RoleTag.POLICY, instruction, (("user", directive),), self.temperature, POLICY_MAX_TOKENS
        )

    def _propose_list(self, state: DialogueState, gateway: Gateway) -> CandidateSet:
        raw = gateway.complete(self.list_request(state, gateway)).text
        try:
            return parse_topk_list(raw, self.catalog, self.k)
        except UnparseableOutput:
            return fallback_candidates(self.catalog, self.k)

    def _propose_beam(self, state: DialogueState, gateway: Gateway) -> CandidateSet:
        prompt = serialize_state(state, self.catalog, with_emotions=self.with_emotions)
        req = ChatRequest(
            RoleTag.POLICY, "", (("user", prompt),), self.temperature, POLICY_MAX_TOKENS,
            want_logprobs=True, beam_width=self.beam_width,
        )
        resp = gateway.complete_beam(req)
        prior = estimate_prior_beam([(c.text, c.logprob) for c in resp.continuations], self.table)
        return top_k(prior, self.k, self.catalog)
