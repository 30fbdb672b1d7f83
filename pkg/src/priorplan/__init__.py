"""LLM-prior dialogue planning with a small TD-trained value head."""

from .core import ActionCatalog, CaseInfo, DialogueState, TaskId, Transition, serialize_state
from .environment import EpisodeResult, SelfPlay, map_critic_verdict
from .learner import ReplayBuffer, TrainConfig, td_update
from .prior import ActionPrior, CandidateSet, PriorSource, estimate_prior_beam, parse_topk_list, top_k
from .tasks import CATALOGS, Status, get_profile
from .value import QHeadParams, q_forward

__version__ = "0.1.0"

__all__ = [
    "ActionCatalog", "ActionPrior", "CATALOGS", "CandidateSet", "CaseInfo", "DialogueState", "EpisodeResult",
    "PriorSource", "QHeadParams", "ReplayBuffer", "SelfPlay", "Status", "TaskId", "TrainConfig", "Transition",
    "estimate_prior_beam", "get_profile", "map_critic_verdict", "parse_topk_list", "q_forward",
    "serialize_state", "td_update", "top_k",
]
