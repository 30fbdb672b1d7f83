"""Exception hierarchy shared across the package."""


class PriorPlanError(Exception):
    """Base class for every error raised by priorplan."""


class IndexMismatch(PriorPlanError):
    """An utterance was appended with the wrong turn index."""


# gateway
class GatewayError(PriorPlanError):
    pass


class TransportError(GatewayError):
    """Network failure or HTTP error that survived all retries."""


class ProtocolError(GatewayError):
    """The backend answered with a body we cannot interpret."""


class BudgetExceeded(GatewayError):
    """The per-run call cap was reached."""


class UnsupportedCapability(GatewayError):
    """The backend cannot return per-continuation log-probabilities."""


# prior / emotion
class UnparseableOutput(PriorPlanError):
    """Policy output contained no digits at all."""


class EmptyLabel(PriorPlanError):
    """Emotion reply contained no alphabetic token."""


# value model / learner
class DimensionMismatch(PriorPlanError):
    pass


class InsufficientData(PriorPlanError):
    """Replay buffer holds fewer items than requested."""


class NonFiniteLoss(PriorPlanError):
    """TD loss became NaN or infinite; the run must abort."""


# environment
class MalformedPrice(PriorPlanError):
    pass


class InvalidCase(PriorPlanError, ValueError):
    pass


class TurnLimitReached(PriorPlanError):
    """run_turn was called on a state that already used all turns."""


# metrics / persistence
class EmptyInput(PriorPlanError):
    pass


class WrongTask(PriorPlanError):
    pass


class FormatVersionMismatch(PriorPlanError):
    """Checkpoint header is missing, truncated or from another version."""
