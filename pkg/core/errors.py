"""
Error Types

Everything raised on purpose by the core package derives from ImproveError.
Payload validation keeps raising plain ValueError.
"""


class ImproveError(Exception):
    pass


class DomainError(ImproveError, ValueError):
    """Argument outside the model: v not in Δ(x), unknown node or label."""


class ProtocolError(ImproveError):
    """A learner or adversary was driven outside its contract."""


class NonRealizableError(ProtocolError):
    """An update would leave the version space empty."""


class RealizabilityError(ImproveError):
    """No hypothesis in the class explains the rounds played so far."""

    def __init__(self, round_index, message=None):
        self.round_index = round_index
        super().__init__(
            message or f"round {round_index}: environment is no longer realizable"
        )


class InvariantError(ImproveError, AssertionError):
    """A case analysis that the theory guarantees came up empty."""


class ResourceLimitError(ImproveError):
    """Search, pool or cache exceeded its documented bound."""
