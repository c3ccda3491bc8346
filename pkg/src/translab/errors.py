"""Exception hierarchy shared by every translab module."""


class TranslabError(Exception):
    """Base class for all errors raised by translab."""


class DomainError(TranslabError, ValueError):
    """A point or radius lies outside the region where an operation is defined."""


class SingularityError(TranslabError, ValueError):
    """A kernel was evaluated exactly at its singular point."""


class PreconditionError(TranslabError, ValueError):
    """A hypothesis of a construction failed; the message names the violated bound."""


class ConfigError(TranslabError, ValueError):
    """An experiment configuration or family specification is invalid."""


class EvaluationError(TranslabError, ArithmeticError):
    """A user-supplied function produced non-finite samples."""


class InsufficientDataError(TranslabError, ValueError):
    """Too few usable samples to produce a fit."""
