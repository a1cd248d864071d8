"""Exception taxonomy shared by every module of the package."""


class DialogueError(Exception):
    """Base class for all package errors."""


class OverlapError(DialogueError):
    """A state is claimed by two blocks."""


class CoverageError(DialogueError):
    """A state is claimed by no block."""


class ResidueError(DialogueError):
    """A residue class of the periodic tail is claimed zero or several times."""


class SizeMismatchError(DialogueError):
    """Operands are defined over ground sets of different sizes."""


class EmptyFamilyError(DialogueError):
    """join_all / meet_all called on an empty list of partitions."""


class EmptyBlockError(DialogueError):
    """A message function was evaluated on the empty set."""


class UndefinedUtilityError(DialogueError):
    """A maximin utility table has no entry for a required (action, state) pair."""


class ZeroMassBlockError(DialogueError):
    """A posterior message was requested for a block of prior mass zero."""


class SizeLimitError(DialogueError):
    """An exhaustive check was requested beyond its supported ground-set size."""


class UnknownFamilyError(DialogueError):
    """Unrecognised message-function family name."""


class LabelMismatchError(DialogueError):
    """Label list does not match the object it is supposed to describe."""


class BudgetExceededError(DialogueError):
    """A finite dialogue ran past its successor-stage budget."""


class OrdinalBudgetError(DialogueError):
    """A transfinite dialogue needed a stage beyond the ordinal budget."""


class NoCertificateError(DialogueError):
    """No shift certificate found; the scenario is outside the decidable class."""


class CertificateError(DialogueError):
    """A shift certificate failed verification against the history."""


class MismatchError(DialogueError):
    """Truncation oracle found a disagreement between symbolic and finite runs."""


class UnknownSuiteError(DialogueError):
    """run_property_suite called with an unregistered suite name."""


class ParseError(DialogueError):
    """A scenario document is syntactically malformed."""


class ValidationError(DialogueError):
    """A scenario document is well-formed but violates an invariant."""


class KindError(DialogueError):
    """A command was applied to a scenario of the wrong kind."""
