"""
Exception types raised by SentiParse.

Every error derives from :class:`SentiParseError`, which is itself a
``ValueError``, so callers that guard with ``except ValueError`` (as the
command-line front-end does) catch all of them.
"""


class SentiParseError(ValueError):
    """Base class for all library errors."""


class LabelFormatError(SentiParseError):
    """An arc label is empty, has an empty ``#`` segment, or an unknown atom."""


class ConfigurationError(SentiParseError):
    """A configuration map or an encoding strategy cannot be satisfied."""


class MalformedGraphError(SentiParseError):
    """A dependency graph violates the root-label invariant."""


class TransitionError(SentiParseError):
    """
    An action is not legal in the state it is applied to.

    :param reason: The violated precondition, in words.
    :param state: The state the action was applied to.
    :param action: The offending action.
    """

    def __init__(self, reason, state=None, action=None):
        super(TransitionError, self).__init__(reason)
        self.reason = reason
        self.state = state
        self.action = action


class ReplayError(TransitionError):
    """
    Replaying a transition sequence hit an illegal action.

    :param step: 1-based index of the failing action.
    """

    def __init__(self, step, reason, state=None, action=None):
        super(ReplayError, self).__init__(
            "step {:d}: {}".format(step, reason), state, action)
        self.step = step


class IngestionError(SentiParseError):
    """A sentiment corpus record cannot be read. Carries the ``sent_id``."""

    def __init__(self, sent_id, message):
        super(IngestionError, self).__init__(
            "record {}: {}".format(sent_id, message))
        self.sent_id = sent_id


class ParseFormatError(SentiParseError):
    """A line of a tabular or embedding file is malformed."""

    def __init__(self, line_number, message, path=None):
        where = "line {:d}".format(line_number)
        if path is not None:
            where = "{}:{:d}".format(path, line_number)
        super(ParseFormatError, self).__init__(
            "{}: {}".format(where, message))
        self.line_number = line_number
        self.path = path


class AlignmentError(SentiParseError):
    """Gold and predicted corpora do not contain the same sentences."""


class InputError(SentiParseError):
    """Model input does not match the model (e.g. external vector size)."""


class TrainingError(SentiParseError):
    """Training diverged (non-finite loss)."""
