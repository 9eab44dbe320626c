"""Errors raised across the device management layer."""


class AuthError(Exception):
    """Unknown token or operation on a closed/unknown session."""


class AlreadyClosed(Exception):
    """Session was closed twice."""


class UnknownDevice(KeyError):
    """No registered device under that id."""


class UnknownKey(KeyError):
    """Property key outside the published static/dynamic key lists."""


class UnknownJob(KeyError):
    """No job record under that id."""


class NotDone(Exception):
    """Result requested before the job reached DONE."""


class AlreadyTerminal(Exception):
    """Cancel requested on a job already in a terminal state."""


class IllegalTransition(Exception):
    """Attempted a job-state edge outside the allowed graph."""


class ValidationError(ValueError):
    """Program rejected: parse failure, non-native gate, or illegal coupling."""


class LimitError(ValueError):
    """Shots or priority outside configured bounds."""


class InvalidProperties(ValueError):
    """Plugin static properties violate their invariants."""


class DuplicateDevice(ValueError):
    """A device with that id or display name is already registered."""


class Cancelled(Exception):
    """Execution interrupted by a cancellation signal."""
