"""Exception hierarchy shared by the library, the CLI and the HTTP routes."""
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """One failed check reported by a total validation operation."""

    kind: str
    detail: str
    subject: tuple = field(default=())

    def to_dict(self):
        return {'kind': self.kind, 'detail': self.detail, 'subject': [str(s) for s in self.subject]}


class DgsError(Exception):
    error_type = 'DgsError'
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.error_type = cls.__name__

    def to_dict(self):
        payload = {
            'success': False,
            'error': self.message,
            'error_type': self.error_type,
        }
        for key, value in self.details.items():
            payload[key] = [v.to_dict() if hasattr(v, 'to_dict') else v for v in value] \
                if isinstance(value, (list, tuple)) else value
        return payload


class ConfigError(DgsError):
    pass


class UnknownTag(DgsError):
    pass


class UnsortedStream(DgsError):
    pass


class InvalidInput(DgsError):
    pass


class InvalidProgram(DgsError):
    pass


class InvalidPlan(DgsError):
    pass


class InvalidDiagram(DgsError):
    pass


class NoValidDiagram(DgsError):
    pass


class PreconditionUnsatisfiable(DgsError):
    pass


class IncompatiblePair(DgsError):
    pass


class GeneratorExhausted(DgsError):
    exit_code = 2


class Unowned(DgsError):
    pass


class NoMatch(DgsError):
    pass


class StaleMessage(DgsError):
    pass


class ProtocolViolation(DgsError):
    exit_code = 3


class Deadlock(DgsError):
    exit_code = 3


class ConsistencyFailure(DgsError):
    exit_code = 2


def _error_classes(cls=DgsError):
    found = {cls.error_type: cls}
    for sub in cls.__subclasses__():
        found.update(_error_classes(sub))
    return found


def error_from_dict(payload):
    """Rebuild the error a worker reported with `to_dict`; unknown types come back as DgsError."""
    details = {k: v for k, v in payload.items() if k not in ('success', 'error', 'error_type')}
    cls = _error_classes().get(payload.get('error_type'), DgsError)
    error = cls(payload.get('error', 'worker failed'), **details)
    if cls is DgsError and payload.get('error_type'):
        error.details.setdefault('cause', payload['error_type'])
    return error
