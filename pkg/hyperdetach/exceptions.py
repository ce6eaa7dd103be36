"""
Error types raised by the detachment toolkit
"""

from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional


class HyperdetachError(ValueError):
    """Base class for every error the library raises on purpose"""


class DomainError(HyperdetachError):
    """Unknown ids, malformed structures or invalid parameters"""


class PreconditionError(HyperdetachError):
    """An operation was called outside its precondition"""


class SchemaError(DomainError):
    """A JSON document does not match the expected schema"""

    def __init__(self, message: str, path: str = "$", line: Optional[int] = None,
                 column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        location = path
        if line is not None:
            location = f"line {line}, column {column}"
        super().__init__(f"{location}: {message}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': 'schema',
            'path': self.path,
            'line': self.line,
            'column': self.column,
            'message': str(self),
        }


@dataclass(frozen=True)
class Refusal:
    """One failed necessary condition, with both sides of the relation"""
    condition: str
    relation: str
    lhs: Any
    rhs: Any
    reason: str
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class FactorizationRefused(HyperdetachError):
    """A factorization request fails a necessary condition"""

    def __init__(self, refusals: List[Refusal]):
        self.refusals = list(refusals)
        reasons = "; ".join(r.reason for r in self.refusals) or "refused"
        super().__init__(reasons)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': 'refused',
            'refusals': [r.to_dict() for r in self.refusals],
        }
