from __future__ import annotations

from typing import Any, Dict, Optional


class ProfsemError(Exception):
    """Base class for everything the library raises on purpose."""


class StructuralError(ProfsemError, ValueError):
    """Malformed tables, out-of-range indices, mismatched bases."""


class MismatchError(ProfsemError, ValueError):
    """Operands live on different spaces or semirings."""


class DepthExhaustedError(ProfsemError):
    def __init__(self, needed: int, certified: int, what: str = "value") -> None:
        super().__init__(f"{what} needs level {needed} but is certified only to level {certified}")
        self.needed = needed
        self.certified = certified


class BudgetExceededError(ProfsemError):
    def __init__(self, size: int, budget: int, what: str = "enumeration") -> None:
        super().__init__(f"{what} of size {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


class NotIdempotentError(ProfsemError):
    def __init__(self, label: str, witness: Dict[str, Any]) -> None:
        super().__init__(f"{label} is not idempotent: {witness}")
        self.witness = witness


class DescriptorError(ProfsemError):
    """JSON descriptor could not be read; `location` names the file and field."""

    def __init__(self, message: str, location: Optional[str] = None) -> None:
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
