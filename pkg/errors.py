"""Exception hierarchy shared by every prime-bag module.

Everything raised on purpose derives from ``PrimeBagError`` so callers (the
CLI and the MCP tools) can map failures to exit codes / JSON error payloads
with a single ``except``. Domain errors mean "this operation is undefined
for these operands"; resource errors mean "a configured ceiling stopped the
computation"; parse errors mean "the text was not a valid literal".
"""

from __future__ import annotations

from typing import Any, Optional


class PrimeBagError(RuntimeError):
    """Base error for all prime-bag failures."""


class DomainError(PrimeBagError):
    """Operation is not defined for the given operands."""


class NotPrimeError(DomainError):
    """A prime was required but the value is not prime.

    ``factor`` is the smallest factor found when it was cheap to find one
    (trial division by cached primes), else None.
    """

    def __init__(self, value: int, factor: Optional[int] = None) -> None:
        self.value = value
        self.factor = factor
        detail = f" (divisible by {factor})" if factor else ""
        super().__init__(f"{value} is not prime{detail}")


class ModeError(DomainError):
    """Operand lies outside the number class the operation accepts."""


class UndefinedFormError(DomainError):
    """Indeterminate form such as 0 * inf or division by zero."""


class IrrationalityError(DomainError):
    """A fractional multiplicity appeared where a rational result is required.

    ``index`` names the offending prime index.
    """

    def __init__(self, index: int, message: Optional[str] = None) -> None:
        self.index = index
        super().__init__(
            message or f"prime index {index} has a fractional multiplicity: "
            f"the value is irrational"
        )


class ResourceLimitError(PrimeBagError):
    """A configured ceiling (sieve, enumeration, member cap) was exceeded."""


class ConversionTimeoutError(ResourceLimitError):
    """Factoring exceeded the work ceiling.

    ``partial`` maps the primes found so far to their exponents and
    ``remaining`` is the unfactored cofactor.
    """

    def __init__(
        self,
        message: str,
        *,
        partial: Optional[dict[int, int]] = None,
        remaining: int = 1,
    ) -> None:
        self.partial = dict(partial or {})
        self.remaining = remaining
        super().__init__(message)


class LiteralParseError(PrimeBagError):
    """Malformed literal or expression text.

    ``position`` is the 0-based character offset of the problem, when known.
    """

    def __init__(self, message: str, *, text: str = "", position: Optional[int] = None) -> None:
        self.text = text
        self.reason = message
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


def describe(error: BaseException) -> dict[str, Any]:
    """Flatten an error into the fields shared by the CLI and MCP payloads."""
    payload: dict[str, Any] = {"error": str(error), "kind": type(error).__name__}
    if isinstance(error, NotPrimeError) and error.factor:
        payload["factor"] = error.factor
    if isinstance(error, IrrationalityError):
        payload["index"] = error.index
    if isinstance(error, ConversionTimeoutError):
        payload["partial"] = {str(p): e for p, e in sorted(error.partial.items())}
        payload["remaining"] = str(error.remaining)
    if isinstance(error, LiteralParseError) and error.position is not None:
        payload["position"] = error.position
    return payload


def exit_code_for(error: BaseException) -> int:
    """Exit code of the CLI for a given failure."""
    if isinstance(error, LiteralParseError):
        return 4
    if isinstance(error, ResourceLimitError):
        return 3
    if isinstance(error, DomainError):
        return 2
    return 1
