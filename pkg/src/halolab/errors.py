"""Shared exception types."""


class HalolabError(Exception):
    """Base class for all library errors."""


class ContractViolation(HalolabError):
    """A documented precondition or invariant was violated by the caller."""


class BudgetError(HalolabError):
    """A resource budget (memory, enumeration size, combinatorial) was exceeded.

    The message names the budget and how far the computation got.
    """


class ParseError(HalolabError):
    """Descriptor parse failure, carrying the byte offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnsupportedFamilyError(HalolabError):
    """Operation not defined for this halo family."""


class UndecomposableError(HalolabError):
    """The element is provably outside the subgroup generated by the
    conjugated natural generators, so no generator word exists."""


class NotInDomainError(HalolabError):
    """Element is outside the domain subgroup of a partial morphism."""
