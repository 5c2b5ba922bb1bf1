"""Exception hierarchy shared across the package.

Mathematical refusals (a hypothesis fails) are not exceptions; they travel
through return values and certificate statuses. Exceptions are reserved for
contract violations, size caps and internal consistency failures.
"""


class SelmercertError(Exception):
    """Base class for all package errors."""


class SizeLimitError(SelmercertError):
    """Input exceeds a configured size bound."""


class BadReductionError(SelmercertError):
    """A prime of bad reduction where good reduction is required."""


class GoodReductionError(SelmercertError):
    """A prime of good reduction where bad reduction is required."""


class BadPrimeError(SelmercertError):
    """A prime violating a divisibility precondition."""


class ConstructionError(SelmercertError):
    """An exact construction (order, algebra, lattice) could not be completed."""


class MassMismatchError(ConstructionError):
    """Ideal class enumeration closed with the wrong mass; indicates a bug."""


class NoEigenvectorError(SelmercertError):
    """No simultaneous eigenvector with the requested eigenvalues exists."""


class AmbiguousEigenvectorError(SelmercertError):
    """The requested simultaneous eigenspace has dimension greater than one."""


class UnsupportedOperatorError(SelmercertError):
    """Hecke operator requested at a prime where it is not defined here."""


class EmbeddingNotFound(SelmercertError):
    """No optimal embedding exists in the searched order.

    ``reason`` is one of ``"heegner-hypothesis-violated"`` (a local splitting
    condition fails, so no order in the algebra works) or
    ``"not-in-this-order"`` (the embedding lives in a different ideal class).
    """

    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class CacheError(SelmercertError):
    """Cache file IO failure (distinct from mathematical refusals)."""


class TableError(SelmercertError):
    """Curve table parse or validation failure."""

    def __init__(self, message, line=None, label=None):
        self.line = line
        self.label = label
        where = []
        if line is not None:
            where.append(f"line {line}")
        if label is not None:
            where.append(f"label {label!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
