"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class BlowupChargeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(BlowupChargeError, ValueError):
    """Malformed polynomial text.  ``position`` is the 0-based offset of the problem."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")


class CanonicalSupportViolation(BlowupChargeError, ValueError):
    """An extension-class polynomial has a monomial outside the canonical index set."""

    def __init__(self, j: int, monomial: tuple[int, int]):
        self.j = j
        self.monomial = monomial
        l, i = monomial
        super().__init__(
            f"monomial z^{l}*u^{i} is outside the canonical support for j={j} "
            f"(need 1 <= i <= {2 * j - 2} and i-j+1 <= l <= {j - 1})"
        )


class DomainError(BlowupChargeError, ValueError):
    """Argument outside the domain of a closed-form formula."""


class WindowTooSmall(BlowupChargeError):
    """The truncation window cannot hold the computation; enlarge it and retry."""


class NonStabilized(BlowupChargeError):
    """A dimension kept changing through the maximal number of enlargements."""

    def __init__(self, what: str, history: list):
        self.what = what
        self.history = list(history)
        super().__init__(f"{what} did not stabilize; dimensions seen: {self.history}")


class CrossCheckMismatch(BlowupChargeError):
    """A closed formula and its brute-force oracle disagree, or a fatal bound failed.

    ``report`` carries the partially filled report when one is available so
    callers can still print it.
    """

    def __init__(self, what: str, expected, observed, report=None):
        self.what = what
        self.expected = expected
        self.observed = observed
        self.report = report
        super().__init__(f"{what}: expected {expected!r}, observed {observed!r}")
