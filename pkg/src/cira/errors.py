"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: usage problems exit 1,
data problems exit 2, anything else exits 3.
"""


class CiraError(Exception):
    """Base class for all errors raised by this package."""


class DataError(CiraError):
    """Invalid input data: malformed corpus rows, schema violations,
    degenerate tables, dimension mismatches."""


class SchemaViolation(DataError):
    """An annotation record breaks a labeling rule. ``rule`` names the
    violated rule so services can surface it verbatim."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class TaggerError(CiraError):
    """A linguistic tagger failed or is unavailable; carries the tagger's
    own diagnostics in the message."""
