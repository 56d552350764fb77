"""Exception types shared across the toolkit.

Invalid arguments raise plain ValueError; missing inputs raise
FileNotFoundError. The classes below cover the remaining contract errors.
"""


class FormatError(RuntimeError):
    """A file exists but its contents violate the expected format."""


class TrainingError(RuntimeError):
    """Training aborted (non-finite loss or similar runtime failure)."""
