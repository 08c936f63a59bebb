"""Package-wide exception types."""


class ResourceLimitError(Exception):
    """A request exceeds a configured size cap (dimension, brute-force bound)."""
