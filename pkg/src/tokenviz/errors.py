"""Shared error type."""


class DataError(ValueError):
    """Invalid input data, file contents, or model/corpus mismatch.

    The CLI maps this to exit code 2.
    """
