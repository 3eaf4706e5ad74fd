"""Exception types that the command line maps to exit codes."""


class InputError(Exception):
    """Unreadable, empty or malformed input file."""


class DegenerateDataError(Exception):
    """Data too sparse or small to reconstruct anything."""
