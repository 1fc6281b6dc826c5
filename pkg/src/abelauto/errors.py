"""Shared exception types and resource caps."""

import os


class AlphabetMismatch(ValueError):
    """Binary automaton operation applied to automata with different alphabets."""


class CapExceeded(RuntimeError):
    """A configured resource cap was hit before the computation finished."""

    def __init__(self, message, **payload):
        super().__init__(message)
        self.payload = payload


class CarryCapExceeded(CapExceeded):
    """Carry-state exploration exceeded the cap.

    The payload carries ``cap``, the number of carries seen, and (when the
    caller could compute it) ``length_bound_estimate``, the theoretical
    carry-length bound 2*N derived from the length-function constants.
    """


class KernelCapExceeded(CapExceeded):
    """Kernel class discovery exceeded the cap.

    For sets built from genuine automata a finite kernel is guaranteed, so
    hitting this cap indicates a bug; for hand-rolled inputs it is evidence
    the set is not automatic.  ``payload['classes_seen']`` reports progress.
    """


class StepCapExceeded(CapExceeded):
    """Greedy expansion / BFS step cap exceeded (digit set likely not spanning)."""


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def carry_cap():
    return _env_int("FA_CARRY_CAP", 10_000)


def kernel_cap():
    return _env_int("FA_KERNEL_CAP", 4_096)


def ladder_bound():
    return _env_int("FA_LADDER_BOUND", 10)
