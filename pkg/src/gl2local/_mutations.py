"""Fault-injection hooks for negative controls.

The verification suites are only trustworthy if they actually fail when
a formula is wrong.  Each hook names one deliberate defect; tests (and
the CLI flag --inject) flip a hook on, run a verifier, and demand a
failure.  Production code consults `active` at a handful of points; with
no hook enabled every consultation is a no-op.
"""

from contextlib import contextmanager

HOOKS = (
    "flip_frobenius_unit_sign",   # negate the descended frobenius unit
    "flip_invariant_sign",        # negate the gluing invariant x(J)
    "shift_gap_exponent",         # add 1 to one filtration gap exponent
)

_active: set[str] = set()


def active(name: str) -> bool:
    return name in _active


@contextmanager
def inject(name: str):
    """Enable one named defect for the duration of the block."""
    if name not in HOOKS:
        raise ValueError(f"unknown mutation hook: {name!r}")
    _active.add(name)
    try:
        yield
    finally:
        _active.discard(name)
