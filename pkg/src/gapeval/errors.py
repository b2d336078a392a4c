"""Exception taxonomy shared by every module.

Loaders raise :class:`FormatError` for files that cannot be decoded and
:class:`ValidationError` for files that decode but break an invariant.
Numeric operations raise :class:`ContractError` on violated preconditions
and :class:`DegenerateDataError` when an input is valid but the quantity
is mathematically undefined on it.
"""


class GapError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(GapError):
    """A file does not match its documented on-disk format."""


class ValidationError(GapError):
    """A decoded artifact violates a schema invariant."""


class ContractError(GapError):
    """An operation was called with inputs outside its contract."""


class DegenerateDataError(GapError):
    """Valid inputs on which the requested quantity is undefined."""
