"""Exception hierarchy shared by all amencert modules.

The CLI maps these onto exit codes: input-class errors (bad data, unsupported
families, resource caps) exit 2, numeric failures exit 3, policy violations
exit 4.
"""


class AmencertError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AmencertError):
    """Malformed or inconsistent user input."""


class CapabilityError(InputError):
    """Requested feature exists only for built-in group/measure families."""


class ResourceError(InputError):
    """A computation would exceed the configured resource cap."""


class UnsupportedMeasureError(InputError):
    """Measure outside the supported class (e.g. density with zeros)."""


class NumericError(AmencertError):
    """A numerical routine failed to meet its accuracy contract."""


class PolicyError(AmencertError):
    """A request violates a soundness policy (e.g. certifying from an estimate)."""
