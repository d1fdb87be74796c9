"""Exception types shared across the package.

The CLI maps these to distinct exit codes: input problems exit 2,
budget refusals exit 3, construction failures exit 4.
"""


class InputError(ValueError):
    """Malformed input: bad parameters, files, or invariant violations."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


class ConstructionError(RuntimeError):
    """Random construction or certification failed within its retry bounds."""
