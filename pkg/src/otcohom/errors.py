"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user input (polynomial, units, theta, options).

    Messages carry enough context to fix the input; the CLI maps this to
    exit code 1.
    """


class ConsistencyError(AssertionError):
    """An internal cross-check identity failed; names the violated identity."""
