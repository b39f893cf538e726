"""Exception types shared across the package.

Each class carries the process exit code the command line uses for it.
"""


class CayleyNormsError(Exception):
    exit_code = 1


class InputError(CayleyNormsError, ValueError):
    """Malformed input: unknown symbols, bad rules, violated preconditions."""

    exit_code = 2


class ResourceError(CayleyNormsError):
    """A memory or combinatorial budget would be exceeded.

    ``completed_radius`` is the largest radius that fit in the budget, when
    that notion applies.
    """

    exit_code = 3

    def __init__(self, msg, completed_radius=None):
        super().__init__(msg)
        self.completed_radius = completed_radius


class NumericalError(CayleyNormsError, ArithmeticError):
    exit_code = 4


class RecipeError(InputError):
    """A recipe was asked to run on a group it does not support."""
