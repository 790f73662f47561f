"""Exception taxonomy shared by all modules.

Four failure kinds are distinguished so callers (and the CLI exit-code
logic) can react uniformly: bad inputs, violated value-level contracts,
scalar functions evaluated outside their domain, and numerical-backend
failures.
"""


class InputError(ValueError):
    """Invalid argument values or shapes supplied by the caller."""


class ContractError(ValueError):
    """A documented value-level precondition was violated (e.g. f(0) != 0)."""


class DomainError(ValueError):
    """A scalar map was evaluated where it is not finite / not defined."""


class NumericalError(RuntimeError):
    """A numerical backend failed to converge or returned garbage."""
