"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration errors exit 2, runtime
faults exit 3, invariant/audit failures exit 4.
"""


class CascadesimError(Exception):
    pass


class ConfigurationError(CascadesimError):
    """Invalid configuration or malformed input file."""


class RuntimeFault(CascadesimError):
    """Non-recoverable failure during a simulation (e.g. non-finite state)."""


class InvariantViolation(CascadesimError):
    """A contract the simulator guarantees was found broken."""


class AuditUnavailable(CascadesimError):
    """Requested audit needs recorded state the run did not keep."""
