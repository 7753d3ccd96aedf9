"""Exception hierarchy shared across the package.

ConfigError covers anything wrong with user-supplied parameters or files
(CLI exit code 2); RuntimeFailure covers errors inside an otherwise valid
run (exit code 3).
"""


class UadetError(Exception):
    pass


class ConfigError(UadetError):
    """Invalid parameter, config file, or infeasible request."""

    exit_code = 2


class RuntimeFailure(UadetError):
    """A validly configured run that could not be completed."""

    exit_code = 3


class ConditionNotMet(ConfigError):
    """A formula's hypothesis fails for the given inputs (e.g. coherence
    too large for the recovery guarantee)."""
