"""
Exception and warning types raised by the laboratory
"""


class LabError(Exception):
    """Base class for every error raised by this package"""


class InvalidArgumentError(LabError, ValueError):
    """An argument violates a documented precondition"""


class PrecisionFailureError(LabError, ArithmeticError):
    """A numerical routine could not reach its target accuracy"""


class BranchCutError(LabError, ValueError):
    """A Szegő function was evaluated on one of its branch cuts"""


class InvalidSymbolError(LabError, ValueError):
    """A symbol is not admissible for the requested operation"""


class ConsistencyError(LabError, ArithmeticError):
    """Two independent numerical routes disagree beyond tolerance"""


class UnknownExperimentError(LabError, KeyError):
    """The experiment name is not registered with the harness"""


class NumericalInstabilityWarning(RuntimeWarning):
    """A computation lost precision but still returned a value"""
