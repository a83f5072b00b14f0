"""
Errors module - Exception hierarchy shared by the estimation library
"""


class PairSurvError(Exception):
    """Base class for every error raised by the library"""


class ParseError(PairSurvError):
    """Malformed input file; carries the offending line number when known"""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConsistencyError(PairSurvError):
    """Grids, counts or parameters that do not fit together"""


class EstimatorError(PairSurvError):
    """An estimator precondition does not hold (e.g. no observations)"""


class IdentifiabilityError(PairSurvError):
    """The censoring law hides part of the distribution being recovered"""


class SamplingError(PairSurvError):
    """A prior draw was requested at a point carrying no weight"""


class ConfigError(PairSurvError):
    """Invalid prior, scenario or command configuration"""


class UsageError(ConfigError):
    """Command line arguments that do not form a valid command"""
