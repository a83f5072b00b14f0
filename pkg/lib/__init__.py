"""Library modules for bivariate survival estimation"""
from . import errors
from . import config
from . import survdata
from . import univariate
from . import betaproc2d
from . import dabrowska
from . import pruittlab
from . import report
from . import metrics
from . import simharness
from . import preflight

__all__ = [
    'errors', 'config', 'survdata', 'univariate', 'betaproc2d', 'dabrowska',
    'pruittlab', 'report', 'metrics', 'simharness', 'preflight',
]
