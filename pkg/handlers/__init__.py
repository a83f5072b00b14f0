"""Handler modules for the command-line subcommands"""
from . import estimate
from . import audit
from . import pruitt
from . import study
from . import table

__all__ = ['estimate', 'audit', 'pruitt', 'study', 'table']
