"""
Configuration module - Process settings, prior/scenario documents and
validation of parsed commands
"""
import copy
import logging
import os
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional

import yaml

from lib.errors import ConfigError, UsageError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('estimate', 'audit', 'pruitt', 'study', 'table')
ESTIMATORS = ('noninformative', 'bayes', 'dabrowska', 'km-marginal')


def get_settings():
    """Process settings from environment variables"""
    return {
        'log_level': os.getenv('PAIRSURV_LOG_LEVEL', 'INFO').upper(),
        'metrics_enabled': os.getenv('METRICS_ENABLED', 'false').lower() == 'true',
        'metrics_textfile': os.getenv('METRICS_TEXTFILE', ''),
    }


def deep_merge(base, updates):
    """
    Deep merge two dictionaries
    Updates values in base with values from updates, recursively
    """
    result = copy.deepcopy(base)

    for key, value in updates.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def load_document(path):
    """
    Read a JSON or YAML document holding a mapping
    A missing file raises FileNotFoundError so callers can report it as such
    """
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse {path}: {e}") from None

    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")

    logger.debug(f"Loaded document {path} with keys {sorted(doc)}")
    return doc


def parse_time(value) -> Decimal:
    """Exact time from a document value; floats are read through their shortest decimal text"""
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"Malformed time {value!r}")
    if isinstance(value, Decimal):
        t = value
    else:
        try:
            t = Decimal(str(value).strip())
        except InvalidOperation:
            raise ConfigError(f"Malformed time {value!r}") from None

    if not t.is_finite() or t < 0:
        raise ConfigError(f"Time must be finite and nonnegative, got {value!r}")
    return t


def parse_weight(value):
    """Nonnegative exact weight; accepts ints, decimals and strings such as '1/3'"""
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"Malformed weight {value!r}")
    if isinstance(value, (int, Fraction)):
        weight = value
    else:
        try:
            weight = Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"Malformed weight {value!r}") from None

    if weight < 0:
        raise ConfigError(f"Weight must be nonnegative, got {value!r}")
    return weight


def parse_count(value, name, minimum=1) -> int:
    """Integer count of at least `minimum`; bools and floats are rejected"""
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


@dataclass(frozen=True)
class CommandConfig:
    """One validated command line"""
    subcommand: str
    input: Optional[str] = None
    output: Optional[str] = None
    estimator: str = 'noninformative'
    prior: Optional[str] = None
    queries: Optional[str] = None
    config: Optional[str] = None
    summary: Optional[str] = None
    seed: Optional[int] = None
    m_conc: Optional[float] = None
    n: Optional[int] = None
    replications: int = 1
    workers: Optional[int] = None
    compare_beta: bool = False

    @classmethod
    def from_args(cls, args) -> 'CommandConfig':
        fields = {
            name: getattr(args, name)
            for name in cls.__dataclass_fields__
            if hasattr(args, name)
        }
        cfg = cls(**fields)
        cfg.validate()
        return cfg

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"Unknown subcommand {self.subcommand!r}")

        required = {
            'estimate': ('input', 'output'),
            'audit': ('input', 'output'),
            'pruitt': (),
            'study': ('config', 'output'),
            'table': ('input', 'queries', 'output'),
        }[self.subcommand]
        for name in required:
            if not getattr(self, name):
                raise UsageError(f"{self.subcommand} requires --{name}")

        if self.subcommand == 'estimate':
            if self.estimator not in ESTIMATORS:
                raise UsageError(f"Unknown estimator {self.estimator!r}; expected one of {', '.join(ESTIMATORS)}")
            if self.estimator == 'bayes' and not self.prior:
                raise UsageError("--estimator bayes requires --prior")
            if self.prior and self.estimator != 'bayes':
                raise UsageError("--prior only applies to --estimator bayes")

        if self.subcommand == 'pruitt':
            if self.seed is None:
                raise UsageError("pruitt requires an explicit --seed")
            if self.n is None or self.n < 1:
                raise UsageError(f"--n must be >= 1, got {self.n}")
            if self.m_conc is None or not self.m_conc > 0:
                raise UsageError(f"--M must be > 0, got {self.m_conc}")
            if self.replications < 1:
                raise UsageError(f"--replications must be >= 1, got {self.replications}")

        if self.workers is not None and self.workers < 1:
            raise UsageError(f"--workers must be >= 1, got {self.workers}")
